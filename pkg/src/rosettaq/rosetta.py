"""Rosetta questions: the unified question/answer-code space.

File format, tab-separated, one question per row:

    rosetta_id  leaf_path  body_template  codes

``codes`` is ``|``-separated ``n=label`` pairs with contiguous 1-based codes.
Body templates carry the placeholders ``[NAME]`` (required) and ``[his/her]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import RenderError, RosettaQuestionParseError
from .ontology import LeafPath, format_leaf_path, parse_leaf_path

PLACEHOLDER_NAME = "[NAME]"
PLACEHOLDER_PRONOUN = "[his/her]"

PRONOUNS = {"male": "his", "female": "her", "neutral": "their"}

ID_PATTERN = re.compile(r"^R-[a-z0-9]+(-[a-z0-9]+)*-\d+$")
_TOKEN = re.compile(r"\[([^\[\]]*)\]")


def slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "x"


def make_rosetta_id(leaf_name: str, n: int) -> str:
    return f"R-{slugify(leaf_name)}-{n}"


@dataclass(frozen=True)
class RosettaCode:
    code: int  # 1-based, ascending severity
    label: str


@dataclass(frozen=True)
class RosettaQuestion:
    id: str
    leaf: LeafPath
    body_template: str
    codes: tuple[RosettaCode, ...]

    @property
    def code_count(self) -> int:
        return len(self.codes)

    def code_range(self) -> range:
        return range(1, self.code_count + 1)

    def check(self) -> str | None:
        """Return a problem description, or None when well formed."""
        if self.code_count < 2:
            return "needs at least 2 answer codes"
        if [c.code for c in self.codes] != list(range(1, self.code_count + 1)):
            return "answer codes must be contiguous from 1"
        labels = [c.label for c in self.codes]
        if any(not lab for lab in labels):
            return "answer code labels must be nonempty"
        if len(set(labels)) != len(labels):
            return "answer code labels must be unique"
        if PLACEHOLDER_NAME not in self.body_template:
            return f"body template must contain {PLACEHOLDER_NAME}"
        for token in _TOKEN.findall(self.body_template):
            if f"[{token}]" not in (PLACEHOLDER_NAME, PLACEHOLDER_PRONOUN):
                return f"unknown placeholder [{token}]"
        return None


def make_codes(labels: list[str] | tuple[str, ...]) -> tuple[RosettaCode, ...]:
    return tuple(RosettaCode(i, lab) for i, lab in enumerate(labels, start=1))


def render_question(q: RosettaQuestion, name: str, gender: str) -> str:
    """Substitute the placeholders; the result contains no bracketed token."""
    if gender not in PRONOUNS:
        raise RenderError(f"unknown gender {gender!r}; expected one of {sorted(PRONOUNS)}")

    def sub(match: re.Match) -> str:
        token = match.group(0)
        if token == PLACEHOLDER_NAME:
            return name
        if token == PLACEHOLDER_PRONOUN:
            return PRONOUNS[gender]
        raise RenderError(f"unknown placeholder {token} in {q.id}")

    return _TOKEN.sub(sub, q.body_template)


def parse_rosetta_questions(
    text: str, file: str | None = None
) -> list[RosettaQuestion]:
    questions: list[RosettaQuestion] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("#") or not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) != 4:
            raise RosettaQuestionParseError(
                f"row needs 4 tab-separated fields, got {len(fields)}", lineno, file
            )
        rid, leaf_text, template, codes_text = fields
        if rid in seen:
            raise RosettaQuestionParseError(f"duplicate rosetta id {rid!r}", lineno, file)
        seen.add(rid)
        try:
            leaf = parse_leaf_path(leaf_text)
        except ValueError as exc:
            raise RosettaQuestionParseError(str(exc), lineno, file) from None
        labels = []
        for i, part in enumerate(codes_text.split("|"), start=1):
            num, sep, label = part.partition("=")
            if not sep or num.strip() != str(i):
                raise RosettaQuestionParseError(
                    f"codes must be '1=label|2=label|...', got {part!r}", lineno, file
                )
            labels.append(label)
        q = RosettaQuestion(id=rid, leaf=leaf, body_template=template, codes=make_codes(labels))
        problem = q.check()
        if problem is not None:
            raise RosettaQuestionParseError(f"{rid}: {problem}", lineno, file)
        questions.append(q)
    return questions


def serialize_rosetta_questions(questions: list[RosettaQuestion]) -> str:
    lines = []
    for q in questions:
        codes = "|".join(f"{c.code}={c.label}" for c in q.codes)
        lines.append("\t".join([q.id, format_leaf_path(q.leaf), q.body_template, codes]))
    return "\n".join(lines) + "\n"
