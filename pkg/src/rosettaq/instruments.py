"""Instrument questionnaires: answer scales, questions, and the file format.

An instrument file is UTF-8 tab-separated. It opens with a header block of
``key<TAB>value`` lines (name, version, age_min_months, age_max_months,
reporter), followed by one row per question:

    question_id  leaf_path  body  scale_kind  choices

``leaf_path`` is ``/``-separated, ``choices`` is a ``|``-separated list of
labels ordered by ascending severity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InstrumentParseError
from .ontology import LeafPath, OntologyTree, format_leaf_path, parse_leaf_path

SCALE_KINDS = ("frequency", "quality", "binary")
REPORTERS = ("clinician", "parent", "teacher", "self")

HEADER_KEYS = ("name", "version", "age_min_months", "age_max_months", "reporter")


@dataclass(frozen=True)
class AnswerChoice:
    index: int  # 1-based, ascending severity
    label: str


@dataclass(frozen=True)
class AnswerScale:
    kind: str
    choices: tuple[AnswerChoice, ...]

    def __post_init__(self):
        if self.kind not in SCALE_KINDS:
            raise ValueError(f"unknown scale kind {self.kind!r}")

    @property
    def size(self) -> int:
        return len(self.choices)

    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.choices)

    def check(self) -> str | None:
        """Return a problem description, or None when the scale is well formed."""
        if self.size < 2:
            return "scale needs at least 2 choices"
        if [c.index for c in self.choices] != list(range(1, self.size + 1)):
            return "choice indices must be contiguous from 1"
        labels = self.labels()
        if any(not lab for lab in labels):
            return "choice labels must be nonempty"
        if len(set(labels)) != len(labels):
            return "choice labels must be unique within the scale"
        if self.kind == "binary" and self.size != 2:
            return "binary scales must have exactly 2 choices"
        return None


def make_scale(kind: str, labels: list[str] | tuple[str, ...]) -> AnswerScale:
    return AnswerScale(
        kind=kind,
        choices=tuple(AnswerChoice(i, lab) for i, lab in enumerate(labels, start=1)),
    )


@dataclass(frozen=True)
class SourceQuestion:
    id: str
    leaf: LeafPath
    body: str
    scale: AnswerScale


@dataclass
class InstrumentVersion:
    instrument: str
    version: str
    age_min_months: int
    age_max_months: int
    reporter: str
    questions: list[SourceQuestion] = field(default_factory=list)

    @property
    def key(self) -> tuple[str, str]:
        return (self.instrument, self.version)

    def question(self, qid: str) -> SourceQuestion | None:
        return self._by_id().get(qid)

    def _by_id(self) -> dict[str, SourceQuestion]:
        return {q.id: q for q in self.questions}


def parse_instrument(
    text: str, ontology: OntologyTree | None = None, file: str | None = None
) -> InstrumentVersion:
    """Parse one instrument file. When an ontology is given, every question's
    leaf path must resolve to one of its leaves."""
    header: dict[str, str] = {}
    questions: list[SourceQuestion] = []
    seen_ids: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("#") or not raw.strip():
            continue
        fields = raw.split("\t")
        if len(header) < len(HEADER_KEYS):
            if len(fields) != 2 or fields[0] not in HEADER_KEYS:
                raise InstrumentParseError(
                    f"expected header line ({'/'.join(HEADER_KEYS)}), got {raw!r}",
                    lineno,
                    file,
                )
            if fields[0] in header:
                raise InstrumentParseError(
                    f"duplicate header key {fields[0]!r}", lineno, file
                )
            header[fields[0]] = fields[1]
            continue
        if len(fields) != 5:
            raise InstrumentParseError(
                f"question row needs 5 tab-separated fields, got {len(fields)}",
                lineno,
                file,
            )
        qid, leaf_text, body, kind, choices_text = fields
        if not qid:
            raise InstrumentParseError("empty question id", lineno, file)
        if qid in seen_ids:
            raise InstrumentParseError(f"duplicate question id {qid!r}", lineno, file)
        seen_ids.add(qid)
        try:
            leaf = parse_leaf_path(leaf_text)
        except ValueError as exc:
            raise InstrumentParseError(str(exc), lineno, file) from None
        if kind not in SCALE_KINDS:
            raise InstrumentParseError(f"unknown scale kind {kind!r}", lineno, file)
        scale = make_scale(kind, choices_text.split("|"))
        problem = scale.check()
        if problem is not None:
            raise InstrumentParseError(problem, lineno, file)
        if ontology is not None and ontology.resolve_leaf(leaf) is None:
            raise InstrumentParseError(
                f"unknown leaf path {leaf_text!r}", lineno, file
            )
        questions.append(SourceQuestion(id=qid, leaf=leaf, body=body, scale=scale))

    missing = [k for k in HEADER_KEYS if k not in header]
    if missing:
        raise InstrumentParseError(f"missing header keys: {', '.join(missing)}", 1, file)
    if not questions:
        raise InstrumentParseError("instrument has no questions", 1, file)
    if header["reporter"] not in REPORTERS:
        raise InstrumentParseError(f"unknown reporter {header['reporter']!r}", 1, file)
    try:
        age_min = int(header["age_min_months"])
        age_max = int(header["age_max_months"])
    except ValueError:
        raise InstrumentParseError("age bounds must be integers (months)", 1, file) from None
    return InstrumentVersion(
        instrument=header["name"],
        version=header["version"],
        age_min_months=age_min,
        age_max_months=age_max,
        reporter=header["reporter"],
        questions=questions,
    )


def serialize_instrument(iv: InstrumentVersion) -> str:
    lines = [
        f"name\t{iv.instrument}",
        f"version\t{iv.version}",
        f"age_min_months\t{iv.age_min_months}",
        f"age_max_months\t{iv.age_max_months}",
        f"reporter\t{iv.reporter}",
    ]
    for q in iv.questions:
        choices = "|".join(q.scale.labels())
        lines.append(
            "\t".join([q.id, format_leaf_path(q.leaf), q.body, q.scale.kind, choices])
        )
    return "\n".join(lines) + "\n"
