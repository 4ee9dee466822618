"""The crosswalk: many-to-one links from source questions to Rosetta questions.

Each link carries a total answer map from the source scale's choice indices to
Rosetta answer codes. File format, tab-separated, one link per row:

    instrument  version  question_id  rosetta_id  answer_map

``answer_map`` looks like ``1:1,2:2,3:2,4:3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CrosswalkParseError

SourceKey = tuple[str, str, str]  # (instrument, version, question_id)


@dataclass
class CrosswalkLink:
    instrument: str
    version: str
    question_id: str
    rosetta_id: str
    answer_map: dict[int, int]
    line: int | None = field(default=None, repr=False, compare=False)

    @property
    def source_key(self) -> SourceKey:
        return (self.instrument, self.version, self.question_id)


@dataclass
class Crosswalk:
    links: list[CrosswalkLink] = field(default_factory=list)

    def by_source(self) -> dict[SourceKey, CrosswalkLink]:
        """First link per source; duplicate sources are a validation concern."""
        out: dict[SourceKey, CrosswalkLink] = {}
        for link in self.links:
            out.setdefault(link.source_key, link)
        return out

    def by_rosetta(self) -> dict[str, list[CrosswalkLink]]:
        out: dict[str, list[CrosswalkLink]] = {}
        for link in self.links:
            out.setdefault(link.rosetta_id, []).append(link)
        return out


def parse_answer_map(text: str) -> dict[int, int]:
    amap: dict[int, int] = {}
    for part in text.split(","):
        choice_text, sep, code_text = part.partition(":")
        if not sep:
            raise ValueError(f"answer map entries are 'choice:code', got {part!r}")
        try:
            choice = int(choice_text)
            code = int(code_text)
        except ValueError:
            raise ValueError(f"answer map entries must be integers, got {part!r}") from None
        if choice in amap:
            raise ValueError(f"choice {choice} mapped twice")
        amap[choice] = code
    if not amap:
        raise ValueError("empty answer map")
    return amap


def format_answer_map(amap: dict[int, int]) -> str:
    return ",".join(f"{c}:{amap[c]}" for c in sorted(amap))


def parse_crosswalk_links(text: str, file: str | None = None) -> Crosswalk:
    """Syntax-level parse; id resolution and mapping rules live in the validator."""
    links: list[CrosswalkLink] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("#") or not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) != 5:
            raise CrosswalkParseError(
                f"row needs 5 tab-separated fields, got {len(fields)}", lineno, file
            )
        instrument, version, qid, rid, map_text = fields
        try:
            amap = parse_answer_map(map_text)
        except ValueError as exc:
            raise CrosswalkParseError(str(exc), lineno, file) from None
        links.append(
            CrosswalkLink(
                instrument=instrument,
                version=version,
                question_id=qid,
                rosetta_id=rid,
                answer_map=amap,
                line=lineno,
            )
        )
    return Crosswalk(links=links)


def serialize_crosswalk(xwalk: Crosswalk) -> str:
    lines = []
    for link in xwalk.links:
        lines.append(
            "\t".join(
                [
                    link.instrument,
                    link.version,
                    link.question_id,
                    link.rosetta_id,
                    format_answer_map(link.answer_map),
                ]
            )
        )
    return "\n".join(lines) + "\n"
