"""Registry: ontology + instruments + Rosetta questions + crosswalk, plus the
validator that mechanizes every structural rule of the mapping process.

Registry values are immutable by convention once constructed; the validator
never mutates its input, so one registry can back concurrent readers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .crosswalk import Crosswalk, parse_crosswalk_links
from .errors import ValidationFailure
from .instruments import InstrumentVersion, parse_instrument
from .ontology import OntologyTree, format_leaf_path, parse_ontology
from .rosetta import ID_PATTERN, RosettaQuestion, parse_rosetta_questions

ONTOLOGY_FILE = "ontology.txt"
ROSETTA_FILE = "rosetta.tsv"
CROSSWALK_FILE = "crosswalk.tsv"
INSTRUMENTS_DIR = "instruments"

SEVERITIES = ("error", "warning")


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    severity: str
    message: str
    where: str
    file: str | None = None
    line: int | None = None

    def format(self) -> str:
        loc = self.file or ""
        if self.line is not None:
            loc += f":{self.line}"
        if loc:
            loc += ": "
        return f"{self.severity.upper()} {self.rule} {loc}{self.where}: {self.message}"


@dataclass
class ValidationReport:
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors()

    def rules(self) -> set[str]:
        return {d.rule for d in self.diagnostics}

    def summary(self) -> str:
        return f"{len(self.errors())} errors, {len(self.warnings())} warnings"

    def to_text(self) -> str:
        lines = [d.format() for d in self.diagnostics]
        lines.append(self.summary())
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = [
            {
                "rule": d.rule,
                "severity": d.severity,
                "file": d.file,
                "line": d.line,
                "where": d.where,
                "message": d.message,
            }
            for d in self.diagnostics
        ]
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


@dataclass
class Registry:
    ontology: OntologyTree
    instruments: list[InstrumentVersion] = field(default_factory=list)
    rosetta_questions: list[RosettaQuestion] = field(default_factory=list)
    crosswalk: Crosswalk = field(default_factory=Crosswalk)

    def instrument_version(self, instrument: str, version: str) -> InstrumentVersion | None:
        for iv in self.instruments:
            if iv.instrument == instrument and iv.version == version:
                return iv
        return None

    def instrument_names(self) -> list[str]:
        """Distinct instrument names in first-appearance order."""
        names: list[str] = []
        for iv in self.instruments:
            if iv.instrument not in names:
                names.append(iv.instrument)
        return names

    def rosetta_by_id(self) -> dict[str, RosettaQuestion]:
        return {q.id: q for q in self.rosetta_questions}


# --- validation rules -------------------------------------------------------
#
# Rule ids are stable; tests and the brute-force rule checker key off them.
# ONT*: ontology, INS*: instruments, ROS*: rosetta questions, XWK*: crosswalk.

ONT_ROOT_NAME = "ONT001"
ONT_DEPTH = "ONT002"
ONT_DUP_SIBLING = "ONT003"
INS_DUP_VERSION = "INS001"
INS_DUP_QID = "INS002"
INS_BAD_LEAF = "INS003"
INS_BAD_SCALE = "INS004"
INS_EMPTY = "INS005"
INS_AGE_RANGE = "INS006"
ROS_DUP_ID = "ROS001"
ROS_BAD_LEAF = "ROS002"
ROS_BAD_CODES = "ROS003"
ROS_ID_STYLE = "ROS004"
XWK_DANGLING_VERSION = "XWK001"
XWK_DANGLING_QUESTION = "XWK002"
XWK_DANGLING_ROSETTA = "XWK003"
XWK_MANY_TO_ONE = "XWK004"
XWK_LEAF_MISMATCH = "XWK005"
XWK_NOT_TOTAL = "XWK006"
XWK_NOT_MONOTONE = "XWK007"
XWK_MINIMAL_CODE = "XWK008"
XWK_CODE_RANGE = "XWK009"
XWK_DUP_LINK = "XWK010"
XWK_UNMAPPED_SOURCE = "XWK011"
XWK_UNMAPPED_ROSETTA = "XWK012"

from .ontology import MAX_DEPTH, ROOT_DOMAINS  # noqa: E402  (constants only)


def validate(registry: Registry) -> ValidationReport:
    """Check every registry rule; reports diagnostics, never raises.

    Pure and idempotent: validating the same registry twice yields equal
    reports. Unmapped source questions and Rosetta questions without sources
    are warnings; everything else in the rulebook is an error.
    """
    report = ValidationReport()

    def add(rule: str, severity: str, where: str, message: str, line: int | None = None):
        report.diagnostics.append(
            Diagnostic(rule=rule, severity=severity, message=message, where=where, line=line)
        )

    _check_ontology(registry.ontology, add)
    _check_instruments(registry, add)
    _check_rosetta(registry, add)
    _check_crosswalk(registry, add)
    return report


def _check_ontology(tree: OntologyTree, add) -> None:
    for root in tree.roots:
        if root.name not in ROOT_DOMAINS:
            add(
                ONT_ROOT_NAME,
                "error",
                root.name,
                f"level-1 domain must be one of {', '.join(ROOT_DOMAINS)}",
            )
    for node in tree.nodes():
        if node.level > MAX_DEPTH:
            add(ONT_DEPTH, "error", format_leaf_path(node.path()), "deeper than 4 levels")
        names = [c.name for c in node.children]
        for name in sorted(set(n for n in names if names.count(n) > 1)):
            add(
                ONT_DUP_SIBLING,
                "error",
                format_leaf_path(node.path()) + "/" + name,
                "duplicate sibling name",
            )
    root_names = [r.name for r in tree.roots]
    for name in sorted(set(n for n in root_names if root_names.count(n) > 1)):
        add(ONT_DUP_SIBLING, "error", name, "duplicate level-1 name")


def _check_instruments(registry: Registry, add) -> None:
    seen: set[tuple[str, str]] = set()
    for iv in registry.instruments:
        where = f"{iv.instrument}/{iv.version}"
        if iv.key in seen:
            add(INS_DUP_VERSION, "error", where, "duplicate (instrument, version) pair")
        seen.add(iv.key)
        if not iv.questions:
            add(INS_EMPTY, "error", where, "instrument version has no questions")
        if iv.age_min_months > iv.age_max_months:
            add(INS_AGE_RANGE, "error", where, "age_min_months exceeds age_max_months")
        qids: set[str] = set()
        for q in iv.questions:
            qwhere = f"{where} q{q.id}"
            if q.id in qids:
                add(INS_DUP_QID, "error", qwhere, "duplicate question id")
            qids.add(q.id)
            if registry.ontology.resolve_leaf(q.leaf) is None:
                add(
                    INS_BAD_LEAF,
                    "error",
                    qwhere,
                    f"leaf path {format_leaf_path(q.leaf)!r} does not resolve to a leaf",
                )
            problem = q.scale.check()
            if problem is not None:
                add(INS_BAD_SCALE, "error", qwhere, problem)


def _check_rosetta(registry: Registry, add) -> None:
    seen: set[str] = set()
    for q in registry.rosetta_questions:
        if q.id in seen:
            add(ROS_DUP_ID, "error", q.id, "duplicate rosetta id")
        seen.add(q.id)
        if registry.ontology.resolve_leaf(q.leaf) is None:
            add(
                ROS_BAD_LEAF,
                "error",
                q.id,
                f"leaf path {format_leaf_path(q.leaf)!r} does not resolve to a leaf",
            )
        problem = q.check()
        if problem is not None:
            add(ROS_BAD_CODES, "error", q.id, problem)
        if not ID_PATTERN.match(q.id):
            add(ROS_ID_STYLE, "warning", q.id, "id does not follow R-<leafslug>-<n>")


def _check_crosswalk(registry: Registry, add) -> None:
    rosetta = registry.rosetta_by_id()
    versions = {iv.key: iv for iv in registry.instruments}

    targets_per_source: dict[tuple[str, str, str], set[str]] = {}
    rows_seen: set[tuple] = set()
    mapped_sources: set[tuple[str, str, str]] = set()
    min_choices_per_rosetta: dict[str, list[tuple[int, str]]] = {}

    for link in registry.crosswalk.links:
        where = f"{link.instrument}/{link.version} q{link.question_id} -> {link.rosetta_id}"
        line = link.line

        row_key = (link.source_key, link.rosetta_id, tuple(sorted(link.answer_map.items())))
        if row_key in rows_seen:
            add(XWK_DUP_LINK, "warning", where, "duplicate crosswalk row", line)
        rows_seen.add(row_key)
        targets_per_source.setdefault(link.source_key, set()).add(link.rosetta_id)

        iv = versions.get((link.instrument, link.version))
        if iv is None:
            add(XWK_DANGLING_VERSION, "error", where, "unknown instrument version", line)
            continue
        sq = iv.question(link.question_id)
        if sq is None:
            add(XWK_DANGLING_QUESTION, "error", where, "unknown question id", line)
            continue
        rq = rosetta.get(link.rosetta_id)
        if rq is None:
            add(XWK_DANGLING_ROSETTA, "error", where, "unknown rosetta id", line)
            continue

        mapped_sources.add(link.source_key)
        min_choices_per_rosetta.setdefault(rq.id, []).append((sq.scale.size, where))

        if sq.leaf != rq.leaf:
            add(
                XWK_LEAF_MISMATCH,
                "error",
                where,
                f"source leaf {format_leaf_path(sq.leaf)!r} != rosetta leaf "
                f"{format_leaf_path(rq.leaf)!r}",
                line,
            )
        choice_indices = [c.index for c in sq.scale.choices]
        if sorted(link.answer_map) != choice_indices:
            add(
                XWK_NOT_TOTAL,
                "error",
                where,
                f"answer map must cover choices {choice_indices[0]}..{choice_indices[-1]} "
                "exactly once each",
                line,
            )
        codes = [link.answer_map[c] for c in sorted(link.answer_map)]
        if any(b < a for a, b in zip(codes, codes[1:])):
            add(XWK_NOT_MONOTONE, "error", where, "answer map must be non-decreasing", line)
        out_of_range = sorted(set(c for c in codes if not 1 <= c <= rq.code_count))
        if out_of_range:
            add(
                XWK_CODE_RANGE,
                "error",
                where,
                f"mapped codes {out_of_range} outside 1..{rq.code_count}",
                line,
            )

    # Many-to-one: a source question may feed at most one Rosetta question.
    for source_key, targets in targets_per_source.items():
        if len(targets) > 1:
            instrument, version, qid = source_key
            add(
                XWK_MANY_TO_ONE,
                "error",
                f"{instrument}/{version} q{qid}",
                f"mapped to {len(targets)} rosetta questions: {', '.join(sorted(targets))}",
            )

    # Minimal-code rule: a Rosetta question may not out-resolve its coarsest source.
    for rid, sizes in min_choices_per_rosetta.items():
        rq = rosetta[rid]
        smallest, where = min(sizes)
        if rq.code_count > smallest:
            add(
                XWK_MINIMAL_CODE,
                "error",
                rid,
                f"{rq.code_count} codes exceeds the coarsest linked scale "
                f"({smallest} choices, {where})",
            )

    # Coverage warnings.
    for iv in registry.instruments:
        for q in iv.questions:
            if (iv.instrument, iv.version, q.id) not in mapped_sources:
                add(
                    XWK_UNMAPPED_SOURCE,
                    "warning",
                    f"{iv.instrument}/{iv.version} q{q.id}",
                    "source question has no crosswalk link",
                )
    for q in registry.rosetta_questions:
        if q.id not in min_choices_per_rosetta:
            add(
                XWK_UNMAPPED_ROSETTA,
                "warning",
                q.id,
                "rosetta question receives no mapped sources",
            )


# --- directory loading ------------------------------------------------------


def load_registry(root: str | Path, strict: bool = True) -> Registry:
    """Load a registry directory.

    Layout: ``ontology.txt``, ``rosetta.tsv``, ``crosswalk.tsv``, and one
    instrument file per version under ``instruments/`` (read in sorted name
    order). With ``strict`` (the default), validation errors raise
    ValidationFailure; pass ``strict=False`` to obtain the registry for
    diagnostic reporting.
    """
    root = Path(root)
    ontology = parse_ontology(
        (root / ONTOLOGY_FILE).read_text(encoding="utf-8"), file=ONTOLOGY_FILE
    )
    instruments = []
    inst_dir = root / INSTRUMENTS_DIR
    if inst_dir.is_dir():
        for path in sorted(inst_dir.iterdir()):
            if path.suffix == ".tsv":
                instruments.append(
                    parse_instrument(path.read_text(encoding="utf-8"), file=path.name)
                )
    rosetta_path = root / ROSETTA_FILE
    rosetta_questions = (
        parse_rosetta_questions(rosetta_path.read_text(encoding="utf-8"), file=ROSETTA_FILE)
        if rosetta_path.exists()
        else []
    )
    xwalk_path = root / CROSSWALK_FILE
    crosswalk = (
        parse_crosswalk_links(xwalk_path.read_text(encoding="utf-8"), file=CROSSWALK_FILE)
        if xwalk_path.exists()
        else Crosswalk()
    )
    registry = Registry(
        ontology=ontology,
        instruments=instruments,
        rosetta_questions=rosetta_questions,
        crosswalk=crosswalk,
    )
    if strict:
        report = validate(registry)
        if not report.ok:
            raise ValidationFailure(report)
    return registry


def parse_crosswalk(text: str, registry: Registry, file: str | None = None) -> Crosswalk:
    """Parse a crosswalk file and enforce every mapping rule against the
    registry's instruments and Rosetta questions. Raises ValidationFailure
    when any rule is broken."""
    crosswalk = parse_crosswalk_links(text, file=file)
    candidate = Registry(
        ontology=registry.ontology,
        instruments=registry.instruments,
        rosetta_questions=registry.rosetta_questions,
        crosswalk=crosswalk,
    )
    report = validate(candidate)
    xwk_errors = [d for d in report.errors() if d.rule.startswith("XWK")]
    if xwk_errors:
        raise ValidationFailure(ValidationReport(diagnostics=xwk_errors))
    return crosswalk


def write_registry(registry: Registry, root: str | Path) -> None:
    """Serialize a registry to the directory layout load_registry reads."""
    from .instruments import serialize_instrument
    from .ontology import serialize_ontology
    from .rosetta import serialize_rosetta_questions, slugify
    from .crosswalk import serialize_crosswalk

    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    (root / ONTOLOGY_FILE).write_text(serialize_ontology(registry.ontology), encoding="utf-8")
    inst_dir = root / INSTRUMENTS_DIR
    inst_dir.mkdir(exist_ok=True)
    for iv in registry.instruments:
        fname = f"{slugify(iv.instrument)}__{slugify(iv.version)}.tsv"
        (inst_dir / fname).write_text(serialize_instrument(iv), encoding="utf-8")
    (root / ROSETTA_FILE).write_text(
        serialize_rosetta_questions(registry.rosetta_questions), encoding="utf-8"
    )
    (root / CROSSWALK_FILE).write_text(
        serialize_crosswalk(registry.crosswalk), encoding="utf-8"
    )
