"""Exception hierarchy shared across the package."""


class RosettaError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(RosettaError):
    """A source file could not be parsed. Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None, file: str | None = None):
        self.line = line
        self.file = file
        where = ""
        if file is not None:
            where += f"{file}:"
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)


class OntologyParseError(ParseError):
    pass


class InstrumentParseError(ParseError):
    pass


class RosettaQuestionParseError(ParseError):
    pass


class CrosswalkParseError(ParseError):
    pass


class ValidationFailure(RosettaError):
    """A registry failed validation. Carries the full report."""

    def __init__(self, report):
        self.report = report
        errors = report.errors()
        head = "; ".join(d.message for d in errors[:3])
        more = f" (+{len(errors) - 3} more)" if len(errors) > 3 else ""
        super().__init__(f"{len(errors)} validation error(s): {head}{more}")


class RenderError(RosettaError):
    """A question body template contains an unknown placeholder."""


class FusionError(RosettaError):
    """A record cannot be translated or merged against the registry."""


class TrainingError(RosettaError):
    """Model training preconditions are not met."""


class GenerationError(RosettaError):
    """A synthetic cohort cannot be generated from the given spec."""
