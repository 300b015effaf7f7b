"""Exception types shared across the toolkit."""


class PrentError(Exception):
    """Base class for all toolkit errors."""


class MissingMask(PrentError):
    """Input does not contain exactly one mask slot."""


class BackendUnavailable(PrentError):
    """A model checkpoint could not be loaded or reached."""


class InputTooLong(PrentError):
    """Input exceeds the model's maximum length even after truncation."""


class NoAnswer(PrentError):
    """The QA model abstained or fell below the confidence floor."""


class MockLookupMiss(PrentError):
    """A mock backend received an input absent from its fixture table."""


class InvalidTemplates(PrentError):
    """Template list is empty or contains duplicate ids."""


class UnknownTemplate(PrentError):
    """A rule literal references a template id with no entailed-token entry."""


class SchemaViolation(PrentError):
    """A document failed schema validation.

    ``path`` locates the offending field, e.g. ``event_types.Arrest.any_of[0]``.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{message} (at {path})" if path else message)


class DuplicateEvent(PrentError):
    """Feedback for this event id was already recorded in the session."""


class InsufficientData(PrentError):
    """Not enough records to satisfy the requested split or subset sizes."""


class MissingPipelineOutput(PrentError):
    """Featurization mode requires pipeline outputs that were not supplied."""


class DegenerateLabels(PrentError):
    """Training labels contain a single class."""


class MissingFatalities(PrentError):
    """Lethal-event evaluation needs fatality counts on every record."""


class VocabMismatch(PrentError):
    """Two token distributions are not aligned to the same vocabulary."""


class EmptyDistribution(PrentError):
    """Operation received a distribution whose probability mass is all zero."""
