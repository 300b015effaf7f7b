"""Backend contracts for the three model capabilities the toolkit consumes.

Every backend implements one capability: filling a masked slot, scoring
textual entailment, or extracting an answer span. Implementations must be
immutable after construction and safe to call from multiple threads (they
may serialize calls internally). Batch variants are list-in/list-out and
order-preserving.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

from ..errors import MissingMask

MASK = "[Z]"


def count_masks(text: str) -> int:
    return text.count(MASK)


def require_single_mask(text: str) -> None:
    n = count_masks(text)
    if n != 1:
        raise MissingMask(f"expected exactly one {MASK!r} marker, found {n}")


@dataclass(frozen=True)
class MaskFillResult:
    """One proposed slot filler with its softmax probability."""

    token: str
    probability: float

    def __post_init__(self):
        if not self.token or any(c.isspace() for c in self.token):
            raise ValueError(f"token must be non-empty without whitespace: {self.token!r}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability outside [0, 1]: {self.probability}")


@dataclass(frozen=True)
class EntailmentScore:
    """Probability of the entail class; neutral/contradiction mass discarded."""

    entail_probability: float

    def __post_init__(self):
        if not 0.0 <= self.entail_probability <= 1.0:
            raise ValueError(f"entail_probability outside [0, 1]: {self.entail_probability}")


@dataclass(frozen=True)
class SpanAnswer:
    """An answer span with character offsets into the context it came from."""

    text: str
    start: int
    end: int
    confidence: float

    def verify(self, context: str) -> None:
        if not (0 <= self.start < self.end <= len(context)):
            raise ValueError(f"offsets [{self.start}, {self.end}) out of range for context")
        if context[self.start : self.end] != self.text:
            raise ValueError("span text does not match context slice")


@dataclass(frozen=True)
class BackendConfig:
    """Checkpoint identifiers and inference settings for the real backends."""

    fill_model_id: str = "distilbert-base-uncased"
    nli_model_id: str = "roberta-large-mnli"
    qa_model_id: str = "deepset/roberta-base-squad2"
    device: str = "cpu"
    max_length: int = 512

    def __post_init__(self):
        for name in ("fill_model_id", "nli_model_id", "qa_model_id"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")


class MaskFillBackend(ABC):
    """Fills a single masked slot with ranked single-token candidates."""

    @abstractmethod
    def fill_mask(
        self,
        text_with_slot: str,
        k: int,
        allowed_tokens: frozenset[str] | None = None,
    ) -> list[MaskFillResult]:
        """Return up to ``k`` fills sorted by non-increasing probability.

        ``allowed_tokens`` restricts the candidate pool; probabilities are
        re-ranked within the restriction, never re-normalized. Tokens the
        model cannot produce as a single piece are simply absent.
        """

    def fill_mask_batch(
        self,
        texts: list[str],
        k: int,
        allowed_tokens: frozenset[str] | None = None,
    ) -> list[list[MaskFillResult]]:
        return [self.fill_mask(t, k, allowed_tokens) for t in texts]


class EntailmentBackend(ABC):
    """Scores whether a premise entails a hypothesis."""

    @abstractmethod
    def entailment_probability(self, premise: str, hypothesis: str) -> EntailmentScore:
        """p(entail) under the model's three-way softmax."""

    def entailment_probability_batch(
        self, pairs: list[tuple[str, str]]
    ) -> list[EntailmentScore]:
        return [self.entailment_probability(p, h) for p, h in pairs]


class QABackend(ABC):
    """Extracts the best answer span for a question over a context."""

    @abstractmethod
    def extractive_answer(self, question: str, context: str) -> SpanAnswer:
        """Best span with confidence; raises NoAnswer when the model abstains."""

    def extractive_answer_batch(
        self, pairs: list[tuple[str, str]]
    ) -> list[SpanAnswer]:
        return [self.extractive_answer(q, c) for q, c in pairs]


@dataclass
class BackendSuite:
    """The three capabilities bundled, as the pipeline consumes them."""

    fill: MaskFillBackend
    nli: EntailmentBackend
    qa: QABackend | None = field(default=None)
