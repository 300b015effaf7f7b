"""Backend implementations for mask filling, entailment scoring and QA."""

from .base import (
    MASK,
    BackendConfig,
    BackendSuite,
    EntailmentBackend,
    EntailmentScore,
    MaskFillBackend,
    MaskFillResult,
    QABackend,
    SpanAnswer,
)
from .mock import TableEntailmentBackend, TableFillBackend, TableQABackend
from .simulated import (
    SimulatedEntailmentBackend,
    SimulatedFillBackend,
    SimulatedQABackend,
)

__all__ = [
    "MASK",
    "BackendConfig",
    "BackendSuite",
    "EntailmentBackend",
    "EntailmentScore",
    "MaskFillBackend",
    "MaskFillResult",
    "QABackend",
    "SpanAnswer",
    "TableEntailmentBackend",
    "TableFillBackend",
    "TableQABackend",
    "SimulatedEntailmentBackend",
    "SimulatedFillBackend",
    "SimulatedQABackend",
    "simulated_suite",
    "transformers_suite",
]


def simulated_suite() -> BackendSuite:
    """Offline backend suite driven by the corpus simulator."""
    return BackendSuite(
        fill=SimulatedFillBackend(),
        nli=SimulatedEntailmentBackend(),
        qa=SimulatedQABackend(),
    )


def transformers_suite(config: BackendConfig = BackendConfig()) -> BackendSuite:
    """Checkpoint-backed suite; raises BackendUnavailable if models cannot load."""
    from .hf import HFEntailmentBackend, HFFillBackend, HFQABackend

    return BackendSuite(
        fill=HFFillBackend(config),
        nli=HFEntailmentBackend(config),
        qa=HFQABackend(config),
    )
