"""Two-stage candidate generation: prompt a cloze model, filter by entailment.

An event description is extended with a slotted template and the language
model proposes top-K single-token fills. Each fill is then re-checked by
treating the description as premise and the filled template as hypothesis;
candidates whose entailment probability clears the threshold survive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .backends.base import MASK, BackendSuite, count_masks
from .errors import InvalidTemplates, PrentError

_TERMINAL = (".", "!", "?")


@dataclass(frozen=True)
class EventDescription:
    """One event, typically one to three sentences."""

    text: str
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "text", self.text.strip())
        if not self.text:
            raise ValueError("event description is empty")


@dataclass(frozen=True)
class Template:
    """A prompt sentence with exactly one [Z] slot."""

    id: str
    text: str

    def __post_init__(self):
        if count_masks(self.text) != 1:
            raise ValueError(f"template must contain exactly one {MASK!r}: {self.text!r}")
        if not self.text.rstrip().endswith(_TERMINAL):
            raise ValueError(f"template must end with terminal punctuation: {self.text!r}")

    def fill(self, token: str) -> str:
        """The hypothesis: the slot replaced verbatim by the candidate token."""
        return self.text.replace(MASK, token)


@dataclass(frozen=True)
class PipelineConfig:
    top_k: int = 30
    entail_threshold: float = 0.5
    allowed_tokens: frozenset[str] | None = None

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")
        if not 0.0 <= self.entail_threshold <= 1.0:
            raise ValueError(f"entail_threshold outside [0, 1]: {self.entail_threshold}")
        if self.allowed_tokens is not None:
            if not self.allowed_tokens:
                raise ValueError("allowed_tokens must be non-empty when set")
            object.__setattr__(self, "allowed_tokens", frozenset(self.allowed_tokens))


@dataclass(frozen=True)
class CandidateSet:
    """Ranked prompted tokens with their fill probabilities."""

    event: EventDescription
    template: Template
    candidates: tuple[tuple[str, float], ...]

    def tokens(self) -> list[str]:
        return [t for t, _ in self.candidates]


@dataclass(frozen=True)
class EntailedSet:
    """Candidates surviving the entailment filter, original ranking preserved."""

    event: EventDescription
    template: Template
    entailed: tuple[tuple[str, float, float], ...]
    threshold: float

    def tokens(self) -> list[str]:
        return [t for t, _, _ in self.entailed]

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "event_id": self.event.id,
                "template_id": self.template.id,
                "entailed": [
                    {"token": t, "fill_p": fp, "entail_p": ep}
                    for t, fp, ep in self.entailed
                ],
            }
        )


def render_prompt(event: EventDescription, template: Template) -> str:
    """Event text and template joined by a single space."""
    return f"{event.text} {template.text.strip()}"


def prompt_candidates(
    event: EventDescription,
    template: Template,
    config: PipelineConfig,
    backends: BackendSuite,
) -> CandidateSet:
    """Top-K fills of the rendered prompt, restricted to the allowed vocabulary
    when one is configured (re-ranked, not re-normalized)."""
    fills = backends.fill.fill_mask(
        render_prompt(event, template), config.top_k, config.allowed_tokens
    )
    return CandidateSet(event, template, tuple((f.token, f.probability) for f in fills))


def filter_entailed(
    event: EventDescription,
    template: Template,
    candidate_set: CandidateSet,
    config: PipelineConfig,
    backends: BackendSuite,
) -> EntailedSet:
    """Keep candidates whose filled template is entailed by the description.

    The comparison is inclusive (>= threshold), so threshold 0 keeps every
    candidate and an empty result is a valid output, not an error.
    """
    pairs = [(event.text, template.fill(token)) for token, _ in candidate_set.candidates]
    scores = backends.nli.entailment_probability_batch(pairs)
    kept = tuple(
        (token, fill_p, score.entail_probability)
        for (token, fill_p), score in zip(candidate_set.candidates, scores)
        if score.entail_probability >= config.entail_threshold
    )
    return EntailedSet(event, template, kept, config.entail_threshold)


def run_template(
    event: EventDescription,
    template: Template,
    config: PipelineConfig,
    backends: BackendSuite,
) -> tuple[CandidateSet, EntailedSet]:
    """Both pipeline stages for one template."""
    candidates = prompt_candidates(event, template, config, backends)
    return candidates, filter_entailed(event, template, candidates, config, backends)


def pr_ent(
    event: EventDescription,
    templates: list[Template],
    config: PipelineConfig,
    backends: BackendSuite,
    errors: dict[str, Exception] | None = None,
) -> dict[str, EntailedSet]:
    """Run the pipeline independently per template.

    A failing template is left out of the result; its exception is recorded in
    ``errors`` (when given) so one failure never aborts the other templates.
    """
    if not templates:
        raise InvalidTemplates("template list is empty")
    ids = [t.id for t in templates]
    if len(set(ids)) != len(ids):
        raise InvalidTemplates(f"duplicate template ids: {ids}")
    results: dict[str, EntailedSet] = {}
    for template in templates:
        try:
            _, entailed = run_template(event, template, config, backends)
            results[template.id] = entailed
        except PrentError as exc:
            if errors is not None:
                errors[template.id] = exc
    return results
