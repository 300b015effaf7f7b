"""Perturbation audits: how far do output distributions move under noise?

A fixed answer vocabulary pins both modes to a common support. For every
event, the distribution over that vocabulary is computed before and after a
perturbation (template paraphrase, stop-word removal, entity removal, word
duplication) and compared via Jensen-Shannon distance. Entailment-filtered
distributions should move less than prompt-only ones.
"""

from __future__ import annotations

import json
import math
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from .backends.base import BackendSuite
from .errors import EmptyDistribution, VocabMismatch
from .pipeline import (
    EventDescription,
    PipelineConfig,
    Template,
    prompt_candidates,
    render_prompt,
)

MODES = ("pr", "prent")

_STOPWORDS_FILE = Path(__file__).parent / "data" / "stopwords_en.txt"


def load_stopwords(path: str | Path = _STOPWORDS_FILE) -> frozenset[str]:
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line.lower())
    return frozenset(words)


@dataclass(frozen=True)
class FixedVocab:
    """The N most frequent prompted tokens over a corpus, fixed for audits."""

    template_id: str
    tokens: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("vocabulary tokens must be distinct")
        if not self.tokens:
            raise ValueError("vocabulary must be non-empty")


def build_fixed_vocab(
    events: list[EventDescription],
    template: Template,
    size: int,
    config: PipelineConfig,
    backends: BackendSuite,
) -> FixedVocab:
    """Most frequent candidate tokens across per-event top-K prompts; ties
    break lexicographically."""
    if not events:
        raise ValueError("corpus must be non-empty")
    counts: dict[str, int] = {}
    for event in events:
        for token in prompt_candidates(event, template, config, backends).tokens():
            counts[token] = counts.get(token, 0) + 1
    ranked = sorted(counts, key=lambda t: (-counts[t], t))
    return FixedVocab(template.id, tuple(ranked[:size]))


@dataclass(frozen=True)
class TokenDistribution:
    vocab: FixedVocab
    probabilities: tuple[float, ...]
    empty: bool = False

    def __post_init__(self):
        if len(self.probabilities) != len(self.vocab.tokens):
            raise ValueError("probabilities not aligned to vocabulary")
        if self.empty:
            if any(self.probabilities):
                raise ValueError("EMPTY distribution must carry zero mass")
        else:
            if any(not 0.0 <= p <= 1.0 for p in self.probabilities):
                raise ValueError("probabilities outside [0, 1]")
            if abs(sum(self.probabilities) - 1.0) > 1e-9:
                raise ValueError("probabilities must sum to 1")

    def support(self) -> set[str]:
        return {t for t, p in zip(self.vocab.tokens, self.probabilities) if p > 0}


def token_distribution(
    event: EventDescription,
    template: Template,
    vocab: FixedVocab,
    mode: str,
    config: PipelineConfig,
    backends: BackendSuite,
) -> TokenDistribution:
    """Fill probabilities over the fixed vocabulary, re-normalized.

    In entailed mode, tokens failing the threshold are zeroed before the
    re-normalization; a fully zeroed vector is flagged EMPTY rather than
    smoothed.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    fills = backends.fill.fill_mask(
        render_prompt(event, template), len(vocab.tokens), frozenset(vocab.tokens)
    )
    prob = {f.token: f.probability for f in fills}
    weights = np.array([prob.get(t, 0.0) for t in vocab.tokens])

    if mode == "prent":
        present = [t for t in vocab.tokens if prob.get(t, 0.0) > 0]
        pairs = [(event.text, template.fill(t)) for t in present]
        scores = backends.nli.entailment_probability_batch(pairs)
        passed = {
            t for t, s in zip(present, scores)
            if s.entail_probability >= config.entail_threshold
        }
        weights = np.array(
            [w if t in passed else 0.0 for t, w in zip(vocab.tokens, weights)]
        )

    total = weights.sum()
    if total <= 0:
        return TokenDistribution(vocab, tuple(0.0 for _ in vocab.tokens), empty=True)
    return TokenDistribution(vocab, tuple(float(w) for w in weights / total))


def js_distance(p: TokenDistribution, q: TokenDistribution) -> float:
    """Square root of the Jensen-Shannon divergence, natural log.

    Symmetric, zero for identical inputs, at most sqrt(ln 2) for disjoint
    supports.
    """
    if p.vocab.tokens != q.vocab.tokens:
        raise VocabMismatch("distributions use different vocabularies")
    if p.empty or q.empty:
        raise EmptyDistribution("cannot compare an EMPTY distribution")
    a = np.asarray(p.probabilities)
    b = np.asarray(q.probabilities)
    m = 0.5 * (a + b)
    with np.errstate(divide="ignore", invalid="ignore"):
        kl_a = np.where(a > 0, a * np.log(a / m), 0.0)
        kl_b = np.where(b > 0, b * np.log(b / m), 0.0)
    divergence = 0.5 * kl_a.sum() + 0.5 * kl_b.sum()
    return math.sqrt(max(float(divergence), 0.0))


JS_MAX = math.sqrt(math.log(2.0))


# --- perturbation generators -------------------------------------------------

DEFAULT_PARAPHRASES = (
    "This event concerns [Z].",
    "This event is about [Z].",
)

DEFAULT_PLACEHOLDERS = {
    "ORG": "organizations",
    "LOC": "locations",
    "PER": "people",
    "MISC": "entities",
}

PERTURBATION_KINDS = ("paraphrase", "stopword_removal", "entity_removal", "duplication")


@dataclass(frozen=True)
class EntitySpan:
    start: int
    end: int
    label: str


class NamedEntityRecognizer(Protocol):
    def __call__(self, text: str) -> list[EntitySpan]: ...


class RuleBasedNER:
    """Offline fallback: capitalized spans away from sentence starts.

    A sentence-initial capitalized word only joins a span when the next word
    is capitalized too, so ordinary sentence case is left alone.
    """

    _word = re.compile(r"[A-Za-z][\w']*")

    def __call__(self, text: str) -> list[EntitySpan]:
        matches = list(self._word.finditer(text))

        def starts_sentence(i: int) -> bool:
            if i == 0:
                return True
            gap = text[matches[i - 1].end() : matches[i].start()]
            return any(c in ".!?;" for c in gap)

        spans: list[EntitySpan] = []
        i = 0
        while i < len(matches):
            if not matches[i].group()[0].isupper():
                i += 1
                continue
            j = i
            while j + 1 < len(matches) and matches[j + 1].group()[0].isupper() \
                    and text[matches[j].end() : matches[j + 1].start()] == " ":
                j += 1
            if starts_sentence(i) and j == i:
                i += 1  # lone capitalized sentence opener is ordinary casing
                continue
            spans.append(EntitySpan(matches[i].start(), matches[j].end(), "MISC"))
            i = j + 1
        return spans


class DictionaryNER:
    """Matches a known inventory of names; used with the synthetic corpus."""

    def __init__(self, inventory: dict[str, list[str]]):
        parts = []
        self._labels = {}
        for label, names in inventory.items():
            for name in sorted(names, key=len, reverse=True):
                self._labels[name] = label
                parts.append(re.escape(name))
        self._pattern = re.compile(r"\b(?:" + "|".join(parts) + r")\b") if parts else None

    def __call__(self, text: str) -> list[EntitySpan]:
        if self._pattern is None:
            return []
        return [
            EntitySpan(m.start(), m.end(), self._labels[m.group()])
            for m in self._pattern.finditer(text)
        ]


@dataclass(frozen=True)
class PerturbationSpec:
    """One perturbation; intensity 2 exists only where repetition is meaningful."""

    kind: str
    intensity: int = 1
    paraphrases: tuple[str, ...] = DEFAULT_PARAPHRASES
    stopwords: frozenset[str] | None = None
    placeholder_map: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_PLACEHOLDERS))
    ner: NamedEntityRecognizer | None = None
    duplicate_word: str = "event"

    def __post_init__(self):
        if self.kind not in PERTURBATION_KINDS:
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.intensity not in (1, 2):
            raise ValueError("intensity must be 1 or 2")
        if self.intensity == 2 and self.kind in ("stopword_removal", "entity_removal"):
            raise ValueError(f"{self.kind} does not support intensity 2")
        if self.kind == "paraphrase" and self.intensity > len(self.paraphrases):
            raise ValueError("not enough paraphrases for requested intensity")

    def label(self) -> str:
        return f"{self.kind}x{self.intensity}"


def _remove_stopwords(text: str, stopwords: frozenset[str]) -> str:
    kept = [w for w in text.split() if w.lower().strip(".,;:!?") not in stopwords]
    return " ".join(kept)


def _remove_entities(text: str, ner: NamedEntityRecognizer,
                     placeholders: dict[str, str]) -> tuple[str, int]:
    spans = sorted(ner(text), key=lambda s: s.start)
    out, cursor, replaced = [], 0, 0
    for span in spans:
        if span.start < cursor:
            continue
        out.append(text[cursor : span.start])
        out.append(placeholders.get(span.label, placeholders.get("MISC", "entities")))
        cursor = span.end
        replaced += 1
    out.append(text[cursor:])
    return "".join(out), replaced


def _duplicate_word(text: str, word: str, extra: int) -> str:
    replacement = " ".join([word] * (extra + 1))
    return re.sub(rf"\b{re.escape(word)}\b", replacement, text, count=1)


def load_perturbation_specs(
    path: str | Path, ner: NamedEntityRecognizer | None = None
) -> list[PerturbationSpec | None]:
    """Read a perturbation plan from a JSON config file.

    Document shape: {"paraphrases": [...], "duplicate_word": "...",
    "placeholders": {...}, "stopwords_file": "...", "specs": [{"kind": ...,
    "intensity": ...}, ...]}; a spec of kind "identity" is the control. The
    NER implementation is not serializable and is supplied by the caller.
    """
    with open(path, encoding="utf-8") as f:
        document = json.load(f)
    shared = {}
    if "paraphrases" in document:
        shared["paraphrases"] = tuple(document["paraphrases"])
    if "duplicate_word" in document:
        shared["duplicate_word"] = document["duplicate_word"]
    if "placeholders" in document:
        shared["placeholder_map"] = dict(document["placeholders"])
    if "stopwords_file" in document:
        shared["stopwords"] = load_stopwords(document["stopwords_file"])
    specs: list[PerturbationSpec | None] = []
    for entry in document["specs"]:
        if entry["kind"] == "identity":
            specs.append(None)
            continue
        spec = PerturbationSpec(
            kind=entry["kind"], intensity=int(entry.get("intensity", 1)),
            ner=ner, **shared,
        )
        specs.append(spec)
    return specs


def perturb(
    event: EventDescription,
    template: Template,
    spec: PerturbationSpec | None,
) -> tuple[EventDescription, Template]:
    """Apply one perturbation; None is the identity control."""
    if spec is None:
        return event, template
    if spec.kind == "paraphrase":
        return event, Template(template.id, spec.paraphrases[spec.intensity - 1])
    if spec.kind == "stopword_removal":
        stopwords = spec.stopwords if spec.stopwords is not None else load_stopwords()
        return EventDescription(_remove_stopwords(event.text, stopwords), event.id), template
    if spec.kind == "entity_removal":
        ner = spec.ner if spec.ner is not None else RuleBasedNER()
        text, replaced = _remove_entities(event.text, ner, spec.placeholder_map)
        if replaced == 0:
            warnings.warn(f"no entities found in event {event.id or event.text!r}")
            return event, template
        return EventDescription(text, event.id), template
    return event, Template(
        template.id, _duplicate_word(template.text, spec.duplicate_word, spec.intensity)
    )


# --- the report ---------------------------------------------------------------


@dataclass
class PerturbationResult:
    kind: str
    intensity: int
    mean_distance: dict[str, float]
    n_used: dict[str, int]
    n_skipped: dict[str, int]


@dataclass
class RobustnessReport:
    template_id: str
    vocab_size: int
    n_events: int
    results: list[PerturbationResult]

    def to_dict(self) -> dict:
        return {
            "template_id": self.template_id,
            "vocab_size": self.vocab_size,
            "n_events": self.n_events,
            "results": [
                {
                    "kind": r.kind,
                    "intensity": r.intensity,
                    "mean_distance": r.mean_distance,
                    "n_used": r.n_used,
                    "n_skipped": r.n_skipped,
                }
                for r in self.results
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        label_width = max(len(f"{r.kind} x{r.intensity}") for r in self.results)
        lines = [
            f"mean Jensen-Shannon distance over {self.n_events} events "
            f"(vocab {self.vocab_size})",
            f"{'perturbation':<{label_width}}  {'pr':>8}  {'prent':>8}",
        ]
        for r in self.results:
            lines.append(
                f"{f'{r.kind} x{r.intensity}':<{label_width}}  "
                f"{r.mean_distance['pr']:>8.4f}  {r.mean_distance['prent']:>8.4f}"
            )
        return "\n".join(lines)


def robustness_report(
    events: list[EventDescription],
    template: Template,
    specs: list[PerturbationSpec | None],
    config: PipelineConfig,
    backends: BackendSuite,
    vocab_size: int = 100,
    vocab: FixedVocab | None = None,
) -> RobustnessReport:
    """Mean per-mode distance between unperturbed and perturbed distributions.

    Events whose pair includes an EMPTY distribution are skipped and counted.
    """
    if vocab is None:
        vocab = build_fixed_vocab(events, template, vocab_size, config, backends)

    base: dict[str, list[TokenDistribution]] = {
        mode: [token_distribution(e, template, vocab, mode, config, backends) for e in events]
        for mode in MODES
    }
    results = []
    for spec in specs:
        distances = {mode: [] for mode in MODES}
        skipped = {mode: 0 for mode in MODES}
        for i, event in enumerate(events):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                p_event, p_template = perturb(event, template, spec)
            for mode in MODES:
                perturbed = token_distribution(
                    p_event, p_template, vocab, mode, config, backends
                )
                if base[mode][i].empty or perturbed.empty:
                    skipped[mode] += 1
                    continue
                distances[mode].append(js_distance(base[mode][i], perturbed))
        results.append(
            PerturbationResult(
                kind=spec.kind if spec else "identity",
                intensity=spec.intensity if spec else 1,
                mean_distance={
                    mode: (sum(d) / len(d) if d else float("nan"))
                    for mode, d in distances.items()
                },
                n_used={mode: len(d) for mode, d in distances.items()},
                n_skipped=skipped,
            )
        )
    return RobustnessReport(template.id, len(vocab.tokens), len(events), results)
