"""Deterministic corpus-simulation backends for offline runs.

These backends imitate the qualitative behaviour of the real checkpoints on
the bundled synthetic corpus without any model download:

* the mask filler emits "signal" tokens cued by content words of the event
  description, mixed with pseudo-random noise tokens seeded by the exact
  input string (so surface perturbations reshuffle the noise);
* the entailment scorer keys only on content cues and the candidate token,
  so it is stable under surface perturbations;
* the span extractor applies a shallow subject/object heuristic around the
  action word.

Everything is seeded with sha256 of the inputs: identical inputs always give
identical outputs on any platform.
"""

from __future__ import annotations

import hashlib
import re

from ..errors import NoAnswer
from .base import (
    MASK,
    EntailmentBackend,
    EntailmentScore,
    MaskFillBackend,
    MaskFillResult,
    QABackend,
    SpanAnswer,
    require_single_mask,
)

# description cue -> weighted fill signals, per template mode.
# "verb" serves slots preceded by "were"/"was", "noun" serves one-word-summary
# slots ("involves"/"concerns"/"about").
CUE_SIGNALS: dict[str, dict[str, list[tuple[str, float]]]] = {
    "killed": {"verb": [("killed", 3.0), ("shot", 1.0)], "noun": [("killing", 3.0), ("violence", 1.2)]},
    "killing": {"verb": [("killed", 2.5)], "noun": [("killing", 3.0), ("violence", 1.0)]},
    "dead": {"verb": [("killed", 2.5)], "noun": [("killing", 2.0), ("violence", 1.0)]},
    "executed": {"verb": [("executed", 3.0), ("killed", 2.0)], "noun": [("killing", 2.5)]},
    "murdered": {"verb": [("murdered", 3.0), ("killed", 2.2)], "noun": [("murder", 3.0), ("killing", 2.0)]},
    "shot": {"verb": [("shot", 3.0), ("wounded", 1.2), ("killed", 1.0)], "noun": [("shooting", 3.0), ("violence", 1.0)]},
    "injured": {"verb": [("injured", 3.0), ("wounded", 2.0), ("hurt", 1.5)], "noun": [("violence", 1.5)]},
    "wounded": {"verb": [("wounded", 3.0), ("injured", 2.0), ("hurt", 1.2)], "noun": [("violence", 1.5)]},
    "hurt": {"verb": [("hurt", 3.0), ("injured", 1.8)], "noun": [("violence", 1.2)]},
    "kidnapped": {"verb": [("kidnapped", 3.0), ("abducted", 2.0)], "noun": [("kidnapping", 3.0), ("abduction", 1.8)]},
    "abducted": {"verb": [("abducted", 3.0), ("kidnapped", 2.0)], "noun": [("kidnapping", 2.5), ("abduction", 2.0)]},
    "hostage": {"verb": [("kidnapped", 1.6), ("held", 1.2)], "noun": [("kidnapping", 2.0)]},
    "arrested": {"verb": [("arrested", 3.0), ("detained", 1.8)], "noun": [("arrests", 2.5)]},
    "detained": {"verb": [("detained", 3.0), ("arrested", 2.0)], "noun": [("arrests", 2.0)]},
    "captured": {"verb": [("captured", 3.0), ("arrested", 1.6)], "noun": [("arrests", 1.5)]},
    "looted": {"verb": [("robbed", 2.0)], "noun": [("looting", 3.0), ("theft", 2.0), ("robbery", 1.5)]},
    "stole": {"verb": [("robbed", 1.8)], "noun": [("theft", 3.0), ("robbery", 2.0), ("looting", 1.5)]},
    "stolen": {"verb": [("robbed", 1.8)], "noun": [("theft", 3.0), ("robbery", 1.8), ("looting", 1.5)]},
    "robbed": {"verb": [("robbed", 3.0)], "noun": [("robbery", 3.0), ("theft", 2.0), ("looting", 1.2)]},
    "seized": {"verb": [("robbed", 1.2)], "noun": [("looting", 2.2), ("theft", 1.8)]},
    "raided": {"verb": [("robbed", 1.5)], "noun": [("looting", 2.5), ("robbery", 1.5)]},
    "protested": {"verb": [("protesting", 3.0)], "noun": [("protest", 3.0), ("demonstration", 2.0), ("protests", 1.8)]},
    "protest": {"verb": [("protesting", 2.5)], "noun": [("protest", 3.0), ("demonstration", 1.8), ("protests", 1.6)]},
    "marched": {"verb": [("protesting", 2.2), ("marching", 2.0)], "noun": [("demonstration", 2.5), ("protest", 2.0)]},
    "demonstrated": {"verb": [("protesting", 2.4)], "noun": [("demonstration", 3.0), ("protest", 2.2)]},
    "demonstrators": {"verb": [("protesting", 1.6)], "noun": [("demonstration", 2.0), ("protest", 1.8)]},
    "rallied": {"verb": [("protesting", 2.0)], "noun": [("protest", 2.2), ("demonstration", 2.0)]},
    "clashed": {"verb": [("attacked", 2.0), ("injured", 1.0)], "noun": [("clashes", 3.0), ("fighting", 2.2), ("violence", 1.5)]},
    "fighting": {"verb": [("attacked", 1.8)], "noun": [("fighting", 3.0), ("clashes", 2.5), ("violence", 1.5)]},
    "attacked": {"verb": [("attacked", 3.0), ("injured", 1.2)], "noun": [("violence", 2.2), ("fighting", 1.8)]},
    "ambushed": {"verb": [("ambushed", 3.0), ("attacked", 2.0)], "noun": [("fighting", 2.0), ("violence", 1.8)]},
    "battle": {"verb": [("attacked", 1.5)], "noun": [("fighting", 2.6), ("clashes", 2.4)]},
    "burned": {"verb": [("burned", 3.0)], "noun": [("arson", 3.0), ("destruction", 2.0)]},
    "torched": {"verb": [("burned", 2.6)], "noun": [("arson", 3.0), ("destruction", 1.8)]},
    "destroyed": {"verb": [("burned", 1.2)], "noun": [("destruction", 3.0), ("arson", 1.2)]},
    "abused": {"verb": [("abused", 3.0)], "noun": [("abuse", 3.0)]},
    "raped": {"verb": [("raped", 3.0), ("abused", 2.0)], "noun": [("rape", 3.0), ("abuse", 1.8)]},
}

# filler tokens for the pseudo-random part of the fill distribution
NOISE_POOL: tuple[str, ...] = tuple(
    dict.fromkeys(
        """
    people soldiers police officers residents students workers farmers traders
    children women men leaders officials militants rebels bandits gunmen youths
    crowds villagers citizens drivers guards neighbors families herders elders
    reporters teachers nurses doctors pilots sailors miners vendors clerics
    town city village market road bridge school hospital church mosque station
    camp border farm river forest street district region capital port airport
    office building house shop bank well field hill valley island lake garden
    monday tuesday wednesday thursday friday saturday sunday morning evening
    night afternoon week month year today yesterday season harvest rainfall
    fireworks bicycles motorcycles cycling concerts sports football training
    elections voting speeches meetings talks negotiations agreements treaties
    ceremonies festivals celebrations weddings funerals prayers markets trade
    travel tourism farming fishing mining construction repairs cleaning
    weather flooding drought storms earthquakes disease medicine vaccines food
    water fuel electricity supplies aid donations taxes prices wages salaries
    killed arrested injured protest violence detained hospitalized evacuated
    homeless displaced rescued released questioned searched warned threatened
    jobs unemployment strikes boycotts curfews checkpoints patrols convoys
    vehicles trucks buses trains boats planes helicopters weapons rifles
    grenades bombs explosives landmines ammunition uniforms flags banners
    posters leaflets radios phones cameras computers documents passports
    licenses permits contracts letters reports books newspapers broadcasts
    rumors warnings threats promises apologies denials confessions testimony
    evidence trials verdicts sentences appeals pardons amnesty reforms laws
    policies budgets debts loans investments profits losses shortages surplus
    borders customs imports exports smuggling piracy ransom bribery corruption
    fraud forgery vandalism trespassing espionage sabotage treason mutiny
    desertion recruitment conscription mobilization ceasefire withdrawal
    surrender liberation occupation annexation secession independence unity
    """.split()
    )
)

_WORD = re.compile(r"[A-Za-z']+")


def _hash_unit(*parts: str) -> float:
    """Deterministic pseudo-uniform value in [0, 1) from string parts."""
    digest = hashlib.sha256("\x1f".join(parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def _hash_stream(*parts: str):
    """Infinite deterministic stream of [0, 1) values."""
    counter = 0
    while True:
        yield _hash_unit(*parts, str(counter))
        counter += 1


def _words(text: str) -> list[str]:
    return _WORD.findall(text.lower())


def _slot_mode(text: str, slot_index: int) -> str:
    """Template mode from the words immediately before the slot."""
    before = _words(text[:slot_index])
    if before and before[-1] in ("were", "was"):
        return "verb"
    return "noun"


def _cues(text: str) -> list[str]:
    seen, ordered = set(), []
    for word in _words(text):
        if word in CUE_SIGNALS and word not in seen:
            seen.add(word)
            ordered.append(word)
    return ordered


def _signal_weights(cues: list[str], mode: str) -> dict[str, float]:
    weights: dict[str, float] = {}
    for cue in cues:
        for token, w in CUE_SIGNALS[cue][mode]:
            weights[token] = weights.get(token, 0.0) + w
    if not weights:
        weights = {"affected": 1.0, "involved": 0.8} if mode == "verb" else {"incident": 1.0, "unrest": 0.8}
    return weights


def _adjacent_repeats(text: str) -> int:
    words = _words(text)
    return sum(1 for a, b in zip(words, words[1:]) if a == b)


class SimulatedFillBackend(MaskFillBackend):
    """Cue-driven fill distribution with surface-seeded noise.

    ``noise_weight`` is the share of probability mass spread over the noise
    tokens; each adjacent duplicated word in the input shifts a further
    ``duplication_shift`` of mass into freshly drawn noise.
    """

    def __init__(self, noise_weight: float = 0.45, noise_size: int = 40,
                 duplication_shift: float = 0.18):
        self.noise_weight = noise_weight
        self.noise_size = noise_size
        self.duplication_shift = duplication_shift

    def _distribution(self, text_with_slot: str) -> dict[str, float]:
        slot = text_with_slot.index(MASK)
        mode = _slot_mode(text_with_slot, slot)
        base = _signal_weights(_cues(text_with_slot), mode)
        base_total = sum(base.values())

        stream = _hash_stream("fill", text_with_slot)
        pool = list(NOISE_POOL)
        noise: dict[str, float] = {}
        for _ in range(self.noise_size):
            idx = int(next(stream) * len(pool))
            noise[pool.pop(idx)] = 0.05 + next(stream)
        # signal tokens also pick up surface-seeded jitter, so even entailed
        # candidates drift a little when the input is perturbed
        for token in base:
            jitter = 0.35 * _hash_unit("signal-noise", text_with_slot, token)
            noise[token] = noise.get(token, 0.0) + jitter
        noise_total = sum(noise.values())

        alpha = min(0.9, self.noise_weight + self.duplication_shift * _adjacent_repeats(text_with_slot))
        dist: dict[str, float] = {}
        for token, w in base.items():
            dist[token] = (1.0 - alpha) * w / base_total
        for token, w in noise.items():
            dist[token] = dist.get(token, 0.0) + alpha * w / noise_total
        return dist

    def fill_mask(self, text_with_slot, k, allowed_tokens=None):
        require_single_mask(text_with_slot)
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        dist = self._distribution(text_with_slot)
        if allowed_tokens is not None:
            dist = {t: p for t, p in dist.items() if t in allowed_tokens}
        ranked = sorted(dist.items(), key=lambda tp: (-tp[1], tp[0]))
        return [MaskFillResult(t, p) for t, p in ranked[:k]]


class SimulatedEntailmentBackend(EntailmentBackend):
    """Entailment keyed on content cues only, hence perturbation-stable.

    The candidate token is read as the last word of the hypothesis; it is
    entailed iff it is a fill signal of some cue present in the premise, in
    the mode the hypothesis phrasing selects.
    """

    def entailment_probability(self, premise, hypothesis):
        if not premise or not hypothesis:
            raise ValueError("premise and hypothesis must be non-empty")
        words = _words(hypothesis)
        if not words:
            return EntailmentScore(0.01)
        token = words[-1]
        mode = "verb" if len(words) >= 2 and words[-2] in ("were", "was") else "noun"
        signals = _signal_weights(_cues(premise), mode)
        jitter = _hash_unit("nli", " ".join(sorted(_cues(premise))), mode, token)
        if token in signals:
            return EntailmentScore(0.72 + 0.26 * jitter)
        return EntailmentScore(0.05 + 0.38 * jitter)


_SUBJECT_STOP = frozenset(["in", "at", "near", "on", "by", "from", "and", "when", "while", "after"])
_PHRASE = r"[A-Za-z'][\w']*(?: [A-Za-z'][\w']*){0,2}"


class SimulatedQABackend(QABackend):
    """Shallow who/whom extraction around the action word of the question."""

    def __init__(self, confidence_floor: float = 0.0):
        self.confidence_floor = confidence_floor

    def _phrase_before(self, context: str, pos: int) -> tuple[int, int] | None:
        aux = re.search(r"(?:was|were)\s*$", context[:pos])
        if aux:
            pos = aux.start()
        match = re.search(_PHRASE + r"$", context[:pos].rstrip())
        if match is None:
            return None
        start, end = match.span()
        words = context[start:end].split(" ")
        while words and words[0].lower() in _SUBJECT_STOP:
            start += len(words.pop(0)) + 1
        return (start, end) if words else None

    def _phrase_after(self, context: str, pos: int) -> tuple[int, int] | None:
        match = re.match(r"\s*(" + _PHRASE + ")", context[pos:])
        if match is None:
            return None
        start = pos + match.start(1)
        words = match.group(1).split(" ")
        kept = []
        for word in words:
            if word.lower() in _SUBJECT_STOP:
                break
            kept.append(word)
        if not kept:
            return None
        return start, start + len(" ".join(kept))

    def extractive_answer(self, question, context):
        if not question or not context:
            raise ValueError("question and context must be non-empty")
        q_words = _words(question)
        action = next((w for w in q_words if w in CUE_SIGNALS), None)
        if action is None and len(q_words) >= 3:
            action = q_words[2] if q_words[1] == "was" else q_words[1]
        match = re.search(rf"\b{re.escape(action)}\b", context, re.IGNORECASE) if action else None
        if match is None:
            raise NoAnswer(f"no anchor for {question!r} in context")

        # voice of the context clause decides where each role sits
        passive_context = re.search(r"(?:was|were)\s*$", context[: match.start()].rstrip()) is not None
        wants_target = "was" in q_words or "were" in q_words
        if wants_target:
            span = self._phrase_before(context, match.start()) if passive_context \
                else self._phrase_after(context, match.end())
        elif passive_context:
            by_match = re.search(r"\bby\s+", context[match.end() :])
            span = self._phrase_after(context, match.end() + by_match.end()) if by_match else None
        else:
            span = self._phrase_before(context, match.start())
        if span is None:
            raise NoAnswer(f"no extractable phrase for {question!r}")
        start, end = span
        confidence = 0.3 + 0.65 * _hash_unit("qa", question, context[start:end])
        if confidence < self.confidence_floor:
            raise NoAnswer(f"confidence {confidence:.2f} below floor")
        answer = SpanAnswer(context[start:end], start, end, confidence)
        answer.verify(context)
        return answer
