"""Exact-match table backends for byte-stable offline tests.

Each backend wraps a lookup table loaded from a JSON fixture file (or passed
in directly) and raises :class:`MockLookupMiss` on any input it has no entry
for. Fixture formats:

* fill: ``{"<text with [Z]>": [["token", prob], ...]}`` ranked by probability
* nli:  ``{"<premise>": {"<hypothesis>": prob, ...}}``
* qa:   ``{"<question>": {"answer": "span text" | null, "confidence": p}}``
  (the span is located verbatim in whatever context is supplied)
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import MockLookupMiss, NoAnswer
from .base import (
    EntailmentBackend,
    EntailmentScore,
    MaskFillBackend,
    MaskFillResult,
    QABackend,
    SpanAnswer,
    require_single_mask,
)


class TableFillBackend(MaskFillBackend):
    def __init__(self, table: dict[str, list[tuple[str, float]]]):
        self._table = {}
        for text, ranked in table.items():
            fills = [MaskFillResult(token, float(p)) for token, p in ranked]
            probs = [f.probability for f in fills]
            if probs != sorted(probs, reverse=True):
                raise ValueError(f"fixture candidates not sorted for {text!r}")
            if len({f.token for f in fills}) != len(fills):
                raise ValueError(f"duplicate fixture tokens for {text!r}")
            self._table[text] = fills

    @classmethod
    def from_file(cls, path: str | Path) -> "TableFillBackend":
        with open(path, encoding="utf-8") as f:
            return cls(json.load(f))

    def fill_mask(self, text_with_slot, k, allowed_tokens=None):
        require_single_mask(text_with_slot)
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if text_with_slot not in self._table:
            raise MockLookupMiss(f"no fill fixture for {text_with_slot!r}")
        fills = self._table[text_with_slot]
        if allowed_tokens is not None:
            fills = [f for f in fills if f.token in allowed_tokens]
        return fills[:k]


class TableEntailmentBackend(EntailmentBackend):
    def __init__(self, table: dict[str, dict[str, float]]):
        self._table = {p: dict(hs) for p, hs in table.items()}

    @classmethod
    def from_file(cls, path: str | Path) -> "TableEntailmentBackend":
        with open(path, encoding="utf-8") as f:
            return cls(json.load(f))

    def entailment_probability(self, premise, hypothesis):
        try:
            return EntailmentScore(float(self._table[premise][hypothesis]))
        except KeyError:
            raise MockLookupMiss(
                f"no entailment fixture for premise={premise!r} hypothesis={hypothesis!r}"
            ) from None


class TableQABackend(QABackend):
    def __init__(self, table: dict[str, dict], confidence_floor: float = 0.0):
        self._table = dict(table)
        self.confidence_floor = confidence_floor

    @classmethod
    def from_file(cls, path: str | Path, confidence_floor: float = 0.0) -> "TableQABackend":
        with open(path, encoding="utf-8") as f:
            return cls(json.load(f), confidence_floor)

    def extractive_answer(self, question, context):
        if not question or not context:
            raise ValueError("question and context must be non-empty")
        if question not in self._table:
            raise MockLookupMiss(f"no QA fixture for {question!r}")
        entry = self._table[question]
        answer, confidence = entry["answer"], float(entry["confidence"])
        if answer is None or confidence < self.confidence_floor:
            raise NoAnswer(f"fixture abstains for {question!r}")
        start = context.find(answer)
        if start < 0:
            raise MockLookupMiss(
                f"fixture answer {answer!r} does not occur in the supplied context"
            )
        span = SpanAnswer(answer, start, start + len(answer), confidence)
        span.verify(context)
        return span
