"""Checkpoint-backed backends built on transformers.

Imports of torch/transformers happen at construction time so the rest of the
toolkit works without the ``models`` extra installed. All inference runs under
a lock: the backends are immutable after load and callable from any thread.
"""

from __future__ import annotations

import threading

from ..errors import BackendUnavailable, InputTooLong, NoAnswer
from .base import (
    MASK,
    BackendConfig,
    EntailmentBackend,
    EntailmentScore,
    MaskFillBackend,
    MaskFillResult,
    QABackend,
    SpanAnswer,
    require_single_mask,
)


def _load_transformers():
    try:
        import torch
        import transformers
    except ImportError as exc:
        raise BackendUnavailable(
            "transformers/torch not installed; install the 'models' extra"
        ) from exc
    return torch, transformers


class HFFillBackend(MaskFillBackend):
    def __init__(self, config: BackendConfig = BackendConfig()):
        self._torch, transformers = _load_transformers()
        self.config = config
        try:
            self._tokenizer = transformers.AutoTokenizer.from_pretrained(config.fill_model_id)
            self._model = transformers.AutoModelForMaskedLM.from_pretrained(config.fill_model_id)
        except Exception as exc:
            raise BackendUnavailable(f"cannot load {config.fill_model_id!r}: {exc}") from exc
        self._model.to(config.device).eval()
        # keep the template (right end, holds the slot) when inputs overflow
        self._tokenizer.truncation_side = "left"
        self._lock = threading.Lock()

    def _encode(self, text_with_slot: str):
        require_single_mask(text_with_slot)
        text = text_with_slot.replace(MASK, self._tokenizer.mask_token)
        enc = self._tokenizer(
            text,
            return_tensors="pt",
            truncation=True,
            max_length=min(self.config.max_length, self._tokenizer.model_max_length),
        )
        mask_positions = (enc["input_ids"][0] == self._tokenizer.mask_token_id).nonzero()
        if len(mask_positions) != 1:
            raise InputTooLong("mask slot lost after truncation")
        return enc, int(mask_positions[0])

    def _single_token_ids(self, tokens: frozenset[str]) -> dict[str, int]:
        ids = {}
        for token in tokens:
            pieces = self._tokenizer(token, add_special_tokens=False)["input_ids"]
            if len(pieces) == 1:
                ids[token] = pieces[0]
        return ids

    def fill_mask(self, text_with_slot, k, allowed_tokens=None):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        enc, mask_pos = self._encode(text_with_slot)
        with self._lock, self._torch.no_grad():
            logits = self._model(**{n: t.to(self.config.device) for n, t in enc.items()}).logits
        probs = logits[0, mask_pos].softmax(dim=-1)

        if allowed_tokens is not None:
            token_ids = self._single_token_ids(allowed_tokens)
            scored = [(tok, float(probs[i])) for tok, i in token_ids.items()]
            scored.sort(key=lambda tp: (-tp[1], tp[0]))
            return [MaskFillResult(t, p) for t, p in scored[:k]]

        results = []
        special = set(self._tokenizer.all_special_ids)
        # over-fetch, then drop subword pieces and specials
        top = probs.topk(min(4 * k + 20, probs.shape[-1]))
        for p, idx in zip(top.values.tolist(), top.indices.tolist()):
            if idx in special:
                continue
            token = self._tokenizer.convert_ids_to_tokens(idx)
            if token.startswith("##") or not token.strip() or any(c.isspace() for c in token):
                continue
            results.append(MaskFillResult(token, p))
            if len(results) == k:
                break
        return results


class HFEntailmentBackend(EntailmentBackend):
    def __init__(self, config: BackendConfig = BackendConfig()):
        self._torch, transformers = _load_transformers()
        self.config = config
        try:
            self._tokenizer = transformers.AutoTokenizer.from_pretrained(config.nli_model_id)
            self._model = transformers.AutoModelForSequenceClassification.from_pretrained(
                config.nli_model_id
            )
        except Exception as exc:
            raise BackendUnavailable(f"cannot load {config.nli_model_id!r}: {exc}") from exc
        self._model.to(config.device).eval()
        self._tokenizer.truncation_side = "left"
        label2id = {name.lower(): i for name, i in self._model.config.label2id.items()}
        entail = [i for name, i in label2id.items() if "entail" in name]
        if len(entail) != 1:
            raise BackendUnavailable(f"no entailment label in {config.nli_model_id!r}")
        self._entail_index = entail[0]
        self._lock = threading.Lock()

    def entailment_probability(self, premise, hypothesis):
        return self.entailment_probability_batch([(premise, hypothesis)])[0]

    def entailment_probability_batch(self, pairs):
        for premise, hypothesis in pairs:
            if not premise or not hypothesis:
                raise ValueError("premise and hypothesis must be non-empty")
        if not pairs:
            return []
        enc = self._tokenizer(
            [p for p, _ in pairs],
            [h for _, h in pairs],
            return_tensors="pt",
            padding=True,
            truncation="only_first",
            max_length=min(self.config.max_length, self._tokenizer.model_max_length),
        )
        with self._lock, self._torch.no_grad():
            logits = self._model(**{n: t.to(self.config.device) for n, t in enc.items()}).logits
        probs = logits.softmax(dim=-1)[:, self._entail_index]
        return [EntailmentScore(float(p)) for p in probs]


class HFQABackend(QABackend):
    def __init__(self, config: BackendConfig = BackendConfig(), confidence_floor: float = 0.0):
        _, transformers = _load_transformers()
        self.config = config
        self.confidence_floor = confidence_floor
        try:
            self._pipe = transformers.pipeline(
                "question-answering",
                model=config.qa_model_id,
                device=-1 if config.device == "cpu" else config.device,
            )
        except Exception as exc:
            raise BackendUnavailable(f"cannot load {config.qa_model_id!r}: {exc}") from exc
        self._lock = threading.Lock()

    def extractive_answer(self, question, context):
        if not question or not context:
            raise ValueError("question and context must be non-empty")
        with self._lock:
            out = self._pipe(question=question, context=context, handle_impossible_answer=True)
        if not out["answer"] or out["score"] < self.confidence_floor:
            raise NoAnswer(f"model abstained for {question!r}")
        answer = SpanAnswer(out["answer"], out["start"], out["end"], float(out["score"]))
        answer.verify(context)
        return answer
