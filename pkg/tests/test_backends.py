import json
import random

import pytest

from prent.backends import (
    BackendConfig,
    MaskFillResult,
    SpanAnswer,
    TableEntailmentBackend,
    TableFillBackend,
    TableQABackend,
)
from prent.errors import MissingMask, MockLookupMiss, NoAnswer

from conftest import random_mock_case


class TestTypes:
    def test_probability_range(self):
        with pytest.raises(ValueError):
            MaskFillResult("token", 1.5)
        with pytest.raises(ValueError):
            MaskFillResult("token", -0.1)

    def test_token_shape(self):
        with pytest.raises(ValueError):
            MaskFillResult("", 0.5)
        with pytest.raises(ValueError):
            MaskFillResult("two words", 0.5)

    def test_span_round_trip(self):
        context = "Arrests: police captured a senior commander."
        span = SpanAnswer("police", 9, 15, 0.4)
        span.verify(context)
        with pytest.raises(ValueError):
            SpanAnswer("police", 9, 14, 0.4).verify(context)
        with pytest.raises(ValueError):
            SpanAnswer("police", 40, 46, 0.4).verify(context)

    def test_backend_config_requires_ids(self):
        with pytest.raises(ValueError):
            BackendConfig(fill_model_id="")


class TestTableFill:
    def test_lookup_passthrough(self):
        backend = TableFillBackend({"X [Z]": [("a", 0.6), ("b", 0.3)]})
        fills = backend.fill_mask("X [Z]", 2)
        assert [(f.token, f.probability) for f in fills] == [("a", 0.6), ("b", 0.3)]

    def test_top1_is_argmax(self):
        backend = TableFillBackend({"X [Z]": [("a", 0.6), ("b", 0.3)]})
        assert [f.token for f in backend.fill_mask("X [Z]", 1)] == ["a"]

    def test_missing_mask(self):
        backend = TableFillBackend({"X [Z]": [("a", 0.6)]})
        with pytest.raises(MissingMask):
            backend.fill_mask("no slot here", 5)
        with pytest.raises(MissingMask):
            backend.fill_mask("[Z] and [Z]", 5)

    def test_miss_raises(self):
        backend = TableFillBackend({"X [Z]": [("a", 0.6)]})
        with pytest.raises(MockLookupMiss):
            backend.fill_mask("Y [Z]", 5)

    def test_fixture_must_be_sorted(self):
        with pytest.raises(ValueError):
            TableFillBackend({"X [Z]": [("a", 0.3), ("b", 0.6)]})
        with pytest.raises(ValueError):
            TableFillBackend({"X [Z]": [("a", 0.3), ("a", 0.3)]})

    def test_allowed_tokens_restrict(self):
        backend = TableFillBackend({"X [Z]": [("a", 0.6), ("b", 0.3), ("c", 0.05)]})
        fills = backend.fill_mask("X [Z]", 5, allowed_tokens=frozenset({"b", "c"}))
        assert [f.token for f in fills] == ["b", "c"]

    def test_k_beyond_support_returns_all(self):
        backend = TableFillBackend({"X [Z]": [("a", 0.6), ("b", 0.3)]})
        assert len(backend.fill_mask("X [Z]", 50)) == 2

    def test_from_file(self, tmp_path):
        path = tmp_path / "fill.json"
        path.write_text(json.dumps({"X [Z]": [["a", 0.6]]}))
        backend = TableFillBackend.from_file(path)
        assert backend.fill_mask("X [Z]", 1)[0].token == "a"

    def test_batch_preserves_order(self):
        backend = TableFillBackend(
            {"X [Z]": [("a", 0.6)], "Y [Z]": [("b", 0.5)]}
        )
        out = backend.fill_mask_batch(["Y [Z]", "X [Z]"], 1)
        assert [fills[0].token for fills in out] == ["b", "a"]


class TestTableEntailment:
    def test_lookup_passthrough(self):
        backend = TableEntailmentBackend({"P": {"H": 0.9}})
        assert backend.entailment_probability("P", "H").entail_probability == 0.9

    def test_miss_raises(self):
        backend = TableEntailmentBackend({"P": {"H": 0.9}})
        with pytest.raises(MockLookupMiss):
            backend.entailment_probability("P", "other")
        with pytest.raises(MockLookupMiss):
            backend.entailment_probability("other", "H")

    def test_deterministic(self):
        backend = TableEntailmentBackend({"P": {"H": 0.325}})
        first = backend.entailment_probability("P", "H")
        second = backend.entailment_probability("P", "H")
        assert first.entail_probability == second.entail_probability


class TestTableQA:
    def test_verbatim_span(self):
        backend = TableQABackend({"Who?": {"answer": "police", "confidence": 0.7}})
        answer = backend.extractive_answer("Who?", "the police came")
        assert (answer.text, answer.start, answer.end, answer.confidence) == (
            "police", 4, 10, 0.7,
        )

    def test_abstention(self):
        backend = TableQABackend({"Who flew?": {"answer": None, "confidence": 0.0}})
        with pytest.raises(NoAnswer):
            backend.extractive_answer("Who flew?", "nothing relevant here")

    def test_confidence_floor(self):
        backend = TableQABackend(
            {"Who?": {"answer": "police", "confidence": 0.3}}, confidence_floor=0.5
        )
        with pytest.raises(NoAnswer):
            backend.extractive_answer("Who?", "the police came")

    def test_answer_absent_from_context(self):
        backend = TableQABackend({"Who?": {"answer": "police", "confidence": 0.7}})
        with pytest.raises(MockLookupMiss):
            backend.extractive_answer("Who?", "soldiers only")


class TestSimulated:
    def test_sorted_distinct_and_prefix(self, simulated):
        prompt = "Gunmen killed two villagers in Melan. People were [Z]."
        for k1, k2 in [(1, 5), (5, 30), (10, 60)]:
            small = simulated.fill.fill_mask(prompt, k1)
            large = simulated.fill.fill_mask(prompt, k2)
            probs = [f.probability for f in large]
            assert probs == sorted(probs, reverse=True)
            assert len({f.token for f in large}) == len(large)
            assert [f.token for f in small] == [f.token for f in large[: len(small)]]

    def test_deterministic(self, simulated):
        prompt = "Residents protested in Goru. This event involves [Z]."
        a = simulated.fill.fill_mask(prompt, 30)
        b = simulated.fill.fill_mask(prompt, 30)
        assert a == b
        pair = ("Residents protested in Goru.", "This event involves protest.")
        assert (
            simulated.nli.entailment_probability(*pair).entail_probability
            == simulated.nli.entailment_probability(*pair).entail_probability
        )

    def test_cue_signals_rank_high(self, simulated):
        fills = simulated.fill.fill_mask(
            "Police arrested three activists in Korda. People were [Z].", 5
        )
        assert "arrested" in [f.token for f in fills]

    def test_entailment_separates_signals(self, simulated):
        premise = "Police arrested three activists in Korda."
        entailed = simulated.nli.entailment_probability(premise, "People were arrested.")
        unrelated = simulated.nli.entailment_probability(premise, "People were killed.")
        assert entailed.entail_probability >= 0.5 > unrelated.entail_probability

    def test_simulated_qa_passive_and_agent(self, simulated):
        context = "Two men were kidnapped by rebels."
        whom = simulated.qa.extractive_answer("Who was kidnapped?", context)
        who = simulated.qa.extractive_answer("Who kidnapped people?", context)
        assert whom.text == "Two men"
        assert who.text == "rebels"
        for span in (whom, who):
            assert context[span.start : span.end] == span.text

    def test_simulated_qa_abstains(self, simulated):
        with pytest.raises(NoAnswer):
            simulated.qa.extractive_answer("Who flew?", "Nothing about people here.")


def test_concurrent_calls_are_consistent(simulated):
    from concurrent.futures import ThreadPoolExecutor

    prompt = "Gunmen killed two villagers in Melan. People were [Z]."
    expected = simulated.fill.fill_mask(prompt, 20)
    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(lambda _: simulated.fill.fill_mask(prompt, 20),
                                range(64)))
    assert all(r == expected for r in results)


def test_hf_backend_unavailable_raises_cleanly(monkeypatch):
    pytest.importorskip("transformers")
    monkeypatch.setenv("HF_HUB_OFFLINE", "1")
    monkeypatch.delenv("HF_HOME", raising=False)
    from prent.backends.hf import HFFillBackend
    from prent.errors import BackendUnavailable

    with pytest.raises(BackendUnavailable):
        HFFillBackend(BackendConfig(fill_model_id="distilbert-base-uncased"))


def test_random_tables_sorted_and_distinct():
    rng = random.Random(20240607)
    for _ in range(50):
        event, template, suite, n = random_mock_case(rng)
        from prent.pipeline import render_prompt

        fills = suite.fill.fill_mask(render_prompt(event, template), n)
        probs = [f.probability for f in fills]
        assert probs == sorted(probs, reverse=True)
        assert len({f.token for f in fills}) == len(fills)
