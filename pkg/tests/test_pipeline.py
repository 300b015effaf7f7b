import random

import pytest

from prent.errors import InvalidTemplates
from prent.pipeline import (
    EventDescription,
    PipelineConfig,
    Template,
    filter_entailed,
    pr_ent,
    prompt_candidates,
    render_prompt,
)

from conftest import random_config, random_mock_case

INJURED = EventDescription("Several demonstrators were injured.")
SPONSOR = EventDescription(
    "The sponsorship deal between the shoes brand and the soccer team was confirmed."
)
PEOPLE_WERE = Template("people_were", "People were [Z].")
INVOLVES = Template("involves", "This event involves [Z].")


class TestTypes:
    def test_event_requires_text(self):
        with pytest.raises(ValueError):
            EventDescription("   ")

    def test_template_requires_single_slot(self):
        with pytest.raises(ValueError):
            Template("t", "no slot.")
        with pytest.raises(ValueError):
            Template("t", "[Z] and [Z].")

    def test_template_requires_terminal_punctuation(self):
        with pytest.raises(ValueError):
            Template("t", "People were [Z]")

    def test_config_bounds(self):
        with pytest.raises(ValueError):
            PipelineConfig(top_k=0)
        with pytest.raises(ValueError):
            PipelineConfig(entail_threshold=1.5)
        with pytest.raises(ValueError):
            PipelineConfig(allowed_tokens=frozenset())

    def test_defaults(self):
        config = PipelineConfig()
        assert config.top_k == 30
        assert config.entail_threshold == 0.5


class TestRenderPrompt:
    def test_joined_with_single_space(self):
        assert (
            render_prompt(INJURED, PEOPLE_WERE)
            == "Several demonstrators were injured. People were [Z]."
        )

    def test_plain_concatenation(self):
        assert render_prompt(EventDescription("X."), INVOLVES) == "X. This event involves [Z]."

    def test_whitespace_normalized(self):
        assert (
            render_prompt(EventDescription("  X.   "), PEOPLE_WERE)
            == "X. People were [Z]."
        )


class TestWorkedExamples:
    """The shipped fixture tables mirror the three canonical rows."""

    def test_injury_candidates(self, worked_examples):
        result = prompt_candidates(INJURED, PEOPLE_WERE, PipelineConfig(top_k=10),
                                   worked_examples)
        assert set(result.tokens()) == {
            "arrested", "killed", "hospitalized", "injured", "evacuated",
            "wounded", "shot", "homeless", "hurt", "detained",
        }

    def test_injury_involves_candidates(self, worked_examples):
        result = prompt_candidates(INJURED, INVOLVES, PipelineConfig(top_k=10),
                                   worked_examples)
        assert set(result.tokens()) == {
            "fireworks", "demonstrations", "protests", "violence", "suicide",
            "bicycles", "shooting", "strikes", "motorcycles", "cycling",
        }

    def test_injury_entailed(self, worked_examples):
        config = PipelineConfig(top_k=10)
        candidates = prompt_candidates(INJURED, PEOPLE_WERE, config, worked_examples)
        entailed = filter_entailed(INJURED, PEOPLE_WERE, candidates, config, worked_examples)
        assert entailed.tokens() == ["injured", "wounded", "hurt"]

    def test_sponsorship_entailed_via_pr_ent(self, worked_examples):
        results = pr_ent(SPONSOR, [INVOLVES], PipelineConfig(top_k=10), worked_examples)
        assert set(results["involves"].tokens()) == {
            "sponsorship", "sponsors", "advertising", "competitions",
        }

    def test_threshold_zero_keeps_everything(self, worked_examples):
        config = PipelineConfig(top_k=10, entail_threshold=0.0)
        candidates = prompt_candidates(INJURED, PEOPLE_WERE, config, worked_examples)
        entailed = filter_entailed(INJURED, PEOPLE_WERE, candidates, config, worked_examples)
        assert entailed.tokens() == candidates.tokens()

    def test_threshold_one_empties(self, worked_examples):
        config = PipelineConfig(top_k=10, entail_threshold=1.0)
        candidates = prompt_candidates(INJURED, PEOPLE_WERE, config, worked_examples)
        entailed = filter_entailed(INJURED, PEOPLE_WERE, candidates, config, worked_examples)
        assert entailed.tokens() == []

    def test_constrained_vocabulary(self, worked_examples):
        config = PipelineConfig(top_k=10, allowed_tokens=frozenset({"killed"}))
        result = prompt_candidates(INJURED, PEOPLE_WERE, config, worked_examples)
        assert result.tokens() == ["killed"]

    def test_k_larger_than_support(self, worked_examples):
        result = prompt_candidates(INJURED, PEOPLE_WERE, PipelineConfig(top_k=500),
                                   worked_examples)
        assert len(result.candidates) == 10

    def test_jsonl_shape(self, worked_examples):
        import json

        config = PipelineConfig(top_k=10)
        candidates = prompt_candidates(INJURED, PEOPLE_WERE, config, worked_examples)
        entailed = filter_entailed(INJURED, PEOPLE_WERE, candidates, config, worked_examples)
        line = json.loads(entailed.to_json_line())
        assert set(line) == {"event_id", "template_id", "entailed"}
        assert {e["token"] for e in line["entailed"]} == {"injured", "wounded", "hurt"}
        assert all(set(e) == {"token", "fill_p", "entail_p"} for e in line["entailed"])


class TestPrEnt:
    def test_empty_templates_rejected(self, worked_examples):
        with pytest.raises(InvalidTemplates):
            pr_ent(INJURED, [], PipelineConfig(), worked_examples)

    def test_duplicate_ids_rejected(self, worked_examples):
        with pytest.raises(InvalidTemplates):
            pr_ent(INJURED, [PEOPLE_WERE, PEOPLE_WERE], PipelineConfig(), worked_examples)

    def test_two_templates_two_keys(self, worked_examples):
        results = pr_ent(INJURED, [PEOPLE_WERE, INVOLVES], PipelineConfig(top_k=10),
                         worked_examples)
        assert set(results) == {"people_were", "involves"}

    def test_one_failure_does_not_abort_the_rest(self, worked_examples):
        broken = Template("broken", "Unknown prompt [Z].")
        errors: dict = {}
        results = pr_ent(INJURED, [PEOPLE_WERE, broken], PipelineConfig(top_k=10),
                         worked_examples, errors=errors)
        assert set(results) == {"people_were"}
        assert set(errors) == {"broken"}


class TestInvariants:
    """Randomized mock-backed property checks; the acceptance suite repeats
    them at 1000 cases."""

    N = 200

    def test_subset_and_threshold_zero_identity(self):
        rng = random.Random(11)
        for _ in range(self.N):
            event, template, suite, n = random_mock_case(rng)
            config = random_config(rng)
            candidates = prompt_candidates(event, template, config, suite)
            entailed = filter_entailed(event, template, candidates, config, suite)
            assert set(entailed.tokens()) <= set(candidates.tokens())
            zero = PipelineConfig(top_k=config.top_k, entail_threshold=0.0)
            identity = filter_entailed(event, template, candidates, zero, suite)
            assert identity.tokens() == candidates.tokens()

    def test_threshold_monotonicity(self):
        rng = random.Random(12)
        for _ in range(self.N):
            event, template, suite, n = random_mock_case(rng)
            t1, t2 = sorted((rng.random(), rng.random()))
            k = rng.randint(1, 45)
            low = PipelineConfig(top_k=k, entail_threshold=t1)
            high = PipelineConfig(top_k=k, entail_threshold=t2)
            candidates = prompt_candidates(event, template, low, suite)
            loose = filter_entailed(event, template, candidates, low, suite)
            strict = filter_entailed(event, template, candidates, high, suite)
            assert set(strict.tokens()) <= set(loose.tokens())

    def test_k_monotonicity(self):
        rng = random.Random(13)
        for _ in range(self.N):
            event, template, suite, n = random_mock_case(rng)
            k1, k2 = sorted((rng.randint(1, 45), rng.randint(1, 45)))
            threshold = rng.random()
            small = PipelineConfig(top_k=k1, entail_threshold=threshold)
            large = PipelineConfig(top_k=k2, entail_threshold=threshold)
            entailed_small = filter_entailed(
                event, template, prompt_candidates(event, template, small, suite),
                small, suite)
            entailed_large = filter_entailed(
                event, template, prompt_candidates(event, template, large, suite),
                large, suite)
            assert set(entailed_small.tokens()) <= set(entailed_large.tokens())

    def test_determinism(self):
        rng = random.Random(14)
        for _ in range(self.N):
            event, template, suite, n = random_mock_case(rng)
            config = random_config(rng)
            first = pr_ent(event, [template], config, suite)
            second = pr_ent(event, [template], config, suite)
            assert first == second
