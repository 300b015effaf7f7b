from __future__ import annotations

import random
import string

import pytest

from prent.backends import (
    BackendSuite,
    TableEntailmentBackend,
    TableFillBackend,
    TableQABackend,
    simulated_suite,
)
from prent.config import BENCHMARK_CORPUS, DEMO_CORPUS, PACKAGE_DATA
from prent.corpus import read_corpus
from prent.pipeline import EventDescription, PipelineConfig, Template, render_prompt

FIXTURES = PACKAGE_DATA / "fixtures"


@pytest.fixture(scope="session")
def simulated():
    return simulated_suite()


@pytest.fixture(scope="session")
def worked_examples() -> BackendSuite:
    """Table mocks loaded from the shipped worked-example fixtures."""
    return BackendSuite(
        fill=TableFillBackend.from_file(FIXTURES / "worked_examples_fill.json"),
        nli=TableEntailmentBackend.from_file(FIXTURES / "worked_examples_nli.json"),
        qa=TableQABackend.from_file(FIXTURES / "worked_examples_qa.json"),
    )


@pytest.fixture(scope="session")
def demo_corpus():
    return read_corpus(DEMO_CORPUS)


@pytest.fixture(scope="session")
def benchmark_corpus():
    return read_corpus(BENCHMARK_CORPUS)


@pytest.fixture(scope="session")
def involves_template():
    return Template("involves", "This event involves [Z].")


@pytest.fixture(scope="session")
def people_were_template():
    return Template("people_were", "People were [Z].")


def random_mock_case(rng: random.Random):
    """One randomized pipeline scenario backed by exact-match tables.

    Returns (event, template, suite, n_candidates); fill probabilities are
    strictly descending and entailment scores arbitrary, so every pipeline
    invariant can be checked against it.
    """

    def word(min_len=2, max_len=8):
        return "".join(rng.choice(string.ascii_lowercase)
                       for _ in range(rng.randint(min_len, max_len)))

    event = EventDescription(" ".join(word() for _ in range(rng.randint(1, 12))) + ".")
    template = Template("t", " ".join(word() for _ in range(rng.randint(1, 4))) + " [Z].")

    n = rng.randint(1, 40)
    tokens = rng.sample([word(3, 10) for _ in range(200)], n)
    raw = sorted((rng.random() for _ in tokens), reverse=True)
    total = sum(raw) * (1 + rng.random())
    fills = [(t, p / total) for t, p in zip(tokens, raw)]

    fill_table = {render_prompt(event, template): fills}
    nli_table = {event.text: {template.fill(t): rng.random() for t, _ in fills}}
    suite = BackendSuite(
        fill=TableFillBackend(fill_table),
        nli=TableEntailmentBackend(nli_table),
        qa=None,
    )
    return event, template, suite, n


def random_config(rng: random.Random) -> PipelineConfig:
    return PipelineConfig(top_k=rng.randint(1, 45), entail_threshold=rng.random())


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "skipped"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" not in report.nodeid or report.when not in ("call", "setup"):
                continue
            name = report.nodeid.split("::")[-1]
            detail = ""
            if outcome == "skipped" and report.longrepr:
                detail = f"  ({report.longrepr[2].split(':', 1)[-1].strip()})"
            lines.append((name, outcome.upper(), detail))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, outcome, detail in sorted(lines):
            terminalreporter.write_line(f"{outcome:<7} {name}{detail}")
