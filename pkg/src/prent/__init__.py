"""Prompt-and-entail event coding toolkit.

Codes free-text event descriptions into event types by prompting a cloze
language model for slot fillers and keeping only candidates entailed by the
description, then mapping survivors through boolean codebook rules. Includes
benchmark and robustness suites, actor/target extraction, an HTTP service
and a CLI.
"""

from .backends import BackendConfig, BackendSuite, simulated_suite, transformers_suite
from .codebook import (
    Codebook,
    Literal,
    Rule,
    ValidationSession,
    code_event,
    evaluate_rule,
    export_codebook,
    import_codebook,
    load_codebook,
)
from .corpus import EventRecord, SplitSpec, clean_description, read_corpus, stratified_split
from .pipeline import (
    CandidateSet,
    EntailedSet,
    EventDescription,
    PipelineConfig,
    Template,
    filter_entailed,
    pr_ent,
    prompt_candidates,
    render_prompt,
)

__version__ = "0.1.0"

__all__ = [
    "BackendConfig",
    "BackendSuite",
    "CandidateSet",
    "Codebook",
    "EntailedSet",
    "EventDescription",
    "EventRecord",
    "Literal",
    "PipelineConfig",
    "Rule",
    "SplitSpec",
    "Template",
    "ValidationSession",
    "clean_description",
    "code_event",
    "evaluate_rule",
    "export_codebook",
    "filter_entailed",
    "import_codebook",
    "load_codebook",
    "pr_ent",
    "prompt_candidates",
    "read_corpus",
    "render_prompt",
    "simulated_suite",
    "stratified_split",
    "transformers_suite",
]
