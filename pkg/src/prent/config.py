"""Toolkit configuration: backend selection, defaults, persistence paths.

Settings come from an optional TOML or JSON file, overridden by environment
variables (PRENT_BACKEND, PRENT_FILL_MODEL, PRENT_NLI_MODEL, PRENT_QA_MODEL,
PRENT_DEVICE, PRENT_TOP_K, PRENT_THRESHOLD, PRENT_DATA_DIR).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .backends import (
    BackendConfig,
    BackendSuite,
    TableEntailmentBackend,
    TableFillBackend,
    TableQABackend,
    simulated_suite,
    transformers_suite,
)

PACKAGE_DATA = Path(__file__).parent / "data"
DEMO_CORPUS = PACKAGE_DATA / "corpora" / "demo_corpus.csv"
BENCHMARK_CORPUS = PACKAGE_DATA / "corpora" / "benchmark_corpus.csv"
DEFAULT_CODEBOOK = PACKAGE_DATA / "codebooks" / "political_events.json"

_ENV_KEYS = {
    "PRENT_BACKEND": ("backend",),
    "PRENT_FILL_MODEL": ("models", "fill"),
    "PRENT_NLI_MODEL": ("models", "nli"),
    "PRENT_QA_MODEL": ("models", "qa"),
    "PRENT_DEVICE": ("models", "device"),
    "PRENT_TOP_K": ("pipeline", "top_k"),
    "PRENT_THRESHOLD": ("pipeline", "entail_threshold"),
    "PRENT_DATA_DIR": ("data_dir",),
}


@dataclass
class ToolkitConfig:
    backend: str = "simulated"  # simulated | mock | transformers
    models: BackendConfig = field(default_factory=BackendConfig)
    top_k: int = 30
    entail_threshold: float = 0.5
    data_dir: Path = field(default_factory=lambda: Path.home() / ".prent")
    fixture_fill: Path | None = None
    fixture_nli: Path | None = None
    fixture_qa: Path | None = None
    qa_confidence_floor: float = 0.1


def _read_document(path: Path) -> dict:
    if path.suffix == ".json":
        return json.loads(path.read_text(encoding="utf-8"))
    if path.suffix == ".toml":
        try:
            import tomllib as toml_parser
        except ImportError:
            try:
                import tomli as toml_parser
            except ImportError:
                raise RuntimeError(
                    "TOML config needs Python >= 3.11 or the tomli package; "
                    "use a JSON config instead"
                ) from None
        return toml_parser.loads(path.read_text(encoding="utf-8"))
    raise ValueError(f"config file must be .json or .toml: {path}")


def load_config(path: str | Path | None = None, env: dict | None = None) -> ToolkitConfig:
    env = os.environ if env is None else env
    document: dict = {}
    if path is not None:
        document = _read_document(Path(path))
    for key, target in _ENV_KEYS.items():
        if key in env:
            node = document
            for part in target[:-1]:
                node = node.setdefault(part, {})
            node[target[-1]] = env[key]

    models = document.get("models", {})
    backend_config = BackendConfig(
        fill_model_id=models.get("fill", BackendConfig.fill_model_id),
        nli_model_id=models.get("nli", BackendConfig.nli_model_id),
        qa_model_id=models.get("qa", BackendConfig.qa_model_id),
        device=models.get("device", BackendConfig.device),
        max_length=int(models.get("max_length", BackendConfig.max_length)),
    )
    pipeline = document.get("pipeline", {})
    fixtures = document.get("fixtures", {})
    config = ToolkitConfig(
        backend=document.get("backend", "simulated"),
        models=backend_config,
        top_k=int(pipeline.get("top_k", 30)),
        entail_threshold=float(pipeline.get("entail_threshold", 0.5)),
        qa_confidence_floor=float(pipeline.get("qa_confidence_floor", 0.1)),
    )
    if "data_dir" in document:
        config.data_dir = Path(document["data_dir"])
    for name in ("fill", "nli", "qa"):
        if name in fixtures:
            setattr(config, f"fixture_{name}", Path(fixtures[name]))
    if config.backend not in ("simulated", "mock", "transformers"):
        raise ValueError(f"unknown backend kind {config.backend!r}")
    return config


def build_backends(config: ToolkitConfig) -> BackendSuite:
    if config.backend == "simulated":
        suite = simulated_suite()
        suite.qa.confidence_floor = config.qa_confidence_floor
        return suite
    if config.backend == "mock":
        missing = [n for n in ("fill", "nli") if getattr(config, f"fixture_{n}") is None]
        if missing:
            raise ValueError(f"mock backend needs fixture paths for: {', '.join(missing)}")
        qa = (
            TableQABackend.from_file(config.fixture_qa, config.qa_confidence_floor)
            if config.fixture_qa
            else None
        )
        return BackendSuite(
            fill=TableFillBackend.from_file(config.fixture_fill),
            nli=TableEntailmentBackend.from_file(config.fixture_nli),
            qa=qa,
        )
    suite = transformers_suite(config.models)
    suite.qa.confidence_floor = config.qa_confidence_floor
    return suite


def pipeline_config(config: ToolkitConfig, top_k: int | None = None,
                    entail_threshold: float | None = None):
    from .pipeline import PipelineConfig

    return PipelineConfig(
        top_k=top_k if top_k is not None else config.top_k,
        entail_threshold=(
            entail_threshold if entail_threshold is not None else config.entail_threshold
        ),
    )
