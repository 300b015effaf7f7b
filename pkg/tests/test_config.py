import json

import pytest

from prent.backends import BackendSuite
from prent.config import ToolkitConfig, build_backends, load_config, pipeline_config


class TestLoadConfig:
    def test_defaults(self):
        config = load_config(env={})
        assert config.backend == "simulated"
        assert config.top_k == 30
        assert config.entail_threshold == 0.5
        assert config.models.fill_model_id == "distilbert-base-uncased"
        assert config.models.nli_model_id == "roberta-large-mnli"
        assert config.models.qa_model_id == "deepset/roberta-base-squad2"

    def test_json_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({
            "backend": "simulated",
            "pipeline": {"top_k": 12, "entail_threshold": 0.7},
            "models": {"fill": "my-fill-model", "device": "cpu"},
            "data_dir": str(tmp_path / "state"),
        }))
        config = load_config(path, env={})
        assert config.top_k == 12
        assert config.entail_threshold == 0.7
        assert config.models.fill_model_id == "my-fill-model"
        assert config.data_dir == tmp_path / "state"

    def test_toml_file(self, tmp_path):
        try:
            import tomllib  # noqa: F401
        except ImportError:
            pytest.importorskip("tomli")
        path = tmp_path / "config.toml"
        path.write_text('backend = "simulated"\n[pipeline]\ntop_k = 9\n')
        config = load_config(path, env={})
        assert config.top_k == 9

    def test_env_overrides_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"pipeline": {"top_k": 12}}))
        env = {"PRENT_TOP_K": "44", "PRENT_THRESHOLD": "0.25",
               "PRENT_NLI_MODEL": "other-nli"}
        config = load_config(path, env=env)
        assert config.top_k == 44
        assert config.entail_threshold == 0.25
        assert config.models.nli_model_id == "other-nli"

    def test_unknown_backend_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"backend": "quantum"}))
        with pytest.raises(ValueError):
            load_config(path, env={})

    def test_unknown_suffix_rejected(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("backend: simulated\n")
        with pytest.raises(ValueError):
            load_config(path, env={})


class TestBuildBackends:
    def test_simulated(self):
        suite = build_backends(ToolkitConfig())
        assert isinstance(suite, BackendSuite)
        assert suite.qa is not None

    def test_mock_requires_fixtures(self):
        with pytest.raises(ValueError):
            build_backends(ToolkitConfig(backend="mock"))

    def test_mock_with_fixtures(self):
        from prent.config import PACKAGE_DATA

        fixtures = PACKAGE_DATA / "fixtures"
        config = ToolkitConfig(
            backend="mock",
            fixture_fill=fixtures / "worked_examples_fill.json",
            fixture_nli=fixtures / "worked_examples_nli.json",
            fixture_qa=fixtures / "worked_examples_qa.json",
        )
        suite = build_backends(config)
        fills = suite.fill.fill_mask(
            "Several demonstrators were injured. People were [Z].", 3
        )
        assert [f.token for f in fills] == ["arrested", "killed", "hospitalized"]


class TestPipelineConfig:
    def test_defaults_from_toolkit(self):
        config = pipeline_config(ToolkitConfig(top_k=7, entail_threshold=0.4))
        assert config.top_k == 7
        assert config.entail_threshold == 0.4

    def test_overrides(self):
        config = pipeline_config(ToolkitConfig(), top_k=3, entail_threshold=0.0)
        assert config.top_k == 3
        assert config.entail_threshold == 0.0
