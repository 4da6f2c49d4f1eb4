import pytest
from click.testing import CliRunner

from model_swarms import create_cli


@pytest.fixture
def cli(monkeypatch, tmp_path):
    monkeypatch.setenv("DEPLOY_ENV", "Testing")
    monkeypatch.setenv("MODEL_SWARMS_LOG_DIR", str(tmp_path / "runs"))

    return create_cli()


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)
