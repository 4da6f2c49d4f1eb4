import logging

import pytest

from model_swarms.application.exceptions import ConfigurationNotValid
from model_swarms.config import get_app_config


def test_app_config_must_raises_exception_when_mode_is_not_found(monkeypatch):
    monkeypatch.setenv("DEPLOY_ENV", "Xpto")

    with pytest.raises(ConfigurationNotValid):
        get_app_config()


def test_testing_config_logs_warnings_only(monkeypatch):
    monkeypatch.setenv("DEPLOY_ENV", "Testing")

    assert logging.WARNING == get_app_config().LOGS_LEVEL


def test_log_dir_follows_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("DEPLOY_ENV", "Production")
    monkeypatch.setenv("MODEL_SWARMS_LOG_DIR", str(tmp_path))

    assert str(tmp_path) == get_app_config().LOG_DIR
