import logging
import os

from dotenv import load_dotenv

from .application.exceptions import ConfigurationNotValid

load_dotenv()


class BaseConfig:
    LOGS_LEVEL = logging.INFO
    LOG_DIR = os.environ.get("MODEL_SWARMS_LOG_DIR", "runs")
    VERSION = "1.0.0"


class DevelopmentConfig(BaseConfig):
    LOGS_LEVEL = logging.DEBUG


class TestingConfig(BaseConfig):
    LOGS_LEVEL = logging.WARNING


class ProductionConfig(BaseConfig):
    pass


def get_app_config() -> type[BaseConfig]:
    DEPLOY_ENV = os.environ.get("DEPLOY_ENV", "Development")

    try:
        config = {"Development": DevelopmentConfig, "Testing": TestingConfig, "Production": ProductionConfig}[
            DEPLOY_ENV
        ]
    except KeyError as e:
        raise ConfigurationNotValid(f"Unknown DEPLOY_ENV '{DEPLOY_ENV}'") from e

    # The log directory may be changed after import (tests, wrapper scripts).
    config.LOG_DIR = os.environ.get("MODEL_SWARMS_LOG_DIR", BaseConfig.LOG_DIR)
    return config
