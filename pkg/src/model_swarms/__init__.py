import logging
import sys

import click
import json_logging

from .config import get_app_config

logger = logging.getLogger("model-swarms")


def create_cli() -> click.Group:
    config = get_app_config()

    @click.group()
    @click.version_option(config.VERSION, prog_name="model-swarms")
    @click.pass_context
    def cli(ctx: click.Context) -> None:
        ctx.obj = config

    _configure_logger(config)
    _register_commands(cli)

    return cli


def _register_commands(cli: click.Group) -> None:
    from .presentation.cli.analysis import analyze, export
    from .presentation.cli.modularity import inject, remove_replay, soup
    from .presentation.cli.search import grid, run, token_run

    for command in (run, token_run, grid, inject, remove_replay, soup, analyze, export):
        cli.add_command(command)


def _configure_logger(config) -> None:
    if not json_logging.ENABLE_JSON_LOGGING:
        json_logging.init_non_web(enable_json=True)

        # stdout carries command results; logs go to stderr.
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(json_logging.JSONLogFormatter())
        logger.addHandler(handler)

    logger.setLevel(config.LOGS_LEVEL)
