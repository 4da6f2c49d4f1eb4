from pathlib import Path

import click

from model_swarms.application.adapters.checkpoint import CheckpointRepository
from model_swarms.application.adapters.matrix_files import load_distribution_set, load_targets
from model_swarms.application.adapters.run_config import (
    RunSettings,
    build_experts,
    build_utility,
    load_run_config,
)
from model_swarms.application.adapters.run_log import JsonlRecordSink
from model_swarms.application.exceptions import ConfigurationNotValid
from model_swarms.application.use_cases.analysis import diversity_preset, rank_report
from model_swarms.application.use_cases.modularity import best_single
from model_swarms.application.use_cases.search import SwarmSearch, grid_search, resolve_seed
from model_swarms.application.use_cases.token_swarms import token_search

from .errors import emit, handle_errors

config_option = click.option(
    "--config", "config_path", required=True, type=click.Path(dir_okay=False), help="key=value run configuration"
)
log_option = click.option("--log", "log_path", type=click.Path(dir_okay=False), help="run log destination (JSONL)")


def resolve_log_path(app_config, settings: RunSettings, override: str | None, name: str, seed: int) -> Path:
    if override:
        return Path(override)
    if settings.log_path:
        return Path(settings.log_path)
    return Path(app_config.LOG_DIR) / f"{name}-{seed}.jsonl"


def _save_best(settings: RunSettings, best) -> str | None:
    if not settings.best_path:
        return None
    CheckpointRepository.save(best, settings.best_path)
    return settings.best_path


@click.command()
@config_option
@log_option
@click.pass_obj
@handle_errors
def run(app_config, config_path: str, log_path: str | None) -> None:
    """Run one swarm search over the configured experts."""
    settings = load_run_config(config_path)
    seed = resolve_seed(settings.swarm.seed)
    cfg = settings.swarm.evolve(seed=seed)

    utility = build_utility(settings)
    experts = build_experts(settings, seed)
    path = resolve_log_path(app_config, settings, log_path, "run", seed)
    sink = JsonlRecordSink(path)
    header = {"command": "run", "settings": settings.raw}

    if settings.diversity is not None:
        a, b = settings.diversity
        result = diversity_preset(experts, a, b, utility, cfg, sink=sink, header=header).result
    else:
        result = SwarmSearch(utility, cfg, sink=sink, header=header).search(experts)

    emit(
        {
            "seed": result.seed,
            "f_best": result.f_best,
            "f_initial": result.log[0].f_g,
            "iterations": result.state.iteration,
            "start_rank": rank_report(result.log),
            "log": str(path),
            "best": _save_best(settings, result.best),
        }
    )


@click.command(name="token-run")
@config_option
@log_option
@click.pass_obj
@handle_errors
def token_run(app_config, config_path: str, log_path: str | None) -> None:
    """Search composition weights over fixed next-token distributions."""
    settings = load_run_config(config_path)
    if not settings.token_contexts or not settings.token_targets:
        raise ConfigurationNotValid("token-run needs 'token_contexts' and 'token_targets'")

    seed = resolve_seed(settings.swarm.seed)
    contexts = [load_distribution_set(path) for path in settings.token_contexts]
    targets = load_targets(settings.token_targets)
    path = resolve_log_path(app_config, settings, log_path, "token", seed)

    result = token_search(contexts, targets, settings.swarm.evolve(seed=seed), sink=JsonlRecordSink(path))

    emit(
        {
            "seed": seed,
            "row": result.row.tolist(),
            "score": result.score,
            "best_pure": max(result.pure_scores),
            "log": str(path),
        }
    )


@click.command()
@config_option
@click.option("--budget", default=200, show_default=True, type=click.IntRange(min=1), help="configurations to try")
@handle_errors
def grid(config_path: str, budget: int) -> None:
    """Randomly sample the hyperparameter grid and keep the best search."""
    settings = load_run_config(config_path)
    seed = resolve_seed(settings.swarm.seed)

    utility = build_utility(settings)
    experts = build_experts(settings, seed)
    result = grid_search(experts, utility, settings.grid, budget=budget, seed=seed, base=settings.swarm)
    _, _, baseline = best_single(experts, utility)

    emit(
        {
            "seed": seed,
            "f_best": result.f_best,
            "best_config": result.best_config.dict,
            "runs": len(result.runs),
            "best_single": baseline,
            "beats_best_single": result.beats_baseline(baseline),
            "best": _save_best(settings, result.best),
        }
    )
