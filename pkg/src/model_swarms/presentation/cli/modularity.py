from pathlib import Path

import click
import numpy as np

from model_swarms.application.adapters.checkpoint import CheckpointRepository
from model_swarms.application.adapters.run_config import build_utility, load_run_config, parse_run_settings
from model_swarms.application.adapters.run_log import JsonlRecordSink, RunLog, RunLogRepository
from model_swarms.application.exceptions import ConfigurationNotValid, IncompleteLogException
from model_swarms.application.use_cases.modularity import (
    best_single,
    greedy_soup,
    inject_expert,
    replay_removal,
    uniform_soup,
)
from model_swarms.application.use_cases.search import SwarmSearch, restore_state
from model_swarms.domain.models.swarm_config import SwarmConfig

from .errors import emit, handle_errors

SOUP_MODES = ("uniform", "greedy", "best")


def _last_record(run_log: RunLog):
    if not run_log.records:
        raise IncompleteLogException("Run log has no records", missing=[0])
    return max(run_log.records, key=lambda record: record.iteration)


@click.command()
@click.option("--state", "state_path", required=True, type=click.Path(dir_okay=False), help="run log to continue")
@click.option("--expert", "expert_path", required=True, type=click.Path(dir_okay=False), help="checkpoint to add")
@click.option("--iterations", default=0, show_default=True, type=click.IntRange(min=0), help="iterations beyond K")
@handle_errors
def inject(state_path: str, expert_path: str, iterations: int) -> None:
    """Add an expert to a logged run and continue the search in the same log."""
    run_log = RunLogRepository.load(state_path)
    if "settings" not in run_log.header or "config" not in run_log.header:
        raise ConfigurationNotValid(f"Run log '{state_path}' was not written by 'run' and cannot be continued")

    settings = parse_run_settings(run_log.header["settings"])
    cfg = SwarmConfig().evolve(**run_log.header["config"])
    cfg = cfg.evolve(K=cfg.K + iterations)
    utility = build_utility(settings)

    state = restore_state(_last_record(run_log), cfg)
    injected_at = state.iteration

    # Separate streams keep the continued search independent of the injection.
    expert = CheckpointRepository.load(expert_path)
    inject_expert(state, expert, utility, cfg, np.random.default_rng((cfg.seed, injected_at, 2)))
    particle_id = state.particles[-1].id

    search = SwarmSearch(
        utility,
        cfg,
        sink=JsonlRecordSink(state_path, append=True),
        rng=np.random.default_rng((cfg.seed, injected_at)),
    )
    result = search.resume(state)

    emit(
        {
            "injected_at": injected_at,
            "particle": particle_id,
            "f_best": result.f_best,
            "g_provider": state.g_provider,
            "iterations": state.iteration,
            "log": state_path,
        }
    )


@click.command(name="remove-replay")
@click.option("--log", "log_path", required=True, type=click.Path(dir_okay=False), help="complete run log")
@click.option("--expert-id", required=True, type=click.IntRange(min=0), help="particle to remove")
@click.option("--out-dir", type=click.Path(file_okay=False), help="write one checkpoint per particle here")
@handle_errors
def remove_replay(log_path: str, expert_id: int, out_dir: str | None) -> None:
    """Replay a run as if one particle had never contributed as global best or worst."""
    run_log = RunLogRepository.load(log_path)
    locations = replay_removal(run_log.records, expert_id)

    document = {"removed": expert_id, "particles": list(locations)}
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        for particle_id, location in locations.items():
            CheckpointRepository.save(location, Path(out_dir) / f"particle-{particle_id}.mswm")
        document["out_dir"] = out_dir
    else:
        document["locations"] = {str(particle_id): location.tolist() for particle_id, location in locations.items()}

    emit(document)


@click.command()
@click.option("--mode", required=True, type=click.Choice(SOUP_MODES))
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="run configuration naming the utility")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="checkpoint destination")
@click.argument("experts", nargs=-1, required=True, type=click.Path(dir_okay=False))
@handle_errors
def soup(mode: str, config_path: str | None, out_path: str | None, experts: tuple[str, ...]) -> None:
    """Merge expert checkpoints with a static baseline."""
    vectors = [CheckpointRepository.load(path) for path in experts]
    document: dict = {"mode": mode, "experts": len(vectors)}

    if mode == "uniform":
        merged = uniform_soup(vectors)
    else:
        if not config_path:
            raise ConfigurationNotValid(f"Soup mode '{mode}' needs --config to score the experts")
        utility = build_utility(load_run_config(config_path))
        if mode == "greedy":
            merged = greedy_soup(vectors, utility)
        else:
            document["index"], merged, _ = best_single(vectors, utility)
        document["utility"] = float(utility(merged))

    if out_path:
        CheckpointRepository.save(merged, out_path)
        document["out"] = out_path
    else:
        document["vector"] = merged.tolist()

    emit(document)
