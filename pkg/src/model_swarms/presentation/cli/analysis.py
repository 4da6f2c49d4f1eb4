import csv
import io

import click

from model_swarms.application.adapters.matrix_files import load_correctness_matrix
from model_swarms.application.adapters.run_log import RunLogRepository
from model_swarms.application.exceptions import InvalidValueException
from model_swarms.application.use_cases.analysis import (
    c_emerge,
    c_surge,
    export_trajectory,
    rank_report,
    transition_counts,
)

from .errors import emit, handle_errors


def _coordinates(value: str) -> tuple[int, int]:
    parts = value.split(",")
    if len(parts) != 2 or not all(part.strip().isdigit() for part in parts):
        raise InvalidValueException(f"--coords must look like i,j, got {value!r}")
    return int(parts[0]), int(parts[1])


@click.command()
@click.option("--pre", "pre_path", required=True, type=click.Path(dir_okay=False), help="0/1 matrix before search")
@click.option("--post", "post_path", required=True, type=click.Path(dir_okay=False), help="0/1 matrix after search")
@click.option("--log", "log_path", type=click.Path(dir_okay=False), help="run log for the start rank of the winner")
@handle_errors
def analyze(pre_path: str, post_path: str, log_path: str | None) -> None:
    """Correctness surge and emergence between two question-by-model matrices."""
    pre, post = load_correctness_matrix(pre_path), load_correctness_matrix(post_path)
    emerge = c_emerge(pre, post)

    document = {
        "c_surge": c_surge(pre, post),
        "c_emerge": emerge,
        "c_emerge_defined": emerge is not None,
        "transitions": transition_counts(pre, post),
    }
    if log_path:
        document["start_rank"] = rank_report(RunLogRepository.load(log_path).records)

    emit(document)


@click.command()
@click.option("--log", "log_path", required=True, type=click.Path(dir_okay=False))
@click.option("--coords", required=True, help="two coordinate indices, e.g. 0,1")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="CSV destination, stdout when omitted")
@handle_errors
def export(log_path: str, coords: str, out_path: str | None) -> None:
    """Two coordinates of every logged location, as CSV."""
    rows = export_trajectory(RunLogRepository.load(log_path).records, _coordinates(coords))

    if out_path is None:
        buffer = io.StringIO()
        csv.writer(buffer).writerows(rows)
        click.echo(buffer.getvalue(), nl=False)
        return

    with open(out_path, "w", newline="") as stream:
        csv.writer(stream).writerows(rows)
