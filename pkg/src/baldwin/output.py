"""Plot-ready CSV series, distribution tables and the JSON sidecar."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .estimator import estimate_rates
from .experiment import ExperimentResult

SERIES_HEADER = ["generation", "mean_rho_begin", "mean_rho_end", "stderr_begin", "stderr_end"]
DIST_HEADER = ["rho", "curve1", "curve2", "curve3", "curve4"]


def _num(x) -> str:
    # repr of a Python float is the shortest round-tripping form
    return repr(float(x))


def series_rows(result: ExperimentResult):
    cols = (result.mean_rho_series, result.mean_rho_end_series,
            result.stderr_begin, result.stderr_end)
    for g, b, e, sb, se in zip(result.generations, *cols):
        yield [str(int(g)), _num(b), _num(e), _num(sb), _num(se)]


def dist_rows(hist: np.ndarray):
    for rho in range(hist.shape[1]):
        yield [str(rho)] + [_num(v) for v in hist[:, rho]]


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def metadata(result: ExperimentResult, name: str, wall_time: float) -> dict:
    p = result.params
    try:
        est = estimate_rates(p.chain_length, p.population_size, p.mutation_prob,
                             p.selection_intensity).to_dict()
    except ValueError:
        est = None
    return {
        "preset": name,
        "params": p.to_dict(),
        "base_seed": p.base_seed,
        "replicate_count": result.replicate_count,
        "snapshot_generations": list(result.snapshot_generations),
        "target": str(result.target),
        "wall_time_seconds": wall_time,
        "estimate": est,
    }


def write_results(result: ExperimentResult, name: str, out_dir: str | Path,
                  wall_time: float = 0.0) -> list[Path]:
    """Write ``<name>_series.csv``, one ``<name>_dist_G<g>.csv`` per snapshot
    and ``<name>_meta.json`` into ``out_dir``; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    path = out / f"{name}_series.csv"
    _write_csv(path, SERIES_HEADER, series_rows(result))
    paths.append(path)

    for g, hist in result.averaged_snapshots.items():
        path = out / f"{name}_dist_G{g}.csv"
        _write_csv(path, DIST_HEADER, dist_rows(hist))
        paths.append(path)

    path = out / f"{name}_meta.json"
    path.write_text(json.dumps(metadata(result, name, wall_time), indent=2) + "\n")
    paths.append(path)
    return paths
