"""Recompute derived statistics from a run directory's persisted chain.

The chain CSVs fully determine every derived artifact, so summarize replays
the recorded states through the scenario's forward evaluator (rebuilt from the
config) and rewrites bands.csv, grid_histogram.csv and
reconstruction_error.csv byte-identically to what the original run produced.
Acceptance tallies live only in summary.csv (they are not recoverable from a
thinned chain) and are left untouched.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import DensityParam, Field, FiniteVector, GridParam, PlanarPoint
from .diagnostics import grid_histogram, percentile_bands, reconstruction_error
from .harness import AssembledScenario, ScenarioConfig, assemble, write_csv


def _read_csv(path: Path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def load_chain(config: ScenarioConfig, out: Path):
    """Rebuild (iterations, u states, a params) from the chain CSVs."""
    _, u_rows = _read_csv(out / "chain_u.csv")
    iterations = [int(r[0]) for r in u_rows]
    potentials = [float(r[1]) for r in u_rows]
    u_values = [np.array([float(v) for v in r[2:]]) for r in u_rows]

    header, a_rows = _read_csv(out / "chain_a.csv")
    if header[:3] == ["iteration", "k", "points"]:
        grids = {}
        for r in a_rows:
            pts = np.array([float(p) for p in r[2].split(" ")]) if r[2] else np.empty(0)
            grids[int(r[0])] = pts
        if len(a_rows) == 1:
            domain = _domain_for(config)
            only = GridParam(grids[int(a_rows[0][0])], domain)
            a_params = [only for _ in iterations]
        else:
            domain = _domain_for(config)
            a_params = [GridParam(grids[it], domain) for it in iterations]
    else:
        by_iter = {int(r[0]): DensityParam(int(r[1]), np.array([float(v) for v in r[2:6]]))
                   for r in a_rows}
        a_params = [by_iter[it] for it in iterations]
    return iterations, potentials, u_values, a_params


def _domain_for(config: ScenarioConfig) -> tuple[float, float]:
    if config.scenario in ("beam-discrete", "beam-continuous"):
        return (0.0, 10.0)
    if config.scenario == "sde":
        return (0.01, 10.0)
    return (0.0, 1.0)


def _wrap_u(config: ScenarioConfig, scenario: AssembledScenario, values: np.ndarray):
    if config.scenario == "beam-discrete":
        return FiniteVector(values)
    if config.scenario == "source-detection":
        return PlanarPoint(float(values[0]), float(values[1]))
    grid = np.array([c for c, _ in scenario.truth_fields["u_true"]])
    return Field(grid, values)


def summarize_directory(config: ScenarioConfig, out: Path) -> dict:
    scenario = assemble(config)
    iterations, potentials, u_values, a_params = load_chain(config, out)
    # Burn-in is measured against the chain as recorded, not the configured
    # length: the run may have used a scaled-down iteration count.
    cut = config.burn_in_fraction * iterations[-1]
    kept = [i for i, it in enumerate(iterations) if it >= cut]
    if not kept:
        raise ValueError(f"{out}: no post-burn-in states in the recorded chain")

    outputs = []
    for i in kept:
        u = _wrap_u(config, scenario, u_values[i])
        try:
            outputs.append(np.asarray(scenario.forward(u, a_params[i]), dtype=float))
        except Exception:
            outputs.append(np.full(scenario.obs.m, np.nan))
    outputs = np.array(outputs)
    finite = np.all(np.isfinite(outputs), axis=1)
    per_sensor, total = reconstruction_error(outputs[finite], scenario.clean_forward)

    cols = scenario.sensor_columns
    err_header = list(cols.keys()) + ["e_r"]
    columns = list(cols.values())
    write_csv(out / "reconstruction_error.csv", err_header,
              [tuple(col[i] for col in columns) + (per_sensor[i],)
               for i in range(len(per_sensor))])

    u_kept = np.array([u_values[i] for i in kept])
    bands = percentile_bands(u_kept)
    coords = scenario.band_coordinates
    write_csv(out / "bands.csv", ["coordinate", "mean", "p5", "p10", "p90", "p95"],
              [(coords[i], bands["mean"][i], bands["p5"][i], bands["p10"][i],
                bands["p90"][i], bands["p95"][i]) for i in range(u_kept.shape[1])])

    stats = {"reconstruction_error_total": total,
             "n_kept": len(kept),
             "final_potential": potentials[-1]}
    if isinstance(a_params[0], GridParam):
        grids = [a_params[i] for i in kept]
        labels, probs, mean_counts = grid_histogram(grids, scenario.domain)
        header = ["bucket"] + [f"sub_{j + 1}" for j in range(probs.shape[1])]
        rows = [(labels[b],) + tuple(probs[b]) for b in range(len(labels))]
        rows.append(("mean",) + tuple(mean_counts))
        write_csv(out / "grid_histogram.csv", header, rows)
        stats["mean_k"] = float(np.mean([g.k for g in grids]))
    return stats
