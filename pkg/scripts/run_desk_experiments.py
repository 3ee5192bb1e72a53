#!/usr/bin/env python3
"""Run every scenario at desk scale (the acceptance-suite iteration counts).

Writes one artifact directory per scenario under out/desk/. Roughly five
minutes end to end, dominated by the tessellation rebuilds of the
source-detection chain.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from gridinfer.harness import default_config, run_scenario

RUNS = [
    ("beam-discrete", "right", False),
    ("beam-discrete", "left", False),
    ("beam-continuous", "right", False),
    ("beam-continuous", "left", False),
    ("beam-continuous", "right", True),
    ("sde", "paper-default", False),
    ("sde", "paper-default", True),
    ("source-detection", "paper-default", False),
    ("source-detection", "paper-default", True),
]


def main() -> None:
    out_root = Path("out/desk")
    for scenario, observations, baseline in RUNS:
        config = default_config(scenario, desk_scale=True)
        config.observations = observations
        config.baseline = baseline
        tag = scenario + ("" if observations == "paper-default" else f"_{observations}")
        tag += "_baseline" if baseline else ""
        config.output_dir = str(out_root / tag)
        start = time.perf_counter()
        summary = run_scenario(config)
        print(f"{tag}: {time.perf_counter() - start:.1f}s, "
              f"u acceptance {summary['acceptance_u']:.3f}, "
              f"e_r {summary['reconstruction_error_total']:.2f}")


if __name__ == "__main__":
    main()
