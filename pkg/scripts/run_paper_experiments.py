#!/usr/bin/env python3
"""Run the full-length chains behind the shipped configs/ files.

Beam chains run 1.2e5 iterations, the path-recovery chain 1e5 and the
source-detection chain 1e4. Expect roughly 15 minutes, almost all of it in
the source-detection tessellation rebuilds.
"""

import subprocess
import sys
import time
from pathlib import Path

CONFIGS = sorted((Path(__file__).resolve().parent.parent / "configs").glob("*.cfg"))


def main() -> None:
    for config in CONFIGS:
        start = time.perf_counter()
        proc = subprocess.run([sys.executable, "-m", "gridinfer.cli", "run",
                               "--config", str(config)])
        status = "ok" if proc.returncode == 0 else f"exit {proc.returncode}"
        print(f"{config.name}: {status} in {time.perf_counter() - start:.0f}s")


if __name__ == "__main__":
    main()
