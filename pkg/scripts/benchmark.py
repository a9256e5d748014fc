import sys
import time
from pathlib import Path
from typing import Dict, List

import numpy as np

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from src.analysis import hot_path, load_imbalance
from src.profile.synthetic import large_profile

ROW_COUNTS = (100_000, 200_000, 400_000, 800_000)


def measure(rows: int, seed: int = 0) -> Dict[str, float]:
    pf = large_profile(np.random.default_rng(seed), rows)
    timings = {}
    started = time.perf_counter()
    load_imbalance(pf, "time")
    timings["load_imbalance"] = time.perf_counter() - started
    started = time.perf_counter()
    hot_path(pf, "time (inc)")
    timings["hot_path"] = time.perf_counter() - started
    return timings


def benchmark(row_counts=ROW_COUNTS) -> List[Dict[str, float]]:
    """Runtime of load_imbalance and hot_path on growing synthetic profiles"""
    results = []
    for rows in row_counts:
        timings = measure(rows)
        results.append({"rows": rows, **timings})
        print(f"{rows:>9} rows  load_imbalance {timings['load_imbalance']:.3f}s  hot_path {timings['hot_path']:.3f}s")
    return results


if __name__ == "__main__":
    benchmark()
