import os
import sys
from pathlib import Path

import numpy as np

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from src.ingest import write_canonical
from src.profile.synthetic import LULESH_TREE, imbalanced_profile, scaling_series, tree_profile


def generate_profiles(out_dir: str, seed: int = 0):
    """Write the cookbook data set: a hot path run, an imbalanced run and two scaling series"""
    rng = np.random.default_rng(seed)
    os.makedirs(out_dir, exist_ok=True)

    profiles = [tree_profile(LULESH_TREE, num_ranks=8, exec_id="lulesh-8"), imbalanced_profile(rng)]
    # one rank per process, so the process count survives the round trip through num_ranks
    profiles += scaling_series([64, 128, 256, 512], strong=True, prefix="lulesh-strong")
    profiles += scaling_series([64, 125, 216, 512], strong=False, prefix="lulesh-weak")

    for pf in profiles:
        path = os.path.join(out_dir, f"{pf.exec_id}.json")
        write_canonical(pf, path)
        print(f"Wrote {path} ({len(pf.graph)} nodes, {pf.num_ranks} ranks)")


if __name__ == "__main__":
    generate_profiles(sys.argv[1] if len(sys.argv) > 1 else "profiles")
