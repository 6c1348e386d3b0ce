"""Run the sampled separation check on the tower over the Magnus pair for several seeds.

    python scripts/magnus_tower_sweep.py [--seeds 0 1 2] [--pairs 20] [--n-max 16]

For each seed, prints how many sampled pairs separate, the largest first
separating N, how many samples were rejected for lying in the classes of
u or v, and whether (u, v) was ever separated (it should not be).
"""

import argparse
import sys
import time

from serrelab.constructions import fig3_tower
from serrelab.towers import prop51_sampling


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    ap.add_argument("--pairs", type=int, default=20)
    ap.add_argument("--n-max", type=int, default=16)
    args = ap.parse_args(argv)

    tower = fig3_tower()
    bad = 0
    for seed in args.seeds:
        t0 = time.perf_counter()
        rep = prop51_sampling(tower, args.pairs, seed=seed, n_max=args.n_max)
        ns = [p.minimal_n for p in rep.pairs if p.minimal_n is not None]
        print(
            f"seed {seed}: {len(ns)}/{len(rep.pairs)} separated, max N {max(ns, default=None)}, "
            f"rejected {rep.rejected}, (u, v) separated at {rep.uv_separated_at} "
            f"({time.perf_counter() - t0:.1f}s)"
        )
        bad += not rep.all_separated or rep.uv_separated_at is not None
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
