"""Search for a strict surjection from the Magnus-pair group onto F3.

    python scripts/find_rho.py [--max-length L] [--seed S]

Prints the images in the format of ``FROZEN_RHO`` in constructions.py, plus
the outcome of the strictness checks, so a new map can be pasted in.
"""

import argparse
import sys

from serrelab.constructions import find_strict_map, magnus_pair_gog, verify_magnus_pair


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-length", type=int, default=3, help="longest generator image tried")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    f = magnus_pair_gog(with_rho=False)
    rho = find_strict_map(f, args.max_length, seed=args.seed)
    if rho is None:
        print(f"no strict map with images of length <= {args.max_length}", file=sys.stderr)
        return 1
    print("FROZEN_RHO: dict[str, str] = {")
    for name, img in rho.images.items():
        print(f'    "{name}": "{img}",')
    print("}")
    rep = verify_magnus_pair(magnus_pair_gog(rho))
    print(f"# verified: {rep.verified}, strict checks: {rep.strictness.as_dict()}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
