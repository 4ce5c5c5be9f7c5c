"""How loose is the height comparison constant?

For random degree-2 maps, samples points and reports the largest observed
|h(gP) - 2h(P)| next to the certified C. Any observed value above C is a bug.
"""

import argparse
import math
import random

from dmlsplit.errors import DomainError
from dmlsplit.heights import height_comparison_constant
from dmlsplit.projective import ProjPoint, ProjRatMap


def log_height(P):
    return math.log(max(abs(P.u), abs(P.w)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--maps", type=int, default=20)
    ap.add_argument("--points", type=int, default=500)
    ap.add_argument("--coeff", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    done = 0
    print(f"{'map':28s} {'C':>10s} {'max dev':>10s} {'ratio':>7s}")
    while done < args.maps:
        a = [rng.randint(-args.coeff, args.coeff) for _ in range(3)]
        b = [rng.randint(-args.coeff, args.coeff) for _ in range(3)]
        try:
            g = ProjRatMap.from_descending(a, b)
        except DomainError:
            continue
        C = float(height_comparison_constant(g).approx().value)
        worst = 0.0
        for _ in range(args.points):
            bits = rng.randrange(1, 120)
            P = ProjPoint.of(rng.randrange(-(2**bits), 2**bits), rng.randrange(1, 2**bits))
            worst = max(worst, abs(log_height(g(P)) - 2 * log_height(P)))
        flag = "  <-- VIOLATION" if worst > C + 1e-9 else ""
        ratio = worst / C if C else float("nan")
        print(f"{str(g):28s} {C:10.4f} {worst:10.4f} {ratio:7.3f}{flag}")
        done += 1


if __name__ == "__main__":
    main()
