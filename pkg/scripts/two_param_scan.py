"""Grid over (b, c) in x^3 + b*x^2*y^3 + y^9 + c*x*y^7: leading data and pair data."""

import argparse
import itertools
from dataclasses import dataclass
from fractions import Fraction

from polarinv.equivalence import Decision, inv2_equivalent
from polarinv.invariant import format_packet, inv2
from polarinv.options import Options
from polarinv.polynomial import parse_poly

FAMILY = "x^3 + b*x^2*y^3 + y^9 + c*x*y^7"


@dataclass(frozen=True)
class GridConfig:
    bs: tuple = (Fraction(1), Fraction(2), Fraction(3))
    cs: tuple = (Fraction(1), Fraction(2))
    prec: int = 256


def run(cfg: GridConfig):
    opts = Options(prec=cfg.prec)
    invs = {}
    for b, c in itertools.product(cfg.bs, cfg.cs):
        invs[(b, c)] = inv2(parse_poly(FAMILY, {"b": b, "c": c}), opts)
        print(f"(b, c) = ({b}, {c}): {' '.join(format_packet(d) for d in invs[(b, c)].packets)}")
    keys = list(invs)
    print("\nconsistent pairs:")
    n = 0
    for i, p in enumerate(keys):
        for q in keys[i + 1 :]:
            if inv2_equivalent(invs[p], invs[q]).decision is Decision.CONSISTENT:
                print(f"  {p} ~ {q}")
                n += 1
    print(f"  {n} of {len(keys) * (len(keys) - 1) // 2}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--b", nargs="*", type=Fraction, default=list(GridConfig.bs))
    ap.add_argument("--c", nargs="*", type=Fraction, default=list(GridConfig.cs))
    ap.add_argument("--precision", type=int, default=256)
    a = ap.parse_args()
    run(GridConfig(bs=tuple(a.b), cs=tuple(a.c), prec=a.precision))
