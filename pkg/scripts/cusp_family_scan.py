"""Scan t in x^3 - 3*t^2*x*y^10 + y^12: packets and pairwise comparisons."""

import argparse
from dataclasses import dataclass
from fractions import Fraction

from polarinv.equivalence import format_report, inv2_equivalent
from polarinv.invariant import format_packet, inv2
from polarinv.options import Options
from polarinv.polynomial import parse_poly

FAMILY = "x^3 - 3*t^2*x*y^10 + y^12"


@dataclass(frozen=True)
class ScanConfig:
    values: tuple = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3))
    prec: int = 256


def run(cfg: ScanConfig):
    opts = Options(prec=cfg.prec)
    invs = {}
    for t in cfg.values:
        invs[t] = inv2(parse_poly(FAMILY, {"t": t}), opts)
        print(f"t = {t}: {' '.join(format_packet(d) for d in invs[t].packets)}")
    for i, s in enumerate(cfg.values):
        for t in cfg.values[i + 1 :]:
            print(f"\nt = {s} vs t = {t}")
            print(format_report(inv2_equivalent(invs[s], invs[t])))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("values", nargs="*", type=Fraction, help="parameter values (default 1 2 1/2 3)")
    ap.add_argument("--precision", type=int, default=256)
    a = ap.parse_args()
    run(ScanConfig(values=tuple(a.values) or ScanConfig.values, prec=a.precision))
