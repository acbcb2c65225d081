"""Invariance of the packet invariant under random rescalings and shears of template germs."""

import argparse
import random
import time
from dataclasses import dataclass

from polarinv.equivalence import Decision, inv2_equivalent
from polarinv.invariant import inv2
from polarinv.options import Options
from polarinv.oracle import Scale, Shear, random_exact_scalar, template_germs, transform_germ


@dataclass(frozen=True)
class SweepConfig:
    germs: int = 20
    transforms: int = 5
    seed: int = 0
    prec: int = 256


def run(cfg: SweepConfig) -> int:
    opts = Options(prec=cfg.prec)
    rng = random.Random(cfg.seed)
    bad = 0
    t0 = time.perf_counter()
    for g in template_germs(cfg.germs, seed=cfg.seed):
        f = g.poly()
        base = inv2(f, opts)
        ok = 0
        for kind in [Scale(random_exact_scalar(rng)) for _ in range(cfg.transforms)] + [
            Shear(random_exact_scalar(rng)) for _ in range(cfg.transforms)
        ]:
            r = inv2_equivalent(base, inv2(transform_germ(f, kind), opts))
            ok += r.decision is Decision.CONSISTENT
        bad += 2 * cfg.transforms - ok
        print(f"{g.text:45s} packets={len(base.packets)} consistent {ok}/{2 * cfg.transforms}")
    print(f"inconsistent: {bad}; {time.perf_counter() - t0:.1f}s")
    return bad


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--germs", type=int, default=20)
    ap.add_argument("--transforms", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--precision", type=int, default=256)
    a = ap.parse_args()
    raise SystemExit(1 if run(SweepConfig(a.germs, a.transforms, a.seed, a.precision)) else 0)
