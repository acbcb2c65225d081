from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .scalars import DEFAULT_PREC, MAX_PREC, default_eps


@dataclass(frozen=True)
class Options:
    """Knobs shared by the whole pipeline."""

    prec: int = DEFAULT_PREC
    eps: Fraction | None = None  # zero-test threshold; None -> 2^(-prec/2)
    max_terms: int = 64
    window_factor: int = 4  # window cap = window_factor * total degree of f
    max_prec: int = MAX_PREC
    threads: int = 1
    seed: int = 0

    @property
    def zero_eps(self) -> Fraction:
        return self.eps if self.eps is not None else default_eps(self.prec)

    def doubled(self) -> "Options":
        return replace(self, prec=self.prec * 2)


def escalate(fn, opts: Options):
    """Run ``fn(opts)``, doubling precision on undecided zero tests."""
    from .errors import PrecisionError, PrecisionExhausted

    o = opts
    while True:
        try:
            return fn(o)
        except PrecisionError as exc:
            if o.prec * 2 > o.max_prec:
                raise PrecisionExhausted(f"undecided at {o.prec} bits: {exc}") from exc
            o = o.doubled()
