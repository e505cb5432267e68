"""Two sequence constructions driven by a predictor.

:func:`adversarial_sequence` picks, digit by digit, a continuation the
predictor does not favour, so its redundancy on the result stays bounded.
:func:`trace_recursive_path` searches for a length-``n`` extension that the
predictor certifiably rates above ``2**-c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import EMPTY, BudgetExceeded, check_bits, strings_of_length
from .predictors import StagedPredictor

__all__ = [
    "AdversaryStep",
    "AdversaryTrace",
    "adversarial_sequence",
    "bound_lower",
    "threshold",
    "trace_recursive_path",
]

# ln 2 > 693/1000, used to certify the thresholds below
LN2_LOWER = Fraction(693, 1000)
ROUND_CAP = 64


def threshold(n: int) -> Fraction:
    """Dyadic ``t`` with ``1/2 < t < 2**(2**-n - 1)``, on ``2n + 4`` fractional bits.

    ``2**(2**-n - 1) = exp(2**-n ln 2) / 2 > (1 + 2**-n ln 2) / 2``, and the
    rounding step is far smaller than the gap to ``1/2``.
    """
    bits = 2 * n + 4
    x = (1 + LN2_LOWER / (1 << n)) / 2
    return Fraction((x.numerator << bits) // x.denominator, 1 << bits)


def bound_lower(n: int) -> Fraction:
    """``2**n * prod_{i<n} threshold(i)``, a dyadic lower bound on ``2**(2 - 2**(1-n))``."""
    out = Fraction(1 << n)
    for i in range(n):
        out *= threshold(i)
    return out


@dataclass(frozen=True)
class AdversaryStep:
    """One appended digit and the enclosures that justified it."""

    digit: str
    rounds: int
    eps: Fraction
    parent_lo: Fraction
    child_hi: Fraction
    threshold: Fraction


@dataclass
class AdversaryTrace:
    sequence: str = EMPTY
    root_lo: Fraction = Fraction(0)
    steps: list[AdversaryStep] = field(default_factory=list)

    def certificate(self, n: int) -> tuple[Fraction, Fraction]:
        """``(2**n * hi(p(y(n))), lo(p(Λ)) * bound_lower(n))`` for ``1 <= n <= len``."""
        if not 1 <= n <= len(self.steps):
            raise ValueError(f"no certificate for length {n}")
        return (1 << n) * self.steps[n - 1].child_hi, self.root_lo * bound_lower(n)

    def verify(self) -> bool:
        """Check every recorded step and the resulting redundancy bound."""
        for st in self.steps:
            if not st.child_hi < st.parent_lo * st.threshold:
                return False
        prod = Fraction(1)
        for n, st in enumerate(self.steps, 1):
            prod *= 2 * st.threshold
            if not (1 << n) * st.child_hi < self.root_lo * prod:
                return False
        return True


def adversarial_sequence(p: StagedPredictor, n_target: int) -> AdversaryTrace:
    """Build ``y`` with ``2**n p(y(n)) < p(Λ) 2**(2 - 2**(1-n))`` for ``n = 1..n_target``.

    At each step the enclosures of ``p(y)``, ``p(y0)`` and ``p(y1)`` are
    tightened (width ``2**-(len(y) + 4)``, halving per round) until some child
    is confirmed below ``threshold(len(y))`` times the parent; digit 0 wins
    ties.  Both children cannot exceed half the parent, so a genuine
    predictor always yields one.
    """
    if not p.exact:
        raise ValueError("the adversary needs a predictor with computable enclosures")
    trace = AdversaryTrace()
    y = EMPTY
    for n in range(n_target):
        t = threshold(n)
        for rnd in range(ROUND_CAP):
            eps = Fraction(1, 1 << (n + 4 + rnd))
            lo, hi = p.enclose(y, eps)
            kids = {u: p.enclose(y + u, eps) for u in "01"}
            if hi == 0 or any(k_hi == 0 for _, k_hi in kids.values()):
                raise ValueError("nonvanishing required: predictor is zero on a prefix")
            pick = next((u for u in "01" if kids[u][1] < lo * t), None)
            if pick is not None:
                if n == 0:
                    trace.root_lo = lo
                trace.steps.append(AdversaryStep(pick, rnd + 1, eps, lo, kids[pick][1], t))
                y += pick
                break
        else:
            raise BudgetExceeded(
                f"enclosures did not separate at length {n}; the predictor may not be exact"
            )
    trace.sequence = y
    return trace


def trace_recursive_path(
    p: StagedPredictor, seed: str, c: int, n: int, budget: int
) -> str | None:
    """First length-``n`` extension of ``seed`` whose staged value exceeds ``2**-c``.

    Stage ``s`` scans the extensions in lexicographic order; each value
    inspected costs one step.  ``None`` when the budget runs out first.
    """
    check_bits(seed)
    if n < len(seed):
        return None
    bar = Fraction(1, 1 << c)
    steps = 0
    stage = 0
    while True:
        for tail in strings_of_length(n - len(seed)):
            if steps >= budget:
                return None
            steps += 1
            x = seed + tail
            if p.approx(x, stage) > bar:
                return x
        stage += 1
