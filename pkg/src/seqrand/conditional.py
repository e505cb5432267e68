"""Conditional probabilities implied by a predictor.

Under the nonterminating reading a predictor only gives lower bounds on prefix
probabilities, so a conditional probability is known only up to an interval
(:func:`conditional_bounds`); :func:`extremal_distributions` builds the two
dominating distributions that attain its endpoints.  Under the halting reading
the surplus is the chance of stopping, and :func:`cond_probability` gives the
two point formulas, neither of which is a lower bound at finite stages.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .core import EMPTY, check_bits, complement_last
from .predictors import StagedPredictor, exact_predictor

__all__ = [
    "ConditionalBounds",
    "Mode",
    "StagedConditional",
    "comb",
    "cond_probability",
    "conditional_bounds",
    "extremal_distributions",
]

ZERO = Fraction(0)


def _ratio(num: Fraction, den: Fraction) -> Fraction:
    # 0/0 is read as 0
    if den == 0:
        if num != 0:
            raise ZeroDivisionError("nonzero numerator over zero denominator")
        return ZERO
    return num / den


@dataclass(frozen=True)
class ConditionalBounds:
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper <= 1:
            raise ValueError(f"inconsistent bounds [{self.lower}, {self.upper}]")


def _sibling_mass(p: StagedPredictor, x: str, n: int) -> Fraction:
    """Sum of ``p`` over the siblings hanging off the path to ``x``."""
    return sum((p.approx(complement_last(x[: i + 1]), n) for i in range(len(x))), ZERO)


def conditional_bounds(p: StagedPredictor, v: str, w: str, n: int) -> ConditionalBounds:
    """Sharp bounds on ``p'(vw) / p'(v)`` over distributions ``p'`` dominating ``p``.

    At stage ``n`` the lower bound is a lower bound of the limiting lower bound
    and the upper bound an upper bound of the limiting upper bound, so the pair
    tightens as ``n`` grows.
    """
    check_bits(v)
    check_bits(w)
    if not w:
        raise ValueError("w must be non-empty")
    vw = v + w
    den = 1 - _sibling_mass(p, v, n)
    lower = _ratio(p.approx(vw, n), den)
    upper = _ratio(1 - _sibling_mass(p, vw, n), den)
    return ConditionalBounds(lower, upper)


def comb(v: str, w: str) -> list[str]:
    """The path to ``vw`` together with every sibling hanging off it."""
    vw = v + w
    nodes = [EMPTY]
    for i in range(1, len(vw) + 1):
        nodes += [vw[:i], complement_last(vw[:i])]
    return nodes


def _completed(values: dict[str, Fraction], name: str) -> StagedPredictor:
    """Extend comb values to a distribution, sending free mass to 0-children."""

    def fn(x):
        if x in values:
            return values[x]
        # walk up to the deepest tabulated ancestor
        k = len(x)
        while x[:k] not in values:
            k -= 1
        tail = x[k:]
        return values[x[:k]] if "1" not in tail else ZERO

    return exact_predictor(fn, additive=True, unit_root=True, name=name)


def extremal_distributions(
    p: StagedPredictor, v: str, w: str
) -> tuple[StagedPredictor, StagedPredictor]:
    """Distributions attaining the lower and upper conditional bounds.

    Both dominate ``p`` on :func:`comb` ``(v, w)``.  The lower witness gives
    every path node its largest admissible mass and then drops ``vw`` to
    ``p(vw)``; the upper witness keeps every sibling at ``p`` so that the whole
    path keeps its largest admissible mass.
    """
    if not p.has_limit:
        raise ValueError("extremal distributions need exact predictor values")
    check_bits(v)
    check_bits(w)
    if not w:
        raise ValueError("w must be non-empty")
    vw = v + w
    if 1 - sum((p.value(complement_last(v[: i + 1])) for i in range(len(v))), ZERO) <= 0:
        raise ValueError("conditional bound undefined: no mass left for v")

    def path_mass(x):
        return 1 - sum((p.value(complement_last(x[: i + 1])) for i in range(len(x))), ZERO)

    upper = {EMPTY: Fraction(1)}
    for i in range(1, len(vw) + 1):
        x = vw[:i]
        upper[x] = path_mass(x)
        upper[complement_last(x)] = p.value(complement_last(x))

    lower = dict(upper)
    lower[vw] = p.value(vw)
    lower[complement_last(vw)] = upper[vw[:-1]] - p.value(vw)
    return _completed(lower, "lower_witness"), _completed(upper, "upper_witness")


class Mode(enum.Enum):
    NONTERMINATING = "nonterminating"
    HALTING = "halting"


class StagedConditional(NamedTuple):
    """A stage-``n`` conditional probability.

    ``lower_bound`` is always False: these ratios can move either way as the
    stage grows, so they certify nothing about the limit.
    """

    value: Fraction
    lower_bound: bool = False


def cond_probability(
    p: StagedPredictor, x: str, y: str, mode: Mode | str, n: int
) -> StagedConditional:
    """Probability that ``y`` follows ``x`` under either reading of ``p``.

    Nonterminating: ``p(xy) / p(x)``.  Halting: the digit-by-digit product of
    ``p(xw) / (p(xw) + p(xw'))`` where ``w'`` is ``w`` flipped, i.e. the chance
    of continuing with ``y`` given that the process keeps going.
    """
    mode = Mode(mode)
    check_bits(x)
    check_bits(y)
    if mode is Mode.NONTERMINATING:
        return StagedConditional(_ratio(p.approx(x + y, n), p.approx(x, n)))
    px = p.approx(x, n)
    value = _ratio(px, px)
    for i in range(len(y)):
        step = x + y[: i + 1]
        here = p.approx(step, n)
        value *= _ratio(here, here + p.approx(complement_last(step), n))
    return StagedConditional(value)
