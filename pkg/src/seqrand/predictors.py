"""Staged predictors, canonical families, and predictor-to-predictor constructions.

A predictor assigns each bit string ``x`` a value ``p(x) >= p(x0) + p(x1)``.
Here every predictor is carried by a *staged* lower approximation
``approx(x, n)``, nondecreasing in the stage ``n``; when the limit is known
exactly the predictor also carries it (the ``exact`` capability).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .core import (
    EMPTY,
    BudgetExceeded,
    Memo,
    all_strings,
    as_fraction,
    check_bits,
    is_dyadic,
)

__all__ = [
    "DefaultRule",
    "Direction",
    "Martingale",
    "NEG_INFINITY",
    "RedundancyValue",
    "StagedPredictor",
    "bernoulli",
    "dirac",
    "exact_predictor",
    "log2_display",
    "martingale_convert",
    "mixture",
    "normalize",
    "redundancy",
    "squeeze_eval",
    "staged_violations",
    "subadditivize",
    "surplus",
    "table_predictor",
    "uniform",
    "zero",
]

ZERO = Fraction(0)
ONE = Fraction(1)

NEG_INFINITY = float("-inf")

# Evaluation-step cap for squeeze_eval; exceeding it raises BudgetExceeded.
SQUEEZE_STEP_CAP = 2**20


class StagedPredictor:
    """A predictor given by a stage-monotone lower approximation.

    Parameters
    ----------
    approx : callable (x, n) -> Fraction
        Certified lower bound on ``p(x)`` at stage ``n``.
    limit : callable x -> Fraction, optional
        The exact value ``p(x)``.  Supplying it sets the ``exact`` capability.
    enclosure : callable (x, eps) -> (lo, hi), optional
        Interval of width at most ``eps`` containing ``p(x)``; derived from
        ``limit`` when that is given.
    additive, unit_root, dyadic_valued : bool
        Declared capabilities of the limit.
    """

    def __init__(
        self,
        approx: Callable[[str, int], Fraction],
        *,
        limit: Callable[[str], Fraction] | None = None,
        enclosure: Callable[[str, Fraction], tuple[Fraction, Fraction]] | None = None,
        additive: bool = False,
        unit_root: bool = False,
        dyadic_valued: bool = False,
        name: str = "predictor",
        conditional: Callable[[str, str], Fraction] | None = None,
    ):
        self._approx = approx
        # optional shortcut for p(xu) / p(x) when the limit factorizes
        self.conditional = conditional
        self._limit = limit
        self._enclosure = enclosure
        self.additive = additive
        self.unit_root = unit_root
        self.dyadic_valued = dyadic_valued
        self.name = name

    def __repr__(self):
        return f"<StagedPredictor {self.name} caps={sorted(self.caps)}>"

    @property
    def exact(self) -> bool:
        return self._limit is not None or self._enclosure is not None

    @property
    def has_limit(self) -> bool:
        return self._limit is not None

    @property
    def caps(self) -> frozenset[str]:
        flags = {
            "additive": self.additive,
            "unit_root": self.unit_root,
            "exact": self.exact,
            "dyadic_valued": self.dyadic_valued,
        }
        return frozenset(k for k, v in flags.items() if v)

    @property
    def is_distribution(self) -> bool:
        return self.additive and self.unit_root and self.exact

    def approx(self, x: str, n: int) -> Fraction:
        if n < 0:
            raise ValueError("stages are nonnegative")
        return self._approx(x, n)

    def value(self, x: str) -> Fraction:
        """The exact limit ``p(x)``; only for predictors with a rational limit."""
        if self._limit is None:
            raise ValueError(f"{self.name} has no exact rational limit")
        return self._limit(x)

    __call__ = value

    def enclose(self, x: str, eps: Fraction) -> tuple[Fraction, Fraction]:
        if self._limit is not None:
            v = self._limit(x)
            return v, v
        if self._enclosure is None:
            raise ValueError(f"{self.name} is not exact; no enclosure available")
        lo, hi = self._enclosure(x, Fraction(eps))
        return Fraction(lo), Fraction(hi)


def exact_predictor(
    fn: Callable[[str], Fraction],
    *,
    additive: bool = False,
    unit_root: bool = False,
    dyadic_valued: bool = False,
    name: str = "exact",
    conditional: Callable[[str, str], Fraction] | None = None,
) -> StagedPredictor:
    """Wrap a closed-form predictor; every stage returns the limit."""
    return StagedPredictor(
        lambda x, n: fn(x),
        limit=fn,
        additive=additive,
        unit_root=unit_root,
        dyadic_valued=dyadic_valued,
        name=name,
        conditional=conditional,
    )


def uniform() -> StagedPredictor:
    return exact_predictor(
        lambda x: Fraction(1, 1 << len(x)),
        additive=True,
        unit_root=True,
        dyadic_valued=True,
        name="uniform",
    )


def zero() -> StagedPredictor:
    return exact_predictor(lambda x: ZERO, dyadic_valued=True, name="zero")


def bernoulli(r) -> StagedPredictor:
    """Independent digits, each equal to 1 with probability ``r``."""
    r = as_fraction(r)
    if not 0 <= r <= 1:
        raise ValueError(f"bernoulli parameter {r} outside [0, 1]")

    def fn(x):
        ones = x.count("1")
        return r**ones * (1 - r) ** (len(x) - ones)

    return exact_predictor(
        fn,
        additive=True,
        unit_root=True,
        dyadic_valued=is_dyadic(r),
        name=f"bernoulli({r})",
        conditional=lambda x, u: r if u == "1" else 1 - r,
    )


def dirac(pattern: str) -> StagedPredictor:
    """Point mass on the infinite sequence ``pattern pattern pattern ...``."""
    check_bits(pattern)
    if not pattern:
        raise ValueError("dirac needs a non-empty pattern")

    def fn(x):
        k = len(pattern)
        return ONE if all(x[i] == pattern[i % k] for i in range(len(x))) else ZERO

    return exact_predictor(
        fn, additive=True, unit_root=True, dyadic_valued=True, name=f"dirac({pattern})"
    )


class DefaultRule(enum.Enum):
    """How a table predictor answers for strings outside its table.

    ``ZERO_OUTSIDE``: every untabulated string gets 0.
    ``CLOSED_UNDER_PREFIX``: the table must contain every prefix of each entry;
    below it the residual mass of a node flows to its 0-child, so an untabulated
    ``y0`` gets ``p(y) - p(y1)`` and an untabulated ``y1`` gets 0.
    """

    ZERO_OUTSIDE = "zero_outside"
    CLOSED_UNDER_PREFIX = "closed_under_prefix"


def table_predictor(
    entries: Mapping[str, object], default_rule: DefaultRule = DefaultRule.ZERO_OUTSIDE
) -> StagedPredictor:
    table = {check_bits(x): as_fraction(v) for x, v in entries.items()}
    default_rule = DefaultRule(default_rule)
    for x, v in table.items():
        if not 0 <= v <= 1:
            raise ValueError(f"value {v} at {x!r} outside [0, 1]")
        if x + "0" in table and x + "1" in table and table[x + "0"] + table[x + "1"] > v:
            raise ValueError(f"table violates subadditivity at {x!r}")
    if default_rule is DefaultRule.CLOSED_UNDER_PREFIX:
        if EMPTY not in table:
            raise ValueError("a prefix-closed table needs a root entry")
        for x in table:
            if x and x[:-1] not in table:
                raise ValueError(f"table is not prefix-closed: missing parent of {x!r}")
            if x and table[x] > table[x[:-1]]:
                raise ValueError(f"value at {x!r} exceeds its parent")

    memo = Memo()

    def fn(x):
        if x in table:
            return table[x]
        if default_rule is DefaultRule.ZERO_OUTSIDE or x[-1] == "1":
            return ZERO
        return memo.get(x, lambda: fn(x[:-1]) - fn(x[:-1] + "1"))

    additive = default_rule is DefaultRule.CLOSED_UNDER_PREFIX and all(
        fn(x + "0") + fn(x + "1") == v for x, v in table.items()
    )
    return exact_predictor(
        fn,
        additive=additive,
        unit_root=fn(EMPTY) == 1,
        dyadic_valued=all(is_dyadic(v) for v in table.values()),
        name="table",
    )


def surplus(p: StagedPredictor, x: str, n: int) -> Fraction:
    return p.approx(x, n) - p.approx(x + "0", n) - p.approx(x + "1", n)


def log2_display(ratio: Fraction, digits: int = 9) -> str:
    value = log2_ratio(ratio)
    return "-inf" if value == NEG_INFINITY else f"{value:.{digits}f}"


def log2_ratio(ratio: Fraction) -> float:
    ratio = Fraction(ratio)
    if ratio == 0:
        return NEG_INFINITY
    # math.log2 is accurate on arbitrarily large ints.
    return math.log2(ratio.numerator) - math.log2(ratio.denominator)


@dataclass(frozen=True)
class RedundancyValue:
    """``2**len(x) * p(x)`` kept exact; its log2 is the redundancy proper."""

    ratio: Fraction

    @property
    def log2(self) -> float:
        return log2_ratio(self.ratio)

    def render(self, digits: int = 9) -> str:
        return log2_display(self.ratio, digits)


def redundancy(p: StagedPredictor, x: str, n: int) -> RedundancyValue:
    return RedundancyValue((1 << len(x)) * p.approx(x, n))


def squeeze_eval(
    p: StagedPredictor, x: str, eps, *, max_steps: int = SQUEEZE_STEP_CAP
) -> tuple[Fraction, Fraction]:
    """Enclose the limit of an incrementable distribution to width ``eps``.

    Walks the path to ``x`` from the root, where the value is exactly 1: the
    child on the path is bounded below by its own staged value and above by
    the parent's upper bound minus the sibling's staged value.  Stages advance
    until the enclosure at ``x`` is narrow enough.
    """
    if not (p.additive and p.unit_root):
        raise ValueError("squeeze evaluation needs an additive predictor with unit root")
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    steps = 0
    best_lo, best_hi = ZERO, ONE
    n = 0
    while True:
        lo = hi = ONE
        for i, u in enumerate(x):
            prefix = x[: i + 1]
            sibling = x[:i] + ("1" if u == "0" else "0")
            lo = p.approx(prefix, n)
            hi = hi - p.approx(sibling, n)
            steps += 2
        best_lo, best_hi = max(best_lo, lo), min(best_hi, hi)
        if best_hi - best_lo <= eps:
            return best_lo, best_hi
        if steps >= max_steps:
            raise BudgetExceeded(
                f"squeeze at {x!r} still {best_hi - best_lo} wide after {steps} steps; "
                "the predictor may not be additive"
            )
        n += 1


def normalize(p: StagedPredictor) -> StagedPredictor:
    """Raise an exact predictor to a distribution dominating it.

    The root gets 1, every 1-child keeps its value, and every 0-child takes
    what remains of its parent.
    """
    if not p.has_limit:
        raise ValueError("normalize requires exact predictor values")
    memo = Memo()

    def fn(x):
        if not x:
            return ONE
        if x[-1] == "1":
            return p.value(x)
        return memo.get(x, lambda: fn(x[:-1]) - p.value(x[:-1] + "1"))

    return exact_predictor(
        fn,
        additive=True,
        unit_root=True,
        dyadic_valued=p.dyadic_valued,
        name=f"normalize({p.name})",
    )


def subadditivize(g: Callable[[str, int], Fraction], name: str = "subadditive") -> StagedPredictor:
    """Turn a stage-monotone approximation into a stage-wise subadditive one.

    Uses the recurrences::

        h(x, 0)  = 0
        h("", n) = g("", n)
        h(x0, n) = min(g(x0, n), h(x, n) - h(x1, n-1))
        h(x1, n) = min(g(x1, n), h(x, n) - h(x0, n))

    The result is nondecreasing in ``n`` and satisfies
    ``h(x, n) >= h(x0, n) + h(x1, n)``; if ``g`` underlies a predictor, ``h``
    underlies the same one.
    """
    memo = Memo()

    def h(x, n):
        if n == 0:
            return ZERO
        return memo.get((x, n), lambda: _step(x, n))

    def _step(x, n):
        if not x:
            return as_fraction(g(EMPTY, n))
        parent = x[:-1]
        if x[-1] == "0":
            return min(as_fraction(g(x, n)), h(parent, n) - h(parent + "1", n - 1))
        return min(as_fraction(g(x, n)), h(parent, n) - h(parent + "0", n))

    return StagedPredictor(h, name=name)


def mixture(family: Sequence[tuple[object, StagedPredictor]]) -> StagedPredictor:
    """Weighted sum of predictors with total weight at most 1."""
    family = [(as_fraction(w), q) for w, q in family]
    if any(w < 0 for w, _ in family):
        raise ValueError("mixture weights must be nonnegative")
    total = sum((w for w, _ in family), ZERO)
    if total > 1:
        raise ValueError(f"mixture weights sum to {total} > 1")

    def approx(x, n):
        return sum((w * q.approx(x, n) for w, q in family), ZERO)

    limit = enclosure = None
    if all(q.has_limit for _, q in family):
        def limit(x):
            return sum((w * q.value(x) for w, q in family), ZERO)
    elif all(q.exact for _, q in family):
        def enclosure(x, eps):
            parts = [q.enclose(x, eps) for _, q in family]
            return (
                sum((w * lo for (w, _), (lo, _) in zip(family, parts)), ZERO),
                sum((w * hi for (w, _), (_, hi) in zip(family, parts)), ZERO),
            )

    return StagedPredictor(
        approx,
        limit=limit,
        enclosure=enclosure,
        additive=all(q.additive for _, q in family),
        unit_root=total == 1 and all(q.unit_root for _, q in family),
        dyadic_valued=all(is_dyadic(w) and q.dyadic_valued for w, q in family),
        name="mixture(" + ", ".join(f"{w}*{q.name}" for w, q in family) + ")",
    )


def staged_violations(
    p: StagedPredictor, depth: int, stages: int, root: str = EMPTY
) -> list[tuple[str, str, int]]:
    """List (kind, x, n) where ``p`` breaks a staged-predictor invariant.

    Checks stage monotonicity, staged subadditivity and the unit bound on every
    node up to ``depth`` and every stage up to ``stages``.
    """
    bad = []
    for x in all_strings(depth, root):
        for n in range(stages + 1):
            v = p.approx(x, n)
            if not 0 <= v <= 1:
                bad.append(("range", x, n))
            if n < stages and p.approx(x, n + 1) < v:
                bad.append(("monotone", x, n))
            if p.approx(x + "0", n) + p.approx(x + "1", n) > v:
                bad.append(("subadditive", x, n))
    return bad


class Martingale:
    """Fair-odds capital process: ``value(x) == (value(x0) + value(x1)) / 2``."""

    def __init__(self, value: Callable[[str], Fraction], name: str = "martingale"):
        self._value = value
        self.name = name

    def __call__(self, x: str) -> Fraction:
        return self._value(x)

    def is_fair_at(self, x: str) -> bool:
        return 2 * self(x) == self(x + "0") + self(x + "1")

    @classmethod
    def constant(cls, c=1) -> "Martingale":
        c = as_fraction(c)
        return cls(lambda x: c, name=f"constant({c})")


class Direction(enum.Enum):
    TO_MARTINGALE = "to_martingale"
    TO_PREDICTOR = "to_predictor"


def martingale_convert(obj, direction: Direction | str):
    """Convert a distribution to its capital process or back.

    ``f(x) = 2**len(x) * p(x)`` in one direction and
    ``p(x) = 2**-len(x) * f(x) / f("")`` in the other.
    """
    direction = Direction(direction)
    if direction is Direction.TO_MARTINGALE:
        p = obj
        if not (p.additive and p.unit_root and p.has_limit):
            raise ValueError("martingale conversion needs an exact distribution")

        def f(x):
            v = p.value(x)
            if v <= 0:
                raise ValueError(f"martingales are positive; p({x!r}) = 0")
            return (1 << len(x)) * v

        return Martingale(f, name=f"martingale({p.name})")

    m = obj
    root = m(EMPTY)
    if root <= 0:
        raise ValueError("martingale must be positive at the root")
    return exact_predictor(
        lambda x: m(x) / ((1 << len(x)) * root),
        additive=True,
        unit_root=True,
        name=f"distribution({m.name})",
    )

