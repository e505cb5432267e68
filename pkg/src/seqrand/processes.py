"""Monotone processes, their encodings, and the Solomonoff predictor.

A process is a monotone partial map on bit strings: if ``x`` and ``xz`` are
both in the domain then ``f(x)`` is a prefix of ``f(xz)``.  Here a process is a
finite table, optionally followed by an enumerator of further pairs.  The
Solomonoff predictor ``p_f(y)`` is the total ``2**-len(x)`` weight of the
minimal inputs whose output extends ``y``.

Constructions go the other way: given a staged predictor (or a distribution)
with dyadic values, carve the unit interval into aligned blocks so that the
blocks assigned to ``y`` weigh exactly the target value.
"""

from __future__ import annotations

import bisect
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping

from .core import (
    EMPTY,
    BudgetExceeded,
    Dyadic,
    PrefixFreeSet,
    all_strings,
    check_bits,
    format_bits,
    is_dyadic,
    parse_bits,
    sigma,
    strings_of_length,
)
from .predictors import StagedPredictor

__all__ = [
    "EncodingSet",
    "MonotoneProcess",
    "ProcessError",
    "check_monotone",
    "constant_process",
    "digit_aligned_process",
    "distribution_to_endless_process",
    "encodings",
    "endless_process_to_distribution",
    "format_process_table",
    "identity_process",
    "is_reduced_encoding",
    "min_input_lengths",
    "parse_process_table",
    "predictor_to_process",
    "reduced_encodings",
    "solomonoff_eval",
]

ZERO = Fraction(0)


class ProcessError(ValueError):
    """A table that is not a function or not monotone."""


def _lcp(a: str, b: str) -> str:
    i = 0
    for u, v in zip(a, b):
        if u != v:
            break
        i += 1
    return a[:i]


class _Graph:
    """Incrementally validated process graph.

    ``below[s]`` holds the longest common prefix of the outputs of all domain
    strings properly extending ``s``, so both monotonicity directions are
    checked in time linear in the input length.
    """

    def __init__(self):
        self.table: dict[str, str] = {}
        self.below: dict[str, str] = {}

    def conflict(self, x: str, y: str) -> tuple[str, str] | None:
        if x in self.table:
            return None if self.table[x] == y else (x, x)
        for i in range(len(x)):
            px = x[:i]
            if px in self.table and not y.startswith(self.table[px]):
                return px, x
        if x in self.below and not self.below[x].startswith(y):
            ext = next(e for e in self.table if e.startswith(x) and e != x and not self.table[e].startswith(y))
            return x, ext
        return None

    def add(self, x: str, y: str) -> None:
        bad = self.conflict(check_bits(x), check_bits(y))
        if bad is not None:
            a, b = bad
            if a == b:
                raise ProcessError(f"input {format_bits(x)} listed with two outputs")
            raise ProcessError(
                f"not monotone: f({format_bits(a)}) = {format_bits(self.table.get(a, y))} "
                f"but f({format_bits(b)}) = {format_bits(self.table.get(b, y))}"
            )
        if x in self.table:
            return
        self.table[x] = y
        for i in range(len(x)):
            s = x[:i]
            self.below[s] = _lcp(self.below[s], y) if s in self.below else y


def check_monotone(table: Mapping[str, str]) -> tuple[bool, tuple[str, str] | None]:
    """Whether ``table`` is monotone; otherwise the first offending (shorter, longer) pair."""
    for x in sorted(table, key=lambda s: (len(s), s)):
        y = table[x]
        for i in range(len(x)):
            px = x[:i]
            if px in table and not y.startswith(table[px]):
                return False, (px, x)
    return True, None


class MonotoneProcess:
    """A finite process table plus an optional enumerator of further pairs.

    ``source`` is a zero-argument callable returning a fresh iterator of
    ``(input, output)`` pairs.  Budgets count enumerated pairs.
    """

    def __init__(
        self,
        table: Mapping[str, str] | Iterable[tuple[str, str]] = (),
        source: Callable[[], Iterable[tuple[str, str]]] | None = None,
        *,
        endless_declared: bool = False,
        name: str = "process",
    ):
        items = table.items() if isinstance(table, Mapping) else table
        base = _Graph()
        for x, y in items:
            if x in base.table:
                raise ProcessError(f"duplicate input {format_bits(x)}")
            base.add(x, y)
        self._base_table = dict(base.table)
        self._source = source
        self.endless_declared = endless_declared
        self.name = name
        self.history: list[tuple[int, str, str]] = []
        self._lock = threading.Lock()
        self._graph = base
        self._consumed = 0
        self._iter: Iterator | None = None
        self._exhausted = source is None
        self._order: list[str] = list(base.table)
        # number of distinct inputs known after consuming i enumerated pairs
        self._keys_after: list[int] = [len(self._order)]

    @property
    def table(self) -> Mapping[str, str]:
        return MappingProxyType(self._base_table)

    def snapshot(self, budget: int | None = 0) -> Mapping[str, str]:
        """The table together with the first ``budget`` enumerated pairs.

        ``None`` drains the enumerator, which only terminates for finite ones.
        """
        with self._lock:
            if self._iter is None and self._source is not None:
                self._iter = iter(self._source())
            while not self._exhausted and (budget is None or self._consumed < budget):
                try:
                    x, y = next(self._iter)
                except StopIteration:
                    self._exhausted = True
                    break
                if x not in self._graph.table:
                    self._order.append(x)
                self._graph.add(x, y)
                self._consumed += 1
                self._keys_after.append(len(self._order))
            used = self._consumed if budget is None else min(budget, self._consumed)
            keys = self._order[: self._keys_after[used]]
            return MappingProxyType({x: self._graph.table[x] for x in keys})

    def consumed(self) -> int:
        return self._consumed

    def after_stage(self, stage: int) -> dict[str, str]:
        """Pairs emitted by a construction through ``stage`` (needs a history)."""
        return {x: y for s, x, y in self.history if s <= stage}

    def as_enumerated(self) -> "MonotoneProcess":
        """Same pairs delivered one at a time through an enumerator."""
        pairs = [(x, y) for _, x, y in self.history] or list(self._base_table.items())
        return MonotoneProcess(
            (), lambda: iter(pairs), endless_declared=self.endless_declared, name=self.name
        )

    def __repr__(self):
        return f"<MonotoneProcess {self.name} |table|={len(self._base_table)}>"


def _as_table(f, budget) -> Mapping[str, str]:
    if isinstance(f, MonotoneProcess):
        return f.snapshot(budget)
    return f


@dataclass(frozen=True)
class EncodingSet:
    target: str
    members: PrefixFreeSet = field(default_factory=PrefixFreeSet)

    @property
    def sigma(self) -> Fraction:
        return sigma(self.members)


def _minimal(strings: Iterable[str]) -> set[str]:
    strings = set(strings)
    return {x for x in strings if not any(x[:i] in strings for i in range(len(x)))}


def encodings(f, y: str, budget: int | None = 0) -> EncodingSet:
    """Minimal domain strings whose output extends ``y``."""
    check_bits(y)
    table = _as_table(f, budget)
    hits = [x for x, out in table.items() if out.startswith(y)]
    return EncodingSet(y, PrefixFreeSet(_minimal(hits)))


def solomonoff_eval(f, y: str, budget: int | None = 0) -> Fraction:
    """``p_f(y)`` as seen from the table and the first ``budget`` enumerated pairs."""
    return encodings(f, y, budget).sigma


def min_input_lengths(f, max_n: int, budget: int | None = 0) -> list[int | None]:
    """For n = 0..max_n, the shortest domain string with output length >= n."""
    table = _as_table(f, budget)
    out = []
    for n in range(max_n + 1):
        lens = [len(x) for x, y in table.items() if len(y) >= n]
        out.append(min(lens) if lens else None)
    return out


def _level_mass(table: Mapping[str, str], n: int) -> Fraction:
    return sigma(_minimal(x for x, y in table.items() if len(y) >= n))


# Reduced encodings


def _covered_fn(table: Mapping[str, str], y: str, horizon: int):
    memo: dict[str, bool] = {}

    def covered(z: str) -> bool:
        # some complete finite prefix-free S below z has f(zS) inside yX*
        if z in memo:
            return memo[z]
        out = table.get(z)
        if out is not None and out.startswith(y):
            res = True
        elif len(z) >= horizon:
            res = False
        else:
            res = covered(z + "0") and covered(z + "1")
        memo[z] = res
        return res

    return covered


def _default_horizon(table: Mapping[str, str]) -> int:
    return max((len(x) for x in table), default=0)


def is_reduced_encoding(f, x: str, y: str, search_depth: int, budget: int | None = 0) -> bool:
    """Whether ``x`` reduced-encodes ``y``, searching continuation sets ``search_depth`` deep."""
    check_bits(x)
    check_bits(y)
    table = _as_table(f, budget)
    covered = _covered_fn(table, y, len(x) + search_depth)
    return covered(x) and not any(covered(x[:i]) for i in range(len(x)))


def reduced_encodings(f, y: str, max_depth: int | None = None, budget: int | None = 0) -> set[str]:
    """All reduced encodings of ``y`` of length at most ``max_depth``.

    Continuation sets are searched down to ``max_depth`` (by default the
    longest domain string, which makes the scan exhaustive for the table).
    """
    check_bits(y)
    table = _as_table(f, budget)
    horizon = _default_horizon(table) if max_depth is None else max_depth
    covered = _covered_fn(table, y, horizon)
    found = set()
    stack = [EMPTY]
    while stack:
        z = stack.pop()
        if covered(z):
            found.add(z)
        elif len(z) < horizon:
            stack += [z + "1", z + "0"]
    return found


# Constructions


def _largest_digit(amount: Fraction) -> int:
    k = 0
    while Fraction(1, 1 << k) > amount:
        k += 1
    return k


def _carve(pool: list[str], amount: Fraction, where: str) -> list[str]:
    """Remove blocks of total weight ``amount`` from a sorted pool of free blocks.

    Each binary digit ``2**-k`` of the amount takes the leftmost free block of
    length ``k`` or shorter, splitting it and returning the rest to the pool.
    When fragmentation leaves no block that large, the leftmost of the largest
    remaining blocks is consumed whole.
    """
    if not is_dyadic(amount):
        raise ValueError(f"increment {amount} at {format_bits(where)} is not dyadic")
    taken = []
    rem = amount
    while rem > 0:
        if not pool:
            raise ValueError(
                f"no free mass left at {format_bits(where)}; the predictor must be "
                "stage-wise subadditive"
            )
        k = _largest_digit(rem)
        idx = next((i for i, b in enumerate(pool) if len(b) <= k), None)
        if idx is not None:
            b = pool.pop(idx)
            for j in range(len(b), k):
                bisect.insort(pool, b + "0" * (j - len(b)) + "1")
            block = b + "0" * (k - len(b))
        else:
            shortest = min(len(b) for b in pool)
            block = pool.pop(next(i for i, b in enumerate(pool) if len(b) == shortest))
        taken.append(block)
        rem -= Fraction(1, 1 << len(block))
    return taken


def _closure(graph: _Graph, history: list, stage: int) -> None:
    """Give ``x`` the output ``y`` when ``x0 -> yu`` and ``x1 -> yv`` for digits u, v."""
    changed = True
    while changed:
        changed = False
        candidates = sorted({x[:-1] for x in graph.table if x}, key=lambda s: (-len(s), s))
        for x in candidates:
            if x in graph.table:
                continue
            a, b = graph.table.get(x + "0"), graph.table.get(x + "1")
            if a and b and a[:-1] == b[:-1] and graph.conflict(x, a[:-1]) is None:
                graph.add(x, a[:-1])
                history.append((stage, x, a[:-1]))
                changed = True


def _finish(graph: _Graph, history, name, endless, closure, last_stage) -> MonotoneProcess:
    if closure:
        _closure(graph, history, last_stage + 1)
    proc = MonotoneProcess(graph.table, endless_declared=endless, name=name)
    proc.history = history
    return proc


def predictor_to_process(
    h: StagedPredictor, stages: int, depth: int, *, closure: bool = True
) -> MonotoneProcess:
    """Process whose Solomonoff predictor reproduces ``h`` stage by stage.

    Stage ``n`` raises every ``y`` with ``len(y) <= min(n, depth)`` (shortest
    first) to ``h(y, min(n, stages))`` by adding pairs ``(block, y)`` for new
    aligned blocks carved from the free halves of the parent's blocks.  The
    root carves from the whole space.  Increments must be dyadic and ``h``
    stage-wise subadditive.
    """
    graph = _Graph()
    history: list[tuple[int, str, str]] = []
    pools: dict[str | None, list[str]] = {None: [EMPTY]}
    mass: dict[str, Fraction] = {}
    last = max(stages, depth)
    for n in range(last + 1):
        s = min(n, stages)
        for y in all_strings(min(n, depth)):
            target = Fraction(h.approx(y, s))
            inc = target - mass.get(y, ZERO)
            if inc < 0:
                raise ValueError(f"h decreases at {format_bits(y)} by stage {s}")
            if inc == 0:
                continue
            parent = y[:-1] if y else None
            if parent is not None and parent not in pools:
                raise ValueError(f"{format_bits(y)} has mass but its parent has none")
            for block in _carve(pools[parent], inc, y):
                graph.add(block, y)
                history.append((n, block, y))
                pool = pools.setdefault(y, [])
                bisect.insort(pool, block + "0")
                bisect.insort(pool, block + "1")
            mass[y] = target
    return _finish(graph, history, f"process({h.name})", False, closure, last)


def _check_dyadic_distribution(p: StagedPredictor, depth: int) -> None:
    if not (p.is_distribution and p.has_limit):
        raise ValueError("a dyadic-valued exact distribution is required")
    for y in all_strings(depth):
        v = p.value(y)
        if not is_dyadic(v):
            raise ValueError(
                f"binary-computable distribution required: p({format_bits(y)}) = {v} is not dyadic"
            )


def distribution_to_endless_process(
    p: StagedPredictor, depth: int, *, closure: bool = True
) -> MonotoneProcess:
    """Endless process with ``p_f(y) = p(y)`` for every ``len(y) <= depth``.

    The blocks of ``y0`` and ``y1`` partition the blocks of ``y``, so the
    shortest input producing ``n`` output digits grows with ``n``.
    """
    _check_dyadic_distribution(p, depth)
    graph = _Graph()
    history: list[tuple[int, str, str]] = []
    pools: dict[str | None, list[str]] = {None: [EMPTY]}
    for y in all_strings(depth):
        amount = p.value(y)
        if amount == 0:
            continue
        parent = y[:-1] if y else None
        for block in _carve(pools[parent], amount, y):
            graph.add(block, y)
            history.append((len(y), block, y))
            pool = pools.setdefault(y, [])
            bisect.insort(pool, block + "0")
            bisect.insort(pool, block + "1")
    return _finish(graph, history, f"endless({p.name})", True, closure, depth)


@dataclass
class _Bundle:
    """A set of pieces packed into one aligned block of size ``2**-level``."""

    level: int
    owner: str | None = None  # set for a single piece
    parts: tuple["_Bundle", "_Bundle"] | None = None

    def place(self, block: str, out: list[tuple[str, str]]) -> None:
        if self.owner is not None:
            out.append((block, self.owner))
        else:
            self.parts[0].place(block + "0", out)
            self.parts[1].place(block + "1", out)


def _split_digits(a: Fraction, b: Fraction, y0: str, y1: str) -> dict[int, _Bundle]:
    """Group the digit pieces of ``a`` (for ``y0``) and ``b`` (for ``y1``) by the digits of ``a + b``.

    Works like binary addition from the least significant position: two items
    at one position combine into a carry bundle one position up, and a lone
    item becomes the group for that digit of the sum.
    """
    da = set(Dyadic.from_fraction(a).digits()) if a else set()
    db = set(Dyadic.from_fraction(b).digits()) if b else set()
    top = max(da | db, default=0)
    groups: dict[int, _Bundle] = {}
    carry: _Bundle | None = None
    for i in range(top, -1, -1):
        items = []
        if carry is not None:
            items.append(carry)
        if i in da:
            items.append(_Bundle(i, owner=y0))
        if i in db:
            items.append(_Bundle(i, owner=y1))
        carry = None
        if len(items) % 2 == 1:
            groups[i] = items.pop(0)
        if items:
            carry = _Bundle(i - 1, parts=(items[0], items[1]))
    if carry is not None:
        raise ValueError("children outweigh their parent")
    return groups


def digit_aligned_process(p: StagedPredictor, depth: int, *, closure: bool = True) -> MonotoneProcess:
    """Endless process giving each binary digit of ``p(y)`` one reduced encoding.

    Every ``y`` owns one aligned block of length ``i`` for each set digit
    ``2**-i`` of ``p(y)``, and the blocks of ``y0`` and ``y1`` are obtained by
    cutting the blocks of ``y`` along the carries of ``p(y0) + p(y1)``.  A block
    inherited whole from the parent is entered at the first level below it not
    already in the domain.
    """
    _check_dyadic_distribution(p, depth)
    graph = _Graph()
    history: list[tuple[int, str, str]] = []
    blocks: dict[str, dict[int, str]] = {EMPTY: {0: EMPTY}}

    def enter(block: str, y: str, stage: int):
        level = [block]
        while any(x in graph.table for x in level):
            level = [x + u for x in level for u in "01"]
        for x in level:
            graph.add(x, y)
            history.append((stage, x, y))

    enter(EMPTY, EMPTY, 0)
    for y in all_strings(depth - 1):
        if not blocks.get(y):
            continue
        y0, y1 = y + "0", y + "1"
        groups = _split_digits(p.value(y0), p.value(y1), y0, y1)
        if set(groups) != set(blocks[y]):
            raise ValueError(f"p is not additive at {format_bits(y)}")
        pieces: list[tuple[str, str]] = []
        for i, bundle in sorted(groups.items()):
            bundle.place(blocks[y][i], pieces)
        for block, owner in pieces:
            blocks.setdefault(owner, {})[len(block)] = block
            enter(block, owner, len(owner))
    return _finish(graph, history, f"aligned({p.name})", True, closure, depth)


def endless_process_to_distribution(f: MonotoneProcess, y: str, budget_cap: int) -> Dyadic:
    """Read ``p_f(y)`` exactly off an endless process.

    Pairs are consumed until the minimal inputs with at least ``len(y)``
    output digits have total weight 1; at that point no later pair can change
    ``p_f(y)``.
    """
    check_bits(y)
    if not f.endless_declared:
        raise ValueError("process is not declared endless")
    for budget in range(budget_cap + 1):
        table = f.snapshot(budget)
        if _level_mass(table, len(y)) == 1:
            return Dyadic.from_fraction(solomonoff_eval(table, y))
        if budget > f.consumed():
            break  # enumerator exhausted
    raise BudgetExceeded(
        f"level {len(y)} mass below 1 after {min(budget_cap, f.consumed())} pairs"
    )


def identity_process(depth: int | None = None) -> MonotoneProcess:
    """``f(x) = x``: a full table to ``depth``, or an endless enumeration when ``None``."""
    if depth is not None:
        return MonotoneProcess({x: x for x in all_strings(depth)}, name=f"identity({depth})")

    def source():
        n = 0
        while True:
            for x in strings_of_length(n):
                yield x, x
            n += 1

    return MonotoneProcess((), source, endless_declared=True, name="identity")


def constant_process() -> MonotoneProcess:
    """``f(x) = Λ`` for every ``x``; declared endless although it is not."""

    def source():
        n = 0
        while True:
            for x in strings_of_length(n):
                yield x, EMPTY
            n += 1

    return MonotoneProcess((), source, endless_declared=True, name="constant")


def parse_process_table(text: str) -> dict[str, str]:
    """Parse ``input<TAB>output`` lines; ``.`` is the empty string, ``#`` starts a comment."""
    table: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"line {lineno}: expected input<TAB>output")
        try:
            x, y = parse_bits(fields[0]), parse_bits(fields[1])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if x in table:
            raise ValueError(f"line {lineno}: duplicate input {format_bits(x)}")
        table[x] = y
    return table


def format_process_table(table: Mapping[str, str]) -> str:
    rows = sorted(table.items(), key=lambda kv: (len(kv[0]), kv[0]))
    return "".join(f"{format_bits(x)}\t{format_bits(y)}\n" for x, y in rows)
