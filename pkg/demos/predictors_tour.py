"""A walk through predictors, redundancy and mixtures.

Run with ``python demos/predictors_tour.py``.  Every number printed is exact
unless it is a log2 display.
"""

from fractions import Fraction as F

from seqrand.predictors import (
    Direction,
    bernoulli,
    exact_predictor,
    martingale_convert,
    mixture,
    normalize,
    redundancy,
    uniform,
)
from seqrand.conditional import conditional_bounds, extremal_distributions

# the uniform distribution never gains anything over fair coin flips
u = uniform()
print("uniform on 0110:", redundancy(u, "0110", 0).ratio)

# a coin biased towards 1 gains (3/2)^n on a run of ones
coin = bernoulli(F(3, 4))
for n in (1, 4, 8):
    r = redundancy(coin, "1" * n, 0)
    print(f"bernoulli 3/4 on 1^{n}: ratio {r.ratio}, log2 {r.render()}")

# mixing loses at most -log2(weight) against any member
mix = mixture([(F(1, 2), u), (F(1, 4), coin)])
x = "11111111"
print("mixture on 1^8:", redundancy(mix, x, 0).render(), "vs coin", redundancy(coin, x, 0).render())

# a predictor that leaks mass (4^-n) can be pushed up to a full distribution
leaky = exact_predictor(lambda s: F(1, 4 ** len(s)), name="4^-n")
full = normalize(leaky)
print("normalized values:", [str(full(s)) for s in ("", "0", "1", "00", "01")])

# the leak also makes conditional probabilities uncertain
b = conditional_bounds(leaky, "", "1", 0)
print("p(1 | empty) lies in", b.lower, "..", b.upper)
lo, hi = extremal_distributions(leaky, "", "1")
print("witnesses reach them:", lo("1"), hi("1"))

# martingales are the same information as gambling capital
m = martingale_convert(coin, Direction.TO_MARTINGALE)
print("capital after 1, 11, 110:", m("1"), m("11"), m("110"))
