"""Sequential tests built from a predictor, and predictors built from tests."""

from fractions import Fraction as F

from seqrand import randomness_tests as rt
from seqrand.core import all_strings
from seqrand.predictors import bernoulli, dirac, uniform

# a test that suspects the all-zero sequence when viewed against fair coins
V = rt.test_from_predictor(uniform(), dirac("0"))
budget = rt.dovetail_steps(7)
for n in range(1, 7):
    print(f"critical level of 0^{n}:", V.critical_level("0" * n, budget))

# the level-m layer never carries more than 2^-m of the coin measure
for m in range(1, 5):
    print(f"mass rejected at level {m} among length-6 strings:", rt.level_mass(V, 6, m, budget))

# turn the test back into a predictor that pays f(level) times the odds
q = rt.predictor_from_test(V, uniform(), rt.WeightFunction.linear(), 8)
print("q(0^6) at stage 6:", q.approx("000000", 6), "uniform gives", F(1, 64))

# with a growth function, the boosted distribution gains g(n) where the test fires fast enough
levels = {y: V.critical_level(y, budget) for y in all_strings(6)}
g = rt.GrowthFunction.parse("table 2,2,2,2,2,2,2")
B = rt.boost(uniform(), lambda y: levels.get(y, 0), g, level_cap=8)
for y in ("000", "0000", "0101"):
    print(f"boosted {y}: {B(y)} (uniform {F(1, 2 ** len(y))}, test level {levels[y]})")

# calibration: predictions made with about 2/3 confidence come true 2/3 of the time here
rep = rt.calibration_report(bernoulli(F(2, 3)), "110" * 30, F(3, 5), F(7, 10))
print("calibration on (110)*:", rep.confirmed, "of", rep.predictions, "->", rep.verdict)
