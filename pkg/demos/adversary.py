"""Any computable predictor can be beaten: build a sequence it never favours."""

from fractions import Fraction as F

from seqrand.constructions import adversarial_sequence, trace_recursive_path
from seqrand.predictors import bernoulli, dirac, mixture, uniform

mix = mixture([(F(1, 2), uniform()), (F(1, 4), bernoulli(F(3, 4)))])
trace = adversarial_sequence(mix, 24)
print("sequence:", trace.sequence)
print("certificates hold:", trace.verify())

# the redundancy stays below log2(4 p(empty)) however long the sequence gets
for n in (4, 12, 24):
    lhs, rhs = trace.certificate(n)
    print(f"n={n}: 2^n p(y(n)) <= {float(lhs):.4f} < {float(rhs):.4f}")

# the other direction: a predictor that does put weight on a sequence can be followed
guess = mixture([(F(1, 2), dirac("0")), (F(1, 2), uniform())])
print("path rated above 1/4:", trace_recursive_path(guess, "", 2, 6, 10_000))
