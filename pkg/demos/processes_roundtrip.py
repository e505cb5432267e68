"""Monotone processes as codes: from a predictor to a process and back."""

from fractions import Fraction as F

from seqrand.core import Dyadic, all_strings
from seqrand.predictors import DefaultRule, table_predictor
from seqrand.processes import (
    digit_aligned_process,
    distribution_to_endless_process,
    endless_process_to_distribution,
    format_process_table,
    predictor_to_process,
    reduced_encodings,
    solomonoff_eval,
)

# three target values at a node and its children, allocated as intervals
h = table_predictor({"": F(3, 8), "0": F(1, 8), "1": F(3, 16)})
f = predictor_to_process(h, 1, 1)
print(format_process_table(f.table), end="")
print("recovered:", [str(solomonoff_eval(f, y)) for y in ("", "0", "1")])

# a dyadic distribution becomes an endless process, and can be read back off it
p = table_predictor(
    {"": 1, "0": F(3, 8), "1": F(5, 8), "00": F(1, 8), "01": F(1, 4), "10": F(1, 2), "11": F(1, 8)},
    DefaultRule.CLOSED_UNDER_PREFIX,
)
e = distribution_to_endless_process(p, 2).as_enumerated()
for y in all_strings(2):
    print(f"p({y or '.'}) = {p(y)}  read back {endless_process_to_distribution(e, y, 1000)}")

# arranged carefully, every binary digit of p(y) gets its own reduced encoding
a = digit_aligned_process(p, 2)
for y in ("0", "1"):
    digits = Dyadic.from_fraction(p(y)).digits()
    print(f"{y}: digits {digits}, reduced encodings {sorted(reduced_encodings(a, y), key=len)}")
