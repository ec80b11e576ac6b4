"""Evaluate weighted sawtooth series with certified error.

Evaluates f(x) = sum_k a_k r^{1-k} d(r^{k-1} x) for two bases and three
weight families, printing the value, the certified error bound, and the
number of series terms the certificate needed.
"""
from fractions import Fraction

from fractalwalk import FractalFunction, WeightSequence

POINTS = [Fraction(1, 2), Fraction(1, 3), Fraction(2, 7), Fraction(355, 1024)]

for r in (2, 3):
    for label, seq, delta in (
        ("constant", WeightSequence.constant(), 1.0),
        ("power 0.5", WeightSequence.power(0.5), 0.5),
        ("odd indicator", WeightSequence.odd_indicator(), 1.0),
    ):
        f = FractalFunction(r, seq, delta)
        print(f"r={r}, weights: {label}")
        for x in POINTS:
            res = f.eval(x, eps=1e-10)
            print(f"  f({x}) = {res.value:+.12f}   +-{res.error_bound:.2e}  ({res.terms} terms)")
        print()

# the certificate is honest about what float64 can deliver: ask for more
# precision than the accumulation allows and it refuses instead of lying
f = FractalFunction(2, WeightSequence.power(0.5), 0.5)
try:
    f.eval(Fraction(1, 3), eps=1e-16)
except Exception as err:
    print(f"eps=1e-16 refused: {err}")
