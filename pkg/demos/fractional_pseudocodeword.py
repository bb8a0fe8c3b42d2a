"""A ternary code where the LP relaxation beats every codeword.

Decodes one cost vector over Q, U and S, shows that all three reach the same
fractional optimum, and compares it with the brute-force ML cost.
"""
from fractions import Fraction

from lpdecode import ParityCheckMatrix, Ring, lp_decode, ml_brute_force

code = ParityCheckMatrix.from_array(Ring.integers_mod(3), [[0, 2, 2], [1, 1, 1]])
costs = [[Fraction(3), Fraction(-3)], [Fraction(-3), Fraction(-2)], [Fraction(3), Fraction(1)]]

for kind in ("Q", "U", "S"):
    res = lp_decode(code, costs, kind)
    print(f"{kind}: {res.outcome:>12}  objective {res.objective}  pivots {res.stats['pivots']}")

word, best = ml_brute_force(code, costs)
print(f"ML word {word} with cost {best}")
f = lp_decode(code, costs, "Q").f
for i, row in enumerate(f):
    print(f"  f[{i}] = " + "  ".join(str(v) for v in row))
