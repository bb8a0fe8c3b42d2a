"""Solve over U, lift the optimum to Q, push it back, and compare the f part."""
import numpy as np

from lpdecode import ParityCheckMatrix, Ring, build_Q, build_U, lift_U_to_Q, push_Q_to_U
from lpdecode.battery import random_costs
from lpdecode.lp_exact import solve

rng = np.random.default_rng(7)
code = ParityCheckMatrix.from_array(Ring.parse("GF(2^2)"), [[1, 2, 3, 1, 0], [0, 1, 1, 2, 3]])
Q, U = build_Q(code), build_U(code)
print(f"Q: {Q.lp.num_variables} variables, U: {U.lp.num_variables} variables")

for trial in range(3):
    costs = random_costs(rng, code.n, code.q)
    sol = solve(U.lp.with_cost(U.cost_vector(costs)))
    lifted, _ = lift_U_to_Q(U, sol.values, Q)
    back = push_Q_to_U(Q, lifted, U)
    same = all(back[c] == sol.values[c] for c in U.f_index.values())
    print(f"trial {trial}: objective {sol.objective}, lift feasible {Q.lp.is_feasible_point(lifted)}, "
          f"f preserved {same}")
