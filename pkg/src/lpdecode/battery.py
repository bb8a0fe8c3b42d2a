"""Seeded random instances and the cross-polytope equivalence battery.

The battery decodes every instance over Q, U and S for several rational cost
vectors and checks, per run:

* the three optimal objectives agree exactly,
* every ml-certified outcome costs the brute-force ML minimum,
* each U optimum lifts to a Q point with the same f, each Q optimum pushes
  to a U point, and the U optimum satisfies the bounds implied by the U
  constraints (f, sigma in [0, 1] and 0 <= z <= sigma),
* the size bounds of all three relaxations hold.

The report is plain text with no timings, so equal seeds give equal bytes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .code import ParityCheckMatrix
from .decoder import ML_CERTIFIED, lp_decode, ml_brute_force
from .decomposition import DecompositionError, lift_U_to_Q, push_Q_to_U
from .polytopes import (Q_KIND, S_KIND, U_KIND, build_Q, build_S, build_U,
                        count_report, derived_constraints_hold)
from .ring import Ring

SUITE_RINGS = ("Z2", "Z3", "Z4", "GF(2^2)")


def random_code(rng: np.random.Generator, ring: Ring, n_range=(3, 8), m_range=(1, 3),
                d_range=(2, 5), unit_entries: bool = True) -> ParityCheckMatrix:
    """Random parity-check matrix whose rows cover every column.

    With ``unit_entries`` the nonzero entries are drawn from the units of the
    ring, otherwise from all nonzero elements.
    """
    pool = list(ring.units) if unit_entries else ring.nonzero_elements()
    while True:
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        dmax = min(d_range[1], n)
        if m * dmax < n or dmax < d_range[0]:
            continue
        H = np.zeros((m, n), dtype=np.int64)
        for j in range(m):
            d = int(rng.integers(d_range[0], dmax + 1))
            cols = rng.choice(n, size=d, replace=False)
            H[j, cols] = rng.choice(pool, size=d)
        if (H != 0).any(axis=0).all():
            return ParityCheckMatrix.from_array(ring, H)


def random_costs(rng: np.random.Generator, n: int, q: int, span: int = 6, max_den: int = 4):
    return [[Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, max_den + 1)))
             for _ in range(q - 1)] for _ in range(n)]


@dataclass
class BatteryReport:
    seed: int
    lines: list[str] = field(default_factory=list)
    tallies: dict[str, int] = field(default_factory=dict)

    def bump(self, key: str, by: int = 1):
        self.tallies[key] = self.tallies.get(key, 0) + by

    def text(self) -> str:
        body = list(self.lines)
        body.append("summary")
        for key in sorted(self.tallies):
            body.append(f"  {key} {self.tallies[key]}")
        return "\n".join(body) + "\n"

    def count(self, key: str) -> int:
        return self.tallies.get(key, 0)


def instance_stream(seed: int, instances: int, rings=SUITE_RINGS):
    """Yield ``(index, rng)`` with one independent generator per instance."""
    children = np.random.SeedSequence(seed).spawn(instances)
    for t, child in enumerate(children):
        yield t, np.random.default_rng(child), Ring.parse(rings[t % len(rings)])


def run_battery(seed: int = 0, instances: int = 50, costs_per_instance: int = 5,
                rings=SUITE_RINGS, check_lift: bool = True, check_ml: bool = True) -> BatteryReport:
    rep = BatteryReport(seed)
    rep.lines.append(f"battery seed {seed} instances {instances} costs {costs_per_instance}")
    for t, rng, ring in instance_stream(seed, instances, rings):
        code = random_code(rng, ring)
        degs = ",".join(str(code.degree(j)) for j in range(code.m))
        rep.lines.append(f"instance {t} ring {ring} n {code.n} m {code.m} degrees {degs}")
        rep.lines.append("  H " + " | ".join(" ".join(map(str, r)) for r in code.entries))
        builds = {Q_KIND: build_Q(code), U_KIND: build_U(code), S_KIND: build_S(code)}
        for kind, bld in builds.items():
            cr = count_report(bld)
            verdict = "n/a" if not cr.applicable else ("pass" if cr.passed else "FAIL")
            extra = f" T {cr.extra['T']}/{cr.extra['T_bound']}" if "T" in cr.extra else ""
            rep.lines.append(f"  counts {kind} vars {cr.variables}/{cr.variable_bound} "
                             f"cons {cr.constraints}/{cr.constraint_bound}{extra} {verdict}")
            rep.bump(f"counts_{verdict}")
        rep.bump("instances")
        for c in range(costs_per_instance):
            costs = random_costs(rng, code.n, code.q)
            _run_cost(rep, code, builds, costs, c, check_lift, check_ml)
    return rep


def _run_cost(rep: BatteryReport, code, builds, costs, c: int, check_lift: bool, check_ml: bool):
    results = {kind: lp_decode(code, costs, kind, bld) for kind, bld in builds.items()}
    objs = {kind: r.objective for kind, r in results.items()}
    equal = len(set(objs.values())) == 1 and None not in objs.values()
    rep.bump("runs")
    rep.bump("objectives_equal" if equal else "objectives_differ")
    parts = [f"{k} {objs[k]} {results[k].outcome}" for k in (Q_KIND, U_KIND, S_KIND)]
    line = f"  cost {c} " + " ; ".join(parts) + f" ; equal {'yes' if equal else 'NO'}"
    if check_ml:
        _, best = ml_brute_force(code, costs)
        for kind, r in results.items():
            if r.outcome == ML_CERTIFIED:
                rep.bump("ml_certified")
                rep.bump("ml_match" if r.objective == best else "ml_mismatch")
        line += f" ; ml {best}"
    rep.lines.append(line)
    if not check_lift:
        return
    Ub, Qb = builds[U_KIND], builds[Q_KIND]
    u_pt, q_pt = results[U_KIND].point, results[Q_KIND].point
    if u_pt is None or q_pt is None:
        rep.bump("solve_failures")
        rep.lines.append("    lift skipped: solver did not reach an optimum")
        return
    try:
        w, _ = lift_U_to_Q(Ub, u_pt, Qb)
        same_f = all(w[Qb.f_index[key]] == u_pt[col] for key, col in Ub.f_index.items())
        lift_ok = same_f and Qb.lp.is_feasible_point(w)
        lift_msg = "ok" if lift_ok else "FAIL"
    except DecompositionError as exc:
        lift_ok, lift_msg = False, f"FAIL ({exc})"
    push = push_Q_to_U(Qb, q_pt, Ub)
    push_ok = Ub.lp.is_feasible_point(push) and all(
        push[col] == q_pt[Qb.f_index[key]] for key, col in Ub.f_index.items())
    derived_ok = derived_constraints_hold(u_pt, Ub)
    rep.bump("lift_ok" if lift_ok else "lift_fail")
    rep.bump("push_ok" if push_ok else "push_fail")
    rep.bump("derived_ok" if derived_ok else "derived_fail")
    rep.lines.append(f"    lift {lift_msg} ; push {'ok' if push_ok else 'FAIL'} ; "
                     f"derived {'ok' if derived_ok else 'FAIL'}")
