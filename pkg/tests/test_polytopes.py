from fractions import Fraction

import numpy as np
import pytest

from lpdecode.battery import random_code, random_costs
from lpdecode.channel import word_cost
from lpdecode.code import ParityCheckMatrix
from lpdecode.lp_exact import OPTIMAL, UNBOUNDED, solve, verify_optimal
from lpdecode.polytopes import (build, build_cascaded_code, build_Q, build_S, build_U, cascade_projection,
                                codeword_point, count_report, derived_constraints_hold, tau_of)
from lpdecode.ring import Ring

Z2, Z3, Z4 = (Ring.integers_mod(q) for q in (2, 3, 4))
GF4 = Ring.galois_field(2, 2)
REP3 = ParityCheckMatrix.from_array(Z3, [[1, 1]])


def test_q_counts_small_example():
    r = count_report(build_Q(REP3))
    assert (r.variables, r.variable_bound) == (7, 7)
    assert r.lp_rows == 5 and r.constraint_bound == 8
    assert r.constraints == 8 and r.passed  # 5 equality rows plus 3 nonnegativity rows on w


def test_u_counts_small_example():
    b = build_U(REP3)
    assert b.profiles[0] == [(0, 0), (1, 1)]
    r = count_report(b)
    assert (r.variables, r.variable_bound) == (14, 14)
    assert r.extra == {"T": 2, "T_bound": 6}
    assert r.passed


def test_zero_cost_objective_zero():
    for kind in "QUS":
        b = build(kind, REP3)
        s = solve(b.lp)
        assert s.status == OPTIMAL and s.objective == 0


def test_tau_examples():
    b = build_U(ParityCheckMatrix.from_array(Z4, [[1, 3, 1]]))
    vals = [Fraction(0)] * b.lp.num_variables
    k = b.profiles[0][1]
    assert tau_of(b, vals, 0, 0, k) == [0, 0, 0]
    for beta in (1, 2, 3):
        vals[b.aux["z"][(0, 0, k, beta)]] = Fraction(beta, 10)
        vals[b.aux["z"][(1, 0, k, beta)]] = Fraction(beta, 10)
    assert tau_of(b, vals, 0, 0, k) == [Fraction(1, 10), Fraction(2, 10), Fraction(3, 10)]
    # entry 3 maps beta -> 3*beta: 1 -> 3, 2 -> 2, 3 -> 1
    assert tau_of(b, vals, 0, 1, k) == [Fraction(3, 10), Fraction(2, 10), Fraction(1, 10)]


def test_derived_constraints_examples():
    b = build_U(REP3)
    pt = codeword_point(b, [1, 2])
    assert b.lp.is_feasible_point(pt) and derived_constraints_hold(pt, b)
    sig = b.aux["sigma"][(0, (0, 0))]
    bad = list(pt)
    bad[sig] = Fraction(3, 2)
    assert not derived_constraints_hold(bad, b)
    assert not b.lp.is_feasible_point(bad)


@pytest.mark.parametrize("ring", [Z2, Z3, Z4, GF4], ids=str)
def test_codeword_embeddings(ring):
    rng = np.random.default_rng(ring.q)
    code = random_code(rng, ring, n_range=(4, 6), m_range=(2, 3), d_range=(2, 5))
    costs = random_costs(rng, code.n, code.q)
    builds = [build(k, code) for k in "QUS"]
    for w in code.enumerate_codebook()[:20]:
        for b in builds:
            pt = codeword_point(b, w)
            assert b.lp.is_feasible_point(pt)
            assert b.lp.with_cost(b.cost_vector(costs)).objective_value(pt) == word_cost(costs, w)


def test_cascade_shapes():
    c = build_cascaded_code(ParityCheckMatrix.from_array(Z2, [[1, 1, 1, 1]]))
    assert (c.F.m, c.F.n) == (2, 5)
    assert all(c.F.degree(r) == 3 for r in range(2))
    assert len(c.chi_index) == 1
    c = build_cascaded_code(ParityCheckMatrix.from_array(Z3, [[1, 2, 1, 0]]))
    assert c.F.entries == ((1, 2, 1, 0),) and not c.chi_index
    code = ParityCheckMatrix.from_array(GF4, [[1, 2, 3, 1, 1, 0], [0, 1, 1, 2, 3, 1]])
    c = build_cascaded_code(code)
    assert (c.F.m, c.F.n) == (3 + 3, 6 + 2 + 2)
    for j in range(2):
        rows = c.rows_of(j)
        cols = {i for r in rows for i in c.F.supports[r]}
        assert len(cols) == 2 * code.degree(j) - 3


def test_cascade_extend_gives_codewords():
    code = ParityCheckMatrix.from_array(Z4, [[1, 3, 1, 1, 3], [3, 0, 1, 1, 1]])
    c = build_cascaded_code(code)
    for w in code.enumerate_codebook():
        assert c.F.is_codeword(c.extend(w))


@pytest.mark.parametrize("ring", [Z2, Z3, Z4, GF4], ids=str)
def test_cascade_projection_equals_local_code(ring):
    rng = np.random.default_rng(40 + ring.q)
    for d in (4, 5, 6):
        row = rng.choice(ring.nonzero_elements(), size=d)
        code = ParityCheckMatrix.from_array(ring, [row])
        got = cascade_projection(build_cascaded_code(code), 0)
        assert got == sorted(tuple(map(int, b)) for b in code.local_code(0))


def test_s_count_bounds():
    for ring in (Z2, Z3, GF4):
        code = ParityCheckMatrix.from_array(ring, [[1, 1, 1, 1, 0], [0, 1, 1, 1, 1]])
        r = count_report(build_S(code))
        assert r.applicable and r.passed
    r = count_report(build_S(REP3))
    assert not r.applicable


@pytest.mark.parametrize("ring", [Z2, Z3, Z4, GF4], ids=str)
def test_objectives_agree_and_verify(ring):
    rng = np.random.default_rng(100 + ring.q)
    for _ in range(3):
        code = random_code(rng, ring, n_range=(3, 6), m_range=(1, 3), d_range=(2, 4))
        builds = [build(k, code) for k in "QUS"]
        for _ in range(3):
            costs = random_costs(rng, code.n, code.q)
            objs = set()
            for b in builds:
                lp = b.lp.with_cost(b.cost_vector(costs))
                s = solve(lp)
                assert s.status == OPTIMAL and verify_optimal(lp, s)
                objs.add(s.objective)
            assert len(objs) == 1


def test_u_profiles_formula_same_optimum_for_units():
    rng = np.random.default_rng(5)
    code = ParityCheckMatrix.from_array(Z3, [[1, 2, 1, 0], [0, 1, 1, 2]])
    bi, bf = build_U(code, profiles="image"), build_U(code, profiles="formula")
    assert bi.profiles == bf.profiles  # unit entries realise every profile
    costs = random_costs(rng, code.n, 3)
    assert solve(bi.lp.with_cost(bi.cost_vector(costs))).objective == \
        solve(bf.lp.with_cost(bf.cost_vector(costs))).objective


def test_zero_divisor_entry_breaks_u_equivalence():
    # H = [1 2] over Z4: z at symbol 2 of position 1 contributes 2*2 = 0 to the
    # check, so it escapes the profile-count and z-cap rows and f[1,2] can grow without bound in U,
    # while Q keeps every f in [0, 1].
    code = ParityCheckMatrix.from_array(Z4, [[1, 2]])
    costs = [[Fraction(0)] * 3, [Fraction(0), Fraction(-1), Fraction(0)]]
    q = build_Q(code)
    u = build_U(code)
    sq = solve(q.lp.with_cost(q.cost_vector(costs)))
    su = solve(u.lp.with_cost(u.cost_vector(costs)))
    assert sq.status == OPTIMAL and sq.objective == -1
    assert su.status == UNBOUNDED
    # with only zero-divisor entries the local code outgrows q^(d-1), and the Q size bound with it
    both = ParityCheckMatrix.from_array(Z4, [[2, 2]])
    assert len(both.local_code(0)) == 8 > 4 ** 1
    assert not count_report(build_Q(both)).passed
