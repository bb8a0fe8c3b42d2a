from fractions import Fraction
from itertools import product

import pytest

from lpdecode.channel import word_cost
from lpdecode.code import ParityCheckMatrix
from lpdecode.decoder import (DECLARED_ERROR, FRACTIONAL, ML_CERTIFIED, DecodeResult, certify,
                              integer_costs, lp_decode, ml_brute_force, word_from_f)
from lpdecode.ring import Ring

Z2, Z3 = Ring.integers_mod(2), Ring.integers_mod(3)
GF4 = Ring.galois_field(2, 2)

# fixture with an LP optimum strictly below the ML cost
FRAC_CODE = ParityCheckMatrix.from_array(Z3, [[0, 2, 2], [1, 1, 1]])
FRAC_COSTS = [[Fraction(3), Fraction(-3)], [Fraction(-3), Fraction(-2)], [Fraction(3), Fraction(1)]]


def _ml_reference(code, costs):
    # plain scan of all q^n words, independent of the nullspace enumeration
    best = None
    for w in product(range(code.q), repeat=code.n):
        if code.is_codeword(w):
            c = sum((Fraction(costs[i][s - 1]) for i, s in enumerate(w) if s), Fraction(0))
            if best is None or c < best[1]:
                best = (w, c)
    return best


@pytest.mark.parametrize("kind", ["Q", "U", "S"])
def test_zero_costs_give_zero_objective(kind):
    code = ParityCheckMatrix.from_array(GF4, [[1, 2, 3, 0], [0, 1, 1, 1]])
    res = lp_decode(code, [[0, 0, 0]] * 4, kind)
    assert res.objective == 0  # every codeword ties, so only the value is pinned


@pytest.mark.parametrize("kind", ["Q", "U", "S"])
def test_repetition_code(kind):
    code = ParityCheckMatrix.from_array(Z3, [[1, 2]])  # words (a, a)
    res = lp_decode(code, [[-1, 0], [0, 0]], kind)
    assert res.outcome == ML_CERTIFIED
    assert res.objective == -1 and res.word == (1, 1)
    assert certify(res, code, [[-1, 0], [0, 0]])


@pytest.mark.parametrize("kind", ["Q", "U", "S"])
def test_fractional_fixture(kind):
    res = lp_decode(FRAC_CODE, FRAC_COSTS, kind)
    assert res.outcome == FRACTIONAL
    assert res.objective == Fraction(-10, 3)
    _, ml = ml_brute_force(FRAC_CODE, FRAC_COSTS)
    assert ml == -2 and res.objective < ml
    assert res.word is None and len(res.f) == 3
    with pytest.raises(ValueError):
        certify(res, FRAC_CODE, FRAC_COSTS)


def test_stats_and_dump():
    res = lp_decode(FRAC_CODE, FRAC_COSTS, "Q")
    assert set(res.stats) == {"variables", "constraints", "pivots"}
    text = res.dumps()
    assert text.startswith("outcome fractional\npolytope Q\nobjective -10/3\n")
    assert "f 1 1/3 1/3" in text


def test_ml_matches_reference():
    import numpy as np
    rng = np.random.default_rng(5)
    for ring in (Z2, Z3, GF4):
        for _ in range(10):
            n = int(rng.integers(2, 6))
            H = rng.integers(0, ring.q, size=(2, n))
            code = ParityCheckMatrix.from_array(ring, H)
            costs = [[Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for _ in range(ring.q - 1)]
                     for _ in range(n)]
            w, c = ml_brute_force(code, costs)
            ref_w, ref_c = _ml_reference(code, costs)
            assert c == ref_c == word_cost(costs, w)
            assert w == ref_w  # both take the first minimum in lexicographic order


def test_invertible_square_code():
    code = ParityCheckMatrix.from_array(Z3, [[1, 1], [0, 2]])
    assert ml_brute_force(code, [[-4, -4], [-4, -4]]) == ((0, 0), 0)
    res = lp_decode(code, [[-4, -4], [-4, -4]], "Q")
    assert res.outcome == ML_CERTIFIED and res.word == (0, 0)


def test_certify_rejects_tampering():
    code = ParityCheckMatrix.from_array(Z3, [[1, 2]])
    costs = [[-1, 0], [0, 0]]
    res = lp_decode(code, costs)
    bad = DecodeResult(ML_CERTIFIED, "Q", res.objective, word=(2, 1))
    assert not certify(bad, code, costs)
    cheap = DecodeResult(ML_CERTIFIED, "Q", Fraction(0), word=(0, 0))
    assert certify(cheap, code, costs) is False  # (1, 1) is cheaper


def test_declared_error_on_bad_costs():
    code = ParityCheckMatrix.from_array(Z3, [[1, 2]])
    res = lp_decode(code, [[1, 2, 3], [0, 0, 0]])
    assert res.outcome == DECLARED_ERROR and res.message


def test_helpers():
    assert word_from_f([[0, 1], [0, 0], [1, 0]]) == (2, 0, 1)
    table, scale = integer_costs([[Fraction(1, 2), 1], [Fraction(-1, 3), 0]], 3)
    assert scale == 6 and table.tolist() == [[0, 3, 6], [0, -2, 0]]
