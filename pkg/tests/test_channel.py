import json
import math
from fractions import Fraction

import numpy as np
import pytest

from lpdecode.channel import (ChannelError, DiscreteTable, QarySymmetric, dumps_costs, lambda_symbol,
                              lambda_word, load_channel, loads_costs, quantize_costs, word_cost)
from lpdecode.code import ParityCheckMatrix
from lpdecode.decoder import ml_brute_force
from lpdecode.ring import Ring


def test_symmetric_lambda_closed_forms():
    q, p = 4, Fraction(1, 10)
    ch = QarySymmetric(q, p)
    lam0 = lambda_symbol(ch, 0)
    expect = math.log((1 - p) * (q - 1) / p)
    assert all(abs(v - expect) < 1e-12 for v in lam0) and expect > 0
    lam2 = lambda_symbol(ch, 2)
    assert abs(lam2[1] - math.log(p / ((q - 1) * (1 - p)))) < 1e-12
    assert lam2[0] == 0 and lam2[2] == 0


def test_flat_likelihood_gives_zero_costs():
    ch = DiscreteTable(((1, 1, 1), (2, 2, 2)))
    assert lambda_symbol(ch, 1) == [0.0, 0.0]


def test_lambda_word_blocks():
    ch = QarySymmetric(3, Fraction(1, 5))
    assert lambda_word(ch, []) == []
    assert lambda_word(ch, [1, 1, 1]) == [lambda_symbol(ch, 1)] * 3
    assert lambda_word(ch, [0, 2]) == [lambda_symbol(ch, 0), lambda_symbol(ch, 2)]


def test_word_cost():
    costs = [[Fraction(1), Fraction(2)], [Fraction(-1, 2), Fraction(3)]]
    assert word_cost(costs, [0, 0]) == 0
    assert word_cost(costs, [2, 0]) == 2
    assert word_cost(costs, [1, 1]) == Fraction(1, 2)


def test_zero_word_is_ml_for_clean_channel():
    ring = Ring.integers_mod(3)
    code = ParityCheckMatrix.from_array(ring, [[1, 1, 0, 1], [0, 1, 2, 1]])
    costs = quantize_costs(lambda_word(QarySymmetric(3, Fraction(1, 10)), [0] * 4))
    word, cost = ml_brute_force(code, costs)
    assert word == (0, 0, 0, 0) and cost == 0
    others = [word_cost(costs, w) for w in code.enumerate_codebook().tolist() if any(w)]
    assert min(others) > 0


def test_zero_likelihood_rejected():
    with pytest.raises(ChannelError):
        DiscreteTable(((1, 0), (0, 1)))
    with pytest.raises(ChannelError):
        QarySymmetric(2, Fraction(0))


def test_quantize_is_exact_dyadic():
    out = quantize_costs([[0.1, -2.5]], bits=4)
    assert out == [[Fraction(2, 16), Fraction(-40, 16)]]
    assert all(v.denominator in (1, 2, 4, 8, 16) for v in out[0])


def test_sampling_is_seeded():
    ch = QarySymmetric(4, Fraction(3, 10))
    a = [ch.sample(1, np.random.default_rng(5)) for _ in range(3)]
    b = [ch.sample(1, np.random.default_rng(5)) for _ in range(3)]
    assert a == b
    rng = np.random.default_rng(0)
    draws = [ch.sample(2, rng) for _ in range(4000)]
    assert abs(draws.count(2) / 4000 - 0.7) < 0.03


def test_text_formats(tmp_path):
    costs = [[Fraction(1, 3), Fraction(-2)], [Fraction(0), Fraction(5, 7)]]
    assert loads_costs(dumps_costs(costs), 3) == costs
    with pytest.raises(ChannelError):
        loads_costs("1 2 3\n", 3)
    p = tmp_path / "ch.json"
    p.write_text(json.dumps({"kind": "qsc", "p": "1/10"}))
    assert load_channel(p, 3) == QarySymmetric(3, Fraction(1, 10))
    p.write_text(json.dumps({"kind": "table", "table": [["1/2", "1/4"], ["1/2", "3/4"]]}))
    assert load_channel(p, 2).likelihood(1, 1) == Fraction(3, 4)
    with pytest.raises(ChannelError):
        load_channel(p, 3)
