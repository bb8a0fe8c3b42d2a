"""Memoryless q-ary-input channels and log-likelihood-ratio costs.

A cost vector holds, for each position ``i`` and each nonzero symbol
``alpha``, the value ``log(p(y_i|0) / p(y_i|alpha))``.  The cost of symbol 0
is zero by convention and is not stored.

Costs are plain nested lists: ``costs[i][alpha - 1]``.  Exact work uses
``Fraction`` entries (either supplied directly or quantised from floats
with :func:`quantize_costs`).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class QarySymmetric:
    """Output equals input with probability ``1 - p``, else a uniform other symbol."""

    q: int
    p: Fraction

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ChannelError(f"crossover probability must be in (0, 1), got {self.p}")
        if self.q < 2:
            raise ChannelError("q must be >= 2")

    @property
    def outputs(self) -> int:
        return self.q

    def likelihood(self, y: int, c: int) -> Fraction:
        return 1 - self.p if y == c else self.p / (self.q - 1)

    def sample(self, c: int, rng: np.random.Generator) -> int:
        if rng.random() >= self.p:
            return c
        other = int(rng.integers(self.q - 1))
        return other if other < c else other + 1


@dataclass(frozen=True)
class DiscreteTable:
    """Channel given by a likelihood table ``table[y][c] = p(y|c)``.

    Entries must be strictly positive; rows need not sum to one.
    """

    table: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in r) for r in self.table)
        object.__setattr__(self, "table", rows)
        if not rows:
            raise ChannelError("empty likelihood table")
        q = len(rows[0])
        if any(len(r) != q for r in rows):
            raise ChannelError("ragged likelihood table")
        if any(x <= 0 for r in rows for x in r):
            raise ChannelError("likelihoods must be strictly positive; zero likelihood is not supported")

    @property
    def q(self) -> int:
        return len(self.table[0])

    @property
    def outputs(self) -> int:
        return len(self.table)

    def likelihood(self, y: int, c: int) -> Fraction:
        return self.table[y][c]

    def sample(self, c: int, rng: np.random.Generator) -> int:
        col = np.array([float(r[c]) for r in self.table])
        return int(rng.choice(len(col), p=col / col.sum()))


def lambda_symbol(model, y: int) -> list[float]:
    """``[log(p(y|0)/p(y|alpha)) for alpha = 1..q-1]``."""
    if not 0 <= y < model.outputs:
        raise ChannelError(f"output symbol {y} out of range")
    p0 = model.likelihood(y, 0)
    out = []
    for a in range(1, model.q):
        pa = model.likelihood(y, a)
        if p0 <= 0 or pa <= 0:
            raise ChannelError(f"zero likelihood at output {y}")
        out.append(math.log(p0 / pa))
    return out


def lambda_word(model, y) -> list[list[float]]:
    return [lambda_symbol(model, int(s)) for s in y]


def quantize_costs(costs, bits: int = 20) -> list[list[Fraction]]:
    """Round float costs to multiples of ``2**-bits`` and return them as exact rationals."""
    scale = 1 << bits
    return [[Fraction(round(x * scale), scale) for x in row] for row in costs]


def word_cost(costs, word):
    """``sum_i costs[i][c_i - 1]`` with zero cost for symbol 0."""
    if len(costs) != len(word):
        raise ChannelError("cost vector and word lengths differ")
    total = 0
    for row, c in zip(costs, word):
        c = int(c)
        if c:
            total = total + row[c - 1]
    return total


def likelihood_product(model, y, word) -> Fraction:
    out = Fraction(1)
    for ys, c in zip(y, word):
        out *= model.likelihood(int(ys), int(c))
    return out


# -- text formats -------------------------------------------------------


def parse_channel(spec: dict, q: int):
    """Build a channel from a mapping with ``kind`` and ``p`` or ``table``."""
    kind = spec.get("kind")
    if kind in ("qsc", "symmetric", "q-ary-symmetric"):
        return QarySymmetric(q, Fraction(str(spec["p"])))
    if kind in ("table", "discrete-table"):
        model = DiscreteTable(tuple(tuple(Fraction(str(x)) for x in r) for r in spec["table"]))
        if model.q != q:
            raise ChannelError(f"table has {model.q} inputs, ring has {q}")
        return model
    raise ChannelError(f"unknown channel kind {kind!r}")


def load_channel(path, q: int):
    """Channel config as JSON, e.g. ``{"kind": "qsc", "p": "1/10"}``."""
    return parse_channel(json.loads(Path(path).read_text()), q)


def load_word(path) -> list[int]:
    return [int(t) for t in Path(path).read_text().split()]


def loads_costs(text: str, q: int) -> list[list[Fraction]]:
    rows = []
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        row = [Fraction(t) for t in ln.split()]
        if len(row) != q - 1:
            raise ChannelError(f"cost row {ln!r} needs {q - 1} entries")
        rows.append(row)
    return rows


def dumps_costs(costs) -> str:
    return "".join(" ".join(str(x) for x in row) + "\n" for row in costs)
