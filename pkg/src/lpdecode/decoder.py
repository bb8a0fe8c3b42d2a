"""LP decoding with an ML certificate, and the brute-force ML reference."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .channel import word_cost
from .code import ParityCheckMatrix
from .lp_exact import OPTIMAL, LPError, is_integral, solve
from .polytopes import build

ML_CERTIFIED = "ml-certified"
FRACTIONAL = "fractional"
DECLARED_ERROR = "declared-error"


@dataclass
class DecodeResult:
    """Outcome of one LP decode.

    ``word`` is set only for ml-certified results and ``f`` (``[i][alpha-1]``)
    only for fractional ones.  ``stats`` holds LP sizes and pivot counts.
    """

    outcome: str
    polytope: str
    objective: Fraction | None = None
    word: tuple[int, ...] | None = None
    f: list[list[Fraction]] | None = None
    stats: dict = field(default_factory=dict)
    message: str = ""
    point: list[Fraction] | None = field(default=None, repr=False)  # full LP optimum

    def dumps(self) -> str:
        lines = [f"outcome {self.outcome}", f"polytope {self.polytope}"]
        if self.objective is not None:
            lines.append(f"objective {self.objective}")
        if self.word is not None:
            lines.append("word " + " ".join(map(str, self.word)))
        if self.f is not None:
            for i, row in enumerate(self.f):
                lines.append(f"f {i} " + " ".join(str(v) for v in row))
        for key in sorted(self.stats):
            lines.append(f"stat {key} {self.stats[key]}")
        if self.message:
            lines.append(f"message {self.message}")
        return "\n".join(lines) + "\n"


def word_from_f(f_rows) -> tuple[int, ...]:
    """Symbol per position from integral indicator rows (0 where all are zero)."""
    out = []
    for row in f_rows:
        ones = [a + 1 for a, v in enumerate(row) if v == 1]
        out.append(ones[0] if len(ones) == 1 else 0)
    return tuple(out)


def lp_decode(code: ParityCheckMatrix, costs, polytope: str = "Q", bld=None) -> DecodeResult:
    """Minimise the cost over the chosen relaxation and classify the optimum.

    ``bld`` may be a prebuilt :class:`~lpdecode.polytopes.PolytopeBuild` of the
    right kind; its cost row is replaced.
    """
    kind = polytope.upper()
    try:
        if bld is None:
            bld = build(kind, code)
        lp = bld.lp.with_cost(bld.cost_vector(costs))
        sol = solve(lp)
    except (LPError, ValueError, RuntimeError) as exc:
        return DecodeResult(DECLARED_ERROR, kind, message=f"{type(exc).__name__}: {exc}")
    stats = {"variables": lp.num_variables, "constraints": lp.num_constraints, "pivots": sol.iterations}
    if sol.status != OPTIMAL:
        return DecodeResult(DECLARED_ERROR, kind, stats=stats, message=f"LP {sol.status}")
    f = bld.f_values(sol.values)
    if is_integral(sol, bld.f_columns) and all(sum(row) <= 1 for row in f):
        word = word_from_f(f)
        if not code.is_codeword(word):
            return DecodeResult(DECLARED_ERROR, kind, sol.objective, stats=stats,
                                message="integral optimum is not a codeword")
        if word_cost(costs, word) != sol.objective:
            return DecodeResult(DECLARED_ERROR, kind, sol.objective, stats=stats,
                                message="codeword cost differs from LP objective")
        return DecodeResult(ML_CERTIFIED, kind, sol.objective, word=word, stats=stats, point=sol.values)
    return DecodeResult(FRACTIONAL, kind, sol.objective, f=f, stats=stats, point=sol.values)


def integer_costs(costs, q: int) -> tuple[np.ndarray, int]:
    """``(table, scale)`` with ``table[i, c] == scale * cost of symbol c at i``."""
    fr = [[Fraction(v) for v in row] for row in costs]
    scale = 1
    for row in fr:
        for v in row:
            scale = math.lcm(scale, v.denominator)
    table = np.zeros((len(fr), q), dtype=object)
    for i, row in enumerate(fr):
        for a, v in enumerate(row):
            table[i, a + 1] = int(v * scale)
    return table, scale


def ml_brute_force(code: ParityCheckMatrix, costs) -> tuple[tuple[int, ...], Fraction]:
    """Cheapest codeword by scanning the whole codebook; ties go to the first in canonical order."""
    words = code.enumerate_codebook()
    table, scale = integer_costs(costs, code.q)
    totals = table[np.arange(code.n)[None, :], words].sum(axis=1)
    best = int(np.argmin(totals))  # first minimum
    return tuple(int(c) for c in words[best]), Fraction(int(totals[best]), scale)


def certify(result: DecodeResult, code: ParityCheckMatrix, costs) -> bool:
    """True iff the decoded word is a codeword, costs exactly the LP objective,
    and no codeword is strictly cheaper."""
    if result.outcome != ML_CERTIFIED:
        raise ValueError(f"certify needs an ml-certified result, got {result.outcome}")
    word = result.word
    if not code.is_codeword(word):
        return False
    cost = word_cost(costs, word)
    if cost != result.objective:
        return False
    _, best = ml_brute_force(code, costs)
    return best >= cost
