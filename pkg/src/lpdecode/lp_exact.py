"""Exact rational linear programming.

Problems are stated as ``minimize c.x`` subject to linear constraints with
relations ``=``, ``<=`` or ``>=`` and ``x >= 0``.  Variables may carry an
upper bound, which the solver turns into an explicit ``<=`` row.

The solver is a two-phase primal simplex.  Default pricing is steepest
edge: the reduced cost divided by the norm of the edge direction, with the
norm computed in floating point since it only steers the choice of column.
During long runs of degenerate pivots it falls back to Bland's rule, which
rules out cycling.  Largest-coefficient and pure Bland pricing are
available too.  The tableau is kept fraction-free: every row is a primitive integer equation
(divided by the gcd of its entries after each update), stored as ``int64``
while entries are small and promoted to Python integers once they are not.
No rounding happens anywhere.

Optimal solutions carry dual values, which :func:`verify_optimal` checks as
an optimality certificate without touching the tableau.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

RELATIONS = ("=", "<=", ">=")

_INT64_ENTRY_LIMIT = 2**31  # products of two such entries stay inside int64
_GCD_THRESHOLD = 2**24
STALL_LIMIT = 1000
PIVOT_RULES = ("steepest", "dantzig", "bland")


class LPError(ValueError):
    """Malformed linear program."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise LPError(f"float coefficient {x!r}; convert to Fraction explicitly")
    return Fraction(x)


@dataclass
class Variable:
    name: str
    role: str = ""
    upper: Fraction | None = None


@dataclass
class Constraint:
    coeffs: dict[int, Fraction]
    relation: str
    rhs: Fraction
    name: str = ""


@dataclass
class LinearProgram:
    """A minimisation LP over nonnegative variables with exact coefficients."""

    variables: list[Variable] = field(default_factory=list)
    cost: list[Fraction] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def add_variable(self, name: str, role: str = "", cost=0, upper=None) -> int:
        self.variables.append(Variable(name, role, None if upper is None else as_fraction(upper)))
        self.cost.append(as_fraction(cost))
        return len(self.variables) - 1

    def add_constraint(self, coeffs, relation: str, rhs=0, name: str = "") -> int:
        if relation not in RELATIONS:
            raise LPError(f"unknown relation {relation!r}")
        clean = {}
        for j, a in dict(coeffs).items():
            if not 0 <= j < len(self.variables):
                raise LPError(f"constraint {name!r} references unknown column {j}")
            a = as_fraction(a)
            if a:
                clean[int(j)] = clean.get(int(j), 0) + a
        self.constraints.append(Constraint({j: a for j, a in sorted(clean.items()) if a}, relation, as_fraction(rhs), name))
        return len(self.constraints) - 1

    def with_cost(self, cost: Sequence) -> LinearProgram:
        """Same feasible region, new objective (variables and rows are shared, not copied)."""
        if len(cost) != len(self.variables):
            raise LPError("cost length does not match the number of variables")
        return LinearProgram(self.variables, [as_fraction(c) for c in cost], self.constraints)

    def index(self, name: str) -> int:
        for j, v in enumerate(self.variables):
            if v.name == name:
                return j
        raise KeyError(name)

    def columns(self, role: str) -> list[int]:
        return [j for j, v in enumerate(self.variables) if v.role == role]

    def objective_value(self, values: Sequence) -> Fraction:
        return sum((c * as_fraction(x) for c, x in zip(self.cost, values) if c), Fraction(0))

    def residuals(self, values: Sequence) -> list[Fraction]:
        """``lhs - rhs`` for every constraint, exactly."""
        vals = [as_fraction(x) for x in values]
        return [sum((a * vals[j] for j, a in con.coeffs.items()), Fraction(0)) - con.rhs for con in self.constraints]

    def is_feasible_point(self, values: Sequence) -> bool:
        if len(values) != len(self.variables):
            return False
        vals = [as_fraction(x) for x in values]
        for v, x in zip(self.variables, vals):
            if x < 0 or (v.upper is not None and x > v.upper):
                return False
        for con, r in zip(self.constraints, self.residuals(vals)):
            if (con.relation == "=" and r != 0) or (con.relation == "<=" and r > 0) or (con.relation == ">=" and r < 0):
                return False
        return True

    # -- text format ----------------------------------------------------
    def dumps(self) -> str:
        """Line-oriented exact dump: ``var`` lines then ``con`` lines."""
        lines = [f"lp {len(self.variables)} {len(self.constraints)}"]
        for v, c in zip(self.variables, self.cost):
            ub = "-" if v.upper is None else str(v.upper)
            lines.append(f"var {v.name} {v.role or '-'} {ub} {c}")
        for con in self.constraints:
            terms = " ".join(f"{j}:{a}" for j, a in con.coeffs.items())
            lines.append(f"con {con.name or '-'} {con.relation} {con.rhs} {terms}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> LinearProgram:
        lp = cls()
        header = None
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if tok[0] == "lp":
                header = (int(tok[1]), int(tok[2]))
            elif tok[0] == "var":
                if len(tok) != 5:
                    raise LPError(f"bad var line: {raw!r}")
                lp.add_variable(tok[1], "" if tok[2] == "-" else tok[2], Fraction(tok[4]),
                                None if tok[3] == "-" else Fraction(tok[3]))
            elif tok[0] == "con":
                if len(tok) < 4:
                    raise LPError(f"bad con line: {raw!r}")
                coeffs = {}
                for t in tok[4:]:
                    j, a = t.split(":", 1)
                    coeffs[int(j)] = Fraction(a)
                lp.add_constraint(coeffs, tok[2], Fraction(tok[3]), "" if tok[1] == "-" else tok[1])
            else:
                raise LPError(f"unknown record {tok[0]!r}")
        if header is not None and header != (len(lp.variables), len(lp.constraints)):
            raise LPError(f"header declares {header}, body has {(len(lp.variables), len(lp.constraints))}")
        return lp


@dataclass
class LPSolution:
    """Solver output.

    ``duals`` has one entry per constraint followed by one per upper-bounded
    variable (in column order).  ``basis`` lists the basic columns of the
    standard form: original variables first, then one slack per inequality
    row in row order.
    """

    status: str
    values: list[Fraction] | None = None
    objective: Fraction | None = None
    basis: tuple[int, ...] = ()
    duals: list[Fraction] | None = None
    iterations: int = 0

    def value(self, j: int) -> Fraction:
        return self.values[j]


# ---------------------------------------------------------------------------
# standard form


@dataclass
class _StandardForm:
    rows: list[dict[int, int]]  # integer coefficients incl. slack
    rhs: list[int]
    row_scale: list[int]  # signed factor: scaled row = row_scale * original row
    slack_of_row: list[int | None]
    n_orig: int
    n_cols: int
    relations: list[str]


def _lcm_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


def _standard_form(lp: LinearProgram) -> _StandardForm:
    raw: list[tuple[dict[int, Fraction], str, Fraction]] = [
        (con.coeffs, con.relation, con.rhs) for con in lp.constraints
    ]
    for j, v in enumerate(lp.variables):
        if v.upper is not None:
            raw.append(({j: Fraction(1)}, "<=", v.upper))
    n = lp.num_variables
    col = n
    rows, rhs, scale, slack, rels = [], [], [], [], []
    for coeffs, rel, b in raw:
        s = _lcm_denominators(list(coeffs.values()) + [b])
        g = 0
        for a in list(coeffs.values()) + [b]:
            g = math.gcd(g, int(a * s))
        s = Fraction(s, g or 1)
        row = {j: int(a * s) for j, a in coeffs.items()}
        b_int = int(b * s)
        slack_col = None
        if rel != "=":
            slack_col = col
            row[col] = 1 if rel == "<=" else -1
            col += 1
        sign = 1
        if b_int < 0:
            sign = -1
            row = {j: -a for j, a in row.items()}
            b_int = -b_int
        rows.append(row)
        rhs.append(b_int)
        scale.append(sign * s)
        slack.append(slack_col)
        rels.append(rel)
    return _StandardForm(rows, rhs, scale, slack, n, col, rels)


# ---------------------------------------------------------------------------
# tableau


class _Tableau:
    """Fraction-free simplex tableau.

    Row ``i`` is the integer equation ``T[i, :-1] . x = T[i, -1]`` with basic
    column ``basis[i]`` having a positive coefficient.  The objective row
    holds reduced costs times the positive factor ``gscale``.
    """

    def __init__(self, T: np.ndarray, basis: list[int], row_ids: list[int], ncols: int):
        self.T = T
        self.basis = basis
        self.row_ids = row_ids  # original standard-form row of each tableau row
        self.ncols = ncols
        self.obj = None
        self.gscale = Fraction(1)
        self.iterations = 0
        self.rule = "steepest"
        self.stall_limit = STALL_LIMIT
        self._rowmax = None

    def copy(self) -> _Tableau:
        t = _Tableau(self.T.copy(), list(self.basis), list(self.row_ids), self.ncols)
        t.obj = None if self.obj is None else self.obj.copy()
        t.gscale = self.gscale
        t.iterations = self.iterations
        t.rule, t.stall_limit = self.rule, self.stall_limit
        t._rowmax = None if self._rowmax is None else self._rowmax.copy()
        return t

    def _promote(self):
        if self.T.dtype != object:
            self.T = self.T.astype(object)

    @property
    def rowmax(self) -> np.ndarray:
        if self._rowmax is None or len(self._rowmax) != self.T.shape[0]:
            self._rowmax = np.abs(self.T).max(axis=1) if self.T.size else np.zeros(0, dtype=np.int64)
        return self._rowmax

    def set_objective(self, cost: list[int]):
        """Price out the basis for an integer cost row (length ``ncols``)."""
        c = np.zeros(self.T.shape[1], dtype=object)
        c[: len(cost)] = cost
        L = 1
        for i, b in enumerate(self.basis):
            if c[b]:
                L = math.lcm(L, int(self.T[i, b]))
        obj = c * L
        for i, b in enumerate(self.basis):
            cb = c[b]
            if cb:
                obj = obj - (cb * (L // int(self.T[i, b]))) * self.T[i].astype(object)
        g = int(np.gcd.reduce(obj[:-1])) if obj[:-1].any() else 1
        g = math.gcd(g, int(obj[-1])) or 1
        obj = obj // g
        if int(np.abs(obj).max()) < _INT64_ENTRY_LIMIT:
            obj = obj.astype(np.int64)
        self.obj = obj
        self.gscale = Fraction(L, g)

    def pivot(self, p: int, q: int):
        if self.T.dtype != object and int(self.rowmax.max()) >= _INT64_ENTRY_LIMIT:
            self._promote()
        T = self.T
        colq = T[:, q]
        rows = np.flatnonzero(colq)
        rows = rows[rows != p]
        piv = T[p, q]
        prow = T[p]
        if rows.size:
            new = T[rows] * piv - np.outer(colq[rows], prow)
            if new.dtype != object:
                mx = np.abs(new).max(axis=1)
                big = np.flatnonzero(mx >= _GCD_THRESHOLD)
                if big.size:
                    g = np.gcd.reduce(new[big], axis=1)
                    g[g == 0] = 1
                    new[big] //= g[:, None]
                    mx[big] = np.abs(new[big]).max(axis=1)
                self.rowmax[rows] = mx
            else:
                g = np.array([np.gcd.reduce(r) or 1 for r in new], dtype=object)
                new = new // g[:, None]
            T[rows] = new
        oq = 0 if self.obj is None else int(self.obj[q])
        if oq:
            obj = self.obj
            if obj.dtype != object and T.dtype != object and int(np.abs(obj).max()) < _INT64_ENTRY_LIMIT:
                obj = obj * piv - oq * prow
            else:
                obj = obj.astype(object) * int(piv) - oq * prow.astype(object)
            scale = Fraction(int(piv))
            if int(np.abs(obj).max()) >= _GCD_THRESHOLD:
                g = int(np.gcd.reduce(obj)) or 1
                obj //= g
                scale /= g
            self.obj = obj
            self.gscale *= scale
        self.basis[p] = q
        self.iterations += 1

    def entering(self, allowed: int, bland: bool) -> int | None:
        seg = self.obj[:allowed]
        if bland:
            neg = np.flatnonzero(seg < 0)
            return int(neg[0]) if neg.size else None
        if self.rule == "dantzig":
            j = int(np.argmin(seg))
            return j if seg[j] < 0 else None
        neg = np.flatnonzero(seg < 0)
        if not neg.size:
            return None
        # edge norms: basic variable i moves by T[i, j] / T[i, basis[i]]
        diag = self.T[np.arange(len(self.basis)), self.basis].astype(float)
        sub = self.T[:, neg].astype(float) / diag[:, None]
        norm = np.sqrt(1.0 + (sub * sub).sum(axis=0))
        score = seg[neg].astype(float) / norm
        return int(neg[int(np.argmin(score))])

    def leaving(self, q: int) -> int | None:
        T = self.T
        col = T[:, q]
        cand = np.flatnonzero(col > 0)
        best = None
        for i in cand:
            num, den = int(T[i, -1]), int(col[i])
            if best is None:
                best = (i, num, den)
                continue
            _, bn, bd = best
            lhs, rhs = num * bd, bn * den
            if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best[0]]):
                best = (i, num, den)
        return None if best is None else int(best[0])

    def run(self, allowed: int, max_iter: int) -> str:
        # Priced pivots, switching to Bland's rule while a run of degenerate
        # pivots exceeds ``stall_limit``; Bland stays on until the
        # objective strictly improves, so the method cannot cycle.
        streak = 0
        while True:
            bland = self.rule == "bland" or streak >= self.stall_limit
            q = self.entering(allowed, bland)
            if q is None:
                return OPTIMAL
            p = self.leaving(q)
            if p is None:
                return UNBOUNDED
            if self.iterations >= max_iter:
                raise RuntimeError(f"simplex exceeded {max_iter} pivots")
            streak = streak + 1 if self.T[p, -1] == 0 else 0
            self.pivot(p, q)

    def basic_values(self) -> dict[int, Fraction]:
        return {b: Fraction(int(self.T[i, -1]), int(self.T[i, b])) for i, b in enumerate(self.basis)}


@dataclass
class _Phase1:
    sf: _StandardForm
    tab: _Tableau | None
    feasible: bool
    init_col: list[int]  # column holding e_i for each standard-form row


def _phase1(lp: LinearProgram, max_iter: int, rule: str) -> _Phase1:
    sf = _standard_form(lp)
    R = len(sf.rows)
    init_col = []
    n_art = 0
    for i in range(R):
        s = sf.slack_of_row[i]
        if s is not None and sf.rows[i][s] == 1:
            init_col.append(s)
        else:
            init_col.append(sf.n_cols + n_art)
            n_art += 1
    ncols = sf.n_cols + n_art
    T = np.zeros((R, ncols + 1), dtype=object)
    for i, row in enumerate(sf.rows):
        for j, a in row.items():
            T[i, j] = a
        T[i, init_col[i]] = 1
        T[i, -1] = sf.rhs[i]
    if all(abs(a) < _INT64_ENTRY_LIMIT for row in sf.rows for a in row.values()) and \
            all(b < _INT64_ENTRY_LIMIT for b in sf.rhs):
        T = T.astype(np.int64)
    tab = _Tableau(T, list(init_col), list(range(R)), ncols)
    tab.rule = rule
    # crash: artificials sitting at zero leave through degenerate pivots
    _drive_out_artificials(tab, sf.n_cols, zero_rhs_only=True)
    tab.set_objective([0] * sf.n_cols + [1] * n_art)
    if any(b >= sf.n_cols for b in tab.basis):
        tab.run(ncols, max_iter)
        if tab.obj[-1] != 0:  # -(sum of artificials) * gscale
            return _Phase1(sf, None, False, init_col)
        _drive_out_artificials(tab, sf.n_cols)
    return _Phase1(sf, tab, True, init_col)


def _drive_out_artificials(tab: _Tableau, n_real: int, zero_rhs_only: bool = False):
    i = 0
    while i < len(tab.basis):
        if tab.basis[i] < n_real or (zero_rhs_only and tab.T[i, -1] != 0):
            i += 1
            continue
        row = tab.T[i, :n_real]
        nz = np.flatnonzero(row)
        if nz.size == 0:
            # redundant equation
            tab.T = np.delete(tab.T, i, axis=0)
            tab._rowmax = None
            del tab.basis[i]
            del tab.row_ids[i]
            continue
        q = int(nz[0])
        if tab.T[i, q] < 0:
            tab.T[i] = -tab.T[i]
        tab.pivot(i, q)
        i += 1


def _finish(lp: LinearProgram, ph: _Phase1, cost: Sequence[Fraction], max_iter: int) -> LPSolution:
    if not ph.feasible:
        return LPSolution(INFEASIBLE)
    sf = ph.sf
    tab = ph.tab.copy()
    tab.iterations = 0
    cs = _lcm_denominators(cost)
    icost = [int(c * cs) for c in cost] + [0] * (sf.n_cols - sf.n_orig)
    tab.set_objective(icost)
    status = tab.run(sf.n_cols, max_iter)
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED, iterations=tab.iterations)
    bv = tab.basic_values()
    values = [bv.get(j, Fraction(0)) for j in range(sf.n_orig)]
    # y_i = -reduced cost of the unit column of row i, in scaled units
    duals = []
    for i in range(len(sf.rows)):
        ys = -Fraction(int(tab.obj[ph.init_col[i]])) / tab.gscale
        duals.append(ys * sf.row_scale[i] / cs)
    return LPSolution(
        OPTIMAL,
        values=values,
        objective=sum((c * x for c, x in zip(cost, values)), Fraction(0)),
        basis=tuple(sorted(tab.basis)),
        duals=duals,
        iterations=tab.iterations,
    )


def solve(lp: LinearProgram, max_iter: int = 1_000_000, rule: str = "steepest") -> LPSolution:
    """Minimise ``lp`` exactly.  Returns a vertex when optimal.

    ``rule`` is one of :data:`PIVOT_RULES`.  ``"bland"`` uses Bland's rule
    throughout; the others fall back to it on degenerate stalls.
    """
    return solve_many(lp, [lp.cost], max_iter, rule)[0]


def solve_many(lp: LinearProgram, costs: Sequence[Sequence], max_iter: int = 1_000_000,
               rule: str = "steepest") -> list[LPSolution]:
    """Solve one feasible region for several objectives, sharing phase 1."""
    if rule not in PIVOT_RULES:
        raise LPError(f"unknown pivot rule {rule!r}")
    for c in costs:
        if len(c) != lp.num_variables:
            raise LPError("cost length does not match the number of variables")
    ph = _phase1(lp, max_iter, rule)
    return [_finish(lp, ph, [as_fraction(x) for x in c], max_iter) for c in costs]


# ---------------------------------------------------------------------------
# certificates


def _bound_rows(lp: LinearProgram):
    return [j for j, v in enumerate(lp.variables) if v.upper is not None]


def dual_from_basis(lp: LinearProgram, basis: Sequence[int]) -> list[Fraction] | None:
    """Solve ``y^T A_B = c_B`` on the standard form; ``None`` if inconsistent.

    Plain Gaussian elimination over ``Fraction``; meant for small problems
    and for checking hand-made solutions.
    """
    sf = _standard_form(lp)
    R = len(sf.rows)
    cext = list(lp.cost) + [Fraction(0)] * (sf.n_cols - sf.n_orig)
    # equations: for each basic column b: sum_i y_i A[i,b] = c_b
    eqs = []
    for b in basis:
        coef = [Fraction(sf.rows[i].get(b, 0)) for i in range(R)]
        eqs.append(coef + [cext[b]])
    y = _solve_consistent(eqs, R)
    if y is None:
        return None
    return [yi * sf.row_scale[i] for i, yi in enumerate(y)]


def _solve_consistent(eqs: list[list[Fraction]], nvar: int) -> list[Fraction] | None:
    rows = [list(r) for r in eqs]
    pivots = []
    r = 0
    for c in range(nvar):
        piv = next((k for k in range(r, len(rows)) if rows[k][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    for k in range(r, len(rows)):
        if rows[k][-1] != 0:
            return None
    y = [Fraction(0)] * nvar
    for k, c in enumerate(pivots):
        y[c] = rows[k][-1]
    return y


def verify_optimal(lp: LinearProgram, sol: LPSolution) -> bool:
    """Exact optimality check of an optimal solution.

    Checks primal feasibility, dual feasibility of ``sol.duals`` (or of the
    duals implied by ``sol.basis``), complementary slackness and equality of
    primal and dual objectives.
    """
    if sol.status != OPTIMAL or sol.values is None or len(sol.values) != lp.num_variables:
        return False
    x = [as_fraction(v) for v in sol.values]
    if not lp.is_feasible_point(x):
        return False
    if sol.objective is not None and lp.objective_value(x) != sol.objective:
        return False
    y = sol.duals
    if y is None:
        y = dual_from_basis(lp, sol.basis)
        if y is None:
            return False
    ub_cols = _bound_rows(lp)
    if len(y) != lp.num_constraints + len(ub_cols):
        return False
    rels = [con.relation for con in lp.constraints] + ["<="] * len(ub_cols)
    residual = lp.residuals(x) + [x[j] - lp.variables[j].upper for j in ub_cols]
    for yi, rel, r in zip(y, rels, residual):
        if (rel == "<=" and yi > 0) or (rel == ">=" and yi < 0):
            return False
        if r != 0 and yi != 0:
            return False
    red = list(lp.cost)
    for yi, con in zip(y, lp.constraints):
        if yi:
            for j, a in con.coeffs.items():
                red[j] -= yi * a
    for yi, j in zip(y[lp.num_constraints:], ub_cols):
        red[j] -= yi
    for j, rc in enumerate(red):
        if rc < 0 or (rc != 0 and x[j] != 0):
            return False
    dual_obj = sum((yi * con.rhs for yi, con in zip(y, lp.constraints)), Fraction(0))
    dual_obj += sum((yi * lp.variables[j].upper for yi, j in zip(y[lp.num_constraints:], ub_cols)), Fraction(0))
    return dual_obj == lp.objective_value(x)


def is_integral(sol: LPSolution, columns: Iterable[int]) -> bool:
    """True iff every listed value is exactly 0 or 1."""
    return all(sol.values[j] in (0, 1) for j in columns)


def nonzero_count(sol: LPSolution) -> int:
    return sum(1 for v in sol.values if v != 0)


# -- points ---------------------------------------------------------------


def dumps_point(lp: LinearProgram, values: Sequence, skip_zero: bool = True) -> str:
    """One ``name num/den`` line per variable; zeros omitted by default."""
    lines = []
    for v, x in zip(lp.variables, values):
        x = as_fraction(x)
        if x or not skip_zero:
            lines.append(f"{v.name} {x}")
    return "\n".join(lines) + ("\n" if lines else "")


def loads_point(lp: LinearProgram, text: str) -> list[Fraction]:
    """Inverse of :func:`dumps_point`; unnamed variables are zero."""
    out = [Fraction(0)] * lp.num_variables
    names = {v.name: j for j, v in enumerate(lp.variables)}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) != 2:
            raise LPError(f"bad point line: {raw!r}")
        if tok[0] not in names:
            raise LPError(f"unknown variable {tok[0]!r}")
        out[names[tok[0]]] = Fraction(tok[1])
    return out
