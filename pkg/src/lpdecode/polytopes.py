"""LP relaxations for decoding: the local-codeword polytope Q, the profile
polytope U and the cascaded polytope S.

Every build puts the symbol-indicator columns ``f[i,alpha]`` first, in
position-major order, and attaches the decoding cost to those columns only.
Auxiliary columns follow, grouped by check and then by canonical local
codeword / profile order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .code import ParityCheckMatrix, all_words, syndrome_zero
from .lp_exact import LinearProgram, as_fraction

Q_KIND, U_KIND, S_KIND = "Q", "U", "S"


def _tag(t) -> str:
    return ".".join(map(str, t))


@dataclass
class PolytopeBuild:
    """An LP plus maps from polytope variables to LP columns.

    ``aux`` holds role-keyed maps:

    * Q and S: ``"w"`` maps ``(row, local word)`` to a column.
    * U: ``"sigma"`` maps ``(j, k)``; ``"z"`` maps ``(i, j, k, alpha)``.
    * S: ``"h"`` maps ``(j, l, alpha)`` for the chain symbols.
    """

    kind: str
    code: ParityCheckMatrix
    lp: LinearProgram
    f_index: dict[tuple[int, int], int]
    aux: dict[str, dict] = field(default_factory=dict)
    profiles: dict[int, list[tuple[int, ...]]] = field(default_factory=dict)
    cascade: CascadedCode | None = None
    family_rows: dict[str, int] = field(default_factory=dict)

    @property
    def f_columns(self) -> list[int]:
        return list(self.f_index.values())

    def f_values(self, values) -> list[list[Fraction]]:
        """Reshape the f part of a point to ``[i][alpha-1]``."""
        q = self.code.q
        return [[values[self.f_index[(i, a)]] for a in range(1, q)] for i in range(self.code.n)]

    def cost_vector(self, costs) -> list[Fraction]:
        """Full LP cost row for per-symbol costs ``costs[i][alpha-1]``."""
        c = [Fraction(0)] * self.lp.num_variables
        if costs is not None:
            if len(costs) != self.code.n:
                raise ValueError(f"cost vector covers {len(costs)} positions, code has {self.code.n}")
            if any(len(row) != self.code.q - 1 for row in costs):
                raise ValueError(f"every cost row needs {self.code.q - 1} entries")
            for (i, a), col in self.f_index.items():
                c[col] = as_fraction(costs[i][a - 1])
        return c


def _add_f_columns(lp: LinearProgram, n: int, q: int, costs) -> dict[tuple[int, int], int]:
    f_index = {}
    for i in range(n):
        for a in range(1, q):
            cost = 0 if costs is None else costs[i][a - 1]
            f_index[(i, a)] = lp.add_variable(f"f[{i},{a}]", "f", cost)
    return f_index


def _q_constraints(lp, code: ParityCheckMatrix, f_index, row_tag=lambda j: j):
    """Local-codeword weights for every row of ``code``: nonnegative ``w`` summing
    to one per row, and ``f`` equal to the matching ``w`` marginals.  Returns the
    ``w`` map and row counts."""
    q = code.q
    w_index = {}
    n_sum = n_marg = 0
    for j, sup in enumerate(code.supports):
        cols = []
        for b in code.local_code(j):
            b = tuple(map(int, b))
            col = lp.add_variable(f"w[{row_tag(j)},{_tag(b)}]", "w")
            w_index[(j, b)] = col
            cols.append((b, col))
        lp.add_constraint({col: 1 for _, col in cols}, "=", 1, f"w_sum[{j}]")
        n_sum += 1
        for t, i in enumerate(sup):
            for a in range(1, q):
                coeffs = {f_index[(i, a)]: 1}
                for b, col in cols:
                    if b[t] == a:
                        coeffs[col] = -1
                lp.add_constraint(coeffs, "=", 0, f"f_marginal[{j},{i},{a}]")
                n_marg += 1
    return w_index, {"w_nonneg": len(w_index), "w_sum": n_sum, "f_marginal": n_marg}


def build_Q(code: ParityCheckMatrix, costs=None) -> PolytopeBuild:
    """Relaxation with one weight per local codeword."""
    lp = LinearProgram()
    f_index = _add_f_columns(lp, code.n, code.q, costs)
    w_index, rows = _q_constraints(lp, code, f_index)
    return PolytopeBuild(Q_KIND, code, lp, f_index, {"w": w_index}, family_rows=rows)


def build_U(code: ParityCheckMatrix, costs=None, profiles: str = "image") -> PolytopeBuild:
    """Relaxation over count profiles (f split over profiles, sigma summing to one,
    profile counts, z nonnegative, z capped by sigma).

    ``profiles="image"`` uses only profiles realised by some local codeword;
    ``"formula"`` uses the closed-form profile set.
    """
    ring, q = code.ring, code.q
    lp = LinearProgram()
    f_index = _add_f_columns(lp, code.n, q, costs)
    sigma, z = {}, {}
    prof = {}
    rows = {"f_split": 0, "sigma_sum": 0, "profile_count": 0, "z_nonneg": 0, "z_cap": 0}
    for j, sup in enumerate(code.supports):
        T_j = code.tj_image(j) if profiles == "image" else code.tj_formula(j)
        prof[j] = T_j
        for k in T_j:
            sigma[(j, k)] = lp.add_variable(f"sigma[{j},{_tag(k)}]", "sigma")
            for i in sup:
                for a in range(1, q):
                    z[(i, j, k, a)] = lp.add_variable(f"z[{i},{j},{_tag(k)},{a}]", "z")
        rows["z_nonneg"] += len(T_j) * len(sup) * (q - 1)
        # f splits over the profiles
        for i in sup:
            for a in range(1, q):
                coeffs = {f_index[(i, a)]: 1}
                for k in T_j:
                    coeffs[z[(i, j, k, a)]] = -1
                lp.add_constraint(coeffs, "=", 0, f"f_split[{j},{i},{a}]")
                rows["f_split"] += 1
        # profile weights sum to one
        lp.add_constraint({sigma[(j, k)]: 1 for k in T_j}, "=", 1, f"sigma_sum[{j}]")
        rows["sigma_sum"] += 1
        for k in T_j:
            # symbol counts match the profile
            for alpha in range(1, q):
                coeffs = {sigma[(j, k)]: -k[alpha - 1]}
                for i in sup:
                    h = code.entries[j][i]
                    for beta in range(1, q):
                        if ring.mul(beta, h) == alpha:
                            coeffs[z[(i, j, k, beta)]] = 1
                lp.add_constraint(coeffs, "=", 0, f"profile_count[{j},{_tag(k)},{alpha}]")
                rows["profile_count"] += 1
            # at most one nonzero product per position
            for i in sup:
                h = code.entries[j][i]
                coeffs = {sigma[(j, k)]: -1}
                for beta in range(1, q):
                    if ring.mul(beta, h) != 0:
                        coeffs[z[(i, j, k, beta)]] = 1
                lp.add_constraint(coeffs, "<=", 0, f"z_cap[{j},{i},{_tag(k)}]")
                rows["z_cap"] += 1
    return PolytopeBuild(U_KIND, code, lp, f_index, {"sigma": sigma, "z": z}, profiles=prof, family_rows=rows)


# ---------------------------------------------------------------------------
# cascade


@dataclass(frozen=True)
class CascadedCode:
    """Parity-check matrix F of the chained code plus column/row bookkeeping.

    ``chi_index[(j, l)]`` is the F column of chain symbol ``l`` (1-based) of
    check ``j``; ``row_origin[r]`` is the original check of F row ``r``.
    """

    base: ParityCheckMatrix
    F: ParityCheckMatrix
    chi_index: dict[tuple[int, int], int]
    row_origin: tuple[int, ...]

    def rows_of(self, j: int) -> list[int]:
        return [r for r, o in enumerate(self.row_origin) if o == j]

    def extend(self, word) -> list[int]:
        """Append the chain symbols determined by ``word`` (a word of length n)."""
        ring, H = self.base.ring, self.base
        ext = [int(x) for x in word] + [0] * (self.F.n - H.n)
        for j, sup in enumerate(H.supports):
            d = len(sup)
            if d < 4:
                continue
            prods = [ring.mul(ext[i], H.entries[j][i]) for i in sup]
            chi = ring.neg(ring.add(prods[0], prods[1]))
            ext[self.chi_index[(j, 1)]] = chi
            for ell in range(1, d - 3):
                chi = ring.sub(chi, prods[ell + 1])
                ext[self.chi_index[(j, ell + 1)]] = chi
        return ext


def build_cascaded_code(code: ParityCheckMatrix) -> CascadedCode:
    """Replace each check of degree ``d_j >= 4`` by ``d_j - 2`` checks of degree 3.

    Checks with ``d_j <= 3`` are copied unchanged.
    """
    ring = code.ring
    one, minus_one = 1, ring.neg(1)
    n_chi = sum(max(0, len(s) - 3) for s in code.supports)
    width = code.n + n_chi
    rows, origin = [], []
    chi_index = {}
    nxt = code.n
    for j, sup in enumerate(code.supports):
        d = len(sup)
        H = code.entries[j]
        if d < 4:
            rows.append(list(H) + [0] * n_chi)
            origin.append(j)
            continue
        cols = []
        for ell in range(1, d - 2):
            chi_index[(j, ell)] = nxt
            cols.append(nxt)
            nxt += 1
        first = [0] * width
        first[sup[0]], first[sup[1]], first[cols[0]] = H[sup[0]], H[sup[1]], one
        rows.append(first)
        origin.append(j)
        for ell in range(1, d - 3):
            r = [0] * width
            r[cols[ell - 1]] = minus_one
            r[sup[ell + 1]] = H[sup[ell + 1]]
            r[cols[ell]] = one
            rows.append(r)
            origin.append(j)
        last = [0] * width
        last[cols[-1]] = minus_one
        last[sup[d - 2]], last[sup[d - 1]] = H[sup[d - 2]], H[sup[d - 1]]
        rows.append(last)
        origin.append(j)
    F = ParityCheckMatrix(ring, tuple(map(tuple, rows)), local_cap=code.local_cap, codebook_cap=code.codebook_cap)
    return CascadedCode(code, F, chi_index, tuple(origin))


def cascade_projection(casc: CascadedCode, j: int) -> list[tuple[int, ...]]:
    """Exhaustive projection of the chained local code of check ``j`` onto its
    original positions, as sorted tuples.

    Scans every assignment of the check's symbols and chain symbols and keeps
    those that satisfy all F rows derived from check ``j``.
    """
    ring = casc.base.ring
    sup = list(casc.base.supports[j])
    chis = sorted(c for (jj, _), c in casc.chi_index.items() if jj == j)
    cols = sup + chis
    words = all_words(ring.q, len(cols))
    ok = np.ones(len(words), dtype=bool)
    for r in casc.rows_of(j):
        row = casc.F.entries[r]
        ok &= syndrome_zero(ring, words, [row[c] for c in cols])
    proj = {tuple(map(int, w[: len(sup)])) for w in words[ok]}
    return sorted(proj)


def build_S(code: ParityCheckMatrix, costs=None) -> PolytopeBuild:
    """Local-codeword relaxation of the cascaded code; chain indicators get zero cost."""
    casc = build_cascaded_code(code)
    q = code.q
    lp = LinearProgram()
    f_index = _add_f_columns(lp, code.n, q, costs)
    h_index = {}
    col_map = dict(f_index)  # F-column symbol indicators
    for (j, ell), c in sorted(casc.chi_index.items(), key=lambda kv: kv[1]):
        for a in range(1, q):
            h_index[(j, ell, a)] = col_map[(c, a)] = lp.add_variable(f"h[{j},{ell},{a}]", "h")
    w_index, rows = _q_constraints(lp, casc.F, col_map)
    return PolytopeBuild(S_KIND, code, lp, f_index, {"w": w_index, "h": h_index, "F_cols": col_map},
                         cascade=casc, family_rows=rows)


BUILDERS = {Q_KIND: build_Q, U_KIND: build_U, S_KIND: build_S}


def build(kind: str, code: ParityCheckMatrix, costs=None) -> PolytopeBuild:
    try:
        return BUILDERS[kind.upper()](code, costs)
    except KeyError:
        raise ValueError(f"unknown polytope {kind!r}; choose from Q, U, S") from None


# ---------------------------------------------------------------------------
# points


def codeword_point(bld: PolytopeBuild, word) -> list[Fraction]:
    """Feasible point of ``bld`` whose f part is the indicator of ``word``."""
    code = bld.code
    x = [Fraction(0)] * bld.lp.num_variables
    word = [int(c) for c in word]
    for i, c in enumerate(word):
        if c:
            x[bld.f_index[(i, c)]] = Fraction(1)
    if bld.kind == Q_KIND:
        for j, sup in enumerate(code.supports):
            x[bld.aux["w"][(j, tuple(word[i] for i in sup))]] = Fraction(1)
    elif bld.kind == U_KIND:
        for j, sup in enumerate(code.supports):
            k = code.kappa(j, [word[i] for i in sup])
            x[bld.aux["sigma"][(j, k)]] = Fraction(1)
            for i in sup:
                if word[i]:
                    x[bld.aux["z"][(i, j, k, word[i])]] = Fraction(1)
    else:
        casc = bld.cascade
        ext = casc.extend(word)
        for (j, ell, a), col in bld.aux["h"].items():
            if ext[casc.chi_index[(j, ell)]] == a:
                x[col] = Fraction(1)
        for r, sup in enumerate(casc.F.supports):
            x[bld.aux["w"][(r, tuple(ext[i] for i in sup))]] = Fraction(1)
    return x


def tau_of(bld: PolytopeBuild, values, j: int, i: int, k) -> list[Fraction]:
    """``tau[alpha] = sum of z[i,j,k,beta] over beta with beta*H[j,i] == alpha``."""
    ring = bld.code.ring
    h = bld.code.entries[j][i]
    out = [Fraction(0)] * (ring.q - 1)
    for beta in range(1, ring.q):
        alpha = ring.mul(beta, h)
        if alpha:
            out[alpha - 1] += as_fraction(values[bld.aux["z"][(i, j, tuple(k), beta)]])
    return out


def derived_constraints_hold(values, bld: PolytopeBuild) -> bool:
    """Check ``0 <= f <= 1``, ``0 <= sigma <= 1`` and ``0 <= z <= sigma`` at a U point."""
    if bld.kind != U_KIND:
        raise ValueError("derived constraints are stated for U builds")
    vals = [as_fraction(v) for v in values]
    if any(not 0 <= vals[c] <= 1 for c in bld.f_index.values()):
        return False
    sig = bld.aux["sigma"]
    if any(not 0 <= vals[c] <= 1 for c in sig.values()):
        return False
    return all(0 <= vals[c] <= vals[sig[(j, k)]] for (i, j, k, a), c in bld.aux["z"].items())


# ---------------------------------------------------------------------------
# size accounting


@dataclass
class CountReport:
    kind: str
    variables: int
    lp_rows: int
    constraints: int  # lp_rows plus the auxiliary nonnegativity family
    variable_bound: int | None
    constraint_bound: int | None
    extra: dict = field(default_factory=dict)

    @property
    def applicable(self) -> bool:
        return self.variable_bound is not None

    @property
    def passed(self) -> bool:
        if not self.applicable:
            return True
        ok = self.variables <= self.variable_bound and self.constraints <= self.constraint_bound
        if "T" in self.extra:
            ok = ok and self.extra["T"] <= self.extra["T_bound"]
        return ok

    def lines(self) -> list[str]:
        vb = "n/a" if self.variable_bound is None else self.variable_bound
        cb = "n/a" if self.constraint_bound is None else self.constraint_bound
        out = [
            f"polytope {self.kind}",
            f"  variables {self.variables} bound {vb}",
            f"  constraints {self.constraints} (lp rows {self.lp_rows}) bound {cb}",
        ]
        if "T" in self.extra:
            out.append(f"  T {self.extra['T']} bound {self.extra['T_bound']}")
        out.append(f"  verdict {'n/a' if not self.applicable else ('pass' if self.passed else 'FAIL')}")
        return out


def count_report(bld: PolytopeBuild) -> CountReport:
    code = bld.code
    n, m, q, d = code.n, code.m, code.q, code.max_degree
    nv = bld.lp.num_variables
    rows = bld.lp.num_constraints
    if bld.kind == Q_KIND:
        cons = rows + bld.family_rows["w_nonneg"]
        return CountReport(Q_KIND, nv, rows, cons, n * (q - 1) + m * q ** (d - 1),
                           m * (q ** (d - 1) + d * (q - 1) + 1))
    if bld.kind == U_KIND:
        cons = rows + bld.family_rows["z_nonneg"]
        T = max(len(p) for p in bld.profiles.values())
        return CountReport(U_KIND, nv, rows, cons, n * (q - 1) + m * (d * (q - 1) + 1) * T,
                           m * (d * (q - 1) + 1) + m * ((d + 1) * (q - 1) + d) * T,
                           {"T": T, "T_bound": comb(d + q - 1, d)})
    cons = rows + bld.family_rows["w_nonneg"]
    if d < 4:
        return CountReport(S_KIND, nv, rows, cons, None, None)
    return CountReport(S_KIND, nv, rows, cons, (n + m * (d - 3)) * (q - 1) + m * (d - 2) * q**2,
                       m * (d - 2) * (q**2 + 3 * q - 2))
