"""Integer decomposition of count tables into single-parity-check words.

Given nonnegative integer tables ``x[alpha-1][i]`` over an index set of size
``N``, a count profile ``k`` and a multiplicity ``M`` with

    sum_i x[alpha-1][i] == k[alpha-1] * M      for every nonzero alpha
    sum_alpha x[alpha-1][i] <= M               for every position i

:func:`decompose` finds nonnegative integers ``w_a`` over the words ``a`` with
symbol counts ``k`` (and zero symbol sum) such that ``sum w_a == M`` and
``x[alpha-1][i] == sum of w_a over a with a_i == alpha``.  Each word is pulled
out of the tables by an integral flow, then the tables shrink by that word and
``M`` drops by one.

The same machinery turns a point of the profile polytope U into local-codeword
weights for Q (:func:`lift_U_to_Q`); :func:`push_Q_to_U` goes the other way.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .lp_exact import as_fraction
from .polytopes import Q_KIND, U_KIND, PolytopeBuild, build_Q, tau_of
from .ring import Ring

DEFAULT_MU_CAP = 10**6


class DecompositionError(ValueError):
    """Input tables violate the count constraints, or a lift is impossible."""


# ---------------------------------------------------------------------------
# max flow


@dataclass
class FlowNetwork:
    """Directed graph with integer capacities and optional lower bounds.

    Capacity ``None`` means unbounded.  Nodes are arbitrary hashables kept in
    insertion order, which fixes the order augmenting paths are searched in.
    """

    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)  # (u, v, capacity, lower)

    def add_node(self, v):
        if v not in self.nodes:
            self.nodes.append(v)

    def add_edge(self, u, v, capacity=None, lower: int = 0) -> int:
        self.add_node(u)
        self.add_node(v)
        if capacity is not None and capacity < lower:
            raise DecompositionError(f"edge {u}->{v}: capacity {capacity} below lower bound {lower}")
        self.edges.append((u, v, capacity, int(lower)))
        return len(self.edges) - 1


def _residual(net: FlowNetwork, inf: int):
    idx = {v: n for n, v in enumerate(net.nodes)}
    adj = [[] for _ in net.nodes]
    # arc = [head, residual capacity, index of reverse arc]
    arcs = []
    for u, v, cap, lower in net.edges:
        c = inf if cap is None else cap - lower
        a, b = idx[u], idx[v]
        adj[a].append(len(arcs))
        arcs.append([b, c, len(arcs) + 1])
        adj[b].append(len(arcs))
        arcs.append([a, 0, len(arcs) - 1])
    return idx, adj, arcs


def _augment(adj, arcs, s: int, t: int) -> int:
    total = 0
    while True:
        prev = [-1] * len(adj)
        prev[s] = -2
        dq = deque([s])
        while dq and prev[t] == -1:
            u = dq.popleft()
            for e in adj[u]:
                v, c, _ = arcs[e]
                if c > 0 and prev[v] == -1:
                    prev[v] = e
                    dq.append(v)
        if prev[t] == -1:
            return total
        path, v = [], t
        while v != s:
            e = prev[v]
            path.append(e)
            v = arcs[arcs[e][2]][0]
        push = min(arcs[e][1] for e in path)
        for e in path:
            arcs[e][1] -= push
            arcs[arcs[e][2]][1] += push
        total += push


def _finite_bound(net: FlowNetwork) -> int:
    return sum(c for _, _, c, _ in net.edges if c is not None) + sum(lo for *_, lo in net.edges) + 1


def max_flow_integral(net: FlowNetwork, s, t) -> tuple[int, list[int]]:
    """Maximum integral s-t flow by shortest augmenting paths.

    Lower bounds must be zero here; see :func:`feasible_flow` for the general
    case.  Returns the flow value and the flow on each edge, in edge order.
    """
    if any(lo for *_, lo in net.edges):
        raise DecompositionError("max_flow_integral needs zero lower bounds")
    inf = _finite_bound(net)
    idx, adj, arcs = _residual(net, inf)
    value = _augment(adj, arcs, idx[s], idx[t])
    flows = [arcs[2 * e + 1][1] for e in range(len(net.edges))]
    if value >= inf:
        raise DecompositionError("unbounded flow")
    return value, flows


def min_cut(net: FlowNetwork, s, t) -> tuple[set, int]:
    """Source side of a minimum cut and its capacity (after a max flow)."""
    inf = _finite_bound(net)
    idx, adj, arcs = _residual(net, inf)
    _augment(adj, arcs, idx[s], idx[t])
    seen = {idx[s]}
    dq = deque([idx[s]])
    while dq:
        u = dq.popleft()
        for e in adj[u]:
            v, c, _ = arcs[e]
            if c > 0 and v not in seen:
                seen.add(v)
                dq.append(v)
    side = {net.nodes[n] for n in seen}
    cap = 0
    for u, v, c, _ in net.edges:
        if u in side and v not in side:
            cap += inf if c is None else c
    return side, cap


def feasible_flow(net: FlowNetwork, s, t) -> list[int] | None:
    """An integral s-t flow meeting every lower bound, or ``None``.

    Standard reduction: shift each lower bound into node demands, close the
    network with an unbounded ``t -> s`` arc and saturate the demands from a
    super source.
    """
    inf = _finite_bound(net)
    idx, adj, arcs = _residual(net, inf)
    excess = [0] * len(net.nodes)
    for u, v, _, lower in net.edges:
        excess[idx[v]] += lower
        excess[idx[u]] -= lower
    n = len(net.nodes)
    S, T = n, n + 1
    adj += [[], []]

    def arc(a, b, c):
        adj[a].append(len(arcs))
        arcs.append([b, c, len(arcs) + 1])
        adj[b].append(len(arcs))
        arcs.append([a, 0, len(arcs) - 1])

    arc(idx[t], idx[s], inf)
    need = 0
    for v in range(n):
        if excess[v] > 0:
            arc(S, v, excess[v])
            need += excess[v]
        elif excess[v] < 0:
            arc(v, T, -excess[v])
    if _augment(adj, arcs, S, T) != need:
        return None
    return [lo + arcs[2 * e + 1][1] for e, (*_, lo) in enumerate(net.edges)]


# ---------------------------------------------------------------------------
# decomposition


@dataclass
class WitnessWeights:
    """Multiplicities ``w_a`` of words; iteration follows canonical word order."""

    N: int
    q: int
    weights: dict[tuple[int, ...], int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.weights.values())

    def items(self):
        return sorted(self.weights.items())

    def tables(self) -> np.ndarray:
        """Recompute ``x[alpha-1][i]`` from the weights."""
        x = np.zeros((self.q - 1, self.N), dtype=np.int64)
        for a, w in self.weights.items():
            for i, s in enumerate(a):
                if s:
                    x[s - 1, i] += w
        return x


def _as_tables(x, q: int | None = None) -> np.ndarray:
    arr = np.array(x, dtype=object)
    if arr.ndim != 2:
        raise DecompositionError("x must be a (q-1) x N table")
    if q is not None and arr.shape[0] != q - 1:
        raise DecompositionError(f"x has {arr.shape[0]} symbol rows, expected {q - 1}")
    if any(int(v) != v or v < 0 for v in arr.flat):
        raise DecompositionError("x entries must be nonnegative integers")
    return arr.astype(np.int64)


def check_tables(x, k, M: int, ring: Ring | None = None) -> np.ndarray:
    """Validate the count constraints and return ``x`` as an int array."""
    x = _as_tables(x, None if ring is None else ring.q)
    k = [int(v) for v in k]
    if len(k) != x.shape[0]:
        raise DecompositionError(f"profile has {len(k)} entries, tables have {x.shape[0]} rows")
    if M < 0 or any(v < 0 for v in k):
        raise DecompositionError("M and k must be nonnegative")
    for a, ka in enumerate(k):
        if int(x[a].sum()) != ka * M:
            raise DecompositionError(f"symbol {a + 1}: table sums to {int(x[a].sum())}, expected k*M = {ka * M}")
    over = np.flatnonzero(x.sum(axis=0) > M)
    if over.size:
        raise DecompositionError(f"position {int(over[0])} carries more than M = {M}")
    if ring is not None and M > 0:
        acc = 0
        for alpha, ka in zip(ring.nonzero_elements(), k):
            acc = ring.add(acc, ring.scalar_repeat(alpha, ka))
        if acc != 0:
            raise DecompositionError(f"profile {tuple(k)} has nonzero symbol sum; no word of it is a check word")
    return x


def assignment_network(x, k, M: int) -> FlowNetwork:
    """Symbols on the left, positions on the right.

    ``s -> alpha`` carries exactly ``k_alpha``; ``alpha -> i`` exists only where
    ``x[alpha-1][i] > 0``; ``i -> t`` has capacity 1 and lower bound 1 at
    critical positions (``sum_alpha x[.][i] == M``).
    """
    x = np.asarray(x)
    net = FlowNetwork()
    net.add_node("s")
    for a in range(x.shape[0]):
        net.add_edge("s", ("sym", a + 1), int(k[a]), lower=int(k[a]))
    for a in range(x.shape[0]):
        for i in range(x.shape[1]):
            if x[a, i] > 0:
                net.add_edge(("sym", a + 1), ("pos", i), None)
    for i in range(x.shape[1]):
        critical = M > 0 and int(x[:, i].sum()) == M
        net.add_edge(("pos", i), "t", 1, lower=1 if critical else 0)
    net.add_node("t")
    return net


def extract_assignment(x, k, M: int, ring: Ring | None = None) -> tuple[int, ...]:
    """One word ``a`` with symbol counts ``k`` that fits under ``x``.

    ``a_i == alpha`` only where ``x[alpha-1][i] > 0``, and ``a_i != 0`` at every
    critical position.
    """
    x = check_tables(x, k, M, ring)
    N = x.shape[1]
    if M == 0:
        if any(k):
            raise DecompositionError("M = 0 admits only the empty decomposition")
        return (0,) * N
    net = assignment_network(x, k, M)
    flows = feasible_flow(net, "s", "t")
    if flows is None:
        raise DecompositionError("no word satisfies the assignment conditions")
    a = [0] * N
    for (u, v, _, _), fl in zip(net.edges, flows):
        if fl and isinstance(u, tuple) and u[0] == "sym":
            a[v[1]] = u[1]
    return tuple(a)


def decompose(x, k, M: int, ring: Ring | None = None) -> WitnessWeights:
    """Peel ``M`` words off the tables, one flow at a time."""
    x = check_tables(x, k, M, ring).copy()
    q = x.shape[0] + 1
    out = WitnessWeights(x.shape[1], q)
    for m in range(M, 0, -1):
        a = extract_assignment(x, k, m, ring)
        for i, s in enumerate(a):
            if s:
                x[s - 1, i] -= 1
        out.weights[a] = out.weights.get(a, 0) + 1
    return out


def witness_search(ring: Ring, x, k, M: int, limit: int | None = None) -> dict[tuple[int, ...], int] | None:
    """Exhaustive search for weights with the decomposition property.

    Enumerates words of length N with zero symbol sum and profile ``k`` by
    scanning R^N, then picks a multiset of M of them by depth-first search
    with memoisation.  Returns one witness or ``None``.
    """
    x = _as_tables(x, ring.q)
    q, N = ring.q, x.shape[1]
    k = tuple(int(v) for v in k)
    words = []
    for a in itertools.product(range(q), repeat=N):
        acc = 0
        for s in a:
            acc = ring.add(acc, s)
        if acc == 0 and tuple(a.count(s) for s in range(1, q)) == k:
            words.append(a)
    if limit is not None and len(words) > limit:
        raise DecompositionError(f"{len(words)} candidate words exceed the search limit {limit}")

    @lru_cache(maxsize=None)
    def go(start: int, rem: tuple, m: int):
        if m == 0:
            return () if not any(rem) else None
        arr = np.array(rem).reshape(q - 1, N)
        if (arr.sum(axis=0) > m).any():
            return None
        for w in range(start, len(words)):
            a = words[w]
            if any(s and arr[s - 1, i] == 0 for i, s in enumerate(a)):
                continue
            nxt = arr.copy()
            for i, s in enumerate(a):
                if s:
                    nxt[s - 1, i] -= 1
            sub = go(w, tuple(nxt.flat), m - 1)
            if sub is not None:
                return (a,) + sub
        return None

    found = go(0, tuple(int(v) for v in x.flat), int(M))
    if found is None:
        return None
    out: dict = {}
    for a in found:
        out[a] = out.get(a, 0) + 1
    return out


# ---------------------------------------------------------------------------
# Q <-> U


def push_Q_to_U(q_build: PolytopeBuild, values, u_build: PolytopeBuild) -> list[Fraction]:
    """Map a Q point to U by summing local-word weights per count profile."""
    if q_build.kind != Q_KIND or u_build.kind != U_KIND:
        raise ValueError("push_Q_to_U expects a Q build and a U build")
    code = q_build.code
    vals = [as_fraction(v) for v in values]
    out = [Fraction(0)] * u_build.lp.num_variables
    for (i, a), col in q_build.f_index.items():
        out[u_build.f_index[(i, a)]] = vals[col]
    kap = {j: dict(zip((tuple(map(int, b)) for b in code.local_code(j)), code.local_kappas(j)))
           for j in range(code.m)}
    sig, z = u_build.aux["sigma"], u_build.aux["z"]
    for (j, b), col in q_build.aux["w"].items():
        w = vals[col]
        if not w:
            continue
        k = kap[j][b]
        if (j, k) not in sig:
            raise DecompositionError(f"profile {k} of row {j} is missing from the U build")
        out[sig[(j, k)]] += w
        for i, s in zip(code.supports[j], b):
            if s:
                out[z[(i, j, k, s)]] += w
    return out


def _lcm_den(values) -> int:
    mu = 1
    for v in values:
        mu = math.lcm(mu, Fraction(v).denominator)
    return mu


def lift_U_to_Q(u_build: PolytopeBuild, values, q_build: PolytopeBuild | None = None,
                mu_cap: int = DEFAULT_MU_CAP) -> tuple[list[Fraction], PolytopeBuild]:
    """Turn a rational U point into Q weights with the same f part.

    For each row j and profile k with ``sigma > 0`` the scaled tables
    ``mu * tau / sigma`` are decomposed into ``mu`` words over the check
    products; each word is then pulled back to local codewords by handing
    out the symbols ``beta`` of each position in blocks, in ascending order
    of ``beta``.  Every resulting word carries weight ``sigma / mu``.
    """
    if u_build.kind != U_KIND:
        raise ValueError("lift_U_to_Q expects a U build")
    code = u_build.code
    ring, q = code.ring, code.q
    if q_build is None:
        q_build = build_Q(code)
    vals = []
    for v in values:
        if isinstance(v, float):
            raise DecompositionError("lift needs exact rational values")
        vals.append(as_fraction(v))
    out = [Fraction(0)] * q_build.lp.num_variables
    for (i, a), col in u_build.f_index.items():
        out[q_build.f_index[(i, a)]] = vals[col]
    sig, z = u_build.aux["sigma"], u_build.aux["z"]
    w_index = q_build.aux["w"]
    for j, sup in enumerate(code.supports):
        h = [code.entries[j][i] for i in sup]
        for k in u_build.profiles[j]:
            s = vals[sig[(j, k)]]
            if s == 0:
                continue
            if s < 0:
                raise DecompositionError(f"negative sigma at row {j}, profile {k}")
            zz = [[vals[z[(i, j, k, beta)]] / s for beta in range(1, q)] for i in sup]
            tau = [[t / s for t in tau_of(u_build, vals, j, i, k)] for i in sup]
            mu = _lcm_den(v for row in zz + tau for v in row)
            if mu > mu_cap:
                raise DecompositionError(f"common denominator {mu} exceeds cap {mu_cap}")
            x = np.array([[int(tau[t][a] * mu) for t in range(len(sup))] for a in range(q - 1)], dtype=np.int64)
            wit = decompose(x, k, mu, ring)
            # global list of mu product words, canonical order
            prod_words = [a for a, w in wit.items() for _ in range(w)]
            local = [[0] * len(sup) for _ in prod_words]
            for t in range(len(sup)):
                counts = {beta: int(zz[t][beta - 1] * mu) for beta in range(1, q)}
                for alpha in range(q):
                    betas = [beta for beta in range(1, q) if ring.mul(beta, h[t]) == alpha]
                    rows = [ell for ell, a in enumerate(prod_words) if a[t] == alpha]
                    pos = 0
                    for beta in betas:
                        for _ in range(counts[beta]):
                            if pos >= len(rows):
                                raise DecompositionError(
                                    f"row {j}, profile {k}: mass on symbol {beta} at position {sup[t]} cannot be placed")
                            local[rows[pos]][t] = beta
                            pos += 1
                    if alpha and pos != len(rows):
                        raise DecompositionError(f"row {j}, profile {k}: tables and z disagree at position {sup[t]}")
            for b in local:
                key = (j, tuple(b))
                if key not in w_index:
                    raise DecompositionError(f"lifted word {b} is not a local codeword of row {j}")
                out[w_index[key]] += s / mu
    return out, q_build


# ---------------------------------------------------------------------------
# text formats


def loads_tables(text: str) -> tuple[Ring, np.ndarray, list[int], int]:
    """Parse ``ring``, ``M``, ``k`` and one ``x`` line per nonzero symbol."""
    ring = M = k = None
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "ring":
            ring = Ring.parse("".join(rest))
        elif key == "M":
            M = int(rest[0])
        elif key == "k":
            k = [int(t) for t in rest]
        elif key == "x":
            rows.append([int(t) for t in rest])
        else:
            raise DecompositionError(f"unknown record {key!r}")
    if ring is None or M is None or k is None:
        raise DecompositionError("tables need ring, M and k lines")
    if len({len(r) for r in rows}) > 1:
        raise DecompositionError("x rows differ in length")
    return ring, np.array(rows, dtype=np.int64).reshape(len(rows), -1), k, M


def dumps_witness(w: WitnessWeights) -> str:
    return "".join(f"w {c} " + " ".join(map(str, a)) + "\n" for a, c in w.items())
