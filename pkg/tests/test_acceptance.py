"""Acceptance suite: one test per criterion, each reporting a pass/fail line.

Pinned settings: battery seed 0 with 50 instances and 5 rational cost vectors
each; 240 decomposition instances from seed 11; cascade rows from seed 23.
All comparisons are exact (zero tolerance) since every value is a Fraction
or an integer.
"""
import re
import time
from collections import Counter

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from lpdecode.battery import SUITE_RINGS, run_battery
from lpdecode.code import ParityCheckMatrix, words_with_profile
from lpdecode.decomposition import decompose, witness_search
from lpdecode.polytopes import build_cascaded_code, cascade_projection
from lpdecode.ring import Ring

SEED = 0
INSTANCES = 50
COSTS_PER = 5
RUNTIME_LIMIT = 600.0  # seconds, for the whole battery
MIN_CERTIFIED = 20
DECOMP_SEED, DECOMP_INSTANCES, ORACLE_MAX_WORDS = 11, 240, 200
CASCADE_SEED, CASCADE_ROWS_PER = 23, 4


def report(number: int, ok: bool, detail: str):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    ACCEPTANCE_LINES.append(line)


@pytest.fixture(scope="module")
def suite():
    t0 = time.perf_counter()
    rep = run_battery(SEED, INSTANCES, COSTS_PER)
    return rep, time.perf_counter() - t0


def _instance_shapes(rep):
    pat = re.compile(r"instance \d+ ring (\S+) n (\d+) m (\d+) degrees ([\d,]+)")
    return [(r, int(n), int(m), [int(d) for d in ds.split(",")])
            for r, n, m, ds in (pat.match(ln).groups() for ln in rep.lines if ln.startswith("instance "))]


def test_criterion_1_equivalence(suite):
    rep, elapsed = suite
    shapes = _instance_shapes(rep)
    in_range = all(n <= 8 and m <= 3 and all(2 <= d <= 5 for d in ds) for _, n, m, ds in shapes)
    rings = {r for r, *_ in shapes}
    ok = (len(shapes) >= 50 and rep.count("runs") == len(shapes) * COSTS_PER
          and rep.count("objectives_equal") == rep.count("runs") and not rep.count("objectives_differ")
          and in_range and rings == {str(Ring.parse(r)) for r in SUITE_RINGS} and elapsed < RUNTIME_LIMIT)
    report(1, ok, f"{rep.count('objectives_equal')}/{rep.count('runs')} runs equal over "
                  f"{len(shapes)} instances, {elapsed:.1f}s")
    assert ok


def test_criterion_2_ml_certificate(suite):
    rep, _ = suite
    n_cert = rep.count("ml_certified")
    ok = n_cert >= MIN_CERTIFIED and rep.count("ml_match") == n_cert and not rep.count("ml_mismatch")
    report(2, ok, f"{rep.count('ml_match')}/{n_cert} certified outcomes over Q, U and S match brute force")
    assert ok


def _feasible_tables(rng, ring, N, M):
    """Tables built from M random profile-k words, so a witness exists by construction."""
    q = ring.q
    while True:
        k = [0] * (q - 1)
        for _ in range(int(rng.integers(0, N + 1))):
            k[int(rng.integers(q - 1))] += 1
        words = words_with_profile(ring, N, k)
        if words:
            break
    x = np.zeros((q - 1, N), dtype=np.int64)
    for _ in range(M):
        w = words[int(rng.integers(len(words)))]
        for i, s in enumerate(w):
            if s:
                x[s - 1, i] += 1
    return x, k, len(words)


def test_criterion_3_decomposition():
    rng = np.random.default_rng(DECOMP_SEED)
    rings = [Ring.parse(r) for r in ("Z2", "Z3", "Z4", "Z5", "GF(2^2)")]
    good = oracle_checked = oracle_agree = 0
    for t in range(DECOMP_INSTANCES):
        ring = rings[t % len(rings)]
        N, M = int(rng.integers(1, 7)), int(rng.integers(0, 13))
        x, k, size = _feasible_tables(rng, ring, N, M)
        w = decompose(x, k, M, ring)
        sum_ok = w.total == M and all(isinstance(c, int) and c > 0 for c in w.weights.values())
        prof_ok = all(tuple(Counter(a)[s] for s in range(1, ring.q)) == tuple(k) for a in w.weights)
        zero_ok = all(_ring_sum(ring, a) == 0 for a in w.weights)
        table_ok = (w.tables() == x).all()
        good += sum_ok and prof_ok and zero_ok and table_ok
        if size <= ORACLE_MAX_WORDS:
            oracle_checked += 1
            found = witness_search(ring, x, k, M)
            oracle_agree += found is not None and sum(found.values()) == M
    ok = good == DECOMP_INSTANCES and oracle_agree == oracle_checked and oracle_checked > 0
    report(3, ok, f"{good}/{DECOMP_INSTANCES} decompositions exact, "
                  f"{oracle_agree}/{oracle_checked} confirmed by exhaustive search")
    assert ok


def _ring_sum(ring, word):
    acc = 0
    for s in word:
        acc = ring.add(acc, s)
    return acc


def test_criterion_4_lift_and_push(suite):
    rep, _ = suite
    runs = rep.count("runs")
    ok = (rep.count("lift_ok") == runs and rep.count("push_ok") == runs
          and not rep.count("lift_fail") and not rep.count("push_fail") and not rep.count("solve_failures"))
    report(4, ok, f"lift {rep.count('lift_ok')}/{runs}, push {rep.count('push_ok')}/{runs}")
    assert ok


def test_criterion_5_cascade():
    rng = np.random.default_rng(CASCADE_SEED)
    rows = agree = 0
    for spec in ("Z2", "Z3", "Z4", "GF(2^2)"):
        ring = Ring.parse(spec)
        for d in (4, 5, 6):
            for r in range(CASCADE_ROWS_PER):
                pool = ring.units if r % 2 == 0 else ring.nonzero_elements()
                n = d + int(rng.integers(0, 2))
                row = np.zeros(n, dtype=np.int64)
                row[rng.choice(n, size=d, replace=False)] = rng.choice(pool, size=d)
                code = ParityCheckMatrix.from_array(ring, [row])
                casc = build_cascaded_code(code)
                want = sorted(tuple(int(v) for v in b) for b in code.local_code(0))
                rows += 1
                agree += cascade_projection(casc, 0) == want
    ok = rows == agree and rows > 0
    report(5, ok, f"{agree}/{rows} rows project onto their local code")
    assert ok


def test_criterion_6_counts(suite):
    rep, _ = suite
    n_inst = rep.count("instances")
    lines = [ln for ln in rep.lines if ln.startswith("  counts ")]
    by_kind = Counter(ln.split()[1] for ln in lines if ln.endswith(" pass"))
    s_na = sum(1 for ln in lines if ln.split()[1] == "S" and ln.endswith(" n/a"))
    ok = (not rep.count("counts_FAIL") and by_kind["Q"] == n_inst and by_kind["U"] == n_inst
          and by_kind["S"] + s_na == n_inst and all(" T " in ln for ln in lines if ln.split()[1] == "U"))
    report(6, ok, f"Q {by_kind['Q']}/{n_inst}, U {by_kind['U']}/{n_inst}, "
                  f"S {by_kind['S']}/{n_inst - s_na} (S n/a for {s_na} instances with max degree < 4)")
    assert ok


def test_criterion_7_derived(suite):
    rep, _ = suite
    runs = rep.count("runs")
    ok = rep.count("derived_ok") == runs and not rep.count("derived_fail")
    report(7, ok, f"{rep.count('derived_ok')}/{runs} U optima satisfy the derived bounds")
    assert ok


def test_criterion_8_determinism(suite):
    rep, _ = suite
    again = run_battery(SEED, INSTANCES, COSTS_PER)
    ok = again.text().encode() == rep.text().encode()
    report(8, ok, f"{len(rep.text().encode())} bytes identical across two runs")
    assert ok
