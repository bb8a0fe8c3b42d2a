"""Command-line entry point.

Exit codes: 0 success (ml-certified, all checks pass), 10 fractional LP
optimum, 20 operational error (bad input, solver failure), 30 a check
failed (objective mismatch, bound violated, infeasible lift), 2 usage.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import battery, channel, decoder, decomposition, lp_exact, polytopes
from .code import CodeError, ParityCheckMatrix, load_alist
from .ring import Ring, RingError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FRACTIONAL = 10
EXIT_ERROR = 20
EXIT_MISMATCH = 30

KINDS = {"q": "Q", "u": "U", "s": "S"}


class UsageError(Exception):
    pass


def load_matrix(path, ring_spec: str | None = None) -> ParityCheckMatrix:
    """Native text matrix, or a binary alist file (ring Z2 unless ``ring_spec`` says otherwise)."""
    text = Path(path).read_text()
    first = next((ln.split("#", 1)[0].strip() for ln in text.splitlines() if ln.split("#", 1)[0].strip()), "")
    try:
        Ring.parse(first)
        native = True
    except RingError:
        native = False
    if native:
        code = ParityCheckMatrix.loads(text)
        if ring_spec is not None and Ring.parse(ring_spec) != code.ring:
            raise CodeError(f"--ring {ring_spec} contradicts matrix ring {code.ring}")
        return code
    code = load_alist(path)
    if ring_spec is not None:
        code = ParityCheckMatrix.from_array(Ring.parse(ring_spec), code.array)
    return code


def _kinds(spec: str | None, default: str) -> list[str]:
    spec = spec or default
    out = []
    for t in spec.replace(" ", "").lower().split(","):
        if t not in KINDS:
            raise UsageError(f"unknown polytope {t!r}; choose from q, u, s")
        if KINDS[t] not in out:
            out.append(KINDS[t])
    return out


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _costs_from_args(args, code: ParityCheckMatrix):
    if args.costs and (args.channel or args.received):
        raise UsageError("give either --costs or --channel with --received, not both")
    if args.costs:
        costs = channel.loads_costs(Path(args.costs).read_text(), code.q)
    elif args.channel and args.received:
        model = channel.load_channel(args.channel, code.q)
        y = channel.load_word(args.received)
        costs = channel.quantize_costs(channel.lambda_word(model, y), args.bits)
    else:
        raise UsageError("a cost source is required: --costs, or --channel with --received")
    if len(costs) != code.n:
        raise UsageError(f"cost vector has {len(costs)} positions, code has {code.n}")
    return costs


# -- commands ---------------------------------------------------------------


def cmd_decode(args) -> int:
    code = load_matrix(args.matrix, args.ring)
    costs = _costs_from_args(args, code)
    (kind,) = _kinds(args.polytope, "q")[:1]
    res = decoder.lp_decode(code, costs, kind)
    _emit(res.dumps(), args.out)
    return {decoder.ML_CERTIFIED: EXIT_OK, decoder.FRACTIONAL: EXIT_FRACTIONAL}.get(res.outcome, EXIT_ERROR)


def cmd_compare(args) -> int:
    code = load_matrix(args.matrix, args.ring)
    kinds = _kinds(args.polytope, "q,u,s")
    if len(kinds) < 2:
        raise UsageError("compare needs at least two polytopes")
    vectors = []
    for path in args.costs or []:
        vectors.append(channel.loads_costs(Path(path).read_text(), code.q))
    if args.trials:
        if args.seed is None:
            raise UsageError("random cost vectors need --seed")
        rng = np.random.default_rng(args.seed)
        vectors += [battery.random_costs(rng, code.n, code.q) for _ in range(args.trials)]
    if not vectors:
        raise UsageError("compare needs --costs files or --trials with --seed")
    builds = {k: polytopes.build(k, code) for k in kinds}
    lines = ["vector " + " ".join(kinds) + " verdict"]
    equal = 0
    for v, costs in enumerate(vectors):
        objs = [decoder.lp_decode(code, costs, k, builds[k]).objective for k in kinds]
        same = None not in objs and len(set(objs)) == 1
        equal += same
        lines.append(f"{v} " + " ".join(str(o) for o in objs) + (" equal" if same else " MISMATCH"))
    lines.append(f"equal {equal}/{len(vectors)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if equal == len(vectors) else EXIT_MISMATCH


def cmd_counts(args) -> int:
    code = load_matrix(args.matrix, args.ring)
    lines, ok = [], True
    for k in _kinds(args.polytope, "q,u,s"):
        rep = polytopes.count_report(polytopes.build(k, code))
        lines += rep.lines()
        ok &= rep.passed
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_MISMATCH


def _simulate_trial(job):
    code, model, seed_seq, kind, bits, words = job
    rng = np.random.default_rng(seed_seq)
    sent = words[int(rng.integers(len(words)))]
    y = [model.sample(int(c), rng) for c in sent]
    costs = channel.quantize_costs(channel.lambda_word(model, y), bits)
    res = decoder.lp_decode(code, costs, kind)
    if res.outcome == decoder.ML_CERTIFIED:
        sym = sum(int(a) != int(b) for a, b in zip(res.word, sent))
    else:
        sym = code.n
    return res.outcome, sym


def simulate(code, model, seed: int, trials: int, kind: str = "Q", bits: int = 20, jobs: int = 1) -> str:
    words = [tuple(int(c) for c in w) for w in code.enumerate_codebook()]
    children = np.random.SeedSequence(seed).spawn(trials)
    work = [(code, model, s, kind, bits, words) for s in children]
    if jobs > 1 and trials > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_simulate_trial, work))
    else:
        results = [_simulate_trial(w) for w in work]
    word_err = sum(1 for o, s in results if o != decoder.ML_CERTIFIED or s)
    sym_err = sum(s for _, s in results)
    frac = sum(1 for o, _ in results if o == decoder.FRACTIONAL)
    declared = sum(1 for o, _ in results if o == decoder.DECLARED_ERROR)

    def rate(a, b):
        if b == 0:
            return "n/a"
        r = Fraction(a, b)
        return f"{r} ({float(r):.6f})"

    lines = [
        f"trials {trials}",
        f"seed {seed}",
        f"polytope {kind}",
        f"word_errors {word_err}",
        f"symbol_errors {sym_err}",
        f"fractional {frac}",
        f"declared_errors {declared}",
        f"word_error_rate {rate(word_err, trials)}",
        f"symbol_error_rate {rate(sym_err, trials * code.n)}",
        f"fractional_rate {rate(frac, trials)}",
    ]
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    if args.seed is None:
        raise UsageError("simulate needs --seed")
    if not args.channel:
        raise UsageError("simulate needs --channel")
    code = load_matrix(args.matrix, args.ring)
    model = channel.load_channel(args.channel, code.q)
    (kind,) = _kinds(args.polytope, "q")[:1]
    _emit(simulate(code, model, args.seed, args.trials or 0, kind, args.bits, args.jobs), args.out)
    return EXIT_OK


def cmd_lift(args) -> int:
    code = load_matrix(args.matrix, args.ring)
    ub = polytopes.build_U(code)
    if args.point:
        pt = lp_exact.loads_point(ub.lp, Path(args.point).read_text())
        if not ub.lp.is_feasible_point(pt):
            raise UsageError("input point is not feasible for U")
    else:
        costs = _costs_from_args(args, code)
        sol = lp_exact.solve(ub.lp.with_cost(ub.cost_vector(costs)))
        if sol.status != lp_exact.OPTIMAL:
            sys.stderr.write(f"U solve: {sol.status}\n")
            return EXIT_ERROR
        pt = sol.values
    w, qb = decomposition.lift_U_to_Q(ub, pt)
    ok = qb.lp.is_feasible_point(w)
    _emit(lp_exact.dumps_point(qb.lp, w), args.out)
    sys.stderr.write(f"lift {'feasible' if ok else 'INFEASIBLE'} for Q\n")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_decompose(args) -> int:
    if not args.tables:
        raise UsageError("decompose needs --tables")
    ring, x, k, M = decomposition.loads_tables(Path(args.tables).read_text())
    w = decomposition.decompose(x, k, M, ring)
    ok = w.total == M and (w.tables() == x).all() if M else w.total == 0
    _emit(decomposition.dumps_witness(w), args.out)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_selftest(args) -> int:
    seed = 0 if args.seed is None else args.seed
    rep = battery.run_battery(seed, args.trials or 50, args.costs_per)
    _emit(rep.text(), args.out)
    bad = [k for k in ("objectives_differ", "ml_mismatch", "lift_fail", "push_fail",
                       "derived_fail", "counts_FAIL", "solve_failures") if rep.count(k)]
    return EXIT_MISMATCH if bad else EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpdecode", description="Exact LP decoding over finite rings.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, matrix=True):
        if matrix:
            sp.add_argument("--matrix", required=True, help="parity-check matrix file (text or alist)")
            sp.add_argument("--ring", help="ring spec, e.g. Z4 or GF(2^2)")
        sp.add_argument("--polytope", help="q, u, s or a comma list")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--out", help="write the report here instead of stdout")

    def cost_source(sp, multi=False):
        if multi:
            sp.add_argument("--costs", action="append", help="rational cost file (repeatable)")
        else:
            sp.add_argument("--costs", help="rational cost file: n lines of q-1 values")
        sp.add_argument("--channel", help="channel config (JSON)")
        sp.add_argument("--received", help="received word file")
        sp.add_argument("--bits", type=int, default=20, help="cost quantisation in channel mode")

    sp = sub.add_parser("decode", help="LP-decode one cost vector")
    common(sp)
    cost_source(sp)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("compare", help="compare optimal objectives across polytopes")
    common(sp)
    sp.add_argument("--costs", action="append", help="rational cost file (repeatable)")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("counts", help="variable and constraint counts against the bounds")
    common(sp)
    sp.set_defaults(func=cmd_counts)

    sp = sub.add_parser("simulate", help="seeded Monte Carlo decoding run")
    common(sp)
    sp.add_argument("--channel", help="channel config (JSON)")
    sp.add_argument("--bits", type=int, default=20)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("lift", help="lift a U point (or the U optimum) to Q weights")
    common(sp)
    cost_source(sp)
    sp.add_argument("--point", help="U point file, one 'name value' per line")
    sp.set_defaults(func=cmd_lift)

    sp = sub.add_parser("decompose", help="decompose count tables into words")
    common(sp, matrix=False)
    sp.add_argument("--tables", help="tables file with ring, M, k and x lines")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("selftest", help="run the seeded equivalence battery")
    common(sp, matrix=False)
    sp.add_argument("--costs-per", type=int, default=5, help="cost vectors per instance")
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (OSError, ValueError, RuntimeError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
