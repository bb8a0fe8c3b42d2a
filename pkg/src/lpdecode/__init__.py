"""Exact LP decoding of linear codes over Z_q and GF(p^m)."""
from .ring import Ring, RingElement, RingError
from .code import ParityCheckMatrix, CodeError
from .lp_exact import LinearProgram, LPSolution, solve, solve_many, verify_optimal
from .polytopes import build, build_Q, build_U, build_S, count_report
from .decomposition import decompose, extract_assignment, lift_U_to_Q, push_Q_to_U
from .decoder import DecodeResult, lp_decode, ml_brute_force, certify

__version__ = "0.1.0"
