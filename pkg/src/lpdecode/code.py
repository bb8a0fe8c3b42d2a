"""Parity-check matrices over finite rings and brute-force code enumeration."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .ring import Ring

DEFAULT_LOCAL_CAP = 12  # max symbols' worth: q**(d_j - 1) local words with d_j <= cap
DEFAULT_CODEBOOK_CAP = 10**6


class CodeError(ValueError):
    pass


class SizeCapExceeded(CodeError):
    """An enumeration would exceed its configured cap."""


def all_words(q: int, length: int) -> np.ndarray:
    """Every word of R^length as rows, in canonical (lexicographic) order."""
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((q,) * length).reshape(length, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


def syndrome_zero(ring: Ring, words: np.ndarray, coeffs) -> np.ndarray:
    """Mask of rows ``w`` with ``sum_i w_i * coeffs_i == 0`` in ``ring``."""
    acc = np.zeros(len(words), dtype=np.int64)
    for t, h in enumerate(coeffs):
        if h:
            acc = ring.add_table[acc, ring.mul_table[words[:, t], h]]
    return acc == 0


def nullspace_words(ring: Ring, matrix: np.ndarray, cap: int = DEFAULT_CODEBOOK_CAP) -> np.ndarray:
    """All ``c`` with ``matrix @ c == 0`` over ``ring``, by exhaustive scan."""
    matrix = np.asarray(matrix, dtype=np.int64)
    n = matrix.shape[1]
    if ring.q**n > cap:
        raise SizeCapExceeded(f"{ring.q}^{n} words exceeds cap {cap}")
    words = all_words(ring.q, n)
    ok = np.ones(len(words), dtype=bool)
    for row in matrix:
        ok &= syndrome_zero(ring, words, row)
    return words[ok]


@dataclass(frozen=True)
class ParityCheckMatrix:
    """An ``m x n`` parity-check matrix with entries coded in ``ring``."""

    ring: Ring
    entries: tuple[tuple[int, ...], ...]
    local_cap: int = field(default=DEFAULT_LOCAL_CAP, compare=False)
    codebook_cap: int = field(default=DEFAULT_CODEBOOK_CAP, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        if not rows or not rows[0]:
            raise CodeError("parity-check matrix needs m >= 1 and n >= 1")
        n = len(rows[0])
        for j, r in enumerate(rows):
            if len(r) != n:
                raise CodeError(f"row {j} has length {len(r)}, expected {n}")
            if any(not 0 <= x < self.ring.q for x in r):
                raise CodeError(f"row {j} has entries outside {self.ring}")
            if not any(r):
                raise CodeError(f"row {j} is all zeros")

    @classmethod
    def from_array(cls, ring: Ring, array, **caps) -> ParityCheckMatrix:
        return cls(ring, tuple(map(tuple, np.asarray(array, dtype=np.int64).tolist())), **caps)

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries[0])

    @property
    def q(self) -> int:
        return self.ring.q

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    @cached_property
    def supports(self) -> tuple[tuple[int, ...], ...]:
        """``I_j`` for every row, ascending."""
        return tuple(tuple(i for i, h in enumerate(r) if h) for r in self.entries)

    def degree(self, j: int) -> int:
        return len(self.supports[j])

    @property
    def max_degree(self) -> int:
        return max(len(s) for s in self.supports)

    def has_unit_entries(self) -> bool:
        units = set(self.ring.units)
        return all(h in units for r in self.entries for h in r if h)

    # -- parity checks ------------------------------------------------
    def check_satisfied(self, word, j: int) -> bool:
        word = [int(x) for x in word]
        if len(word) != self.n:
            raise CodeError(f"word has length {len(word)}, expected {self.n}")
        acc = 0
        for i in self.supports[j]:
            acc = self.ring.add(acc, self.ring.mul(word[i], self.entries[j][i]))
        return acc == 0

    def is_codeword(self, word) -> bool:
        return all(self.check_satisfied(word, j) for j in range(self.m))

    # -- local codes --------------------------------------------------
    def _check_local_cap(self, j: int):
        d = self.degree(j)
        if d - 1 > self.local_cap:
            raise SizeCapExceeded(f"row {j}: local code q^{d - 1} exceeds cap q^{self.local_cap}")

    def local_code(self, j: int) -> np.ndarray:
        """``C_j`` as rows indexed by ``supports[j]``, canonical order."""
        return self._local_codes[j]

    @cached_property
    def _local_codes(self) -> tuple[np.ndarray, ...]:
        out = []
        for j, sup in enumerate(self.supports):
            self._check_local_cap(j)
            words = all_words(self.q, len(sup))
            if self.q ** len(sup) > 64 * self.q ** self.local_cap:
                raise SizeCapExceeded(f"row {j}: scan of {self.q}^{len(sup)} words too large")
            coeffs = [self.entries[j][i] for i in sup]
            w = words[syndrome_zero(self.ring, words, coeffs)]
            w.setflags(write=False)
            out.append(w)
        return tuple(out)

    def enumerate_local_code(self, j: int) -> list[dict[int, int]]:
        """Local codewords of row ``j`` as ``{position: symbol}`` maps."""
        sup = self.supports[j]
        return [dict(zip(sup, map(int, b))) for b in self.local_code(j)]

    def products(self, j: int, b) -> list[int]:
        """``b_i * H_{j,i}`` for ``i`` in ``I_j``."""
        if isinstance(b, dict):
            b = [b[i] for i in self.supports[j]]
        return [self.ring.mul(int(x), self.entries[j][i]) for x, i in zip(b, self.supports[j])]

    def kappa(self, j: int, b) -> tuple[int, ...]:
        """Count of positions whose check product equals each nonzero symbol."""
        prods = self.products(j, b)
        acc = 0
        for p in prods:
            acc = self.ring.add(acc, p)
        if acc != 0:
            raise CodeError(f"word {b} is not in local code C_{j}")
        return count_profile(prods, self.q)

    @cached_property
    def _kappa_tables(self) -> tuple[np.ndarray, ...]:
        out = []
        for j, sup in enumerate(self.supports):
            C = self.local_code(j)
            h = np.array([self.entries[j][i] for i in sup], dtype=np.int64)
            prods = self.ring.mul_table[C, h[None, :]]
            counts = np.stack([(prods == a).sum(axis=1) for a in range(1, self.q)], axis=1)
            out.append(counts)
        return tuple(out)

    def local_kappas(self, j: int) -> list[tuple[int, ...]]:
        """``kappa_j(b)`` for every ``b`` in ``local_code(j)``, same order."""
        return [tuple(map(int, r)) for r in self._kappa_tables[j]]

    def tj_image(self, j: int) -> list[tuple[int, ...]]:
        """``{kappa_j(b) : b in C_j}`` by enumeration, sorted."""
        return sorted(set(self.local_kappas(j)))

    def tj_formula(self, j: int) -> list[tuple[int, ...]]:
        """Closed-form profile set: ``sum alpha*k_alpha == 0`` and ``sum k_alpha <= d_j``."""
        return profile_set(self.ring, self.degree(j))

    # -- codebook -----------------------------------------------------
    def enumerate_codebook(self) -> np.ndarray:
        return nullspace_words(self.ring, self.array, self.codebook_cap)

    # -- io -----------------------------------------------------------
    def dumps(self) -> str:
        lines = [str(self.ring), f"{self.m} {self.n}"]
        lines += [" ".join(map(str, r)) for r in self.entries]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> ParityCheckMatrix:
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if len(lines) < 2:
            raise CodeError("matrix file needs a ring line and a size line")
        ring = Ring.parse(lines[0])
        try:
            m, n = map(int, lines[1].split())
        except ValueError:
            raise CodeError(f"bad size line {lines[1]!r}") from None
        rows = [tuple(int(x) for x in ln.split()) for ln in lines[2:]]
        if len(rows) != m or any(len(r) != n for r in rows):
            raise CodeError(f"matrix body does not match declared size {m} x {n}")
        return cls(ring, tuple(rows))

    @classmethod
    def load(cls, path) -> ParityCheckMatrix:
        return cls.loads(Path(path).read_text())


def load_alist(path) -> ParityCheckMatrix:
    """Read a binary alist file (MacKay format) as a matrix over ``Z2``.

    Column lists may be zero-padded to the maximum column weight or not.
    """
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    try:
        n, m = int(lines[0][0]), int(lines[0][1])
        col_w = [int(t) for t in lines[2]]
        H = np.zeros((m, n), dtype=np.int64)
        for i in range(n):
            rows = [int(t) for t in lines[4 + i] if int(t)]
            if len(rows) != col_w[i]:
                raise CodeError(f"alist column {i} lists {len(rows)} rows, weight says {col_w[i]}")
            for r in rows:
                H[r - 1, i] = 1
    except (IndexError, ValueError) as exc:
        raise CodeError(f"malformed alist file: {exc}") from None
    return ParityCheckMatrix.from_array(Ring.integers_mod(2), H)


def count_profile(symbols, q: int) -> tuple[int, ...]:
    counts = [0] * (q - 1)
    for s in symbols:
        if s:
            counts[s - 1] += 1
    return tuple(counts)


def profile_set(ring: Ring, d: int) -> list[tuple[int, ...]]:
    """All ``k`` in N^(q-1) with ``sum_alpha alpha*k_alpha == 0`` and ``sum k <= d``."""
    out = []
    for k in _compositions_at_most(ring.q - 1, d):
        acc = 0
        for alpha, ka in zip(ring.nonzero_elements(), k):
            acc = ring.add(acc, ring.scalar_repeat(alpha, ka))
        if acc == 0:
            out.append(k)
    return sorted(out)


def _compositions_at_most(parts: int, total: int):
    if parts == 0:
        yield ()
        return
    for first in range(total + 1):
        for rest in _compositions_at_most(parts - 1, total - first):
            yield (first,) + rest


def gamma_code(ring: Ring, N: int, cap: int = DEFAULT_CODEBOOK_CAP) -> np.ndarray:
    """Length-``N`` words over ``ring`` whose symbols sum to zero."""
    if N < 1:
        raise CodeError("N must be >= 1")
    if ring.q ** (N - 1) > cap:
        raise SizeCapExceeded(f"{ring.q}^{N - 1} words exceeds cap {cap}")
    return nullspace_words(ring, np.ones((1, N), dtype=np.int64), cap=ring.q**N)


def gamma_code_constrained(ring: Ring, N: int, k, cap: int = DEFAULT_CODEBOOK_CAP) -> np.ndarray:
    """Members of ``gamma_code`` with exactly ``k[alpha-1]`` symbols equal to ``alpha``."""
    k = tuple(int(x) for x in k)
    if len(k) != ring.q - 1:
        raise CodeError(f"profile needs {ring.q - 1} entries")
    words = gamma_code(ring, N, cap)
    if len(words) == 0:
        return words
    counts = np.stack([(words == a).sum(axis=1) for a in range(1, ring.q)], axis=1)
    return words[(counts == np.array(k)[None, :]).all(axis=1)]


def words_with_profile(ring: Ring, N: int, k) -> list[tuple[int, ...]]:
    """``gamma_code_constrained`` built from multiset permutations, canonical order.

    Avoids scanning all of R^N, so it stays usable when ``q^N`` is large but
    the profile class is small.
    """
    k = tuple(int(x) for x in k)
    if sum(k) > N:
        return []
    acc = 0
    for alpha, ka in zip(ring.nonzero_elements(), k):
        acc = ring.add(acc, ring.scalar_repeat(alpha, ka))
    if acc != 0:
        return []
    symbols = [0] * (N - sum(k))
    for alpha, ka in zip(ring.nonzero_elements(), k):
        symbols += [alpha] * ka
    return sorted(set(itertools.permutations(symbols)))
