"""Finite ring arithmetic for Z_q and GF(p^m).

Elements are integers in ``[0, q)``.  For ``GF(p^m)`` the integer is the
base-``p`` digit vector of the polynomial residue, lowest degree first, so
in ``GF(2^2)`` the element ``x`` has code 2 and ``x + 1`` has code 3.

All arithmetic goes through precomputed ``q x q`` tables, which keeps the
enumeration-heavy code in :mod:`lpdecode.code` vectorisable with numpy.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAX_CARDINALITY = 256

# Irreducible moduli, ascending coefficient order.
DEFAULT_MODULI = {
    (2, 1): (0, 1),
    (3, 1): (0, 1),
    (5, 1): (0, 1),
    (7, 1): (0, 1),
    (11, 1): (0, 1),
    (13, 1): (0, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 2): (2, 2, 1),
}


class RingError(ValueError):
    """Raised for malformed ring specifications or mixed-ring operands."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


def _poly_mod(num: list[int], den: tuple[int, ...], p: int) -> list[int]:
    """Remainder of ``num`` divided by monic ``den`` over GF(p)."""
    num = list(num)
    dd = len(den) - 1
    for shift in range(len(num) - 1 - dd, -1, -1):
        c = num[shift + dd] % p
        if c:
            for t, dc in enumerate(den):
                num[shift + t] = (num[shift + t] - c * dc) % p
    return [c % p for c in num[:dd]] + [0] * max(0, dd - len(num))


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Exhaustive check that no monic polynomial of degree 1..m//2 divides ``modulus``."""
    m = len(modulus) - 1
    for deg in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if not any(_poly_mod(list(modulus), low + (1,), p)):
                return False
    return True


@dataclass(frozen=True)
class Ring:
    """A finite commutative ring, either ``Z_q`` or ``GF(p^m)``.

    Construct with :meth:`integers_mod`, :meth:`galois_field` or :meth:`parse`.
    """

    kind: str
    q: int
    p: int = 0
    m: int = 0
    modulus: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind == "Z":
            if self.q < 2:
                raise RingError(f"Z_q needs q >= 2, got {self.q}")
        elif self.kind == "GF":
            if not _is_prime(self.p):
                raise RingError(f"GF characteristic {self.p} is not prime")
            if self.m < 1:
                raise RingError("GF extension degree must be >= 1")
            if len(self.modulus) != self.m + 1 or self.modulus[-1] != 1:
                raise RingError(f"modulus {self.modulus} is not monic of degree {self.m}")
            if any(not 0 <= c < self.p for c in self.modulus):
                raise RingError(f"modulus coefficients must lie in [0, {self.p})")
            if not is_irreducible(self.modulus, self.p):
                raise RingError(f"modulus {self.modulus} is reducible over GF({self.p})")
            if self.q != self.p**self.m:
                raise RingError("cardinality mismatch")
        else:
            raise RingError(f"unknown ring kind {self.kind!r}")
        if self.q > MAX_CARDINALITY:
            raise RingError(f"rings larger than {MAX_CARDINALITY} elements are not supported")

    # -- constructors -------------------------------------------------
    @classmethod
    def integers_mod(cls, q: int) -> Ring:
        return cls("Z", int(q))

    @classmethod
    def galois_field(cls, p: int, m: int = 1, modulus=None) -> Ring:
        if modulus is None:
            try:
                modulus = DEFAULT_MODULI[(p, m)]
            except KeyError:
                raise RingError(f"no default modulus for GF({p}^{m}); supply one") from None
        return cls("GF", p**m, p=p, m=m, modulus=tuple(int(c) for c in modulus))

    @classmethod
    def parse(cls, text: str) -> Ring:
        """Parse ``Z<q>``, ``GF(<p>^<m>)[c0,c1,...]``, ``GF(<p>^<m>)`` or ``GF(<q>)``."""
        s = text.strip().replace(" ", "")
        mz = re.fullmatch(r"Z(\d+)", s)
        if mz:
            return cls.integers_mod(int(mz.group(1)))
        mg = re.fullmatch(r"GF\((\d+)(?:\^(\d+))?\)(?:\[([\d,]+)\])?", s)
        if not mg:
            raise RingError(f"cannot parse ring spec {text!r}")
        base, exp, coeffs = mg.groups()
        if exp is None:
            q = int(base)
            for (pp, mm) in DEFAULT_MODULI:
                if pp**mm == q:
                    base, exp = pp, mm
                    break
            else:
                if _is_prime(q):
                    base, exp = q, 1
                else:
                    raise RingError(f"cannot infer p^m for GF({q})")
        modulus = None if coeffs is None else tuple(int(c) for c in coeffs.split(","))
        return cls.galois_field(int(base), int(exp), modulus)

    def __str__(self) -> str:
        if self.kind == "Z":
            return f"Z{self.q}"
        return f"GF({self.p}^{self.m})[{','.join(map(str, self.modulus))}]"

    # -- tables -------------------------------------------------------
    @cached_property
    def _digits(self) -> np.ndarray:
        codes = np.arange(self.q)
        return np.stack([(codes // self.p**t) % self.p for t in range(self.m)], axis=1)

    def _encode(self, digits) -> int:
        return int(sum(int(d) * self.p**t for t, d in enumerate(digits)))

    @cached_property
    def add_table(self) -> np.ndarray:
        a = np.arange(self.q)
        if self.kind == "Z":
            return (a[:, None] + a[None, :]) % self.q
        dig = self._digits
        s = (dig[:, None, :] + dig[None, :, :]) % self.p
        return (s * (self.p ** np.arange(self.m))).sum(axis=2)

    @cached_property
    def mul_table(self) -> np.ndarray:
        a = np.arange(self.q)
        if self.kind == "Z":
            return (a[:, None] * a[None, :]) % self.q
        table = np.zeros((self.q, self.q), dtype=np.int64)
        dig = self._digits
        for x in range(self.q):
            for y in range(x, self.q):
                prod = [0] * (2 * self.m - 1)
                for s, cx in enumerate(dig[x]):
                    for t, cy in enumerate(dig[y]):
                        prod[s + t] += int(cx) * int(cy)
                code = self._encode(_poly_mod(prod, self.modulus, self.p))
                table[x, y] = table[y, x] = code
        return table

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.argmin(self.add_table, axis=1)

    @cached_property
    def characteristic(self) -> int:
        """Additive order of 1."""
        return self.q if self.kind == "Z" else self.p

    @cached_property
    def units(self) -> tuple[int, ...]:
        return tuple(a for a in range(1, self.q) if (self.mul_table[a] == 1).any())

    # -- element API --------------------------------------------------
    def cardinality(self) -> int:
        return self.q

    def element(self, code: int) -> RingElement:
        code = int(code)
        if not 0 <= code < self.q:
            raise RingError(f"code {code} out of range for {self}")
        return RingElement(self, code)

    def _code(self, x) -> int:
        if isinstance(x, RingElement):
            if x.ring != self:
                raise RingError(f"element of {x.ring} used with {self}")
            return x.code
        return int(x)

    def add(self, a, b) -> int:
        return int(self.add_table[self._code(a), self._code(b)])

    def mul(self, a, b) -> int:
        return int(self.mul_table[self._code(a), self._code(b)])

    def neg(self, a) -> int:
        return int(self.neg_table[self._code(a)])

    def sub(self, a, b) -> int:
        return self.add(a, self.neg(b))

    def scalar_repeat(self, alpha, k: int) -> int:
        """``alpha`` added to itself ``k`` times (0 when ``k == 0``)."""
        if k < 0:
            raise ValueError("repeat count must be nonnegative")
        a = self._code(alpha)
        acc = 0
        for _ in range(k % self.characteristic):
            acc = int(self.add_table[acc, a])
        return acc

    def nonzero_elements(self) -> list[int]:
        """Nonzero codes in ascending order; this order indexes every per-symbol vector."""
        return list(range(1, self.q))

    def is_unit(self, a) -> bool:
        return self._code(a) in self.units

    def format_element(self, a) -> str:
        a = self._code(a)
        if self.kind == "Z" or self.m == 1:
            return str(a)
        terms = []
        for t, c in reversed(list(enumerate(self._digits[a]))):
            if c == 0:
                continue
            if t == 0:
                terms.append(str(c))
            else:
                mono = "x" if t == 1 else f"x^{t}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(terms) or "0"


@dataclass(frozen=True)
class RingElement:
    """A ring element tagged with its ring; supports ``+``, ``-`` and ``*``."""

    ring: Ring
    code: int

    def _other(self, other) -> int:
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise RingError(f"cannot combine elements of {self.ring} and {other.ring}")
            return other.code
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return RingElement(self.ring, self.ring.add(self.code, o))

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return RingElement(self.ring, self.ring.sub(self.code, o))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return RingElement(self.ring, self.ring.mul(self.code, o))

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.code))

    def __int__(self) -> int:
        return self.code

    def __repr__(self) -> str:
        return f"{self.ring.format_element(self.code)} in {self.ring}"
