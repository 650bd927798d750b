"""Polynomial rings over prime fields with integer-encoded monomials.

A monomial is stored as a single Python int ``K`` (its *order key*) chosen so
that comparing keys compares monomials in the ring's order and multiplying
monomials adds keys.  Exponents live in 8-bit fields; the top bit of each field
is kept clear so divisibility can be tested with one subtraction.

A polynomial is a tuple of ``(key, coeff)`` pairs, strictly decreasing by key,
coefficients in ``1..p-1``.  The zero polynomial is the empty tuple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import BeiError

BITS = 8
MAX_EXP = (1 << (BITS - 1)) - 1
ORDERS = ("degrevlex", "lex", "elim")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class RingContext:
    """K[x_1..x_N] over GF(char) with a fixed monomial order.

    ``m`` and ``n`` are set for the grid ring K[x_ij : i<=m, j<=n] (row-major,
    x_11 > x_12 > ...).  The ``elim`` order is a two-block order: degrevlex on
    the first ``block`` variables, ties broken by degrevlex on the rest.
    """

    nvars: int
    char: int = 32003
    order: str = "degrevlex"
    names: tuple = ()
    block: int = 0
    m: int = 0
    n: int = 0
    _c: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not is_prime(self.char):
            raise BeiError(f"characteristic {self.char} is not prime")
        if self.order not in ORDERS:
            raise BeiError(f"unknown monomial order {self.order!r}")
        if self.order == "elim" and not 0 < self.block < self.nvars:
            raise BeiError("elimination order needs 0 < block < nvars")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(self.nvars)))
        N = self.nvars
        c = {
            "low": (1 << (BITS * N)) - 1,
            "guard": sum(1 << (BITS * i + BITS - 1) for i in range(N)),
        }
        if self.order == "elim":
            n2 = N - self.block
            c["n2"] = n2
            c["low2"] = (1 << (BITS * n2)) - 1
            c["low1"] = (1 << (BITS * self.block)) - 1
            c["shift"] = BITS * n2 + 24
        object.__setattr__(self, "_c", c)

    # construction helpers
    @classmethod
    def grid(cls, m: int, n: int, char: int = 32003, order: str = "degrevlex") -> "RingContext":
        names = tuple(f"x[{i},{j}]" for i in range(1, m + 1) for j in range(1, n + 1))
        return cls(m * n, char, order, names, m=m, n=n)

    def var_index(self, i: int, j: int) -> int:
        """Index of x_ij (1-based i, j) in a grid ring."""
        return (i - 1) * self.n + (j - 1)

    def with_order(self, order: str, block: int = 0) -> "RingContext":
        return RingContext(self.nvars, self.char, order, self.names, block, self.m, self.n)

    def with_char(self, char: int) -> "RingContext":
        return RingContext(self.nvars, char, self.order, self.names, self.block, self.m, self.n)

    # packed exponent vectors: field i holds the exponent of variable i
    def pack(self, exps) -> int:
        if len(exps) != self.nvars:
            raise BeiError("exponent vector has wrong length")
        for e in exps:
            if not 0 <= e <= MAX_EXP:
                raise BeiError(f"exponent {e} outside 0..{MAX_EXP}")
        return int.from_bytes(bytes(exps), "little")

    def unpack(self, P: int) -> tuple:
        return tuple(P.to_bytes(self.nvars, "little"))

    @staticmethod
    def pdeg(P: int) -> int:
        return sum(P.to_bytes((P.bit_length() + 7) // 8, "little"))

    def key_from_packed(self, P: int) -> int:
        o = self.order
        if o == "degrevlex":
            return (self.pdeg(P) << (BITS * self.nvars)) - P
        if o == "lex":
            return int.from_bytes(P.to_bytes(self.nvars, "little"), "big")
        c = self._c
        b = self.block
        P1 = P & c["low1"]
        P2 = P >> (BITS * b)
        k1 = (self.pdeg(P1) << (BITS * b)) - P1
        k2 = (self.pdeg(P2) << (BITS * c["n2"])) - P2
        return (k1 << c["shift"]) + k2

    def packed(self, K: int) -> int:
        o = self.order
        if o == "degrevlex":
            return (-K) & self._c["low"]
        if o == "lex":
            return int.from_bytes(K.to_bytes(self.nvars, "big"), "little")
        c = self._c
        half = 1 << (c["shift"] - 1)
        k2 = ((K + half) & ((1 << c["shift"]) - 1)) - half
        k1 = (K - k2) >> c["shift"]
        P1 = (-k1) & c["low1"]
        P2 = (-k2) & c["low2"]
        return P1 | (P2 << (BITS * self.block))

    def mono(self, exps) -> int:
        return self.key_from_packed(self.pack(exps))

    def exps(self, K: int) -> tuple:
        return self.unpack(self.packed(K))

    def deg(self, K: int) -> int:
        if self.order == "degrevlex":
            return (K + ((-K) & self._c["low"])) >> (BITS * self.nvars)
        return self.pdeg(self.packed(K))

    def var(self, i: int) -> int:
        e = [0] * self.nvars
        e[i] = 1
        return self.mono(e)

    # divisibility on packed vectors
    def pdivides(self, Pa: int, Pb: int) -> bool:
        g = self._c["guard"]
        return ((Pb | g) - Pa) & g == g

    def plcm(self, Pa: int, Pb: int) -> int:
        g = self._c["guard"]
        ge = (((Pa | g) - Pb) & g) >> (BITS - 1)
        mask = ge * MAX_EXP
        return (Pa & mask) | (Pb & ~mask & self._c["low"])

    def pgcd(self, Pa: int, Pb: int) -> int:
        g = self._c["guard"]
        ge = (((Pa | g) - Pb) & g) >> (BITS - 1)
        mask = ge * MAX_EXP
        return (Pb & mask) | (Pa & ~mask & self._c["low"])

    def divides(self, a: int, b: int) -> bool:
        return self.pdivides(self.packed(a), self.packed(b))

    def lcm(self, a: int, b: int) -> int:
        return self.key_from_packed(self.plcm(self.packed(a), self.packed(b)))

    def support_mask(self, K: int) -> int:
        """Bitmask with bit i set when variable i divides the monomial."""
        e = self.exps(K)
        return sum(1 << i for i, v in enumerate(e) if v)

    # coefficients
    def inv(self, c: int) -> int:
        return pow(c, -1, self.char)

    def sym(self, c: int) -> int:
        """Symmetric representative of a coefficient."""
        return c - self.char if c > self.char // 2 else c

    # polynomials
    def poly(self, terms) -> tuple:
        """Normalize an iterable of (exps, coeff) into a polynomial tuple."""
        acc = {}
        p = self.char
        for e, c in terms:
            k = self.mono(e)
            acc[k] = (acc.get(k, 0) + c) % p
        return tuple(sorted(((k, c) for k, c in acc.items() if c), reverse=True))

    def from_dict(self, d: dict) -> tuple:
        p = self.char
        return tuple(sorted(((k, c % p) for k, c in d.items() if c % p), reverse=True))

    def monic(self, f: tuple) -> tuple:
        if not f or f[0][1] == 1:
            return f
        i = self.inv(f[0][1])
        p = self.char
        return tuple((k, c * i % p) for k, c in f)

    def is_homogeneous(self, f: tuple) -> bool:
        return len({self.deg(k) for k, _ in f}) <= 1

    def poly_deg(self, f: tuple) -> int:
        return max((self.deg(k) for k, _ in f), default=-1)

    # text form: c*x[i,j]^e*..., one polynomial per line
    def format_mono(self, K: int) -> str:
        parts = []
        for i, e in enumerate(self.exps(K)):
            if e == 1:
                parts.append(self.names[i])
            elif e > 1:
                parts.append(f"{self.names[i]}^{e}")
        return "*".join(parts)

    def format_poly(self, f: tuple) -> str:
        if not f:
            return "0"
        out = []
        for idx, (k, c) in enumerate(f):
            c = self.sym(c)
            mono = self.format_mono(k)
            if not mono:
                body = f"{abs(c)}"
            else:
                body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
            if idx == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    def parse_poly(self, text: str) -> tuple:
        index = {nm: i for i, nm in enumerate(self.names)}
        s = text.replace(" ", "")
        if s in ("", "0"):
            return ()
        terms = []
        for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
            coeff = 1
            e = [0] * self.nvars
            for factor in body.split("*"):
                if re.fullmatch(r"\d+", factor):
                    coeff *= int(factor)
                    continue
                name, _, power = factor.partition("^")
                if name not in index:
                    raise BeiError(f"unknown variable {name!r}")
                e[index[name]] += int(power) if power else 1
            terms.append((e, -coeff if sign == "-" else coeff))
        return self.poly(terms)
