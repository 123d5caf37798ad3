"""Exact arithmetic used throughout: valuations, Smith normal form, Q/Z values
and sums in the 2-power cyclotomic rings.

Matrices are plain lists of lists of Python ints so entries never overflow.
Cokernel convention: the columns of a presentation matrix are the relations,
i.e. coker(M) = Z^rows / M Z^cols.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy import factorint, isprime

INF = math.inf

IntMatrix = list  # list[list[int]]


class NotInvertible(ArithmeticError):
    pass


class NotOnRay(ArithmeticError):
    """A Gauss sum that should lie on an eighth-turn ray does not."""


def p_valuation(n: int, p: int):
    """Exponent of the largest power of ``p`` dividing ``n``; ``INF`` for 0."""
    if p < 2 or not isprime(p):
        raise ValueError(f"{p} is not a prime")
    if n == 0:
        return INF
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def mod_inverse(a: int, m: int) -> int:
    if m < 2:
        raise ValueError("modulus must be at least 2")
    if math.gcd(a, m) != 1:
        raise NotInvertible(f"{a} is not invertible mod {m}")
    return pow(a, -1, m)


def prime_power_parts(n: int) -> list[int]:
    """Prime-power factors of n > 1, e.g. 12 -> [3, 4]."""
    return sorted(p**e for p, e in factorint(n).items())


# --- integer matrices -------------------------------------------------------

def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    Bt = list(zip(*B))
    return [[sum(x * y for x, y in zip(row, col)) for col in Bt] for row in A]


def transpose(A: IntMatrix) -> IntMatrix:
    return [list(r) for r in zip(*A)]


def det(A: Sequence[Sequence]) -> int | Fraction:
    """Exact determinant by fraction-free Bareiss elimination (ints) or
    Gaussian elimination (Fractions)."""
    n = len(A)
    if n == 0:
        return 1
    if all(isinstance(x, int) for row in A for x in row):
        M = [list(r) for r in A]
        sign, prev = 1, 1
        for k in range(n - 1):
            if M[k][k] == 0:
                for i in range(k + 1, n):
                    if M[i][k] != 0:
                        M[k], M[i] = M[i], M[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            prev = M[k][k]
        return sign * M[n - 1][n - 1]
    M = [[Fraction(x) for x in r] for r in A]
    d = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            d = -d
        d *= M[k][k]
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return d


def inverse_fraction(A: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Exact inverse over Q by Gauss-Jordan elimination."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[k], M[piv] = M[piv], M[k]
        inv = 1 / M[k][k]
        M[k] = [x * inv for x in M[k]]
        for i in range(n):
            if i != k and M[i][k] != 0:
                f = M[i][k]
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return [row[n:] for row in M]


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (D, U, V) with D = U M V diagonal, d_1 | d_2 | ..., d_i >= 0,
    and U, V unimodular."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    D = [list(map(int, r)) for r in M]
    U = identity(rows)
    V = identity(cols)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in D:
            R[i], R[j] = R[j], R[i]
        for R in V:
            R[i], R[j] = R[j], R[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for R in D:
            R[dst] += q * R[src]
        for R in V:
            R[dst] += q * R[src]

    for t in range(min(rows, cols)):
        while True:
            nz = [(abs(D[i][j]), i, j) for i in range(t, rows)
                  for j in range(t, cols) if D[i][j] != 0]
            if not nz:
                break
            _, pi, pj = min(nz)
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            piv = D[t][t]
            clean = True
            for i in range(t + 1, rows):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // piv))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, cols):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // piv))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, rows)
                        for j in range(t + 1, cols) if D[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return D, U, V


@dataclass(frozen=True)
class AbelianGroup:
    """Finite abelian group as an ascending tuple of prime-power cyclic orders."""

    orders: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(sorted(self.orders)))
        for n in self.orders:
            if n < 2 or len(factorint(n)) != 1:
                raise ValueError(f"cyclic order {n} is not a prime power")

    @classmethod
    def from_invariant_factors(cls, factors) -> "AbelianGroup":
        out = []
        for d in factors:
            if abs(d) > 1:
                out.extend(prime_power_parts(abs(d)))
        return cls(tuple(out))

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.orders) if self.orders else 1

    def p_part(self, p: int) -> "AbelianGroup":
        return AbelianGroup(tuple(n for n in self.orders if n % p == 0))

    def rank_at(self, p: int, k: int) -> int:
        """Number of cyclic factors of order exactly p^k."""
        return sum(1 for n in self.orders if n == p**k)

    def __str__(self):
        if not self.orders:
            return "0"
        return " + ".join(f"Z/{n}" for n in self.orders)


def torsion_of_cokernel(M: IntMatrix) -> tuple[AbelianGroup, int]:
    """Torsion subgroup and free rank of Z^rows / (column span of M)."""
    rows = len(M)
    if rows == 0:
        return AbelianGroup(), 0
    D, _, _ = smith_normal_form(M)
    diag = [D[i][i] for i in range(min(rows, len(M[0])))]
    rank = sum(1 for d in diag if d != 0)
    return AbelianGroup.from_invariant_factors(d for d in diag if d), rows - rank


# --- Q/Z --------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class QZ:
    """An element of Q/Z with prime-power (or unit) denominator, kept reduced
    with 0 <= num < den."""

    num: int
    den: int = 1

    def __post_init__(self):
        if self.den < 1:
            raise ValueError("denominator must be positive")
        f = Fraction(self.num, self.den)
        n, d = f.numerator % f.denominator, f.denominator
        if n == 0:
            d = 1
        if d > 1 and len(factorint(d)) != 1:
            raise ValueError(f"denominator {d} is not a prime power")
        object.__setattr__(self, "num", n)
        object.__setattr__(self, "den", d)

    @classmethod
    def of(cls, x) -> "QZ":
        f = Fraction(x)
        return cls(f.numerator, f.denominator)

    @classmethod
    def parse(cls, text: str) -> "QZ":
        n, _, d = text.strip().partition("/")
        return cls(int(n), int(d) if d else 1)

    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __add__(self, other):
        if isinstance(other, QZ):
            other = other.fraction()
        return QZ.of(self.fraction() + Fraction(other))

    __radd__ = __add__

    def __neg__(self):
        return QZ(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other if isinstance(other, QZ) else -Fraction(other))

    def __mul__(self, k: int):
        return QZ(self.num * int(k), self.den)

    __rmul__ = __mul__

    def __bool__(self):
        return self.num != 0

    def format(self, den: int | None = None) -> str:
        """``num/den`` string, optionally over a larger common denominator."""
        den = den or self.den
        if den % self.den:
            raise ValueError(f"{den} is not a multiple of {self.den}")
        return f"{self.num * (den // self.den)}/{den}"

    def __str__(self):
        return self.format()


# --- cyclotomic sums ----------------------------------------------------------

@dataclass(frozen=True)
class CyclotomicSum:
    """sum_j c_j zeta^j in Z[zeta], zeta = exp(2 pi i / 2^m), reduced with
    zeta^(2^(m-1)) = -1 so the coefficient vector is a basis expansion."""

    m: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("order exponent must be positive")
        if len(self.coeffs) != 2 ** (self.m - 1):
            raise ValueError("coefficient vector has the wrong length")

    @classmethod
    def from_buckets(cls, counts: Sequence[int], m: int) -> "CyclotomicSum":
        """Reduce phase-class counts (counts[j] = #{x : phase(x) = j/2^m})."""
        half = 2 ** (m - 1)
        c = [0] * half
        for j, n in enumerate(counts):
            j %= 2 * half
            if j < half:
                c[j] += int(n)
            else:
                c[j - half] -= int(n)
        return cls(m, tuple(c))

    @classmethod
    def integer(cls, n: int) -> "CyclotomicSum":
        return cls(1, (n,))

    def lift(self, m: int) -> "CyclotomicSum":
        if m < self.m:
            raise ValueError("cannot lower the order exponent")
        step = 2 ** (m - self.m)
        c = [0] * 2 ** (m - 1)
        for j, x in enumerate(self.coeffs):
            c[j * step] = x
        return CyclotomicSum(m, tuple(c))

    def __mul__(self, other: "CyclotomicSum") -> "CyclotomicSum":
        m = max(self.m, other.m)
        a, b = self.lift(m).coeffs, other.lift(m).coeffs
        buckets = [0] * 2**m
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        buckets[i + j] += x * y
        return CyclotomicSum.from_buckets(buckets, m)

    def __eq__(self, other):
        if not isinstance(other, CyclotomicSum):
            return NotImplemented
        m = max(self.m, other.m)
        return self.lift(m).coeffs == other.lift(m).coeffs

    def __hash__(self):
        # hash the minimal representation so equal values hash equally
        z = self
        while z.m > 1 and all(x == 0 for x in z.coeffs[1::2]):
            z = CyclotomicSum(z.m - 1, z.coeffs[::2])
        return hash((z.m, z.coeffs))

    def conjugate(self) -> "CyclotomicSum":
        n = 2**self.m
        buckets = [0] * n
        for j, x in enumerate(self.coeffs):
            buckets[(-j) % n] += x
        return CyclotomicSum.from_buckets(buckets, self.m)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __complex__(self):
        n = 2**self.m
        return sum(c * cmath.exp(2j * math.pi * k / n)
                   for k, c in enumerate(self.coeffs) if c)

    def l1(self) -> int:
        return sum(abs(c) for c in self.coeffs)


def cyclotomic_arg_eighths(z: CyclotomicSum, rel_tol: float = 1e-6):
    """Argument of z in eighth-turns (an element of Z/8), or INF when z = 0."""
    if z.is_zero():
        return INF
    w = complex(z)
    r = abs(w)
    for j in range(8):
        ray = cmath.exp(1j * math.pi * j / 4)
        if abs(w - r * ray) <= rel_tol * r:
            return j
    raise NotOnRay(f"{w} is not on an eighth-turn ray")
