"""Seifert presentations (O,o,0 | e; (a_1,b_1), ..., (a_m,b_m)): first homology,
the block formula for the p-primary linking matrix, and a plumbing-graph oracle.

Homology presentation: generators s_1..s_m, h with relations
a_j s_j + b_j h = 0 and s_1 + ... + s_m - e h = 0.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (AbelianGroup, QZ, det, inverse_fraction, mod_inverse,
                      p_valuation, smith_normal_form, torsion_of_cokernel,
                      transpose)


class InvalidFiber(ValueError):
    pass


class NotRationalHomologySphere(ValueError):
    pass


class FormulaInapplicable(ValueError):
    pass


class DegenerateOutput(ValueError):
    pass


@dataclass(frozen=True)
class SeifertPresentation:
    e: int
    fibers: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "fibers",
                           tuple((int(a), int(b)) for a, b in self.fibers))

    @property
    def m(self) -> int:
        return len(self.fibers)

    def __str__(self):
        return f"{self.e}; " + ", ".join(f"{a}/{b}" for a, b in self.fibers)

    def to_json(self) -> dict:
        return {"e": self.e, "fibers": [list(f) for f in self.fibers]}

    @classmethod
    def from_json(cls, obj) -> "SeifertPresentation":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["e"]), tuple(tuple(f) for f in obj["fibers"]))


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str = ""):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos
        self.text = text


_INT = re.compile(r"\s*([+-]?\d+)\s*")


def parse_presentation(text: str) -> SeifertPresentation:
    """Parse ``e; a1/b1, a2/b2, ...`` or the JSON form."""
    if text.lstrip().startswith("{"):
        try:
            return SeifertPresentation.from_json(text)
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ParseError(f"bad presentation JSON ({exc})", 0, text) from exc

    pos = 0

    def integer():
        nonlocal pos
        mt = _INT.match(text, pos)
        if not mt:
            raise ParseError("expected an integer", pos, text)
        pos = mt.end()
        return int(mt.group(1))

    def expect(ch):
        nonlocal pos
        if pos >= len(text) or text[pos] != ch:
            raise ParseError(f"expected {ch!r}", pos, text)
        pos += 1

    e = integer()
    expect(";")
    fibers = []
    while True:
        a = integer()
        expect("/")
        b = integer()
        fibers.append((a, b))
        if pos == len(text):
            break
        expect(",")
        if not text[pos:].strip():
            raise ParseError("trailing comma", pos - 1, text)
    return SeifertPresentation(e, tuple(fibers))


@dataclass(frozen=True)
class ScalarInvariants:
    A: int
    A_j: tuple[int, ...]
    C: int
    AeC: int

    @property
    def is_qhs(self) -> bool:
        return self.AeC != 0


def scalar_invariants(P: SeifertPresentation) -> ScalarInvariants:
    A = math.prod(a for a, _ in P.fibers)
    A_j = tuple(A // a for a, _ in P.fibers)
    C = sum(b * Aj for (_, b), Aj in zip(P.fibers, A_j))
    return ScalarInvariants(A, A_j, C, A * P.e + C)


def validate_presentation(P: SeifertPresentation, require_qhs: bool = True
                          ) -> ScalarInvariants:
    if not P.fibers:
        raise InvalidFiber("at least one fiber is required")
    for a, b in P.fibers:
        if a < 2:
            raise InvalidFiber(f"fiber ({a},{b}): a must be at least 2")
        if math.gcd(a, b) != 1:
            raise InvalidFiber(f"fiber ({a},{b}) is not coprime")
    inv = scalar_invariants(P)
    if require_qhs and not inv.is_qhs:
        raise NotRationalHomologySphere(
            f"Ae + C = 0 for {P}: H_1 has a free summand")
    return inv


@dataclass(frozen=True)
class Stratification:
    p: int
    s: int
    levels: dict  # t -> list of (input index, a, b), input order within a level
    n: int

    @property
    def ranks(self) -> dict:
        return {t: len(v) for t, v in self.levels.items()}

    def ascending(self) -> list[tuple[int, int, int]]:
        """All fibers ordered by ascending valuation (stable)."""
        return [f for t in sorted(self.levels) for f in self.levels[t]]

    def listing(self) -> list[tuple[int, int, int]]:
        """Levels from s down to 0, the order of the tabulated a_{t,i}."""
        return [f for t in sorted(self.levels, reverse=True)
                for f in self.levels[t]]


def stratify(P: SeifertPresentation, p: int) -> Stratification:
    levels: dict[int, list] = {}
    for i, (a, b) in enumerate(P.fibers):
        levels.setdefault(p_valuation(a, p), []).append((i, a, b))
    s = max(levels)
    n = sum(len(v) for t, v in levels.items() if t > 0)
    return Stratification(p, s, dict(sorted(levels.items())), n)


def presentation_matrix(P: SeifertPresentation) -> list[list[int]]:
    """Rows are relations: a_j s_j + b_j h, then sum s_j - e h."""
    m = P.m
    M = [[0] * (m + 1) for _ in range(m + 1)]
    for j, (a, b) in enumerate(P.fibers):
        M[j][j] = a
        M[j][m] = b
    M[m] = [1] * m + [-P.e]
    return M


def homology_snf(P: SeifertPresentation) -> tuple[AbelianGroup, int]:
    """H_1 as (torsion, free rank) from the Smith form of the presentation."""
    validate_presentation(P, require_qhs=False)
    return torsion_of_cokernel(transpose(presentation_matrix(P)))


def leading_exponent(P: SeifertPresentation, p: int):
    """The exponent c of the leading cyclic factor Z/p^c."""
    inv = validate_presentation(P)
    vals = sorted(p_valuation(a, p) for a, _ in P.fibers)
    return p_valuation(inv.AeC, p) - p_valuation(inv.A, p) + vals[-2] + vals[-1]


def torsion_homology_formula(P: SeifertPresentation, p: int) -> AbelianGroup:
    """Tors_p H_1 = Z/p^c + Z/p^v(a_1) + ... + Z/p^v(a_{n-2}) over the
    ascending reordering, with c = v(Ae+C) - v(A) + v(a_{n-1}) + v(a_n)."""
    validate_presentation(P)
    if P.m < 2:
        raise FormulaInapplicable("the closed formula needs at least 2 fibers")
    c = leading_exponent(P, p)
    vals = sorted(v for v in (p_valuation(a, p) for a, _ in P.fibers) if v > 0)
    exps = [c] + vals[:-2] if len(vals) >= 2 else [c]
    return AbelianGroup(tuple(p**x for x in exps if x > 0))


@dataclass(frozen=True)
class LinkingPairing:
    """Symmetric matrix of Q/Z values on generators of the given orders."""

    orders: tuple[int, ...]
    matrix: tuple[tuple[QZ, ...], ...]
    prime: int = 2
    # extra detail (e.g. the fiber each generator comes from); not compared
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))
        object.__setattr__(self, "matrix", tuple(
            tuple(x if isinstance(x, QZ) else QZ.of(x) for x in row)
            for row in self.matrix))
        n = len(self.orders)
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise ValueError("matrix size must match the number of generators")

    @property
    def size(self) -> int:
        return len(self.orders)

    @property
    def group(self) -> AbelianGroup:
        return AbelianGroup(self.orders)

    @property
    def exponent(self) -> int:
        return max(self.orders, default=1)

    def entry(self, i: int, j: int) -> Fraction:
        return self.matrix[i][j].fraction()

    def formatted(self) -> list[list[str]]:
        den = self.exponent
        out = []
        for row in self.matrix:
            out.append([x.format(math.lcm(den, x.den)) for x in row])
        return out

    def to_json(self) -> dict:
        return {"orders": list(self.orders), "matrix": self.formatted()}

    @classmethod
    def from_json(cls, obj, prime: int = 2) -> "LinkingPairing":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple(obj["orders"]),
                   tuple(tuple(QZ.parse(str(x)) for x in row)
                         for row in obj["matrix"]), prime)

    def __str__(self):
        rows = ["[" + ", ".join(r) + "]" for r in self.formatted()]
        return f"on {self.group}: [" + ", ".join(rows) + "]"


def fiber_constant(b: int, s: int, p: int, literal: bool = False) -> int:
    """c = -b^{-1} mod p^(2s+2); with ``literal`` the plain c = -b."""
    if literal:
        return -b
    mod = p ** (2 * s + 2)
    return (-mod_inverse(b, mod)) % mod


def linking_matrix(P: SeifertPresentation, p: int = 2,
                   literal_c: bool = False) -> LinkingPairing:
    """Block formula for the matrix of the p-primary linking pairing.

    Generators come from the fibers of positive valuation, grouped by level
    t = 1..s (ascending, input order within a level), minus the first fiber
    of the top level, which supplies the constant a_{s,1} c_{s,1} of every
    entry. Entry (x, y) for fibers at levels l, t is
    (a_{s,1} c_{s,1} + [x = y] a_x c_x) / p^(l+t).
    """
    validate_presentation(P)
    if P.m < 2:
        raise FormulaInapplicable("the block formula needs at least 2 fibers")
    st = stratify(P, p)
    s = st.s
    if s == 0:
        raise FormulaInapplicable(f"no fiber order is divisible by {p}")
    group = torsion_homology_formula(P, p)
    top = st.levels[s]
    _, a_s1, b_s1 = top[0]
    base = a_s1 * fiber_constant(b_s1, s, p, literal_c)

    gens = []  # (level, input index, a, b)
    for t in range(1, s + 1):
        fibers = st.levels.get(t, [])
        if t == s:
            fibers = fibers[1:]
        gens.extend((t, i, a, b) for i, a, b in fibers)
    if len(gens) != len(group.orders):
        raise DegenerateOutput(
            f"{len(gens)} generators but Tors_{p} H_1 = {group}")

    # every generator has order p^level except the last, which carries the
    # leading factor Z/p^c
    c = leading_exponent(P, p)
    orders = [p**t for t, *_ in gens]
    if gens:
        orders[-1] = p**c
    rows = []
    for x, (l, _, ax, bx) in enumerate(gens):
        row = []
        for y, (t, _, ay, by) in enumerate(gens):
            num = base + (ax * fiber_constant(bx, s, p, literal_c) if x == y else 0)
            row.append(QZ.of(Fraction(num, p ** (l + t))))
        rows.append(row)
    lam = LinkingPairing(tuple(orders), tuple(map(tuple, rows)), p,
                         {"fibers": [i for _, i, _, _ in gens]})
    from .pairing import Degenerate, DenominatorMismatch, validate_pairing
    try:
        validate_pairing(lam)
    except (Degenerate, DenominatorMismatch) as exc:
        raise DegenerateOutput(f"block formula output invalid for {P}: {exc}")
    return lam


# --- plumbing oracle ----------------------------------------------------------

def negative_continued_fraction(a: int, b: int) -> list[int]:
    """[x_1, ..., x_l], all >= 2, with a/b = x_1 - 1/(x_2 - 1/(...)); 0 < b < a."""
    if not 0 < b < a:
        raise ValueError("need 0 < b < a")
    out = []
    while b:
        x = -(-a // b)
        out.append(x)
        a, b = b, x * b - a
    return out


def plumbing_matrix(P: SeifertPresentation) -> list[list[int]]:
    """Intersection matrix of the star-shaped plumbing bounded by P.

    Fiber (a, b) becomes an arm with weights -x_j from the expansion of
    a/b', b' = b mod a. The central weight absorbs the shift
    e + sum floor(b_i/a_i) so the boundary is the manifold as presented:
    |det Q| = |Ae + C|.
    """
    validate_presentation(P, require_qhs=False)
    arms = [negative_continued_fraction(a, b % a) for a, b in P.fibers]
    size = 1 + sum(map(len, arms))
    Q = [[0] * size for _ in range(size)]
    Q[0][0] = P.e + sum(b // a for a, b in P.fibers)
    v = 1
    for arm in arms:
        prev = 0
        for x in arm:
            Q[v][v] = -x
            Q[v][prev] = Q[prev][v] = 1
            prev = v
            v += 1
    return Q


# sign of the plumbing pairing relative to the block formula; calibrated once
# on the catalog presentations (see tests/test_seifert.py)
ORACLE_SIGN = 1


def linking_from_plumbing(Q: list[list[int]], p: int = 2,
                          sign: int | None = None) -> LinkingPairing:
    """p-primary part of the pairing (u, v) -> sign * u^T Q^-1 v on coker Q."""
    if det(Q) == 0:
        raise NotRationalHomologySphere("plumbing matrix is singular")
    sign = ORACLE_SIGN if sign is None else sign
    n = len(Q)
    D, U, V = smith_normal_form(Q)
    # coker Q -> (+) Z/d_i is x -> U x, so generator i is column i of U^-1
    Uinv = inverse_fraction(U)
    Qinv = inverse_fraction(Q)
    gens, orders = [], []
    for i in range(n):
        d = D[i][i]
        v = p_valuation(d, p)
        if v == 0:
            continue
        w = d // p**v
        gens.append([Uinv[r][i] * w for r in range(n)])
        orders.append(p**v)
    rows = []
    for g in gens:
        Qg = [sum(Qinv[r][c] * g[c] for c in range(n)) for r in range(n)]
        rows.append(Qg)
    mat = [[QZ.of(sign * sum(gi[r] * Qh[r] for r in range(n))) for Qh in rows]
           for gi in gens]
    return LinkingPairing(tuple(orders), tuple(map(tuple, mat)), p)


def linking_pairing(P: SeifertPresentation, p: int = 2,
                    oracle: bool = False) -> LinkingPairing:
    """Formula path with automatic fallback to the plumbing oracle."""
    if not oracle:
        try:
            return linking_matrix(P, p)
        except (FormulaInapplicable, DegenerateOutput):
            pass
    validate_presentation(P)
    return linking_from_plumbing(plumbing_matrix(P), p)
