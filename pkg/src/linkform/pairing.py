"""Linking pairings on 2-groups: the generator blocks A(n,k), E0(k), E1(k),
direct sums, validation, 2-adic block reduction and candidate enumeration."""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import QZ, mod_inverse, p_valuation, smith_normal_form
from .seifert import LinkingPairing, ParseError


class InvalidGenerator(ValueError):
    pass


class Asymmetric(ValueError):
    pass


class DenominatorMismatch(ValueError):
    pass


class Degenerate(ValueError):
    pass


KIND_ORDER = {"A": 0, "E0": 1, "E1": 2}


def unit_residue_modulus(k: int) -> int:
    """Odd residues of Z/2^k up to unit squares live mod 2^min(k,3)."""
    return 2 ** min(k, 3)


@dataclass(frozen=True)
class GeneratorBlock:
    kind: str
    k: int
    n: int = 0

    def __post_init__(self):
        if self.kind not in KIND_ORDER:
            raise InvalidGenerator(f"unknown block kind {self.kind!r}")
        if self.k < 1:
            raise InvalidGenerator("k must be positive")
        if self.kind == "A":
            if self.n % 2 == 0:
                raise InvalidGenerator(f"A({self.n},{self.k}) needs odd n")
            object.__setattr__(self, "n", self.n % unit_residue_modulus(self.k))
        else:
            object.__setattr__(self, "n", 0)

    @property
    def key(self):
        return (self.k, KIND_ORDER[self.kind], self.n)

    @property
    def orders(self) -> tuple[int, ...]:
        return (2**self.k,) * (1 if self.kind == "A" else 2)

    def __str__(self):
        if self.kind == "A":
            return f"A({self.n},{self.k})"
        return f"{self.kind}({self.k})"


@dataclass(frozen=True)
class BlockSum:
    blocks: tuple[GeneratorBlock, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks",
                           tuple(sorted(self.blocks, key=lambda b: b.key)))

    @property
    def key(self):
        return tuple(b.key for b in self.blocks)

    def __lt__(self, other):
        return self.key < other.key

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(n for b in self.blocks for n in b.orders)

    def __add__(self, other: "BlockSum") -> "BlockSum":
        return BlockSum(self.blocks + other.blocks)

    def __str__(self):
        return "+".join(map(str, self.blocks)) or "0"


_BLOCK = re.compile(r"\s*(?:(E0|E1)\(\s*(\d+)\s*\)|A\(\s*([+-]?\d+)\s*,\s*(\d+)\s*\))\s*")


def parse_blocksum(text: str) -> BlockSum:
    """Parse ``E0(3)+E1(3)+A(5,2)``; ``0`` or an empty string is the empty sum."""
    if text.strip() in ("", "0"):
        return BlockSum()
    blocks = []
    pos = 0
    while True:
        mt = _BLOCK.match(text, pos)
        if not mt:
            raise ParseError("expected E0(k), E1(k) or A(n,k)", pos, text)
        try:
            if mt.group(1):
                blocks.append(GeneratorBlock(mt.group(1), int(mt.group(2))))
            else:
                blocks.append(GeneratorBlock("A", int(mt.group(4)), int(mt.group(3))))
        except InvalidGenerator as exc:
            raise ParseError(str(exc), pos, text) from exc
        pos = mt.end()
        if pos == len(text):
            return BlockSum(tuple(blocks))
        if text[pos] != "+":
            raise ParseError("expected '+'", pos, text)
        pos += 1


def generator(g: GeneratorBlock) -> LinkingPairing:
    d = 2**g.k
    if g.kind == "A":
        mat = ((QZ(g.n, d),),)
    elif g.kind == "E0":
        mat = ((QZ(0), QZ(1, d)), (QZ(1, d), QZ(0)))
    else:
        mat = ((QZ(2, d), QZ(1, d)), (QZ(1, d), QZ(2, d)))
    return LinkingPairing(g.orders, mat, 2)


def trivial_pairing(prime: int = 2) -> LinkingPairing:
    return LinkingPairing((), (), prime)


def direct_sum(lam: LinkingPairing, mu: LinkingPairing) -> LinkingPairing:
    if lam.size and mu.size and lam.prime != mu.prime:
        raise ValueError("direct sum of pairings at different primes")
    n, m = lam.size, mu.size
    zero = QZ(0)
    rows = [tuple(r) + (zero,) * m for r in lam.matrix]
    rows += [(zero,) * n + tuple(r) for r in mu.matrix]
    return LinkingPairing(lam.orders + mu.orders, tuple(rows),
                          lam.prime if n else mu.prime)


def blocksum_pairing(B: BlockSum) -> LinkingPairing:
    out = trivial_pairing()
    for g in B.blocks:
        out = direct_sum(out, generator(g))
    return out


def validate_pairing(lam: LinkingPairing) -> LinkingPairing:
    n = lam.size
    for i in range(n):
        for j in range(i + 1, n):
            if lam.matrix[i][j] != lam.matrix[j][i]:
                raise Asymmetric(f"entries ({i},{j}) and ({j},{i}) differ")
    for i in range(n):
        for j in range(n):
            g = math.gcd(lam.orders[i], lam.orders[j])
            if g % lam.matrix[i][j].den:
                raise DenominatorMismatch(
                    f"entry ({i},{j}) = {lam.matrix[i][j]} is not defined on "
                    f"generators of orders {lam.orders[i]}, {lam.orders[j]}")
    # x -> lam(x, .) is injective iff its image, the column span of N*Lam
    # modulo N, has |G| elements
    N = lam.exponent
    B = [[int(lam.entry(i, j) * N) for j in range(n)] for i in range(n)]
    stacked = [B[r] + [N * (r == c) for c in range(n)] for r in range(n)]
    D, _, _ = smith_normal_form(stacked) if n else ([], None, None)
    index = math.prod(D[i][i] for i in range(n))
    if N**n // index != math.prod(lam.orders):
        raise Degenerate(f"pairing {lam} is degenerate")
    return lam


# --- 2-adic block reduction -----------------------------------------------------

@dataclass
class Reduction:
    """Result of block_diagonalize: the block labels, the reduced blocks and
    the basis (rows = new generators in old coordinates)."""

    blocks: BlockSum
    basis: list[list[int]]
    orders: list[int]
    pieces: list[tuple[int, ...]]  # generator indices (into basis) per block


def _gram(lam: LinkingPairing, basis) -> list[list[Fraction]]:
    n = lam.size
    M = [[lam.entry(i, j) for j in range(n)] for i in range(n)]
    return [[sum(u[i] * M[i][j] * v[j] for i in range(n) for j in range(n)) % 1
             for v in basis] for u in basis]


def _den_exp(x: Fraction) -> int:
    return p_valuation((x % 1).denominator, 2)


def block_diagonalize(lam: LinkingPairing) -> Reduction:
    """Orthogonal splitting into 1x1 and 2x2 blocks by 2-adic reduction.

    Repeatedly take the entry with the largest denominator 2^v. An odd
    diagonal entry splits off a cyclic block; otherwise the 2x2 block on an
    odd off-diagonal entry splits off and is labelled E0(v) or E1(v) by its
    determinant mod 8.
    """
    validate_pairing(lam)
    if lam.prime != 2:
        raise ValueError("block reduction is implemented for 2-groups only")
    n = lam.size
    basis = [[int(i == j) for j in range(n)] for i in range(n)]
    orders = list(lam.orders)
    M = [[lam.entry(i, j) for j in range(n)] for i in range(n)]
    live = list(range(n))
    blocks, pieces = [], []

    def gram(u, v):
        return sum(u[i] * M[i][j] * v[j] for i in range(n) for j in range(n)) % 1

    def axpy(dst, coeffs, srcs):
        for c, s in zip(coeffs, srcs):
            basis[dst] = [x - c * y for x, y in zip(basis[dst], basis[s])]

    while live:
        G = {(i, j): gram(basis[i], basis[j]) for i in live for j in live}
        v = max(_den_exp(x) for x in G.values())
        diag = [i for i in live if _den_exp(G[i, i]) == v]
        if diag:
            i = diag[0]
            d = 2**v
            u = int(G[i, i] * d)
            uinv = mod_inverse(u, d) if d > 1 else 0
            for j in live:
                if j != i:
                    c = int(G[i, j] * d) * uinv % d if d > 1 else 0
                    axpy(j, [c], [i])
            blocks.append(GeneratorBlock("A", v, u))
            pieces.append((i,))
            live.remove(i)
            continue
        i, j = next((i, j) for i in live for j in live
                    if i < j and _den_exp(G[i, j]) == v)
        d = 2**v
        a, b, c = (int(G[i, i] * d), int(G[i, j] * d), int(G[j, j] * d))
        dt = a * c - b * b
        dinv = mod_inverse(dt, d)
        for l in live:
            if l in (i, j):
                continue
            ri, rj = int(G[i, l] * d), int(G[j, l] * d)
            # solve [[a, b], [b, c]] (x, y) = (ri, rj) mod d
            x = (c * ri - b * rj) * dinv % d
            y = (a * rj - b * ri) * dinv % d
            axpy(l, [x, y], [i, j])
        kind = "E0" if dt % 8 == 7 or v == 1 else "E1"
        blocks.append(GeneratorBlock(kind, v))
        pieces.append((i, j))
        live.remove(i)
        live.remove(j)
    return Reduction(BlockSum(tuple(blocks)), basis, orders, pieces)


def reduced_blocks(lam: LinkingPairing, red: Reduction) -> LinkingPairing:
    """The pairing in the reduced basis, generators ordered block by block."""
    idx = [i for piece in red.pieces for i in piece]
    basis = [red.basis[i] for i in idx]
    mat = _gram(lam, basis)
    return LinkingPairing(tuple(red.orders[i] for i in idx),
                          tuple(tuple(QZ.of(x) for x in r) for r in mat), lam.prime)


# --- enumeration ------------------------------------------------------------------

def _level_options(k: int, r: int) -> list[tuple[GeneratorBlock, ...]]:
    residues = range(1, unit_residue_modulus(k), 2)
    out = []
    for n_e0 in range(r // 2 + 1):
        for n_e1 in range((r - 2 * n_e0) // 2 + 1):
            d = r - 2 * n_e0 - 2 * n_e1
            for diag in itertools.combinations_with_replacement(residues, d):
                out.append(tuple(GeneratorBlock("A", k, x) for x in diag)
                           + (GeneratorBlock("E0", k),) * n_e0
                           + (GeneratorBlock("E1", k),) * n_e1)
    return out


def enumerate_candidates(G):
    """Every BlockSum whose underlying group is G (a 2-group), in canonical
    order."""
    orders = G.orders if hasattr(G, "orders") else tuple(G)
    ranks: dict[int, int] = {}
    for n in orders:
        k = p_valuation(n, 2)
        if n != 2**k:
            raise ValueError(f"{n} is not a power of 2")
        ranks[k] = ranks.get(k, 0) + 1
    per_level = [_level_options(k, r) for k, r in sorted(ranks.items())]
    sums = [BlockSum(tuple(itertools.chain.from_iterable(choice)))
            for choice in itertools.product(*per_level)]
    yield from sorted(sums, key=lambda B: B.key)
