"""Gauss-sum invariants of linking pairings on 2-groups.

tau_k(lam) is the Gauss sum of 2^(k-1) q, q(x) = lam(x, x); sigma_k is its
argument in eighth-turns (INF when the sum vanishes) and r_k the number of
cyclic factors of order exactly 2^k. The sequence of (r_k, sigma_k) is a
complete additive invariant, which is what every decision below rests on.
"""
from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .algebra import INF, AbelianGroup, CyclotomicSum, cyclotomic_arg_eighths, p_valuation
from .pairing import (BlockSum, GeneratorBlock, enumerate_candidates,
                      generator, validate_pairing)
from .seifert import LinkingPairing

DEFAULT_MAX_GROUP = 2**28
CHUNK = 2**18  # elements handled per vectorized slice


class ResourceBound(RuntimeError):
    """Group too large to enumerate; split it into orthogonal blocks and
    multiply the block sums instead."""


class NoCandidate(RuntimeError):
    pass


def max_group() -> int:
    return int(os.environ.get("LINKFORM_MAX_GROUP", DEFAULT_MAX_GROUP))


def _check_size(order: int):
    if order > max_group():
        raise ResourceBound(f"group of order {order} exceeds the enumeration "
                            f"cap {max_group()} (LINKFORM_MAX_GROUP)")


def gauss_sum(G: AbelianGroup | tuple, q: Callable) -> CyclotomicSum:
    """Unnormalized sum of exp(2 pi i q(x)) over x in G by plain iteration.

    ``q`` maps a coordinate tuple to a rational (taken mod 1) whose
    denominator is a power of 2. Used as the reference path; for pairings use
    :func:`quadratic_gauss_sum`.
    """
    orders = G.orders if isinstance(G, AbelianGroup) else tuple(G)
    _check_size(math.prod(orders))
    phases = [Fraction(q(x)) % 1 for x in itertools.product(*map(range, orders))]
    m = max([1] + [p_valuation(f.denominator, 2) for f in phases])
    N = 2**m
    counts = [0] * N
    for f in phases:
        counts[int(f * N)] += 1
    return CyclotomicSum.from_buckets(counts, m)


def _coefficients(lam: LinkingPairing, scale: int):
    n = lam.size
    diag = [(scale * lam.entry(i, i)) % 1 for i in range(n)]
    cross = {(i, j): (2 * scale * lam.entry(i, j)) % 1
             for i in range(n) for j in range(i + 1, n)}
    dens = [f.denominator for f in diag] + [f.denominator for f in cross.values()]
    m = max([1] + [p_valuation(d, 2) for d in dens])
    N = 2**m
    Dc = [int(f * N) for f in diag]
    Oc = np.zeros((n, n), dtype=np.int64)
    for (i, j), f in cross.items():
        Oc[i, j] = Oc[j, i] = int(f * N)
    return m, N, Dc, Oc


def _grid(orders):
    if not orders:
        return np.zeros((0, 1), dtype=np.int64)
    axes = np.meshgrid(*[np.arange(n, dtype=np.int64) for n in orders], indexing="ij")
    return np.stack([a.ravel() for a in axes])


def quadratic_gauss_sum(lam: LinkingPairing, scale: int = 1,
                        workers: int = 1) -> CyclotomicSum:
    """Unnormalized Gauss sum of scale * q_lam by direct enumeration.

    Phases are counted in integer buckets (one per residue mod 2^m) and
    converted to a cyclotomic integer at the end, so the result does not
    depend on how the element space is split across workers.
    """
    orders = lam.orders
    n = len(orders)
    _check_size(math.prod(orders))
    m, N, Dc, Oc = _coefficients(lam, scale)

    # split coordinates: the inner ones are vectorized, the outer looped over
    inner, size = n, 1
    while inner > 0 and size * orders[inner - 1] <= CHUNK:
        inner -= 1
        size *= orders[inner]
    outer_idx, inner_idx = list(range(inner)), list(range(inner, n))
    X = _grid([orders[i] for i in inner_idx])
    base = np.zeros(X.shape[1], dtype=np.int64)
    for a, i in enumerate(inner_idx):
        base = (base + Dc[i] * (X[a] * X[a] % N)) % N
        for b in range(a + 1, len(inner_idx)):
            j = inner_idx[b]
            if Oc[i, j]:
                base = (base + Oc[i, j] * (X[a] * X[b] % N)) % N

    def scan(points) -> np.ndarray:
        counts = np.zeros(N, dtype=np.int64)
        for xo in points:
            const = 0
            w = np.zeros(len(inner_idx), dtype=np.int64)
            for a, i in enumerate(outer_idx):
                xi = xo[a]
                const += Dc[i] * xi * xi
                for b in range(a + 1, len(outer_idx)):
                    const += int(Oc[i, outer_idx[b]]) * xi * xo[b]
                for c, j in enumerate(inner_idx):
                    w[c] += int(Oc[i, j]) * xi
            w %= N
            ph = base + const % N
            for c in range(len(inner_idx)):
                if w[c]:
                    ph = ph + w[c] * X[c] % N
            counts += np.bincount(ph % N, minlength=N)
        return counts

    points = list(itertools.product(*[range(orders[i]) for i in outer_idx]))
    if workers > 1 and len(points) > 1:
        parts = [points[r::workers] for r in range(workers)]
        with ThreadPoolExecutor(workers) as ex:
            counts = sum(ex.map(scan, parts))
    else:
        counts = scan(points)
    return CyclotomicSum.from_buckets([int(c) for c in counts], m)


def tau(lam: LinkingPairing, k: int, workers: int = 1) -> CyclotomicSum:
    """Unnormalized tau_k; divide by sqrt|G| for the normalized value."""
    if k < 1:
        raise ValueError("k must be positive")
    return quadratic_gauss_sum(lam, 2 ** (k - 1), workers)


def sigma_r(lam: LinkingPairing, k: int, workers: int = 1):
    r = lam.group.rank_at(2, k)
    return r, cyclotomic_arg_eighths(tau(lam, k, workers))


# --- tables ---------------------------------------------------------------------

def add_sigma(x, y):
    if x == INF or y == INF:
        return INF
    return (x + y) % 8


def neg_sigma(x):
    return INF if x == INF else (-x) % 8


@dataclass(frozen=True)
class InvariantTable:
    """k -> (r_k, sigma_k) for k = 1..kmax, implicitly (0, 0) beyond."""

    entries: tuple[tuple[int, object], ...] = ()

    @property
    def kmax(self) -> int:
        return len(self.entries)

    def __getitem__(self, k: int):
        if 1 <= k <= len(self.entries):
            return self.entries[k - 1]
        return (0, 0)

    def _trimmed(self):
        e = list(self.entries)
        while e and e[-1] == (0, 0):
            e.pop()
        return tuple(e)

    def __eq__(self, other):
        if not isinstance(other, InvariantTable):
            return NotImplemented
        return self._trimmed() == other._trimmed()

    def __hash__(self):
        return hash(self._trimmed())

    def __add__(self, other: "InvariantTable") -> "InvariantTable":
        return table_sum(self, other)

    def to_json(self) -> dict:
        return {str(k): [r, "inf" if s == INF else s]
                for k, (r, s) in enumerate(self.entries, 1)}

    @classmethod
    def from_json(cls, obj) -> "InvariantTable":
        if isinstance(obj, str):
            obj = json.loads(obj)
        kmax = max(map(int, obj), default=0)
        entries = []
        for k in range(1, kmax + 1):
            r, s = obj.get(str(k), (0, 0))
            entries.append((int(r), INF if s == "inf" else int(s) % 8))
        return cls(tuple(entries))

    def format_text(self) -> str:
        ks = range(1, self.kmax + 1)
        cells = [("k", [str(k) for k in ks]),
                 ("r", [str(self[k][0]) for k in ks]),
                 ("sigma", ["inf" if self[k][1] == INF else str(self[k][1]) for k in ks])]
        w = max([len(c) for _, row in cells for c in row] + [1])
        return "\n".join(f"{name:>5} || " + " | ".join(c.rjust(w) for c in row) + " | ..."
                         for name, row in cells)


def table_sum(T: InvariantTable, U: InvariantTable) -> InvariantTable:
    K = max(T.kmax, U.kmax)
    return InvariantTable(tuple((T[k][0] + U[k][0], add_sigma(T[k][1], U[k][1]))
                                for k in range(1, K + 1)))


def invariant_table(lam: LinkingPairing, workers: int = 1) -> InvariantTable:
    if lam.prime != 2:
        raise ValueError("invariants are defined for 2-groups")
    s = p_valuation(lam.exponent, 2)
    return InvariantTable(tuple(sigma_r(lam, k, workers) for k in range(1, s + 2)))


@lru_cache(maxsize=None)
def generator_table(g: GeneratorBlock) -> InvariantTable:
    return invariant_table(generator(g))


def blocksum_table(B: BlockSum) -> InvariantTable:
    """Table of a block sum by additivity over its generators."""
    T = InvariantTable()
    for g in B.blocks:
        T = table_sum(T, generator_table(g))
    return T


def is_isomorphic(lam: LinkingPairing, mu: LinkingPairing) -> bool:
    return invariant_table(lam) == invariant_table(mu)


@dataclass(frozen=True)
class TableClassification:
    holes: frozenset
    i8: frozenset
    blanks: frozenset


def classify_table(T: InvariantTable, kmax: int | None = None) -> TableClassification:
    """Holes, finite-sigma entries and blanks for k = 1..kmax (default one past
    the table's support, so the first implicit hole is listed)."""
    K = kmax if kmax is not None else T.kmax + 1
    holes = frozenset(k for k in range(1, K + 1) if T[k][0] == 0)
    i8 = frozenset(k for k in range(1, K + 1) if T[k][0] and T[k][1] != INF)
    return TableClassification(holes, i8, holes | i8)


def is_blank(T: InvariantTable, k: int) -> bool:
    r, s = T[k]
    return r == 0 or s != INF


WILDCARD = "*"


def difference_spec(T: InvariantTable, Tp: InvariantTable):
    """Per k: (r difference, fixed sigma or WILDCARD) describing S_{lam,lam'}."""
    K = max(T.kmax, Tp.kmax)
    spec = {}
    for k in range(1, K + 1):
        r = T[k][0] - Tp[k][0]
        if is_blank(Tp, k):
            s = INF if T[k][1] == INF else (T[k][1] - Tp[k][1]) % 8
        else:
            s = WILDCARD
        spec[k] = (r, s)
    return spec


def _matches(spec, T: InvariantTable) -> bool:
    K = max([T.kmax] + list(spec))
    for k in range(1, K + 1):
        r, s = spec.get(k, (0, 0))
        if T[k][0] != r:
            return False
        if s != WILDCARD and T[k][1] != s:
            return False
    return True


def summand_test(lam: LinkingPairing, lamp: LinkingPairing):
    """Whether lamp is an orthogonal summand of lam; returns (bool, witness
    BlockSum or None). Admissibility of the difference table is decided by
    finding a pairing that realizes it."""
    T, Tp = invariant_table(lam), invariant_table(lamp)
    K = max(T.kmax, Tp.kmax)
    if any(T[k][0] < Tp[k][0] for k in range(1, K + 1)):
        return False, None
    if any(is_blank(T, k) and not is_blank(Tp, k) for k in range(1, K + 1)):
        return False, None
    spec = difference_spec(T, Tp)
    orders = tuple(2**k for k in range(1, K + 1) for _ in range(spec[k][0]))
    for mu in enumerate_candidates(orders):
        if _matches(spec, blocksum_table(mu)):
            return True, mu
    return False, None


def decompose(lam: LinkingPairing) -> BlockSum:
    """Canonically least generator block sum isomorphic to lam."""
    validate_pairing(lam)
    T = invariant_table(lam)
    for B in enumerate_candidates(lam.group):
        if blocksum_table(B) == T:
            return B
    raise NoCandidate(f"no block sum on {lam.group} has table {T.to_json()}")

