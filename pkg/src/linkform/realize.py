"""Seifert realizations of linking pairings on 2-groups: the generator catalog,
the sum patterns built from it, verification by invariant tables, and a
bounded search over presentations with power-of-2 fibers."""
from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from .algebra import p_valuation
from .invariants import InvariantTable, blocksum_table, decompose, invariant_table
from .pairing import (BlockSum, GeneratorBlock, block_diagonalize, blocksum_pairing,
                      enumerate_candidates, parse_blocksum)
from .seifert import (FormulaInapplicable, LinkingPairing, SeifertPresentation,
                      homology_snf, linking_pairing, torsion_homology_formula,
                      validate_presentation)


class NotInCatalog(LookupError):
    pass


class Exhausted(LookupError):
    def __init__(self, tried: int):
        super().__init__(f"no realization found after {tried} candidates")
        self.tried = tried


def _A_class(g: GeneratorBlock) -> int | None:
    """+5 or -5 when the cyclic block A(n,k) is in that unit-square class."""
    mod = 2 ** min(g.k, 3)
    if (g.n + 5) % mod == 0:
        return -5
    if (g.n - 5) % mod == 0:
        return 5
    return None


def realize_generator(g: GeneratorBlock) -> SeifertPresentation:
    k = g.k
    if g.kind == "E0":
        return SeifertPresentation(1, ((2**k, 2**k - 1), (2**k, 1), (2**k, 1)))
    if g.kind == "E1":
        return SeifertPresentation(1, ((2**k, 2**k - 1),) * 3)
    cls = _A_class(g)
    if cls == -5:
        return SeifertPresentation(1, ((2 ** (k + 2), 1), (2**k, 1)))
    if cls == 5:
        return SeifertPresentation(1, ((2 ** (k + 2), -1), (2**k, -1)))
    raise NotInCatalog(f"{g} is not in the +-5 classes of the catalog")


def sum_of_fives_presentation(n_minus: int, n_plus: int, k: int) -> SeifertPresentation:
    """(2^2k, 1) followed by n_minus fibers (2^k, 1) and n_plus fibers (2^k, -1)."""
    return SeifertPresentation(
        1, ((2 ** (2 * k), 1),) + ((2**k, 1),) * n_minus + ((2**k, -1),) * n_plus)


def e_family_presentation(k: int, j: int) -> SeifertPresentation:
    """(2^k, 2^k - 1) followed by j fibers (2^k, 1)."""
    return SeifertPresentation(1, ((2**k, 2**k - 1),) + ((2**k, 1),) * j)


def decompose_family(k: int, j: int, blockwise: bool = False) -> BlockSum:
    """Block sum of the 2-primary pairing of ``e_family_presentation(k, j)``.

    With ``blockwise`` the table comes from a 2-adic block reduction and
    additivity instead of enumerating the whole group.
    """
    lam = linking_pairing(e_family_presentation(k, j), 2)
    if not blockwise:
        return decompose(lam)
    T = blocksum_table(block_diagonalize(lam).blocks)
    for B in enumerate_candidates(lam.group):
        if blocksum_table(B) == T:
            return B
    raise AssertionError(f"no candidate for family ({k}, {j})")


def predicted_even_family(k: int, t: int) -> BlockSum:
    """E0(k)^t for t = 0, 1 mod 4 and E0(k)^(t-1) + E1(k) for t = 2, 3 mod 4."""
    e0, e1 = GeneratorBlock("E0", k), GeneratorBlock("E1", k)
    if k == 1 or t % 4 in (0, 1):
        return BlockSum((e0,) * t)
    return BlockSum((e0,) * (t - 1) + (e1,))


def family_report(ks=(1, 2, 3, 4), js=range(1, 13)) -> dict:
    """Computed decompositions of the (2^k, 2^k - 1) + j x (2^k, 1) family."""
    rows, pattern_ok = [], True
    for k in ks:
        for j in js:
            B = decompose_family(k, j, blockwise=True)
            row = {"k": k, "j": j, "fibers": j + 1, "presentation": str(e_family_presentation(k, j)),
                   "homology": str(two_part_group(e_family_presentation(k, j))),
                   "blocks": str(B)}
            if j % 2 == 0:
                row["matches_pattern"] = blocksum_table(B) == blocksum_table(
                    predicted_even_family(k, j // 2))
            else:
                cyc = [g for g in B.blocks if g.kind == "A"]
                rest = [g for g in B.blocks if g.kind != "A"]
                row["matches_pattern"] = (len(cyc) == 1 and cyc[0].k > k
                                          and all(g.k == k for g in rest)
                                          and 2 * len(rest) == j - 1)
            pattern_ok &= row["matches_pattern"]
            rows.append(row)
    pattern = ("even j = 2t: E0(k)^t when t = 0, 1 mod 4 and E0(k)^(t-1) + E1(k) when "
               "t = 2, 3 mod 4 (at k = 1 the two generators coincide); odd j: "
               "(j - 1)/2 rank-2 blocks on (Z/2^k)^2 plus one cyclic block of order "
               "above 2^k")
    return {"rows": rows, "parity_pattern": pattern, "pattern_holds": pattern_ok}


def realize_sum_patterns(pattern: str, **params) -> SeifertPresentation:
    """``pattern`` is ``"fives"`` (n_minus, n_plus, k) or ``"E"`` (k, j)."""
    if pattern == "fives":
        return sum_of_fives_presentation(params["n_minus"], params["n_plus"], params["k"])
    if pattern == "E":
        return e_family_presentation(params["k"], params["j"])
    raise ValueError(f"unknown pattern {pattern!r}")


def two_part_group(P: SeifertPresentation):
    try:
        return torsion_homology_formula(P, 2)
    except FormulaInapplicable:
        return homology_snf(P)[0].p_part(2)


@dataclass
class Verdict:
    ok: bool
    presentation: SeifertPresentation
    homology_ok: bool
    table_manifold: InvariantTable
    table_target: InvariantTable
    path: str
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"realizes": self.ok, "presentation": str(self.presentation),
                "homology_ok": self.homology_ok, "path": self.path,
                "table_manifold": self.table_manifold.to_json(),
                "table_target": self.table_target.to_json(), **self.detail}


def verify_realization(P: SeifertPresentation, lam: LinkingPairing,
                       oracle: bool = False) -> Verdict:
    """Compare the 2-primary linking pairing of P with lam by tables."""
    validate_presentation(P)
    mine = linking_pairing(P, 2, oracle=oracle)
    path = "plumbing" if oracle or "fibers" not in mine.meta else "formula"
    hom = two_part_group(P) == lam.group
    Tm, Tt = invariant_table(mine), invariant_table(lam)
    return Verdict(hom and Tm == Tt, P, hom, Tm, Tt, path,
                   {"homology": str(two_part_group(P))})


def search_vocabulary(top: int) -> list[tuple[int, int]]:
    vocab = []
    for j in range(top, 0, -1):
        for b in (1, 2**j - 1, -1):
            if (2**j, b) not in vocab:
                vocab.append((2**j, b))
    return vocab


def candidate_presentations(max_fibers: int, top: int):
    vocab = search_vocabulary(top)
    for count in range(1, max_fibers + 1):
        for combo in itertools.combinations_with_replacement(vocab, count):
            fibers = tuple(sorted(combo, key=lambda f: (-f[0], -f[1])))
            yield SeifertPresentation(1, fibers)


@dataclass(frozen=True)
class SearchConfig:
    """Bounds for :func:`search_realization`."""

    max_fibers: int = 4
    bump: int = 2       # fiber orders go up to 2^(s + bump)
    workers: int = 1


def search_realization(lam: LinkingPairing,
                       config: SearchConfig = SearchConfig()) -> SeifertPresentation:
    """First presentation, in enumeration order, realizing lam.

    Candidates have e = 1 and fibers (2^j, 1), (2^j, 2^j - 1), (2^j, -1) for
    j <= s + bump, at most ``max_fibers`` of them, where 2^s is the exponent of
    lam's group; they are screened by 2-primary homology before the tables
    are compared.
    """
    max_fibers, bump, workers = config.max_fibers, config.bump, config.workers
    s = p_valuation(lam.exponent, 2)
    target = invariant_table(lam)
    G = lam.group
    tried = 0

    def check(P):
        if P.m >= 1 and validate_presentation(P, require_qhs=False).AeC == 0:
            return False
        if two_part_group(P) != G:
            return False
        return invariant_table(linking_pairing(P, 2)) == target

    candidates = candidate_presentations(max_fibers, max(s + bump, 1))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            while True:
                batch = list(itertools.islice(candidates, 64 * workers))
                if not batch:
                    break
                for P, hit in zip(batch, ex.map(check, batch)):
                    tried += 1
                    if hit:
                        return P
    else:
        for P in candidates:
            tried += 1
            if check(P):
                return P
    raise Exhausted(tried)


def pattern_candidates(G) -> list[SeifertPresentation]:
    """Catalog-family presentations whose 2-primary homology could be G."""
    orders = set(G.orders)
    if len(orders) != 1:
        return []
    n = orders.pop()
    k, r = p_valuation(n, 2), len(G.orders)
    out = []
    if r % 2 == 0:
        out.append(e_family_presentation(k, r))
        if r == 2:
            out.append(SeifertPresentation(1, ((2**k, 2**k - 1),) * 3))
    out.extend(sum_of_fives_presentation(r - t, t, k) for t in range(r + 1))
    if r == 1:
        out.extend([SeifertPresentation(1, ((2 ** (k + 2), 1), (2**k, 1))),
                    SeifertPresentation(1, ((2 ** (k + 2), -1), (2**k, -1)))])
    return out


def known_realization(lam: LinkingPairing) -> SeifertPresentation | None:
    """A catalog-family presentation realizing lam, if one does."""
    for P in pattern_candidates(lam.group):
        if verify_realization(P, lam):
            return P
    return None


# --- catalog ---------------------------------------------------------------------

@dataclass(frozen=True)
class RealizationEntry:
    target: BlockSum
    presentation: SeifertPresentation
    source: str

    def to_json(self) -> dict:
        return {"target": str(self.target), "presentation": str(self.presentation),
                "source": self.source}


def build_catalog(kmax: int = 6) -> list[RealizationEntry]:
    entries = []
    for k in range(1, kmax + 1):
        for kind, src in (("E0", "three fibers, one twisted"), ("E1", "three twisted fibers")):
            g = GeneratorBlock(kind, k)
            entries.append(RealizationEntry(BlockSum((g,)), realize_generator(g), src))
        for n, b in ((-5, 1), (5, -1)):
            P = SeifertPresentation(1, ((2 ** (k + 2), b), (2**k, b)))
            entries.append(RealizationEntry(
                BlockSum((GeneratorBlock("A", k, n),)), P, f"two fibers, class {n:+d}"))
    e3 = GeneratorBlock("E0", 3), GeneratorBlock("E1", 3)
    entries.append(RealizationEntry(BlockSum(e3), e_family_presentation(3, 4), "five-fiber E family"))
    return entries


def sum_of_fives_claims(k: int):
    """The three sum-of-fives presentations with their claimed pairings."""
    m5, p5 = GeneratorBlock("A", k, -5), GeneratorBlock("A", k, 5)
    return [
        ("(-5)+(-5)", BlockSum((m5, m5)), sum_of_fives_presentation(2, 0, k)),
        ("(5)+(5)", BlockSum((p5, p5)), sum_of_fives_presentation(0, 2, k)),
        ("(-5)+(5)", BlockSum((m5, p5)), sum_of_fives_presentation(1, 1, k)),
    ]


def catalog_document(kmax: int = 6, claim_ks=(1, 2, 3, 4)) -> dict:
    """The shipped catalog: verified entries plus recorded claim verdicts."""
    entries = []
    for entry in build_catalog(kmax):
        v = verify_realization(entry.presentation, blocksum_pairing(entry.target))
        if not v:
            raise AssertionError(f"catalog entry fails: {entry}")
        entries.append(entry.to_json())
    checks = []
    for k in claim_ks:
        for label, target, P in sum_of_fives_claims(k):
            v = verify_realization(P, blocksum_pairing(target))
            checks.append({"claim": f"sum of fives {label}", "k": k, "target": str(target),
                           "presentation": str(P), "verdict": v.ok,
                           "homology": v.detail["homology"]})
    return {"entries": entries, "checks": checks}


def load_catalog() -> dict:
    text = resources.files("linkform").joinpath("data/catalog.json").read_text()
    return json.loads(text)


def catalog_entries() -> list[RealizationEntry]:
    from .seifert import parse_presentation
    return [RealizationEntry(parse_blocksum(e["target"]), parse_presentation(e["presentation"]),
                             e["source"]) for e in load_catalog()["entries"]]
