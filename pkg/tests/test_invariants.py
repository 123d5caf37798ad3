import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from linkform.algebra import INF, AbelianGroup, CyclotomicSum, det
from linkform.invariants import (WILDCARD, InvariantTable, NoCandidate, ResourceBound,
                                 add_sigma, blocksum_table, classify_table, decompose,
                                 difference_spec, gauss_sum, invariant_table, is_isomorphic,
                                 neg_sigma, quadratic_gauss_sum, sigma_r, summand_test,
                                 table_sum, tau)
from linkform.pairing import (BlockSum, GeneratorBlock, blocksum_pairing, direct_sum,
                              generator, parse_blocksum)

from conftest import random_blocksum
from test_pairing import all_ones, congruent

E0_3, E1_3 = GeneratorBlock("E0", 3), GeneratorBlock("E1", 3)


def pairing(text):
    return blocksum_pairing(parse_blocksum(text))


def table(rows):
    """rows: {k: (r, sigma)} -> InvariantTable."""
    K = max(rows)
    return InvariantTable(tuple(rows.get(k, (0, 0)) for k in range(1, K + 1)))


def q_of(lam, scale):
    n = lam.size

    def q(x):
        return scale * sum(lam.entry(i, j) * x[i] * x[j] for i in range(n) for j in range(n))
    return q


def test_gauss_sum_cyclic():
    # sum over Z/4 of exp(2 pi i x^2 / 4) = 2 + 2i
    assert gauss_sum((4,), lambda x: Fraction(x[0] ** 2, 4)) == CyclotomicSum(2, (2, 2))
    assert gauss_sum(AbelianGroup((2,)), lambda x: Fraction(x[0] ** 2, 2)).is_zero()


def test_quadratic_route_matches_reference():
    rng = random.Random(4)
    for _ in range(40):
        lam = blocksum_pairing(random_blocksum(rng, max_rank=3))
        for k in range(1, 5):
            ref = gauss_sum(lam.orders, q_of(lam, 2 ** (k - 1)))
            assert quadratic_gauss_sum(lam, 2 ** (k - 1)) == ref


def test_quadratic_route_workers_agree():
    lam = all_ones(6)
    assert quadratic_gauss_sum(lam, 2, workers=4) == quadratic_gauss_sum(lam, 2)


def test_tau_e1_3():
    t = tau(generator(E1_3), 2)
    # x^2 + xy + y^2 is even only for x, y both even: 16 - 48
    assert t == CyclotomicSum.integer(-32)
    assert abs(complex(t) / 8 + 4) < 1e-12


@pytest.mark.parametrize("g,k,expected", [
    (E0_3, 3, (2, 0)),
    (E1_3, 2, (0, 4)),
    (E1_3, 3, (2, 0)),
    (GeneratorBlock("A", 1, 1), 1, (1, INF)),
    (GeneratorBlock("A", 3, 1), 2, (0, 1)),
    (GeneratorBlock("A", 3, 1), 3, (1, INF)),
    (GeneratorBlock("A", 3, 1), 4, (0, 0)),
])
def test_sigma_r_examples(g, k, expected):
    assert sigma_r(generator(g), k) == expected


def test_sigma_algebra():
    assert add_sigma(3, 7) == 2 and add_sigma(INF, 1) == INF and add_sigma(0, INF) == INF
    assert neg_sigma(3) == 5 and neg_sigma(INF) == INF


# reference tables of sums of rank-2 generators at k = 3
FUNDAMENTAL_TABLES = [
    ("E0(3)", {3: (2, 0)}),
    ("E1(3)", {2: (0, 4), 3: (2, 0)}),
    ("E0(3)+E1(3)", {2: (0, 4), 3: (4, 0)}),
    ("E0(3)+E0(3)", {3: (4, 0)}),
    ("E1(3)+E1(3)", {3: (4, 0)}),
    ("E0(3)+E0(3)+E0(3)", {3: (6, 0)}),
    ("E0(3)+E1(3)+E1(3)", {3: (6, 0)}),
    ("E0(3)+E0(3)+E1(3)", {2: (0, 4), 3: (6, 0)}),
    ("E1(3)+E1(3)+E1(3)", {2: (0, 4), 3: (6, 0)}),
]


@pytest.mark.parametrize("text,rows", FUNDAMENTAL_TABLES)
def test_fundamental_tables(text, rows):
    T = invariant_table(pairing(text))
    assert T.kmax == 4
    assert T == table({**{k: (0, 0) for k in range(1, 5)}, **rows})


def test_table_equality_ignores_trailing_zeros():
    assert InvariantTable(((1, 1), (0, 0))) == InvariantTable(((1, 1),))
    assert InvariantTable(((1, 1),)) != InvariantTable(((1, 2),))


def test_table_json_and_text():
    T = invariant_table(pairing("A(1,1)+E1(3)"))
    assert T.to_json() == {"1": [1, "inf"], "2": [0, 4], "3": [2, 0], "4": [0, 0]}
    assert InvariantTable.from_json(T.to_json()) == T
    lines = T.format_text().splitlines()
    assert [ln.split("||")[0].strip() for ln in lines] == ["k", "r", "sigma"]
    assert lines[2].split("||")[1].split("|")[0].strip() == "inf"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_additivity(seed):
    rng = random.Random(seed)
    lam = blocksum_pairing(random_blocksum(rng, max_rank=2))
    mu = blocksum_pairing(random_blocksum(rng, max_rank=2))
    assert invariant_table(direct_sum(lam, mu)) == table_sum(invariant_table(lam),
                                                            invariant_table(mu))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_negation_conjugates(seed):
    """-lam has conjugate Gauss sums, so sigma is negated."""
    rng = random.Random(seed)
    lam = blocksum_pairing(random_blocksum(rng, max_rank=3))
    neg = type(lam)(lam.orders, tuple(tuple(-x for x in r) for r in lam.matrix))
    T, U = invariant_table(lam), invariant_table(neg)
    for k in range(1, T.kmax + 1):
        assert U[k] == (T[k][0], neg_sigma(T[k][1]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32))
def test_invariance_under_change_of_basis(k, seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    blocks, size = [], 0
    while size < n:
        blocks.append(GeneratorBlock("A", k, rng.choice([1, 3, 5, 7])))
        size += 1
    lam = blocksum_pairing(BlockSum(tuple(blocks)))
    while True:
        U = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        if det(U) % 2:
            break
    assert invariant_table(congruent(lam, U)) == invariant_table(lam)


def test_is_isomorphic():
    assert is_isomorphic(pairing("E0(3)+E0(3)"), pairing("E1(3)+E1(3)"))
    assert not is_isomorphic(pairing("E0(3)"), pairing("E1(3)"))
    assert is_isomorphic(pairing("A(1,2)+A(1,2)"), pairing("A(5,2)+A(5,2)"))


def test_classify_table():
    c = classify_table(invariant_table(pairing("E0(3)")))
    assert c.holes == {1, 2, 4, 5} and c.i8 == {3} and c.blanks == {1, 2, 3, 4, 5}
    c = classify_table(invariant_table(pairing("A(1,1)+E0(3)")))
    assert 1 not in c.blanks


def test_difference_spec():
    T, Tp = invariant_table(pairing("A(1,1)+E0(3)")), invariant_table(pairing("A(1,1)"))
    spec = difference_spec(T, Tp)
    assert spec[1] == (0, WILDCARD)
    assert spec[3] == (2, 0)


@pytest.mark.parametrize("big,small,ok,witness", [
    ("E0(3)+E1(3)", "E0(3)", True, "E1(3)"),
    ("E0(3)+E1(3)", "E1(3)", True, "E0(3)"),
    ("E0(3)+E0(3)", "E1(3)", True, "E1(3)"),
    ("E0(3)", "E1(3)", False, None),
    ("E0(3)", "A(1,3)", False, None),
    ("A(1,2)+A(3,2)", "A(1,2)", True, "A(3,2)"),
])
def test_summand_examples(big, small, ok, witness):
    got, mu = summand_test(pairing(big), pairing(small))
    assert got is ok
    if ok:
        assert invariant_table(pairing(big)) == invariant_table(pairing(small)) + blocksum_table(mu)
        assert blocksum_table(mu) == blocksum_table(parse_blocksum(witness))


@pytest.mark.parametrize("lam,expected", [
    (all_ones(4), "E0(3)+E1(3)"),
    (pairing("E1(3)+E1(3)"), "E0(3)+E0(3)"),
    (pairing("A(13,5)"), "A(5,5)"),
])
def test_decompose_examples(lam, expected):
    assert str(decompose(lam)) == expected


def test_decompose_all_ones_6():
    B = decompose(all_ones(6))
    assert blocksum_table(B) == blocksum_table(parse_blocksum("E0(3)+E0(3)+E1(3)"))
    assert str(B) == "E0(3)+E0(3)+E1(3)"


def test_decompose_round_trip():
    rng = random.Random(8)
    for _ in range(40):
        lam = blocksum_pairing(random_blocksum(rng))
        assert invariant_table(blocksum_pairing(decompose(lam))) == invariant_table(lam)


def test_resource_bound(monkeypatch):
    monkeypatch.setenv("LINKFORM_MAX_GROUP", "100")
    with pytest.raises(ResourceBound):
        invariant_table(pairing("E0(3)+E0(3)"))


def test_no_candidate_is_an_error_type():
    assert issubclass(NoCandidate, RuntimeError)
