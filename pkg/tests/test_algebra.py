import cmath
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from linkform.algebra import (INF, QZ, AbelianGroup, CyclotomicSum, NotInvertible,
                              NotOnRay, cyclotomic_arg_eighths, det, identity, matmul,
                              mod_inverse, p_valuation, smith_normal_form,
                              torsion_of_cokernel)

THREE_FIBER_K3 = [[8, 0, 0, 7], [0, 8, 0, 1], [0, 0, 8, 1], [1, 1, 1, -1]]


@pytest.mark.parametrize("n,p,expected", [(8, 2, 3), (0, 2, INF), (12, 3, 1), (-40, 2, 3), (7, 7, 1)])
def test_p_valuation(n, p, expected):
    assert p_valuation(n, p) == expected


def test_p_valuation_rejects_composite():
    with pytest.raises(ValueError):
        p_valuation(8, 4)


def test_inf_behaves():
    assert INF + 5 == INF and INF > 10**100


@given(st.integers(0, 40), st.integers(-10**6, 10**6).filter(lambda u: u % 2))
def test_p_valuation_of_scaled_unit(a, u):
    assert p_valuation(2**a * u, 2) == a


@pytest.mark.parametrize("a,m,u", [(7, 16, 7), (3, 8, 3), (5, 12, 5)])
def test_mod_inverse(a, m, u):
    assert mod_inverse(a, m) == u and a * u % m == 1


def test_mod_inverse_not_invertible():
    with pytest.raises(NotInvertible):
        mod_inverse(2, 8)


def _check_snf(M):
    D, U, V = smith_normal_form(M)
    assert matmul(matmul(U, M), V) == D
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    for i in range(len(D)):
        for j in range(len(D[0])):
            if i != j:
                assert D[i][j] == 0
    for x, y in zip(diag, diag[1:]):
        assert x >= 0
        assert (y == 0) if x == 0 else (y % x == 0)
    return diag


def test_snf_diagonal_input_unchanged():
    D, U, V = smith_normal_form([[2, 0], [0, 4]])
    assert D == [[2, 0], [0, 4]] and U == identity(2) and V == identity(2)


def test_snf_hand_example():
    # rows: [[2,1],[1,2]] -> swap/eliminate by hand: gcd 1, then det 3
    assert _check_snf([[2, 1], [1, 2]]) == [1, 3]


def test_snf_three_fiber_presentation():
    diag = _check_snf(THREE_FIBER_K3)
    assert [d for d in diag if d != 1] == [8, 8 * 17]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.randoms(use_true_random=False))
def test_snf_random(rows, cols, rnd):
    M = [[rnd.randint(-50, 50) for _ in range(cols)] for _ in range(rows)]
    _check_snf(M)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.randoms(use_true_random=False))
def test_cokernel_order_is_det(n, rnd):
    M = [[rnd.randint(-9, 9) for _ in range(n)] for _ in range(n)]
    d = det(M)
    G, free = torsion_of_cokernel(M)
    if d:
        assert free == 0 and G.order == abs(d)
    else:
        assert free > 0


def test_cokernel_examples():
    assert torsion_of_cokernel(identity(3)) == (AbelianGroup(), 0)
    assert torsion_of_cokernel([[2, 1], [1, 2]]) == (AbelianGroup((3,)), 0)
    G, free = torsion_of_cokernel(THREE_FIBER_K3)
    assert G.p_part(2) == AbelianGroup((8, 8)) and free == 0


def test_cokernel_columns_are_relations():
    # Z^2 / <(2, 0)> = Z/2 + Z
    assert torsion_of_cokernel([[2], [0]]) == (AbelianGroup((2,)), 1)


def test_group_canonical_form():
    G = AbelianGroup.from_invariant_factors([12, 1, 8])
    assert G.orders == (3, 4, 8)
    assert G.p_part(2).orders == (4, 8) and G.exponent == 24
    with pytest.raises(ValueError):
        AbelianGroup((6,))


# --- Q/Z ------------------------------------------------------------------------

qz = st.builds(lambda n, k: QZ(n, 2**k), st.integers(-100, 100), st.integers(0, 6))


def test_qz_reduction():
    assert QZ(-5, 8) == QZ(3, 8)
    assert QZ(4, 8) == QZ(1, 2) and QZ(8, 8) == QZ(0) and QZ(0).den == 1
    assert str(QZ(2, 8)) == "1/4" and QZ(2, 8).format(8) == "2/8"
    with pytest.raises(ValueError):
        QZ(1, 6)


@given(qz, qz, qz)
def test_qz_group_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a + QZ(0) == a and a + (-a) == QZ(0)
    assert math.lcm(a.den, b.den) % (a + b).den == 0


@given(qz)
def test_qz_parse_roundtrip(a):
    assert QZ.parse(str(a)) == a


# --- cyclotomic sums -----------------------------------------------------------------

def test_cyclotomic_reduction():
    # zeta_8^4 = -1
    z = CyclotomicSum.from_buckets([1, 0, 0, 0, 1, 0, 0, 0], 3)
    assert z.is_zero()
    # phases of x^2/4 over Z/4 are 0, 1/4, 0, 1/4
    assert CyclotomicSum.from_buckets([2, 2, 0, 0], 2) == CyclotomicSum(2, (2, 2))
    assert CyclotomicSum.from_buckets([2, 0, 2, 0], 2).is_zero()


def test_cyclotomic_zero_test_against_float():
    rng = random.Random(7)
    for _ in range(1000):
        m = rng.randint(1, 7)
        N = 2**m
        counts = [0] * N
        for _ in range(rng.randint(1, 6)):
            # zeta^j + zeta^(j + N/2) = 0, and full orbits of d-th roots sum to 0
            if rng.random() < 0.5:
                j, c = rng.randrange(N // 2), rng.randint(1, 50)
                counts[j] += c
                counts[j + N // 2] += c
            else:
                step = N >> rng.randint(1, m)
                j, c = rng.randrange(N), rng.randint(1, 50)
                for r in range(N // step):
                    counts[(j + r * step) % N] += c
        z = CyclotomicSum.from_buckets(counts, m)
        value = sum(c * cmath.exp(2j * math.pi * k / N) for k, c in enumerate(counts))
        assert z.is_zero()
        assert abs(value) < 1e-6 * sum(counts)


@given(st.integers(1, 5), st.lists(st.integers(-20, 20), min_size=32, max_size=32))
def test_cyclotomic_nonzero_agrees_with_float(m, raw):
    half = 2 ** (m - 1)
    z = CyclotomicSum(m, tuple(raw[:half]))
    if not z.is_zero():
        # the power basis is a Q-basis, so a nonzero vector is a nonzero number
        assert abs(complex(z)) > 1e-9


def test_cyclotomic_multiply_and_conjugate():
    i = CyclotomicSum(2, (0, 1))
    assert i * i == CyclotomicSum.integer(-1)
    assert i.conjugate() == CyclotomicSum(2, (0, -1))
    assert CyclotomicSum(2, (2, 2)).lift(3) == CyclotomicSum(2, (2, 2))


@pytest.mark.parametrize("z,expected", [
    (CyclotomicSum(1, (0,)), INF),
    (CyclotomicSum(2, (2, 2)), 1),   # 2 + 2i: the sum of exp(2 pi i x^2/4) over Z/4
    (CyclotomicSum.integer(-4), 4),
    (CyclotomicSum.integer(9), 0),
    (CyclotomicSum(3, (0, 0, 0, 3)), 3),
])
def test_arg_eighths(z, expected):
    assert cyclotomic_arg_eighths(z) == expected


def test_arg_off_ray():
    with pytest.raises(NotOnRay):
        cyclotomic_arg_eighths(CyclotomicSum(2, (2, 1)))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32))
def test_snf_agrees_with_sympy(rows, cols, seed):
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_form as sympy_snf
    rnd = random.Random(seed)
    M = [[rnd.randint(-30, 30) for _ in range(cols)] for _ in range(rows)]
    ours = [d for d in _check_snf(M) if d]
    S = sympy_snf(Matrix(M), domain=ZZ)
    theirs = sorted(abs(int(S[i, i])) for i in range(min(rows, cols)) if S[i, i])
    assert sorted(ours) == theirs
