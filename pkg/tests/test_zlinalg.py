import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpg.errors import LatticeContainmentError
from fpg.zlinalg import (
    AbelianGroupInvariants as Ab,
    IntMatrix,
    cokernel_invariants,
    contains,
    determinant,
    hermite_normal_form,
    image_sum,
    intersection,
    invariant_factors,
    kernel_basis,
    lattice_equal,
    preimage,
    quotient_invariants,
    rank,
    saturation,
    smith_normal_form,
)


def random_matrix(rng, m, n, lo=-5, hi=5):
    return IntMatrix([[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)])


def diag_of(S):
    return [S[i, i] for i in range(min(S.rows, S.cols))]


def is_smith(S):
    for i in range(S.rows):
        for j in range(S.cols):
            if i != j and S[i, j]:
                return False
    d = [x for x in diag_of(S)]
    nz = [x for x in d if x]
    if any(x < 0 for x in d) or d[: len(nz)] != nz:
        return False
    return all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))


def minors_gcd(M, k):
    g = 0
    for rows in itertools.combinations(range(M.rows), k):
        for cols in itertools.combinations(range(M.cols), k):
            sub = IntMatrix([[M[i, j] for j in cols] for i in rows])
            g = math.gcd(g, determinant(sub))
    return g


def test_invariants_parse_and_render():
    assert str(Ab.parse("Z^2 + Z/2 + Z/6")) == "Z^2 + Z/2 + Z/6"
    assert Ab.parse("ℤ/120") == Ab(0, (120,))
    assert Ab.parse("0").is_trivial
    assert Ab.parse("Z/2 + Z/3") == Ab(0, (6,))
    with pytest.raises(ValueError):
        Ab(0, (3, 2))


def test_smith_examples():
    S, U, V = smith_normal_form(IntMatrix([[2, 0], [0, 3]]))
    assert diag_of(S) == [1, 6]
    Z = IntMatrix.zeros(2, 3)
    S, U, V = smith_normal_form(Z)
    assert S == Z and U == IntMatrix.identity(2) and V == IntMatrix.identity(3)
    S, _, _ = smith_normal_form(IntMatrix.identity(4))
    assert S == IntMatrix.identity(4)


def test_smith_diag_2_3_brute_force():
    # every matrix in GL2(Z) with small entries keeps the gcd of entries at 1 and |det| at 6
    M = IntMatrix([[2, 0], [0, 3]])
    units = [IntMatrix([[a, b], [c, d]]) for a, b, c, d in itertools.product(range(-2, 3), repeat=4)
             if abs(a * d - b * c) == 1]
    seen = set()
    for P in units:
        for Q in units[::7]:
            N = P @ M @ Q
            g = 0
            for x in itertools.chain(*N.data):
                g = math.gcd(g, x)
            seen.add((g, abs(determinant(N))))
    assert seen == {(1, 6)}


def test_smith_random_properties():
    rng = random.Random(1)
    for _ in range(500):
        m, n = rng.randint(1, 12), rng.randint(1, 12)
        M = random_matrix(rng, m, n, -3, 3)
        if rng.random() < 0.3:
            # force rank deficiency
            M = M @ random_matrix(rng, n, n, -1, 1)
        S, U, V = smith_normal_form(M)
        assert U @ M @ V == S
        assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1
        assert is_smith(S)
        rows = list(range(m))
        cols = list(range(n))
        rng.shuffle(rows)
        rng.shuffle(cols)
        shuffled = IntMatrix([[M[i, j] for j in cols] for i in rows])
        assert invariant_factors(shuffled) == invariant_factors(M)
        assert [d for d in diag_of(S) if d] == invariant_factors(M)


def test_smith_against_determinantal_divisors():
    rng = random.Random(4)
    for _ in range(60):
        M = random_matrix(rng, 3, 3, -6, 6)
        d = invariant_factors(M)
        prod = 1
        for k, x in enumerate(d, start=1):
            prod *= x
            assert minors_gcd(M, k) == prod


def test_kernel_examples():
    assert kernel_basis(IntMatrix.zeros(2, 4)).cols == 4
    assert kernel_basis(IntMatrix([[2]])).cols == 0
    K = kernel_basis(IntMatrix([[2, 2, 2], [3, 3, 3]]))
    assert K.cols == 2
    assert lattice_equal(K, IntMatrix([[-1, -1], [1, 0], [0, 1]]))


def test_kernel_brute_force():
    rng = random.Random(9)
    for _ in range(20):
        M = random_matrix(rng, 5, 8, -2, 2)
        K = kernel_basis(M)
        assert K.cols == 8 - rank(M)
        assert (M @ K).is_zero()
        assert lattice_equal(saturation(K), K)
    # every small kernel vector lies in the span
    M = random_matrix(random.Random(10), 5, 8, -2, 2)
    K = kernel_basis(M)
    for v in itertools.product(range(-1, 2), repeat=8):
        if not any(M.apply(list(v))):
            assert contains(K, IntMatrix.from_columns([list(v)], 8))


def test_cokernel_examples():
    assert cokernel_invariants(IntMatrix([[2]])) == Ab(0, (2,))
    assert cokernel_invariants(IntMatrix.identity(3)).is_trivial
    # abelianization of <a,b | a^2, b^3, (ab)^5>
    assert cokernel_invariants(IntMatrix([[2, 0, 5], [0, 3, 5]])).is_trivial


def test_lattice_examples():
    two = IntMatrix([[2, 0], [0, 2]])
    three = IntMatrix([[3, 0], [0, 3]])
    assert lattice_equal(intersection(two, three), IntMatrix([[6, 0], [0, 6]]))
    assert lattice_equal(image_sum(two, three), IntMatrix.identity(2))
    assert quotient_invariants(IntMatrix([[2]]), IntMatrix([[1]])) == Ab(0, (2,))
    with pytest.raises(LatticeContainmentError):
        quotient_invariants(IntMatrix([[1]]), IntMatrix([[2]]))
    assert lattice_equal(saturation(IntMatrix([[2], [4]])), IntMatrix([[1], [2]]))


def in_lattice(m, v):
    # v lies in the column lattice of a nonsingular 2x2 matrix iff adj(m) v is divisible by det
    (p, q), (r, s) = m.data
    det = p * s - q * r
    return (s * v[0] - q * v[1]) % det == 0 and (-r * v[0] + p * v[1]) % det == 0


def test_lattice_ops_against_enumeration():
    rng = random.Random(6)
    box = range(-12, 13)
    done = 0
    while done < 40:
        A = random_matrix(rng, 2, 2, -4, 4)
        B = random_matrix(rng, 2, 2, -4, 4)
        if not determinant(A) or not determinant(B):
            continue
        pts = list(itertools.product(box, repeat=2))
        both = {v for v in pts if in_lattice(A, v) and in_lattice(B, v)}
        inter = intersection(A, B)
        assert {v for v in pts if in_lattice(inter, v)} == both
        S = image_sum(A, B)
        assert abs(determinant(S) * determinant(inter)) == abs(determinant(A) * determinant(B))
        # the index of A is the number of classes of [0, d)^2 modulo A
        d = abs(determinant(A))
        if d <= 12:
            classes = []
            for v in itertools.product(range(d), repeat=2):
                if not any(in_lattice(A, (v[0] - u[0], v[1] - u[1])) for u in classes):
                    classes.append(v)
            assert len(classes) == d
        assert cokernel_invariants(A).order == d
        done += 1


def test_preimage():
    M = IntMatrix([[1, 1], [0, 2]])
    L = IntMatrix([[2, 0], [0, 2]])
    P = preimage(M, L)
    for col in P.columns():
        assert contains(L, IntMatrix.from_columns([M.apply(col)], 2))
    assert quotient_invariants(P, IntMatrix.identity(2)).order == 2


def test_hermite_canonical_under_column_changes():
    rng = random.Random(8)
    for _ in range(100):
        A = random_matrix(rng, 4, 3, -5, 5)
        U = IntMatrix.identity(3)
        for _ in range(5):
            i, j = rng.sample(range(3), 2)
            E = IntMatrix.identity(3)
            E.data[i][j] = rng.randint(-3, 3)
            U = U @ E
        assert hermite_normal_form(A) == hermite_normal_form(A @ U)


small = st.integers(min_value=-6, max_value=6)


@settings(max_examples=200)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=2, max_size=4))
def test_kernel_and_image_dimensions(rows):
    M = IntMatrix(rows)
    K = kernel_basis(M)
    assert K.cols + rank(M) == M.cols
    assert (M @ K).is_zero() if K.cols else True


@settings(max_examples=200)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4),
       st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4))
def test_intersection_inside_both(a, b):
    A = IntMatrix(a).transpose()
    B = IntMatrix(b).transpose()
    I = intersection(A, B)
    assert contains(A, I) and contains(B, I)
    S = image_sum(A, B)
    assert contains(S, A) and contains(S, B)
    assert rank(I) + rank(S) == rank(A) + rank(B)
