import itertools
import random

import pytest

from fpg import kernels
from fpg.coset_enum import group_order, permutation_action, relators_hold, todd_coxeter
from fpg.errors import CosetLimitExceeded, IncompleteTableError
from fpg.presentations import FinitePresentation
from fpg.words import Word
from fpg.zlinalg import IntMatrix, cokernel_invariants, determinant

BI = FinitePresentation.parse("ab", ["a^5 = b^3", "b^3 = (ba)^2"])
A5 = FinitePresentation.parse("ab", ["a^2", "b^3", "(ab)^5"])


def compose(p, q):
    return tuple(q[p[i]] for i in range(len(p)))


def closure(gens):
    identity = tuple(range(len(gens[0])))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def test_a5_order_matches_permutation_brute_force():
    # (1 2)(3 4) and (1 3 5) generate A5 and satisfy the triangle relations
    a = (1, 0, 3, 2, 4)
    b = (2, 1, 4, 3, 0)
    ab = compose(a, b)
    e = tuple(range(5))
    assert compose(a, a) == e
    assert compose(compose(b, b), b) == e
    x = e
    for _ in range(5):
        x = compose(x, ab)
    assert x == e
    assert len(closure([a, b])) == 60
    assert group_order(todd_coxeter(A5)) == 60


@pytest.mark.parametrize("strategy", ["hlt", "felsch"])
def test_orders(strategy):
    assert group_order(todd_coxeter(FinitePresentation.parse("x", ["x"]), strategy=strategy)) == 1
    assert group_order(todd_coxeter(BI, strategy=strategy)) == 120
    assert group_order(todd_coxeter(A5, strategy=strategy)) == 60
    s3 = FinitePresentation.parse("ab", ["a^2", "b^2", "(ab)^3"])
    assert group_order(todd_coxeter(s3, strategy=strategy)) == 6


def test_table_is_a_group_action():
    t = todd_coxeter(BI)
    assert t.complete and relators_hold(t)
    for row in t.rows:
        for i in range(2):
            assert t.rows[row[2 * i]][2 * i + 1] == t.rows.index(row)


def test_permutation_action():
    t = todd_coxeter(FinitePresentation.parse("x", ["x"]))
    assert permutation_action(t) == [[0]]
    t = todd_coxeter(FinitePresentation.parse("a", ["aa"]))
    assert permutation_action(t) == [[1, 0]]
    t = todd_coxeter(BI)
    perms = permutation_action(t)
    assert all(sorted(p) == list(range(120)) for p in perms)
    # relators compose to the identity permutation
    for r in BI.relators:
        for c in range(120):
            d = c
            for code in r.codes:
                i = abs(code) - 1
                d = perms[i][d] if code > 0 else perms[i].index(d)
            assert d == c


def test_coset_limit():
    with pytest.raises(CosetLimitExceeded):
        todd_coxeter(FinitePresentation.free(2), max_cosets=50)
    with pytest.raises(CosetLimitExceeded):
        todd_coxeter(BI, max_cosets=100)


def test_incomplete_table_rejected():
    from fpg.coset_enum import CosetTable
    t = CosetTable(FinitePresentation.parse("a", []), ((-1, -1),))
    with pytest.raises(IncompleteTableError):
        group_order(t)


def brute_index(m):
    # count points of Z^2 modulo the column lattice of a nonsingular 2x2 matrix
    (p, q), (r, s) = m
    d = abs(p * s - q * r)
    reps = set()
    for x, y in itertools.product(range(d), repeat=2):
        # reduce (x, y) into the fundamental domain of d Z^2 inside the lattice
        reps.add(canonical(x, y, m, d))
    return len(reps)


def canonical(x, y, m, d):
    (p, q), (r, s) = m
    # (x, y) is in the lattice iff adj(m) (x, y) is divisible by det
    det = p * s - q * r
    best = None
    for u, v in itertools.product(range(d), repeat=2):
        dx, dy = x - u, y - v
        if (s * dx - q * dy) % det == 0 and (-r * dx + p * dy) % det == 0:
            best = (u, v)
            break
    return best


def test_lattice_index_against_coset_enumeration():
    rng = random.Random(11)
    done = 0
    while done < 200:
        m = [[rng.randint(-4, 4) for _ in range(2)] for _ in range(2)]
        det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
        if det == 0:
            continue
        rels = ["[a,b]"]
        for j in range(2):
            rels.append(f"a^{m[0][j]} b^{m[1][j]}")
        p = FinitePresentation.parse("ab", rels)
        order = group_order(todd_coxeter(p, strategy=rng.choice(["hlt", "felsch"])))
        inv = cokernel_invariants(IntMatrix(m))
        assert order == abs(det) == inv.order
        assert abs(determinant(IntMatrix(m))) == order
        if abs(det) <= 12:
            assert brute_index(m) == order
        done += 1


def test_kernels_agree():
    impls = [kernels.get(n) for n in kernels.available()]
    rels = [r.codes for r in BI.relators]
    tables = [impl.coset_enumerate(2, rels, 10**5, "hlt") for impl in impls]
    assert all(len(t) == 120 for t in tables)
    codes = [1, 2, -2, -1, 3, 1, -1]
    assert all(list(impl.free_reduce(codes)) == [3] for impl in impls)
    assert Word(codes).codes == (3,)
