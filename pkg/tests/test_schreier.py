import random

from fpg.coset_enum import todd_coxeter
from fpg.presentations import FinitePresentation
from fpg.schreier import (
    action_on_Rab,
    checksum,
    conjugation_matrix,
    expand,
    expand_basis_element,
    inclusion_to_Fab,
    rewrite_abelianized,
    rewrite_in_R,
    schreier_data,
    word_action,
)
from fpg.words import Word, conjugate, exponent_sums
from fpg.zlinalg import IntMatrix, cokernel_invariants, hstack

BI = FinitePresentation.parse("ab", ["a^5 = b^3", "b^3 = (ba)^2"])
S3 = FinitePresentation.parse("ab", ["a^2", "b^2", "(ab)^3"])


def sd_of(p):
    return schreier_data(todd_coxeter(p))


def random_word(rng, rank, n):
    return Word([rng.choice([1, -1]) * rng.randrange(1, rank + 1) for _ in range(n)])


def test_basis_counts():
    assert sd_of(FinitePresentation.parse("x", ["x"])).basis_count == 1
    assert sd_of(FinitePresentation.parse("ab", ["a", "b"])).basis_count == 2
    assert sd_of(S3).basis_count == 7
    assert sd_of(BI).basis_count == 121


def test_basis_elements_lie_in_R():
    sd = sd_of(BI)
    t = sd.table
    for m in range(sd.basis_count):
        w = expand_basis_element(sd, m)
        assert w
        assert t.act(0, w) == 0
        assert rewrite_in_R(sd, w) == Word([m + 1])


def test_rewrite_examples():
    sd = sd_of(FinitePresentation.parse("a", ["aa"]))
    assert len(rewrite_in_R(sd, Word([1, 1]))) == 1
    assert rewrite_in_R(sd, Word()) == Word()


def test_rewrite_roundtrip_on_conjugated_relators():
    rng = random.Random(5)
    for p in (S3, BI):
        sd = sd_of(p)
        for _ in range(100):
            u = random_word(rng, 2, rng.randrange(12))
            r = conjugate(rng.choice(p.relators), u)
            assert expand(sd, rewrite_in_R(sd, r)) == r


def test_action_trivial_quotient_is_identity():
    sd = sd_of(FinitePresentation.parse("ab", ["a", "b"]))
    assert all(A == IntMatrix.identity(2) for A in action_on_Rab(sd))
    assert inclusion_to_Fab(sd) == IntMatrix.identity(2)


def test_action_z2():
    sd = sd_of(FinitePresentation.parse("a", ["aa"]))
    assert action_on_Rab(sd) == [IntMatrix.identity(1)]
    assert inclusion_to_Fab(sd) == IntMatrix([[2]])


def test_relators_act_trivially():
    sd = sd_of(BI)
    mats = action_on_Rab(sd)
    invs = [conjugation_matrix(sd, Word([-1])), conjugation_matrix(sd, Word([-2]))]
    n = sd.basis_count
    for A, Ai in zip(mats, invs):
        assert A @ Ai == IntMatrix.identity(n)
    for r in BI.relators:
        assert word_action(mats, invs, r) == IntMatrix.identity(n)


def test_right_action_composition():
    rng = random.Random(2)
    sd = sd_of(S3)
    mats = action_on_Rab(sd)
    invs = [conjugation_matrix(sd, Word([-1])), conjugation_matrix(sd, Word([-2]))]
    for _ in range(20):
        g = random_word(rng, 2, rng.randrange(1, 8))
        assert word_action(mats, invs, g) == conjugation_matrix(sd, g)
        m = rng.randrange(sd.basis_count)
        v = rewrite_abelianized(sd, conjugate(expand_basis_element(sd, m), g))
        assert v == conjugation_matrix(sd, g).columns()[m]


def test_inclusion_onto_fab_for_perfect_quotient():
    sd = sd_of(BI)
    inc = inclusion_to_Fab(sd)
    assert inc.shape == (2, 121)
    assert cokernel_invariants(inc).is_trivial
    for m in range(sd.basis_count):
        assert inc.columns()[m] == exponent_sums(expand_basis_element(sd, m), 2)


def test_checksum_stable():
    sd = sd_of(BI)
    mats = action_on_Rab(sd)
    assert checksum(mats[0]) == checksum(IntMatrix.from_text(mats[0].to_text()))
    assert checksum(hstack(*mats)) != checksum(hstack(mats[1], mats[0]))
