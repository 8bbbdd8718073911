import pytest

from fpg.errors import BudgetExceeded

from fpg.coset_enum import todd_coxeter
from fpg.homology import (
    CoefficientModule,
    coinvariant_matrix,
    coinvariants_tensor_square,
    coinvariants_tensor_square_sparse,
    five_term_check,
    h1,
    h1_free_with_coefficients,
    h2_fiber_product,
    induced_h2_kernel,
    is_superperfect,
    rab_module,
    relation_module,
    schur_multiplier_finite,
    tensor_square_onto_fab,
)
from fpg.presentations import FinitePresentation, semidirect_product_RF
from fpg.schreier import schreier_data
from fpg.zlinalg import AbelianGroupInvariants as Ab
from fpg.zlinalg import IntMatrix, cokernel_invariants, kernel_basis

BI = FinitePresentation.parse("ab", ["a^5 = b^3", "b^3 = (ba)^2"])
A5 = FinitePresentation.parse("ab", ["a^2", "b^3", "(ab)^5"])
TRIVIAL = FinitePresentation.parse("x", ["x"])
Z2 = FinitePresentation.parse("a", ["aa"])


def sd_of(p):
    return schreier_data(todd_coxeter(p))


def test_h1():
    assert h1(FinitePresentation.parse("a", [])) == Ab(1)
    assert h1(BI).is_trivial
    assert h1(A5).is_trivial
    assert h1(Z2) == Ab(0, (2,))
    assert h1(FinitePresentation.parse("ab", ["a^4", "b^6", "[a,b]"])) == Ab(0, (2, 12))


def test_schur_multipliers():
    assert schur_multiplier_finite(TRIVIAL, sd_of(TRIVIAL)).is_trivial
    assert schur_multiplier_finite(BI, sd_of(BI)).is_trivial
    assert schur_multiplier_finite(A5, sd_of(A5)) == Ab(0, (2,))
    assert schur_multiplier_finite(Z2, sd_of(Z2)).is_trivial
    # Z/2 x Z/2 has multiplier Z/2
    v4 = FinitePresentation.parse("ab", ["aa", "bb", "[a,b]"])
    assert schur_multiplier_finite(v4, sd_of(v4)) == Ab(0, (2,))
    assert is_superperfect(BI, sd_of(BI))
    assert not is_superperfect(A5, sd_of(A5))


def test_a5_multiplier_matches_binary_icosahedral_extension():
    # the binary icosahedral group maps onto A5 with kernel of order 2 = |H2(A5)|
    a5_order = len(todd_coxeter(A5).rows)
    bi_order = len(todd_coxeter(BI).rows)
    assert bi_order // a5_order == schur_multiplier_finite(A5, sd_of(A5)).order
    # killing the central element a^5 = b^3 = (ba)^2 gives the (5,3,2) triangle group A5
    quotient = FinitePresentation.parse("ab", ["a^5 = b^3", "b^3 = (ba)^2", "a^5"])
    assert len(todd_coxeter(quotient).rows) == 60
    assert schur_multiplier_finite(quotient, sd_of(quotient)) == Ab(0, (2,))


def test_h1_with_coefficients():
    direct = h1_free_with_coefficients(2, CoefficientModule.trivial(2, 2))
    assert direct.invariants == Ab(4)
    flip = h1_free_with_coefficients(1, CoefficientModule(1, [IntMatrix([[-1]])]))
    assert flip.invariants.is_trivial


def test_h2_fiber_product_rank_count():
    sd = sd_of(BI)
    fib = h2_fiber_product(sd)
    assert fib.invariants == Ab(123)
    # exactness 0 -> H2 -> R_ab^2 -> R_ab -> (R_ab)_F -> 0 with (R_ab)_F = Z^2
    M = rab_module(sd)
    n = M.dimension
    coinv = cokernel_invariants(coinvariant_matrix(M))
    assert coinv == Ab(2)
    assert fib.invariants.free_rank == 2 * n - (n - coinv.free_rank)


def test_five_term_binary_icosahedral():
    r = five_term_check(sd_of(BI))
    assert r.h2Q.is_trivial and r.h1Q.is_trivial
    assert r.h1FQF == Ab(4) and r.h1FF == Ab(4)
    assert r.all_exact


def test_five_term_z2():
    r = five_term_check(sd_of(Z2))
    assert r.h2Q.is_trivial
    assert r.h1FQF == Ab(2) and r.h1FF == Ab(2)
    assert r.h1Q == Ab(0, (2,))
    assert r.all_exact
    beta = r.maps["H1(FxQF)->H1(FxF)"]
    assert cokernel_invariants(beta) == Ab(0, (2,))


def test_five_term_trivial_and_a5():
    r = five_term_check(sd_of(TRIVIAL))
    assert r.all_exact and r.h1FQF == r.h1FF == Ab(2)
    r = five_term_check(sd_of(A5))
    assert r.all_exact
    assert r.h2Q == Ab(0, (2,))
    assert r.h1FQF == Ab(4, (2,))


def test_five_term_matches_semidirect_abelianization():
    for p in (BI, Z2, A5, TRIVIAL):
        t = todd_coxeter(p)
        assert five_term_check(schreier_data(t)).h1FQF == h1(semidirect_product_RF(p, t))


def test_induced_h2_kernel():
    k = induced_h2_kernel(sd_of(TRIVIAL))
    assert k.invariants.is_trivial and k.surjective
    k = induced_h2_kernel(sd_of(BI))
    assert k.h2_fiber == Ab(123)
    assert k.h2_direct == Ab(4)
    assert k.surjective
    assert k.invariants == Ab(119)
    assert k.kernel.cols == 119


SMALL = {
    "trivial2": FinitePresentation.parse("ab", ["a", "b"]),
    "Z2": Z2,
    "Z3": FinitePresentation.parse("a", ["a^3"]),
    "S3": FinitePresentation.parse("ab", ["aa", "bb", "(ab)^3"]),
    "V4": FinitePresentation.parse("ab", ["aa", "bb", "[a,b]"]),
    "D8": FinitePresentation.parse("ab", ["aa", "bb", "(ab)^4"]),
    "Q8": FinitePresentation.parse("ab", ["a^4", "a^2 = b^2", "bab = a"]),
}


def rational_rank(rank, order):
    # R_ab (x) Q = Q + QG^(r-1), and (QG (x) V)^G has dimension dim V
    return 1 + 2 * (rank - 1) + (rank - 1) ** 2 * order


@pytest.mark.parametrize("name", sorted(SMALL))
def test_tensor_square_module_route_matches_sparse(name):
    p = SMALL[name]
    sd = sd_of(p)
    inv = coinvariants_tensor_square(sd)
    assert inv == coinvariants_tensor_square_sparse(sd)
    assert inv.free_rank == rational_rank(p.rank, sd.table.coset_count)


def test_tensor_square_values():
    assert coinvariants_tensor_square(sd_of(SMALL["trivial2"])) == Ab(4)
    assert coinvariants_tensor_square(sd_of(TRIVIAL)) == Ab(1)
    assert coinvariants_tensor_square(sd_of(SMALL["V4"])) == Ab(7, (2, 2))
    assert coinvariants_tensor_square(sd_of(SMALL["D8"])) == Ab(11, (2, 2))
    assert tensor_square_onto_fab(sd_of(SMALL["trivial2"]))
    assert not tensor_square_onto_fab(sd_of(Z2))


def test_tensor_square_perfect_groups():
    for p, order in ((A5, 60), (BI, 120)):
        sd = sd_of(p)
        assert coinvariants_tensor_square(sd) == Ab(rational_rank(2, order))
        assert tensor_square_onto_fab(sd)


def test_relation_module_generators_span_kernel():
    sd = sd_of(A5)
    rm = relation_module(sd)
    assert 1 <= len(rm.generators) < kernel_basis(rm.images).cols
    for g in rm.generators:
        assert not any(rm.images.apply(list(g)))


def test_tensor_square_budget():
    with pytest.raises(BudgetExceeded):
        coinvariants_tensor_square_sparse(sd_of(BI), budget_seconds=0.01)
    with pytest.raises(BudgetExceeded):
        coinvariants_tensor_square(sd_of(BI), budget_seconds=0.0)
