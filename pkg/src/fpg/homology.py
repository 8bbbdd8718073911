"""Low-dimensional homology of presentations, quotients and fiber products.

Groups are handled as ``Z^n / L`` with ``L`` given by generating columns;
maps between them are integer matrices.
"""

import heapq
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BudgetExceeded
from .presentations import FinitePresentation
from .schreier import SchreierData, action_on_Rab, inclusion_to_Fab, rewrite_abelianized
from .words import exponent_sums
from .zlinalg import (
    AbelianGroupInvariants,
    Echelon,
    IntMatrix,
    _snf_diagonal,
    contains,
    coordinates_in,
    cokernel_invariants,
    hstack,
    image_sum,
    intersection,
    kernel_basis,
    lattice_equal,
    preimage,
    quotient_invariants,
)


@dataclass(frozen=True)
class CoefficientModule:
    """``Z^dimension`` with one invertible matrix per free generator (right action)."""

    dimension: int
    action: Tuple[IntMatrix, ...]

    @classmethod
    def trivial(cls, dimension: int, rank: int) -> "CoefficientModule":
        return cls(dimension, tuple(IntMatrix.identity(dimension) for _ in range(rank)))


def relation_matrix(p: FinitePresentation) -> IntMatrix:
    """Columns are exponent-sum vectors of the relators."""
    cols = [exponent_sums(r, p.rank) for r in p.relators]
    return IntMatrix.from_columns(cols, p.rank) if cols else IntMatrix.zeros(p.rank, 0)


def h1(p: FinitePresentation) -> AbelianGroupInvariants:
    return cokernel_invariants(relation_matrix(p))


def coinvariant_matrix(M: CoefficientModule) -> IntMatrix:
    """``(A_1 - I | ... | A_r - I)``; its cokernel is ``H_0(F; M)``."""
    n = M.dimension
    if not M.action:
        return IntMatrix.zeros(n, 0)
    eye = IntMatrix.identity(n)
    return hstack(*[A - eye for A in M.action])


def rab_module(sd: SchreierData) -> CoefficientModule:
    return CoefficientModule(sd.basis_count, tuple(action_on_Rab(sd)))


def schur_multiplier_finite(p: FinitePresentation, sd: SchreierData) -> AbelianGroupInvariants:
    """``H_2(Q) = ker((R_ab)_F -> F_ab)`` (Hopf's formula via coinvariants)."""
    S = coinvariant_matrix(rab_module(sd))
    inc = inclusion_to_Fab(sd)
    K = kernel_basis(inc)
    return quotient_invariants(intersection(K, S), K)


def is_superperfect(p: FinitePresentation, sd: SchreierData) -> bool:
    return h1(p).is_trivial and schur_multiplier_finite(p, sd).is_trivial


@dataclass(frozen=True)
class H1WithCoefficients:
    kernel: IntMatrix  # columns: basis of the 1-cycles, blocks of length dimension
    invariants: AbelianGroupInvariants


def h1_free_with_coefficients(rank: int, M: CoefficientModule) -> H1WithCoefficients:
    """``H_1(F; M) = ker(M^rank -> M, (m_i) -> sum (A_i - I) m_i)``.

    A free group has no 2-chains, so the cycles are the homology and the
    answer is free abelian.
    """
    if len(M.action) != rank:
        raise ValueError("need one action matrix per free generator")
    S = coinvariant_matrix(M)
    K = kernel_basis(S)
    return H1WithCoefficients(K, AbelianGroupInvariants(K.cols))


def h2_fiber_product(sd: SchreierData) -> H1WithCoefficients:
    """``H_2(F x_Q F) = H_2(R x| F) = H_1(F; R_ab)``."""
    return h1_free_with_coefficients(sd.rank, rab_module(sd))


def block_inclusion(sd: SchreierData) -> IntMatrix:
    """``inc`` applied blockwise: ``R_ab^r -> F_ab^r``."""
    inc = inclusion_to_Fab(sd)
    r, N = inc.rows, inc.cols
    out = IntMatrix.zeros(r * r, r * N)
    for b in range(r):
        for i in range(r):
            out.data[b * r + i][b * N:(b + 1) * N] = inc.data[i]
    return out


# --- exactness ---------------------------------------------------------------

def _zero_lattice(n: int) -> IntMatrix:
    return IntMatrix.zeros(n, 0)


def well_defined(f: IntMatrix, rel_src: IntMatrix, rel_dst: IntMatrix) -> bool:
    if rel_src.cols == 0:
        return True
    return contains(rel_dst, f @ rel_src)


def exact_at(f: IntMatrix, g: IntMatrix, rel_b: IntMatrix, rel_c: IntMatrix) -> bool:
    """``A -f-> B -g-> C`` with ``B = Z^b / rel_b``, ``C = Z^c / rel_c``:
    ``im f + rel_b == g^-1(rel_c)``."""
    left = image_sum(f, rel_b)
    right = preimage(g, rel_c)
    return lattice_equal(left, right)


def injective(f: IntMatrix, rel_a: IntMatrix, rel_b: IntMatrix) -> bool:
    return lattice_equal(preimage(f, rel_b), image_sum(rel_a, _zero_lattice(rel_a.rows)))


def surjective(g: IntMatrix, rel_c: IntMatrix) -> bool:
    return lattice_equal(image_sum(g, rel_c), IntMatrix.identity(g.rows))


def quotient_group(n: int, rel: IntMatrix) -> AbelianGroupInvariants:
    return cokernel_invariants(rel) if rel.cols else AbelianGroupInvariants(n)


@dataclass
class FiveTermReport:
    """``0 -> H_2(Q) -> H_1(F x_Q F) -> H_1(F x F) -> H_1(Q) -> 0``.

    ``H_1(F x_Q F)`` is realized as ``(R_ab)_F + F_ab`` and the middle map
    as ``inc_* + id`` into ``F_ab + F_ab``.
    """

    h2Q: AbelianGroupInvariants
    h1FQF: AbelianGroupInvariants
    h1FF: AbelianGroupInvariants
    h1Q: AbelianGroupInvariants
    maps: Dict[str, IntMatrix]
    exact: Dict[str, bool]
    well_defined: Dict[str, bool] = field(default_factory=dict)

    @property
    def all_exact(self) -> bool:
        return all(self.exact.values()) and all(self.well_defined.values())

    def to_json(self) -> dict:
        return {
            "H2(Q)": self.h2Q.to_json(),
            "H1(FxQF)": self.h1FQF.to_json(),
            "H1(FxF)": self.h1FF.to_json(),
            "H1(Q)": self.h1Q.to_json(),
            "exact": dict(self.exact),
            "well_defined": dict(self.well_defined),
            "maps": {k: {"rows": m.rows, "cols": m.cols, "entries": m.data} for k, m in self.maps.items()},
        }


def five_term_check(sd: SchreierData) -> FiveTermReport:
    p = sd.table.presentation
    r = sd.rank
    N = sd.basis_count
    S = coinvariant_matrix(rab_module(sd))
    inc = inclusion_to_Fab(sd)

    # H_2(Q) as ker(inc) / (ker(inc) & im S), in coordinates of a kernel basis
    Kb = kernel_basis(inc)
    k = Kb.cols
    rel_h2 = coordinates_in(Kb, intersection(Kb, S)) if k else _zero_lattice(0)
    # H_1(F x_Q F) = Z^(N + r) / (im S + 0)
    rel_fqf = IntMatrix([row + [0] * 0 for row in S.data] + [[0] * S.cols for _ in range(r)], N + r, S.cols)
    rel_ff = _zero_lattice(2 * r)
    rel_q = relation_matrix(p)

    alpha = IntMatrix([row[:] for row in Kb.data] + [[0] * k for _ in range(r)], N + r, k)
    beta = IntMatrix.zeros(2 * r, N + r)
    for i in range(r):
        beta.data[i][:N] = inc.data[i]
        beta.data[r + i][N + i] = 1
    gamma = IntMatrix.zeros(r, 2 * r)
    for i in range(r):
        gamma.data[i][i] = 1

    wd = {
        "H2(Q)->H1(FxQF)": well_defined(alpha, rel_h2, rel_fqf),
        "H1(FxQF)->H1(FxF)": well_defined(beta, rel_fqf, rel_ff),
        "H1(FxF)->H1(Q)": well_defined(gamma, rel_ff, rel_q),
    }
    exact = {
        "H2(Q)": injective(alpha, rel_h2, rel_fqf),
        "H1(FxQF)": exact_at(alpha, beta, rel_fqf, rel_ff),
        "H1(FxF)": exact_at(beta, gamma, rel_ff, rel_q),
        "H1(Q)": surjective(gamma, rel_q),
    }
    return FiveTermReport(
        h2Q=quotient_group(k, rel_h2),
        h1FQF=quotient_group(N + r, rel_fqf),
        h1FF=AbelianGroupInvariants(2 * r),
        h1Q=h1(p),
        maps={"H2(Q)->H1(FxQF)": alpha, "H1(FxQF)->H1(FxF)": beta, "H1(FxF)->H1(Q)": gamma},
        exact=exact,
        well_defined=wd,
    )


@dataclass(frozen=True)
class InducedH2Kernel:
    """Kernel of ``H_2(F x_Q F) -> H_2(F x F)``.

    ``kernel`` columns live in the same coordinates as the 1-cycles of
    :func:`h2_fiber_product` (block ``i`` belongs to generator ``x_i``).
    """

    invariants: AbelianGroupInvariants
    kernel: IntMatrix
    surjective: bool
    h2_fiber: AbelianGroupInvariants
    h2_direct: AbelianGroupInvariants
    image: IntMatrix


def induced_h2_kernel(sd: SchreierData) -> InducedH2Kernel:
    r = sd.rank
    fiber = h2_fiber_product(sd)
    direct = h1_free_with_coefficients(r, CoefficientModule.trivial(r, r))
    phi = block_inclusion(sd)
    Z = fiber.kernel
    images = phi @ Z if Z.cols else IntMatrix.zeros(r * r, 0)
    onto = lattice_equal(image_sum(images, _zero_lattice(r * r)), direct.kernel)
    coords = kernel_basis(images)
    ker = Z @ coords if coords.cols else IntMatrix.zeros(Z.rows, 0)
    return InducedH2Kernel(AbelianGroupInvariants(ker.cols), ker, onto,
                           fiber.invariants, direct.invariants, images)


# --- tensor square coinvariants ---------------------------------------------

def _kron_columns(A: IntMatrix):
    """Sparse columns of ``A (x) A`` as dicts, column index ``m * n + k``."""
    n = A.rows
    cols = [{i: x for i, x in enumerate(col) if x} for col in A.columns()]
    for m in range(n):
        cm = cols[m]
        for k in range(n):
            ck = cols[k]
            out = {}
            for i, x in cm.items():
                base = i * n
                for j, y in ck.items():
                    out[base + j] = out.get(base + j, 0) + x * y
            yield m * n + k, out


def coinvariants_tensor_square_sparse(sd: SchreierData, budget_seconds: float = 600.0,
                                      max_entries: int = 50_000_000) -> AbelianGroupInvariants:
    """``H_0(Q; R_ab (x) R_ab)`` as the cokernel of the stacked ``A_i (x) A_i - I``.

    Works in dimension ``N^2`` with sparse row reduction, so only small
    quotients are in reach. Raises ``BudgetExceeded`` when the time or
    fill-in budget runs out.
    """
    M = rab_module(sd)
    n = M.dimension
    dim = n * n
    start = time.monotonic()
    # sparse echelon keyed by pivot column
    basis: Dict[int, Dict[int, int]] = {}
    entries = 0

    def add(vec: Dict[int, int]):
        nonlocal entries
        while vec:
            j = min(vec)
            row = basis.get(j)
            if row is None:
                if vec[j] < 0:
                    vec = {k: -x for k, x in vec.items()}
                basis[j] = vec
                entries += len(vec)
                return
            a, b = row[j], vec[j]
            if b % a == 0:
                q = b // a
                for k, x in row.items():
                    y = vec.get(k, 0) - q * x
                    if y:
                        vec[k] = y
                    else:
                        vec.pop(k, None)
            else:
                from .zlinalg import xgcd
                g, x, y = xgcd(a, b)
                c, d = -b // g, a // g
                keys = set(row) | set(vec)
                nr, nv = {}, {}
                for k in keys:
                    u, v = row.get(k, 0), vec.get(k, 0)
                    s = x * u + y * v
                    t = c * u + d * v
                    if s:
                        nr[k] = s
                    if t:
                        nv[k] = t
                entries += len(nr) - len(row)
                basis[j] = nr
                vec = nv
            if entries > max_entries:
                raise BudgetExceeded("fill-in budget exceeded in tensor-square coinvariants")
            if time.monotonic() - start > budget_seconds:
                raise BudgetExceeded("time budget exceeded in tensor-square coinvariants")

    for A in M.action:
        for col, vec in _kron_columns(A):
            vec[col] = vec.get(col, 0) - 1
            vec = {k: x for k, x in vec.items() if x}
            if vec:
                add(vec)
    # Smith form of the (small-denominator) echelon part: non-unit pivots only
    rows = sorted(basis)
    unit_cols = [j for j in rows if abs(basis[j][j]) == 1]
    if len(unit_cols) == len(rows):
        return AbelianGroupInvariants(dim - len(rows))
    # unit rows let each unit pivot column be solved for in terms of larger
    # columns; substitute them away, then take a dense Smith form of the rest
    rest = [j for j in rows if abs(basis[j][j]) != 1]
    free_cols = sorted(set(range(dim)) - set(unit_cols))
    pos = {c: i for i, c in enumerate(free_cols)}
    unit = {j: basis[j] for j in unit_cols}

    def project(vec):
        vec = dict(vec)
        pending = sorted(k for k in vec if k in unit)
        while pending:
            c = heapq.heappop(pending)
            x = vec.pop(c, 0)
            if not x:
                continue
            row = unit[c]
            s = row[c]
            for k, y in row.items():
                if k == c:
                    continue
                v = vec.get(k, 0) - x * s * y
                if v:
                    if k not in vec and k in unit:
                        heapq.heappush(pending, k)
                    vec[k] = v
                else:
                    vec.pop(k, None)
        return vec

    mat = []
    for j in rest:
        pv = project(basis[j])
        row = [0] * len(free_cols)
        for k, x in pv.items():
            row[pos[k]] = x
        mat.append(row)
    diag = _snf_diagonal(mat, len(free_cols))
    return AbelianGroupInvariants.from_diagonal(diag, len(free_cols))


@dataclass(frozen=True)
class RelationModulePresentation:
    """``R_ab`` as a quotient of ``ZQ^m``; ``e_i . q`` maps to the class of ``t_q^-1 r_i t_q``.

    Coordinates of ``ZQ^m`` are ``i * |Q| + q``; ``generators`` generate the
    kernel as a ``ZQ``-module.
    """

    order: int
    images: IntMatrix  # N x (m |Q|)
    generators: Tuple[Tuple[int, ...], ...]


def _translate(vec: Sequence[int], table_rows, word_cols, m: int, order: int) -> List[int]:
    """Right translate an element of ``ZQ^m`` by a group element (given as table columns)."""
    out = [0] * (m * order)
    for idx, c in enumerate(vec):
        if c:
            i, q = divmod(idx, order)
            for col in word_cols:
                q = table_rows[q][col]
            out[i * order + q] += c
    return out


def _prime_factors(torsion: Sequence[int]) -> List[int]:
    n = 1
    for t in torsion:
        n *= t
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class _ModPSpan:
    """Row space over ``GF(p)`` kept in reduced echelon form."""

    def __init__(self, prime: int = 2_147_483_647):
        self.P = prime
        self.rows = {}  # pivot -> row, pivot entry 1

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, v):
        P = self.P
        v = [x % P for x in v]
        for j, row in self.rows.items():
            c = v[j]
            if c:
                for k, x in enumerate(row):
                    if x:
                        v[k] = (v[k] - c * x) % P
        return v

    def contains(self, v) -> bool:
        return not any(self._reduce(v))

    def add(self, v) -> None:
        v = self._reduce(v)
        j = next((k for k, x in enumerate(v) if x), None)
        if j is None:
            return
        inv = pow(v[j], -1, self.P)
        v = [x * inv % self.P for x in v]
        for p, row in self.rows.items():
            c = row[j]
            if c:
                self.rows[p] = [(a - c * b) % self.P for a, b in zip(row, v)]
        self.rows[j] = v


def relation_module(sd: SchreierData) -> RelationModulePresentation:
    from .kernels import code_to_col
    from .words import conjugate
    p = sd.table.presentation
    order = sd.table.coset_count
    m = len(p.relators)
    N = sd.basis_count
    cols = [rewrite_abelianized(sd, conjugate(r, sd.transversal[q])) for r in p.relators for q in range(order)]
    Phi = IntMatrix.from_columns(cols, N) if cols else IntMatrix.zeros(N, 0)
    K = kernel_basis(Phi)
    rows = sd.table.rows
    words = [[code_to_col(c) for c in t.codes] for t in sd.transversal]
    # pick generators greedily by rank mod a large prime, then certify over Z:
    # the translates span K iff their cokernel matches that of K (Hopfian)
    span = _ModPSpan()
    gens, translates = [], []
    target = K.cols
    for v in K.columns():
        if span.rank == target:
            break
        if span.contains(v):
            continue
        gens.append(tuple(v))
        for w in words:
            u = _translate(v, rows, w, m, order)
            translates.append(u)
            span.add(u)
    # rank alone can leave finite index: work in coordinates of K and, for
    # each prime dividing the index, add basis vectors of K until full rank mod it
    if K.cols:
        X = coordinates_in(K, IntMatrix.from_columns(translates, m * order))
        while True:
            inv = cokernel_invariants(X)
            if inv.is_trivial:
                break
            cols = list(X.columns())
            for ell in _prime_factors(inv.torsion):
                span = _ModPSpan(ell)
                for c in cols:
                    span.add(c)
                for j, v in enumerate(K.columns()):
                    if span.rank == K.cols:
                        break
                    unit = [0] * K.cols
                    unit[j] = 1
                    if span.contains(unit):
                        continue
                    gens.append(tuple(v))
                    new = IntMatrix.from_columns([_translate(v, rows, w, m, order) for w in words], m * order)
                    for c in coordinates_in(K, new).columns():
                        cols.append(c)
                        span.add(c)
            X = IntMatrix.from_columns(cols, K.cols)
    return RelationModulePresentation(order, Phi, tuple(gens))


def coinvariants_tensor_square(sd: SchreierData, budget_seconds: float = 600.0) -> AbelianGroupInvariants:
    """``H_0(Q; R_ab (x) R_ab)``.

    With the diagonal action, ``(M (x) N)_Q = M (x)_ZQ N'`` where ``N'`` has
    ``q . n = n q^-1``. Presenting ``R_ab`` over ``ZQ`` by the relator
    classes, this is ``N^m`` modulo ``sum_q c_(i,q) q^-1`` applied to ``N``
    for each module generator ``c`` of the relations. Raises
    ``BudgetExceeded`` past ``budget_seconds``.
    """
    return _tensor_square(sd, budget_seconds)[0]


def tensor_square_onto_fab(sd: SchreierData, budget_seconds: float = 600.0) -> bool:
    """Whether ``(R_ab (x) R_ab)_Q -> F_ab (x) F_ab`` is onto."""
    return _tensor_square(sd, budget_seconds)[1]


def _tensor_square(sd: SchreierData, budget_seconds: float):
    from .schreier import conjugation_matrix
    from .words import invert

    p = sd.table.presentation
    start = time.monotonic()
    pres = relation_module(sd)
    order, m, N = pres.order, len(p.relators), sd.basis_count
    # B_q is the action of q^-1
    B = [conjugation_matrix(sd, invert(sd.transversal[q])) for q in range(order)]
    rels = []
    for g in pres.generators:
        if time.monotonic() - start > budget_seconds:
            raise BudgetExceeded("time budget exceeded in tensor-square coinvariants")
        blocks = []
        for i in range(m):
            C = [[0] * N for _ in range(N)]
            for q in range(order):
                c = g[i * order + q]
                if c:
                    Bq = B[q].data
                    for a in range(N):
                        row, src = C[a], Bq[a]
                        for j in range(N):
                            if src[j]:
                                row[j] += c * src[j]
            blocks.append(C)
        for j in range(N):
            rels.append([blocks[i][a][j] for i in range(m) for a in range(N)])
    rel = IntMatrix.from_columns(rels, m * N) if rels else IntMatrix.zeros(m * N, 0)
    inv = cokernel_invariants(rel)
    # e_i (x) n maps to exp(r_i) (x) inc(n)
    r = p.rank
    inc = inclusion_to_Fab(sd)
    images = []
    for rel_word in p.relators:
        e = exponent_sums(rel_word, r)
        for n_col in inc.columns():
            images.append([e[a] * n_col[b] for a in range(r) for b in range(r)])
    onto = lattice_equal(image_sum(IntMatrix.from_columns(images, r * r) if images else IntMatrix.zeros(r * r, 0),
                                   IntMatrix.zeros(r * r, 0)), IntMatrix.identity(r * r))
    return inv, onto
