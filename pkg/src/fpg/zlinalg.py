"""Exact integer linear algebra.

Matrices act on column vectors, and a lattice is given by a matrix whose
columns generate it. Internally most routines work on lists of row
vectors (the transposed picture), since Python lists make row operations
cheap. Entries are Python ints throughout; nothing here touches floats.
"""

from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

from . import kernels
from .errors import LatticeContainmentError


class IntMatrix:
    """Dense integer matrix, row-major list of lists."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Sequence[int]] = (), rows: int = None, cols: int = None):
        self.data = [list(map(int, r)) for r in data]
        if rows is None:
            rows = len(self.data)
        if cols is None:
            cols = len(self.data[0]) if self.data else 0
        if len(self.data) != rows or any(len(r) != cols for r in self.data):
            raise ValueError("inconsistent matrix dimensions")
        self.rows = rows
        self.cols = cols

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        m = cls.zeros(n, n)
        for i in range(n):
            m.data[i][i] = 1
        return m

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        m = cls.zeros(rows, len(columns))
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise ValueError("column length mismatch")
            for i, x in enumerate(col):
                m.data[i][j] = int(x)
        return m

    def columns(self) -> List[List[int]]:
        return [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.columns() if self.cols else [], self.cols, self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = other.columns()
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c) if a) for c in ocols] for r in self.data],
            self.rows, other.cols)

    def apply(self, v: Sequence[int]) -> List[int]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum(a * b for a, b in zip(r, v) if a) for r in self.data]

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
                         self.rows, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.data)

    def copy(self) -> "IntMatrix":
        return IntMatrix(self.data, self.rows, self.cols)

    def __repr__(self) -> str:
        return f"IntMatrix({self.data!r})"

    def to_text(self) -> str:
        """Plain grid format: header ``rows cols`` then whitespace-separated rows."""
        lines = [f"{self.rows} {self.cols}"]
        lines += [" ".join(map(str, r)) for r in self.data]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "IntMatrix":
        tokens = text.split()
        if len(tokens) < 2:
            raise ValueError("missing 'rows cols' header")
        rows, cols = int(tokens[0]), int(tokens[1])
        body = tokens[2:]
        if len(body) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, found {len(body)}")
        vals = list(map(int, body))
        return cls([vals[i * cols:(i + 1) * cols] for i in range(rows)], rows, cols)


def as_matrix(m) -> IntMatrix:
    if isinstance(m, IntMatrix):
        return m
    return IntMatrix(m)


def hstack(*ms: IntMatrix) -> IntMatrix:
    rows = ms[0].rows
    if any(m.rows != rows for m in ms):
        raise ValueError("row count mismatch")
    return IntMatrix([sum((m.data[i] for m in ms), []) for i in range(rows)], rows,
                     sum(m.cols for m in ms))


def vstack(*ms: IntMatrix) -> IntMatrix:
    cols = ms[0].cols
    if any(m.cols != cols for m in ms):
        raise ValueError("column count mismatch")
    return IntMatrix([r for m in ms for r in m.data], sum(m.rows for m in ms), cols)


def determinant(m: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = m.rows
    if n != m.cols:
        raise ValueError("determinant of a non-square matrix")
    a = [r[:] for r in m.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class AbelianGroupInvariants:
    """``Z^free_rank + Z/d1 + Z/d2 + ...`` with ``d1 | d2 | ...``, each ``>= 2``."""

    free_rank: int = 0
    torsion: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion)
        if any(d < 2 for d in t):
            raise ValueError("torsion coefficients must be >= 2")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError("torsion coefficients must form a divisibility chain")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_diagonal(cls, diagonal: Iterable[int], ambient: int) -> "AbelianGroupInvariants":
        """Invariants of ``Z^ambient / diag(d)``; zero entries count as free."""
        d = [abs(x) for x in diagonal if x]
        return cls(ambient - len(d), tuple(sorted(x for x in d if x != 1)))

    @classmethod
    def parse(cls, text: str) -> "AbelianGroupInvariants":
        """Read ``"0"``, ``"Z^4"``, ``"Z/2"``, ``"Z^2 + Z/2 + Z/6"``."""
        text = text.replace(" ", "").replace("ℤ", "Z")
        if text in ("0", "1", ""):
            return cls()
        free = 0
        tors = []
        for part in text.split("+"):
            if part.startswith("Z/"):
                tors.append(int(part[2:]))
            elif part == "Z":
                free += 1
            elif part.startswith("Z^"):
                free += int(part[2:])
            else:
                raise ValueError(f"cannot parse abelian group {text!r}")
        return cls(free, tuple(_normalize_torsion(tors)))

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self):
        """Group order, or None if infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __add__(self, other: "AbelianGroupInvariants") -> "AbelianGroupInvariants":
        return AbelianGroupInvariants(self.free_rank + other.free_rank,
                                      tuple(_normalize_torsion(self.torsion + other.torsion)))

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion), "text": str(self)}


def _normalize_torsion(ds: Iterable[int]) -> List[int]:
    """Invariant factors of a direct sum of cyclic groups of the given orders."""
    ds = [abs(int(d)) for d in ds if abs(int(d)) > 1]
    if not ds:
        return []
    n = len(ds)
    return [d for d in _snf_diagonal([[ds[i] if j == i else 0 for j in range(n)] for i in range(n)], n) if d > 1]


# --- echelon forms on row lists -------------------------------------------

def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """``(g, x, y)`` with ``a*x + b*y = g = gcd(a, b) >= 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _first_nonzero(v: Sequence[int], start: int = 0, stop: int = None) -> int:
    stop = len(v) if stop is None else stop
    for j in range(start, stop):
        if v[j]:
            return j
    return -1


class Echelon:
    """Incrementally maintained row-style Hermite basis of a lattice.

    Only the first ``width`` coordinates take part in pivoting; trailing
    coordinates are carried along (used for transformation tracking).
    Vectors whose leading part reduces to zero are collected in ``null``.
    """

    def __init__(self, width: int, total: int = None):
        self.width = width
        self.total = width if total is None else total
        self.basis: List[List[int]] = []
        self.pivots: List[int] = []
        self.where = {}
        self.null: List[List[int]] = []

    def add(self, v: Sequence[int]) -> None:
        v = list(v)
        width = self.width
        j = _first_nonzero(v, 0, width)
        while j >= 0:
            p = self.where.get(j)
            if p is None:
                self._insert(v, j)
                return
            row = self.basis[p]
            a = row[j]
            b = v[j]
            if b % a == 0:
                kernels.sub_multiple(v, row, b // a, j)
            else:
                g, x, y = xgcd(a, b)
                kernels.combine(row, v, x, y, -b // g, a // g, j)
                if row[j] < 0:
                    for k in range(j, len(row)):
                        row[k] = -row[k]
            j = _first_nonzero(v, j + 1, width)
        if any(v):
            self.null.append(v)

    def _insert(self, v: List[int], j: int) -> None:
        if v[j] < 0:
            for k in range(j, len(v)):
                v[k] = -v[k]
        k = 0
        while k < len(self.pivots) and self.pivots[k] < j:
            k += 1
        self.basis.insert(k, v)
        self.pivots.insert(k, j)
        self.where = {c: i for i, c in enumerate(self.pivots)}

    def reduce_above(self) -> None:
        """Bring entries above each pivot into ``[0, pivot)``."""
        # left to right: reducing by row i only touches columns >= pivot i
        for i in range(len(self.basis)):
            j = self.pivots[i]
            row = self.basis[i]
            d = row[j]
            for k in range(i):
                r = self.basis[k]
                q = r[j] // d
                if q:
                    kernels.sub_multiple(r, row, q, j)

    def reduce_vector(self, v: Sequence[int]) -> List[int]:
        """Remainder of ``v`` after division by the basis (leading part)."""
        v = list(v)
        for i, j in enumerate(self.pivots):
            if v[j]:
                row = self.basis[i]
                q = v[j] // row[j]
                if q:
                    kernels.sub_multiple(v, row, q, j)
        return v

    def contains(self, v: Sequence[int]) -> bool:
        r = self.reduce_vector(v)
        return not any(r[:self.width])

    def coordinates(self, v: Sequence[int]) -> List[int]:
        """Coefficients of ``v`` in the basis; raises if ``v`` is outside."""
        v = list(v)
        coords = []
        for i, j in enumerate(self.pivots):
            row = self.basis[i]
            q, r = divmod(v[j], row[j])
            if r:
                raise LatticeContainmentError("vector not in lattice")
            coords.append(q)
            if q:
                kernels.sub_multiple(v, row, q, j)
        if any(v[:self.width]):
            raise LatticeContainmentError("vector not in lattice")
        return coords

    @property
    def rank(self) -> int:
        return len(self.basis)


def _nearest_quotient(b: int, a: int) -> int:
    return (2 * b + a) // (2 * a)


def echelon_rows(vectors: Iterable[Sequence[int]], width: int) -> List[List[int]]:
    """Reduced row-style Hermite normal form basis of the span of ``vectors``.

    Column by column, the row with the smallest pivot entry reduces all
    others (nearest-integer quotients), which keeps intermediate entries
    far smaller than one-row-at-a-time insertion.
    """
    rows = [list(v) for v in vectors]
    rows = [r for r in rows if _first_nonzero(r, 0, width) >= 0]
    e = Echelon(width, len(rows[0]) if rows else width)
    for j in range(width):
        if not rows:
            break
        while True:
            nz = [r for r in rows if r[j]]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda r: (abs(r[j]), sum(map(abs, r))))
            a = p[j]
            for r in nz:
                if r is not p:
                    kernels.sub_multiple(r, p, _nearest_quotient(r[j], a), j)
            rows = [r for r in rows if _first_nonzero(r, j, width) >= 0]
        if nz:
            p = nz[0]
            if p[j] < 0:
                for k in range(j, len(p)):
                    p[k] = -p[k]
            rows = [r for r in rows if r is not p]
            e.basis.append(p)
            e.pivots.append(j)
    e.where = {c: i for i, c in enumerate(e.pivots)}
    e.reduce_above()
    return e.basis


def hermite_normal_form(M) -> IntMatrix:
    """Column-style HNF: columns form the reduced Hermite basis of colspace(M)."""
    M = as_matrix(M)
    basis = echelon_rows(M.columns(), M.rows)
    return IntMatrix.from_columns(basis, M.rows) if basis else IntMatrix.zeros(M.rows, 0)


# --- Smith normal form ------------------------------------------------------

def _snf_diagonal(a: List[List[int]], ncols: int) -> List[int]:
    """Diagonal of the Smith form of ``a`` (destroys ``a``); no transforms."""
    a = echelon_rows(a, ncols)
    diag = []
    while a:
        # a is a list of nonzero rows; find smallest |entry|
        best = None
        for i, r in enumerate(a):
            for j, x in enumerate(r):
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        _, pi, pj = best
        a[0], a[pi] = a[pi], a[0]
        for r in a:
            r[0], r[pj] = r[pj], r[0]
        while True:
            piv = a[0][0]
            dirty = False
            for i in range(1, len(a)):
                x = a[i][0]
                if x:
                    q = x // piv
                    kernels.sub_multiple(a[i], a[0], q)
                    if a[i][0]:
                        dirty = True
            row0 = a[0]
            for j in range(1, len(row0)):
                x = row0[j]
                if x:
                    q = x // piv
                    for r in a:
                        if r[0]:
                            r[j] -= q * r[0]
                    if row0[j]:
                        dirty = True
            if not dirty:
                bad = None
                for i in range(1, len(a)):
                    for x in a[i][1:]:
                        if x % piv:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                kernels.sub_multiple(a[0], a[bad], -1)
                dirty = True
            # move the smallest entry of row 0 / column 0 to the corner
            best = (abs(a[0][0]), 0, 0)
            for i in range(1, len(a)):
                if a[i][0] and abs(a[i][0]) < best[0]:
                    best = (abs(a[i][0]), i, 0)
            for j in range(1, len(a[0])):
                if a[0][j] and abs(a[0][j]) < best[0]:
                    best = (abs(a[0][j]), 0, j)
            _, pi, pj = best
            if pi:
                a[0], a[pi] = a[pi], a[0]
            if pj:
                for r in a:
                    r[0], r[pj] = r[pj], r[0]
        diag.append(abs(a[0][0]))
        a = [r[1:] for r in a[1:]]
        a = [r for r in a if any(r)]
    return diag


def smith_normal_form(M) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """``(S, U, V)`` with ``U @ M @ V == S``, ``U``, ``V`` unimodular.

    ``S`` is diagonal with nonnegative entries ``d1 | d2 | ...``. Pivot: the
    smallest nonzero absolute value in the active block, ties to the lowest
    (row, column) index.
    """
    M = as_matrix(M)
    m, n = M.rows, M.cols
    A = [r[:] for r in M.data]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    # V is stored transposed so that column operations are row operations.
    Vt = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for r in A:
            r[j], r[k] = r[k], r[j]
        Vt[j], Vt[k] = Vt[k], Vt[j]

    def row_sub(i, k, q):  # row_i -= q * row_k
        kernels.sub_multiple(A[i], A[k], q)
        kernels.sub_multiple(U[i], U[k], q)

    def col_sub(j, k, q):  # col_j -= q * col_k
        for r in A:
            if r[k]:
                r[j] -= q * r[k]
        kernels.sub_multiple(Vt[j], Vt[k], q)

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            r = A[i]
            for j in range(t, n):
                x = r[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            piv = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    row_sub(i, t, A[i][t] // piv)
            for j in range(t + 1, n):
                if A[t][j]:
                    col_sub(j, t, A[t][j] // piv)
            best = None
            for i in range(t + 1, m):
                x = A[i][t]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, t)
            for j in range(t + 1, n):
                x = A[t][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), t, j)
            if best is not None:
                _, pi, pj = best
                if pi != t:
                    swap_rows(t, pi)
                if pj != t:
                    swap_cols(t, pj)
                continue
            bad = None
            for i in range(t + 1, m):
                r = A[i]
                for j in range(t + 1, n):
                    if r[j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_sub(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    S = IntMatrix(A, m, n)
    V = IntMatrix(Vt, n, n).transpose() if n else IntMatrix.zeros(0, 0)
    return S, IntMatrix(U, m, m), V


def invariant_factors(M) -> List[int]:
    """Nonzero diagonal entries of the Smith form of ``M``."""
    M = as_matrix(M)
    return _snf_diagonal([r[:] for r in M.data], M.cols)


def rank(M) -> int:
    M = as_matrix(M)
    return len(echelon_rows(M.data, M.cols))


# --- kernels, cokernels, lattices -----------------------------------------

def kernel_basis(M) -> IntMatrix:
    """Columns form a basis of the (saturated) lattice ``{x : M x = 0}``,
    in reduced Hermite form."""
    M = as_matrix(M)
    m, n = M.rows, M.cols
    # unimodular column operations on M, tracked on an identity block
    cols = [[M.data[i][j] for i in range(m)] + [1 if k == j else 0 for k in range(n)] for j in range(n)]
    active = list(range(n))
    for i in range(m):
        while True:
            nz = [j for j in active if cols[j][i]]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda j: (abs(cols[j][i]), sum(map(abs, cols[j]))))
            cp = cols[p]
            a = cp[i]
            for j in nz:
                if j != p:
                    kernels.sub_multiple(cols[j], cp, _nearest_quotient(cols[j][i], a), i)
        if nz:
            active.remove(nz[0])
    null = echelon_rows([cols[j][m:] for j in active], n)
    return IntMatrix.from_columns(null, n) if null else IntMatrix.zeros(n, 0)


def cokernel_invariants(M) -> AbelianGroupInvariants:
    """Invariants of ``Z^rows / colspace(M)``."""
    M = as_matrix(M)
    basis = echelon_rows(M.columns(), M.rows)
    return AbelianGroupInvariants.from_diagonal(_snf_diagonal(basis, M.rows), M.rows)


def _lattice_rows(L) -> Tuple[List[List[int]], int]:
    L = as_matrix(L)
    return echelon_rows(L.columns(), L.rows), L.rows


def lattice(L) -> IntMatrix:
    """Canonical (reduced Hermite) basis of colspace(L), as columns."""
    return hermite_normal_form(L)


def image_sum(A, B) -> IntMatrix:
    A, B = as_matrix(A), as_matrix(B)
    if A.rows != B.rows:
        raise ValueError("ambient dimension mismatch")
    basis = echelon_rows(A.columns() + B.columns(), A.rows)
    return IntMatrix.from_columns(basis, A.rows) if basis else IntMatrix.zeros(A.rows, 0)


def intersection(A, B) -> IntMatrix:
    A, B = lattice(A), lattice(B)
    n = A.rows
    if n != B.rows:
        raise ValueError("ambient dimension mismatch")
    if A.cols == 0 or B.cols == 0:
        return IntMatrix.zeros(n, 0)
    negB = IntMatrix([[-x for x in r] for r in B.data], n, B.cols)
    K = kernel_basis(hstack(A, negB))
    vecs = [A.apply(col[:A.cols]) for col in K.columns()]
    basis = echelon_rows(vecs, n)
    return IntMatrix.from_columns(basis, n) if basis else IntMatrix.zeros(n, 0)


def saturation(A) -> IntMatrix:
    """``(Q * colspace(A)) & Z^n``."""
    A = as_matrix(A)
    n = A.rows
    if A.cols == 0:
        return IntMatrix.zeros(n, 0)
    ann = kernel_basis(A.transpose())  # columns y with y^T A = 0
    if ann.cols == 0:
        return IntMatrix.identity(n)
    return hermite_normal_form(kernel_basis(ann.transpose()))


def contains(big, small) -> bool:
    """Whether colspace(small) is inside colspace(big)."""
    big, small = as_matrix(big), as_matrix(small)
    e = Echelon(big.rows)
    for v in big.columns():
        e.add(v)
    return all(e.contains(v) for v in small.columns())


def lattice_equal(A, B) -> bool:
    return lattice(A) == lattice(B)


def coordinates_in(basis, vectors) -> IntMatrix:
    """Coefficients expressing each column of ``vectors`` in the columns of
    ``basis`` (which must be linearly independent)."""
    basis, vectors = as_matrix(basis), as_matrix(vectors)
    n = basis.rows
    e = Echelon(n, n + basis.cols)
    for j, col in enumerate(basis.columns()):
        tag = [0] * basis.cols
        tag[j] = 1
        e.add(col + tag)
    if e.null:
        raise ValueError("basis columns are linearly dependent")
    out = []
    for v in vectors.columns():
        c = e.coordinates(list(v) + [0] * basis.cols)
        # c is in terms of echelon rows; map back through the carried tags
        total = [0] * basis.cols
        for coeff, row in zip(c, e.basis):
            if coeff:
                for k in range(basis.cols):
                    total[k] += coeff * row[n + k]
        out.append(total)
    return IntMatrix.from_columns(out, basis.cols) if out else IntMatrix.zeros(basis.cols, 0)


def quotient_invariants(sub, sup) -> AbelianGroupInvariants:
    """Invariants of ``colspace(sup) / colspace(sub)``; requires containment."""
    sub, sup = as_matrix(sub), as_matrix(sup)
    if sub.rows != sup.rows:
        raise ValueError("ambient dimension mismatch")
    B = lattice(sup)
    try:
        C = coordinates_in(B, sub)
    except LatticeContainmentError:
        raise LatticeContainmentError("sub-lattice is not contained in super-lattice") from None
    return cokernel_invariants(C) if B.cols else AbelianGroupInvariants()


def preimage(M, L) -> IntMatrix:
    """Basis (columns) of ``{x : M x in colspace(L)}``."""
    M, L = as_matrix(M), as_matrix(L)
    n = M.cols
    if L.cols == 0:
        return kernel_basis(M)
    negL = IntMatrix([[-x for x in r] for r in L.data], L.rows, L.cols)
    K = kernel_basis(hstack(M, negL))
    vecs = [col[:n] for col in K.columns()]
    basis = echelon_rows(vecs, n)
    return IntMatrix.from_columns(basis, n) if basis else IntMatrix.zeros(n, 0)


def image(M, domain=None) -> IntMatrix:
    """Basis of ``M(colspace(domain))`` (``domain`` defaults to everything)."""
    M = as_matrix(M)
    vecs = M.columns() if domain is None else [M.apply(c) for c in as_matrix(domain).columns()]
    basis = echelon_rows(vecs, M.rows)
    return IntMatrix.from_columns(basis, M.rows) if basis else IntMatrix.zeros(M.rows, 0)
