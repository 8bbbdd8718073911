"""Reidemeister-Schreier data for ``R = ker(F -> Q)``.

The free basis of ``R`` consists of the Schreier generators
``t(c) x t(c x)^-1`` for non-tree edges ``(c, x)`` of a breadth-first
spanning tree of the coset graph.
"""

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

from .coset_enum import CosetTable
from .errors import IncompleteTableError, NotInSubgroupError
from .words import Word, conjugate, exponent_sums, invert, multiply
from .zlinalg import IntMatrix


@dataclass(frozen=True, eq=False)
class SchreierData:
    table: CosetTable
    transversal: Tuple[Word, ...]
    basis: Tuple[Tuple[int, int], ...]  # (coset, generator index)
    edge_index: Dict[Tuple[int, int], int]

    @property
    def basis_count(self) -> int:
        return len(self.basis)

    @property
    def rank(self) -> int:
        return self.table.presentation.rank


@lru_cache(maxsize=32)
def schreier_data(t: CosetTable) -> SchreierData:
    """Breadth-first Schreier transversal and the induced free basis.

    Columns are explored in the order ``x_1, x_1^-1, x_2, ...``.
    """
    if not t.complete:
        raise IncompleteTableError("coset table is incomplete")
    n = t.coset_count
    ncols = len(t.rows[0]) if n else 0
    transversal: List[Word] = [None] * n
    transversal[0] = Word()
    tree = set()
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for x in range(ncols):
            d = t.rows[c][x]
            if transversal[d] is None:
                i = x // 2
                letter = Word.generator(i, 1 if x % 2 == 0 else -1)
                transversal[d] = multiply(transversal[c], letter)
                # store as a positive edge (coset, generator)
                tree.add((c, i) if x % 2 == 0 else (d, i))
                queue.append(d)
    basis = []
    for c in range(n):
        for i in range(t.presentation.rank):
            if (c, i) not in tree:
                basis.append((c, i))
    edge_index = {e: m for m, e in enumerate(basis)}
    return SchreierData(t, tuple(transversal), tuple(basis), edge_index)


def expand_basis_element(sd: SchreierData, m: int) -> Word:
    c, i = sd.basis[m]
    d = sd.table.rows[c][2 * i]
    return multiply(multiply(sd.transversal[c], Word.generator(i)), invert(sd.transversal[d]))


def expand(sd: SchreierData, w: Word) -> Word:
    """Word of ``F`` represented by a word over the basis alphabet."""
    out = []
    for c in w.codes:
        e = expand_basis_element(sd, abs(c) - 1)
        out.extend(e.codes if c > 0 else invert(e).codes)
    return Word(out)


def rewrite_in_R(sd: SchreierData, w: Word) -> Word:
    """Rewrite ``w`` (an element of ``R``) over the basis alphabet."""
    rows = sd.table.rows
    idx = sd.edge_index
    c = 0
    out = []
    for code in w.codes:
        i = abs(code) - 1
        if code > 0:
            m = idx.get((c, i))
            if m is not None:
                out.append(m + 1)
            c = rows[c][2 * i]
        else:
            d = rows[c][2 * i + 1]
            m = idx.get((d, i))
            if m is not None:
                out.append(-(m + 1))
            c = d
    if c != 0:
        raise NotInSubgroupError("word does not lie in R")
    return Word(out)


def rewrite_abelianized(sd: SchreierData, w: Word) -> List[int]:
    return exponent_sums(rewrite_in_R(sd, w), sd.basis_count)


def conjugation_matrix(sd: SchreierData, g: Word) -> IntMatrix:
    """Matrix of ``a -> g^-1 a g`` on ``R_ab``; column ``m`` is the image of ``a_m``."""
    N = sd.basis_count
    cols = [rewrite_abelianized(sd, conjugate(expand_basis_element(sd, m), g)) for m in range(N)]
    return IntMatrix.from_columns(cols, N) if N else IntMatrix.zeros(0, 0)


def action_on_Rab(sd: SchreierData) -> List[IntMatrix]:
    """One matrix per generator of ``F``; a right action, so a word
    ``u v`` acts by ``A(v) @ A(u)``."""
    return [conjugation_matrix(sd, Word.generator(i)) for i in range(sd.rank)]


def word_action(matrices: List[IntMatrix], inverses: List[IntMatrix], w: Word) -> IntMatrix:
    """Compose generator matrices along ``w`` (right action)."""
    n = matrices[0].rows if matrices else 0
    out = IntMatrix.identity(n)
    for c in w.codes:
        A = matrices[abs(c) - 1] if c > 0 else inverses[abs(c) - 1]
        out = A @ out
    return out


def inclusion_to_Fab(sd: SchreierData) -> IntMatrix:
    """``rank(F) x N`` matrix; column ``m`` is the exponent-sum vector of ``a_m``."""
    r = sd.rank
    cols = [exponent_sums(expand_basis_element(sd, m), r) for m in range(sd.basis_count)]
    return IntMatrix.from_columns(cols, r) if cols else IntMatrix.zeros(r, 0)


def checksum(m: IntMatrix) -> int:
    """Order-sensitive 32-bit digest of a matrix, stable across runs."""
    import zlib
    return zlib.crc32(m.to_text().encode())
