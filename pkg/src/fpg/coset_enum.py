"""Todd-Coxeter enumeration of the cosets of the trivial subgroup."""

from dataclasses import dataclass
from typing import List, Tuple

from . import kernels
from .errors import IncompleteTableError
from .presentations import FinitePresentation
from .words import Word

DEFAULT_MAX_COSETS = 10**6


@dataclass(frozen=True)
class CosetTable:
    """Action of the generators on the cosets of the trivial subgroup.

    ``rows[c][2*i]`` is ``c * x_i`` and ``rows[c][2*i + 1]`` is
    ``c * x_i^-1``; ``-1`` marks an undefined entry. Coset 0 is the
    subgroup itself.
    """

    presentation: FinitePresentation
    rows: Tuple[Tuple[int, ...], ...]

    @property
    def coset_count(self) -> int:
        return len(self.rows)

    @property
    def complete(self) -> bool:
        return all(e >= 0 for row in self.rows for e in row)

    def act(self, coset: int, w: Word) -> int:
        """Image of ``coset`` under ``w``; -1 if the trace hits a gap."""
        return kernels.trace(self.rows, coset, [kernels.code_to_col(c) for c in w.codes])


def todd_coxeter(p: FinitePresentation, max_cosets: int = DEFAULT_MAX_COSETS,
                 strategy: str = "hlt") -> CosetTable:
    """HLT (default) or Felsch enumeration; raises ``CosetLimitExceeded``."""
    rows = kernels.coset_enumerate(p.rank, [r.codes for r in p.relators], max_cosets, strategy)
    return CosetTable(p, tuple(tuple(r) for r in rows))


def _require_complete(t: CosetTable) -> None:
    if not t.complete:
        raise IncompleteTableError("coset table is incomplete")


def group_order(t: CosetTable) -> int:
    _require_complete(t)
    return t.coset_count


def permutation_action(t: CosetTable) -> List[List[int]]:
    """One permutation of ``range(|Q|)`` per generator, as image lists."""
    _require_complete(t)
    return [[row[2 * i] for row in t.rows] for i in range(t.presentation.rank)]


def relators_hold(t: CosetTable) -> bool:
    """Every relator traces from every coset back to itself."""
    return all(t.act(c, r) == c for r in t.presentation.relators for c in range(t.coset_count))
