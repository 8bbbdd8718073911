"""Finite presentations and the constructions built on them."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .words import (
    IDENTITY,
    Word,
    commutator,
    conjugate,
    cyclic_reduce,
    format_word,
    invert,
    multiply,
    parse_word,
)

log = logging.getLogger(__name__)


def default_names(rank: int) -> Tuple[str, ...]:
    if rank <= 26:
        return tuple(chr(ord("a") + i) for i in range(rank))
    return tuple(f"x{i + 1}" for i in range(rank))


@dataclass(frozen=True)
class FinitePresentation:
    rank: int
    relators: Tuple[Word, ...] = ()
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("negative rank")
        kept = []
        for r in self.relators:
            r = r if isinstance(r, Word) else Word(r)
            if not r:
                log.warning("dropping trivial relator")
                continue
            if r.max_index() >= self.rank:
                raise ValueError(f"relator {r} uses a generator outside rank {self.rank}")
            kept.append(r)
        object.__setattr__(self, "relators", tuple(kept))
        if self.names is not None:
            names = tuple(self.names)
            if len(names) != self.rank or len(set(names)) != len(names):
                raise ValueError("generator names must be distinct, one per generator")
            object.__setattr__(self, "names", names)

    @classmethod
    def parse(cls, generators: Sequence[str], relators: Sequence[str]) -> "FinitePresentation":
        names = tuple(generators)
        lookup = names if all(len(n) == 1 for n in names) else None
        return cls(len(names), tuple(parse_word(r, lookup) for r in relators), names)

    @classmethod
    def free(cls, rank: int) -> "FinitePresentation":
        return cls(rank, ())

    @property
    def generator_names(self) -> Tuple[str, ...]:
        return self.names if self.names is not None else default_names(self.rank)

    def format_relators(self) -> List[str]:
        names = self.generator_names
        return [format_word(r, names) for r in self.relators]

    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)

    def __str__(self) -> str:
        gens = ", ".join(self.generator_names)
        rels = ", ".join(self.format_relators())
        return f"< {gens} | {rels} >"


def is_balanced(p: FinitePresentation) -> bool:
    return len(p.relators) == p.rank


@dataclass(frozen=True)
class PresentationMorphism:
    """Homomorphism given by generator images; relator triviality is not checked."""

    source: FinitePresentation
    target: FinitePresentation
    images: Tuple[Word, ...]
    certificate: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        images = tuple(w if isinstance(w, Word) else Word(w) for w in self.images)
        if len(images) != self.source.rank:
            raise ValueError("need one image per source generator")
        for w in images:
            if w.max_index() >= self.target.rank:
                raise ValueError(f"image {w} outside the target generators")
        object.__setattr__(self, "images", images)

    def apply(self, w: Word) -> Word:
        out = []
        for c in w.codes:
            img = self.images[abs(c) - 1]
            out.extend(img.codes if c > 0 else invert(img).codes)
        return Word(out)

    @classmethod
    def identity(cls, p: FinitePresentation) -> "PresentationMorphism":
        return cls(p, p, tuple(Word.generator(i) for i in range(p.rank)))


def _shift(w: Word, k: int) -> Word:
    return Word._raw(tuple(c + k if c > 0 else c - k for c in w.codes))


def free_central_extension(p: FinitePresentation) -> FinitePresentation:
    """Presentation of ``F/[F,R]``: relators ``[x_j, r_k]``, ``k`` outer."""
    rels = []
    for r in p.relators:
        for j in range(p.rank):
            rels.append(commutator(Word.generator(j), r))
    return FinitePresentation(p.rank, tuple(rels), p.names)


def direct_product(p1: FinitePresentation, p2: FinitePresentation) -> FinitePresentation:
    k = p1.rank
    rels = list(p1.relators) + [_shift(r, k) for r in p2.relators]
    for i in range(p1.rank):
        for j in range(p2.rank):
            rels.append(commutator(Word.generator(i), Word.generator(k + j)))
    n1, n2 = p1.generator_names, p2.generator_names
    names = None
    if not set(n1) & set(n2):
        names = n1 + n2
    return FinitePresentation(p1.rank + p2.rank, tuple(rels), names)


def free_power(rank: int, n: int) -> FinitePresentation:
    """``F^n`` for ``F`` free of the given rank, factors in order."""
    out = FinitePresentation.free(rank)
    for _ in range(n - 1):
        out = direct_product(out, FinitePresentation.free(rank))
    return out


def _semidirect(sd, acting_rank: int, acting_names, first_coords: Sequence[Word],
                old_relators: Sequence[Word]) -> FinitePresentation:
    """``R x| H`` where generator ``y`` of ``H`` acts on ``R`` by conjugation
    with ``first_coords[y]`` (a word of ``F``)."""
    from .schreier import expand_basis_element, rewrite_in_R

    N = sd.basis_count
    expansions = [expand_basis_element(sd, m) for m in range(N)]
    rels = []
    for y in range(acting_rank):
        g = first_coords[y]
        yw = Word.generator(N + y)
        for m in range(N):
            lhs = conjugate(Word.generator(m), yw)
            rhs = rewrite_in_R(sd, conjugate(expansions[m], g))
            rels.append(multiply(lhs, invert(rhs)))
    rels += [_shift(r, N) for r in old_relators]
    names = tuple(f"r{m + 1}" for m in range(N)) + tuple(acting_names)
    if len(set(names)) != len(names):
        names = None
    return FinitePresentation(N + acting_rank, tuple(rels), names)


def semidirect_product_RF(base: FinitePresentation, table) -> FinitePresentation:
    """Presentation of ``R x| F``, isomorphic to the fiber product ``F x_Q F``.

    Generators: the Schreier basis ``a_1..a_N`` of ``R`` (``N`` = basis
    count), then the generators of ``F``. Relators, generator-major:
    ``x_i^-1 a_m x_i = (x_i^-1 a_m x_i rewritten in the basis)``.
    """
    from .schreier import schreier_data

    if not table.complete:
        from .errors import IncompleteTableError
        raise IncompleteTableError("coset table is incomplete")
    sd = schreier_data(table)
    gens = [Word.generator(i) for i in range(base.rank)]
    return _semidirect(sd, base.rank, base.generator_names, gens, ())


def fiber_product_inclusion(base: FinitePresentation, table, n: int = 2) -> PresentationMorphism:
    """Inclusion ``F_n(p) -> F^n`` for the presentation built by
    :func:`higher_fiber_product` (``n = 2`` gives ``R x| F -> F x F``)."""
    from .schreier import expand_basis_element, schreier_data

    sd = schreier_data(table)
    r = base.rank
    N = sd.basis_count
    expansions = [expand_basis_element(sd, m) for m in range(N)]
    # images[y] = tuple of n coordinates (words of F)
    coords = [(Word.generator(i),) for i in range(r)]
    for level in range(2, n + 1):
        new = [(expansions[m],) + (IDENTITY,) * (level - 1) for m in range(N)]
        old = [(c[0],) + c for c in coords]
        coords = new + old
    source = higher_fiber_product(base, table, n)
    target = free_power(r, n)
    images = []
    for c in coords:
        w = IDENTITY
        for k, word in enumerate(c):
            w = multiply(w, _shift(word, k * r))
        images.append(w)
    return PresentationMorphism(source, target, tuple(images))


def higher_fiber_product(base: FinitePresentation, table, n: int) -> FinitePresentation:
    """``F_n(p) = {(x_1..x_n) : p(x_1) = ... = p(x_n)}``, built as the
    iterated split extension ``R x| F_{n-1}(p)``.

    The complement ``F_{n-1}(p)`` embeds by repeating its first coordinate,
    so it acts on ``R`` through that coordinate.
    """
    if n < 2:
        raise ValueError("higher fiber products need n >= 2")
    from .schreier import expand_basis_element, schreier_data

    sd = schreier_data(table)
    N = sd.basis_count
    expansions = [expand_basis_element(sd, m) for m in range(N)]
    pres = base.__class__(base.rank, (), base.generator_names)
    first = [Word.generator(i) for i in range(base.rank)]
    names = list(base.generator_names)
    for level in range(2, n + 1):
        pres = _semidirect(sd, pres.rank, names, first, pres.relators)
        names = [f"r{m + 1}_{level}" if level > 2 else f"r{m + 1}" for m in range(N)] + names
        first = expansions + first
    return FinitePresentation(pres.rank, pres.relators, tuple(names) if len(set(names)) == len(names) else None)


@dataclass(frozen=True)
class TietzeResult:
    presentation: FinitePresentation
    kept_generators: Tuple[int, ...]
    kept_relators: Tuple[int, ...]
    eliminations: Tuple[Tuple[int, Word], ...]
    minimal: bool
    source: Optional[FinitePresentation] = field(default=None, compare=False)

    def project_relator_vector(self, v: Sequence[int]) -> List[int]:
        """Relator-class coordinates after elimination.

        Eliminated relators map to the trivial class; kept ones to
        themselves.
        """
        return [v[i] for i in self.kept_relators]

    def source_values(self, kept_values: Sequence, multiply_fn, invert_fn, identity) -> List:
        """Values of the source generators in some group, given values of
        the kept ones; eliminated generators are evaluated through their
        substitutions (last eliminated first)."""
        values = [None] * self.source.rank
        for g, v in zip(self.kept_generators, kept_values):
            values[g] = v
        for g, sub in reversed(self.eliminations):
            values[g] = evaluate_word(sub, values, multiply_fn, invert_fn, identity)
        return values


def evaluate_word(w: Word, values: Sequence, multiply_fn, invert_fn, identity):
    """Evaluate ``w`` in a group given by callables and generator values."""
    out = identity
    inverses = {}
    for c in w.codes:
        i = abs(c) - 1
        if c > 0:
            out = multiply_fn(out, values[i])
        else:
            if i not in inverses:
                inverses[i] = invert_fn(values[i])
            out = multiply_fn(out, inverses[i])
    return out


def tietze_eliminate(p: FinitePresentation, budget: int = 10_000) -> TietzeResult:
    """Eliminate generators occurring exactly once in some relator.

    At each step the elimination with the shortest substituted word wins
    (ties: lowest relator, then generator index). Stops at a fixpoint, or
    when every remaining candidate would push some relator past ``budget``
    letters; the latter result is flagged ``minimal=False``. Relators are
    only freely and cyclically reduced, never inverted, so their classes in
    ``R/[F,R]`` are preserved.
    """
    rels = {k: cyclic_reduce(r) for k, r in enumerate(p.relators)}
    alive = set(range(p.rank))
    eliminations = []
    minimal = True
    while True:
        cands = []
        for k in sorted(rels):
            r = rels[k]
            counts = {}
            for c in r.codes:
                counts[abs(c) - 1] = counts.get(abs(c) - 1, 0) + 1
            for g, n in counts.items():
                if n == 1:
                    cands.append((len(r) - 1, k, g))
        if not cands:
            break
        cands.sort()
        done = False
        for _, k, g in cands:
            r = rels[k]
            pos = next(i for i, c in enumerate(r.codes) if abs(c) - 1 == g)
            u = Word._raw(r.codes[:pos])
            v = Word._raw(r.codes[pos + 1:])
            if r.codes[pos] > 0:
                sub = multiply(invert(u), invert(v))
            else:
                sub = multiply(v, u)
            new = {}
            ok = True
            for j, s in rels.items():
                if j == k:
                    continue
                if any(abs(c) - 1 == g for c in s.codes):
                    out = []
                    for c in s.codes:
                        if abs(c) - 1 == g:
                            out.extend(sub.codes if c > 0 else invert(sub).codes)
                        else:
                            out.append(c)
                    s = cyclic_reduce(Word(out))
                    if len(s) > budget:
                        ok = False
                        break
                new[j] = s
            if not ok:
                minimal = False
                continue
            for j, s in new.items():
                if not s:
                    log.warning("relator %d became trivial during elimination", j)
            rels = {j: s for j, s in new.items() if s}
            alive.discard(g)
            eliminations.append((g, sub))
            done = True
            break
        if not done:
            break
    kept = sorted(alive)
    renum = {g: i for i, g in enumerate(kept)}
    kept_rel = sorted(rels)
    out = []
    for k in kept_rel:
        out.append(Word._raw(tuple((renum[abs(c) - 1] + 1) * (1 if c > 0 else -1) for c in rels[k].codes)))
    names = tuple(p.generator_names[g] for g in kept)
    return TietzeResult(FinitePresentation(len(kept), tuple(out), names), tuple(kept),
                        tuple(kept_rel), tuple(eliminations), minimal, p)
