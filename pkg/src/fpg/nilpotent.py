"""Nilpotent quotients of finitely presented groups.

Quotients ``G / gamma_{c+1}(G)`` are built one class at a time as
consistent polycyclic presentations refining the lower central series:
each step adds central tails to the relations of the previous quotient,
enforces consistency, imposes the relators, and keeps a Hermite basis of
what survives. Elements are exponent vectors in the polycyclic generators.
"""

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BudgetExceeded, InconsistentPresentation, UncertifiedMorphism
from .presentations import FinitePresentation, PresentationMorphism, TietzeResult
from .words import Word
from .zlinalg import (
    AbelianGroupInvariants,
    IntMatrix,
    cokernel_invariants,
    echelon_rows,
    image_sum,
    lattice_equal,
    preimage,
)

Elem = List[int]


@dataclass(frozen=True)
class Definition:
    """How a polycyclic generator arose.

    ``img``: the tail on the image of input generator ``a``;
    ``comm``: the tail on ``[g_a, g_b]``; ``pow``: the tail on ``g_a^d``.
    """

    kind: str
    a: int
    b: int = -1

    def __str__(self) -> str:
        if self.kind == "comm":
            return f"[g{self.a + 1},g{self.b + 1}]"
        if self.kind == "pow":
            return f"g{self.a + 1}^p"
        return f"x{self.a + 1}"


@dataclass
class PcPresentation:
    """Weighted polycyclic presentation.

    ``orders[i]`` is the relative order (0 for infinite) and
    ``powers[i]`` the normal form of ``g_i^orders[i]``; ``conj[(j, i)]``
    (``j > i``) the normal form of ``g_i^-1 g_j g_i`` when it differs
    from ``g_j``.
    """

    weights: List[int] = field(default_factory=list)
    orders: List[int] = field(default_factory=list)
    powers: Dict[int, Elem] = field(default_factory=dict)
    conj: Dict[Tuple[int, int], Elem] = field(default_factory=dict)
    definitions: List[Definition] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.weights)

    def unit(self, i: int) -> Elem:
        v = [0] * self.n
        v[i] = 1
        return v

    def gens_of_weight(self, w: int) -> List[int]:
        return [i for i, x in enumerate(self.weights) if x == w]

    def section_relations(self, w: int) -> IntMatrix:
        """Columns spanning the relations of the weight-``w`` section."""
        gens = self.gens_of_weight(w)
        pos = {g: k for k, g in enumerate(gens)}
        cols = []
        for g in gens:
            d = self.orders[g]
            if d:
                v = [0] * len(gens)
                v[pos[g]] = d
                for h, x in enumerate(self.powers.get(g, ())):
                    if x and h in pos:
                        v[pos[h]] -= x
                cols.append(v)
        return IntMatrix.from_columns(cols, len(gens)) if cols else IntMatrix.zeros(len(gens), 0)

    def section(self, w: int) -> AbelianGroupInvariants:
        rel = self.section_relations(w)
        if rel.cols == 0:
            return AbelianGroupInvariants(rel.rows)
        return cokernel_invariants(rel)


class Collector:
    """Collection to normal form in a polycyclic presentation."""

    def __init__(self, pc: PcPresentation):
        self.pc = pc
        self.n = pc.n
        self.nontrivial = [set() for _ in range(self.n)]
        self._auto: Dict[Tuple[int, int], Dict[int, Elem]] = {}
        first: Dict[int, Dict[int, Elem]] = {}
        for (j, i), v in pc.conj.items():
            self.nontrivial[i].add(j)
            first.setdefault(i, {})[j] = v
        for i, d in first.items():
            self._auto[(i, 1)] = d

    def identity(self) -> Elem:
        return [0] * self.n

    def mul_gen(self, e: Elem, k: int, s: int) -> None:
        """In place ``e <- e * g_k^s``."""
        if not s:
            return
        n = self.n
        tail = [(l, e[l]) for l in range(k + 1, n) if e[l]]
        new = e[k] + s
        d = self.pc.orders[k]
        if not tail and (not d or 0 <= new < d):
            e[k] = new
            return
        for l, _ in tail:
            e[l] = 0
        if d:
            q, r = divmod(new, d)
            e[k] = r
            if q and k in self.pc.powers:
                self.mul(e, self.power(self.pc.powers[k], q))
        else:
            e[k] = new
        if not tail:
            return
        nt = self.nontrivial[k]
        auto = self.automorphism(k, s) if any(l in nt for l, _ in tail) else None
        for l, t in tail:
            if l in nt:
                self.mul(e, self.power(auto[l], t))
            else:
                self.mul_gen(e, l, t)

    def mul(self, e: Elem, x: Sequence[int]) -> None:
        """In place ``e <- e * x``."""
        for j, xj in enumerate(x):
            if xj:
                self.mul_gen(e, j, xj)

    def product(self, x: Sequence[int], y: Sequence[int]) -> Elem:
        e = list(x)
        self.mul(e, y)
        return e

    def inverse(self, x: Sequence[int]) -> Elem:
        r = self.identity()
        for j in range(self.n - 1, -1, -1):
            if x[j]:
                self.mul_gen(r, j, -x[j])
        return r

    def power(self, x: Sequence[int], m: int) -> Elem:
        if m == 0:
            return self.identity()
        nz = [j for j, v in enumerate(x) if v]
        if len(nz) == 1:
            r = self.identity()
            self.mul_gen(r, nz[0], x[nz[0]] * m)
            return r
        if m < 0:
            x, m = self.inverse(x), -m
        if m == 1:
            return list(x)
        result = None
        base = list(x)
        while True:
            if m & 1:
                result = list(base) if result is None else self.product(result, base)
            m >>= 1
            if not m:
                return result
            base = self.product(base, base)

    def conjugate(self, x: Sequence[int], y: Sequence[int]) -> Elem:
        """``y^-1 x y``."""
        e = self.inverse(y)
        self.mul(e, x)
        self.mul(e, y)
        return e

    def commutator(self, x: Sequence[int], y: Sequence[int]) -> Elem:
        """``[x, y] = x^-1 y^-1 x y``."""
        e = self.inverse(x)
        self.mul(e, self.inverse(y))
        self.mul(e, x)
        self.mul(e, y)
        return e

    def _apply(self, auto: Dict[int, Elem], y: Sequence[int]) -> Elem:
        r = self.identity()
        for m, ym in enumerate(y):
            if ym:
                if m in auto:
                    self.mul(r, self.power(auto[m], ym))
                else:
                    self.mul_gen(r, m, ym)
        return r

    def automorphism(self, k: int, s: int) -> Dict[int, Elem]:
        """Images ``g_l^(g_k^s)`` for the generators ``l`` not commuting with ``g_k``."""
        key = (k, s)
        cached = self._auto.get(key)
        if cached is not None:
            return cached
        nt = sorted(self.nontrivial[k])
        if not nt:
            out = {}
        elif s == 0:
            out = {l: self.unit(l) for l in nt}
        elif s == -1:
            fwd = self.automorphism(k, 1)
            out = {}
            for l in reversed(nt):
                # g_l^(g_k) = g_l u, so g_l^(g_k^-1) = g_l * (u^-1)^(g_k^-1)
                u = list(fwd[l])
                u[l] = 0
                r = self.unit(l)
                self.mul(r, self._apply(out, self.inverse(u)))
                out[l] = r
        else:
            sign = 1 if s > 0 else -1
            h = self.automorphism(k, sign * (abs(s) // 2))
            out = {l: self._apply(h, h[l]) for l in nt}
            if abs(s) % 2:
                one = self.automorphism(k, sign)
                out = {l: self._apply(one, out[l]) for l in nt}
        self._auto[key] = out
        return out

    def unit(self, i: int) -> Elem:
        v = self.identity()
        v[i] = 1
        return v

    def evaluate(self, w: Word, values: Sequence[Elem], inverses: Optional[List[Elem]] = None) -> Elem:
        """Evaluate a word given the values of its generators (runs use powers)."""
        e = self.identity()
        codes = w.codes
        i = 0
        while i < len(codes):
            c = codes[i]
            j = i
            while j < len(codes) and codes[j] == c:
                j += 1
            run = j - i
            g = abs(c) - 1
            if run == 1:
                if c > 0:
                    self.mul(e, values[g])
                else:
                    if inverses is not None:
                        if inverses[g] is None:
                            inverses[g] = self.inverse(values[g])
                        self.mul(e, inverses[g])
                    else:
                        self.mul(e, self.inverse(values[g]))
            else:
                self.mul(e, self.power(values[g], run if c > 0 else -run))
            i = j
        return e


# --- consistency ------------------------------------------------------------

def consistency_pairs(pc: PcPresentation, coll: Collector, limit: Optional[int] = None,
                      upto: Optional[int] = None):
    """Yield pairs of normal forms that must coincide in a consistent
    presentation. Only generators ``< upto`` take part; with ``limit``,
    test words of total weight above it are skipped."""
    n = pc.n if upto is None else upto
    wt = pc.weights
    ok = (lambda s: True) if limit is None else (lambda s: s <= limit)
    for i in range(n):
        for j in range(i + 1, n):
            if not ok(wt[i] + wt[j]):
                continue
            for k in range(j + 1, n):
                if not ok(wt[i] + wt[j] + wt[k]):
                    continue
                left = coll.unit(k)
                coll.mul_gen(left, j, 1)
                coll.mul_gen(left, i, 1)
                x = coll.unit(j)
                coll.mul_gen(x, i, 1)
                right = coll.unit(k)
                coll.mul(right, x)
                yield left, right
    for j in range(n):
        dj = pc.orders[j]
        pj = pc.powers.get(j, coll.identity())
        if dj:
            left = list(pj)
            coll.mul_gen(left, j, 1)
            right = coll.unit(j)
            coll.mul(right, pj)
            yield left, right
        for i in range(j):
            if not ok(wt[i] + wt[j]):
                continue
            if dj:
                left = list(pj)
                coll.mul_gen(left, i, 1)
                x = coll.unit(j)
                coll.mul_gen(x, i, 1)
                right = coll.identity()
                right[j] = dj - 1
                coll.mul(right, x)
                yield left, right
        for k in range(j + 1, n):
            if not ok(wt[j] + wt[k]):
                continue
            if dj:
                left = coll.unit(k)
                coll.mul(left, pj)
                right = coll.unit(k)
                coll.mul_gen(right, j, 1)
                coll.mul_gen(right, j, dj - 1)
                yield left, right
            else:
                for s in (1, -1):
                    left = coll.identity()
                    left[k] = s if not pc.orders[k] else s % pc.orders[k]
                    target = list(left)
                    coll.mul_gen(left, j, -1)
                    coll.mul_gen(left, j, 1)
                    yield left, target


def is_consistent(pc: PcPresentation) -> bool:
    """Exhaustive check of the standard test words."""
    coll = Collector(pc)
    return all(a == b for a, b in consistency_pairs(pc, coll))


# --- the quotient algorithm -------------------------------------------------

@dataclass
class NilpotentQuotient:
    presentation: FinitePresentation
    pc: PcPresentation
    images: List[Elem]
    nilpotency_class: int
    central_relators: bool = False
    program: Optional[TietzeResult] = None
    _collector: Optional[Collector] = field(default=None, repr=False)

    @property
    def collector(self) -> Collector:
        if self._collector is None or self._collector.pc is not self.pc:
            self._collector = Collector(self.pc)
        return self._collector

    @property
    def sections(self) -> List[AbelianGroupInvariants]:
        return [self.pc.section(w) for w in range(1, self.nilpotency_class + 1)]

    def section(self, w: int) -> AbelianGroupInvariants:
        if not 1 <= w <= self.nilpotency_class:
            raise ValueError(f"weight {w} outside 1..{self.nilpotency_class}")
        return self.pc.section(w)

    def evaluate(self, w: Word) -> Elem:
        return self.collector.evaluate(w, self.images)

    def weight_of(self, w: Word) -> Optional[int]:
        """Largest ``k <= class`` with ``w`` in ``gamma_k``; ``None`` if trivial."""
        v = self.evaluate(w)
        for i, x in enumerate(v):
            if x:
                return self.pc.weights[i]
        return None

    def is_trivial_at_class(self, w: Word, k: int) -> bool:
        """Whether ``w`` lies in ``gamma_{k+1}``."""
        if k > self.nilpotency_class:
            raise ValueError("class beyond the computed quotient")
        wt = self.weight_of(w)
        return wt is None or wt > k

    def to_json(self) -> dict:
        return {
            "class": self.nilpotency_class,
            "generators": self.pc.n,
            "sections": [s.to_json() for s in self.sections],
            "section_ranks": [s.free_rank for s in self.sections],
        }


def _source_images(nq_images: List[Elem], coll: Collector, program: Optional[TietzeResult]):
    if program is None:
        return nq_images, None
    ident = coll.identity()
    values = program.source_values(nq_images, coll.product, coll.inverse, ident)
    return values, program.source


def relator_values(p: FinitePresentation, coll: Collector, images: List[Elem],
                   program: Optional[TietzeResult] = None) -> List[Elem]:
    """Values of the relators of ``p`` (evaluated through ``program`` when given)."""
    values, source = _source_images(images, coll, program)
    if program is None:
        words = p.relators
    else:
        words = [source.relators[k] for k in program.kept_relators]
    inverses = [None] * len(values)
    return [coll.evaluate(r, values, inverses) for r in words]


def _tail_order(kind: str, pc: PcPresentation, a: int, b: int) -> int:
    if kind == "img":
        return 0
    if kind == "pow":
        return 1
    return 2 if pc.weights[b] > 1 else 3


def _normalize_layer(v: Elem, start: int, orders: List[int], powers: Dict[int, Elem]) -> None:
    """Reduce a central layer vector in place (generators from ``start`` on)."""
    for b in range(start, len(v)):
        d = orders[b]
        if d and not 0 <= v[b] < d:
            q, r = divmod(v[b], d)
            v[b] = r
            for h, x in enumerate(powers.get(b, ())):
                if x:
                    v[h] += q * x


def _check_budget(deadline: Optional[float], what: str) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise BudgetExceeded(f"time budget exceeded during {what}")


def _extend(p: FinitePresentation, pc: PcPresentation, images: List[Elem], cls: int,
            central_relators: bool, program: Optional[TietzeResult],
            deadline: Optional[float], full_consistency: bool):
    n = pc.n
    defined = {(d.kind, d.a, d.b) for d in pc.definitions}
    tails = []
    for k in range(p.rank):
        if ("img", k, -1) not in defined:
            tails.append(("img", k, -1))
    for i in range(n):
        if pc.orders[i] and ("pow", i, -1) not in defined:
            tails.append(("pow", i, -1))
    for i in range(n):
        for j in range(i + 1, n):
            if pc.weights[i] + pc.weights[j] <= cls and ("comm", j, i) not in defined:
                tails.append(("comm", j, i))
    tails.sort(key=lambda t: _tail_order(t[0], pc, t[1], t[2]))
    T = len(tails)
    tail_index = {t: a for a, t in enumerate(tails)}
    N = n + T

    def pad(v):
        return list(v) + [0] * (N - len(v))

    ext = PcPresentation(pc.weights + [cls] * T, pc.orders + [0] * T, {}, {}, list(pc.definitions))
    for i in range(n):
        if pc.orders[i]:
            v = pad(pc.powers.get(i, ()))
            a = tail_index.get(("pow", i, -1))
            if a is not None:
                v[n + a] += 1
            if any(v):
                ext.powers[i] = v
    for i in range(n):
        for j in range(i + 1, n):
            v = pc.conj.get((j, i))
            a = tail_index.get(("comm", j, i))
            if v is None and a is None:
                continue
            v = pad(v) if v is not None else pad(pc.unit(j))
            if a is not None:
                v[n + a] += 1
            ext.conj[(j, i)] = v
    ext_images = []
    for k in range(p.rank):
        v = pad(images[k])
        a = tail_index.get(("img", k, -1))
        if a is not None:
            v[n + a] += 1
        ext_images.append(v)

    coll = Collector(ext)
    rows = []

    def add_row(left, right, what):
        if left[:n] != right[:n]:
            raise InconsistentPresentation(f"{what} differs below the new layer")
        d = [x - y for x, y in zip(left[n:], right[n:])]
        if any(d):
            rows.append(d)

    limit = None if full_consistency else cls
    for count, (left, right) in enumerate(consistency_pairs(ext, coll, limit, upto=n)):
        add_row(left, right, "consistency test word")
        if count % 256 == 0:
            _check_budget(deadline, "consistency checks")

    values = relator_values(p, coll, ext_images, program)
    zero = coll.identity()
    for r in values:
        _check_budget(deadline, "relator evaluation")
        if central_relators:
            r_inv = coll.inverse(r)
            for x in ext_images:
                e = coll.inverse(x)
                coll.mul(e, r_inv)
                coll.mul(e, x)
                coll.mul(e, r)
                add_row(e, zero, "central relator")
        else:
            add_row(r, zero, "relator")

    basis = echelon_rows(rows, T) if rows else []
    pivot_of = {}
    for row in basis:
        j = next(k for k, x in enumerate(row) if x)
        pivot_of[j] = row
    survivors = [a for a in range(T) if a not in pivot_of or pivot_of[a][a] > 1]
    new_index = {a: n + s for s, a in enumerate(survivors)}
    M = n + len(survivors)

    new = PcPresentation(pc.weights + [cls] * len(survivors), pc.orders + [0] * len(survivors),
                         {}, {}, list(pc.definitions))
    for a in survivors:
        kind, x, y = tails[a]
        new.definitions.append(Definition(kind, x, y))
        if a in pivot_of:
            row = pivot_of[a]
            new.orders[new_index[a]] = row[a]
    # power relations of new torsion generators, last first
    for a in reversed(survivors):
        if a in pivot_of:
            row = pivot_of[a]
            v = [0] * M
            for b in range(a + 1, T):
                if row[b]:
                    v[new_index[b]] -= row[b]
            _normalize_layer(v, n, new.orders, new.powers)
            if any(v):
                new.powers[new_index[a]] = v

    def tail_expression(a):
        v = [0] * M
        if a in new_index:
            v[new_index[a]] = 1
        else:
            row = pivot_of[a]
            for b in range(a + 1, T):
                if row[b]:
                    v[new_index[b]] -= row[b]
            _normalize_layer(v, n, new.orders, new.powers)
        return v

    def lift(v, a):
        out = list(v) + [0] * (M - len(v))
        if a is not None:
            t = tail_expression(a)
            for h in range(n, M):
                out[h] += t[h]
            _normalize_layer(out, n, new.orders, new.powers)
        return out

    for i in range(n):
        if pc.orders[i]:
            v = lift(pc.powers.get(i, [0] * n), tail_index.get(("pow", i, -1)))
            if any(v):
                new.powers[i] = v
    for i in range(n):
        for j in range(i + 1, n):
            v = pc.conj.get((j, i))
            a = tail_index.get(("comm", j, i))
            if v is None and a is None:
                continue
            v = lift(v if v is not None else pc.unit(j), a)
            unit = [0] * M
            unit[j] = 1
            if v != unit:
                new.conj[(j, i)] = v
    new_images = [lift(images[k], tail_index.get(("img", k, -1))) for k in range(p.rank)]
    return new, new_images, len(survivors)


def nilpotent_quotient(p: FinitePresentation, c: int, central_relators: bool = False,
                       program: Optional[TietzeResult] = None,
                       budget_seconds: Optional[float] = None,
                       full_consistency: bool = False) -> NilpotentQuotient:
    """``G / gamma_{c+1}(G)`` for ``G`` presented by ``p``.

    With ``central_relators`` the relators are made central instead of
    trivial, giving the quotient of ``F/[F,R]``. ``program`` (a Tietze
    elimination whose result is ``p``) evaluates relators through the
    eliminated generators instead of expanding them.
    """
    if c < 1:
        raise ValueError("class must be at least 1")
    if program is not None and program.presentation is not p:
        raise ValueError("program does not belong to this presentation")
    deadline = None if budget_seconds is None else time.monotonic() + budget_seconds
    pc = PcPresentation()
    images: List[Elem] = [[] for _ in range(p.rank)]
    for cls in range(1, c + 1):
        pc, images, added = _extend(p, pc, images, cls, central_relators, program, deadline,
                                    full_consistency)
        if added == 0:
            # gamma_cls = gamma_{cls+1}: every later section vanishes too
            break
    return NilpotentQuotient(p, pc, images, c, central_relators, program)


def witt_rank(n: int, k: int) -> int:
    """Rank of ``gamma_k / gamma_{k+1}`` of a free group of rank ``n``."""
    def mobius(d):
        out, m, q = 1, d, 2
        while q * q <= m:
            if m % q == 0:
                m //= q
                if m % q == 0:
                    return 0
                out = -out
            q += 1
        return -out if m > 1 else out
    total = sum(mobius(d) * n ** (k // d) for d in range(1, k + 1) if k % d == 0)
    return total // k


# --- induced maps ------------------------------------------------------------

def induced_generator_images(f_images: Sequence[Word], A: NilpotentQuotient,
                             B: NilpotentQuotient) -> List[Elem]:
    """Images in ``B`` of the polycyclic generators of ``A`` under the map
    sending input generator ``k`` of ``A`` to the word ``f_images[k]``."""
    cb = B.collector
    ca = A.collector
    pca = A.pc
    src_values = [cb.evaluate(w, B.images) for w in f_images]
    phi: List[Elem] = []

    def phi_of(v: Sequence[int], upto: int) -> Elem:
        e = cb.identity()
        for h in range(upto):
            if v[h]:
                cb.mul(e, cb.power(phi[h], v[h]))
        return e

    for g, d in enumerate(pca.definitions):
        if d.kind == "img":
            rel = A.images[d.a]
            target = src_values[d.a]
        elif d.kind == "comm":
            rel = pca.conj[(d.a, d.b)]
            target = cb.conjugate(phi[d.a], phi[d.b])
        else:
            rel = pca.powers[d.a]
            target = cb.power(phi[d.a], pca.orders[d.a])
        if rel[g] != 1 or any(rel[g + 1:]):
            raise InconsistentPresentation("definition relation is not in defining form")
        e = cb.inverse(phi_of(rel, g))
        cb.mul(e, target)
        phi.append(e)
    return phi


def section_map(A: NilpotentQuotient, B: NilpotentQuotient, phi: List[Elem], w: int) -> IntMatrix:
    ga = A.pc.gens_of_weight(w)
    gb = B.pc.gens_of_weight(w)
    cols = []
    for g in ga:
        v = phi[g]
        for h, x in enumerate(v):
            if x and B.pc.weights[h] < w:
                raise InconsistentPresentation("map does not respect the lower central series")
        cols.append([v[h] for h in gb])
    return IntMatrix.from_columns(cols, len(gb)) if cols else IntMatrix.zeros(len(gb), 0)


@dataclass
class SectionComparison:
    weight: int
    source: AbelianGroupInvariants
    target: AbelianGroupInvariants
    injective: bool
    surjective: bool
    matrix: IntMatrix

    @property
    def isomorphism(self) -> bool:
        return self.injective and self.surjective

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "source": str(self.source),
            "target": str(self.target),
            "injective": self.injective,
            "surjective": self.surjective,
            "isomorphism": self.isomorphism,
        }


@dataclass
class StallingsReport:
    sections: List[SectionComparison]
    certified: bool

    @property
    def all_isomorphisms(self) -> bool:
        return all(s.isomorphism for s in self.sections)

    def first_failure(self) -> Optional[int]:
        for s in self.sections:
            if not s.isomorphism:
                return s.weight
        return None

    def to_json(self) -> dict:
        return {"certified": self.certified, "sections": [s.to_json() for s in self.sections]}


def certify_morphism(f_images: Sequence[Word], A: NilpotentQuotient, B: NilpotentQuotient) -> None:
    """Raise unless every relator of ``A`` maps to the identity of ``B``."""
    cb = B.collector
    vals = [cb.evaluate(w, B.images) for w in f_images]
    for k, v in enumerate(relator_values(A.presentation, cb, vals, A.program)):
        if any(v):
            raise UncertifiedMorphism(f"relator {k + 1} does not map to the identity")


def stallings_compare(f: PresentationMorphism, k: int,
                      source_program: Optional[TietzeResult] = None,
                      budget_seconds: Optional[float] = None) -> StallingsReport:
    """Compare ``gamma_w/gamma_{w+1}`` for ``w = 1..k`` along ``f``."""
    A = nilpotent_quotient(f.source, k, program=source_program, budget_seconds=budget_seconds)
    B = nilpotent_quotient(f.target, k, budget_seconds=budget_seconds)
    certify_morphism(f.images, A, B)
    phi = induced_generator_images(f.images, A, B)
    out = []
    for w in range(1, k + 1):
        M = section_map(A, B, phi, w)
        TA = A.pc.section_relations(w)
        TB = B.pc.section_relations(w)
        onto = lattice_equal(image_sum(M, TB), IntMatrix.identity(M.rows))
        into = lattice_equal(preimage(M, TB), image_sum(TA, IntMatrix.zeros(TA.rows, 0)))
        out.append(SectionComparison(w, A.pc.section(w), B.pc.section(w), into, onto, M))
    return StallingsReport(out, True)


# --- Dwyer filtration ---------------------------------------------------------

def relator_kernel_chain(p: FinitePresentation, c: int, program: Optional[TietzeResult] = None,
                         budget_seconds: Optional[float] = None) -> List[IntMatrix]:
    """Lattices ``M_k = {n in Z^m : prod r_i^(n_i) in gamma_{k+1}(F/[F,R])}``
    for ``k = 1..c``, as columns.

    The relator classes are central in ``F/[F,R]``, so ``n -> prod r_i^(n_i)``
    is a homomorphism; on ``M_{k-1}`` its weight-``k`` part is linear, which
    cuts out ``M_k``. One class-``c`` quotient serves every ``k <= c``.
    """
    m = len(p.relators)
    if m == 0:
        return [IntMatrix.zeros(0, 0) for _ in range(c)]
    W = nilpotent_quotient(p, c, central_relators=True, program=program,
                           budget_seconds=budget_seconds)
    coll = W.collector
    values = relator_values(p, coll, W.images, program)
    basis = IntMatrix.identity(m)
    chain = []
    for w in range(1, c + 1):
        if basis.cols:
            gens = W.pc.gens_of_weight(w)
            cols = []
            for b in basis.columns():
                e = coll.identity()
                for i, x in enumerate(b):
                    if x:
                        coll.mul(e, coll.power(values[i], x))
                for h, x in enumerate(e):
                    if x and W.pc.weights[h] < w:
                        raise InconsistentPresentation("lower-weight part did not vanish")
                cols.append([e[h] for h in gens])
            U = IntMatrix.from_columns(cols, len(gens))
            C = preimage(U, W.pc.section_relations(w))
            basis = basis @ C if C.cols else IntMatrix.zeros(m, 0)
        chain.append(basis)
    return chain


def relation_lattice(p: FinitePresentation, table=None, h2_rank: Optional[int] = None) -> IntMatrix:
    """``Lambda = ker(Z^m -> R/[F,R])`` for the relator classes.

    For a finite group the coinvariants of ``R_ab`` give it exactly.
    Otherwise ``Lambda = 0`` follows when ``rank H_2 + rank F - rank H_1``
    equals the number of relators, since ``R/[F,R]`` then has rank ``m``.
    """
    from .homology import coinvariant_matrix, h1, rab_module
    from .schreier import rewrite_abelianized, schreier_data

    m = len(p.relators)
    if m == 0:
        return IntMatrix.zeros(0, 0)
    if table is not None:
        sd = schreier_data(table)
        S = coinvariant_matrix(rab_module(sd))
        R = IntMatrix.from_columns([rewrite_abelianized(sd, r) for r in p.relators], sd.basis_count)
        lam = preimage(R, S)
        return lam if lam.cols else IntMatrix.zeros(m, 0)
    if h2_rank is not None and h2_rank + p.rank - h1(p).free_rank == m:
        return IntMatrix.zeros(m, 0)
    raise ValueError("cannot determine the relation lattice: no coset table and the rank count fails")


@dataclass
class DwyerRow:
    k: int
    lattice: IntMatrix  # M_k, columns in relator coordinates
    phi: AbelianGroupInvariants  # phi_{k+1} = M_k / Lambda
    contains: Optional[bool]
    stable: bool  # phi_{k+1} == phi_k

    def to_json(self) -> dict:
        out = {"k": self.k, "phi_k_plus_1": str(self.phi), "stable": self.stable}
        if self.contains is not None:
            out["contains_kernel"] = self.contains
        return out


@dataclass
class DwyerReport:
    """Finite-stage Dwyer filtration ``phi_{k+1}(G) = ker(H_2(G) -> H_2(G/gamma_k G))``
    in relator coordinates, for ``k = 1..c``."""

    group: str
    h2: AbelianGroupInvariants
    relation_lattice: IntMatrix
    rows: List[DwyerRow]
    kernel: Optional[AbelianGroupInvariants] = None

    @property
    def all_contain(self) -> bool:
        return all(r.contains for r in self.rows)

    def to_json(self) -> dict:
        out = {"group": self.group, "H2": str(self.h2), "rows": [r.to_json() for r in self.rows]}
        if self.kernel is not None:
            out["kernel"] = str(self.kernel)
        return out


def dwyer_report(p: FinitePresentation, c: int, table=None, h2_rank: Optional[int] = None,
                 program: Optional[TietzeResult] = None, test_lattice: Optional[IntMatrix] = None,
                 group: str = "", budget_seconds: Optional[float] = None) -> DwyerReport:
    """``phi_{k+1}`` for ``k = 1..c``; ``test_lattice`` (columns in relator
    coordinates) is checked for containment in each."""
    from .zlinalg import contains, quotient_invariants

    m = len(p.relators)
    lam = relation_lattice(p, table, h2_rank)
    chain = relator_kernel_chain(p, c, program, budget_seconds)
    kernel_inv = None
    if test_lattice is not None:
        kernel_inv = AbelianGroupInvariants(len(echelon_rows(test_lattice.columns(), test_lattice.rows)))
    rows = []
    prev = None
    h2 = AbelianGroupInvariants()
    for k, Mk in enumerate(chain, start=1):
        full = image_sum(Mk, lam) if m else IntMatrix.zeros(0, 0)
        phi = quotient_invariants(lam, full) if m else AbelianGroupInvariants()
        if k == 1:
            h2 = phi
        verdict = None
        if test_lattice is not None:
            verdict = contains(full, test_lattice) if m else True
        # phi_2 = H_2 = phi_1, so the first row is stable by definition
        stable = prev is None or lattice_equal(prev, full)
        rows.append(DwyerRow(k, Mk, phi, verdict, stable))
        prev = full
    return DwyerReport(group, h2, lam, rows, kernel_inv)


def dwyer_phi(p: FinitePresentation, k: int, table=None, h2_rank: Optional[int] = None,
              program: Optional[TietzeResult] = None,
              budget_seconds: Optional[float] = None) -> AbelianGroupInvariants:
    """Invariants of ``phi_{k+1}(G)``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return dwyer_report(p, k, table, h2_rank, program, budget_seconds=budget_seconds).rows[-1].phi
