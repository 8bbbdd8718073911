"""Pure-Python hot kernels.

Same API as the compiled ``fpg._ckernels`` module; ``fpg.kernels`` picks
one at import time.

Letter codes: generator ``i`` is ``i + 1``, its inverse ``-(i + 1)``.
Coset-table columns: generator ``i`` is column ``2*i``, its inverse
``2*i + 1``, so ``col ^ 1`` is the inverse column.
"""

from .errors import CosetLimitExceeded

IMPLEMENTATION = "python"


def free_reduce(codes):
    out = []
    for c in codes:
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return out


def code_to_col(c):
    return 2 * (c - 1) if c > 0 else 2 * (-c - 1) + 1


def trace(table, coset, cols):
    """Follow ``cols`` from ``coset``; -1 as soon as an entry is undefined."""
    for x in cols:
        coset = table[coset][x]
        if coset < 0:
            return -1
    return coset


class _Enumerator:
    def __init__(self, ngens, relators, max_cosets):
        self.ncols = 2 * ngens
        self.rels = [[code_to_col(c) for c in r] for r in relators if r]
        self.max_cosets = max_cosets
        self.table = [[-1] * self.ncols]
        self.p = [0]
        self.live = 1
        self.deductions = []

    def new_coset(self):
        if len(self.table) >= self.max_cosets:
            raise CosetLimitExceeded(
                f"more than {self.max_cosets} cosets defined "
                f"({self.live} live)")
        n = len(self.table)
        self.table.append([-1] * self.ncols)
        self.p.append(n)
        self.live += 1
        return n

    def define(self, c, x):
        d = self.new_coset()
        self.table[c][x] = d
        self.table[d][x ^ 1] = c
        self.deductions.append((c, x))
        return d

    def rep(self, c):
        p = self.p
        r = c
        while p[r] != r:
            r = p[r]
        while p[c] != r:
            p[c], c = r, p[c]
        return r

    def merge(self, k, l, queue):
        k = self.rep(k)
        l = self.rep(l)
        if k == l:
            return
        if k > l:
            k, l = l, k
        self.p[l] = k
        self.live -= 1
        queue.append(l)

    def coincidence(self, a, b):
        table = self.table
        queue = []
        self.merge(a, b, queue)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            row = table[e]
            for x in range(self.ncols):
                f = row[x]
                if f < 0:
                    continue
                table[f][x ^ 1] = -1
                e1 = self.rep(e)
                f1 = self.rep(f)
                if table[e1][x] >= 0:
                    self.merge(f1, table[e1][x], queue)
                elif table[f1][x ^ 1] >= 0:
                    self.merge(e1, table[f1][x ^ 1], queue)
                else:
                    table[e1][x] = f1
                    table[f1][x ^ 1] = e1
                    self.deductions.append((e1, x))

    def alive(self, c):
        return self.p[c] == c

    def scan(self, c, rel, fill):
        """Scan ``rel`` at ``c``; define cosets to close gaps when ``fill``."""
        table = self.table
        f = c
        i = 0
        b = c
        j = len(rel) - 1
        while True:
            while i <= j and table[f][rel[i]] >= 0:
                f = table[f][rel[i]]
                i += 1
            if i > j:
                if f != c:
                    self.coincidence(f, c)
                return
            while j >= i and table[b][rel[j] ^ 1] >= 0:
                b = table[b][rel[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                table[f][rel[i]] = b
                table[b][rel[i] ^ 1] = f
                self.deductions.append((f, rel[i]))
                return
            if not fill:
                return
            self.define(f, rel[i])

    def run_hlt(self):
        c = 0
        while c < len(self.table):
            if self.alive(c):
                for rel in self.rels:
                    self.scan(c, rel, True)
                    if not self.alive(c):
                        break
                if self.alive(c):
                    row = self.table[c]
                    for x in range(self.ncols):
                        if row[x] < 0:
                            self.define(c, x)
            c += 1

    def run_felsch(self):
        starts = [[] for _ in range(self.ncols)]
        for rel in self.rels:
            inv = [x ^ 1 for x in reversed(rel)]
            for r in (rel, inv):
                for k in range(len(r)):
                    rot = r[k:] + r[:k]
                    starts[rot[0]].append(rot)
        self.deductions.clear()
        c = 0
        while c < len(self.table):
            if not self.alive(c):
                c += 1
                continue
            x = 0
            while x < self.ncols and self.alive(c):
                if self.table[c][x] < 0:
                    self.define(c, x)
                    self._process_deductions(starts)
                x += 1
            c += 1
        # Felsch closes every table it finishes; the HLT pass is a cheap check.
        self.run_hlt()

    def _process_deductions(self, starts):
        while self.deductions:
            c, x = self.deductions.pop()
            if not self.alive(c):
                continue
            for rot in starts[x]:
                if not self.alive(c):
                    break
                self.scan(c, rot, False)
            d = self.table[c][x] if self.alive(c) else -1
            if d >= 0 and self.alive(d):
                for rot in starts[x ^ 1]:
                    if not self.alive(d):
                        break
                    self.scan(d, rot, False)

    def compact(self):
        live = [c for c in range(len(self.table)) if self.alive(c)]
        new = {c: k for k, c in enumerate(live)}
        out = []
        for c in live:
            out.append([new[self.rep(e)] if e >= 0 else -1
                        for e in self.table[c]])
        return out


def coset_enumerate(ngens, relators, max_cosets, strategy="hlt"):
    """Enumerate cosets of the trivial subgroup.

    ``relators`` are sequences of letter codes. Returns the compacted table
    as a list of rows (coset 0 first). Raises ``CosetLimitExceeded``.
    """
    en = _Enumerator(ngens, relators, max_cosets)
    if strategy == "hlt":
        en.run_hlt()
    elif strategy == "felsch":
        en.run_felsch()
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return en.compact()


def sub_multiple(target, source, q, start=0):
    """In place: ``target -= q * source`` from ``start`` on."""
    for k in range(start, len(target)):
        s = source[k]
        if s:
            target[k] -= q * s


def combine(r1, r2, a, b, c, d, start=0):
    """In place: ``(r1, r2) <- (a*r1 + b*r2, c*r1 + d*r2)``."""
    for k in range(start, len(r1)):
        x = r1[k]
        y = r2[k]
        if x or y:
            r1[k] = a * x + b * y
            r2[k] = c * x + d * y
