# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; API mirrors ``fpg._pykernels``."""

from libc.stdlib cimport malloc, realloc, free

from .errors import CosetLimitExceeded

IMPLEMENTATION = "cython"


def free_reduce(codes):
    cdef list out = []
    cdef Py_ssize_t n = 0
    cdef long c
    for o in codes:
        c = o
        if n and <long>out[n - 1] == -c:
            out.pop()
            n -= 1
        else:
            out.append(c)
            n += 1
    return out


def code_to_col(long c):
    return 2 * (c - 1) if c > 0 else 2 * (-c - 1) + 1


def trace(table, long coset, cols):
    for x in cols:
        coset = table[coset][x]
        if coset < 0:
            return -1
    return coset


cdef class _Enumerator:
    cdef int ncols
    cdef int *table
    cdef int *p
    cdef int *dq
    cdef Py_ssize_t cap
    cdef Py_ssize_t n
    cdef Py_ssize_t live
    cdef Py_ssize_t max_cosets
    cdef int *buf
    cdef Py_ssize_t buflen
    cdef Py_ssize_t nrels
    cdef list segs
    cdef list deductions

    def __cinit__(self, int ngens, relators, Py_ssize_t max_cosets):
        self.ncols = 2 * ngens
        self.max_cosets = max_cosets
        self.cap = 64
        self.table = <int *>malloc(self.cap * max(self.ncols, 1) * sizeof(int))
        self.p = <int *>malloc(self.cap * sizeof(int))
        self.dq = <int *>malloc(self.cap * sizeof(int))
        if not self.table or not self.p or not self.dq:
            raise MemoryError()
        cdef int x
        cdef Py_ssize_t k
        rels = [[code_to_col(c) for c in r] for r in relators if r]
        self.nrels = len(rels)
        self.buf = NULL
        self.segs = []
        self._store(rels)
        self.deductions = []
        for x in range(self.ncols):
            self.table[x] = -1
        self.p[0] = 0
        self.n = 1
        self.live = 1

    cdef _store(self, list words):
        cdef Py_ssize_t total = sum(len(w) for w in words)
        cdef Py_ssize_t off = 0
        cdef Py_ssize_t k
        free(self.buf)
        self.buf = <int *>malloc(max(total, 1) * sizeof(int))
        if not self.buf:
            raise MemoryError()
        self.segs = []
        for w in words:
            for k in range(len(w)):
                self.buf[off + k] = w[k]
            self.segs.append((off, len(w)))
            off += len(w)

    def __dealloc__(self):
        free(self.buf)
        free(self.table)
        free(self.p)
        free(self.dq)

    cdef int new_coset(self) except -1:
        cdef int *t
        cdef int *q
        cdef int *d
        cdef int x
        if self.n >= self.max_cosets:
            raise CosetLimitExceeded(
                f"more than {self.max_cosets} cosets defined "
                f"({self.live} live)")
        if self.n == self.cap:
            self.cap *= 2
            t = <int *>realloc(self.table, self.cap * max(self.ncols, 1) * sizeof(int))
            q = <int *>realloc(self.p, self.cap * sizeof(int))
            d = <int *>realloc(self.dq, self.cap * sizeof(int))
            if not t or not q or not d:
                raise MemoryError()
            self.table = t
            self.p = q
            self.dq = d
        for x in range(self.ncols):
            self.table[self.n * self.ncols + x] = -1
        self.p[self.n] = <int>self.n
        self.n += 1
        self.live += 1
        return <int>(self.n - 1)

    cdef inline int get(self, int c, int x):
        return self.table[c * self.ncols + x]

    cdef inline void put(self, int c, int x, int v):
        self.table[c * self.ncols + x] = v

    cdef int define(self, int c, int x) except -1:
        cdef int d = self.new_coset()
        self.put(c, x, d)
        self.put(d, x ^ 1, c)
        self.deductions.append((c, x))
        return d

    cdef int rep(self, int c):
        cdef int r = c
        cdef int nxt
        while self.p[r] != r:
            r = self.p[r]
        while self.p[c] != r:
            nxt = self.p[c]
            self.p[c] = r
            c = nxt
        return r

    cdef void merge(self, int k, int l, Py_ssize_t *qlen):
        cdef int t
        k = self.rep(k)
        l = self.rep(l)
        if k == l:
            return
        if k > l:
            t = k
            k = l
            l = t
        self.p[l] = k
        self.live -= 1
        self.dq[qlen[0]] = l
        qlen[0] += 1

    cdef void coincidence(self, int a, int b):
        cdef Py_ssize_t qlen = 0
        cdef Py_ssize_t i = 0
        cdef int e, f, e1, f1, x, t
        self.merge(a, b, &qlen)
        while i < qlen:
            e = self.dq[i]
            i += 1
            for x in range(self.ncols):
                f = self.get(e, x)
                if f < 0:
                    continue
                self.put(f, x ^ 1, -1)
                e1 = self.rep(e)
                f1 = self.rep(f)
                t = self.get(e1, x)
                if t >= 0:
                    self.merge(f1, t, &qlen)
                else:
                    t = self.get(f1, x ^ 1)
                    if t >= 0:
                        self.merge(e1, t, &qlen)
                    else:
                        self.put(e1, x, f1)
                        self.put(f1, x ^ 1, e1)
                        self.deductions.append((e1, x))

    cdef inline bint alive(self, int c):
        return self.p[c] == c

    cdef int scan(self, int c, int *r, Py_ssize_t m, bint fill) except -1:
        cdef int f = c
        cdef int b = c
        cdef Py_ssize_t i = 0
        cdef Py_ssize_t j = m - 1
        while True:
            while i <= j and self.get(f, r[i]) >= 0:
                f = self.get(f, r[i])
                i += 1
            if i > j:
                if f != c:
                    self.coincidence(f, c)
                return 0
            while j >= i and self.get(b, r[j] ^ 1) >= 0:
                b = self.get(b, r[j] ^ 1)
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return 0
            if i == j:
                self.put(f, r[i], b)
                self.put(b, r[i] ^ 1, f)
                self.deductions.append((f, r[i]))
                return 0
            if not fill:
                return 0
            self.define(f, r[i])

    def run_hlt(self):
        cdef Py_ssize_t c = 0
        cdef int x
        cdef Py_ssize_t r, off, m
        while c < self.n:
            if self.alive(c):
                for r in range(self.nrels):
                    off, m = self.segs[r]
                    self.scan(c, self.buf + off, m, True)
                    if not self.alive(c):
                        break
                if self.alive(c):
                    for x in range(self.ncols):
                        if self.get(c, x) < 0:
                            self.define(c, x)
            c += 1

    def run_felsch(self):
        cdef list starts = [[] for _ in range(self.ncols)]
        cdef Py_ssize_t c = 0
        cdef int x
        rels = []
        for off, m in self.segs[:self.nrels]:
            rels.append([self.buf[off + k] for k in range(m)])
        words = list(rels)
        for rel in rels:
            inv = [y ^ 1 for y in reversed(rel)]
            for r in (rel, inv):
                for k in range(len(r)):
                    rot = r[k:] + r[:k]
                    starts[rot[0]].append(len(words))
                    words.append(rot)
        self._store(words)
        self.deductions.clear()
        while c < self.n:
            if not self.alive(c):
                c += 1
                continue
            x = 0
            while x < self.ncols and self.alive(c):
                if self.get(c, x) < 0:
                    self.define(c, x)
                    self._process_deductions(starts)
                x += 1
            c += 1
        self.run_hlt()

    cdef _process_deductions(self, list starts):
        cdef int c, x, d
        cdef Py_ssize_t off, m
        while self.deductions:
            c, x = self.deductions.pop()
            if not self.alive(c):
                continue
            for w in starts[x]:
                if not self.alive(c):
                    break
                off, m = self.segs[w]
                self.scan(c, self.buf + off, m, False)
            d = self.get(c, x) if self.alive(c) else -1
            if d >= 0 and self.alive(d):
                for w in starts[x ^ 1]:
                    if not self.alive(d):
                        break
                    off, m = self.segs[w]
                    self.scan(d, self.buf + off, m, False)

    def compact(self):
        cdef Py_ssize_t c
        cdef int x, e
        live = [c for c in range(self.n) if self.alive(c)]
        new = {c: k for k, c in enumerate(live)}
        out = []
        for c in live:
            row = []
            for x in range(self.ncols):
                e = self.get(c, x)
                row.append(new[self.rep(e)] if e >= 0 else -1)
            out.append(row)
        return out


def coset_enumerate(int ngens, relators, Py_ssize_t max_cosets, strategy="hlt"):
    en = _Enumerator(ngens, relators, max_cosets)
    if strategy == "hlt":
        en.run_hlt()
    elif strategy == "felsch":
        en.run_felsch()
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return en.compact()


def sub_multiple(list target, list source, q, Py_ssize_t start=0):
    cdef Py_ssize_t k
    cdef Py_ssize_t n = len(target)
    for k in range(start, n):
        s = source[k]
        if s:
            target[k] = target[k] - q * s


def combine(list r1, list r2, a, b, c, d, Py_ssize_t start=0):
    cdef Py_ssize_t k
    cdef Py_ssize_t n = len(r1)
    for k in range(start, n):
        x = r1[k]
        y = r2[k]
        if x or y:
            r1[k] = a * x + b * y
            r2[k] = c * x + d * y
