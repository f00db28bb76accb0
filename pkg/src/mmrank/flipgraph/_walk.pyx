# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the packed-F2 walk in mmrank.flipgraph.engine.

This file transliterates the pure engine step for step: same candidate
enumeration order, same greedy-reduction rule, same swap-remove
compaction, same xoshiro256** stream and draw order.  Any semantic change
here must be mirrored there; the test suite compares full trajectories.
"""

from libc.stdint cimport int64_t, uint64_t
from libc.string cimport memmove

DEF MAXT = 4096
DEF MAXF = 1024
DEF MAXW = 729  # tensor words for n <= 6: ceil(6**6 / 64)


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef class _CWalk:
    cdef uint64_t s0, s1, s2, s3          # rng state
    cdef int n, n2, T, W
    cdef uint64_t space
    cdef uint64_t fac0[MAXT]
    cdef uint64_t fac1[MAXT]
    cdef uint64_t fac2[MAXT]
    # per-slot arrays of (value, index) pairs sorted by (value, index)
    cdef uint64_t svals[3][MAXT]
    cdef int sidx[3][MAXT]
    cdef unsigned char dirty[MAXT]
    cdef int forb_a[MAXF]
    cdef int forb_b[MAXF]
    cdef int forb_n
    cdef uint64_t best0[MAXT]
    cdef uint64_t best1[MAXT]
    cdef uint64_t best2[MAXT]
    cdef int best_rank
    cdef uint64_t target[MAXW]
    cdef uint64_t scratch[MAXW]
    cdef object trace

    # -- rng -----------------------------------------------------------------

    cdef void seed_rng(self, uint64_t seed):
        cdef uint64_t x = seed
        cdef uint64_t z
        cdef uint64_t out[4]
        cdef int i
        for i in range(4):
            x = x + <uint64_t>0x9E3779B97F4A7C15
            z = x
            z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
            z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
            out[i] = z ^ (z >> 31)
        self.s0, self.s1, self.s2, self.s3 = out[0], out[1], out[2], out[3]

    cdef inline uint64_t next_u64(self):
        cdef uint64_t result = _rotl(self.s1 * 5, 7) * 9
        cdef uint64_t t = self.s1 << 17
        self.s2 ^= self.s0
        self.s3 ^= self.s1
        self.s1 ^= self.s2
        self.s0 ^= self.s3
        self.s2 ^= t
        self.s3 = _rotl(self.s3, 45)
        return result

    cdef inline uint64_t below(self, uint64_t m):
        return self.next_u64() % m

    # -- factor access ---------------------------------------------------------

    cdef inline uint64_t getf(self, int s, int t):
        if s == 0:
            return self.fac0[t]
        if s == 1:
            return self.fac1[t]
        return self.fac2[t]

    cdef inline void setf_raw(self, int s, int t, uint64_t v):
        if s == 0:
            self.fac0[t] = v
        elif s == 1:
            self.fac1[t] = v
        else:
            self.fac2[t] = v

    # -- sorted slot arrays ------------------------------------------------------

    cdef inline int pair_pos(self, int s, uint64_t val, int idx):
        """Position of the first pair >= (val, idx)."""
        cdef int lo = 0, hi = self.live_pairs(s), mid
        cdef uint64_t *vals = self.svals[s]
        cdef int *idxs = self.sidx[s]
        while lo < hi:
            mid = (lo + hi) >> 1
            if vals[mid] < val or (vals[mid] == val and idxs[mid] < idx):
                lo = mid + 1
            else:
                hi = mid
        return lo

    cdef inline void slot_ins(self, int s, uint64_t val, int idx):
        cdef int pos = self.pair_pos(s, val, idx)
        cdef int nlive = self.live_pairs(s)
        memmove(&self.svals[s][pos + 1], &self.svals[s][pos], (nlive - pos) * sizeof(uint64_t))
        memmove(&self.sidx[s][pos + 1], &self.sidx[s][pos], (nlive - pos) * sizeof(int))
        self.svals[s][pos] = val
        self.sidx[s][pos] = idx

    cdef inline void slot_del(self, int s, uint64_t val, int idx):
        cdef int pos = self.pair_pos(s, val, idx)
        cdef int nlive = self.live_pairs(s)
        memmove(&self.svals[s][pos], &self.svals[s][pos + 1], (nlive - pos - 1) * sizeof(uint64_t))
        memmove(&self.sidx[s][pos], &self.sidx[s][pos + 1], (nlive - pos - 1) * sizeof(int))

    cdef int live0, live1, live2

    cdef inline int live_pairs(self, int s):
        if s == 0:
            return self.live0
        if s == 1:
            return self.live1
        return self.live2

    cdef inline void bump_live(self, int s, int d):
        if s == 0:
            self.live0 += d
        elif s == 1:
            self.live1 += d
        else:
            self.live2 += d

    cdef inline void ins_pair(self, int s, uint64_t val, int idx):
        self.slot_ins(s, val, idx)
        self.bump_live(s, 1)

    cdef inline void del_pair(self, int s, uint64_t val, int idx):
        self.slot_del(s, val, idx)
        self.bump_live(s, -1)

    cdef inline void set_factor(self, int s, int t, uint64_t v):
        self.del_pair(s, self.getf(s, t), t)
        self.setf_raw(s, t, v)
        self.ins_pair(s, v, t)

    # -- forbidden pairs -----------------------------------------------------------

    cdef inline void unforbid(self, int idx):
        cdef int i = 0
        while i < self.forb_n:
            if self.forb_a[i] == idx or self.forb_b[i] == idx:
                self.forb_a[i] = self.forb_a[self.forb_n - 1]
                self.forb_b[i] = self.forb_b[self.forb_n - 1]
                self.forb_n -= 1
            else:
                i += 1

    cdef inline bint is_forbidden(self, int a, int b):
        cdef int i
        for i in range(self.forb_n):
            if self.forb_a[i] == a and self.forb_b[i] == b:
                return True
        return False

    cdef inline void remap_forbidden(self, int old, int new):
        cdef int i, a, b
        for i in range(self.forb_n):
            a = self.forb_a[i]
            b = self.forb_b[i]
            if a == old:
                a = new
            if b == old:
                b = new
            if a > b:
                a, b = b, a
            self.forb_a[i] = a
            self.forb_b[i] = b

    # -- removal ----------------------------------------------------------------

    cdef void swap_remove(self, int x):
        cdef int last = self.T - 1
        cdef int s
        cdef uint64_t v
        self.dirty[x] = 0
        self.unforbid(x)
        for s in range(3):
            self.del_pair(s, self.getf(s, x), x)
        if x != last:
            for s in range(3):
                v = self.getf(s, last)
                self.del_pair(s, v, last)
                self.setf_raw(s, x, v)
                self.ins_pair(s, v, x)
            if self.dirty[last]:
                self.dirty[last] = 0
                self.dirty[x] = 1
            self.remap_forbidden(last, x)
        self.T -= 1

    # -- flips ---------------------------------------------------------------------

    cdef int64_t count_candidates(self):
        cdef int64_t total = 0
        cdef int s, pos, nlive, run
        cdef uint64_t v
        for s in range(3):
            nlive = self.live_pairs(s)
            pos = 0
            while pos < nlive:
                v = self.svals[s][pos]
                run = 1
                while pos + run < nlive and self.svals[s][pos + run] == v:
                    run += 1
                if run >= 2:
                    total += 2 * run * (run - 1)
                pos += run
        return total

    cdef bint apply_flip_at(self, int64_t k):
        cdef int s, pos, nlive, run, m, o, x, y, i, j
        cdef int64_t c, pair
        cdef uint64_t v
        for s in range(3):
            nlive = self.live_pairs(s)
            pos = 0
            while pos < nlive:
                v = self.svals[s][pos]
                run = 1
                while pos + run < nlive and self.svals[s][pos + run] == v:
                    run += 1
                m = run
                if m >= 2:
                    c = 2 * m * (m - 1)
                    if k < c:
                        o = <int>(k & 1)
                        pair = k >> 1
                        x = <int>(pair // (m - 1))
                        y = <int>(pair % (m - 1))
                        if y >= x:
                            y += 1
                        i = self.sidx[s][pos + x]
                        j = self.sidx[s][pos + y]
                        return self.apply_flip(i, j, s, o)
                    k -= c
                pos += run
        raise AssertionError("flip candidate index out of range")

    cdef bint apply_flip(self, int i, int j, int s, int o):
        cdef int s1, s2, oa, ob
        if s == 0:
            s1, s2 = 1, 2
        elif s == 1:
            s1, s2 = 0, 2
        else:
            s1, s2 = 0, 1
        if o == 0:
            oa, ob = s1, s2
        else:
            oa, ob = s2, s1
        cdef uint64_t new_i = self.getf(oa, i) ^ self.getf(oa, j)
        cdef uint64_t new_j = self.getf(ob, j) ^ self.getf(ob, i)
        self.set_factor(oa, i, new_i)
        self.set_factor(ob, j, new_j)
        self.unforbid(i)
        self.unforbid(j)
        if self.trace is not None:
            self.trace.append(("flip", i, j, s, o))
        cdef bint drop_i = new_i == 0
        cdef bint drop_j = new_j == 0
        self.dirty[i] = 0 if drop_i else 1
        self.dirty[j] = 0 if drop_j else 1
        cdef int hi, lo
        if drop_i and drop_j:
            hi = i if i > j else j
            lo = j if i > j else i
            self.swap_remove(hi)
            self.swap_remove(lo)
        elif drop_i:
            self.swap_remove(i)
        elif drop_j:
            self.swap_remove(j)
        return self.greedy_reduce()

    # -- reductions ------------------------------------------------------------------

    cdef int min_partner(self, int t):
        """Smallest other index sharing >= 2 slots with t, or -1."""
        cdef int best = -1
        cdef int sa, sb, p, a0, a1, b0, b1, ia, ib, aa, bb
        cdef uint64_t va, vb
        for p in range(3):
            if p == 0:
                sa, sb = 0, 1
            elif p == 1:
                sa, sb = 0, 2
            else:
                sa, sb = 1, 2
            va = self.getf(sa, t)
            vb = self.getf(sb, t)
            a0 = self.pair_pos(sa, va, 0)
            a1 = self.pair_pos(sa, va, MAXT)
            if a1 - a0 < 2:
                continue
            b0 = self.pair_pos(sb, vb, 0)
            b1 = self.pair_pos(sb, vb, MAXT)
            if b1 - b0 < 2:
                continue
            ia = a0
            ib = b0
            while ia < a1 and ib < b1:
                aa = self.sidx[sa][ia]
                bb = self.sidx[sb][ib]
                if aa == bb:
                    if aa != t and not self.is_forbidden(
                        aa if aa < t else t, t if aa < t else aa
                    ):
                        if best == -1 or aa < best:
                            best = aa
                        break  # members ascend; first hit is minimal for this pair
                    ia += 1
                    ib += 1
                elif aa < bb:
                    ia += 1
                else:
                    ib += 1
        return best

    cdef bint greedy_reduce(self):
        cdef bint reduced = False
        cdef int t, j, a, b, o, s, nshared
        cdef int shared[3]
        cdef uint64_t merged
        while True:
            t = -1
            for a in range(self.T):
                if self.dirty[a]:
                    t = a
                    break
            if t == -1:
                return reduced
            self.dirty[t] = 0
            j = self.min_partner(t)
            if j == -1:
                continue
            if t < j:
                a, b = t, j
            else:
                a, b = j, t
            nshared = 0
            for s in range(3):
                if self.getf(s, a) == self.getf(s, b):
                    shared[nshared] = s
                    nshared += 1
            if nshared == 3:
                o = 2
            else:
                o = 3 - shared[0] - shared[1]
            merged = self.getf(o, a) ^ self.getf(o, b)
            if self.trace is not None:
                self.trace.append(("reduce", a, b, o))
            if merged == 0:
                self.swap_remove(b)
                self.swap_remove(a)
            else:
                self.set_factor(o, a, merged)
                self.unforbid(a)
                self.swap_remove(b)
                self.dirty[a] = 1
            reduced = True

    # -- plus moves -------------------------------------------------------------------

    cdef bint try_plus(self, int64_t *plus_left):
        cdef int t, s, sl, new, attempt
        cdef uint64_t a, a1, a2, cand, v
        cdef bint found = False
        if self.T == 0:
            plus_left[0] = 0
            return False
        t = <int>self.below(<uint64_t>self.T)
        s = <int>self.below(3)
        a = self.getf(s, t)
        for attempt in range(100):
            cand = self.below(self.space)
            if cand != 0 and cand != a:
                a1 = cand
                found = True
                break
        if not found:
            plus_left[0] = 0
            return False
        a2 = a ^ a1
        self.set_factor(s, t, a1)
        self.unforbid(t)
        new = self.T
        if new >= MAXT:
            raise OverflowError("term capacity exceeded")
        for sl in range(3):
            v = a2 if sl == s else self.getf(sl, t)
            self.setf_raw(sl, new, v)
            self.ins_pair(sl, v, new)
        self.T += 1
        if self.trace is not None:
            self.trace.append(("plus", t, s))
        if self.forb_n >= MAXF:
            raise OverflowError("forbidden pair capacity exceeded")
        self.forb_a[self.forb_n] = t if t < new else new
        self.forb_b[self.forb_n] = new if t < new else t
        self.forb_n += 1
        self.dirty[t] = 1
        self.dirty[new] = 1
        self.greedy_reduce()
        plus_left[0] -= 1
        return True

    # -- verification --------------------------------------------------------------------

    cdef bint expansion_matches(self):
        cdef int w, t, abit, bbit, base, lo, sh
        cdef uint64_t u, v, ww
        cdef int n2 = self.n2
        for w in range(self.W):
            self.scratch[w] = 0
        for t in range(self.T):
            u = self.fac0[t]
            v = self.fac1[t]
            ww = self.fac2[t]
            for abit in range(n2):
                if not (u >> abit) & 1:
                    continue
                for bbit in range(n2):
                    if not (v >> bbit) & 1:
                        continue
                    base = (abit * n2 + bbit) * n2
                    lo = base >> 6
                    sh = base & 63
                    self.scratch[lo] ^= ww << sh
                    if sh + n2 > 64:
                        self.scratch[lo + 1] ^= ww >> (64 - sh)
        for w in range(self.W):
            if self.scratch[w] != self.target[w]:
                return False
        return True

    # -- driver ---------------------------------------------------------------------------

    cdef void snapshot_if_better(self):
        cdef int t
        if self.best_rank == -1 or self.T < self.best_rank:
            self.best_rank = self.T
            for t in range(self.T):
                self.best0[t] = self.fac0[t]
                self.best1[t] = self.fac1[t]
                self.best2[t] = self.fac2[t]

    def run(self, int n, terms, target_words, uint64_t seed, int64_t max_steps,
            int64_t plus_budget, int64_t patience, int64_t verify_every,
            int64_t target_rank, bint collect_trace):
        cdef int t, s, w
        cdef uint64_t u, v, ww
        if max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if len(terms) > MAXT:
            raise OverflowError("term capacity exceeded")
        self.n = n
        self.n2 = n * n
        self.space = (<uint64_t>1) << self.n2
        self.seed_rng(seed)
        self.trace = [] if collect_trace else None
        self.forb_n = 0
        self.T = 0
        self.live0 = self.live1 = self.live2 = 0
        self.W = len(target_words)
        if self.W > MAXW:
            raise OverflowError("tensor word capacity exceeded")
        for w in range(self.W):
            self.target[w] = target_words[w]
        for (pu, pv, pw) in terms:
            u, v, ww = pu, pv, pw
            if u != 0 and v != 0 and ww != 0:
                t = self.T
                self.fac0[t] = u
                self.fac1[t] = v
                self.fac2[t] = ww
                self.dirty[t] = 0
                self.T += 1
        for s in range(3):
            for t in range(self.T):
                self.ins_pair(s, self.getf(s, t), t)
        self.best_rank = -1

        for t in range(self.T):
            self.dirty[t] = 1
        self.greedy_reduce()
        self.snapshot_if_better()

        cdef int64_t steps = 0
        cdef int64_t fails = 0
        cdef int64_t n_flips
        cdef int64_t plus_left = plus_budget
        cdef bint moved
        while steps < max_steps:
            if target_rank >= 0 and self.best_rank <= target_rank:
                break
            n_flips = self.count_candidates()
            moved = False
            if plus_left > 0 and (fails >= patience or n_flips == 0):
                moved = self.try_plus(&plus_left)
                if moved:
                    fails = 0
            if not moved:
                if n_flips == 0:
                    if plus_left > 0:
                        continue
                    break
                if self.apply_flip_at(<int64_t>self.below(<uint64_t>n_flips)):
                    fails = 0
                else:
                    fails += 1
            steps += 1
            self.snapshot_if_better()
            if verify_every and steps % verify_every == 0:
                if not self.expansion_matches():
                    raise RuntimeError("walk state no longer expands to the target")
        if not self.expansion_matches():
            raise RuntimeError("walk state no longer expands to the target")

        best = [
            (self.best0[t], self.best1[t], self.best2[t]) for t in range(self.best_rank)
        ]
        final = [(self.fac0[t], self.fac1[t], self.fac2[t]) for t in range(self.T)]
        return best, self.best_rank, steps, final, self.trace


def walk_f2(n, terms, target_words, seed, max_steps, plus_budget, patience,
            verify_every, target_rank, collect_trace):
    """Packed-F2 walk; see mmrank.flipgraph.engine for the contract."""
    cdef _CWalk walker = _CWalk()
    return walker.run(n, terms, target_words, seed, max_steps, plus_budget,
                      patience, verify_every, target_rank, collect_trace)
