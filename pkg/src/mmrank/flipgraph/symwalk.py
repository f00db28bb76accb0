"""Random walk on symmetry-constrained decompositions.

Moves act on orbit representatives, so one move rewrites a whole group
orbit in lockstep and the state stays a valid symmetric decomposition;
the rank bound moves in units of an orbit size.  Because an orbit sum is
unchanged when its representative is replaced by any group image, a flip
or a reduction pairs term i's representative with g(rep_j) for an
explicit group element g that makes factors match exactly; g is part of
the move.

Only free orbits move.  A group-fixed term cannot soundly flip against a
single member of a free orbit (the defect is not group invariant), so
fixed terms are inert; a merge whose result is itself group fixed stands
for a whole-group sum, which is 6 times one term and therefore vanishes
exactly over characteristic 2 and 3, where both participants are simply
removed.  Any move whose modified representatives end up with stabilizer
sizes 2 or 3 is rejected, matching the tag set of
:class:`~mmrank.symmetry.SymmetricDecomposition`.

Schedule, randomness and bookkeeping follow the plain walk: uniform
choice over the enumerated flip candidates, greedy reductions in scan
order after every move, a patience window before plus splits of a free
orbit's representative, and one xoshiro256** stream for everything.
"""

from __future__ import annotations

from fractions import Fraction

from ..fields import PrimeField
from ..rng import Xoshiro256
from ..symmetry import (
    GROUP,
    OrbitTerm,
    StabilizerTag,
    SymmetricDecomposition,
    apply_group,
    expand_symmetric,
    stabilizer,
)
from ..tensors import Matrix, RankOneTerm, Tensor
from .walk import MASK64, SearchConfig

_SLOTS = (0, 1, 2)
_OTHER_SLOTS = ((1, 2), (0, 2), (0, 1))


class SymmetricSearchResult:
    __slots__ = ("decomposition", "rank", "steps", "seed")

    def __init__(self, decomposition: SymmetricDecomposition, rank: int, steps: int, seed: int):
        self.decomposition = decomposition
        self.rank = rank
        self.steps = steps
        self.seed = seed


def _with_factor(t: RankOneTerm, slot: int, m: Matrix) -> RankOneTerm:
    f = list(t.factors)
    f[slot] = m
    return RankOneTerm(*f)


class _SymWalk:
    def __init__(self, target: Tensor, start: SymmetricDecomposition, cfg: SearchConfig):
        if start.n != target.n or start.field != target.field:
            raise ValueError("start and target have different shape or field")
        if expand_symmetric(start) != target:
            raise ValueError("start symmetric decomposition does not expand to the target")
        self.field = start.field
        self.n = start.n
        self.n2 = start.n * start.n
        self.target = target
        self.cfg = cfg
        self.rng = Xoshiro256(cfg.seed & MASK64)
        self.reps: list[RankOneTerm] = [ot.rep for ot in start.orbit_terms]
        self.tags: list[StabilizerTag] = [ot.tag for ot in start.orbit_terms]
        self.forbidden: set[tuple[int, int]] = set()
        self.plus_left = cfg.plus_budget
        if isinstance(self.field, PrimeField):
            self.base = self.field.p
        else:
            self.base = 3
        self.space = self.base**self.n2
        self.best_rank = None
        self.best = None
        self.char_kills_group_sum = self.field.characteristic in (2, 3)

    # -- helpers ---------------------------------------------------------------

    def _rank(self) -> int:
        return sum(t.orbit_size for t in self.tags)

    def _trivial_indices(self) -> list[int]:
        return [i for i, t in enumerate(self.tags) if t is StabilizerTag.TRIVIAL]

    def _snapshot_if_better(self):
        r = self._rank()
        if self.best_rank is None or r < self.best_rank:
            self.best_rank = r
            self.best = tuple(zip(self.reps, self.tags))

    def _delete(self, drop: list[int]) -> None:
        drop_set = set(drop)
        remap = {}
        new_reps, new_tags = [], []
        for i, (r, t) in enumerate(zip(self.reps, self.tags)):
            if i not in drop_set:
                remap[i] = len(new_reps)
                new_reps.append(r)
                new_tags.append(t)
        self.reps, self.tags = new_reps, new_tags
        self.forbidden = {
            (remap[a], remap[b])
            for (a, b) in self.forbidden
            if a in remap and b in remap
        }

    def _unforbid(self, idx: int) -> None:
        if self.forbidden:
            self.forbidden = {p for p in self.forbidden if idx not in p}

    def _draw_matrix(self) -> Matrix:
        f = self.field
        x = self.rng.below(self.space)
        entries = []
        for _ in range(self.n2):
            d = x % self.base
            x //= self.base
            if isinstance(f, PrimeField):
                entries.append(d)
            else:
                entries.append(Fraction(-1) if d == 2 else Fraction(d))
        return Matrix(f, self.n, entries)

    # -- moves ----------------------------------------------------------------

    def _flip_candidates(self) -> list[tuple[int, int, int, int, int]]:
        cands = []
        triv = self._trivial_indices()
        for i in triv:
            ri = self.reps[i]
            for j in triv:
                if j == i:
                    continue
                rj = self.reps[j]
                for gi, g in enumerate(GROUP):
                    image = apply_group(g, rj)
                    for s in _SLOTS:
                        if ri.factors[s] == image.factors[s]:
                            cands.append((i, j, gi, s, 0))
                            cands.append((i, j, gi, s, 1))
        return cands

    def _apply_flip(self, i, j, gi, s, o) -> bool:
        """Returns True when applied; False when tag revalidation rejects."""
        image = apply_group(GROUP[gi], self.reps[j])
        s1, s2 = _OTHER_SLOTS[s]
        oa, ob = (s1, s2) if o == 0 else (s2, s1)
        ri = self.reps[i]
        new_i = _with_factor(ri, oa, ri.factors[oa] + image.factors[oa])
        new_j = _with_factor(image, ob, image.factors[ob] - ri.factors[ob])
        keep_i = not any(m.is_zero for m in new_i.factors)
        keep_j = not any(m.is_zero for m in new_j.factors)
        if keep_i and len(stabilizer(new_i)) != 1:
            return False
        if keep_j and len(stabilizer(new_j)) != 1:
            return False
        self.reps[i] = new_i
        self.reps[j] = new_j
        self._unforbid(i)
        self._unforbid(j)
        drop = [k for k, keep in ((i, keep_i), (j, keep_j)) if not keep]
        if drop:
            self._delete(sorted(drop))
        self._reduce_all()
        return True

    def _find_reduction(self):
        """First viable reduction in scan order, or None."""
        triv = self._trivial_indices()
        for i in triv:
            ri = self.reps[i]
            for j in triv:
                if j == i:
                    continue
                pair = (min(i, j), max(i, j))
                if pair in self.forbidden:
                    continue
                for gi, g in enumerate(GROUP):
                    image = apply_group(g, self.reps[j])
                    shared = [s for s in _SLOTS if ri.factors[s] == image.factors[s]]
                    if len(shared) < 2:
                        continue
                    o = 2 if len(shared) == 3 else ({0, 1, 2} - set(shared)).pop()
                    merged = _with_factor(ri, o, ri.factors[o] + image.factors[o])
                    if any(m.is_zero for m in merged.factors):
                        return (i, j, None)
                    stab = len(stabilizer(merged))
                    if stab == 1:
                        return (i, j, merged)
                    if stab == 6 and self.char_kills_group_sum:
                        # merged is group fixed: the pair sums to 6 * merged = 0
                        return (i, j, None)
                    # stabilizer sizes 2 and 3 (or fixed over other fields)
                    # have no representable tag; not a viable reduction
        return None

    def _reduce_all(self) -> bool:
        reduced = False
        while True:
            hit = self._find_reduction()
            if hit is None:
                return reduced
            i, j, merged = hit
            if merged is None:
                self._delete(sorted((i, j)))
            else:
                self.reps[i] = merged
                self._unforbid(i)
                self._delete([j])
            reduced = True

    def _try_plus(self) -> bool:
        triv = self._trivial_indices()
        if not triv:
            self.plus_left = 0
            return False
        t = triv[self.rng.below(len(triv))]
        s = self.rng.below(3)
        a = self.reps[t].factors[s]
        split = None
        for _ in range(100):
            m1 = self._draw_matrix()
            if m1.is_zero or m1 == a:
                continue
            first = _with_factor(self.reps[t], s, m1)
            second = _with_factor(self.reps[t], s, a - m1)
            if len(stabilizer(first)) == 1 and len(stabilizer(second)) == 1:
                split = (first, second)
                break
        if split is None:
            self.plus_left = 0
            return False
        first, second = split
        self.reps[t] = first
        self._unforbid(t)
        self.reps.append(second)
        self.tags.append(StabilizerTag.TRIVIAL)
        new = len(self.reps) - 1
        self.forbidden.add((t, new))
        self._reduce_all()
        self.plus_left -= 1
        return True

    def _verify(self):
        sd = SymmetricDecomposition(
            self.n, self.field,
            tuple(OrbitTerm(r, t) for r, t in zip(self.reps, self.tags)),
        )
        if expand_symmetric(sd) != self.target:
            raise AssertionError("symmetric walk state no longer expands to the target")

    def run(self) -> SymmetricSearchResult:
        cfg = self.cfg
        self._reduce_all()
        self._snapshot_if_better()
        steps = 0
        fails = 0
        while steps < cfg.max_steps:
            if cfg.target_rank is not None and self.best_rank <= cfg.target_rank:
                break
            cands = self._flip_candidates()
            moved = False
            if self.plus_left > 0 and (fails >= cfg.patience or not cands):
                moved = self._try_plus()
                if moved:
                    fails = 0
            if not moved:
                if not cands:
                    if self.plus_left > 0:
                        continue
                    break
                before = self._rank()
                applied = self._apply_flip(*cands[self.rng.below(len(cands))])
                if applied and self._rank() < before:
                    fails = 0
                else:
                    fails += 1
            steps += 1
            self._snapshot_if_better()
            if cfg.verify_every and steps % cfg.verify_every == 0:
                self._verify()
        self._verify()
        best = SymmetricDecomposition(
            self.n, self.field,
            tuple(OrbitTerm(r, t) for r, t in self.best),
        )
        if expand_symmetric(best) != self.target:
            raise AssertionError("symmetric walk best state fails verification")
        return SymmetricSearchResult(best, self.best_rank, steps, cfg.seed & MASK64)


def symmetric_random_walk(target: Tensor, start: SymmetricDecomposition,
                          cfg: SearchConfig) -> SymmetricSearchResult:
    """One deterministic walk over orbit representatives."""
    return _SymWalk(target, start, cfg).run()


def symmetric_search(target: Tensor, start: SymmetricDecomposition,
                     cfg: SearchConfig) -> SymmetricSearchResult:
    """Best of cfg.restarts walks, restart k seeded with seed + k."""
    from dataclasses import replace

    results = []
    for k in range(cfg.restarts):
        sub = replace(cfg, seed=(cfg.seed + k) & MASK64, restarts=1)
        results.append(symmetric_random_walk(target, start, sub))
    return min(enumerate(results), key=lambda kv: (kv[1].rank, kv[0]))[1]
