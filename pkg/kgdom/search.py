"""Array-state depth-first search for dominating sets of a bounded size.

The search keeps per-vertex counters (how often a vertex is covered, how many
uncovered vertices each candidate would add, how many allowed dominators each
vertex still has) and updates them incrementally, so a node costs O(n * width)
instead of a pass over bitmasks. Frames live in flat arrays rather than on the
call stack, which lets the caller run the search in chunks of nodes and check
the wall clock in between.

The kernel is compiled with numba when it is installed and runs as plain
Python otherwise.
"""
import math
import time
import logging
from typing import List, Optional

import numpy as np

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda func: func

logger = logging.getLogger(__name__)

PAUSED, FOUND, EXHAUSTED = 0, 1, 2
_ENTER, _DESCEND, _LEAVE = 0, 1, 2

# nodes per kernel call between clock checks
CHUNK_NODES = 1 << 15 if HAS_NUMBA else 1 << 8


class BudgetExceeded(Exception):
    pass


@njit(cache=True)
def _choose(c, nbr, deg, width, cov, gain, nunc):
    base = c * width
    for i in range(deg[c]):
        w = nbr[base + i]
        cov[w] += 1
        if cov[w] == 1:
            nunc -= 1
            wb = w * width
            for j in range(deg[w]):
                gain[nbr[wb + j]] -= 1
    return nunc


@njit(cache=True)
def _unchoose(c, nbr, deg, width, cov, gain, nunc):
    base = c * width
    for i in range(deg[c]):
        w = nbr[base + i]
        cov[w] -= 1
        if cov[w] == 0:
            nunc += 1
            wb = w * width
            for j in range(deg[w]):
                gain[nbr[wb + j]] += 1
    return nunc


@njit(cache=True)
def _exclude(c, nbr, deg, width, excl, ccount):
    excl[c] = 1
    base = c * width
    for i in range(deg[c]):
        ccount[nbr[base + i]] -= 1


@njit(cache=True)
def _include(c, nbr, deg, width, excl, ccount):
    excl[c] = 0
    base = c * width
    for i in range(deg[c]):
        ccount[nbr[base + i]] += 1


@njit(cache=True)
def _cover_lower(even_need, odd_need, k):
    if even_need == 0 and odd_need == 0:
        return 0
    if k == 1:
        return max(even_need, odd_need)
    s = max(-(-(even_need + odd_need) // (k + 1)), -(-max(even_need, odd_need) // k))
    while True:
        a_lo = max(0, -((s - odd_need) // (k - 1)))
        a_hi = min(s, (k * s - even_need) // (k - 1))
        if a_lo <= a_hi:
            return s
        s += 1


@njit(cache=True)
def _lower_bound(nbr, deg, width, parity, k_bip, cov, excl, gain, mark, nunc):
    """Max of the fractional, packing and parity counting bounds; n + 1 if infeasible."""
    n = len(deg)
    if nunc == 0:
        return 0
    frac = 0.0
    unc_even = 0
    unc_odd = 0
    for u in range(n):
        if cov[u] != 0:
            continue
        if parity[u] == 0:
            unc_even += 1
        else:
            unc_odd += 1
        best = 0
        base = u * width
        for i in range(deg[u]):
            c = nbr[base + i]
            if excl[c] == 0 and gain[c] > best:
                best = gain[c]
        if best == 0:
            return n + 1
        frac += 1.0 / best
    lb = int(math.ceil(frac - 1e-9))
    if k_bip > 0:
        cover = _cover_lower(unc_even, unc_odd, k_bip)
        if cover > lb:
            lb = cover

    # uncovered vertices with pairwise disjoint allowed dominators
    for v in range(n):
        mark[v] = 0
    pack = 0
    for u in range(n):
        if cov[u] != 0:
            continue
        base = u * width
        free = True
        for i in range(deg[u]):
            c = nbr[base + i]
            if excl[c] == 0 and mark[c] == 1:
                free = False
                break
        if free:
            pack += 1
            for i in range(deg[u]):
                c = nbr[base + i]
                if excl[c] == 0:
                    mark[c] = 1
    if pack > lb:
        lb = pack
    return lb


@njit(cache=True)
def _covers_less(c, o, nbr, deg, width, cov):
    """Every uncovered vertex in N[c] is also in N[o]."""
    cb = c * width
    ob = o * width
    for i in range(deg[c]):
        w = nbr[cb + i]
        if cov[w] != 0:
            continue
        found = False
        for j in range(deg[o]):
            if nbr[ob + j] == w:
                found = True
                break
        if not found:
            return False
    return True


@njit(cache=True)
def _branch(depth, nbr, deg, width, cov, excl, gain, ccount, cands, ncand, tmp):
    """Fill frame `depth` with the useful dominators of the hardest uncovered vertex."""
    n = len(deg)
    best_u = -1
    best_cnt = width + 1
    for u in range(n):
        if cov[u] == 0 and ccount[u] < best_cnt:
            best_u = u
            best_cnt = ccount[u]
            if best_cnt <= 1:
                break
    ncand[depth] = 0
    if best_u < 0 or best_cnt == 0:
        return

    m = 0
    base = best_u * width
    for i in range(deg[best_u]):
        c = nbr[base + i]
        if excl[c] == 0:
            tmp[m] = c
            m += 1

    row = depth * width
    out = 0
    for a in range(m):
        c = tmp[a]
        dominated = False
        for b in range(m):
            o = tmp[b]
            if o == c or gain[o] < gain[c] or (gain[o] == gain[c] and o > c):
                continue
            if _covers_less(c, o, nbr, deg, width, cov):
                dominated = True
                break
        if dominated:
            continue
        # gain descending, then vertex ascending
        j = out
        while j > 0:
            prev = cands[row + j - 1]
            if gain[prev] > gain[c] or (gain[prev] == gain[c] and prev < c):
                break
            cands[row + j] = prev
            j -= 1
        cands[row + j] = c
        out += 1
    ncand[depth] = out


@njit(cache=True)
def run_search(nbr, deg, width, parity, k_bip, target,
               cov, excl, gain, ccount, chosen, cands, ncand, idx, mark, tmp, st, quota):
    """Advance the search by at most `quota` nodes.

    st holds [depth, size, uncovered, mode, nodes] and is written back on
    return so a PAUSED search resumes where it stopped.
    """
    depth = st[0]
    size = st[1]
    nunc = st[2]
    mode = st[3]
    done = 0
    status = PAUSED
    while True:
        if mode == _ENTER:
            if done >= quota:
                status = PAUSED
                break
            done += 1
            if nunc == 0:
                status = FOUND
                break
            idx[depth] = 0
            ncand[depth] = 0
            lb = _lower_bound(nbr, deg, width, parity, k_bip, cov, excl, gain, mark, nunc)
            if size + lb <= target:
                _branch(depth, nbr, deg, width, cov, excl, gain, ccount, cands, ncand, tmp)
            mode = _DESCEND if ncand[depth] > 0 else _LEAVE
        elif mode == _DESCEND:
            c = cands[depth * width + idx[depth]]
            nunc = _choose(c, nbr, deg, width, cov, gain, nunc)
            chosen[size] = c
            size += 1
            depth += 1
            mode = _ENTER
        else:
            row = depth * width
            for i in range(idx[depth]):
                _include(cands[row + i], nbr, deg, width, excl, ccount)
            idx[depth] = 0
            ncand[depth] = 0
            if depth == 0:
                status = EXHAUSTED
                break
            depth -= 1
            c = cands[depth * width + idx[depth]]
            size -= 1
            nunc = _unchoose(c, nbr, deg, width, cov, gain, nunc)
            # later siblings may not use c
            _exclude(c, nbr, deg, width, excl, ccount)
            idx[depth] += 1
            mode = _DESCEND if idx[depth] < ncand[depth] else _LEAVE
    st[0] = depth
    st[1] = size
    st[2] = nunc
    st[3] = mode
    st[4] += done
    return status


_compiled = False


def _compile_once():
    """Trigger numba compilation on a two-vertex graph outside any timed solve."""
    global _compiled
    if _compiled or not HAS_NUMBA:
        return
    _compiled = True
    start = time.monotonic()
    DominationSearch([0b11, 0b11], k_bip=0, fix_root=True,
                     max_nodes=16, max_seconds=60.0).decide(1)
    logger.debug(f"search kernel compiled in {time.monotonic() - start:.2f}s")


class DominationSearch:
    """Decides, for one graph and a shared budget, whether a dominating set of size <= s exists.

    closed[v] is the closed neighbourhood of v as a bitmask. With fix_root the
    search puts vertex 0 in every candidate set, which is only sound for
    vertex-transitive graphs. k_bip > 0 enables the counting bound of a
    k_bip-regular graph split into even and odd vertices.
    """

    def __init__(self, closed: List[int], k_bip: int, fix_root: bool,
                 max_nodes: int, max_seconds: float):
        _compile_once()
        n = len(closed)
        members = [_bits(mask) for mask in closed]
        width = max(len(m) for m in members)
        nbr = np.full(n * width, -1, dtype=np.int64)
        for v, m in enumerate(members):
            nbr[v * width:v * width + len(m)] = m

        self.n = n
        self.width = width
        self.k_bip = k_bip
        self.fix_root = fix_root
        self.max_nodes = max_nodes
        self.deadline = time.monotonic() + max_seconds
        self.nodes = 0

        self._deg0 = np.array([len(m) for m in members], dtype=np.int64)
        self._arrays = {
            "nbr": nbr,
            "deg": self._deg0,
            "parity": np.arange(n, dtype=np.int64) % 2,
        }

    @classmethod
    def for_graph(cls, g, closed: List[int], max_nodes: int, max_seconds: float) -> "DominationSearch":
        return cls(closed, g.degree if g.bipartite_regular else 0,
                   g.symmetry_fixes_root, max_nodes, max_seconds)

    def _vec(self, values):
        return values if HAS_NUMBA else values.tolist()

    def decide(self, target: int) -> Optional[List[int]]:
        """A dominating set of size <= target, or None when none exists.

        Raises BudgetExceeded once the shared node or time budget runs out.
        """
        n, width = self.n, self.width
        if target < (1 if n else 0):
            return None
        a = self._arrays
        nbr, deg, parity = self._vec(a["nbr"]), self._vec(a["deg"]), self._vec(a["parity"])
        cov = self._vec(np.zeros(n, dtype=np.int64))
        excl = self._vec(np.zeros(n, dtype=np.int64))
        gain = self._vec(self._deg0.copy())
        ccount = self._vec(self._deg0.copy())
        chosen = self._vec(np.zeros(n + 1, dtype=np.int64))
        cands = self._vec(np.zeros((n + 1) * width, dtype=np.int64))
        ncand = self._vec(np.zeros(n + 1, dtype=np.int64))
        idx = self._vec(np.zeros(n + 1, dtype=np.int64))
        mark = self._vec(np.zeros(n, dtype=np.int64))
        tmp = self._vec(np.zeros(width, dtype=np.int64))
        st = self._vec(np.zeros(5, dtype=np.int64))

        st[2] = n
        if self.fix_root:
            st[2] = _choose(0, nbr, deg, width, cov, gain, n)
            chosen[0] = 0
            st[1] = 1

        while True:
            quota = max(0, min(CHUNK_NODES, self.max_nodes - self.nodes))
            before = st[4]
            status = run_search(nbr, deg, width, parity, self.k_bip, target,
                                cov, excl, gain, ccount, chosen, cands, ncand, idx, mark, tmp, st, quota)
            self.nodes += int(st[4] - before)
            if status == FOUND:
                return sorted(int(v) for v in chosen[:int(st[1])])
            if status == EXHAUSTED:
                return None
            if self.nodes >= self.max_nodes:
                raise BudgetExceeded("node budget")
            if time.monotonic() > self.deadline:
                raise BudgetExceeded("time budget")


def _bits(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out
