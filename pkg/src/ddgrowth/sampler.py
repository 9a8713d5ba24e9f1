"""Two-level weighted node sampler over degree classes.

A Fenwick tree over class weights f(i) * N(i) picks a degree class in
O(log k), k the largest degree reached so far (the index covers a
power-of-two prefix of the classes and doubles when a node outgrows it);
a node is then drawn uniformly inside the class. Nodes are
kept in one array grouped into contiguous per-degree blocks, highest
degree first, so moving a node up one degree is a single swap and a new
degree-1 node is an append.

The hot loops are numba kernels over plain arrays; ``DegreeClassSampler``
owns the arrays and exposes them to the simulator.
"""
from __future__ import annotations

import numpy as np
from numba import njit

REBUILD_EVERY = 1 << 20
MIN_ACTIVE = 1024

# Slots of the integer state vector.
N_NODES = 0
UPDATES = 1
TOP_BIT = 2
ACTIVE = 3


@njit(cache=True)
def _fenwick_build(fw, count, tree, n):
    # Index over classes 1..n only; classes above n are empty.
    for i in range(1, n + 1):
        tree[i] = fw[i] * count[i]
    for i in range(1, n + 1):
        j = i + (i & -i)
        if j <= n:
            tree[j] += tree[i]
    total = 0.0
    for i in range(1, n + 1):
        total += fw[i] * count[i]
    return total


@njit(cache=True)
def _fenwick_add(tree, n, i, delta):
    while i <= n:
        tree[i] += delta
        i += i & -i


@njit(cache=True)
def _fenwick_find(tree, n, top_bit, r):
    # Smallest class whose inclusive prefix sum exceeds r.
    idx = 0
    bit = top_bit
    while bit > 0:
        nxt = idx + bit
        if nxt <= n and tree[nxt] <= r:
            idx = nxt
            r -= tree[nxt]
        bit >>= 1
    return idx + 1


@njit(cache=True)
def _highest_bit(n):
    b = 1
    while b * 2 <= n:
        b *= 2
    return b


@njit(cache=True)
def _grow(fw, count, tree, istate, fstate, needed):
    d_max = fw.size - 1
    n = istate[ACTIVE]
    while n < needed:
        n *= 2
    if n > d_max:
        n = d_max
    istate[ACTIVE] = n
    istate[TOP_BIT] = _highest_bit(n)
    fstate[0] = _fenwick_build(fw, count, tree, n)
    istate[UPDATES] = 0


@njit(cache=True)
def _pick(u1, u2, fw, count, tree, start, order, istate, total):
    n = istate[ACTIVE]
    d = _fenwick_find(tree, n, istate[TOP_BIT], u1 * total)
    if d > n or count[d] == 0 or fw[d] <= 0.0:
        # Rounding pushed the search onto an empty class: take the nearest
        # non-empty one below, else above.
        k = min(d, n)
        while k >= 1 and (count[k] == 0 or fw[k] <= 0.0):
            k -= 1
        if k < 1:
            k = min(d, n)
            while k <= n and (count[k] == 0 or fw[k] <= 0.0):
                k += 1
        d = k
    j = int(u2 * count[d])
    if j >= count[d]:
        j = count[d] - 1
    return order[start[d] + j]


@njit(cache=True)
def _promote(node, fw, count, tree, start, order, pos, deg, istate, fstate):
    d = deg[node]
    first = start[d]
    other = order[first]
    at = pos[node]
    order[at] = other
    pos[other] = at
    order[first] = node
    pos[node] = first
    start[d] = first + 1
    count[d] -= 1
    count[d + 1] += 1
    deg[node] = d + 1
    if d + 1 > istate[ACTIVE]:
        _grow(fw, count, tree, istate, fstate, d + 1)
        return
    n = istate[ACTIVE]
    _fenwick_add(tree, n, d, -fw[d])
    _fenwick_add(tree, n, d + 1, fw[d + 1])
    fstate[0] += fw[d + 1] - fw[d]
    istate[UPDATES] += 2
    if istate[UPDATES] >= REBUILD_EVERY:
        fstate[0] = _fenwick_build(fw, count, tree, n)
        istate[UPDATES] = 0


@njit(cache=True)
def _add_node(fw, count, tree, start, order, pos, deg, istate, fstate):
    x = istate[N_NODES]
    order[x] = x
    pos[x] = x
    deg[x] = 1
    start[0] = x + 1
    count[1] += 1
    _fenwick_add(tree, istate[ACTIVE], 1, fw[1])
    fstate[0] += fw[1]
    istate[N_NODES] = x + 1
    istate[UPDATES] += 1
    return x


@njit(cache=True)
def _sample_many(uniforms, out, fw, count, tree, start, order, istate, fstate):
    for k in range(out.size):
        out[k] = _pick(uniforms[2 * k], uniforms[2 * k + 1], fw, count, tree, start, order, istate, fstate[0])


def _top_bit(n: int) -> int:
    return 1 << (int(n).bit_length() - 1)


class DegreeClassSampler:
    """Draw nodes with probability f(deg(v)) / sum_w f(deg(w)).

    ``weights[i]`` is the class weight of degree i (index 0 unused). The
    last degree is a frozen ceiling and its weight is forced to zero.
    """

    def __init__(self, weights, degrees, capacity: int | None = None):
        fw = np.zeros(len(weights) + 1)
        fw[1:] = np.asarray(weights, dtype=np.float64)
        fw[-1] = 0.0
        d_max = fw.size - 1
        deg0 = np.asarray(degrees, dtype=np.int64)
        if deg0.size and (deg0.min() < 1 or deg0.max() > d_max):
            raise ValueError(f"node degrees must lie in 1..{d_max}")
        n = deg0.size
        capacity = max(int(capacity or 0), n, 16)

        self.fw = fw
        self.count = np.zeros(d_max + 2, dtype=np.int64)
        np.add.at(self.count, deg0, 1)
        self.tree = np.zeros(d_max + 1)
        self.start = np.zeros(d_max + 2, dtype=np.int64)
        # start[d] = number of nodes with degree > d
        above = np.cumsum(self.count[::-1])[::-1]
        self.start[: d_max + 1] = above[1 : d_max + 2]
        self.order = np.zeros(capacity, dtype=np.int64)
        self.pos = np.zeros(capacity, dtype=np.int64)
        self.deg = np.zeros(capacity, dtype=np.int64)
        ranked = np.argsort(-deg0, kind="stable")
        self.order[:n] = ranked
        self.pos[ranked] = np.arange(n)
        self.deg[:n] = deg0
        self.istate = np.zeros(4, dtype=np.int64)
        self.istate[N_NODES] = n
        top = int(deg0.max()) if n else 1
        self.istate[ACTIVE] = min(d_max, max(MIN_ACTIVE, _top_bit(2 * top) * 2))
        self.istate[TOP_BIT] = _top_bit(int(self.istate[ACTIVE]))
        self.fstate = np.zeros(1)
        self.rebuild()

    @property
    def d_max(self) -> int:
        return self.fw.size - 1

    @property
    def node_count(self) -> int:
        return int(self.istate[N_NODES])

    @property
    def total_weight(self) -> float:
        return float(self.fstate[0])

    def class_weight(self, degree: int) -> float:
        return float(self.fw[degree] * self.count[degree])

    def rebuild(self):
        """Recompute the index from exact integer class sizes."""
        self.fstate[0] = _fenwick_build(self.fw, self.count, self.tree, int(self.istate[ACTIVE]))
        self.istate[UPDATES] = 0

    def ensure_capacity(self, n: int):
        if n <= self.order.size:
            return
        size = max(n, 2 * self.order.size)
        for name in ("order", "pos", "deg"):
            old = getattr(self, name)
            new = np.zeros(size, dtype=np.int64)
            new[: old.size] = old
            setattr(self, name, new)

    def arrays(self):
        return (self.fw, self.count, self.tree, self.start, self.order, self.pos, self.deg, self.istate, self.fstate)

    def sample(self, rng: np.random.Generator) -> int:
        return int(self.sample_many(1, rng)[0])

    def sample_many(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Independent draws from the current (fixed) state."""
        if self.total_weight <= 0:
            raise ValueError("cannot sample: total weight is zero")
        out = np.empty(size, dtype=np.int64)
        _sample_many(rng.random(2 * size), out, self.fw, self.count, self.tree, self.start, self.order, self.istate, self.fstate)
        return out

    def promote(self, node: int):
        """Raise a node's degree by one."""
        if self.deg[node] >= self.d_max:
            raise ValueError(f"node {node} is at the ceiling degree {self.d_max}")
        _promote(node, *self.arrays())

    def add_node(self) -> int:
        self.ensure_capacity(self.node_count + 1)
        return int(_add_node(self.fw, self.count, self.tree, self.start, self.order, self.pos, self.deg, self.istate, self.fstate))

    def probabilities(self) -> np.ndarray:
        """Exact per-node selection probabilities (for checks on small states)."""
        n = self.node_count
        w = self.fw[self.deg[:n]]
        return w / w.sum()

    def check(self, rtol: float = 1e-9):
        """Assert internal consistency; cheap enough for tests only."""
        n = self.node_count
        deg = self.deg[:n]
        counts = np.bincount(deg, minlength=self.count.size)
        assert np.array_equal(counts[: self.count.size], self.count), "class sizes drifted"
        for d in np.unique(deg):
            block = self.order[self.start[d] : (self.start[d - 1] if d > 1 else self.start[0])]
            assert np.all(self.deg[block] == d), f"bucket {d} holds a node of another degree"
        assert np.array_equal(self.order[self.pos[:n]], np.arange(n)), "position index broken"
        exact = float(np.dot(self.fw[1:], self.count[1 : self.fw.size]))
        assert abs(self.total_weight - exact) <= rtol * max(exact, 1.0), "total weight drifted"
