"""Sparse labeled bipartite graphs: the realized inverse-generator matrices.

Rows of the matrix are check nodes, columns are variable nodes.  Every
row and column holds exactly one entry of magnitude 1 and d-1 entries of
magnitude w, each with an independent random sign.  Coupled variants
arrange L blocks of n nodes per side; node ids are global and 0-based,
positions are 1-based (position = id // n + 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError, ParameterError
from .params import CouplingParams, LdlcParams, null_check_positions

RETRY_BUDGET = 100


@dataclass
class SparseLabeledGraph:
    n: int                  # nodes per side per position
    L: int                  # number of positions (1 for conventional)
    d: int
    alpha: float
    K: int
    mode: str
    seed: int
    check_ids: np.ndarray   # (E,) int64
    var_ids: np.ndarray     # (E,) int64
    labels: np.ndarray      # (E,) float64, signed, |label| in {1, w}

    @property
    def w(self) -> float:
        return LdlcParams(self.alpha, self.d).w

    @property
    def num_nodes(self) -> int:
        """Nodes per side (checks and variables are both n*L)."""
        return self.n * self.L

    @property
    def num_edges(self) -> int:
        return len(self.labels)

    def var_position(self, v: int) -> int:
        return v // self.n + 1

    def check_position(self, c: int) -> int:
        return c // self.n + 1

    @property
    def coupling(self) -> CouplingParams:
        return CouplingParams(self.mode, self.L, self.K)

    @property
    def null_checks(self) -> frozenset[int]:
        return null_check_positions(self.coupling, LdlcParams(self.alpha, self.d))

    def null_check_nodes(self) -> np.ndarray:
        """Boolean mask over check nodes, true at terminated positions."""
        mask = np.zeros(self.num_nodes, dtype=bool)
        for pos in self.null_checks:
            mask[(pos - 1) * self.n:pos * self.n] = True
        return mask

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.num_nodes, self.num_nodes))
        h[self.check_ids, self.var_ids] += self.labels
        return h

    def save_edges(self, path) -> None:
        """Write the text edge-list format (one `check var label` line per edge)."""
        with open(path, "w") as fh:
            fh.write(f"#ldlc n={self.n} L={self.L} d={self.d} alpha={self.alpha!r} "
                     f"K={self.K} mode={self.mode} seed={self.seed}\n")
            for c, v, lab in zip(self.check_ids, self.var_ids, self.labels):
                fh.write(f"{c} {v} {lab:.17g}\n")


def load_edges(path) -> SparseLabeledGraph:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("#ldlc"):
            raise ParameterError(f"{path}: not an ldlc edge-list file")
        meta = dict(tok.split("=", 1) for tok in header.split()[1:])
        cs, vs, labs = [], [], []
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            c, v, lab = line.split()
            cs.append(int(c))
            vs.append(int(v))
            labs.append(float(lab))
    return SparseLabeledGraph(
        n=int(meta["n"]), L=int(meta["L"]), d=int(meta["d"]),
        alpha=float(meta["alpha"]), K=int(meta["K"]), mode=meta["mode"],
        seed=int(meta["seed"]),
        check_ids=np.asarray(cs, dtype=np.int64),
        var_ids=np.asarray(vs, dtype=np.int64),
        labels=np.asarray(labs))


def _rng(seed: int, *stream) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))


def _signs(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.where(rng.random(size) < 0.5, -1.0, 1.0)


def _repair_permutation(p: np.ndarray, prev: np.ndarray, rng: np.random.Generator) -> bool:
    """Swap entries of permutation `p` until no row repeats a target in `prev`.

    `prev` is (n, k): the targets already used by each row.  Returns False
    when the swap budget runs out.
    """
    n = len(p)
    if prev.shape[1] == 0:
        return True
    budget = 50 * n + 1000
    while budget > 0:
        conflicts = np.nonzero((p[:, None] == prev).any(axis=1))[0]
        if len(conflicts) == 0:
            return True
        partners = rng.integers(0, n, size=len(conflicts))
        for r, r2 in zip(conflicts, partners):
            p[r], p[r2] = p[r2], p[r]
            budget -= 1
    return False


def _disjoint_permutations(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """d row-to-column permutations of size n with pairwise disjoint supports."""
    perms = np.empty((d, n), dtype=np.int64)
    for i in range(d):
        prev = perms[:i].T.copy()  # (n, i)
        for attempt in range(RETRY_BUDGET):
            p = rng.permutation(n)
            if _repair_permutation(p, prev, rng):
                perms[i] = p
                break
        else:
            raise ConstructionError(
                f"could not place permutation {i + 1}/{d} without overlap "
                f"(n={n}, budget {RETRY_BUDGET})")
    return perms


def build_conventional(n: int, params: LdlcParams, seed: int) -> SparseLabeledGraph:
    """n-by-n (alpha, d) matrix: d disjoint signed permutations, the first
    labeled +-1 and the rest +-w."""
    if n < params.d:
        raise ParameterError(f"need n >= d to place d disjoint permutations, got n={n}, d={params.d}")
    rng = _rng(seed, 1)
    perms = _disjoint_permutations(n, params.d, rng)
    mags = np.concatenate([np.ones(n), np.full((params.d - 1) * n, params.w)])
    check_ids = np.tile(np.arange(n, dtype=np.int64), params.d)
    var_ids = perms.reshape(-1)
    labels = mags * _signs(rng, params.d * n)
    return SparseLabeledGraph(n=n, L=1, d=params.d, alpha=params.alpha, K=1,
                              mode="conventional", seed=seed,
                              check_ids=check_ids, var_ids=var_ids, labels=labels)


def build_standard_coupled(n: int, params: LdlcParams, L: int, seed: int) -> SparseLabeledGraph:
    """Tail-biting band matrix of L coupled blocks.

    Variable block l places its unit permutation on check block l and its
    i-th weighted permutation on check block l+i-1 (wrapped modulo L), so
    each check row collects one entry from each of d consecutive variable
    blocks.
    """
    d = params.d
    if L < d:
        raise ParameterError(f"standard coupling requires L >= d, got L={L}, d={d}")
    rng = _rng(seed, 2)
    cs, vs, labs = [], [], []
    base = np.arange(n, dtype=np.int64)
    for l in range(L):           # 0-based variable block
        for i in range(d):       # i=0 is the unit-label diagonal block
            rb = (l + i) % L
            p = rng.permutation(n)
            mag = 1.0 if i == 0 else params.w
            cs.append(rb * n + base)
            vs.append(l * n + p)
            labs.append(mag * _signs(rng, n))
    return SparseLabeledGraph(n=n, L=L, d=d, alpha=params.alpha, K=1,
                              mode="standard", seed=seed,
                              check_ids=np.concatenate(cs),
                              var_ids=np.concatenate(vs),
                              labels=np.concatenate(labs))


def _window_matching(n: int, L: int, K: int, sockets_per_node: int,
                     rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Match variable sockets to check sockets within the coupling window.

    Every node on both sides exposes `sockets_per_node` sockets; a variable
    at position l (0-based) may land on check positions {l, .., l+K-1} mod L.
    Returns (var_ids, check_ids) of the matched edges.  Sockets are
    processed in random order, each drawing uniformly over the free check
    sockets inside its window; a dead end is repaired by an augmenting
    chain that shifts earlier assignments along their windows (always
    possible: every window contains the variable's own position, so an
    identity matching exists).
    """
    nodes = n * L
    total = nodes * sockets_per_node
    # free[pos]: free check sockets (check node ids) at that position
    free = [list(np.repeat(np.arange(p * n, (p + 1) * n, dtype=np.int64),
                           sockets_per_node))
            for p in range(L)]
    by_pos: list[list[int]] = [[] for _ in range(L)]  # socket indices per position
    var_sockets = np.repeat(np.arange(nodes, dtype=np.int64), sockets_per_node)
    sock_pos = np.full(total, -1, dtype=np.int64)
    out_c = np.empty(total, dtype=np.int64)

    def window_of(si: int) -> list[int]:
        l = int(var_sockets[si]) // n
        return [(l + k) % L for k in range(K)]

    def take_free(p: int) -> int:
        r = int(rng.integers(len(free[p])))
        free[p][r], free[p][-1] = free[p][-1], free[p][r]
        return int(free[p].pop())

    def assign(si: int, p: int) -> None:
        out_c[si] = take_free(p)
        sock_pos[si] = p
        by_pos[p].append(si)

    def augment(window: list[int]) -> int:
        """Free a check socket at some position of `window` by BFS over
        reassignable earlier sockets; returns that position."""
        parent: dict[int, tuple[int, int]] = {}
        visited = set(window)
        queue = list(window)
        target = -1
        while queue and target < 0:
            p = queue.pop(0)
            for si in by_pos[p]:
                for p2 in window_of(si):
                    if p2 in visited:
                        continue
                    visited.add(p2)
                    parent[p2] = (p, si)
                    if free[p2]:
                        target = p2
                        break
                    queue.append(p2)
                if target >= 0:
                    break
        if target < 0:
            raise ConstructionError(
                f"window matching is infeasible (n={n}, L={L}, K={K})")
        # shift assignments down the chain, freeing a socket in the window
        p2 = target
        while p2 not in window:
            p, si = parent[p2]
            freed = int(out_c[si])
            by_pos[p].remove(si)
            assign(si, p2)
            free[p].append(freed)
            p2 = p
        return p2

    for si in rng.permutation(total):
        si = int(si)
        window = window_of(si)
        counts = [len(free[p]) for p in window]
        avail = sum(counts)
        if avail == 0:
            assign(si, augment(window))
            continue
        r = int(rng.integers(avail))
        for p, c in zip(window, counts):
            if r < c:
                assign(si, p)
                break
            r -= c
    return var_sockets, out_c


def build_randomized_coupled(n: int, params: LdlcParams, coupling: CouplingParams,
                             seed: int) -> SparseLabeledGraph:
    """Randomized (alpha, d, L, K) graph via two label-aware window matchings.

    Unit-label edges form a bijection between variable and check nodes
    respecting the K-window; the d-1 weighted sockets per node are matched
    the same way.  Parallel edges are allowed.
    """
    if coupling.mode != "randomized":
        raise ParameterError(f"expected randomized coupling, got mode={coupling.mode!r}")
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    L, K, d = coupling.L, coupling.K, params.d
    rng = _rng(seed, 3)
    uv, uc = _window_matching(n, L, K, 1, rng)
    wv, wc = _window_matching(n, L, K, d - 1, rng)
    var_ids = np.concatenate([uv, wv])
    check_ids = np.concatenate([uc, wc])
    mags = np.concatenate([np.ones(len(uv)), np.full(len(wv), params.w)])
    labels = mags * _signs(rng, len(var_ids))
    return SparseLabeledGraph(n=n, L=L, d=d, alpha=params.alpha, K=K,
                              mode="randomized", seed=seed,
                              check_ids=check_ids, var_ids=var_ids, labels=labels)


def expand_protograph(proto: SparseLabeledGraph, n: int, seed: int) -> SparseLabeledGraph:
    """Copy-and-permute lift: every proto node becomes n nodes, every proto
    edge a random n-permutation carrying the edge's magnitude with fresh signs."""
    if n < 1:
        raise ParameterError(f"lift factor must be positive, got {n}")
    rng = _rng(seed, 4)
    e = proto.num_edges
    base = np.arange(n, dtype=np.int64)
    cs = np.empty((e, n), dtype=np.int64)
    vs = np.empty((e, n), dtype=np.int64)
    labs = np.empty((e, n))
    for i in range(e):
        p = rng.permutation(n)
        cs[i] = proto.check_ids[i] * n + base
        vs[i] = proto.var_ids[i] * n + p
        labs[i] = abs(proto.labels[i]) * _signs(rng, n)
    return SparseLabeledGraph(n=proto.n * n, L=proto.L, d=proto.d,
                              alpha=proto.alpha, K=proto.K, mode=proto.mode,
                              seed=seed,
                              check_ids=cs.reshape(-1), var_ids=vs.reshape(-1),
                              labels=labs.reshape(-1))


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "graph valid"
        return "\n".join(self.violations)


def validate_graph(g: SparseLabeledGraph, atol: float = 1e-12) -> ValidationReport:
    """Check degree/label profiles on both sides and, for randomized mode,
    that every edge stays inside its K-window."""
    report = ValidationReport()
    w = g.w
    mags = np.abs(g.labels)
    is_unit = np.isclose(mags, 1.0, rtol=0.0, atol=atol)
    is_w = np.isclose(mags, w, rtol=0.0, atol=atol)
    for i in np.nonzero(~(is_unit | is_w))[0][:10]:
        report.violations.append(
            f"edge {i} (check {g.check_ids[i]}, var {g.var_ids[i]}): "
            f"label magnitude {mags[i]!r} is neither 1 nor w={w!r}")
    nodes = g.num_nodes
    for side, ids in (("check", g.check_ids), ("variable", g.var_ids)):
        units = np.bincount(ids, weights=is_unit, minlength=nodes)
        ws = np.bincount(ids, weights=is_w, minlength=nodes)
        for node in np.nonzero(units != 1)[0][:10]:
            report.violations.append(
                f"{side} node {node}: {int(units[node])} unit-label edges, expected 1")
        for node in np.nonzero(ws != g.d - 1)[0][:10]:
            report.violations.append(
                f"{side} node {node}: {int(ws[node])} w-label edges, expected {g.d - 1}")
    if g.mode == "randomized":
        vpos = g.var_ids // g.n       # 0-based
        cpos = g.check_ids // g.n
        offset = (cpos - vpos) % g.L
        for i in np.nonzero(offset >= g.K)[0][:10]:
            report.violations.append(
                f"edge {i}: variable position {vpos[i] + 1} to check position "
                f"{cpos[i] + 1} leaves the K={g.K} window")
    return report
