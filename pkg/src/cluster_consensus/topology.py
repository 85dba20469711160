"""Graphs, mixing matrices, and spectral quantities for clustered networks.

A clustered network consists of r clusters, each holding one leader and a
connected graph of followers, plus a connected graph over the leaders
themselves.  Followers mix through a doubly stochastic weight matrix built
from the max-degree rule; leaders mix through a (possibly time-varying)
doubly stochastic matrix with a positive diagonal.  The convergence theory
consumes two spectral quantities computed here: the second largest singular
value sigma_a of each follower matrix and the worst-case counterpart delta_c
of the leader schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    ConfigError,
    ConstructionError,
    DomainError,
    NumericError,
    ShapeError,
    TopologyError,
)

# Matrices up to this size get an exact dense decomposition; larger ones fall
# back to power iteration on the deviation from the averaging projector.
EXACT_SPECTRAL_LIMIT = 512
POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_CAP = 100_000

DOUBLY_STOCHASTIC_TOL = 1e-12


# =====================================================================
# graphs
# =====================================================================

def _canonical_edges(node_count: int, edges) -> frozenset:
    out = set()
    for e in edges:
        i, j = int(e[0]), int(e[1])
        if i == j:
            raise TopologyError(f"self-loop on node {i} is not allowed")
        if not (0 <= i < node_count and 0 <= j < node_count):
            raise TopologyError(
                f"edge ({i}, {j}) references a node outside [0, {node_count})"
            )
        out.add((min(i, j), max(i, j)))
    return frozenset(out)


@dataclass(frozen=True, eq=True)
class AdjacencyGraph:
    """Undirected simple graph on nodes 0..node_count-1."""

    node_count: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.node_count < 1:
            raise TopologyError("graph needs at least one node")
        object.__setattr__(self, "edges", _canonical_edges(self.node_count, self.edges))

    @classmethod
    def from_edges(cls, node_count: int, edges) -> "AdjacencyGraph":
        return cls(node_count, frozenset((int(i), int(j)) for i, j in edges))

    @cached_property
    def _adjacency(self) -> tuple:
        nbrs = [[] for _ in range(self.node_count)]
        for i, j in sorted(self.edges):
            nbrs[i].append(j)
            nbrs[j].append(i)
        return tuple(tuple(sorted(n)) for n in nbrs)

    def neighbors(self, i: int) -> tuple:
        return self._adjacency[i]

    def degree(self, i: int) -> int:
        return len(self._adjacency[i])

    def degrees(self) -> np.ndarray:
        return np.array([len(n) for n in self._adjacency], dtype=int)

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in self.neighbors(i):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.node_count


def ring_graph(node_count: int) -> AdjacencyGraph:
    """Cycle where each node touches its nearest two peers (needs >= 3 nodes)."""
    if node_count < 3:
        raise ConstructionError(
            f"a ring needs at least 3 nodes, got {node_count}"
        )
    return AdjacencyGraph.from_edges(
        node_count, [(i, (i + 1) % node_count) for i in range(node_count)]
    )


def line_graph(node_count: int) -> AdjacencyGraph:
    """Path 0-1-...-(n-1); a single node yields the edgeless graph."""
    return AdjacencyGraph.from_edges(
        node_count, [(i, i + 1) for i in range(node_count - 1)]
    )


def complete_graph(node_count: int) -> AdjacencyGraph:
    return AdjacencyGraph.from_edges(
        node_count,
        [(i, j) for i in range(node_count) for j in range(i + 1, node_count)],
    )


def geometric_graph(node_count: int, radius: float, rng,
                    max_attempts: int = 100) -> AdjacencyGraph:
    """Random geometric graph: uniform points in the unit square, edge iff
    the Euclidean distance is below `radius`.  Resamples until connected,
    giving up after `max_attempts` draws.
    """
    if radius <= 0:
        raise ConstructionError(f"geometric radius must be positive, got {radius}")
    for _ in range(max_attempts):
        pts = rng.random((node_count, 2))
        dists = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        close = (dists < radius) & ~np.eye(node_count, dtype=bool)
        ii, jj = np.nonzero(np.triu(close))
        graph = AdjacencyGraph.from_edges(node_count, zip(ii.tolist(), jj.tolist()))
        if graph.is_connected():
            return graph
    raise ConstructionError(
        f"no connected geometric graph on {node_count} nodes with radius "
        f"{radius} within {max_attempts} attempts"
    )


# =====================================================================
# weight matrices
# =====================================================================

@dataclass(frozen=True)
class WeightViolation:
    """One violated clause of the doubly stochastic weight contract."""

    clause: str          # row_sum | column_sum | support | diagonal | edge_weight
    where: tuple
    value: float

    def __str__(self):
        return f"{self.clause} violated at {self.where} (value {self.value!r})"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "weights valid"
        return "; ".join(str(v) for v in self.violations)


def validate_weights(entries, support: AdjacencyGraph, alpha: float,
                     tol: float = DOUBLY_STOCHASTIC_TOL) -> ValidationReport:
    """Check a candidate mixing matrix against its support graph.

    Clauses checked: row sums and column sums equal one (within `tol`),
    off-diagonal entries are positive exactly on edges of `support`,
    diagonal entries reach `alpha`, and edge weights reach `alpha` (the
    lower bounds get the same `tol` of slack, since a diagonal computed as
    one minus a row sum can land a rounding error below alpha).
    """
    w = np.asarray(entries, dtype=float)
    n = support.node_count
    if w.shape != (n, n):
        raise ShapeError(f"weight matrix shape {w.shape} does not match {n} nodes")
    if not np.all(np.isfinite(w)):
        raise NumericError("weight matrix contains non-finite entries")
    if not (0 < alpha <= 1):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")

    bad = []
    rows = w.sum(axis=1)
    for i in np.nonzero(np.abs(rows - 1.0) > tol)[0]:
        bad.append(WeightViolation("row_sum", (int(i),), float(rows[i])))
    cols = w.sum(axis=0)
    for j in np.nonzero(np.abs(cols - 1.0) > tol)[0]:
        bad.append(WeightViolation("column_sum", (int(j),), float(cols[j])))
    edge_set = support.edges
    for i in range(n):
        for j in range(i + 1, n):
            on_edge = (i, j) in edge_set
            for a, b in ((i, j), (j, i)):
                v = float(w[a, b])
                if on_edge and v <= 0.0:
                    bad.append(WeightViolation("support", (a, b), v))
                elif not on_edge and v != 0.0:
                    bad.append(WeightViolation("support", (a, b), v))
                elif on_edge and v < alpha - tol:
                    bad.append(WeightViolation("edge_weight", (a, b), v))
    for i in range(n):
        if w[i, i] < alpha - tol:
            bad.append(WeightViolation("diagonal", (int(i), int(i)), float(w[i, i])))
    return ValidationReport(tuple(bad))


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Doubly stochastic mixing matrix tied to a support graph.

    `min_edge_weight` is the uniform lower bound alpha that diagonal and
    edge entries must reach.  The contract is validated at construction.
    """

    entries: np.ndarray
    support: AdjacencyGraph
    min_edge_weight: float

    def __post_init__(self):
        w = np.array(self.entries, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "entries", w)
        report = validate_weights(w, self.support, self.min_edge_weight)
        if not report.ok:
            raise TopologyError(f"invalid weight matrix: {report}")

    @property
    def size(self) -> int:
        return self.support.node_count


def metropolis_weights(graph: AdjacencyGraph) -> WeightMatrix:
    """Max-degree mixing matrix: w_ij = 1 / (1 + max(deg_i, deg_j)) on edges,
    with the diagonal absorbing whatever each row has left.

    The graph must be connected.  The result is symmetric, doubly
    stochastic, and bounded below by alpha = 1 / (1 + max degree) on the
    diagonal and on every edge.
    """
    if not graph.is_connected():
        raise TopologyError(
            f"max-degree weights need a connected graph "
            f"({graph.node_count} nodes, {len(graph.edges)} edges)"
        )
    n = graph.node_count
    deg = graph.degrees()
    w = np.zeros((n, n))
    for i, j in graph.edges:
        w[i, j] = w[j, i] = 1.0 / (1.0 + max(deg[i], deg[j]))
    diag = 1.0 - w.sum(axis=1)
    assert np.all(diag > 0), "max-degree rule produced a non-positive diagonal"
    w[np.diag_indices(n)] = diag
    alpha = 1.0 / (1.0 + int(deg.max()))
    return WeightMatrix(w, graph, alpha)


# =====================================================================
# spectral quantities
# =====================================================================

def _deviation(w: np.ndarray) -> np.ndarray:
    n = w.shape[0]
    return w - np.full((n, n), 1.0 / n)


def second_largest_singular_value(weights) -> float:
    """Spectral norm of W minus the averaging projector (1/n) * ones.

    For a doubly stochastic W this equals the second largest singular value
    of W itself, the contraction factor of W on the disagreement subspace.
    Small matrices use an exact dense decomposition; above
    EXACT_SPECTRAL_LIMIT nodes a power iteration on the deviation matrix is
    used (tolerance 1e-10, capped at 1e5 sweeps).
    """
    w = weights.entries if isinstance(weights, WeightMatrix) else np.asarray(weights, float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise NumericError("matrix contains non-finite entries")
    n = w.shape[0]
    dev = _deviation(w)
    if n <= EXACT_SPECTRAL_LIMIT:
        if np.allclose(w, w.T, atol=1e-13, rtol=0.0):
            return float(np.max(np.abs(np.linalg.eigvalsh(dev))))
        return float(np.linalg.svd(dev, compute_uv=False)[0])
    # power iteration on dev^T dev; deterministic start vector
    rng = np.random.default_rng(n)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(POWER_ITERATION_CAP):
        u = dev @ v
        v_new = dev.T @ u
        norm = np.linalg.norm(v_new)
        if norm == 0.0:
            return 0.0
        v = v_new / norm
        new_est = float(np.sqrt(norm))
        if abs(new_est - est) <= POWER_ITERATION_TOL * max(1.0, new_est):
            return new_est
        est = new_est
    return est


# =====================================================================
# leader schedule
# =====================================================================

@dataclass(frozen=True, eq=False)
class LeaderSchedule:
    """Sequence of leader mixing matrices, one per iteration.

    mode "static" uses a single matrix forever; mode "cyclic" rotates
    through the list.  Every matrix must share the leader count and have a
    connected support graph, so the inter-leader network is connected at
    every iteration.
    """

    matrices: tuple
    mode: str = "static"

    def __post_init__(self):
        mats = tuple(self.matrices)
        object.__setattr__(self, "matrices", mats)
        if not mats:
            raise ConfigError("leader schedule needs at least one matrix")
        if self.mode not in ("static", "cyclic"):
            raise ConfigError(f"unknown schedule mode {self.mode!r}")
        if self.mode == "static" and len(mats) != 1:
            raise ConfigError("static schedule takes exactly one matrix")
        r = mats[0].size
        for m in mats:
            if m.size != r:
                raise ShapeError("all schedule matrices must have the same size")
            if not m.support.is_connected():
                raise TopologyError("leader graph must be connected at every iteration")

    @property
    def size(self) -> int:
        return self.matrices[0].size

    def matrix_at(self, k: int) -> WeightMatrix:
        if self.mode == "static":
            return self.matrices[0]
        return self.matrices[k % len(self.matrices)]


def delta_c(schedule: LeaderSchedule) -> float:
    """Worst-case second largest singular value across the schedule.

    For a single leader this is 0 by convention (a 1x1 matrix has no
    disagreement direction).
    """
    return max(second_largest_singular_value(m) for m in schedule.matrices)


@dataclass(frozen=True)
class SpectralSummary:
    """Spectral inputs of the convergence bounds for one network and delay."""

    sigma_per_cluster: tuple
    delta_c: float
    tau: int
    beta_max: float


def spectral_summary(network: "ClusteredNetwork", tau: int) -> SpectralSummary:
    if tau < 0:
        raise DomainError(f"tau must be non-negative, got {tau}")
    sigmas = tuple(
        second_largest_singular_value(c.follower_weights) for c in network.clusters
    )
    dc = delta_c(network.leader_schedule)
    if tau >= 1:
        beta_max = 1.0 - dc ** (1.0 / tau)
    else:
        beta_max = 1.0 - dc
    return SpectralSummary(sigmas, dc, int(tau), beta_max)


# =====================================================================
# clustered networks
# =====================================================================

@dataclass(frozen=True, eq=False)
class Cluster:
    """One cluster: its follower graph/weights and global node ids.

    The follower matrix ranges over followers only; the leader couples into
    the follower update solely through the leader-tracking term.
    """

    follower_graph: AdjacencyGraph
    follower_weights: WeightMatrix
    leader_id: int
    follower_ids: tuple

    @property
    def size(self) -> int:
        return len(self.follower_ids) + 1


@dataclass(frozen=True, eq=False)
class ClusteredNetwork:
    clusters: tuple
    leader_schedule: LeaderSchedule
    total_nodes: int

    def __post_init__(self):
        ids = []
        for c in self.clusters:
            ids.append(c.leader_id)
            ids.extend(c.follower_ids)
        if len(ids) != len(set(ids)):
            raise TopologyError("cluster node sets overlap")
        if len(ids) != self.total_nodes:
            raise TopologyError(
                f"cluster sizes sum to {len(ids)}, expected {self.total_nodes}"
            )
        if self.leader_schedule.size != len(self.clusters):
            raise ShapeError("leader schedule size must match the cluster count")

    @property
    def cluster_count(self) -> int:
        return len(self.clusters)

    @property
    def leader_ids(self) -> tuple:
        return tuple(c.leader_id for c in self.clusters)


def build_clustered_network(spec) -> "ClusteredNetwork":
    """Realise a scenario: follower graphs per cluster, weights, leader graph.

    Every cluster occupies a contiguous block of global node ids with the
    leader at the block start.  Randomised families draw from a generator
    seeded by (spec.seed, 0), so identical specs give identical networks.
    """
    rng = np.random.default_rng([spec.seed, 0])
    clusters = []
    offset = 0
    for a, size in enumerate(spec.cluster_sizes):
        followers = size - 1
        if followers < 1:
            raise ConstructionError(f"cluster {a} has no followers (size {size})")
        if spec.family == "ring":
            if followers < 3:
                raise ConstructionError(
                    f"cluster {a}: a follower ring needs at least 3 followers, "
                    f"got {followers}"
                )
            graph = ring_graph(followers)
        elif spec.family == "geometric":
            graph = geometric_graph(followers, spec.radius, rng)
        elif spec.family == "explicit":
            graph = AdjacencyGraph.from_edges(followers, spec.cluster_edges[a])
        else:  # pragma: no cover - scenario validation rejects this earlier
            raise ConfigError(f"unknown topology family {spec.family!r}")
        weights = metropolis_weights(graph)
        clusters.append(
            Cluster(
                follower_graph=graph,
                follower_weights=weights,
                leader_id=offset,
                follower_ids=tuple(range(offset + 1, offset + size)),
            )
        )
        offset += size

    r = len(clusters)
    if spec.leader_graph == "line":
        lg = line_graph(r)
    elif spec.leader_graph == "complete":
        lg = complete_graph(r) if r > 1 else line_graph(1)
    elif spec.leader_graph == "explicit":
        lg = AdjacencyGraph.from_edges(r, spec.leader_edges)
    else:  # pragma: no cover - scenario validation rejects this earlier
        raise ConfigError(f"unknown leader graph {spec.leader_graph!r}")
    schedule = LeaderSchedule((metropolis_weights(lg),), mode="static")
    return ClusteredNetwork(tuple(clusters), schedule, offset)
