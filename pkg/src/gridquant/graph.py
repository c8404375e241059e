"""Complete-graph edge algebra and spanning-tree utilities.

Networks have n+1 nodes labelled 0..n; node 0 is the slack (reference) node.
Line parameters live on the complete graph K_{n+1}, as a weight vector of
length (n+1 choose 2) indexed by the lexicographic rank of node pairs (i, j),
i < j.  A radial network is a spanning tree: exactly n nonzero weights whose
Laplacian has positive algebraic connectivity.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

DEFAULT_ZERO_TOL = 1e-8
DEFAULT_LAMBDA_TOL = 1e-10


class TopologyError(ValueError):
    """An edge set that is not a spanning tree where one is required."""


def num_edges(n: int) -> int:
    """Number of edges of K_{n+1}, i.e. (n+1 choose 2)."""
    if n < 1:
        raise ValueError(f"need at least one non-slack node, got n={n}")
    return (n + 1) * n // 2


def num_nodes(d: int) -> int:
    """Inverse of num_edges: recover n from a weight-vector length d."""
    n = int((math.isqrt(8 * d + 1) - 1) // 2)
    if n < 1 or num_edges(n) != d:
        raise ValueError(f"{d} is not (n+1 choose 2) for any n >= 1")
    return n


def edge_index(i: int, j: int, n: int) -> int:
    """Lexicographic rank of the pair (i, j), 0 <= i < j <= n."""
    if not 0 <= i < j <= n:
        raise ValueError(f"invalid edge ({i}, {j}) for n={n}: need 0 <= i < j <= n")
    return i * n - i * (i - 1) // 2 + (j - i - 1)


def edge_pair(k: int, n: int) -> tuple[int, int]:
    """Node pair (i, j) with lexicographic rank k; inverse of edge_index."""
    d = num_edges(n)
    if not 0 <= k < d:
        raise ValueError(f"edge index {k} out of range for n={n} (d={d})")
    # first node: largest i with i*n - i*(i-1)/2 <= k
    i = int((2 * n + 1 - math.sqrt((2 * n + 1) ** 2 - 8 * k)) / 2)
    while i * n - i * (i - 1) // 2 > k:
        i -= 1
    while (i + 1) * n - (i + 1) * i // 2 <= k:
        i += 1
    j = i + 1 + (k - (i * n - i * (i - 1) // 2))
    return i, j


def all_edges(n: int) -> np.ndarray:
    """All node pairs of K_{n+1} in lexicographic order, shape (d, 2)."""
    i, j = np.triu_indices(n + 1, k=1)
    return np.column_stack([i, j])


def complete_incidence(n: int, drop_slack: bool = False) -> np.ndarray:
    """Edge-node incidence matrix of K_{n+1}.

    Row k carries +1 at the smaller node of edge_pair(k) and -1 at the larger.
    With drop_slack the column of node 0 is removed, giving a (d, n) matrix.
    """
    edges = all_edges(n)
    d = edges.shape[0]
    inc = np.zeros((d, n + 1), dtype=np.int64)
    rows = np.arange(d)
    inc[rows, edges[:, 0]] = 1
    inc[rows, edges[:, 1]] = -1
    return inc[:, 1:] if drop_slack else inc


def laplacian_from_weights(w: np.ndarray, drop_slack: bool = False) -> np.ndarray:
    """Weighted Laplacian sum_k w_k (e_i - e_j)(e_i - e_j)^T over K_{n+1} edges.

    Equals C~^T diag(w) C~ for the complete-graph incidence C~.  Row sums are
    zero for the non-reduced matrix; drop_slack removes row/column 0.
    """
    w = np.asarray(w, dtype=float)
    n = num_nodes(w.shape[0])
    i, j = all_edges(n).T
    lap = np.zeros((n + 1, n + 1))
    lap[i, j] = -w
    lap[j, i] = -w
    np.add.at(lap, (i, i), w)
    np.add.at(lap, (j, j), w)
    return lap[1:, 1:] if drop_slack else lap


def algebraic_connectivity(lap: np.ndarray) -> float:
    """Second-smallest eigenvalue of a (non-reduced) symmetric Laplacian."""
    lap = np.asarray(lap, dtype=float)
    scale = max(np.abs(lap).max(), 1.0)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {lap.shape}")
    if np.abs(lap - lap.T).max() > 1e-10 * scale:
        raise ValueError("Laplacian must be symmetric")
    return float(np.linalg.eigvalsh(lap)[1])


def is_radial(
    w: np.ndarray,
    tol_zero: float = DEFAULT_ZERO_TOL,
    tol_lambda: float = DEFAULT_LAMBDA_TOL,
) -> bool:
    """Whether w encodes a spanning tree: n-sparse support, connected graph.

    Entries at or below tol_zero in magnitude are treated as absent lines; the
    connectivity check runs on the support-restricted Laplacian.
    """
    if tol_zero <= 0 or tol_lambda <= 0:
        raise ValueError("tolerances must be positive")
    w = np.asarray(w, dtype=float)
    n = num_nodes(w.shape[0])
    support = np.abs(w) > tol_zero
    if int(support.sum()) != n:
        return False
    return algebraic_connectivity(laplacian_from_weights(np.where(support, w, 0.0))) > tol_lambda


@dataclass(frozen=True)
class TreeTopology:
    """Rooted spanning tree over nodes 0..n; parent[v-1] is the parent of node v.

    Edge order throughout the package is the depth-first preorder of the
    non-slack endpoint (children visited in ascending label order), which makes
    the reduced incidence matrix and its inverse lower triangular.
    """

    parent: tuple[int, ...]

    def __post_init__(self):
        n = len(self.parent)
        if n < 1:
            raise TopologyError("tree needs at least one non-slack node")
        for v, p in enumerate(self.parent, start=1):
            if not 0 <= p <= n or p == v:
                raise TopologyError(f"node {v} has invalid parent {p}")
        # every node must reach the slack without revisiting
        for v in range(1, n + 1):
            seen = set()
            node = v
            while node != 0:
                if node in seen:
                    raise TopologyError(f"parent pointers of node {v} form a cycle")
                seen.add(node)
                node = self.parent[node - 1]

    @property
    def n(self) -> int:
        return len(self.parent)

    @cached_property
    def children(self) -> dict[int, tuple[int, ...]]:
        kids: dict[int, list[int]] = {v: [] for v in range(self.n + 1)}
        for v, p in enumerate(self.parent, start=1):
            kids[p].append(v)
        return {v: tuple(sorted(c)) for v, c in kids.items()}

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        """Non-slack nodes in depth-first preorder from the slack."""
        order: list[int] = []
        stack = list(reversed(self.children[0]))
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        return tuple(order)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Tree edges as sorted node pairs, one per non-slack node in preorder."""
        out = []
        for v in self.preorder:
            p = self.parent[v - 1]
            out.append((min(p, v), max(p, v)))
        return tuple(out)

    def edge_indices(self) -> np.ndarray:
        """Linear edge indices of the tree edges, aligned with self.edges."""
        return np.array([edge_index(i, j, self.n) for i, j in self.edges], dtype=np.int64)

    @classmethod
    def from_edges(cls, edges, n: int) -> "TreeTopology":
        """Build a tree rooted at the slack from an unordered edge list."""
        edges = [tuple(e) for e in edges]
        if len(edges) != n:
            raise TopologyError(f"spanning tree over {n + 1} nodes needs {n} edges, got {len(edges)}")
        adj: dict[int, list[int]] = {v: [] for v in range(n + 1)}
        for a, b in edges:
            if not (0 <= a <= n and 0 <= b <= n and a != b):
                raise TopologyError(f"edge ({a}, {b}) is not a valid node pair for n={n}")
            adj[a].append(b)
            adj[b].append(a)
        parent = [-1] * n
        seen = {0}
        queue = [0]
        while queue:
            u = queue.pop(0)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    parent[v - 1] = u
                    queue.append(v)
        if len(seen) != n + 1:
            missing = min(set(range(n + 1)) - seen)
            raise TopologyError(f"edge set does not connect node {missing} to the slack")
        return cls(parent=tuple(parent))


def tree_incidence(tree: TreeTopology) -> np.ndarray:
    """Reduced branch-to-node incidence matrix C (slack column removed).

    Rows and columns both follow tree.preorder; row k is the edge into the
    k-th preorder node, with +1 at its parent and -1 at the node itself, so C
    is lower triangular with -1 on the diagonal and det(C) = (-1)^n.
    """
    n = tree.n
    pos = {v: idx for idx, v in enumerate(tree.preorder)}
    inc = np.zeros((n, n), dtype=np.int64)
    for k, v in enumerate(tree.preorder):
        inc[k, pos[v]] = -1
        p = tree.parent[v - 1]
        if p != 0:
            inc[k, pos[p]] = 1
    return inc


def tree_incidence_inverse(tree: TreeTopology) -> np.ndarray:
    """Exact integer inverse of tree_incidence, built from descendant sets.

    Entry (i, j) is -1 iff preorder node i equals preorder node j or lies in
    its subtree, else 0; no numeric inversion is involved.
    """
    n = tree.n
    pos = {v: idx for idx, v in enumerate(tree.preorder)}
    inv = np.zeros((n, n), dtype=np.int64)
    for j, v in enumerate(tree.preorder):
        stack = [v]
        while stack:
            u = stack.pop()
            inv[pos[u], j] = -1
            stack.extend(tree.children[u])
    return inv


def _decode_pruefer(seq: np.ndarray, n: int) -> list[tuple[int, int]]:
    degree = np.ones(n + 1, dtype=np.int64)
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((int(leaf), int(x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, int(x))
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((int(u), int(v)))
    return edges


def random_spanning_tree(n: int, rng_seed: int) -> TreeTopology:
    """Uniformly random labelled spanning tree of K_{n+1}, rooted at the slack.

    Sampled through a uniform Pruefer sequence, so each of the (n+1)^(n-1)
    labelled trees is equally likely; deterministic for a fixed seed.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n == 1:
        return TreeTopology(parent=(0,))
    rng = np.random.default_rng(rng_seed)
    seq = rng.integers(0, n + 1, size=n - 1)
    return TreeTopology.from_edges(_decode_pruefer(seq, n), n)


def max_weight_spanning_tree(scores: np.ndarray) -> TreeTopology:
    """Maximum-total-score spanning tree by greedy selection with cycle rejection.

    Ties broken toward the lower linear edge index, so the output is a
    deterministic function of the score vector.
    """
    scores = np.asarray(scores, dtype=float)
    n = num_nodes(scores.shape[0])
    order = np.lexsort((np.arange(scores.shape[0]), -scores))
    root = list(range(n + 1))

    def find(a: int) -> int:
        while root[a] != a:
            root[a] = root[root[a]]
            a = root[a]
        return a

    chosen = []
    for k in order:
        i, j = edge_pair(int(k), n)
        ri, rj = find(i), find(j)
        if ri != rj:
            root[ri] = rj
            chosen.append((i, j))
            if len(chosen) == n:
                break
    return TreeTopology.from_edges(chosen, n)
