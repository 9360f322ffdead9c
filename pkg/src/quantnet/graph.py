"""Undirected graphs, Laplacians, and symmetric-spectrum utilities.

Every other part of the library consumes graphs through this module: the
solver needs adjacency structure, and the parameter calculus needs the
Laplacian's algebraic connectivity (second-smallest eigenvalue), its largest
eigenvalue, and the maximum node degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Graph",
    "LaplacianSummary",
    "build_laplacian",
    "generate_graph",
    "sym_eig_extremes",
    "jacobi_eigenvalues",
    "parse_graph",
    "format_graph",
    "load_graph",
    "save_graph",
]

# Above this dimension the cyclic-Jacobi sweep is needlessly slow and we
# defer to LAPACK; the Jacobi path stays the default at small sizes so the
# library carries its own self-contained eigensolver for the common cases.
_JACOBI_MAX_DIM = 64


@dataclass(frozen=True)
class Graph:
    """Undirected, simple, connected-checked graph on nodes 1..N."""

    node_count: int
    edges: frozenset  # frozenset of (i, j) tuples with i < j, 1-based
    retries: int = 0  # seed increments needed by the random generator

    def __post_init__(self):
        if self.node_count < 2:
            raise ValueError("graph needs at least 2 nodes")
        for (i, j) in self.edges:
            if i == j:
                raise ValueError(f"self-loop ({i},{j}) not allowed")
            if not (1 <= i < j <= self.node_count):
                raise ValueError(f"edge ({i},{j}) out of range or unordered")

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.node_count, self.node_count))
        for (i, j) in self.edges:
            a[i - 1, j - 1] = 1.0
            a[j - 1, i - 1] = 1.0
        return a

    def degrees(self) -> np.ndarray:
        d = np.zeros(self.node_count, dtype=int)
        for (i, j) in self.edges:
            d[i - 1] += 1
            d[j - 1] += 1
        return d

    def neighbors(self, i: int) -> list:
        """Sorted 1-based neighbor list of node i."""
        out = []
        for (a, b) in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)

    def is_connected(self) -> bool:
        return _bfs_connected(self.node_count, self.edges)


@dataclass(frozen=True)
class LaplacianSummary:
    """Laplacian matrix with the spectral quantities used downstream."""

    L: np.ndarray
    lambda2: float
    lambdaN: float
    dstar: int
    node_count: int = field(default=0)


def _bfs_connected(n: int, edges) -> bool:
    adj = {i: [] for i in range(1, n + 1)}
    for (i, j) in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {1}
    queue = [1]
    while queue:
        v = queue.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == n


def jacobi_eigenvalues(A: np.ndarray, tol_factor: float = 1e-13,
                       max_sweeps: int = 100) -> np.ndarray:
    """All eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Stops when the off-diagonal Frobenius norm drops below
    ``tol_factor * ||A||_F`` or after ``max_sweeps`` full sweeps.
    """
    a = np.array(A, dtype=float)
    n = a.shape[0]
    if n == 1:
        return a[0, :1].copy()
    norm_a = np.linalg.norm(a)
    if norm_a == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol_factor * norm_a:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol_factor * norm_a / (n * n):
                    continue
                # classical 2x2 symmetric Schur rotation
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
    return np.sort(np.diag(a))


def sym_eig_extremes(A: np.ndarray, method: str = "auto") -> tuple:
    """(smallest, largest) eigenvalue of a symmetric matrix.

    ``method`` is one of ``auto`` (Jacobi below dimension 64, LAPACK above),
    ``jacobi``, or ``lapack``. Raises if the input is measurably asymmetric.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("square matrix required")
    scale = np.abs(A).max()
    if scale > 0 and np.abs(A - A.T).max() > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    if method == "auto":
        method = "jacobi" if A.shape[0] <= _JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        vals = jacobi_eigenvalues(A)
    elif method == "lapack":
        vals = np.linalg.eigvalsh(A)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(vals[0]), float(vals[-1])


def build_laplacian(g: Graph) -> LaplacianSummary:
    """Laplacian L = degree matrix - adjacency, with spectral summary.

    Assembly happens in integer arithmetic so row sums are exactly zero.
    """
    if not g.is_connected():
        raise ValueError("graph not connected")
    n = g.node_count
    li = np.zeros((n, n), dtype=np.int64)
    for (i, j) in g.edges:
        li[i - 1, j - 1] -= 1
        li[j - 1, i - 1] -= 1
        li[i - 1, i - 1] += 1
        li[j - 1, j - 1] += 1
    L = li.astype(float)
    lam_min, lam_max = sym_eig_extremes(L)
    # algebraic connectivity: second-smallest; deflate the known null vector
    ones = np.ones((n, 1)) / np.sqrt(n)
    deflated = L + (lam_max + 1.0) * (ones @ ones.T)
    lam2, _ = sym_eig_extremes(deflated)
    return LaplacianSummary(L=L, lambda2=float(lam2), lambdaN=float(lam_max),
                            dstar=int(g.degrees().max()), node_count=n)


def generate_graph(kind: str, n: int, p: float = 0.5, seed: int = 0) -> Graph:
    """Deterministic graph generator.

    ``kind`` is one of ``cycle``, ``star``, ``complete``, ``erdos_renyi``.
    Erdős–Rényi draws each edge independently with probability ``p`` and
    retries with seed+1 (up to 10**4 attempts) until connected.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if kind == "cycle":
        edges = {(i, i + 1) for i in range(1, n)} | {(1, n)}
        if n == 2:
            edges = {(1, 2)}
        return Graph(n, frozenset(edges))
    if kind == "star":
        return Graph(n, frozenset((1, j) for j in range(2, n + 1)))
    if kind == "complete":
        return Graph(n, frozenset((i, j) for i in range(1, n + 1)
                                  for j in range(i + 1, n + 1)))
    if kind == "erdos_renyi":
        if not (0.0 < p <= 1.0):
            raise ValueError("p must be in (0, 1]")
        for attempt in range(10_000):
            rng = np.random.default_rng(seed + attempt)
            pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
            draws = rng.random(len(pairs))
            edges = frozenset(pair for pair, u in zip(pairs, draws) if u < p)
            if edges and _bfs_connected(n, edges):
                return Graph(n, edges, retries=attempt)
        raise RuntimeError("no connected graph found after 10000 attempts")
    raise ValueError(f"unknown graph kind {kind!r}")


def parse_graph(text: str) -> Graph:
    """Parse the graph text format: header ``N <count>``, then ``i j`` lines.

    Lines starting with '#' (and inline '#' suffixes) are comments.
    """
    n = None
    edges = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "N":
                raise ValueError(f"line {lineno}: expected header 'N <count>'")
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected edge 'i j'")
        i, j = int(parts[0]), int(parts[1])
        if i == j:
            raise ValueError(f"line {lineno}: self-loop")
        edges.add((min(i, j), max(i, j)))
    if n is None:
        raise ValueError("missing 'N <count>' header")
    return Graph(n, frozenset(edges))


def format_graph(g: Graph) -> str:
    lines = [f"N {g.node_count}"]
    lines += [f"{i} {j}" for (i, j) in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def save_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g))
