"""
Interaction graph with positive couplings
Generators, connectivity checks and the removable-vertex pair of a connected graph
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import (
    DisconnectedGraph, DuplicateEdge, IndexOutOfRange, InternalInvariantViolation,
    InvalidParameter, NonPositiveCoupling, SelfLoop, TooFewVertices,
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, int, float]

GRAPH_KINDS = ("chain", "ring", "grid", "complete", "star", "random_connected")


@dataclass(frozen=True)
class CouplingGraph:
    """Connected graph on vertices 0..N-1 with a positive coupling on every edge.

    Edges are canonical ``(i, j, J)`` with ``i < j``, sorted by ``(i, j)``.
    Use :func:`build` to construct a validated instance.
    """

    vertex_count: int
    edges: Tuple[Edge, ...]

    @classmethod
    def unchecked(cls, vertex_count: int, edges: Iterable[Sequence]) -> "CouplingGraph":
        """Canonicalize edges without validation. Negative controls only."""
        canonical = sorted((min(int(i), int(j)), max(int(i), int(j)), float(J)) for i, j, J in edges)
        return cls(int(vertex_count), tuple(canonical))

    @property
    def n(self) -> int:
        return self.vertex_count

    def adjacency(self) -> List[List[int]]:
        neighbors: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for i, j, _ in self.edges:
            neighbors[i].append(j)
            neighbors[j].append(i)
        return neighbors

    def has_edge(self, i: int, j: int) -> bool:
        a, b = min(i, j), max(i, j)
        return any(e[0] == a and e[1] == b for e in self.edges)

    @property
    def total_coupling(self) -> float:
        return float(sum(J for _, _, J in self.edges))

    @property
    def min_coupling(self) -> float:
        return float(min(J for _, _, J in self.edges))

    def distinct_couplings(self) -> List[float]:
        return sorted({J for _, _, J in self.edges})

    def summary(self) -> Dict:
        return {
            "n": self.vertex_count,
            "edges": [[i, j, J] for i, j, J in self.edges],
        }


def build(vertex_count: int, edges: Iterable[Sequence]) -> CouplingGraph:
    """Validate an edge list and return a CouplingGraph.

    Raises TooFewVertices, SelfLoop, IndexOutOfRange, DuplicateEdge,
    NonPositiveCoupling or DisconnectedGraph.
    """
    if isinstance(vertex_count, bool) or int(vertex_count) != vertex_count:
        raise InvalidParameter(f"Vertex count must be an integer, got {vertex_count!r}")
    vertex_count = int(vertex_count)
    if vertex_count < 2:
        raise TooFewVertices(f"Need at least 2 vertices, got {vertex_count}")

    edge_list = list(edges)
    if not edge_list:
        raise DisconnectedGraph(f"Edge list is empty for {vertex_count} vertices")

    seen = set()
    canonical: List[Edge] = []
    for edge in edge_list:
        if len(edge) != 3:
            raise InvalidParameter(f"Edge must be (i, j, J), got {edge!r}")
        i, j, J = int(edge[0]), int(edge[1]), float(edge[2])
        if i == j:
            raise SelfLoop(f"Self-loop at vertex {i}")
        for v in (i, j):
            if not 0 <= v < vertex_count:
                raise IndexOutOfRange(f"Vertex {v} outside 0..{vertex_count - 1}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f"Duplicate edge {key}")
        if not (np.isfinite(J) and J > 0):
            raise NonPositiveCoupling(f"Coupling J{key} = {J} must be strictly positive")
        seen.add(key)
        canonical.append((key[0], key[1], J))

    graph = CouplingGraph(vertex_count, tuple(sorted(canonical)))
    components = connected_components(graph)
    if len(components) > 1:
        raise DisconnectedGraph(
            f"Graph on {vertex_count} vertices has {len(components)} components: "
            + ", ".join(str(sorted(c)) for c in components)
        )
    logger.debug("Built graph with N=%d, |E|=%d", vertex_count, len(canonical))
    return graph


def connected_components(graph: CouplingGraph, removed: Optional[int] = None) -> List[List[int]]:
    """Components by breadth-first search, optionally with one vertex deleted."""
    neighbors = graph.adjacency()
    seen = [False] * graph.vertex_count
    if removed is not None:
        seen[removed] = True

    components = []
    for start in range(graph.vertex_count):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        component = []
        while queue:
            v = queue.popleft()
            component.append(v)
            for w in neighbors[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        components.append(component)
    return components


def is_connected_without(graph: CouplingGraph, vertex: int) -> bool:
    """True iff deleting ``vertex`` and its edges leaves a connected graph."""
    if not 0 <= vertex < graph.vertex_count:
        raise IndexOutOfRange(f"Vertex {vertex} outside 0..{graph.vertex_count - 1}")
    return len(connected_components(graph, removed=vertex)) <= 1


def removable_vertices(graph: CouplingGraph) -> List[int]:
    """Every vertex whose single removal keeps the graph connected (brute force)."""
    return [v for v in range(graph.vertex_count) if is_connected_without(graph, v)]


def _spanning_tree_leaves(graph: CouplingGraph) -> List[int]:
    # Iterative depth-first spanning tree rooted at 0
    neighbors = graph.adjacency()
    tree_degree = [0] * graph.vertex_count
    visited = [False] * graph.vertex_count
    visited[0] = True
    stack = [(0, iter(neighbors[0]))]
    while stack:
        v, it = stack[-1]
        for w in it:
            if not visited[w]:
                visited[w] = True
                tree_degree[v] += 1
                tree_degree[w] += 1
                stack.append((w, iter(neighbors[w])))
                break
        else:
            stack.pop()

    if not all(visited):
        raise DisconnectedGraph("Spanning tree does not reach every vertex")
    return [v for v in range(graph.vertex_count) if tree_degree[v] == 1]


def find_removable_pair(graph: CouplingGraph) -> Tuple[int, int]:
    """Two distinct vertices, each removable without disconnecting the graph.

    Leaves of a spanning tree are never cut vertices, and every tree on at
    least two vertices has at least two leaves.
    """
    if graph.vertex_count == 2:
        pair = (0, 1)
    else:
        leaves = _spanning_tree_leaves(graph)
        if len(leaves) < 2:
            raise InternalInvariantViolation(f"Spanning tree has leaves {leaves}")
        pair = (leaves[0], leaves[1])

    for v in pair:
        if not is_connected_without(graph, v):
            raise InternalInvariantViolation(f"Vertex {v} of pair {pair} is a cut vertex")
    return pair


def removable_pair_by_induction(graph: CouplingGraph) -> Tuple[int, int]:
    """Removable pair built by the inductive case analysis on vertex count.

    Remove the smallest vertex; if the rest stays connected, recurse and pick a
    partner by how the removed vertex attaches to the recursive pair, otherwise
    take one safely removable vertex from each of two components.
    """
    neighbors = [set(adj) for adj in graph.adjacency()]

    def components_of(vertices: frozenset) -> List[frozenset]:
        remaining = set(vertices)
        parts = []
        while remaining:
            start = remaining.pop()
            part = {start}
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for w in neighbors[v] & remaining:
                    remaining.discard(w)
                    part.add(w)
                    queue.append(w)
            parts.append(frozenset(part))
        return parts

    def pair_of(vertices: frozenset) -> Tuple[int, int]:
        if len(vertices) <= 3:
            # Small cases by direct check
            candidates = [v for v in sorted(vertices)
                          if len(vertices) == 2 or len(components_of(vertices - {v})) == 1]
            return candidates[0], candidates[1]

        first = min(vertices)
        rest = vertices - {first}
        parts = components_of(rest)
        if len(parts) == 1:
            i1, j1 = pair_of(rest)
            attached_i, attached_j = i1 in neighbors[first], j1 in neighbors[first]
            if attached_i and attached_j:
                return first, i1
            if attached_i:
                return first, j1
            if attached_j:
                return first, i1
            return i1, j1

        chosen = []
        for part in parts[:2]:
            if len(part) == 1:
                chosen.append(next(iter(part)))
                continue
            a, b = pair_of(part)
            # Keep the link to `first`: drop a only if first still sees part - {a}
            chosen.append(a if neighbors[first] & (part - {a}) else b)
        return chosen[0], chosen[1]

    i, j = pair_of(frozenset(range(graph.vertex_count)))
    return min(i, j), max(i, j)


class CouplingRule:
    """Uniform coupling J, or seeded random couplings uniform in (lo, hi]."""

    def __init__(self, kind: str = "uniform", value: float = 1.0,
                 low: float = 0.0, high: float = 2.0, seed: int = 0):
        if kind not in ("uniform", "random"):
            raise InvalidParameter(f"Unknown coupling rule: {kind}")
        if kind == "uniform" and not value > 0:
            raise InvalidParameter(f"Uniform coupling must be positive, got {value}")
        if kind == "random" and not (0 <= low < high):
            raise InvalidParameter(f"Random coupling range needs 0 <= lo < hi, got ({low}, {high}]")
        self.kind = kind
        self.value = float(value)
        self.low = float(low)
        self.high = float(high)
        self.seed = int(seed)

    @classmethod
    def uniform(cls, value: float = 1.0) -> "CouplingRule":
        return cls("uniform", value=value)

    @classmethod
    def random(cls, low: float, high: float, seed: int = 0) -> "CouplingRule":
        return cls("random", low=low, high=high, seed=seed)

    def couplings(self, count: int) -> List[float]:
        if self.kind == "uniform":
            return [self.value] * count
        rng = np.random.default_rng(self.seed)
        # 1 - U[0,1) lies in (0, 1], so values land in (lo, hi]
        return list(self.low + (self.high - self.low) * (1.0 - rng.random(count)))

    def __eq__(self, other):
        return isinstance(other, CouplingRule) and vars(self) == vars(other)

    def __repr__(self):
        if self.kind == "uniform":
            return f"CouplingRule.uniform({self.value})"
        return f"CouplingRule.random({self.low}, {self.high}, seed={self.seed})"


def _require(condition: bool, message: str):
    if not condition:
        raise InvalidParameter(message)


def generate(kind: str, vertex_count: int = 0, coupling: Optional[CouplingRule] = None,
             rows: int = 0, cols: int = 0, seed: int = 0, edge_prob: float = 0.5) -> CouplingGraph:
    """Generate a standard connected instance.

    ``grid`` takes ``rows`` and ``cols`` (vertex_count is then rows*cols);
    ``random_connected`` lays a seeded random spanning tree and adds every
    other pair with probability ``edge_prob``.
    """
    coupling = coupling or CouplingRule.uniform(1.0)
    if kind not in GRAPH_KINDS:
        raise InvalidParameter(f"Unknown graph kind '{kind}'. Supported: {', '.join(GRAPH_KINDS)}")

    n = vertex_count
    if kind == "grid":
        _require(rows >= 1 and cols >= 1 and rows * cols >= 2, f"Grid {rows}x{cols} needs at least 2 sites")
        n = rows * cols
        pairs = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    pairs.append((v, v + 1))
                if r + 1 < rows:
                    pairs.append((v, v + cols))
    else:
        _require(n >= 2, f"{kind} needs at least 2 vertices, got {n}")
        if kind == "chain":
            pairs = [(v, v + 1) for v in range(n - 1)]
        elif kind == "ring":
            _require(n >= 3, f"ring needs at least 3 vertices, got {n}")
            pairs = [(v, v + 1) for v in range(n - 1)] + [(0, n - 1)]
        elif kind == "complete":
            pairs = list(itertools.combinations(range(n), 2))
        elif kind == "star":
            pairs = [(0, v) for v in range(1, n)]
        else:
            _require(0.0 <= edge_prob <= 1.0, f"edge_prob must lie in [0, 1], got {edge_prob}")
            pairs = _random_connected_pairs(n, seed, edge_prob)

    pairs = sorted((min(a, b), max(a, b)) for a, b in pairs)
    weights = coupling.couplings(len(pairs))
    graph = build(n, [(a, b, J) for (a, b), J in zip(pairs, weights)])
    logger.info("Generated %s graph: N=%d, |E|=%d", kind, graph.vertex_count, len(graph.edges))
    return graph


def _random_connected_pairs(n: int, seed: int, edge_prob: float) -> List[Tuple[int, int]]:
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    tree = set()
    for position in range(1, n):
        parent = order[rng.integers(0, position)]
        child = order[position]
        tree.add((int(min(parent, child)), int(max(parent, child))))

    pairs = set(tree)
    for a, b in itertools.combinations(range(n), 2):
        if (a, b) not in tree and rng.random() < edge_prob:
            pairs.add((a, b))
    return sorted(pairs)


def enumerate_connected_graphs(vertex_count: int) -> Iterator[CouplingGraph]:
    """Every labeled connected graph on ``vertex_count`` vertices, unit couplings.

    Walks all 2^(N(N-1)/2) edge subsets of the complete graph.
    """
    _require(2 <= vertex_count <= 7, f"Exhaustive enumeration supports 2..7 vertices, got {vertex_count}")
    all_pairs = list(itertools.combinations(range(vertex_count), 2))
    full = (1 << vertex_count) - 1
    for subset in range(1, 1 << len(all_pairs)):
        chosen = [all_pairs[e] for e in range(len(all_pairs)) if subset >> e & 1]
        # Cheap bitmask reachability before paying for validation
        adjacency = [0] * vertex_count
        for a, b in chosen:
            adjacency[a] |= 1 << b
            adjacency[b] |= 1 << a
        reached, frontier = 1, 1
        while frontier:
            grown = reached
            for v in range(vertex_count):
                if frontier >> v & 1:
                    grown |= adjacency[v]
            frontier = grown & ~reached
            reached = grown
        if reached == full:
            yield CouplingGraph(vertex_count, tuple((a, b, 1.0) for a, b in chosen))
