"""Knödel graphs KG_n and their fixed-degree generalisation.

Vertices are 0..n-1; x and y are adjacent when x + y = 2**t - 1 (mod n) for
some 1 <= t <= degree. Adjacency is kept as per-vertex bitmasks for desk-scale
n and computed from the closed form otherwise.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, List, Optional, TextIO, Tuple

import networkx as nx
import numpy as np

from kgdom.config import SolverConfig
from kgdom.errors import GraphError
from kgdom.numtheory import floor_log2

logger = logging.getLogger(__name__)

DEFAULT_DENSE_MAX_N = SolverConfig.dense_max_n


def _full_mask(n: int) -> int:
    return (1 << n) - 1


def even_mask(n: int) -> int:
    """Bits 0, 2, 4, ... below n."""
    return _full_mask(n + (n & 1)) // 3 & _full_mask(n)


@dataclass(frozen=True)
class VertexSet:
    """Immutable vertex subset of {0..n-1} stored as a bitmask."""
    n: int
    bits: int
    size: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.n:
            raise GraphError(f"vertex set has members outside 0..{self.n - 1}")
        object.__setattr__(self, 'size', self.bits.bit_count())

    @classmethod
    def empty(cls, n: int) -> "VertexSet":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls(n, _full_mask(n))

    @classmethod
    def from_vertices(cls, n: int, vertices: Iterable[int]) -> "VertexSet":
        bits = 0
        for v in vertices:
            v = int(v)
            if not 0 <= v < n:
                raise GraphError(f"vertex {v} out of range 0..{n - 1}")
            bits |= 1 << v
        return cls(n, bits)

    @classmethod
    def from_array(cls, n: int, vertices: np.ndarray) -> "VertexSet":
        vertices = np.asarray(vertices, dtype=np.int64)
        if vertices.size and (vertices.min() < 0 or vertices.max() >= n):
            raise GraphError(f"vertex array has members outside 0..{n - 1}")
        mask = np.zeros(n, dtype=bool)
        mask[vertices] = True
        packed = np.packbits(mask, bitorder='little').tobytes()
        return cls(n, int.from_bytes(packed, 'little'))

    def to_mask(self) -> np.ndarray:
        nbytes = max(1, (self.n + 7) // 8)
        raw = np.frombuffer(self.bits.to_bytes(nbytes, 'little'), dtype=np.uint8)
        return np.unpackbits(raw, bitorder='little')[:self.n].astype(bool)

    def to_array(self) -> np.ndarray:
        return np.flatnonzero(self.to_mask()).astype(np.int64)

    def vertices(self) -> List[int]:
        return self.to_array().tolist()

    def parity_split(self) -> Tuple[int, int]:
        evens = (self.bits & even_mask(self.n)).bit_count()
        return evens, self.size - evens

    def _check_same_space(self, other: "VertexSet"):
        if self.n != other.n:
            raise GraphError(f"vertex spaces differ: {self.n} != {other.n}")

    def __or__(self, other: "VertexSet") -> "VertexSet":
        self._check_same_space(other)
        return VertexSet(self.n, self.bits | other.bits)

    def __and__(self, other: "VertexSet") -> "VertexSet":
        self._check_same_space(other)
        return VertexSet(self.n, self.bits & other.bits)

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        self._check_same_space(other)
        return VertexSet(self.n, self.bits & ~other.bits)

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.n and bool(self.bits >> v & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices())

    def __len__(self) -> int:
        return self.size


@dataclass(frozen=True)
class StructureReport:
    regular: bool
    symmetric: bool
    irreflexive: bool
    parity_bipartite: bool

    @property
    def ok(self) -> bool:
        return self.regular and self.symmetric and self.irreflexive and self.parity_bipartite


class KnodelGraph:
    """The (generalised) Knödel graph on n vertices with the given degree."""

    # vertex-transitive (see automorphism_to_root), so the search may put 0 in D
    symmetry_fixes_root = True
    bipartite_regular = True

    def __init__(self, n: int, degree: int, dense_max_n: int = DEFAULT_DENSE_MAX_N):
        self.n = n
        self.degree = degree
        self.dense_max_n = dense_max_n
        self.offsets: Tuple[int, ...] = tuple((2 ** t - 1) % n for t in range(1, degree + 1))

        # 檢查鄰居是否重複或自環
        if len(set(self.offsets)) != degree:
            raise GraphError(f"offsets 2^t-1 mod {n} collide for t <= {degree}: {self.offsets}")
        if any(c % 2 == 0 for c in self.offsets):
            raise GraphError(f"even offset mod {n} would create a self-loop: {self.offsets}")

    def __repr__(self) -> str:
        return f"KnodelGraph(n={self.n}, degree={self.degree})"

    @property
    def is_dense(self) -> bool:
        return self.n <= self.dense_max_n

    def _check_vertex(self, v: int):
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range 0..{self.n - 1}")

    def neighbor(self, x: int, t: int) -> int:
        """The neighbour of x contributed by parameter t."""
        self._check_vertex(x)
        if not 1 <= t <= self.degree:
            raise GraphError(f"t={t} outside 1..{self.degree}")
        return (self.offsets[t - 1] - x) % self.n

    def neighbor_list(self, v: int) -> List[int]:
        self._check_vertex(v)
        return [(c - v) % self.n for c in self.offsets]

    def neighbors_closed_form(self, v: int) -> VertexSet:
        return VertexSet.from_vertices(self.n, self.neighbor_list(v))

    def neighbors(self, v: int) -> VertexSet:
        self._check_vertex(v)
        if self.is_dense:
            return VertexSet(self.n, self.rows[v])
        return self.neighbors_closed_form(v)

    @cached_property
    def neighbor_table(self) -> np.ndarray:
        """Array of shape (n, degree); column t-1 holds the t-neighbours."""
        x = np.arange(self.n, dtype=np.int64)
        return np.stack([(c - x) % self.n for c in self.offsets], axis=1)

    @cached_property
    def rows(self) -> Tuple[int, ...]:
        if not self.is_dense:
            raise GraphError(f"n={self.n} above dense_max_n={self.dense_max_n}; use the closed form")
        rows = []
        for x in range(self.n):
            row = 0
            for c in self.offsets:
                row |= 1 << ((c - x) % self.n)
            rows.append(row)
        return tuple(rows)

    def closed_neighborhoods(self) -> List[int]:
        return [row | (1 << v) for v, row in enumerate(self.rows)]

    def dominator_counts(self, d: VertexSet) -> np.ndarray:
        """For each vertex, how many members of d are adjacent to it."""
        members = d.to_array()
        if members.size == 0:
            return np.zeros(self.n, dtype=np.int64)
        hits = np.concatenate([(c - members) % self.n for c in self.offsets])
        return np.bincount(hits, minlength=self.n)

    def edges(self) -> List[Tuple[int, int]]:
        result = []
        for u in range(self.n):
            for c in self.offsets:
                v = (c - u) % self.n
                if u < v:
                    result.append((u, v))
        result.sort()
        return result


def build(n: int, degree: Optional[int] = None,
          dense_max_n: int = DEFAULT_DENSE_MAX_N) -> KnodelGraph:
    """Construct KG_n, or its generalisation with t restricted to 1..degree."""
    if n % 2 != 0:
        raise GraphError(f"n must be even, got {n}")
    if n < 6:
        raise GraphError(f"n must be >= 6, got {n}")
    max_degree = floor_log2(n)
    if degree is None:
        degree = max_degree
    if not 1 <= degree <= max_degree:
        raise GraphError(f"degree must lie in 1..{max_degree} for n={n}, got {degree}")
    g = KnodelGraph(n, degree, dense_max_n=dense_max_n)
    logger.debug(f"built {g}, offsets={g.offsets}")
    return g


def neighbors(g: KnodelGraph, v: int) -> VertexSet:
    return g.neighbors(v)


def parity_bipartition(g: KnodelGraph) -> Tuple[VertexSet, VertexSet]:
    evens = even_mask(g.n)
    return VertexSet(g.n, evens), VertexSet(g.n, evens << 1 & _full_mask(g.n))


def parity_automorphism(g: KnodelGraph, s: int, swap: bool = False) -> List[int]:
    """Permutation sending even x to x+s and odd x to x-s (s even).

    With swap the image is further sent to image ^ 1, exchanging the sides.
    """
    if s % 2 != 0:
        raise GraphError(f"shift must be even, got {s}")
    perm = [(x + s) % g.n if x % 2 == 0 else (x - s) % g.n for x in range(g.n)]
    if swap:
        perm = [y ^ 1 for y in perm]
    return perm


def automorphism_to_root(g: KnodelGraph, v: int) -> List[int]:
    """An automorphism of g sending v to 0."""
    g._check_vertex(v)
    if v % 2 == 0:
        return parity_automorphism(g, -v % g.n)
    return parity_automorphism(g, (v - 1) % g.n, swap=True)


def check_structure(g: KnodelGraph) -> StructureReport:
    """Exhaustive regularity, symmetry, loop and parity check."""
    table = g.neighbor_table
    x = np.arange(g.n, dtype=np.int64)[:, None]
    regular = bool((np.diff(np.sort(table, axis=1), axis=1) != 0).all())
    irreflexive = bool((table != x).all())
    # 每個 t 的鄰居關係是對合
    symmetric = all(
        bool((table[table[:, j], j] == x[:, 0]).all()) for j in range(g.degree)
    )
    parity_bipartite = bool(((table + x) % 2 == 1).all())
    return StructureReport(regular, symmetric, irreflexive, parity_bipartite)


class EdgeListGraph:
    """A plain graph read from an edge list, for cross-validation runs."""

    symmetry_fixes_root = False
    bipartite_regular = False

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]]):
        self.n = n
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise GraphError(f"bad edge ({u}, {v}) for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        self.rows: Tuple[int, ...] = tuple(rows)
        self.degree = max((r.bit_count() for r in rows), default=0)

    def __repr__(self) -> str:
        return f"EdgeListGraph(n={self.n}, max_degree={self.degree})"

    def neighbors(self, v: int) -> VertexSet:
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range 0..{self.n - 1}")
        return VertexSet(self.n, self.rows[v])

    def closed_neighborhoods(self) -> List[int]:
        return [row | (1 << v) for v, row in enumerate(self.rows)]

    def dominator_counts(self, d: VertexSet) -> np.ndarray:
        return np.array([(row & d.bits).bit_count() for row in self.rows], dtype=np.int64)

    def edges(self) -> List[Tuple[int, int]]:
        result = []
        for u, row in enumerate(self.rows):
            for v in range(u + 1, self.n):
                if row >> v & 1:
                    result.append((u, v))
        return result


def write_edge_list(g, fh: TextIO):
    """One 'u v' pair per line, ascending, after a comment header."""
    fh.write(f"# kgdom edge-list n={g.n} degree={g.degree}\n")
    for u, v in g.edges():
        fh.write(f"{u} {v}\n")


def read_edge_list(fh: TextIO) -> EdgeListGraph:
    n = None
    edges = []
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith('#'):
            for token in line[1:].split():
                if token.startswith('n='):
                    n = int(token[2:])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v', got {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return EdgeListGraph(n, edges)


def to_networkx(g) -> nx.Graph:
    graph = nx.Graph(name=repr(g))
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from(g.edges())
    return graph


def write_graph_exchange(g, path: str, fmt: str = "graphml"):
    graph = to_networkx(g)
    if fmt == "graphml":
        nx.write_graphml(graph, path)
    elif fmt == "adjlist":
        nx.write_adjlist(graph, path)
    else:
        raise GraphError(f"unknown graph exchange format: {fmt}")
