"""Graph representation and generators for the rumor propagation process.

This module holds the arena the process runs on: an undirected simple graph
on sites 0..n-1 with its edges stored in canonical order, so that two graphs
with the same edges compare equal and a uniform edge index means the same edge
everywhere. It provides:
1. Deterministic generators for the complete, star, ring and path families
2. A seeded Erdos-Renyi generator for test graphs
3. Reading and writing of the plain-text edge-list format
4. Connectivity checking (the process is only run on connected graphs)

Edge-list format:
    UTF-8 text, one edge per line as two base-10 site labels separated by
    whitespace. Lines starting with '#' are ignored. An optional first line
    'n <count>' fixes the site count; otherwise n = 1 + largest label.
"""
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional

import networkx as nx
import numpy as np

from .common.errors import EdgeListParseError, EmptyGraphError, InvalidSizeError
from .common.validators import validate_file, validate_min, validate_probability

# ASCII base-10 site label
_LABEL = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on sites 0..n-1.

    Edges are canonicalized on construction: every pair is stored as
    (min, max) and the list is sorted lexicographically. Graph values are
    immutable and safe to share between concurrent replications.

    Attributes:
        n: Number of sites
        edges: Canonical tuple of (u, v) pairs with u < v
        name: Free-form label used in reports (not part of equality)
    """

    n: int
    edges: tuple
    name: str = field(default="graph", compare=False)

    def __post_init__(self):
        validate_min(self.n, 2, "site count n")

        canonical = []
        seen = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidSizeError(f"self-loop at site {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidSizeError(f"edge ({u}, {v}) has an endpoint outside [0, {self.n})")
            pair = (min(u, v), max(u, v))
            if pair in seen:
                raise InvalidSizeError(f"duplicate edge {pair}")
            seen.add(pair)
            canonical.append(pair)

        if not canonical:
            raise EmptyGraphError("graph has no edges")

        object.__setattr__(self, "edges", tuple(sorted(canonical)))

    @cached_property
    def adjacency(self) -> tuple:
        """Per-site sorted neighbor tuples derived from the edge list."""
        neighbors: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            neighbors[u].append(v)
            neighbors[v].append(u)
        return tuple(tuple(sorted(row)) for row in neighbors)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Edges as an (|E|, 2) int64 array, row i being edge index i."""
        return np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def connected(self) -> bool:
        """True iff a traversal from site 0 reaches every site. Computed once per graph."""
        return len(nx.node_connected_component(self.to_networkx(), 0)) == self.n

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, site: int) -> int:
        return len(self.adjacency[site])

    def to_networkx(self) -> nx.Graph:
        """Return a networkx copy including isolated sites."""
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


def _from_networkx(g: nx.Graph, n: int, name: str) -> Graph:
    return Graph(n=n, edges=tuple(g.edges()), name=name)


def make_complete(n: int) -> Graph:
    """Build the complete graph K_n.

    Args:
        n: Number of sites, at least 2

    Returns:
        Graph with all n(n-1)/2 pairs in lexicographic order

    Raises:
        InvalidSizeError: If n < 2
    """
    validate_min(n, 2, "site count n")
    return _from_networkx(nx.complete_graph(n), n, f"complete-{n}")


def make_star(leaves: int) -> Graph:
    """Build the star with hub 0 and sites 1..leaves as leaves.

    Raises:
        InvalidSizeError: If leaves < 1
    """
    validate_min(leaves, 1, "leaves")
    return _from_networkx(nx.star_graph(leaves), leaves + 1, f"star-{leaves}")


def make_ring(n: int) -> Graph:
    """Build the cycle 0-1-...-(n-1)-0.

    Raises:
        InvalidSizeError: If n < 3
    """
    validate_min(n, 3, "site count n")
    return _from_networkx(nx.cycle_graph(n), n, f"ring-{n}")


def make_path(n: int) -> Graph:
    """Build the path 0-1-...-(n-1).

    Raises:
        InvalidSizeError: If n < 2
    """
    validate_min(n, 2, "site count n")
    return _from_networkx(nx.path_graph(n), n, f"path-{n}")


def make_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """Build a G(n, p) random graph, deterministic for fixed (n, p, seed).

    Each unordered pair is included independently with probability p. The
    result may be disconnected; callers that need to run the process on it
    should check is_connected first.

    Args:
        n: Number of sites, at least 2
        p: Edge probability in (0, 1]
        seed: Seed for the generator

    Raises:
        InvalidSizeError: If n < 2 or p is outside (0, 1]
        EmptyGraphError: If no pair was selected
    """
    validate_min(n, 2, "site count n")
    validate_probability(p)
    g = nx.gnp_random_graph(n, p, seed=seed)
    if g.number_of_edges() == 0:
        raise EmptyGraphError(f"G({n}, {p}) with seed {seed} has no edges")
    return _from_networkx(g, n, f"er-{n}-{p}-{seed}")


def is_connected(g: Graph) -> bool:
    """Return True iff a traversal from site 0 reaches every site."""
    return g.connected


def from_edge_list(text: str, name: Optional[str] = None) -> Graph:
    """Parse an edge-list document into a Graph.

    Args:
        text: Edge-list document (see module docstring for the format)
        name: Optional label for reports

    Returns:
        Graph with the listed edges

    Raises:
        EdgeListParseError: On a malformed line, a self-loop, a duplicate
                            edge, or a header smaller than the labels used.
                            The error names the 1-based line number.
        EmptyGraphError: If the document lists no edges
    """
    header_n = None
    header_line = 0
    edges: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    content_seen = False

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()

        if not content_seen and parts[0] == "n":
            content_seen = True
            if len(parts) != 2 or not _LABEL.fullmatch(parts[1]):
                raise EdgeListParseError(line_number, f"malformed header {line!r}")
            header_n = int(parts[1])
            header_line = line_number
            continue
        content_seen = True

        if len(parts) != 2 or not (_LABEL.fullmatch(parts[0]) and _LABEL.fullmatch(parts[1])):
            raise EdgeListParseError(line_number, f"expected two site labels, got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise EdgeListParseError(line_number, f"self-loop at site {u}")
        pair = (min(u, v), max(u, v))
        if pair in seen:
            raise EdgeListParseError(line_number, f"duplicate edge {u} {v} (first on line {seen[pair]})")
        seen[pair] = line_number
        edges.append(pair)

    if not edges:
        raise EmptyGraphError("edge list contains no edges")

    largest = max(max(pair) for pair in edges)
    n = largest + 1
    if header_n is not None:
        if header_n < n:
            raise EdgeListParseError(header_line, f"header n {header_n} is smaller than label {largest} + 1")
        n = header_n
    if n < 2:
        raise EdgeListParseError(header_line or 1, "a graph needs at least 2 sites")

    return Graph(n=n, edges=tuple(edges), name=name or f"edges-{n}")


def read_edge_list(path: Path) -> Graph:
    """Read and parse an edge-list file, named after its stem.

    Raises:
        ConfigError: If path is not a file
        EdgeListParseError: If the file is malformed or not valid UTF-8
        EmptyGraphError: If the file lists no edges
    """
    validate_file(path, "Edge-list file")
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        line_number = data[: e.start].count(b"\n") + 1
        raise EdgeListParseError(line_number, f"{path} is not valid UTF-8") from e
    return from_edge_list(text, name=path.stem)


def render_edge_list(g: Graph, header: bool = True) -> str:
    """Write a Graph in canonical edge-list form.

    Args:
        g: Graph to render
        header: Emit the 'n <count>' line so isolated trailing sites survive
                a round trip

    Returns:
        Edge-list text ending with a newline
    """
    lines: list[str] = [f"n {g.n}"] if header else []
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def graph_from_family(family: str, n: Optional[int] = None, leaves: Optional[int] = None,
                      p: Optional[float] = None, seed: Optional[int] = None) -> Graph:
    """Build a graph from a family name and its parameters.

    Families: complete (n), star (leaves), ring (n), path (n), er (n, p, seed).

    Raises:
        InvalidSizeError: If the family is unknown or a parameter is missing
    """
    def need(value, label):
        if value is None:
            raise InvalidSizeError(f"family {family!r} needs --{label}")
        return value

    if family == "complete":
        return make_complete(need(n, "n"))
    if family == "star":
        return make_star(need(leaves, "leaves"))
    if family == "ring":
        return make_ring(need(n, "n"))
    if family == "path":
        return make_path(need(n, "n"))
    if family == "er":
        return make_erdos_renyi(need(n, "n"), need(p, "p"), need(seed, "seed"))
    raise InvalidSizeError(f"unknown graph family {family!r}")


def iter_families() -> Iterable[str]:
    return ("complete", "star", "ring", "path", "er")
