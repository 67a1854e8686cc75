"""Undirected site graphs, cliques and separator triples.

Vertices are 0-indexed integers.  Each vertex carries a local dimension: the
arity of a classical variable or the Hilbert space dimension of a quantum site.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ValidationError


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class SiteGraph:
    """Undirected simple graph with a local dimension per vertex."""

    vertex_count: int
    local_dims: tuple[int, ...]
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValidationError("a graph needs at least one vertex")
        dims = tuple(int(d) for d in self.local_dims)
        if len(dims) != self.vertex_count:
            raise ValidationError(
                f"local_dims has {len(dims)} entries for {self.vertex_count} vertices")
        if any(d < 2 for d in dims):
            raise ValidationError(f"local dimensions must be >= 2, got {dims}")
        edges = set()
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValidationError(f"edge {(u, v)} out of range")
            if _edge(u, v) in edges:
                raise ValidationError(f"duplicate edge {_edge(u, v)}")
            edges.add(_edge(u, v))
        object.__setattr__(self, "local_dims", dims)
        object.__setattr__(self, "edges", frozenset(edges))
        adj = {v: set() for v in range(self.vertex_count)}
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", {v: frozenset(s) for v, s in adj.items()})

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, local_dim: int | Sequence[int] = 2) -> "SiteGraph":
        if isinstance(local_dim, int):
            dims = (local_dim,) * n
        else:
            dims = tuple(local_dim)
        edges = list(edges)
        seen = set()
        unique = []
        for u, v in edges:
            if _edge(u, v) not in seen:
                seen.add(_edge(u, v))
                unique.append((u, v))
        return cls(n, dims, frozenset(unique))

    @classmethod
    def path(cls, n: int, local_dim: int | Sequence[int] = 2) -> "SiteGraph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)], local_dim)

    @classmethod
    def complete(cls, n: int, local_dim: int | Sequence[int] = 2) -> "SiteGraph":
        return cls.from_edges(n, itertools.combinations(range(n), 2), local_dim)

    @classmethod
    def grid(cls, rows: int, cols: int, local_dim: int = 2) -> "SiteGraph":
        """Square lattice with vertex ``r*cols + c`` at row ``r``, column ``c``."""
        edges = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
        return cls.from_edges(rows * cols, edges, local_dim)

    @property
    def vertices(self) -> range:
        return range(self.vertex_count)

    def adjacent(self, v: int) -> frozenset:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return _edge(u, v) in self.edges

    def is_clique(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        return all(self.has_edge(u, v) for u, v in itertools.combinations(vs, 2))

    def is_forest(self) -> bool:
        parent = list(range(self.vertex_count))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertex_count,
            "local_dims": list(self.local_dims),
            "edges": [list(e) for e in sorted(self.edges)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SiteGraph":
        try:
            n = int(data["vertices"])
            dims = data.get("local_dims", [2] * n)
            edges = [tuple(e) for e in data.get("edges", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed graph description: {exc}") from exc
        if any(len(e) != 2 for e in edges):
            raise ValidationError("every edge must have exactly two endpoints")
        # a list rather than a set so that duplicate edges are reported
        return cls(n, tuple(dims), edges)


@dataclass(frozen=True)
class SeparatorTriple:
    """Partition ``(A, B, C)`` of the vertices in which ``B`` separates ``A`` from ``C``."""

    A: frozenset
    B: frozenset
    C: frozenset

    def __post_init__(self):
        for name in "ABC":
            object.__setattr__(self, name, frozenset(int(v) for v in getattr(self, name)))
        if not self.A or not self.C:
            raise ValidationError("A and C of a separator triple must be nonempty")
        if self.A & self.B or self.A & self.C or self.B & self.C:
            raise ValidationError("A, B and C must be pairwise disjoint")

    @property
    def all(self) -> frozenset:
        return self.A | self.B | self.C

    def to_dict(self) -> dict:
        return {"A": sorted(self.A), "B": sorted(self.B), "C": sorted(self.C)}

    def __str__(self) -> str:
        def fmt(s):
            return "{" + ",".join(map(str, sorted(s))) + "}"
        return f"A={fmt(self.A)} B={fmt(self.B)} C={fmt(self.C)}"


def _check_vertices(g: SiteGraph, u: Iterable[int]) -> frozenset:
    vs = frozenset(int(v) for v in u)
    bad = [v for v in vs if not 0 <= v < g.vertex_count]
    if bad:
        raise ValidationError(f"vertices {sorted(bad)} out of range for {g.vertex_count}-vertex graph")
    return vs


def neighbors(g: SiteGraph, u: Iterable[int]) -> frozenset:
    """Vertices outside ``u`` adjacent to at least one vertex of ``u``."""
    u = _check_vertices(g, u)
    out = set()
    for w in u:
        out |= g.adjacent(w)
    return frozenset(out - u)


def connected_components(g: SiteGraph, removed: Iterable[int] = ()) -> list[frozenset]:
    removed = set(removed)
    seen = set(removed)
    comps = []
    for start in g.vertices:
        if start in seen:
            continue
        stack, comp = [start], set()
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.add(v)
            for w in g.adjacent(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(frozenset(comp))
    return comps


def is_connected_set(g: SiteGraph, vertices: Iterable[int]) -> bool:
    vs = set(vertices)
    if not vs:
        return False
    others = set(g.vertices) - vs
    return len(connected_components(g, removed=others)) == 1


def maximal_cliques(g: SiteGraph) -> list[frozenset]:
    """All maximal cliques, found by Bron–Kerbosch with pivoting.

    Output order is deterministic: cliques sorted by their sorted vertex tuples.
    """
    found = []

    def expand(r: set, p: set, x: set):
        if not p and not x:
            found.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda v: (len(p & g.adjacent(v)), -v))
        for v in sorted(p - g.adjacent(pivot)):
            nv = g.adjacent(v)
            expand(r | {v}, p & nv, x & nv)
            p = p - {v}
            x = x | {v}

    expand(set(), set(g.vertices), set())
    return sorted(found, key=lambda c: tuple(sorted(c)))


def validate_triple(g: SiteGraph, t: SeparatorTriple, require_separation: bool = True) -> None:
    """Raise ValidationError unless ``t`` partitions the graph and ``B`` separates ``A`` from ``C``."""
    _check_vertices(g, t.all)
    if t.all != frozenset(g.vertices):
        missing = sorted(set(g.vertices) - t.all)
        raise ValidationError(f"triple does not cover vertices {missing}")
    if require_separation:
        for comp in connected_components(g, removed=t.B):
            if comp & t.A and comp & t.C:
                raise ValidationError(f"B does not separate A from C in triple {t}")


def separator_triples(g: SiteGraph, max_A: int = 2) -> list[SeparatorTriple]:
    """Triples ``(A, n(A), V - A - n(A))`` for connected ``A`` with ``|A| <= max_A``.

    Only triples with a nonempty remainder are emitted.  Order follows
    ``|A|`` and then lexicographic order of ``A``.
    """
    if max_A < 1:
        raise ValidationError(f"max_A must be >= 1, got {max_A}")
    everything = frozenset(g.vertices)
    out = []
    for size in range(1, min(max_A, g.vertex_count) + 1):
        for a in itertools.combinations(g.vertices, size):
            if not is_connected_set(g, a):
                continue
            a = frozenset(a)
            b = neighbors(g, a)
            c = everything - a - b
            if c:
                out.append(SeparatorTriple(a, b, c))
    return out


@dataclass(frozen=True)
class MarkovReport:
    """Conditional mutual information of each checked triple and the overall verdict."""

    entries: tuple  # of (SeparatorTriple, cmi in nats)
    tol: float

    @property
    def is_markov(self) -> bool:
        return all(cmi <= self.tol for _, cmi in self.entries)

    @property
    def max_cmi(self) -> float:
        return max((cmi for _, cmi in self.entries), default=0.0)

    def violations(self) -> list:
        return [(t, cmi) for t, cmi in self.entries if cmi > self.tol]

    def to_dict(self) -> dict:
        return {
            "is_markov": self.is_markov,
            "tol": self.tol,
            "max_cmi": self.max_cmi,
            "triples": [dict(t.to_dict(), cmi=cmi) for t, cmi in self.entries],
        }
