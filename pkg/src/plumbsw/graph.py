"""Decorated plumbing forests: vertices with Euler numbers, optional arrows
and multiplicity systems, plus the elementary moves (blow-up / blow-down)
and exact tree isomorphism via canonical forms."""

from __future__ import annotations

from typing import Iterable, Mapping, Optional


class GraphError(ValueError):
    """Structurally invalid graph input (cycles, bad references, ...)."""


class PlumbingGraph:
    """A decorated forest on integer vertex ids.

    Decorations: an Euler number ``e_v`` per vertex, an optional tuple of
    arrows ``(vertex, multiplicity)`` and an optional multiplicity per
    vertex.  The underlying graph must be acyclic; most operations require
    it to be connected (a tree) and the associated intersection form to be
    negative definite, but forests are accepted so that cut-and-paste
    recursions can act componentwise.

    Instances are immutable and hashable.
    """

    __slots__ = ("_euler", "_vertices", "_edges", "_arrows", "_mult", "_adj", "_hash")

    def __init__(
        self,
        euler: Mapping[int, int],
        edges: Iterable[tuple[int, int]] = (),
        arrows: Iterable[tuple[int, int]] = (),
        multiplicities: Optional[Mapping[int, int]] = None,
    ):
        eu = {int(v): int(e) for v, e in euler.items()}
        if not eu:
            raise GraphError("graph needs at least one vertex")
        verts = tuple(sorted(eu))

        norm_edges = []
        seen = set()
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise GraphError(f"loop edge at vertex {a}")
            if a not in eu or b not in eu:
                raise GraphError(f"edge ({a},{b}) references a missing vertex")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            norm_edges.append(key)
        norm_edges.sort()

        norm_arrows = []
        for v, m in arrows:
            v, m = int(v), int(m)
            if v not in eu:
                raise GraphError(f"arrow on missing vertex {v}")
            if m <= 0:
                raise GraphError(f"arrow multiplicity must be positive, got {m}")
            norm_arrows.append((v, m))
        norm_arrows.sort()

        mult = None
        if multiplicities is not None:
            mult = {int(v): int(m) for v, m in multiplicities.items()}
            if set(mult) != set(eu):
                raise GraphError("multiplicity system must cover every vertex")

        adj: dict[int, list[int]] = {v: [] for v in verts}
        for a, b in norm_edges:
            adj[a].append(b)
            adj[b].append(a)
        for v in adj:
            adj[v].sort()

        # acyclicity via union-find; forests are the only shape we carry
        parent = {v: v for v in verts}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in norm_edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                raise GraphError("graph contains a cycle; plumbing graphs here are forests")
            parent[ra] = rb

        self._euler = eu
        self._vertices = verts
        self._edges = tuple(norm_edges)
        self._arrows = tuple(norm_arrows)
        self._mult = mult
        self._adj = adj
        self._hash = None

    # -- basic accessors ---------------------------------------------------

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    @property
    def arrows(self) -> tuple[tuple[int, int], ...]:
        return self._arrows

    @property
    def multiplicities(self) -> Optional[dict[int, int]]:
        return dict(self._mult) if self._mult is not None else None

    def euler(self, v: int) -> int:
        return self._euler[v]

    def multiplicity(self, v: int) -> int:
        if self._mult is None:
            raise GraphError("graph carries no multiplicity system")
        return self._mult[v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(self._adj[v])

    def degree(self, v: int) -> int:
        """Number of adjacent edges; arrows are not counted."""
        return len(self._adj[v])

    def arrow_count(self, v: int) -> int:
        return sum(1 for w, _ in self._arrows if w == v)

    def __len__(self) -> int:
        return len(self._vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlumbingGraph):
            return NotImplemented
        return (
            self._euler == other._euler
            and self._edges == other._edges
            and self._arrows == other._arrows
            and self._mult == other._mult
        )

    def __hash__(self) -> int:
        if self._hash is None:
            mult = tuple(sorted(self._mult.items())) if self._mult is not None else None
            self._hash = hash(
                (tuple(sorted(self._euler.items())), self._edges, self._arrows, mult)
            )
        return self._hash

    def __repr__(self) -> str:
        return (
            f"PlumbingGraph({len(self)} vertices, {len(self._edges)} edges"
            + (f", {len(self._arrows)} arrows" if self._arrows else "")
            + ")"
        )

    # -- structure ----------------------------------------------------------

    def components(self) -> list[tuple[int, ...]]:
        """Vertex sets of the connected components, each sorted."""
        seen: set[int] = set()
        comps = []
        for start in self._vertices:
            if start in seen:
                continue
            stack, comp = [start], []
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self._adj[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(tuple(sorted(comp)))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def is_chain(self) -> bool:
        """True when every vertex has degree at most two (a disjoint union
        of paths; the plumbing of a lens space or S^3 when connected)."""
        return all(len(self._adj[v]) <= 2 for v in self._vertices)

    def subgraph(self, vertices: Iterable[int]) -> "PlumbingGraph":
        keep = set(vertices)
        if not keep <= set(self._vertices):
            raise GraphError("subgraph vertices must belong to the graph")
        eu = {v: self._euler[v] for v in keep}
        edges = [e for e in self._edges if e[0] in keep and e[1] in keep]
        arrows = [a for a in self._arrows if a[0] in keep]
        mult = None
        if self._mult is not None:
            mult = {v: self._mult[v] for v in keep}
        return PlumbingGraph(eu, edges, arrows, mult)

    def without_vertex(self, v: int) -> "PlumbingGraph | None":
        remaining = [u for u in self._vertices if u != v]
        if not remaining:
            return None
        return self.subgraph(remaining)

    def strip(self) -> "PlumbingGraph":
        """Forget arrows and multiplicities, keeping only Euler decorations."""
        return PlumbingGraph(self._euler, self._edges)

    def relabeled(self, mapping: Mapping[int, int]) -> "PlumbingGraph":
        eu = {mapping[v]: e for v, e in self._euler.items()}
        edges = [(mapping[a], mapping[b]) for a, b in self._edges]
        arrows = [(mapping[v], m) for v, m in self._arrows]
        mult = None
        if self._mult is not None:
            mult = {mapping[v]: m for v, m in self._mult.items()}
        return PlumbingGraph(eu, edges, arrows, mult)

    # -- canonical form / isomorphism ----------------------------------------

    def _vertex_key(self, v: int):
        arrow_ms = tuple(sorted(m for w, m in self._arrows if w == v))
        mult = self._mult[v] if self._mult is not None else None
        return (self._euler[v], arrow_ms, mult)

    def _rooted_encoding(self, root: int, parent: Optional[int]):
        children = [w for w in self._adj[root] if w != parent]
        return (
            self._vertex_key(root),
            tuple(sorted(self._rooted_encoding(c, root) for c in children)),
        )

    def _component_canonical(self, comp: tuple[int, ...]):
        # centers by iterated leaf removal; a tree has one or two of them
        if len(comp) == 1:
            return ("1", self._rooted_encoding(comp[0], None))
        deg = {v: sum(1 for w in self._adj[v] if w in set(comp)) for v in comp}
        alive = set(comp)
        layer = [v for v in comp if deg[v] <= 1]
        while len(alive) > 2:
            nxt = []
            for v in layer:
                alive.discard(v)
                for w in self._adj[v]:
                    if w in alive:
                        deg[w] -= 1
                        if deg[w] == 1:
                            nxt.append(w)
            layer = nxt
        centers = sorted(alive)
        if len(centers) == 1:
            return ("1", self._rooted_encoding(centers[0], None))
        a, b = centers
        enc = sorted([self._rooted_encoding(a, b), self._rooted_encoding(b, a)])
        return ("2", tuple(enc))

    def canonical_form(self):
        """A hashable total invariant of the decorated forest (exact for
        forests: two graphs are isomorphic iff the forms are equal)."""
        return tuple(sorted(self._component_canonical(c) for c in self.components()))

    def is_isomorphic_to(self, other: "PlumbingGraph") -> bool:
        return self.canonical_form() == other.canonical_form()


def blow_up(g: PlumbingGraph, site) -> PlumbingGraph:
    """Blow up at a vertex (append a fresh (-1)-vertex, drop e_v by one) or
    at an edge (replace it by a path through a fresh (-1)-vertex, dropping
    both end decorations).  The determinant det(-I) is unchanged."""
    new = max(g.vertices) + 1
    eu = {v: g.euler(v) for v in g.vertices}
    edges = list(g.edges)
    if isinstance(site, int):
        if site not in eu:
            raise GraphError(f"no vertex {site}")
        eu[site] -= 1
        eu[new] = -1
        edges.append((site, new))
    else:
        a, b = site
        key = (min(a, b), max(a, b))
        if key not in g.edges:
            raise GraphError(f"no edge {key}")
        eu[a] -= 1
        eu[b] -= 1
        eu[new] = -1
        edges.remove(key)
        edges.extend([(a, new), (b, new)])
    return PlumbingGraph(eu, edges, g.arrows, g.multiplicities)


def minimal_model(g: PlumbingGraph) -> PlumbingGraph:
    """Blow down (-1)-vertices of degree <= 2 until none remain.

    Used only to compare plumbing representations of the same 3-manifold;
    computational pipelines never normalise their outputs.  Requires an
    arrow-free graph.
    """
    if g.arrows:
        raise GraphError("minimal_model expects an arrow-free graph")
    eu = {v: g.euler(v) for v in g.vertices}
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    changed = True
    while changed and len(eu) > 1:
        changed = False
        for v in sorted(eu):
            if eu[v] != -1 or len(adj[v]) > 2:
                continue
            nbrs = sorted(adj[v])
            if len(nbrs) == 2:
                a, b = nbrs
                if b in adj[a]:
                    continue  # joining would create a double edge
                adj[a].discard(v)
                adj[b].discard(v)
                adj[a].add(b)
                adj[b].add(a)
                eu[a] += 1
                eu[b] += 1
            elif len(nbrs) == 1:
                (a,) = nbrs
                adj[a].discard(v)
                eu[a] += 1
            del eu[v], adj[v]
            changed = True
            break
    edges = sorted({(min(a, b), max(a, b)) for a in adj for b in adj[a]})
    return PlumbingGraph(eu, edges)
