"""Cyclic covers of plumbed 4-manifolds branched along function-like
divisors, suspension graphs for f + z^p, and universal abelian covers.

The combinatorics of the cover follow the classical covering algorithm
for graphs: over a vertex v with branch multiplicity m_v sit
gcd(N, m_v, multiplicities of all adjacent curves) vertices; over an
edge (v, w) sit gcd(N, m_v, m_w) Hirzebruch-Jung strings, each the
minimal resolution of one component of the normalisation of
z^N = x^{m_v} y^{m_w}, read off a two-dimensional lattice cone; the
attachment pattern is the coset projection.  Euler numbers of the cover
are never taken from formulas: the lifted multiplicity system is
homologically trivial, so every Euler number is solved from
orthogonality and the division is checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

from .builders import InputError, cone_chain, _xgcd
from .graph import PlumbingGraph
from .lattice import Lattice


class CoverError(ValueError):
    """Branch data is not function-like, or the cover leaves our scope."""


class NotRationalSphere(CoverError):
    """The cover is not a rational homology sphere plumbing (its graph
    acquires cycles or positive genus)."""


@dataclass(frozen=True)
class BranchData:
    """A topological divisor of a function: multiplicities on every vertex
    plus arrows, pairing to zero with every E_v, and a covering degree."""

    base: PlumbingGraph
    mults: dict[int, int]
    arrows: tuple[tuple[int, int], ...]
    degree: int

    def validate(self):
        g = self.base
        if self.degree < 1:
            raise InputError("covering degree must be >= 1")
        if set(self.mults) != set(g.vertices):
            raise CoverError("branch multiplicities must cover every vertex")
        if any(m <= 0 for m in self.mults.values()):
            raise CoverError("branch multiplicities must be positive")
        if any(m <= 0 for _, m in self.arrows):
            raise CoverError("arrow multiplicities must be positive")
        for v in g.vertices:
            total = g.euler(v) * self.mults[v] + sum(self.mults[w] for w in g.neighbors(v))
            total += sum(m for w, m in self.arrows if w == v)
            if total != 0:
                raise CoverError(
                    f"branch divisor is not function-like: (D, E_{v}) = {total}"
                )


@dataclass(frozen=True)
class CoverResult:
    """The covering plumbing graph with its bookkeeping.

    The graph carries the lifted multiplicity system and the lifted
    arrows; ``fiber`` maps each base vertex to its cover vertices and
    ``arrow_lifts`` maps each base arrow index to its lifted arrows
    (cover vertex, multiplicity).
    """

    graph: PlumbingGraph
    degree: int
    fiber: dict[int, tuple[int, ...]]
    arrow_lifts: tuple[tuple[tuple[int, int], ...], ...]


def _string_profile(N: int, a: int, b: int) -> list[tuple[int, int]]:
    """One Hirzebruch-Jung string of the N-fold cover over a normal
    crossing x^a y^b: the inserted vertices as (euler, multiplicity),
    ordered from the x-side (multiplicity a) to the y-side.

    The string resolves one component of the normalisation of
    z^N = x^a y^b; with d = gcd(N, a, b) there are d isomorphic
    components and z^{N/d} = x^{a/d} y^{b/d} on each, so the cone lives
    in the lattice {(u1, u2): a' u1 + b' u2 = 0 mod N'}.
    """
    d = gcd(N, gcd(a, b))
    Np, ap, bp = N // d, a // d, b // d
    if Np == 1:
        return []
    ga = gcd(Np, ap)
    gb = gcd(Np, bp)
    # basis of the constraint lattice: (Np/ga, 0) and (x0, ga)
    g2, inv, _ = _xgcd(ap // ga, Np // ga)
    assert g2 == 1
    # solve ap * x0 = -bp * ga (mod Np), i.e. (ap/ga) x0 = -bp (mod Np/ga)
    x0 = ((-bp) % (Np // ga)) * inv % (Np // ga)
    f1 = (Np // ga, 0)
    f2 = (x0, ga)
    # P and Q, the primitive lattice points on the axes, in basis coordinates
    P = (1, 0)
    qy = Np // gb
    # Q = (0, Np/gb) in ambient coordinates: solve c1 f1 + c2 f2 = Q
    if qy % ga != 0:
        raise AssertionError("axis point is not in the constraint lattice basis span")
    c2 = qy // ga
    num = -x0 * c2
    if num % (Np // ga) != 0:
        raise AssertionError("axis point is not in the constraint lattice")
    c1 = num // (Np // ga)
    Q = (c1, c2)
    inserted = cone_chain(P, Q)
    pts = [P] + inserted + [Q]
    out = []
    for i in range(1, len(pts) - 1):
        prev, cur, nxt = pts[i - 1], pts[i], pts[i + 1]
        sx, sy = prev[0] + nxt[0], prev[1] + nxt[1]
        if cur[0] != 0:
            c, rem = divmod(sx, cur[0])
            ok = rem == 0 and c * cur[1] == sy
        else:
            c, rem = divmod(sy, cur[1])
            ok = rem == 0 and c * cur[0] == sx
        if not ok:
            raise AssertionError("cover string triple is not proportional")
        # ambient coordinates recover the f-multiplicity via the pairing
        amb = (cur[0] * f1[0] + cur[1] * f2[0], cur[0] * f1[1] + cur[1] * f2[1])
        mult = d * (ap * amb[0] + bp * amb[1])
        if mult <= 0 or mult % N != 0:
            raise AssertionError("string multiplicity must be a positive multiple of N")
        out.append((-c, mult))
    return out


def cyclic_cover(branch: BranchData) -> CoverResult:
    """The N-fold cyclic cover of the plumbed 4-manifold branched along the
    given function-like divisor.

    Raises NotRationalSphere when the cover graph acquires cycles or a
    vertex of positive genus, and CoverError when it disconnects (the
    branch data then does not generate Z_N).
    """
    branch.validate()
    g = branch.base
    N = branch.degree
    m = branch.mults
    if N == 1:
        fiber = {v: (v,) for v in g.vertices}
        lifts = tuple(((v, mm),) for v, mm in branch.arrows)
        cover = PlumbingGraph(
            {v: g.euler(v) for v in g.vertices}, g.edges, branch.arrows, m
        )
        return CoverResult(cover, 1, fiber, lifts)

    overall = N
    for v in g.vertices:
        overall = gcd(overall, m[v])
    for _, am in branch.arrows:
        overall = gcd(overall, am)
    if overall != 1:
        raise CoverError(
            "branch data does not generate the deck group; the cover is disconnected"
        )

    # adjacent multiplicities per vertex (edges and arrows both branch)
    adjacent: dict[int, list[int]] = {v: [] for v in g.vertices}
    for a, b in g.edges:
        adjacent[a].append(m[b])
        adjacent[b].append(m[a])
    for v, am in branch.arrows:
        adjacent[v].append(am)

    t: dict[int, int] = {}
    for v in g.vertices:
        tv = gcd(N, m[v])
        for x in adjacent[v]:
            tv = gcd(tv, x)
        t[v] = tv

    # genus of each cover vertex via Riemann-Hurwitz must vanish
    for v in g.vertices:
        gv = gcd(N, m[v])
        dv = gv // t[v]
        chi = 2 * dv
        for x in adjacent[v]:
            te = gcd(gcd(N, m[v]), x)
            chi -= dv - te // t[v]
        if chi != 2:
            raise NotRationalSphere(
                f"cover vertex over {v} has genus {(2 - chi) // 2}; "
                "genus-carrying covers are unsupported"
            )

    next_id = 0
    ids: dict[tuple[int, int], int] = {}
    eu_known: dict[int, Optional[int]] = {}
    mult_out: dict[int, int] = {}
    fiber: dict[int, tuple[int, ...]] = {}
    for v in sorted(g.vertices):
        lifted_mult = m[v] * N // gcd(N, m[v])
        members = []
        for i in range(t[v]):
            ids[(v, i)] = next_id
            mult_out[next_id] = lifted_mult
            eu_known[next_id] = None  # solved later
            members.append(next_id)
            next_id += 1
        fiber[v] = tuple(members)

    edges_out: list[tuple[int, int]] = []
    arrow_out: list[tuple[int, int]] = []
    arrow_lifts: list[tuple[tuple[int, int], ...]] = []

    def lay_string(start: int, profile: list[tuple[int, int]], end: Optional[int],
                   end_arrow_mult: Optional[int]):
        nonlocal next_id
        prev = start
        for e, mm in profile:
            ids_new = next_id
            next_id += 1
            eu_known[ids_new] = e
            mult_out[ids_new] = mm
            edges_out.append((prev, ids_new))
            prev = ids_new
        if end is not None:
            edges_out.append((prev, end))
            return None
        arrow_out.append((prev, end_arrow_mult))
        return (prev, end_arrow_mult)

    for a, b in g.edges:
        te = gcd(gcd(N, m[a]), m[b])
        profile = _string_profile(N, m[a], m[b])
        for i in range(te):
            lay_string(ids[(a, i % t[a])], profile, ids[(b, i % t[b])], None)

    for v, am in branch.arrows:
        ta = gcd(gcd(N, m[v]), am)
        profile = _string_profile(N, m[v], am)
        lifted_arrow_mult = am * N // gcd(N, am)
        lifts = []
        for i in range(ta):
            lifts.append(
                lay_string(ids[(v, i % t[v])], profile, None, lifted_arrow_mult)
            )
        arrow_lifts.append(tuple(lifts))

    # the boundary must stay a rational homology sphere: the cover graph
    # is connected (checked above via the gcd) and must be a tree
    n_vertices = next_id
    if len(edges_out) != n_vertices - 1:
        raise NotRationalSphere(
            "cover graph has independent cycles; the cover is not a QHS^3 plumbing"
        )

    # Euler numbers from orthogonality of the lifted divisor
    arrow_weight: dict[int, int] = {}
    for v, am in arrow_out:
        arrow_weight[v] = arrow_weight.get(v, 0) + am
    nbr_sum: dict[int, int] = {i: 0 for i in range(n_vertices)}
    for a, b in edges_out:
        nbr_sum[a] += mult_out[b]
        nbr_sum[b] += mult_out[a]
    eu_final: dict[int, int] = {}
    for i in range(n_vertices):
        total = nbr_sum[i] + arrow_weight.get(i, 0)
        q, rem = divmod(-total, mult_out[i])
        if rem != 0:
            raise AssertionError("orthogonality does not pin an integer Euler number")
        if eu_known[i] is not None and eu_known[i] != q:
            raise AssertionError("cone profile and orthogonality disagree")
        if q >= 0:
            raise AssertionError("cover Euler numbers must be negative")
        eu_final[i] = q

    cover = PlumbingGraph(eu_final, edges_out, arrow_out, mult_out)
    lat = Lattice(cover.strip())
    if not lat.is_negative_definite():
        raise AssertionError("cover intersection form is not negative definite")
    return CoverResult(cover, N, fiber, tuple(arrow_lifts))


# -- suspensions ----------------------------------------------------------------


@dataclass(frozen=True)
class SuspensionGraph:
    """Plumbing graph of the link of f(x,y) + z^p = 0, presented as the
    embedded resolution graph of {z = 0} inside it: the graph carries
    div(z) as its multiplicity system and one arrow (multiplicity 1) on
    the distinguished vertex w."""

    graph: PlumbingGraph
    w: int
    p: int
    cover: CoverResult


def suspension_graph(res: PlumbingGraph, p: int) -> SuspensionGraph:
    """Cyclic p-fold cover of the resolution of f along div(f); the strict
    transform of f lifts to the strict transform of z, marking w."""
    from .builders import validate_resolution_graph

    validate_resolution_graph(res)
    branch = BranchData(
        base=res.strip(),
        mults=res.multiplicities,
        arrows=res.arrows,
        degree=p,
    )
    result = cyclic_cover(branch)
    (lift,) = result.arrow_lifts[0]
    w, lifted_mult = lift
    if lifted_mult % p != 0:
        raise AssertionError("lifted arrow multiplicity must be divisible by p")
    zdiv = {}
    for v in result.graph.vertices:
        mm = result.graph.multiplicity(v)
        if mm % p != 0:
            raise AssertionError("lifted multiplicities must be divisible by p")
        zdiv[v] = mm // p
    graph = PlumbingGraph(
        {v: result.graph.euler(v) for v in result.graph.vertices},
        result.graph.edges,
        arrows=[(w, lifted_mult // p)],
        multiplicities=zdiv,
    )
    if graph.arrows[0][1] != 1:
        raise AssertionError("strict transform of z must be reduced")
    # div(z) must equal the anti-dual of w; strong cross-check of the cover
    lat = Lattice(graph.strip())
    anti = lat.dual_basis_vector(w)
    for i, v in enumerate(lat.vertices):
        if anti.coords[i] != zdiv[v]:
            raise AssertionError("div(z) is not the anti-dual of the marked vertex")
    return SuspensionGraph(graph=graph, w=w, p=p, cover=result)


# -- universal abelian covers ------------------------------------------------------


@dataclass(frozen=True)
class UacResult:
    graph: PlumbingGraph          # plain graph of the cover (no arrows)
    degree: int
    generator_vertex: Optional[int]
    cover: CoverResult


def uac_graph(g: PlumbingGraph, generator_vertex: Optional[int] = None) -> UacResult:
    """Universal abelian cover graph of a plumbed QHS^3 with cyclic H_1.

    The cover is the |H|-fold cyclic cover branched along |H| l' for a
    generator class [l'].  When some [E_v^*] generates H, the branch data
    is |H| E_v^* together with one arrow of multiplicity |H| on v (no
    branching happens along the arrow); the smallest such v is used
    unless one is named.  Otherwise a nonnegative anti-dual combination
    representing a generator is used.
    """
    plain = g.strip()
    lat = Lattice(plain)
    lat.require_negative_definite()
    if not plain.is_connected():
        raise InputError("universal abelian cover needs a connected graph")
    factors = lat.invariant_factors()
    if len(factors) > 1:
        raise InputError(
            f"H_1 = {' x '.join(f'Z_{d}' for d in factors)} is not cyclic; unsupported"
        )
    N = lat.det()
    if N == 1:
        branch_v = generator_vertex if generator_vertex is not None else plain.vertices[0]
    else:
        branch_v = None
        candidates = [generator_vertex] if generator_vertex is not None else list(plain.vertices)
        for v in candidates:
            h = lat.class_of(lat.dual_basis_vector(v))
            if lat.class_order(h) == N:
                branch_v = v
                break
        if branch_v is None and generator_vertex is not None:
            raise InputError(f"[E_{generator_vertex}^*] does not generate H")

    if N == 1:
        # trivial cover: the manifold is its own universal abelian cover
        return UacResult(plain, 1, branch_v,
                         CoverResult(plain, 1, {v: (v,) for v in plain.vertices}, ()))

    if branch_v is not None:
        estar = lat.dual_basis_vector(branch_v)
        mults = {}
        for i, v in enumerate(lat.vertices):
            c = N * estar.coords[i]
            if c.denominator != 1:
                raise AssertionError("|H| E_v^* must be integral")
            mults[v] = int(c)
        branch = BranchData(plain, mults, ((branch_v, N),), N)
    else:
        # no single anti-dual generates; combine with nonnegative weights
        lambdas = _generator_combination(lat)
        coords = [sum(lambdas[u] * lat.dual_basis_vector(u).coords[i]
                      for u in lat.vertices) for i in range(len(lat.vertices))]
        mults = {}
        for i, v in enumerate(lat.vertices):
            c = N * coords[i]
            if c.denominator != 1:
                raise AssertionError("|H| l' must be integral")
            mults[v] = int(c)
        arrows = tuple((v, N * lambdas[v]) for v in lat.vertices if lambdas[v])
        branch = BranchData(plain, mults, arrows, N)

    result = cyclic_cover(branch)
    cover_plain = result.graph.strip()
    return UacResult(cover_plain, N, branch_v, result)


def _generator_combination(lat: Lattice) -> dict[int, int]:
    """Weights 0 <= lambda_v < |H| with [sum lambda_v E_v^*] a generator of
    the cyclic group H."""
    (d,) = lat.invariant_factors()
    residues = {v: lat.class_of(lat.dual_basis_vector(v))[0] for v in lat.vertices}
    lambdas = {v: 0 for v in lat.vertices}
    acc, acc_res = {}, 0
    g = 0
    for v in lat.vertices:
        g = gcd(g, residues[v])
    # greedy extended-gcd sweep
    cur = 0
    for v in lat.vertices:
        r = residues[v]
        if r == 0:
            continue
        gg, x, y = _xgcd(cur, r)
        # new combination: x * (current combo) + y * e_v
        for u in lambdas:
            lambdas[u] = (lambdas[u] * x) % d
        lambdas[v] = (lambdas[v] + y) % d
        cur = gg % d if gg % d else gg
        if gcd(cur, d) == gcd(g, d):
            break
    check = sum(lambdas[v] * residues[v] for v in lat.vertices) % d
    if gcd(check, d) != 1:
        raise AssertionError("failed to build a generator combination")
    return lambdas


@dataclass(frozen=True)
class UacSurgeryGraph:
    """The recipe form of the UAC of a surgery manifold: suspension blocks
    joined to a central vertex w, plus a chain of (q-1) many (-2)s."""

    graph: PlumbingGraph
    center: int                      # w
    wprime: int                      # w' (last chain vertex; = w when q = 1)
    chain: tuple[int, ...]
    block_vertices: tuple[tuple[int, ...], ...]
    block_marks: tuple[int, ...]     # w_j
    suspensions: tuple[SuspensionGraph, ...]


def uac_surgery(sg) -> UacSurgeryGraph:
    """Assemble the UAC graph of S^3_{-p/q}(K_1 # ... # K_nu) from the
    suspension graphs of f_j + z^p, the (q-1)-chain of (-2)s, and the
    central vertex with e_w = -1 - sum_j n_{w_j}."""
    susps = [suspension_graph(res, sg.p) for res in sg.blocks]

    eu: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    block_vertices = []
    block_marks = []
    next_id = 1
    n_sum = 0
    for s in susps:
        offset = next_id
        ids = {v: offset + i for i, v in enumerate(s.graph.vertices)}
        for v in s.graph.vertices:
            eu[ids[v]] = s.graph.euler(v)
        for a, b in s.graph.edges:
            edges.append((ids[a], ids[b]))
        block_marks.append(ids[s.w])
        block_vertices.append(tuple(ids[v] for v in s.graph.vertices))
        n_sum += s.graph.multiplicity(s.w)
        next_id += len(s.graph.vertices)

    chain_ids = tuple(range(next_id, next_id + sg.q - 1))
    for i, cid in enumerate(chain_ids):
        eu[cid] = -2
        if i > 0:
            edges.append((chain_ids[i - 1], cid))

    center = 0
    eu[center] = -1 - n_sum
    for wj in block_marks:
        edges.append((center, wj))
    if chain_ids:
        edges.append((center, chain_ids[0]))
    wprime = chain_ids[-1] if chain_ids else center

    graph = PlumbingGraph(eu, edges)
    lat = Lattice(graph)
    if not lat.is_negative_definite():
        raise AssertionError("assembled UAC graph is not negative definite")
    det = lat.det()
    prod = 1
    for s in susps:
        prod *= Lattice(s.graph.strip()).det()
    if det != prod:
        raise AssertionError("det(Gamma) != prod_j det(Gamma_j)")
    return UacSurgeryGraph(
        graph=graph,
        center=center,
        wprime=wprime,
        chain=chain_ids,
        block_vertices=tuple(block_vertices),
        block_marks=tuple(block_marks),
        suspensions=tuple(susps),
    )
