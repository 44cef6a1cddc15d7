"""Constructors for the decorated graphs this package computes with:
Hirzebruch-Jung chains, minimal embedded resolution graphs of torus-knot
plane curve singularities, and the negative surgery graph of
S^3_{-p/q}(K_1 # ... # K_nu)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .graph import GraphError, PlumbingGraph
from .lattice import Lattice
from .series import Poly, alexander_polynomial, delta_invariant


class InputError(ValueError):
    """Invalid user-supplied parameters."""


# -- Hirzebruch-Jung continued fractions ---------------------------------------


def hj_continued_fraction(p: int, q: int) -> list[int]:
    """p/q = k_0 - 1/(k_1 - 1/(... - 1/k_s)) with k_0 >= 1, k_i >= 2 (i >= 1).

    >>> hj_continued_fraction(8, 5)
    [2, 3, 2]
    """
    if p < 1 or q < 1:
        raise InputError("p and q must be positive")
    if gcd(p, q) != 1:
        raise InputError(f"gcd({p},{q}) != 1")
    ks = []
    while q:
        k = -((-p) // q)  # ceil(p/q)
        ks.append(k)
        p, q = q, k * q - p
    if ks[0] < 1 or any(k < 2 for k in ks[1:]):
        raise AssertionError("continued fraction digits out of range")
    return ks


def evaluate_hj(ks: Sequence[int]) -> Fraction:
    """Evaluate [k_0, ..., k_s] exactly."""
    if not ks:
        raise InputError("empty continued fraction")
    val = Fraction(ks[-1])
    for k in reversed(ks[:-1]):
        val = k - 1 / val
    return val


def hj_numerators(ks: Sequence[int]) -> list[int]:
    """Numerators of the truncations [k_0], [k_0,k_1], ...; the last entry
    is the numerator of the full fraction."""
    prev2, prev1 = 1, ks[0]
    out = [prev1]
    for k in ks[1:]:
        prev2, prev1 = prev1, k * prev1 - prev2
        out.append(prev1)
    return out


def hj_chain_graph(p: int, q: int, start_id: int = 0) -> PlumbingGraph:
    """The lens space chain with decorations -k_0, ..., -k_s for p/q."""
    ks = hj_continued_fraction(p, q)
    eu = {start_id + i: -k for i, k in enumerate(ks)}
    edges = [(start_id + i, start_id + i + 1) for i in range(len(ks) - 1)]
    return PlumbingGraph(eu, edges)


# -- two-dimensional lattice cones ----------------------------------------------


def _det2(u, v) -> int:
    return u[0] * v[1] - u[1] * v[0]


def cone_chain(u: tuple[int, int], v: tuple[int, int]) -> list[tuple[int, int]]:
    """Lattice points on the compact boundary of conv((cone(u,v) cap Z^2) - 0),
    strictly between the primitive generators u and v, in angular order.

    This is the ray data of the minimal smooth subdivision of the cone; a
    point w with neighbours w', w'' satisfies w' + w'' = c w, and -c is the
    Euler number of the corresponding exceptional curve.
    """
    if _det2(u, v) < 1:
        raise ValueError("cone must be positively oriented and nondegenerate")
    out = []
    cur = u
    while _det2(cur, v) > 1:
        # x0 with det(cur, x0) = 1, then push into the cone with minimal angle
        g, x, y = _xgcd(cur[0], cur[1])
        if g != 1:
            raise ValueError("cone generators must be primitive")
        x0 = (-y, x)  # det(cur, x0) = cur0*x + cur1*y = 1
        d = _det2(cur, v)
        num = -_det2(x0, v)
        t = -((-num) // d)  # ceil(num / d)
        w = (x0[0] + t * cur[0], x0[1] + t * cur[1])
        if _det2(w, v) == 0:
            break
        out.append(w)
        cur = w
    return out


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def chain_euler_numbers(points: Sequence[tuple[int, int]]) -> list[int]:
    """Euler numbers -c_i from consecutive triples along a hull chain
    (the list must include both end generators)."""
    out = []
    for i in range(1, len(points) - 1):
        p, c, n = points[i - 1], points[i], points[i + 1]
        sx, sy = p[0] + n[0], p[1] + n[1]
        if c[0]:
            cval, rem = divmod(sx, c[0])
        else:
            cval, rem = divmod(sy, c[1])
        if rem or (c[0] and cval * c[1] != sy) or (not c[0] and c[0] * cval != sx):
            raise AssertionError("hull chain triple is not proportional")
        out.append(-cval)
    return out


# -- torus knot resolution graphs ------------------------------------------------


@dataclass(frozen=True)
class KnotSpec:
    """Torus knot T(a, b): coprime integers 2 <= a < b."""

    a: int
    b: int

    def __post_init__(self):
        if not (2 <= self.a < self.b):
            raise InputError(f"need 2 <= a < b, got ({self.a},{self.b})")
        if gcd(self.a, self.b) != 1:
            raise InputError(f"gcd({self.a},{self.b}) != 1")

    def delta(self) -> int:
        return (self.a - 1) * (self.b - 1) // 2


def torus_knot_graph(spec: KnotSpec) -> PlumbingGraph:
    """Minimal embedded resolution graph of x^a + y^b = 0.

    Built torically: subdivide the first quadrant minimally so that the
    ray (b, a) appears; the inserted rays form a chain of exceptional
    curves, the (b, a) ray is the (-1)-curve carrying the strict
    transform (arrow, multiplicity 1).  Multiplicities are then solved
    from the orthogonality (div f, E_v) = 0 and cross-checked against the
    toric valuations min(a x, b y).
    """
    a, b = spec.a, spec.b
    ray = (b, a)
    side1 = cone_chain((1, 0), ray)
    side2 = cone_chain(ray, (0, 1))
    pts = [(1, 0)] + side1 + [ray] + side2 + [(0, 1)]
    eulers = chain_euler_numbers(pts)
    inner = pts[1:-1]
    n = len(inner)
    arrow_idx = inner.index(ray)
    eu = {i: eulers[i] for i in range(n)}
    edges = [(i, i + 1) for i in range(n - 1)]
    g = PlumbingGraph(eu, edges, arrows=[(arrow_idx, 1)])

    lat = Lattice(g)
    lat.require_negative_definite()
    if lat.det() != 1:
        raise AssertionError("torus knot resolution graph must have determinant 1")
    div = lat.dual_basis_vector(arrow_idx)  # solves (div f, E_v) = -[v == arrow]
    mults = {}
    for i, v in enumerate(lat.vertices):
        c = div.coords[i]
        if c.denominator != 1 or c <= 0:
            raise AssertionError("multiplicity system must be positive integers")
        mults[v] = int(c)
    for i, (x, y) in enumerate(inner):
        if mults[i] != min(a * x, b * y) and inner[i] != ray:
            raise AssertionError("solved multiplicities disagree with toric valuations")
    if mults[arrow_idx] != a * b:
        raise AssertionError("arrow vertex multiplicity must be a*b")
    if g.euler(arrow_idx) != -1:
        raise AssertionError("arrow must sit on a (-1)-vertex")
    return PlumbingGraph(eu, edges, arrows=[(arrow_idx, 1)], multiplicities=mults)


def validate_resolution_graph(g: PlumbingGraph) -> int:
    """Check the resolution-graph contract; returns the arrow vertex.

    Requires: exactly one arrow of multiplicity 1 on a (-1)-vertex,
    det = 1, a full multiplicity system orthogonal to every E_v.
    """
    if len(g.arrows) != 1:
        raise InputError("resolution graph needs exactly one arrow")
    u, am = g.arrows[0]
    if am != 1:
        raise InputError("arrow multiplicity must be 1 for an irreducible germ")
    if g.multiplicities is None:
        raise InputError("resolution graph needs a multiplicity system")
    if not g.is_connected():
        raise InputError("resolution graph must be connected")
    lat = Lattice(g.strip())
    lat.require_negative_definite()
    if lat.det() != 1:
        raise InputError("resolution graph must have determinant 1")
    if g.euler(u) != -1:
        raise InputError("arrow must sit on a (-1)-vertex")
    mult = g.multiplicities
    for v in g.vertices:
        total = g.euler(v) * mult[v] + sum(mult[w] for w in g.neighbors(v))
        if v == u:
            total += 1
        if total != 0:
            raise InputError(f"(div f, E_{v}) != 0: multiplicity system is inconsistent")
    return u


def divisor_of_f(g: PlumbingGraph) -> dict[int, int]:
    """(f): the exceptional part of the divisor of f, i.e. the multiplicity
    system of the resolution graph (equals the anti-dual of the arrow
    vertex when det = 1)."""
    validate_resolution_graph(g)
    return g.multiplicities


def resolve_knot(knot) -> PlumbingGraph:
    """Accept a KnotSpec, an (a, b) pair, or a ready resolution graph."""
    if isinstance(knot, PlumbingGraph):
        validate_resolution_graph(knot)
        return knot
    if isinstance(knot, KnotSpec):
        return torus_knot_graph(knot)
    a, b = knot
    return torus_knot_graph(KnotSpec(a, b))


# -- surgery graphs ---------------------------------------------------------------


@dataclass(frozen=True)
class SurgeryGraph:
    """The plumbing graph of S^3_{-p/q}(K_1 # ... # K_nu) with its markers."""

    graph: PlumbingGraph
    p: int
    q: int
    center: int                       # u
    uprime: int                       # u' (= u when q = 1)
    chain: tuple[int, ...]            # G_0 vertex ids, adjacent-to-u first
    block_vertices: tuple[tuple[int, ...], ...]   # vertex ids of each G_j
    block_arrow: tuple[int, ...]      # u_j in each block
    blocks: tuple[PlumbingGraph, ...]  # the resolution graphs used

    @property
    def nu(self) -> int:
        return len(self.blocks)


def surgery_graph(knots: Sequence, p: int, q: int) -> SurgeryGraph:
    """Assemble the surgery graph per the standard recipe: one block per
    knot (resolution graph without arrow/multiplicities), the chain of
    -k_1 ... -k_s, and the central vertex u with
    e_u = -k_0 - sum_j m_{u_j}."""
    if not knots:
        raise InputError("at least one knot is required")
    ks = hj_continued_fraction(p, q)
    blocks = [resolve_knot(k) for k in knots]

    eu: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    block_vertices = []
    block_arrow = []
    next_id = 1  # 0 is reserved for u
    m_sum = 0
    for res in blocks:
        offset = next_id
        ids = {v: offset + i for i, v in enumerate(res.vertices)}
        for v in res.vertices:
            eu[ids[v]] = res.euler(v)
        for aa, bb in res.edges:
            edges.append((ids[aa], ids[bb]))
        uj = res.arrows[0][0]
        block_arrow.append(ids[uj])
        block_vertices.append(tuple(ids[v] for v in res.vertices))
        m_sum += res.multiplicity(uj)
        next_id += len(res.vertices)

    chain_ids = tuple(range(next_id, next_id + len(ks) - 1))
    for i, cid in enumerate(chain_ids):
        eu[cid] = -ks[i + 1]
        if i > 0:
            edges.append((chain_ids[i - 1], cid))

    center = 0
    eu[center] = -ks[0] - m_sum
    for uj in block_arrow:
        edges.append((center, uj))
    if chain_ids:
        edges.append((center, chain_ids[0]))
    uprime = chain_ids[-1] if chain_ids else center

    g = PlumbingGraph(eu, edges)
    lat = Lattice(g)
    if not lat.is_negative_definite():
        raise AssertionError("assembled surgery graph is not negative definite")
    if lat.det() != p:
        raise AssertionError(f"surgery graph determinant {lat.det()} != p = {p}")
    return SurgeryGraph(
        graph=g,
        p=p,
        q=q,
        center=center,
        uprime=uprime,
        chain=chain_ids,
        block_vertices=tuple(block_vertices),
        block_arrow=tuple(block_arrow),
        blocks=tuple(blocks),
    )


def superisolated_compat(knots: Sequence, d: int) -> bool:
    """Whether (d-1)(d-2) = 2 sum_j delta_j, the genus-formula constraint a
    degree-d rational cuspidal curve imposes; advisory only."""
    if d < 1:
        raise InputError("d must be positive")
    total = 0
    for k in knots:
        if isinstance(k, KnotSpec):
            total += k.delta()
        elif isinstance(k, tuple) and len(k) == 2 and not isinstance(k, PlumbingGraph):
            total += KnotSpec(*k).delta()
        else:
            res = resolve_knot(k)
            total += delta_invariant(alexander_polynomial(res))
    return (d - 1) * (d - 2) == 2 * total
