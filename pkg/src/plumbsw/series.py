"""Equivariant rational functions attached to a vertex of a plumbing graph.

The character sums of the surgery formula are never evaluated with complex
numbers.  A series with coefficients in the integral group ring Z[H] is
carried as a sparse polynomial keyed by (exponent, class); extracting the
h-component of the Fourier average is literally reading off the coefficient
of h.  Denominator factors (1 - g t^a) are rationalised with
(1 - g t^a) * sum_{i<ord(g)} g^i t^{ai} = 1 - t^{a ord(g)}, so denominators
are plain integer polynomials.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Optional

from .graph import PlumbingGraph
from .lattice import Lattice

# Sparse integer polynomial: {exponent: coefficient}, zeros never stored.
Poly = dict[int, int]

# Sparse Z[H]-polynomial: {(exponent, class-tuple): coefficient}.
GPoly = dict[tuple[int, tuple[int, ...]], int]


# -- plain polynomial helpers -------------------------------------------------


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            c = out.get(e, 0) + c1 * c2
            if c:
                out[e] = c
            elif e in out:
                del out[e]
    return out


def poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for e, c in q.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        elif e in out:
            del out[e]
    return out


def poly_scale(p: Poly, s: int) -> Poly:
    return {e: c * s for e, c in p.items()} if s else {}

def poly_degree(p: Poly) -> int:
    return max(p) if p else -1


def poly_eval_one(p: Poly) -> int:
    return sum(p.values())


def poly_eval(p: Poly, x):
    return sum(c * x**e for e, c in p.items())


def poly_derivative_at_one(p: Poly) -> int:
    return sum(c * e for e, c in p.items())


def poly_from_coeffs(coeffs: Iterable[int]) -> Poly:
    return {e: c for e, c in enumerate(coeffs) if c}


def poly_to_coeffs(p: Poly) -> list[int]:
    if not p:
        return [0]
    out = [0] * (poly_degree(p) + 1)
    for e, c in p.items():
        out[e] = c
    return out


def binomial(exp: int) -> Poly:
    """1 - t^exp."""
    return {0: 1, exp: -1}


def product_of_binomials(exps: Iterable[int]) -> Poly:
    out: Poly = {0: 1}
    for e in exps:
        out = poly_mul(out, binomial(e))
    return out


def poly_divmod(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Exact long division in Z[t]; the divisor must have a +-1 leading
    coefficient (always true for products of (1 - t^b))."""
    dd = poly_degree(den)
    lead = den[dd]
    if lead not in (1, -1):
        raise ValueError("division requires a unit leading coefficient")
    rem = dict(num)
    quo: Poly = {}
    while rem and poly_degree(rem) >= dd:
        d = poly_degree(rem)
        c = rem[d] * lead  # rem[d] / lead
        quo[d - dd] = quo.get(d - dd, 0) + c
        for e, ce in den.items():
            e2 = d - dd + e
            s = rem.get(e2, 0) - c * ce
            if s:
                rem[e2] = s
            elif e2 in rem:
                del rem[e2]
    return quo, rem


def _compress(num: Poly, den_exps: tuple[int, ...]) -> tuple[Poly, tuple[int, ...], int]:
    """Divide every exponent by the common gcd; this commutes with taking
    polynomial parts and leaves values at t=1 unchanged."""
    g = 0
    for e in num:
        g = gcd(g, e)
    for b in den_exps:
        g = gcd(g, b)
    if g <= 1:
        return num, den_exps, 1
    return {e // g: c for e, c in num.items()}, tuple(b // g for b in den_exps), g


def polynomial_part(num: Poly, den_exps: Iterable[int]) -> Poly:
    """Polynomial part of num / prod_b (1 - t^b): the unique polynomial Q
    with num/den - Q a proper fraction (or zero).  Exponents are returned
    on the original scale."""
    den_exps = tuple(den_exps)
    cnum, cden, g = _compress(num, den_exps)
    if not cden:
        return dict(num)
    den = product_of_binomials(cden)
    quo, _rem = poly_divmod(cnum, den)
    return {e * g: c for e, c in quo.items()}


def polynomial_part_at_one(num: Poly, den_exps: Iterable[int]) -> int:
    den_exps = tuple(den_exps)
    cnum, cden, _ = _compress(num, den_exps)
    if not cden:
        return poly_eval_one(cnum)
    den = product_of_binomials(cden)
    quo, _rem = poly_divmod(cnum, den)
    return poly_eval_one(quo)


def rational_reduce(num: Poly, den_exps: Iterable[int]) -> Poly:
    """num / prod (1 - t^b) when the division is exact; raises otherwise."""
    den_exps = tuple(den_exps)
    out = dict(num)
    for b in den_exps:
        quo, rem = poly_divmod(out, binomial(b))
        if rem:
            raise ArithmeticError("rational function is not a polynomial")
        out = quo
    return out


# -- group ring helpers -------------------------------------------------------


def _prime_power_parts(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            out.append(q)
        p += 1
    if n > 1:
        out.append(n)
    return out


def elementary_split(mods: tuple[int, ...]):
    """Refine invariant factors into prime powers (elementary divisors).

    Classes of coprime order then occupy disjoint coordinates, which is
    what lets the numerator factor over independent clusters.  Returns
    the refined moduli and the residue-tuple converter.
    """
    elem: list[int] = []
    slices: list[list[tuple[int, int]]] = []
    for d in mods:
        pieces = _prime_power_parts(d)
        pos = []
        for q in pieces:
            pos.append((len(elem), q))
            elem.append(q)
        slices.append(pos)

    def convert(h: tuple[int, ...]) -> tuple[int, ...]:
        out = [0] * len(elem)
        for r, pos in zip(h, slices):
            for i, q in pos:
                out[i] = r % q
        return tuple(out)

    return tuple(elem), convert


def _class_add(a: tuple[int, ...], b: tuple[int, ...], mods: tuple[int, ...]) -> tuple[int, ...]:
    return tuple((x + y) % d for x, y, d in zip(a, b, mods))


def _class_order(a: tuple[int, ...], mods: tuple[int, ...]) -> int:
    from math import lcm

    if not mods:
        return 1
    return lcm(*[d // gcd(d, x) for x, d in zip(a, mods)])


def _gpoly_mul(p: GPoly, q: GPoly, mods: tuple[int, ...]) -> GPoly:
    out: GPoly = {}
    for (e1, g1), c1 in p.items():
        for (e2, g2), c2 in q.items():
            key = (e1 + e2, _class_add(g1, g2, mods))
            c = out.get(key, 0) + c1 * c2
            if c:
                out[key] = c
            elif key in out:
                del out[key]
    return out


class GroupSeries:
    """The rational function prod_v (1 - [E_v^*] t^{a_v})^{d_v - 2} held in
    rationalised form: an integer-polynomial denominator and a Z[H]-valued
    numerator, the latter factored over subsets of SNF coordinates that
    never interact (so component extraction stays cheap)."""

    def __init__(self, mods: tuple[int, ...], trivial: Poly,
                 clusters: list[tuple[tuple[int, ...], GPoly]], den_exps: tuple[int, ...],
                 convert=None):
        self.mods = mods
        self.trivial = trivial          # class-free numerator part
        self.clusters = clusters        # [(support coords, Z[H]-poly)], disjoint supports
        self.den_exps = den_exps        # denominator = prod (1 - t^b)
        self.convert = convert or (lambda h: tuple(h))
        self._component_cache: dict[tuple[int, ...], Poly] = {}

    def component(self, h: tuple[int, ...]) -> tuple[Poly, tuple[int, ...]]:
        """The h-part of the series: (numerator, denominator exponents).
        ``h`` is a residue tuple along the graph's invariant factors."""
        h = self.convert(tuple(h))
        if h in self._component_cache:
            return self._component_cache[h], self.den_exps
        covered = set()
        for support, _ in self.clusters:
            covered |= set(support)
        num: Poly | None = dict(self.trivial)
        for i, hi in enumerate(h):
            if hi != 0 and i not in covered:
                num = {}
                break
        if num:
            for support, gp in self.clusters:
                part: Poly = {}
                for (e, g), c in gp.items():
                    if all(g[i] == h[i] for i in support):
                        part[e] = part.get(e, 0) + c
                num = poly_mul(num, {e: c for e, c in part.items() if c})
                if not num:
                    break
        self._component_cache[h] = num
        return num, self.den_exps

    def pol_value_at_one(self, h: tuple[int, ...]) -> int:
        num, den = self.component(h)
        return polynomial_part_at_one(num, den)

    def augmentation(self) -> tuple[Poly, tuple[int, ...]]:
        """Sum over all h: classes are forgotten (each character dropped)."""
        num = dict(self.trivial)
        for _, gp in self.clusters:
            part: Poly = {}
            for (e, _g), c in gp.items():
                s = part.get(e, 0) + c
                if s:
                    part[e] = s
                elif e in part:
                    del part[e]
            num = poly_mul(num, part)
        return num, self.den_exps

    def numerator(self) -> GPoly:
        """The fully expanded Z[H]-numerator (small inputs only)."""
        zero = tuple(0 for _ in self.mods)
        out: GPoly = {(e, zero): c for e, c in self.trivial.items()}
        for _, gp in self.clusters:
            out = _gpoly_mul(out, gp, self.mods)
        return out


def _build_group_series(mods: tuple[int, ...],
                        factors: list[tuple[int, tuple[int, ...], int]],
                        convert=None) -> GroupSeries:
    """Assemble prod (1 - g t^a)^e from (a, g, e) triples with a > 0."""
    zero = tuple(0 for _ in mods)
    den_exps: list[int] = []
    # union-find over SNF coordinates to split independent clusters
    parent = list(range(len(mods)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pieces: list[tuple[tuple[int, ...], GPoly]] = []  # (support, factor poly)
    trivial: Poly = {0: 1}
    for a, g, e in factors:
        if a <= 0:
            raise ValueError("series exponents must be positive integers")
        if e == 0:
            continue
        support = tuple(i for i, x in enumerate(g) if x)
        if e > 0:
            fac_n = [({(0, zero): 1, (a, g): -1}, support)] * e
        else:
            order = _class_order(g, mods)
            summ: GPoly = {}
            gg = zero
            for i in range(order):
                key = (a * i, gg)
                summ[key] = summ.get(key, 0) + 1
                gg = _class_add(gg, g, mods)
            fac_n = [(summ, support)] * (-e)
            den_exps.extend([a * order] * (-e))
        for gp, sup in fac_n:
            if not sup:
                flat = {e0: c for (e0, _), c in gp.items()}
                trivial = poly_mul(trivial, flat)
            else:
                pieces.append((sup, gp))
                for i in sup[1:]:
                    parent[find(sup[0])] = find(i)

    groups: dict[int, list[GPoly]] = {}
    supports: dict[int, set[int]] = {}
    for sup, gp in pieces:
        root = find(sup[0])
        groups.setdefault(root, []).append(gp)
        supports.setdefault(root, set()).update(sup)
    clusters = []
    for root, gps in sorted(groups.items()):
        prod: GPoly = {(0, zero): 1}
        for gp in gps:
            prod = _gpoly_mul(prod, gp, mods)
        clusters.append((tuple(sorted(supports[root])), prod))
    return GroupSeries(mods, trivial, clusters, tuple(sorted(den_exps)), convert)


def equivariant_series(lat: Lattice | PlumbingGraph, v: int) -> GroupSeries:
    """All components H_{v,h}(t) at once: the Z[H]-valued rational function
    prod_u (1 - [E_u^*] t^{a_u})^{delta_u - 2} with a_u = -det(G) (E_v^*, E_u^*)."""
    if isinstance(lat, PlumbingGraph):
        lat = Lattice(lat)
    lat.require_negative_definite()
    if lat.graph.arrows:
        raise ValueError("equivariant series is defined for arrow-free graphs")
    det = lat.det()
    mods, convert = elementary_split(lat.invariant_factors())
    inv = lat.inverse_neg()
    i = lat.index[v]
    factors = []
    for u in lat.vertices:
        e = lat.graph.degree(u) - 2
        if e == 0:
            continue
        a = det * inv[i][lat.index[u]]
        if a.denominator != 1:
            raise ArithmeticError("det-scaled dual pairing is not integral")
        g = convert(lat.class_of(lat.dual_basis_vector(u)))
        factors.append((int(a), g, e))
    return _build_group_series(mods, factors, convert)


# -- Alexander polynomials ----------------------------------------------------


def alexander_polynomial(g: PlumbingGraph, marked: Optional[int] = None) -> Poly:
    """Alexander polynomial of the knot carried by the marked vertex.

    For a det-1 resolution graph this is the classical product formula
    Delta(t)/(1-t) = prod_v (1 - t^{m_v})^{delta_v - 2} where m_v are the
    coordinates of the anti-dual of the marked vertex (the divisor of f)
    and delta counts edges plus the arrow.  On covers with nontrivial
    first homology the same formula is averaged over the group, i.e. the
    0-component of the Z[H]-valued product is taken.

    The result is normalised so that Delta(1) = 1 (asserted, not forced).
    """
    if marked is None:
        if len(g.arrows) != 1:
            raise ValueError("marked vertex required unless the graph has exactly one arrow")
        marked = g.arrows[0][0]
    plain = g.strip()
    lat = Lattice(plain)
    lat.require_negative_definite()
    estar = lat.dual_basis_vector(marked)
    if not estar.is_integral():
        raise ValueError(
            "anti-dual of the marked vertex is not integral; "
            "its class must be trivial for the Alexander product formula"
        )
    mods, convert = elementary_split(lat.invariant_factors())
    arrow_counts = {v: g.arrow_count(v) for v in g.vertices}
    arrow_counts[marked] = max(arrow_counts.get(marked, 0), 1)
    factors = []
    for u in lat.vertices:
        e = plain.degree(u) + arrow_counts.get(u, 0) - 2
        if e == 0:
            continue
        a = estar.coords[lat.index[u]]
        factors.append((int(a), convert(lat.class_of(lat.dual_basis_vector(u))), e))
    series = _build_group_series(mods, factors, convert)
    num, den = series.component(tuple(0 for _ in lat.invariant_factors()))
    num = poly_mul(binomial(1), num)  # multiply back by (1 - t)
    delta = rational_reduce(num, den)
    if poly_eval_one(delta) != 1:
        raise ArithmeticError("Alexander polynomial failed the Delta(1) = 1 normalisation")
    return delta


def torus_knot_alexander(a: int, b: int) -> Poly:
    """(1 - t^{ab})(1 - t) / ((1 - t^a)(1 - t^b)), the closed form."""
    num = poly_mul(binomial(a * b), binomial(1))
    return rational_reduce(num, (a, b))


def delta_invariant(delta_poly: Poly) -> int:
    """Seifert genus of an algebraic knot: Delta'(1) for Delta(1) = 1."""
    return poly_derivative_at_one(delta_poly)


def split_alexander(delta_poly: Poly) -> tuple[int, Poly]:
    """Write Delta(t) = 1 + delta (t-1) + (t-1)^2 Q(t); returns (delta, Q)."""
    delta = delta_invariant(delta_poly)
    # subtract 1 + delta(t - 1)
    rest = poly_add(delta_poly, {0: delta - 1, 1: -delta})
    tminus1 = {1: 1, 0: -1}
    q1, r1 = poly_divmod(rest, tminus1)
    if r1:
        raise ArithmeticError("Delta - 1 - delta(t-1) is not divisible by t-1")
    q2, r2 = poly_divmod(q1, tminus1)
    if r2:
        raise ArithmeticError("Delta - 1 - delta(t-1) is not divisible by (t-1)^2")
    return delta, q2
