"""Exact linear algebra over the plumbing lattice.

Everything here is integer or rational arithmetic: the intersection form,
its definiteness test, anti-dual basis vectors, the canonical class, the
Riemann-Roch quadratic function chi, and the finite abelian group
H = L'/L with its minimal representatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .graph import GraphError, PlumbingGraph


class NotNegativeDefinite(ValueError):
    """The intersection form of the graph is not negative definite."""


@dataclass(frozen=True)
class DualVector:
    """An element of L' (or of L tensor Q) in E-basis coordinates, aligned
    with the sorted vertex tuple of its graph."""

    vertices: tuple[int, ...]
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.vertices) != len(self.coords):
            raise ValueError("coordinate/vertex length mismatch")

    def coord(self, v: int) -> Fraction:
        return self.coords[self.vertices.index(v)]

    def as_dict(self) -> dict[int, Fraction]:
        return dict(zip(self.vertices, self.coords))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def __add__(self, other: "DualVector") -> "DualVector":
        if self.vertices != other.vertices:
            raise ValueError("vectors live over different graphs")
        return DualVector(self.vertices, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "DualVector") -> "DualVector":
        if self.vertices != other.vertices:
            raise ValueError("vectors live over different graphs")
        return DualVector(self.vertices, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rmul__(self, scalar) -> "DualVector":
        s = Fraction(scalar)
        return DualVector(self.vertices, tuple(s * c for c in self.coords))

    def __neg__(self) -> "DualVector":
        return DualVector(self.vertices, tuple(-c for c in self.coords))


def _det_bareiss(rows: list[list[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    a = [row[:] for row in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _solve_fraction(matrix: Sequence[Sequence[int]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve M x = rhs exactly; M must be square and invertible."""
    n = len(matrix)
    a = [[Fraction(matrix[i][j]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def smith_normal_form(mat: Sequence[Sequence[int]]):
    """Smith normal form over Z.

    Returns (U, D, V) with U * mat * V = D, U and V unimodular and D
    diagonal with d_1 | d_2 | ... (nonnegative diagonal).
    """
    a = [list(map(int, row)) for row in mat]
    n = len(a)
    m = len(a[0]) if n else 0
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        U[i] = [x - q * y for x, y in zip(U[i], U[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in range(n):
            a[r][i] -= q * a[r][j]
        for r in range(m):
            V[r][i] -= q * V[r][j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in range(n):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(m):
            V[r][i], V[r][j] = V[r][j], V[r][i]

    k = 0
    while k < min(n, m):
        # pick the smallest nonzero entry in the trailing block as pivot
        best = None
        for i in range(k, n):
            for j in range(k, m):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(k, best[0])
        swap_cols(k, best[1])
        dirty = False
        for i in range(k + 1, n):
            if a[i][k] != 0:
                q = a[i][k] // a[k][k]
                row_op(i, k, q)
                if a[i][k] != 0:
                    dirty = True
        for j in range(k + 1, m):
            if a[k][j] != 0:
                q = a[k][j] // a[k][k]
                col_op(j, k, q)
                if a[k][j] != 0:
                    dirty = True
        if dirty:
            continue
        # enforce divisibility of the remaining block by the pivot
        pivot = a[k][k]
        offender = None
        for i in range(k + 1, n):
            for j in range(k + 1, m):
                if a[i][j] % pivot != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_op(k, offender, -1)  # adds the offending row to row k
            continue
        k += 1

    for i in range(min(n, m)):
        if a[i][i] < 0:
            a[i] = [-x for x in a[i]]
            U[i] = [-x for x in U[i]]
    return U, a, V


def _integer_inverse(mat: Sequence[Sequence[int]]) -> list[list[int]]:
    """Inverse of a unimodular integer matrix, exactly."""
    n = len(mat)
    cols = []
    for j in range(n):
        rhs = [Fraction(int(i == j)) for i in range(n)]
        cols.append(_solve_fraction(mat, rhs))
    inv = [[cols[j][i] for j in range(n)] for i in range(n)]
    out = []
    for row in inv:
        irow = []
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            irow.append(int(x))
        out.append(irow)
    return out


class Lattice:
    """Cached exact data attached to one plumbing graph: the intersection
    form, duals, canonical class, chi, and the homology group H = L'/L."""

    def __init__(self, graph: PlumbingGraph):
        self.graph = graph
        self.vertices = graph.vertices
        self.index = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        mat = [[0] * n for _ in range(n)]
        for i, v in enumerate(self.vertices):
            mat[i][i] = graph.euler(v)
        for a, b in graph.edges:
            i, j = self.index[a], self.index[b]
            mat[i][j] = mat[j][i] = 1
        self.matrix = mat
        self._neg_definite = None
        self._det = None
        self._inv_neg = None  # (-I)^{-1}, entrywise Fractions
        self._canonical = None
        self._snf = None
        self._rep_cache: dict[tuple, DualVector] = {}

    # -- form and definiteness ------------------------------------------------

    def is_negative_definite(self) -> bool:
        if self._neg_definite is None:
            n = len(self.vertices)
            ok = True
            for k in range(1, n + 1):
                minor = _det_bareiss([row[:k] for row in self.matrix[:k]])
                if (-1) ** k * minor <= 0:
                    ok = False
                    break
            self._neg_definite = ok
        return self._neg_definite

    def require_negative_definite(self):
        if not self.is_negative_definite():
            raise NotNegativeDefinite(
                "intersection form is not negative definite"
            )

    def det(self) -> int:
        """det(-I), a positive integer for negative definite forms; equals |H|."""
        if self._det is None:
            n = len(self.vertices)
            self._det = _det_bareiss([[-self.matrix[i][j] for j in range(n)] for i in range(n)])
        return self._det

    def vector(self, coords: Iterable[Fraction]) -> DualVector:
        return DualVector(self.vertices, tuple(Fraction(c) for c in coords))

    def zero(self) -> DualVector:
        return self.vector([Fraction(0)] * len(self.vertices))

    def basis_vector(self, v: int) -> DualVector:
        coords = [Fraction(0)] * len(self.vertices)
        coords[self.index[v]] = Fraction(1)
        return self.vector(coords)

    def pairing(self, x: DualVector, y: DualVector) -> Fraction:
        total = Fraction(0)
        n = len(self.vertices)
        for i in range(n):
            if x.coords[i] == 0:
                continue
            row = self.matrix[i]
            total += x.coords[i] * sum(row[j] * y.coords[j] for j in range(n) if y.coords[j] != 0)
        return total

    def inverse_neg(self) -> list[list[Fraction]]:
        """(-I)^{-1}; its (a,b) entry equals -(E_a^*, E_b^*)."""
        if self._inv_neg is None:
            self.require_negative_definite()
            n = len(self.vertices)
            # one Gauss-Jordan sweep on [(-I) | Id]
            a = [
                [Fraction(-self.matrix[i][j]) for j in range(n)]
                + [Fraction(int(i == j)) for j in range(n)]
                for i in range(n)
            ]
            for col in range(n):
                piv = next(r for r in range(col, n) if a[r][col] != 0)
                a[col], a[piv] = a[piv], a[col]
                pv = a[col][col]
                a[col] = [x / pv for x in a[col]]
                for r in range(n):
                    if r != col and a[r][col] != 0:
                        f = a[r][col]
                        a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            self._inv_neg = [row[n:] for row in a]
        return self._inv_neg

    def dual_basis_vector(self, v: int) -> DualVector:
        """E_v^*: pairs to -1 with E_v and to 0 with every other E_w."""
        inv = self.inverse_neg()
        j = self.index[v]
        return self.vector([inv[i][j] for i in range(len(self.vertices))])

    def dual_pairing_star(self, a: int, b: int) -> Fraction:
        """(E_a^*, E_b^*) = -[(-I)^{-1}]_{ab}."""
        inv = self.inverse_neg()
        return -inv[self.index[a]][self.index[b]]

    def canonical_class(self) -> DualVector:
        """k_G, the unique solution of (k_G, E_v) = -e_v - 2 for all v."""
        if self._canonical is None:
            self.require_negative_definite()
            rhs = [Fraction(-self.graph.euler(v) - 2) for v in self.vertices]
            self._canonical = self.vector(_solve_fraction(self.matrix, rhs))
        return self._canonical

    def chi(self, x: DualVector) -> Fraction:
        """Riemann-Roch function chi(l') = -(l', l' + k_G)/2."""
        k = self.canonical_class()
        return -self.pairing(x, x + k) / 2

    def i_invariant(self, x: DualVector) -> Fraction:
        """((k_G + 2l', k_G + 2l') + #V)/8."""
        k = self.canonical_class()
        y = k + 2 * x
        return (self.pairing(y, y) + len(self.vertices)) / 8

    # -- the two coordinate systems -------------------------------------------

    def estar_coords(self, x: DualVector) -> list[Fraction]:
        """Coordinates in the anti-dual basis: c_v = -(l', E_v)."""
        n = len(self.vertices)
        return [
            -sum(self.matrix[i][j] * x.coords[j] for j in range(n) if x.coords[j] != 0)
            for i in range(n)
        ]

    def estar_coords_int(self, x: DualVector) -> list[int]:
        out = []
        for c in self.estar_coords(x):
            if c.denominator != 1:
                raise ValueError("vector is not in the dual lattice L'")
            out.append(int(c))
        return out

    def in_dual_lattice(self, x: DualVector) -> bool:
        return all(c.denominator == 1 for c in self.estar_coords(x))

    def from_estar(self, coeffs: Sequence[int]) -> DualVector:
        """Vector with the given anti-dual coordinates (sum of c_v E_v^*)."""
        rhs = [Fraction(-c) for c in coeffs]
        return self.vector(_solve_fraction(self.matrix, rhs))

    def fractional_part(self, x: DualVector) -> DualVector:
        """Coordinatewise fractional part in the E-basis: the minimal
        effective representative of [x]."""
        return self.vector([c - (c.numerator // c.denominator) for c in x.coords])

    def integral_part(self, x: DualVector) -> DualVector:
        return self.vector([Fraction(c.numerator // c.denominator) for c in x.coords])

    # -- homology H = L'/L ------------------------------------------------------

    def _snf_data(self):
        if self._snf is None:
            self.require_negative_definite()
            n = len(self.vertices)
            neg = [[-self.matrix[i][j] for j in range(n)] for i in range(n)]
            U, D, V = smith_normal_form(neg)
            diag = [D[i][i] for i in range(n)]
            keep = [i for i in range(n) if diag[i] != 1]
            self._snf = (U, diag, keep)
        return self._snf

    def invariant_factors(self) -> tuple[int, ...]:
        """Nontrivial invariant factors of H, in divisibility order."""
        _, diag, keep = self._snf_data()
        return tuple(diag[i] for i in keep)

    def homology_order(self) -> int:
        order = 1
        for d in self.invariant_factors():
            order *= d
        return order

    def class_of(self, x: DualVector) -> tuple[int, ...]:
        """The class [x] in H as a residue tuple along the invariant factors."""
        U, diag, keep = self._snf_data()
        c = self.estar_coords_int(x)
        n = len(self.vertices)
        return tuple(
            sum(U[i][j] * c[j] for j in range(n)) % diag[i] for i in keep
        )

    def zero_class(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.invariant_factors())

    def all_classes(self) -> list[tuple[int, ...]]:
        from itertools import product

        factors = self.invariant_factors()
        return [tuple(t) for t in product(*[range(d) for d in factors])]

    def class_add(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        factors = self.invariant_factors()
        return tuple((x + y) % d for x, y, d in zip(a, b, factors))

    def class_order(self, h: tuple[int, ...]) -> int:
        factors = self.invariant_factors()
        if not factors:
            return 1
        return lcm(*[d // gcd(d, x) for x, d in zip(h, factors)])

    def representative(self, h: tuple[int, ...]) -> DualVector:
        """Some representative of the class h (not reduced)."""
        U, diag, keep = self._snf_data()
        n = len(self.vertices)
        lift = [0] * n
        for pos, i in enumerate(keep):
            lift[i] = int(h[pos])
        Uinv = getattr(self, "_Uinv", None)
        if Uinv is None:
            Uinv = _integer_inverse(U)
            self._Uinv = Uinv
        cstar = [sum(Uinv[i][j] * lift[j] for j in range(n)) for i in range(n)]
        return self.from_estar(cstar)

    def minimal_representative(self, h: tuple[int, ...]) -> DualVector:
        """r_h: the representative with all E-coordinates in [0, 1)."""
        h = tuple(h)
        if h not in self._rep_cache:
            r = self.fractional_part(self.representative(h))
            self._rep_cache[h] = r
        return self._rep_cache[h]


def intersection_matrix(g: PlumbingGraph) -> list[list[int]]:
    """Intersection form in the E-basis (vertices in sorted order)."""
    return [row[:] for row in Lattice(g).matrix]


def determinant(g: PlumbingGraph) -> int:
    lat = Lattice(g)
    lat.require_negative_definite()
    return lat.det()


def restrict(lat: Lattice, x: DualVector, component: Iterable[int], sub: Lattice | None = None) -> DualVector:
    """The restriction R_j(x): express x in the anti-dual basis, keep the
    coordinates supported on the component, and read the result in the
    component's own lattice."""
    comp = tuple(sorted(component))
    if not set(comp) <= set(lat.vertices):
        raise GraphError("component is not a vertex subset of the graph")
    if sub is None:
        sub = Lattice(lat.graph.subgraph(comp))
    cstar = lat.estar_coords_int(x)
    sub_coeffs = [cstar[lat.index[v]] for v in sub.vertices]
    return sub.from_estar(sub_coeffs)
