"""Convex polytope of the frame elements: facets, incidences, cone queries.

The polytope is the convex hull of the unit-norm frame elements. Facet
vertex sets are the work horses of the bias estimation: whenever a facet
misses the origin its vertices span R^n, and when the origin is strictly
inside the hull the facet cones tile the whole space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hull as _hull
from .errors import AtOrigin, DegenerateHull, NotOmnidirectional
from .frames import UnitFrame
from .solvers import lp_feasible

TOL_PLANE = 1e-9
TOL_INTERIOR = 1e-9
TOL_MERGE = 1e-9
TOL_TIE = 1e-12
TOL_DISTINCT = 1e-10
OCTANT_GRID_POINTS = 10_000


@dataclass(frozen=True)
class Facet:
    """One (n-1)-dimensional face: its vertex indices and supporting hyperplane.

    The unit normal points away from the polytope interior, so every frame
    element satisfies <normal, x_i> <= offset, with equality exactly on
    `vertex_indices`.
    """

    vertex_indices: tuple[int, ...]
    normal: np.ndarray
    offset: float


@dataclass(frozen=True)
class Polytope:
    frame: UnitFrame
    facets: tuple[Facet, ...]
    incidence: np.ndarray  # bool, shape (num_facets, m)
    full_dimensional: bool

    @property
    def num_facets(self) -> int:
        return len(self.facets)

    def normals(self) -> np.ndarray:
        return np.array([f.normal for f in self.facets])

    def offsets(self) -> np.ndarray:
        return np.array([f.offset for f in self.facets])

    def facets_of_vertex(self, index: int) -> tuple[int, ...]:
        return tuple(int(j) for j in np.nonzero(self.incidence[:, index])[0])


@dataclass(frozen=True)
class PositiveFacetReport:
    """Which facets meet the closed non-negative orthant, and whether their
    cones cover it without passing through the origin."""

    facet_indices: tuple[int, ...]
    vertex_indices: tuple[int, ...]
    nonneg_omnidirectional: bool


def build_polytope(frame: UnitFrame, tol_plane: float = TOL_PLANE) -> Polytope:
    """Enumerate the facets of the convex hull of the frame elements.

    Simplicial quickhull output lying on one hyperplane (within `tol_plane`)
    is merged into a single facet, and each facet's vertex set is extended to
    every element on its hyperplane. If the elements span only a hyperplane
    that misses the origin, the whole point set is emitted as a single flat
    facet; a hyperplane through the origin (or a lower-dimensional span)
    raises DegenerateHull.
    """
    pts = frame.elements
    m = frame.m
    _check_distinct(pts)
    raw, flat = _hull.quickhull(pts, tol=tol_plane)
    if flat is not None:
        normal, offset = flat
        if abs(offset) <= tol_plane:
            raise DegenerateHull("affine hull of the elements passes through the origin")
        if offset < 0:
            normal, offset = -normal, -offset
        facet = Facet(tuple(range(m)), _readonly(normal), float(offset))
        incidence = np.ones((1, m), dtype=bool)
        return Polytope(frame, (facet,), _readonly(incidence), False)

    merged = _merge_coplanar(raw, pts, tol_plane)
    facets = []
    incidence = np.zeros((len(merged), m), dtype=bool)
    for j, (verts, normal, offset) in enumerate(merged):
        dots = pts @ normal
        if float(np.max(dots)) > offset + tol_plane:
            raise DegenerateHull("hull facet certificate failed")
        facets.append(Facet(verts, _readonly(normal), float(offset)))
        incidence[j, list(verts)] = True
    return Polytope(frame, tuple(facets), _readonly(incidence), True)


def _check_distinct(pts: np.ndarray, tol: float = TOL_DISTINCT) -> None:
    m = pts.shape[0]
    for i in range(m - 1):
        d = np.linalg.norm(pts[i + 1:] - pts[i], axis=1)
        if float(np.min(d)) <= tol:
            j = i + 1 + int(np.argmin(d))
            raise ValueError(f"elements {i} and {j} coincide within {tol}")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.flags.writeable = False
    return a


def _merge_coplanar(raw, pts: np.ndarray, tol_plane: float):
    """Group simplicial facets sharing a hyperplane, then pull in every point
    on that hyperplane (a facet owns all elements on its supporting plane)."""
    groups: list[dict] = []
    for verts, normal, offset in raw:
        for g in groups:
            if (np.max(np.abs(normal - g["normal"])) <= TOL_MERGE
                    and abs(offset - g["offset"]) <= TOL_MERGE):
                g["members"].append((verts, normal, offset))
                break
        else:
            groups.append({"normal": normal, "offset": offset,
                           "members": [(verts, normal, offset)]})
    merged = []
    for g in groups:
        members = g["members"]
        if len(members) == 1:
            normal, offset = g["normal"], g["offset"]
        else:
            normal = np.sum([mm[1] for mm in members], axis=0)
            normal = normal / np.linalg.norm(normal)
            union = sorted({v for mm in members for v in mm[0]})
            offset = float(np.mean(pts[union] @ normal))
        on_plane = np.nonzero(np.abs(pts @ normal - offset) <= tol_plane)[0]
        merged.append((tuple(int(v) for v in on_plane), normal, float(offset)))
    merged.sort(key=lambda item: item[0])
    return merged


def is_omnidirectional(poly: Polytope, tol_interior: float = TOL_INTERIOR) -> bool:
    """True iff the origin lies strictly inside the polytope: the hull is
    full-dimensional and every outward facet offset is positive."""
    if not poly.full_dimensional:
        return False
    return bool(np.min(poly.offsets()) > tol_interior)


def covering_facet(poly: Polytope, x, tol_interior: float = TOL_INTERIOR,
                   tie_tol: float = TOL_TIE) -> int:
    """Index of a facet whose cone contains x: the facet the ray through x
    exits the polytope by. Ties within `tie_tol` go to the smallest index.
    """
    if not is_omnidirectional(poly, tol_interior):
        raise NotOmnidirectional("covering queries need the origin strictly inside the hull")
    v = np.asarray(x, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm <= 1e-12:
        raise AtOrigin("direction is numerically zero")
    v = v / norm
    dots = poly.normals() @ v
    offsets = poly.offsets()
    mask = dots > tol_interior
    t = np.full(dots.shape, np.inf)
    t[mask] = offsets[mask] / dots[mask]
    tmin = float(np.min(t))
    candidates = np.nonzero(t <= tmin + tie_tol)[0]
    return int(candidates[0])


def octant_grid(n: int, count: int = OCTANT_GRID_POINTS) -> np.ndarray:
    """Deterministic covering grid of unit directions in the closed positive
    orthant: uniform angles for n = 2, a Kronecker low-discrepancy lattice
    pushed to the unit cube boundary and normalized for n >= 3."""
    if n == 1:
        return np.array([[1.0]])
    if n == 2:
        theta = np.linspace(0.0, np.pi / 2.0, count)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    phi = 2.0
    for _ in range(64):
        phi = (1.0 + phi) ** (1.0 / (n + 1))
    alpha = phi ** -(np.arange(1, n + 1, dtype=float))
    k = np.arange(1, count + 1, dtype=float)
    p = np.mod(0.5 + np.outer(k, alpha), 1.0)
    p = np.maximum(p, 1e-12)
    q = p / np.max(p, axis=1)[:, None]
    return q / np.linalg.norm(q, axis=1)[:, None]


def positive_facets(poly: Polytope, tol_interior: float = TOL_INTERIOR,
                    grid_points: int = OCTANT_GRID_POINTS,
                    cone_tol: float = TOL_INTERIOR) -> PositiveFacetReport:
    """Find the facets meeting the closed non-negative orthant and test
    whether their cones cover it.

    Facet membership is decided exactly per facet by LP feasibility of
    {c >= 0, sum c = 1, D c >= 0} where D has the facet vertices as columns.
    Coverage is checked on a deterministic grid of orthant directions, each
    of which must lie in some selected facet cone; additionally no selected
    facet may pass through the origin.
    """
    pts = poly.frame.elements
    selected = []
    for j, facet in enumerate(poly.facets):
        cols = pts[list(facet.vertex_indices)].T
        k = cols.shape[1]
        feasible = lp_feasible(
            A_eq=np.ones((1, k)), b_eq=np.array([1.0]),
            A_ineq=cols, b_ineq=np.zeros(cols.shape[0]),
            nonneg_vars=True)
        if feasible:
            selected.append(j)
    vertex_union = sorted({v for j in selected for v in poly.facets[j].vertex_indices})

    covered_all = False
    if selected:
        grid = octant_grid(poly.frame.n, grid_points)
        covered = np.zeros(grid.shape[0], dtype=bool)
        for j in selected:
            if covered.all():
                break
            idx = list(poly.facets[j].vertex_indices)
            cols = pts[idx].T
            todo = np.nonzero(~covered)[0]
            hit = _in_cone(cols, grid[todo], cone_tol)
            covered[todo[hit]] = True
        covered_all = bool(covered.all())

    away_from_origin = all(abs(poly.facets[j].offset) > tol_interior for j in selected)
    nonneg = covered_all and away_from_origin and bool(selected)
    return PositiveFacetReport(tuple(selected), tuple(int(v) for v in vertex_union), nonneg)


def _in_cone(cols: np.ndarray, directions: np.ndarray, tol: float) -> np.ndarray:
    """Membership of each direction in the conical hull of the columns."""
    n, k = cols.shape
    if k == n:
        try:
            coeff = np.linalg.solve(cols, directions.T)
            return np.all(coeff >= -tol, axis=0)
        except np.linalg.LinAlgError:
            pass
    # redundant (or singular) generator set: least squares first, LP to settle
    coeff, *_ = np.linalg.lstsq(cols, directions.T, rcond=None)
    resid = np.linalg.norm(cols @ coeff - directions.T, axis=0)
    hit = (resid <= tol) & np.all(coeff >= -tol, axis=0)
    unsettled = np.nonzero(~hit)[0]
    for row in unsettled:
        if lp_feasible(A_eq=cols, b_eq=directions[row], nonneg_vars=True):
            hit[row] = True
    return hit
