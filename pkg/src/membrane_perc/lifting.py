"""Tension-supportability via convex liftings.

A hole system (pairwise interior-disjoint convex polygons) admits a
tension-supporting complement iff each hole can be lifted to a distinct
facet of a convex piecewise-linear surface. With one affine function
l_i(x) = a_i.x + b_i per hole and the gauge l_0 = 0, that is the margin
feasibility program

    (a_i - a_j) . v + (b_i - b_j) >= 1   for every vertex v of hole i, j != i,

imposed at hole vertices only (each l_i - l_j is affine and holes are
convex). The margin 1 normalization is exact: the system is positively
homogeneous, so strict feasibility and margin-1 feasibility coincide.
Infeasibility comes with a Farkas witness, re-verified in exact rational
arithmetic on small instances.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .errors import DegenerateLifting, EmptyInput, InternalInconsistency, TooLarge
from .exactlp import margin_feasibility
from .geom import (
    TAU_GEO,
    ConvexPolygon,
    DegenerateHull,
    HalfPlane,
    Rect,
    clip_convex,
    convex_hull,
    convex_intersects,
    halfplane_intersection,
)
from .stress import Framework

TAU_LP = 1e-9
_EXACT_VAR_LIMIT = 50  # rational re-verification guard
_FEAS_THRESHOLD = 1e-7


def interiors_overlap(p: ConvexPolygon, q: ConvexPolygon, tol: float = TAU_GEO) -> bool:
    """True iff the open interiors intersect beyond tolerance."""
    return convex_intersects(p, q, tol=-tol)


@dataclass(frozen=True)
class HoleSystem:
    """Candidate defect system: pairwise interior-disjoint convex holes."""

    holes: tuple

    def __post_init__(self):
        holes = tuple(self.holes)
        if not holes:
            raise EmptyInput("hole system needs at least one hole")
        for p, q in itertools.combinations(holes, 2):
            if interiors_overlap(p, q):
                raise ValueError("hole interiors overlap")
        object.__setattr__(self, "holes", holes)

    def __len__(self) -> int:
        return len(self.holes)

    def __iter__(self):
        return iter(self.holes)

    @property
    def total_area(self) -> float:
        return sum(h.area for h in self.holes)

    def total_vertices(self) -> int:
        return sum(len(h) for h in self.holes)


@dataclass(frozen=True)
class Lifting:
    """One affine function per hole: l_i(x) = a_i.x + b_i, with l_0 = 0."""

    gradients: tuple  # n pairs
    offsets: tuple  # n floats

    def __post_init__(self):
        grads = tuple((float(g[0]), float(g[1])) for g in self.gradients)
        offs = tuple(float(v) for v in self.offsets)
        if len(grads) != len(offs) or not grads:
            raise ValueError("one (gradient, offset) pair per hole required")
        if grads[0] != (0.0, 0.0) or offs[0] != 0.0:
            raise ValueError("gauge requires l_0 = 0")
        object.__setattr__(self, "gradients", grads)
        object.__setattr__(self, "offsets", offs)

    def __len__(self) -> int:
        return len(self.offsets)

    def value(self, i: int, x) -> float:
        a = self.gradients[i]
        return a[0] * x[0] + a[1] * x[1] + self.offsets[i]

    def min_margin(self, holes: HoleSystem) -> float:
        """min over constraints of l_i(v) - l_j(v) at vertices v of hole i."""
        best = math.inf
        for i, hole in enumerate(holes):
            for v in hole.vs:
                li = self.value(i, v)
                for j in range(len(holes.holes)):
                    if j != i:
                        best = min(best, li - self.value(j, v))
        return best


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Farkas witness: nonnegative multipliers over the margin constraints
    combining to the contradiction 0 >= sum(y) > 0."""

    multipliers: tuple  # per constraint row
    rows: tuple  # (hole_i, vertex_index, hole_j) per row
    support: frozenset  # holes carrying any positive multiplier
    exact: bool  # verified in rational arithmetic

    def combine(self, holes: HoleSystem):
        """Recombine with the constraint system.

        Returns (max |A^T y| coefficient, sum of multipliers); a valid
        certificate has the first ~0 and the second ~1.
        """
        a, _ = constraint_rows(holes)
        y = np.asarray(self.multipliers, dtype=float)
        return float(np.abs(a.T @ y).max()), float(y.sum())


def constraint_rows(holes: HoleSystem):
    """Margin constraint matrix over variables (a_i, b_i), i >= 1.

    Returns (A, meta) with one row per (hole i, vertex of i, other hole j)
    requiring row . x >= 1, and meta entries (i, vertex_index, j).
    """
    n = len(holes.holes)
    nv = 3 * (n - 1)
    rows = []
    meta = []
    for i, hole in enumerate(holes):
        for vi, v in enumerate(hole.vs):
            block_i = [v[0], v[1], 1.0]
            for j in range(n):
                if j == i:
                    continue
                row = np.zeros(nv)
                if i > 0:
                    row[3 * (i - 1) : 3 * i] = block_i
                if j > 0:
                    row[3 * (j - 1) : 3 * j] -= block_i
                rows.append(row)
                meta.append((i, vi, j))
    return np.asarray(rows), tuple(meta)


def _unpack(x: np.ndarray, n: int) -> Lifting:
    grads = [(0.0, 0.0)]
    offs = [0.0]
    for i in range(1, n):
        grads.append((float(x[3 * (i - 1)]), float(x[3 * (i - 1) + 1])))
        offs.append(float(x[3 * (i - 1) + 2]))
    return Lifting(gradients=tuple(grads), offsets=tuple(offs))


def lifting_feasible(
    holes: HoleSystem,
    window: Optional[Rect] = None,
    tol: float = TAU_LP,
    exact: bool = True,
):
    """Decide margin feasibility; returns a Lifting or a certificate.

    Solves max t s.t. A x >= t, t <= 1 (always feasible, bounded); t > 0
    means margin-1 feasibility after rescaling by 1/t. With exact=True
    (the default), instances with at most 50 variables are re-verified in
    exact rational arithmetic: returned liftings are margin-checked
    exactly, and infeasibility certificates are recomputed with an exact
    simplex. Search loops that only need verdicts pass exact=False. The
    verdict does not depend on the window.
    """
    n = len(holes.holes)
    if n == 1:
        return Lifting(gradients=((0.0, 0.0),), offsets=(0.0,))
    a, meta = constraint_rows(holes)
    m, nv = a.shape
    a_ub = np.hstack([-a, np.ones((m, 1))])
    a_ub = np.vstack([a_ub, np.concatenate([np.zeros(nv), [1.0]])])
    b_ub = np.zeros(m + 1)
    b_ub[-1] = 1.0
    c = np.zeros(nv + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * (nv + 1), method="highs")
    if res.status != 0:
        raise InternalInconsistency(f"phase-one LP failed with status {res.status}")
    t_star = -res.fun
    small = exact and nv <= _EXACT_VAR_LIMIT

    if t_star > _FEAS_THRESHOLD:
        x = np.asarray(res.x[:nv]) / t_star
        lifting = _unpack(x, n)
        margin = lifting.min_margin(holes)
        if margin < 1.0 - tol:
            raise InternalInconsistency(f"lifting margin {margin} below contract")
        if small:
            _exact_margin_check(a, x, tol)
        return lifting

    if small:
        t_exact, x_exact, farkas = margin_feasibility([list(map(float, row)) for row in a])
        if farkas is None:
            x = np.array([float(v) for v in x_exact])
            return _unpack(x, n)
        y = np.array([float(v) for v in farkas])
        support = frozenset(
            h for (i, vi, j), yk in zip(meta, farkas) if yk > 0 for h in (i, j)
        )
        return InfeasibilityCertificate(
            multipliers=tuple(float(v) for v in y),
            rows=meta,
            support=support,
            exact=True,
        )

    y = -np.asarray(res.ineqlin.marginals[:m], dtype=float)
    y = np.clip(y, 0.0, None)
    total = y.sum()
    if total <= 0:
        raise InternalInconsistency("infeasible verdict without dual support")
    y = y / total
    resid = float(np.abs(a.T @ y).max())
    scale = float(np.abs(a).max())
    if resid > tol * max(scale, 1.0) * 1e3:
        raise InternalInconsistency(f"Farkas residual {resid} too large")
    support = frozenset(
        h for (i, vi, j), yk in zip(meta, y) if yk > 1e-12 for h in (i, j)
    )
    return InfeasibilityCertificate(
        multipliers=tuple(map(float, y)), rows=meta, support=support, exact=False
    )


def _exact_margin_check(a: np.ndarray, x: np.ndarray, tol: float) -> None:
    xf = [Fraction(float(v)) for v in x]
    lo = 1 - Fraction(tol)
    for row in a:
        s = sum(Fraction(float(rv)) * xv for rv, xv in zip(row, xf) if rv)
        if s < lo:
            raise InternalInconsistency("exact margin re-check failed")


# ---------------------------------------------------------------------------
# Envelope subdivision and the induced framework.


@dataclass(frozen=True)
class EnvelopeSubdivision:
    """Cells of the lifting's upper envelope, clipped to the window.

    edge_cells[k] is the (i, j) pair of cells flanking framework edge k,
    or None for edges on the window boundary.
    """

    cells: tuple  # (hole_id, ConvexPolygon) per hole
    framework: Framework
    edge_cells: tuple


def envelope_subdivision(
    lifting: Lifting,
    holes: HoleSystem,
    window: Rect,
    tol: float = TAU_GEO,
) -> EnvelopeSubdivision:
    """Project the lifting's facets: cell_i = {x in window : l_i max at x}.

    Cells tile the window and contain their holes. The cell edges and
    vertices form a Framework with window-boundary vertices pinned.
    """
    n = len(lifting)
    if n != len(holes.holes):
        raise ValueError("lifting and hole system size mismatch")
    grads = np.asarray(lifting.gradients, dtype=float)
    offs = np.asarray(lifting.offsets, dtype=float)
    for i in range(n):
        for j in range(i + 1, n):
            if (
                np.abs(grads[i] - grads[j]).max() < tol
                and abs(offs[i] - offs[j]) < tol
            ):
                raise DegenerateLifting(f"holes {i} and {j} lift to one plane")
    wpoly = window.polygon()
    cells = []
    for i in range(n):
        hs = []
        for j in range(n):
            if j == i:
                continue
            # l_i(x) >= l_j(x)  <=>  (a_j - a_i) . x <= b_i - b_j
            hs.append(HalfPlane(tuple(grads[j] - grads[i]), float(offs[i] - offs[j])))
        cell = halfplane_intersection(hs, wpoly, tol)
        if cell is None:
            raise InternalInconsistency(f"cell {i} clipped to nothing")
        if not all(cell.contains(v, 1e-7) for v in holes.holes[i].vs):
            raise InternalInconsistency(f"hole {i} escapes its cell")
        cells.append((i, cell))
    framework, edge_cells = _assemble_framework(cells, lifting, window, tol)
    return EnvelopeSubdivision(
        cells=tuple(cells), framework=framework, edge_cells=edge_cells
    )


def _assemble_framework(cells, lifting: Lifting, window: Rect, tol: float):
    weld = 1e-7
    verts: list = []

    def vid(p) -> int:
        for k, q in enumerate(verts):
            if abs(q[0] - p[0]) <= weld and abs(q[1] - p[1]) <= weld:
                return k
        verts.append((float(p[0]), float(p[1])))
        return len(verts) - 1

    raw_edges: set = set()
    for _, cell in cells:
        ids = [vid(v) for v in cell.vs]
        for a, b in zip(ids, ids[1:] + ids[:1]):
            if a != b:
                raw_edges.add((min(a, b), max(a, b)))

    # Split edges at vertices lying on their interior (adjacent cells can
    # subdivide a shared boundary differently).
    pts = np.asarray(verts)
    edges: set = set()
    for a, b in raw_edges:
        pa, pb = pts[a], pts[b]
        d = pb - pa
        ln2 = float(d @ d)
        on = []
        for k in range(len(verts)):
            if k in (a, b):
                continue
            t = float((pts[k] - pa) @ d) / ln2
            if 0.0 < t < 1.0:
                perp = pa + t * d - pts[k]
                if float(perp @ perp) <= weld**2:
                    on.append((t, k))
        chain = [a] + [k for _, k in sorted(on)] + [b]
        for u, v in zip(chain, chain[1:]):
            if u != v:
                edges.add((min(u, v), max(u, v)))

    def on_window_boundary(p) -> bool:
        return (
            abs(p[0] - window.xmin) <= tol
            or abs(p[0] - window.xmax) <= tol
            or abs(p[1] - window.ymin) <= tol
            or abs(p[1] - window.ymax) <= tol
        )

    pinned = frozenset(k for k, p in enumerate(verts) if on_window_boundary(p))
    edge_list = sorted(edges)
    fw = Framework(vertices=tuple(verts), edges=tuple(edge_list), pinned=pinned)

    grads = np.asarray(lifting.gradients, dtype=float)
    offs = np.asarray(lifting.offsets, dtype=float)
    edge_cells = []
    for a, b in fw.edges:
        mid = (pts[a] + pts[b]) / 2.0
        vals = grads @ mid + offs
        top = float(vals.max())
        argmax = np.nonzero(vals >= top - 1e-6 * max(1.0, abs(top)))[0]
        if len(argmax) == 2:
            edge_cells.append((int(argmax[0]), int(argmax[1])))
        elif len(argmax) == 1:
            edge_cells.append(None)
        else:
            raise InternalInconsistency(
                f"edge ({a},{b}) midpoint maximized by {len(argmax)} cells"
            )
    return fw, tuple(edge_cells)


def stresses_from_lifting(
    lifting: Lifting, sub: EnvelopeSubdivision, tol: float = TAU_LP
) -> np.ndarray:
    """Per-edge stresses induced by the lifting.

    The edge between cells i and j carries s = |a_j - a_i| / edge length;
    the gradient jump must be perpendicular to the edge. Window-boundary
    edges (both endpoints pinned) carry 0. The result satisfies the
    equilibrium conditions at every unpinned vertex.
    """
    fw = sub.framework
    p = fw.positions
    grads = np.asarray(lifting.gradients, dtype=float)
    s = np.zeros(len(fw.edges))
    for k, (a, b) in enumerate(fw.edges):
        pair = sub.edge_cells[k]
        if pair is None:
            continue
        i, j = pair
        jump = grads[j] - grads[i]
        e = p[b] - p[a]
        ln = float(np.hypot(*e))
        jn = float(np.hypot(*jump))
        if jn == 0.0:
            raise InternalInconsistency("zero gradient jump across interior edge")
        if abs(float(jump @ e)) > max(tol, 1e-7) * jn * ln:
            raise InternalInconsistency(
                f"gradient jump not perpendicular to edge {(a, b)}"
            )
        s[k] = jn / ln
    return s


# ---------------------------------------------------------------------------
# Minimal covering systems.


def mesh(h1: HoleSystem, h2: HoleSystem, tol: float = TAU_GEO):
    """All nonempty pairwise intersections of holes of h1 and h2."""
    pieces = []
    for p in h1:
        for q in h2:
            c = clip_convex(p, q, tol)
            if c is not None:
                pieces.append(c)
    return HoleSystem(holes=tuple(pieces)) if pieces else None


def _closure_fixed_point(polys, tol: float = TAU_GEO) -> tuple:
    """Run the defect closure on raw polygons until pairwise disjoint."""
    from .closure import DefectSet, clusters, next_generation

    ds = DefectSet(
        generation=0,
        defects=tuple(polys),
        provenance=tuple(frozenset([i]) for i in range(len(polys))),
    )
    while True:
        comps = clusters(ds.defects, tol)
        if all(len(c) == 1 for c in comps):
            return ds.defects
        ds = next_generation(ds, comps, tol)


def h_min_approx(holes, window: Optional[Rect] = None, tol: float = TAU_GEO) -> HoleSystem:
    """Feasible covering system via closure + certificate-guided merging.

    Loop: close overlapping holes to a fixed point; test lifting
    feasibility; on infeasibility, extract an irreducible infeasible
    subsystem from the certificate support by a deletion filter, replace
    those holes with the hull of their union, and repeat. Terminates
    because every merge strictly reduces the hole count and a single
    all-absorbing hull is always feasible.
    """
    polys = list(holes.holes if isinstance(holes, HoleSystem) else holes)
    if not polys:
        raise EmptyInput("h_min_approx needs at least one hole")
    while True:
        polys = list(_closure_fixed_point(polys, tol))
        system = HoleSystem(holes=tuple(polys))
        verdict = lifting_feasible(system, exact=False)
        if isinstance(verdict, Lifting):
            return system
        core = _deletion_filter(polys, sorted(verdict.support))
        merged = convex_hull(np.vstack([polys[i].vs for i in core]))
        assert not isinstance(merged, DegenerateHull)
        polys = [p for i, p in enumerate(polys) if i not in core] + [merged]


def _deletion_filter(polys, support) -> set:
    """Shrink an infeasible support set to an irreducible one."""
    core = list(support)
    changed = True
    while changed and len(core) > 2:
        changed = False
        for drop in list(core):
            trial = [i for i in core if i != drop]
            verdict = lifting_feasible(
                HoleSystem(tuple(polys[i] for i in trial)), exact=False
            )
            if isinstance(verdict, InfeasibilityCertificate):
                core = trial
                changed = True
                break
    return set(core)


def _separable_groups(polys, tol: float):
    """Recursively bipartition holes along disjoint joint vertex hulls.

    If a bipartition (A, B) has hull(vertices of A) disjoint from
    hull(vertices of B), the hulls are strictly line-separated and a
    steep affine tilt across the separator glues per-side liftings into
    one, so minimal covering systems decompose across the split. Note
    pairwise-disjoint hulls alone do NOT suffice (the three-hole cyclic
    obstruction is exactly that case); only joint-hull bipartitions are
    safe, applied recursively.
    """
    hull_cache: dict = {}

    def group_hull(idx: tuple):
        h = hull_cache.get(idx)
        if h is None:
            h = convex_hull(np.vstack([polys[i].vs for i in idx]))
            if isinstance(h, DegenerateHull):
                raise AssertionError("hole group hull degenerated")
            hull_cache[idx] = h
        return h

    def split(idx: tuple):
        if len(idx) == 1:
            return [list(idx)]
        for r in range(1, len(idx) // 2 + 1):
            for sel in itertools.combinations(idx, r):
                rest = tuple(i for i in idx if i not in sel)
                if not convex_intersects(group_hull(sel), group_hull(rest), tol):
                    return split(sel) + split(rest)
        return [list(idx)]

    return split(tuple(range(len(polys))))


def h_min_oracle(
    holes,
    window: Optional[Rect] = None,
    all_minima: bool = False,
    tol: float = TAU_GEO,
):
    """Exhaustive minimal-area feasible covering system.

    Searches systems of pairwise interior-disjoint convex polygons whose
    vertices are drawn from the input vertex set and whose union covers
    every input hole, keeping a lifting-feasible system of minimal total
    area. Guarded to at most 14 total input vertices. With all_minima,
    returns every minimal-area system found (uniqueness spot checks).
    The search decomposes over hole groups with disjoint vertex hulls.
    """
    all_polys = list(holes.holes if isinstance(holes, HoleSystem) else holes)
    if not all_polys:
        raise EmptyInput("h_min_oracle needs at least one hole")
    total_pts = np.unique(np.vstack([p.vs for p in all_polys]), axis=0)
    if total_pts.shape[0] > 14:
        raise TooLarge(
            f"{total_pts.shape[0]} vertices exceeds the exhaustive-search guard"
        )
    per_group = [
        _oracle_component([all_polys[i] for i in group], tol)
        for group in _separable_groups(all_polys, tol)
    ]
    combined = [[]]
    for variants in per_group:
        combined = [base + list(v.holes) for base in combined for v in variants]
    systems = [HoleSystem(tuple(sys_holes)) for sys_holes in combined]
    systems.sort(key=lambda s: s.total_area)
    if all_minima:
        return systems
    return systems[0]


def _oracle_component(polys, tol: float):
    """All minimal-area feasible covers of one inseparable hole group."""
    from shapely.geometry import Polygon as ShPolygon
    from shapely.ops import unary_union

    pts = np.unique(np.vstack([p.vs for p in polys]), axis=0)

    sh_holes = [ShPolygon(p.vs) for p in polys]
    holes_union = unary_union(sh_holes)
    hole_area = np.array([g.area for g in sh_holes])
    area_tol = 1e-9 * max(1.0, float(hole_area.max()))

    # Candidate holes: vertex subsets in convex position. A candidate that
    # covers no input-hole area can be dropped from any system without
    # losing coverage or feasibility, so it never appears in a minimum.
    candidates = []
    for r in range(3, pts.shape[0] + 1):
        for sel in itertools.combinations(range(pts.shape[0]), r):
            hull = convex_hull(pts[list(sel)])
            if isinstance(hull, ConvexPolygon) and len(hull) == r:
                if ShPolygon(hull.vs).intersection(holes_union).area > area_tol:
                    candidates.append(hull)
    order = np.argsort([c.area for c in candidates])
    candidates = [candidates[i] for i in order]
    nc = len(candidates)
    areas = np.array([c.area for c in candidates])
    sh_cand = [ShPolygon(c.vs) for c in candidates]
    # Chosen candidates are pairwise interior-disjoint, so per-hole covered
    # areas are additive in the chosen set.
    cov = np.zeros((nc, len(polys)))
    for ci, g in enumerate(sh_cand):
        for hi, gh in enumerate(sh_holes):
            cov[ci, hi] = g.intersection(gh).area

    # Deterministic witness samples per hole (vertices, centroid, grid).
    samples = []
    for p in polys:
        lo = p.vs.min(axis=0)
        hi = p.vs.max(axis=0)
        gx, gy = np.meshgrid(np.linspace(lo[0], hi[0], 9), np.linspace(lo[1], hi[1], 9))
        grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
        grid = grid[p.contains_many(grid, tol=-1e-12)]
        samples.append(np.vstack([p.vs, p.centroid[None, :], grid]))
    sample_in = [
        np.stack([c.contains_many(s, tol) for c in candidates], axis=0)
        for s in samples
    ]  # per hole: (nc, nsamples) bool

    # Seed the area bound with the merging heuristic (always valid).
    incumbent = h_min_approx(HoleSystem(tuple(polys)), tol=tol)
    best_area = incumbent.total_area
    minima = {frozenset(incumbent.holes): incumbent}
    feasible_cache: dict = {}
    disjoint_cache: dict = {}
    nogoods: list = []
    expanded: set = set()

    contains_cache: dict = {}

    def cand_contains(ci: int, cj: int) -> bool:
        key = (ci, cj)
        hit = contains_cache.get(key)
        if hit is None:
            hit = candidates[ci].contains_polygon(candidates[cj], tol)
            contains_cache[key] = hit
        return hit

    def disjoint(ci: int, cj: int) -> bool:
        key = (ci, cj) if ci < cj else (cj, ci)
        hit = disjoint_cache.get(key)
        if hit is None:
            hit = not interiors_overlap(candidates[ci], candidates[cj], tol)
            disjoint_cache[key] = hit
        return hit

    def hits_nogood(key: frozenset) -> bool:
        # Infeasibility survives adding holes and enlarging holes, so a
        # node dies when distinct chosen candidates holewise contain all
        # members of a learned infeasible core.
        chosen = sorted(key)

        def match(members, used):
            if not members:
                return True
            g = members[0]
            for ci in chosen:
                if ci not in used and cand_contains(ci, g):
                    if match(members[1:], used | {ci}):
                        return True
            return False

        return any(
            len(ng) <= len(chosen) and match(sorted(ng), frozenset())
            for ng in nogoods
        )

    def learn_nogood(key: frozenset) -> None:
        # Minimize the failing set with a deletion filter; smaller cores
        # prune more of the tree.
        core = list(key)
        changed = True
        while changed and len(core) > 2:
            changed = False
            for drop in list(core):
                trial = frozenset(c for c in core if c != drop)
                if len(trial) < 2:
                    continue
                if not _set_feasible(trial):
                    core = list(trial)
                    changed = True
                    break
        nogoods.append(frozenset(core))

    def _set_feasible(key: frozenset) -> bool:
        if key not in feasible_cache:
            system = HoleSystem(tuple(candidates[i] for i in sorted(key)))
            verdict = lifting_feasible(system, exact=False)
            feasible_cache[key] = isinstance(verdict, Lifting)
        return feasible_cache[key]

    sample_cands: dict = {}

    def cands_at_sample(hole_idx: int, s_idx: int):
        key = (hole_idx, s_idx)
        hit = sample_cands.get(key)
        if hit is None:
            hit = np.nonzero(sample_in[hole_idx][:, s_idx])[0]
            sample_cands[key] = hit
        return hit

    def witness_of(hole_idx: int, chosen: tuple):
        """Candidate indices (area-sorted) covering an uncovered point."""
        mask = np.zeros(samples[hole_idx].shape[0], dtype=bool)
        table = sample_in[hole_idx]
        for ci in chosen:
            mask |= table[ci]
        free = np.nonzero(~mask)[0]
        if free.size:
            return cands_at_sample(hole_idx, int(free[0]))
        # Sliver not seen by the samples: fall back to an exact difference.
        cover = unary_union([sh_cand[ci] for ci in chosen]) if chosen else None
        rem = sh_holes[hole_idx] if cover is None else sh_holes[hole_idx].difference(cover)
        if rem.area <= area_tol:
            return None
        rp = rem.representative_point()
        w = (float(rp.x), float(rp.y))
        return np.array(
            [ci for ci in range(nc) if candidates[ci].contains(w, tol)], dtype=int
        )

    def dfs(chosen: tuple, chosen_area: float, covered: np.ndarray):
        nonlocal best_area
        key = frozenset(chosen)
        if key in expanded or hits_nogood(key):
            return
        expanded.add(key)
        deficit = float(np.clip(hole_area - covered, 0.0, None).sum())
        if chosen_area + deficit > best_area + area_tol:
            return
        options = None
        for h in range(len(polys)):
            if covered[h] < hole_area[h] - area_tol:
                options = witness_of(h, chosen)
                if options is not None:
                    break
        if options is None:
            if len(key) <= 1 or _set_feasible(key):
                system = HoleSystem(tuple(candidates[i] for i in sorted(key)))
                if chosen_area < best_area - area_tol:
                    best_area = chosen_area
                    minima.clear()
                    minima[frozenset(system.holes)] = system
                elif chosen_area <= best_area + area_tol:
                    minima.setdefault(frozenset(system.holes), system)
            else:
                learn_nogood(key)
            return
        for ci in options:
            if ci in chosen:
                continue
            if chosen_area + areas[ci] > best_area + area_tol:
                break  # candidates sorted by area
            if not all(disjoint(ci, cj) for cj in chosen):
                continue
            dfs(
                tuple(sorted(chosen + (int(ci),))),
                chosen_area + areas[ci],
                covered + cov[ci],
            )

    dfs((), 0.0, np.zeros(len(polys)))
    systems = sorted(minima.values(), key=lambda s: s.total_area)
    floor_area = systems[0].total_area
    return [s for s in systems if s.total_area <= floor_area + area_tol]
