"""Iterative defect process: clusters of overlapping defects and their
convex hulls, run to a fixed point or window coverage.

Holes are generation-0 defects; a cluster is a connected component of
the pairwise-intersection graph (closed-set contact counts); the next
generation replaces each cluster by the convex hull of its members.
Disk-born defects are tracked as translates of one circumscribed m-gon,
which lets pair tests and cluster hulls use O(1) center arithmetic and
the Minkowski identity hull(U_i (c_i + P)) = hull({c_i}) + P.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geom import (
    TAU_GEO,
    ConvexPolygon,
    DegenerateHull,
    Rect,
    convex_hull,
    convex_intersects,
    minkowski_sum,
    ngon_disks_intersect,
    regular_ngon,
)
from .scene import Scene


class UnionFind:
    """Union-find over range(n) with path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while i != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[rj] = ri

    def components(self) -> list:
        groups: dict = {}
        for i in range(len(self.parent)):
            groups.setdefault(self.find(i), []).append(i)
        return sorted(groups.values())


@dataclass(frozen=True)
class DefectSet:
    """Generation-indexed defects with provenance back to hole ids.

    disk_meta[i] is (cx, cy, r) when defects[i] is exactly the
    circumscribed m-gon of a disk, else None.
    """

    generation: int
    defects: tuple
    provenance: tuple
    disk_meta: tuple = ()
    m: int = 64

    def __post_init__(self):
        if self.generation < 0:
            raise ValueError("generation must be >= 0")
        if len(self.provenance) != len(self.defects):
            raise ValueError("provenance must match defects")
        if self.disk_meta and len(self.disk_meta) != len(self.defects):
            raise ValueError("disk_meta must match defects")
        if not self.disk_meta:
            object.__setattr__(self, "disk_meta", (None,) * len(self.defects))
        seen: set = set()
        for ids in self.provenance:
            if seen & set(ids):
                raise ValueError("provenance sets must be disjoint")
            seen |= set(ids)

    @classmethod
    def from_scene(cls, scene: Scene, m: int = 64) -> "DefectSet":
        defects, meta = [], []
        for h in scene.holes:
            defects.append(h.shape.polygon(h.center, m))
            if h.shape.kind == "disk":
                meta.append((h.center[0], h.center[1], h.shape.radius))
            else:
                meta.append(None)
        return cls(
            generation=0,
            defects=tuple(defects),
            provenance=tuple(frozenset([h.id]) for h in scene.holes),
            disk_meta=tuple(meta),
            m=m,
        )


def clusters(defects, tol: float = TAU_GEO, disk_meta=None, m: int = 64) -> list:
    """Partition of defect indices into connected intersection components.

    Broad phase: uniform grid with cell size = max defect diameter; pairs
    are tested only when their (tol-inflated) bounding boxes share a
    cell. Narrow phase: inner/outer-radius quick tests, then separating
    axes (or the O(1) m-gon test when both members are disk translates).
    """
    n = len(defects)
    uf = UnionFind(n)
    if n <= 1:
        return uf.components()
    bboxes = np.array([d.bbox for d in defects])  # (n, 4): xmin ymin xmax ymax
    diam = float(
        np.hypot(bboxes[:, 2] - bboxes[:, 0], bboxes[:, 3] - bboxes[:, 1]).max()
    )
    cell = max(diam, 10 * tol)
    grid: dict = {}
    for i in range(n):
        x0, y0, x1, y1 = bboxes[i]
        for cx in range(int((x0 - tol) // cell), int((x1 + tol) // cell) + 1):
            for cy in range(int((y0 - tol) // cell), int((y1 + tol) // cell) + 1):
                grid.setdefault((cx, cy), []).append(i)
    if disk_meta is None:
        disk_meta = (None,) * n
    radii = [None] * n
    tested: set = set()
    for members in grid.values():
        for a in range(len(members)):
            i = members[a]
            for b in range(a + 1, len(members)):
                j = members[b]
                if uf.find(i) == uf.find(j):
                    continue
                key = (i, j) if i < j else (j, i)
                if key in tested:
                    continue
                tested.add(key)
                if _defects_intersect(
                    defects[i], defects[j], disk_meta[i], disk_meta[j], m, radii, i, j, tol
                ):
                    uf.union(i, j)
    return uf.components()


def _defects_intersect(p, q, meta_p, meta_q, m, radii, i, j, tol) -> bool:
    if meta_p is not None and meta_q is not None and m % 2 == 0:
        return ngon_disks_intersect(meta_p[:2], meta_p[2], meta_q[:2], meta_q[2], m, tol)
    if radii[i] is None:
        radii[i] = (p.centroid, *p.radii())
    if radii[j] is None:
        radii[j] = (q.centroid, *q.radii())
    (ci, rin_i, rout_i), (cj, rin_j, rout_j) = radii[i], radii[j]
    d = float(np.hypot(ci[0] - cj[0], ci[1] - cj[1]))
    if d > rout_i + rout_j + tol:
        return False
    if d <= rin_i + rin_j:
        return True
    return convex_intersects(p, q, tol)


def next_generation(d: DefectSet, comps=None, tol: float = TAU_GEO) -> DefectSet:
    """One defect per cluster: the hull of the cluster's vertex sets."""
    if comps is None:
        comps = clusters(d.defects, tol, d.disk_meta, d.m)
    defects, prov, meta = [], [], []
    for comp in comps:
        ids = frozenset().union(*(d.provenance[i] for i in comp))
        if len(comp) == 1:
            i = comp[0]
            defects.append(d.defects[i])
            meta.append(d.disk_meta[i])
        else:
            metas = [d.disk_meta[i] for i in comp]
            radii = {mt[2] for mt in metas if mt is not None}
            if all(mt is not None for mt in metas) and len(radii) == 1:
                centers = np.array([mt[:2] for mt in metas])
                base = convex_hull(centers)
                shape = regular_ngon((0.0, 0.0), radii.pop(), d.m)
                defects.append(minkowski_sum(base, shape))
            else:
                pts = np.vstack([d.defects[i].vs for i in comp])
                hull = convex_hull(pts)
                if isinstance(hull, DegenerateHull):
                    raise AssertionError("hull of positive-area defects degenerated")
                defects.append(hull)
            meta.append(None)
        prov.append(ids)
    return DefectSet(
        generation=d.generation + 1,
        defects=tuple(defects),
        provenance=tuple(prov),
        disk_meta=tuple(meta),
        m=d.m,
    )


@dataclass(frozen=True)
class GenerationRow:
    generation: int
    defect_count: int
    covered_area_fraction: Optional[float]


@dataclass(frozen=True)
class ClosureReport:
    rows: tuple
    covering_generation: Optional[int]
    fixed_point_generation: Optional[int]

    CSV_HEADER = (
        "seed,lambda,generation,defect_count,covered_area_fraction,"
        "covering_generation,fixed_point_generation"
    )

    def csv_lines(self, seed: int, lam: float) -> list:
        out = [self.CSV_HEADER]
        cov = "" if self.covering_generation is None else str(self.covering_generation)
        fix = (
            ""
            if self.fixed_point_generation is None
            else str(self.fixed_point_generation)
        )
        for r in self.rows:
            frac = "" if r.covered_area_fraction is None else repr(r.covered_area_fraction)
            out.append(
                f"{seed},{lam!r},{r.generation},{r.defect_count},{frac},{cov},{fix}"
            )
        return out


def covers_window(defect: ConvexPolygon, window: Rect, tol: float = TAU_GEO) -> bool:
    """window ⊆ defect; corner containment suffices by convexity."""
    return bool(np.all(defect.contains_many(window.corners, tol)))


def covered_area_fraction(defects, window: Rect) -> float:
    """Area fraction of the window covered by the union of defects."""
    from shapely.geometry import Polygon as ShPolygon
    from shapely.geometry import box as sh_box
    from shapely.ops import unary_union

    core = sh_box(window.xmin, window.ymin, window.xmax, window.ymax)
    pieces = []
    for d in defects:
        x0, y0, x1, y1 = d.bbox
        if x1 < window.xmin or x0 > window.xmax or y1 < window.ymin or y0 > window.ymax:
            continue
        pieces.append(ShPolygon(d.vs).intersection(core))
    if not pieces:
        return 0.0
    return float(unary_union(pieces).area / window.area)


def closure_run(
    scene: Scene,
    max_gen: int,
    core_window: Optional[Rect] = None,
    m: int = 64,
    compute_areas: bool = True,
    tol: float = TAU_GEO,
):
    """Iterate the defect process to fixed point, coverage, or max_gen.

    Returns (ClosureReport, final DefectSet). Coverage means one defect
    contains the whole core window; at a fixed point every cluster is a
    singleton, so further generations would repeat verbatim.
    """
    if max_gen < 1:
        raise ValueError("max_gen must be >= 1")
    core = core_window or scene.window
    ds = DefectSet.from_scene(scene, m)
    rows = []
    covering = None
    fixed_point = None
    while True:
        frac = covered_area_fraction(ds.defects, core) if compute_areas else None
        rows.append(GenerationRow(ds.generation, len(ds.defects), frac))
        if any(covers_window(d, core, tol) for d in ds.defects):
            covering = ds.generation
            break
        comps = clusters(ds.defects, tol, ds.disk_meta, ds.m)
        if all(len(c) == 1 for c in comps):
            fixed_point = ds.generation
            break
        if ds.generation >= max_gen:
            break
        ds = next_generation(ds, comps, tol)
    report = ClosureReport(
        rows=tuple(rows),
        covering_generation=covering,
        fixed_point_generation=fixed_point,
    )
    return report, ds
