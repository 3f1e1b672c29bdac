"""Seeded hull-growth processes, ring sector events, box openness, and
the coupling to site percolation.

The growth process starts from one unit disk and repeatedly takes the
hull of itself with all admissible intersecting disks. Variants restrict
admissibility: `ring` uses only centers in the moving annulus
k + 3/2 <= rho <= k + 2 about the seed, `restricted` adds a checkerboard
color filter (cell size 1/4) and the exclusion of centers within
k^(-2/3) of the directions 0 and pi. Disks enter hulls as circumscribed
m-gons (m = 64 by default, relative area excess below 0.1%).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BadOrigin
from .geom import (
    TAU_GEO,
    ConvexPolygon,
    DegenerateHull,
    Rect,
    convex_hull,
    convex_intersects,
    minkowski_sum,
    regular_ngon,
)
from .scene import Scene, ShapeDistribution, sample_poisson_scene

TAU_COV = 1e-6


def point_color(x: float, y: float) -> str:
    """Checkerboard color with cell 1/4: green when floor(4x)+floor(4y) is even."""
    return "green" if (math.floor(4 * x) + math.floor(4 * y)) % 2 == 0 else "blue"


def _colors(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    return (np.floor(4 * xs) + np.floor(4 * ys)) % 2 == 0  # True = green


@dataclass(frozen=True)
class GrowthConfig:
    variant: str = "full"  # full | ring | restricted
    color: str = "any"  # any | green | blue
    angular_exclusion: bool = False
    k_max: int = 30

    def __post_init__(self):
        if self.variant not in ("full", "ring", "restricted"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.color not in ("any", "green", "blue"):
            raise ValueError(f"unknown color {self.color!r}")
        if self.k_max < 0:
            raise ValueError("k_max must be >= 0")


@dataclass(frozen=True)
class GrowthTrace:
    origin: tuple
    start_k: int
    polygons: tuple  # G(start_k), G(start_k+1), ...
    contains_circle: tuple  # per step: C(k+1) subset of G(k)
    stopped_at: Optional[int]  # step k at which no admissible disk intersected

    def polygon(self, k: int) -> ConvexPolygon:
        return self.polygons[k - self.start_k]

    @property
    def last_k(self) -> int:
        return self.start_k + len(self.polygons) - 1


def _admissible_mask(
    centers: np.ndarray,
    seed_center: np.ndarray,
    k: int,
    cfg: GrowthConfig,
) -> np.ndarray:
    n = centers.shape[0]
    mask = np.ones(n, dtype=bool)
    rel = centers - seed_center
    if cfg.variant in ("ring", "restricted"):
        rho = np.hypot(rel[:, 0], rel[:, 1])
        mask &= (rho >= k + 1.5) & (rho <= k + 2.0)
    if cfg.variant == "restricted":
        if cfg.color != "any":
            green = _colors(centers[:, 0], centers[:, 1])
            mask &= green if cfg.color == "green" else ~green
        if cfg.angular_exclusion and k >= 1:
            w = k ** (-2.0 / 3.0)
            phi = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2 * math.pi)
            near0 = (phi <= w) | (phi >= 2 * math.pi - w)
            nearpi = np.abs(phi - math.pi) <= w
            mask &= ~(near0 | nearpi)
    return mask


def _grow(
    scene: Scene,
    seed_center: np.ndarray,
    g0: ConvexPolygon,
    start_k: int,
    cfg: GrowthConfig,
    m: int,
    tol: float,
) -> GrowthTrace:
    disk_centers = []
    disk_radii = []
    poly_holes = []
    for h in scene.holes:
        if h.shape.kind == "disk":
            disk_centers.append(h.center)
            disk_radii.append(h.shape.radius)
        else:
            poly_holes.append((np.asarray(h.center), h.shape.polygon(h.center, m)))
    centers = np.asarray(disk_centers, dtype=float).reshape(-1, 2)
    radii = np.asarray(disk_radii, dtype=float)
    unit = regular_ngon((0.0, 0.0), 1.0, m)

    g = g0
    polygons = [g]
    flags = [g.contains_disk(seed_center, start_k + 1, tol)]
    stopped = None
    absorbed_disks = np.zeros(centers.shape[0], dtype=bool)
    absorbed_polys = [False] * len(poly_holes)
    for k in range(start_k, start_k + cfg.k_max):
        mask = _admissible_mask(centers, seed_center, k, cfg) & ~absorbed_disks
        new_pts = []
        if mask.any():
            cand = np.nonzero(mask)[0]
            d = g.distance_to_points(centers[cand])
            hit = cand[d <= radii[cand] + tol]
            if hit.size:
                absorbed_disks[hit] = True
                hit_r = radii[hit]
                for r in np.unique(hit_r):
                    sel = centers[hit[hit_r == r]]
                    base = convex_hull(sel) if sel.shape[0] > 1 else DegenerateHull(
                        points=((float(sel[0, 0]), float(sel[0, 1])),)
                    )
                    shape = unit if r == 1.0 else regular_ngon((0.0, 0.0), r, m)
                    new_pts.append(minkowski_sum(base, shape).vs)
        for idx, (pc, poly) in enumerate(poly_holes):
            if absorbed_polys[idx]:
                continue
            pm = _admissible_mask(pc.reshape(1, 2), seed_center, k, cfg)[0]
            if pm and convex_intersects(g, poly, tol):
                absorbed_polys[idx] = True
                new_pts.append(poly.vs)
        if not new_pts:
            stopped = k
            break
        merged = convex_hull(np.vstack([g.vs] + new_pts))
        assert isinstance(merged, ConvexPolygon)
        g = merged
        polygons.append(g)
        flags.append(g.contains_disk(seed_center, k + 2, tol))
    return GrowthTrace(
        origin=(float(seed_center[0]), float(seed_center[1])),
        start_k=start_k,
        polygons=tuple(polygons),
        contains_circle=tuple(flags),
        stopped_at=stopped,
    )


def grow_run(
    scene: Scene,
    origin_hole_id: int,
    cfg: GrowthConfig,
    m: int = 64,
    tol: float = TAU_GEO,
) -> GrowthTrace:
    """Run the growth process from a disk hole of the scene.

    G(0) is the origin disk; step k absorbs every admissible scene disk
    intersecting G(k) (closed contact counts) and hulls the union. Stops
    at the first step that absorbs nothing, or after k_max steps. The
    origin hole itself is excluded from later absorption.
    """
    origin = scene.hole_by_id(origin_hole_id)
    if origin is None or origin.shape.kind != "disk":
        raise BadOrigin(f"hole {origin_hole_id} is not a disk hole of the scene")
    seed_center = np.asarray(origin.center, dtype=float)
    rest = Scene(
        window=scene.window,
        pad=scene.pad,
        lam=scene.lam,
        seed=scene.seed,
        holes=tuple(h for h in scene.holes if h.id != origin_hole_id),
    )
    g0 = origin.shape.polygon(origin.center, m)
    return _grow(rest, seed_center, g0, 0, cfg, m, tol)


def grow_from_circle(
    scene: Scene,
    seed_center,
    start_k: int,
    cfg: GrowthConfig,
    m: int = 64,
    tol: float = TAU_GEO,
) -> GrowthTrace:
    """Growth seeded with the full circle C(start_k) at seed_center.

    Used by the box process: once a start_k-circle is covered, the
    process continues from it with ring/color/angle restrictions;
    generations below start_k are skipped.
    """
    seed_center = np.asarray(seed_center, dtype=float)
    g0 = regular_ngon(seed_center, float(start_k), m)
    return _grow(scene, seed_center, g0, start_k, cfg, m, tol)


def ring_event_probability(lam: float, k: int) -> float:
    """Probability that every congruent sector of the (k+1)-ring holds a center.

    The ring k + 3/2 <= rho <= k + 2 has area pi (k + 7/4); it is split
    into M = ceil(2 pi sqrt(k+3)) sectors of angle alpha = 2 pi / M (the
    ceiling keeps the sectors congruent and alpha <= 1/sqrt(k+3), which
    only sharpens the containment step). Each sector holds a Poisson
    center independently with probability 1 - exp(-lam alpha (k+7/4)/2).
    """
    if k < 1:
        raise ValueError("k >= 1")
    if not lam > 0:
        raise ValueError("lam > 0")
    m = sector_count(k)
    alpha = 2 * math.pi / m
    p_sector = 1.0 - math.exp(-lam * alpha * (k + 7.0 / 4.0) / 2.0)
    return p_sector**m


def sector_count(k: int) -> int:
    return math.ceil(2 * math.pi * math.sqrt(k + 3))


def disk_covered(
    center,
    k0: float,
    scene: Scene,
    samples: int = 4096,
    margin: float = TAU_COV,
) -> bool:
    """Sampled test that C(k0)+center is covered by scene disks whose
    centers lie inside C(k0)+center.

    Test points are stratified in equal-area polar cells (plus the
    center); each must lie at depth >= margin inside some participating
    disk. Sampling estimates coverage, it does not certify it.
    """
    if not k0 > 1:
        raise ValueError("k0 > 1")
    c = np.asarray(center, dtype=float)
    centers = np.array(
        [h.center for h in scene.holes if h.shape.kind == "disk"], dtype=float
    ).reshape(-1, 2)
    radii = np.array(
        [h.shape.radius for h in scene.holes if h.shape.kind == "disk"], dtype=float
    )
    if centers.size == 0:
        return False
    rel = centers - c
    inside = np.hypot(rel[:, 0], rel[:, 1]) <= k0
    if not inside.any():
        return False
    centers = centers[inside]
    radii = radii[inside]

    n_r = max(2, int(round(math.sqrt(samples / math.pi))))
    n_t = max(8, int(math.ceil(samples / n_r)))
    rr = k0 * np.sqrt((np.arange(n_r) + 0.5) / n_r)
    tt = 2 * math.pi * (np.arange(n_t) + 0.5) / n_t
    pts = np.concatenate(
        [
            np.stack(
                [
                    c[0] + np.repeat(rr, n_t) * np.cos(np.tile(tt, n_r)),
                    c[1] + np.repeat(rr, n_t) * np.sin(np.tile(tt, n_r)),
                ],
                axis=1,
            ),
            c[None, :],
        ]
    )
    # chunked distance test: every point within (radius - margin) of a disk
    free = np.ones(pts.shape[0], dtype=bool)
    chunk = max(1, int(4e6 // max(1, centers.shape[0])))
    for lo in range(0, pts.shape[0], chunk):
        seg = pts[lo : lo + chunk]
        d2 = (seg[:, None, 0] - centers[None, :, 0]) ** 2 + (
            seg[:, None, 1] - centers[None, :, 1]
        ) ** 2
        free[lo : lo + chunk] = ~np.any(d2 <= (radii[None, :] - margin) ** 2, axis=1)
        if free[lo : lo + chunk].any():
            return False
    return not free.any()


# ---------------------------------------------------------------------------
# Box process.


@dataclass(frozen=True)
class BoxConfig:
    k0: int
    T: int
    samples: int = 2048
    m: int = 64

    def __post_init__(self):
        if self.k0 <= 1:
            raise ValueError("k0 > 1")
        if self.T < 0:
            raise ValueError("T >= 0")

    @property
    def L(self) -> float:
        return 5.0 * self.T * self.k0**3

    @property
    def k1(self) -> int:
        return math.ceil(0.6 * self.L)

    def assert_geometry(self) -> None:
        # Exact identities and the corner-clearance bound of the coupling.
        assert self.L == 5 * self.T * self.k0**3
        assert self.k1 == math.ceil(0.6 * self.L)
        if self.L > 0:
            assert 0.6 * self.L < math.hypot(0.5 * self.L, 0.4 * self.L)


def candidate_centers(bcfg: BoxConfig, i: int, j: int) -> list:
    """The T+1 candidate circle centers of box (i, j)."""
    xi = (i + 0.4) * bcfg.L
    yj = (j + 0.5) * bcfg.L
    return [(xi + t * bcfg.k0**3, yj) for t in range(bcfg.T + 1)]


def box_color(i: int, j: int) -> str:
    return "green" if (i + j) % 2 == 0 else "blue"


def box_open(
    scene: Scene,
    bcfg: BoxConfig,
    i: int,
    j: int,
    tol: float = TAU_GEO,
):
    """Openness of box (i, j): some candidate circle is covered (A) and the
    color-restricted growth seeded there reaches radius k1 by step k1-1 (B).

    Returns (open, candidate_index or None). Even (i+j) boxes grow on
    green centers, odd on blue, so edge-adjacent boxes consume disjoint
    color classes.
    """
    bcfg.assert_geometry()
    if bcfg.L <= 0:
        raise ValueError("box size L is zero; need T >= 1")
    color = box_color(i, j)
    k1 = bcfg.k1
    for t, a in enumerate(candidate_centers(bcfg, i, j)):
        if not disk_covered(a, bcfg.k0, scene, bcfg.samples):
            continue
        cfg = GrowthConfig(
            variant="restricted",
            color=color,
            angular_exclusion=True,
            k_max=max(0, k1 - 1 - bcfg.k0),
        )
        trace = grow_from_circle(scene, a, bcfg.k0, cfg, bcfg.m, tol)
        final = trace.polygons[-1]
        if trace.stopped_at is None and final.contains_disk(np.asarray(a), k1, tol):
            return True, t
    return False, None


@dataclass(frozen=True)
class BoxGrid:
    nx: int
    ny: int
    open_: tuple  # row-major [j][i] booleans
    candidate: tuple  # row-major [j][i] candidate index or None
    largest_cluster_size: int
    cluster_count: int

    CSV_HEADER = "i,j,open,candidate_index"

    def is_open(self, i: int, j: int) -> bool:
        return self.open_[j][i]

    def color(self, i: int, j: int) -> str:
        return box_color(i, j)

    def csv_lines(self) -> list:
        out = [self.CSV_HEADER]
        for j in range(self.ny):
            for i in range(self.nx):
                cand = self.candidate[j][i]
                out.append(
                    f"{i},{j},{int(self.open_[j][i])},{'' if cand is None else cand}"
                )
        return out

    @classmethod
    def from_bool_array(cls, arr) -> "BoxGrid":
        arr = np.asarray(arr, dtype=bool)
        size, count = _cluster_stats(arr)
        return cls(
            nx=arr.shape[1],
            ny=arr.shape[0],
            open_=tuple(tuple(bool(v) for v in row) for row in arr),
            candidate=tuple(
                tuple(0 if v else None for v in row) for row in arr
            ),
            largest_cluster_size=size,
            cluster_count=count,
        )


def _cluster_stats(arr: np.ndarray):
    from scipy import ndimage

    lab, n = ndimage.label(arr, structure=np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]]))
    if n == 0:
        return 0, 0
    sizes = np.bincount(lab.ravel())[1:]
    return int(sizes.max()), int(n)


def box_coupling_run(
    lam: float,
    bcfg: BoxConfig,
    grid: tuple,
    seed: int,
    tol: float = TAU_GEO,
) -> BoxGrid:
    """Sample one unit-disk scene over the whole grid and open every box.

    The scene is padded so each growth (reach k1 about its candidates)
    sees the full process; boxes then share one realization, with
    independence coming from color disjointness and bounded reach.
    """
    nx, ny = grid
    if nx < 2 or ny < 2:
        raise ValueError("grid must be at least 2x2")
    bcfg.assert_geometry()
    big = Rect(0.0, nx * bcfg.L, 0.0, ny * bcfg.L)
    pad = 0.2 * bcfg.L + 3.0
    scene = sample_poisson_scene(
        big, pad, lam, ShapeDistribution("fixed_disk", radius=1.0), seed
    )
    open_rows = []
    cand_rows = []
    for j in range(ny):
        orow = []
        crow = []
        for i in range(nx):
            is_open, cand = box_open(scene, bcfg, i, j, tol)
            orow.append(is_open)
            crow.append(cand)
        open_rows.append(tuple(orow))
        cand_rows.append(tuple(crow))
    arr = np.array(open_rows, dtype=bool)
    size, count = _cluster_stats(arr)
    return BoxGrid(
        nx=nx,
        ny=ny,
        open_=tuple(open_rows),
        candidate=tuple(cand_rows),
        largest_cluster_size=size,
        cluster_count=count,
    )


# ---------------------------------------------------------------------------
# Cone occupancy and site-percolation helpers (the coupling target).


def cone_occupancy(points, apex) -> tuple:
    """Occupancy of the 8 half-quadrant cones about the apex.

    Cone i spans polar angles (i pi/4, (i+1) pi/4); points exactly on a
    boundary ray count for the smaller adjacent cone index (ray 0 counts
    for cone 0). The apex itself is skipped.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("need at least one point")
    ax, ay = float(apex[0]), float(apex[1])
    out = [False] * 8
    eighth = math.pi / 4.0
    for x, y in pts:
        dx, dy = x - ax, y - ay
        if dx == 0.0 and dy == 0.0:
            continue
        on_boundary = dx == 0.0 or dy == 0.0 or abs(dx) == abs(dy)
        theta = math.atan2(dy, dx) % (2 * math.pi)
        if on_boundary:
            ray = int(round(theta / eighth)) % 8
            cone = 0 if ray == 0 else ray - 1
        else:
            cone = int(theta // eighth) % 8
        out[cone] = True
    return tuple(out)


def site_grid(n: int, p: float, seed: int) -> np.ndarray:
    """n x n open-site field, each site open independently with prob p."""
    rng = np.random.default_rng(seed)
    return rng.random((n, n)) < p


def largest_cluster_points(grid: np.ndarray) -> np.ndarray:
    """(row, col) points of the largest 4-connected open cluster."""
    from scipy import ndimage

    lab, n = ndimage.label(grid, structure=np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]]))
    if n == 0:
        return np.empty((0, 2), dtype=int)
    sizes = np.bincount(lab.ravel())
    sizes[0] = 0
    return np.argwhere(lab == sizes.argmax())


def has_spanning_cluster(grid: np.ndarray) -> bool:
    """True iff one open cluster touches both the left and right edges,
    or both the top and bottom edges."""
    from scipy import ndimage

    lab, n = ndimage.label(grid, structure=np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]]))
    if n == 0:
        return False
    lr = set(lab[:, 0][lab[:, 0] > 0]) & set(lab[:, -1][lab[:, -1] > 0])
    tb = set(lab[0, :][lab[0, :] > 0]) & set(lab[-1, :][lab[-1, :] > 0])
    return bool(lr or tb)


# ---------------------------------------------------------------------------
# The containment geometry behind the ring argument.


def foot_radius(b, c) -> float:
    """Distance from the origin to the segment [b, c] (its nearest point)."""
    from .geom import segment_distance_to_origin

    return segment_distance_to_origin(b, c)


def sample_foot_inequality(n: int, seed: int, k_max: float = 1e6):
    """Randomized check that boundary chords stay outside radius k+2.

    Samples k, then points b, c at radius >= k + 5/2 with angular gaps at
    most alpha = 1/sqrt(k+3) on either side of a reference direction, and
    returns the minimum of rho_h - (k + 2) over n samples, where rho_h is
    the origin distance of segment [b, c]. Positive means the hull step
    keeps the (k+2)-circle enclosed; relies on (k+5/2)^2 > (k+2)(k+3).
    """
    rng = np.random.default_rng(seed)
    ks = np.floor(10 ** rng.uniform(0.0, math.log10(k_max), size=n)).astype(float)
    ks = np.maximum(ks, 1.0)
    alpha = 1.0 / np.sqrt(ks + 3.0)
    phi_a = rng.uniform(0.0, 2 * math.pi, size=n)
    gap_b = rng.uniform(0.0, alpha)
    gap_c = rng.uniform(0.0, alpha)
    extra_b = np.where(
        rng.random(n) < 0.2, 10 ** rng.uniform(0.0, 3.0, size=n), rng.uniform(0.0, 0.5, size=n)
    )
    extra_c = np.where(
        rng.random(n) < 0.2, 10 ** rng.uniform(0.0, 3.0, size=n), rng.uniform(0.0, 0.5, size=n)
    )
    rho_b = ks + 2.5 + extra_b
    rho_c = ks + 2.5 + extra_c
    bx = rho_b * np.cos(phi_a - gap_b)
    by = rho_b * np.sin(phi_a - gap_b)
    cx = rho_c * np.cos(phi_a + gap_c)
    cy = rho_c * np.sin(phi_a + gap_c)
    e_x, e_y = cx - bx, cy - by
    ee = e_x**2 + e_y**2
    t = np.clip(-(bx * e_x + by * e_y) / np.where(ee == 0, 1.0, ee), 0.0, 1.0)
    px = bx + t * e_x
    py = by + t * e_y
    rho_h = np.hypot(px, py)
    return float((rho_h - (ks + 2.0)).min())
