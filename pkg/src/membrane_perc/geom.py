"""Planar convex geometry kernel.

Points are 2-sequences of finite floats. Hull topology is decided by an
exact orientation predicate (float filter, rational fallback), so hull
results never depend on epsilon choices. Metric queries (containment,
intersection, clipping) use the absolute tolerance ``TAU_GEO`` and treat
polygons as closed sets: boundary contact counts as intersection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import EmptyInput

# Absolute geometric tolerance; window coordinates are O(10^2).
TAU_GEO = 1e-9

# Shewchuk's filter bound for the 2x2 orientation determinant.
_ORIENT_FILTER = 3.3306690738754716e-16


def orient(a, b, c) -> int:
    """Exact sign of the CCW orientation of the triple (a, b, c).

    Returns +1 for a left turn, -1 for a right turn, 0 for collinear.
    The float evaluation is trusted only outside its error bound;
    otherwise the determinant is recomputed in exact rational arithmetic.
    """
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    detl = (bx - ax) * (cy - ay)
    detr = (by - ay) * (cx - ax)
    det = detl - detr
    bound = _ORIENT_FILTER * (abs(detl) + abs(detr))
    if det > bound:
        return 1
    if det < -bound:
        return -1
    d = (Fraction(bx) - Fraction(ax)) * (Fraction(cy) - Fraction(ay)) - (
        Fraction(by) - Fraction(ay)
    ) * (Fraction(cx) - Fraction(ax))
    return (d > 0) - (d < 0)


@dataclass(frozen=True)
class DegenerateHull:
    """Hull of collinear/coincident input: a point or a segment.

    ``points`` holds one point (all inputs coincide) or the two extreme
    points of the collinear set. Never silently dropped by callers; the
    closure widens these to thin triangles before reuse.
    """

    points: tuple

    @property
    def is_point(self) -> bool:
        return len(self.points) == 1


class ConvexPolygon:
    """Strictly convex polygon, vertices in CCW order.

    Invariants: >= 3 vertices, every consecutive vertex triple makes a
    strict left turn (no three collinear), all coordinates finite.
    """

    __slots__ = ("vs", "_edge_cache")

    def __init__(self, vertices):
        vs = np.asarray(vertices, dtype=float)
        if vs.ndim != 2 or vs.shape[1] != 2 or vs.shape[0] < 3:
            raise ValueError("need >= 3 two-dimensional vertices")
        if not np.all(np.isfinite(vs)):
            raise ValueError("vertices must be finite")
        n = vs.shape[0]
        for i in range(n):
            if orient(vs[i - 1], vs[i], vs[(i + 1) % n]) <= 0:
                raise ValueError(
                    f"vertices not in strictly convex CCW position at index {i}"
                )
        vs = _canonical(vs)
        vs.setflags(write=False)
        object.__setattr__(self, "vs", vs)
        object.__setattr__(self, "_edge_cache", None)

    @classmethod
    def _wrap(cls, vs: np.ndarray) -> "ConvexPolygon":
        # Internal fast path for vertices already known strictly convex CCW.
        p = object.__new__(cls)
        vs = _canonical(np.asarray(vs, dtype=float))
        vs.setflags(write=False)
        object.__setattr__(p, "vs", vs)
        object.__setattr__(p, "_edge_cache", None)
        return p

    @property
    def edge_data(self):
        """(starts, vectors, lengths, outward unit normals, support offsets)."""
        cached = self._edge_cache
        if cached is None:
            a = self.vs
            e = np.roll(a, -1, axis=0) - a
            ln = np.sqrt((e**2).sum(axis=1))
            normals = np.stack([e[:, 1], -e[:, 0]], axis=1) / ln[:, None]
            offsets = (normals * a).sum(axis=1)
            cached = (a, e, ln, normals, offsets)
            object.__setattr__(self, "_edge_cache", cached)
        return cached

    def __len__(self) -> int:
        return self.vs.shape[0]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ConvexPolygon)
            and self.vs.shape == other.vs.shape
            and bool(np.array_equal(self.vs, other.vs))
        )

    def __hash__(self) -> int:
        return hash(self.vs.tobytes())

    def __repr__(self) -> str:
        return f"ConvexPolygon({self.vs.tolist()!r})"

    @property
    def area(self) -> float:
        return polygon_area(self.vs)

    @property
    def bbox(self):
        lo = self.vs.min(axis=0)
        hi = self.vs.max(axis=0)
        return lo[0], lo[1], hi[0], hi[1]

    @property
    def centroid(self) -> np.ndarray:
        return self.vs.mean(axis=0)

    def radii(self):
        """(r_in, r_out) about the vertex centroid, for broad-phase tests.

        r_in is the distance from the centroid to the nearest edge (the
        inscribed radius about that point), r_out the farthest vertex.
        """
        c = self.centroid
        r_out = float(np.sqrt(((self.vs - c) ** 2).sum(axis=1)).max())
        _, _, _, normals, offsets = self.edge_data
        r_in = float((offsets - normals @ c).min())
        return max(r_in, 0.0), r_out

    def contains(self, q, tol: float = TAU_GEO) -> bool:
        """Closed containment test with absolute tolerance tol."""
        a, _, _, normals, offsets = self.edge_data
        qx, qy = float(q[0]), float(q[1])
        d = normals[:, 0] * qx + normals[:, 1] * qy - offsets
        return bool(np.all(d <= tol))

    def contains_many(self, pts, tol: float = TAU_GEO) -> np.ndarray:
        """Vectorized closed containment for an (n, 2) point array."""
        pts = np.asarray(pts, dtype=float)
        _, _, _, normals, offsets = self.edge_data
        d = pts @ normals.T - offsets[None, :]
        return np.all(d <= tol, axis=1)

    def contains_polygon(self, other: "ConvexPolygon", tol: float = TAU_GEO) -> bool:
        """True iff every vertex of other lies in self (convexity suffices)."""
        return bool(np.all(self.contains_many(other.vs, tol)))

    def contains_disk(self, center, radius: float, tol: float = TAU_GEO) -> bool:
        """True iff the closed disk lies inside the polygon.

        For a convex polygon this is exact: the center must be inside and
        every edge line at inward distance >= radius.
        """
        _, _, _, normals, offsets = self.edge_data
        c = np.asarray(center, dtype=float)
        d = normals @ c - offsets
        return bool(np.all(-d >= radius - tol))

    def distance_to_points(self, pts) -> np.ndarray:
        """Euclidean distance from each point to this (closed) polygon."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        a, e, _, _, _ = self.edge_data
        inside = self.contains_many(pts, tol=0.0)
        d = np.full(pts.shape[0], np.inf)
        for i in range(a.shape[0]):
            d = np.minimum(d, _segment_distance(pts, a[i], a[i] + e[i]))
        d[inside] = 0.0
        return d

    def translated(self, dx: float, dy: float) -> "ConvexPolygon":
        return ConvexPolygon._wrap(self.vs + np.array([dx, dy]))

    def transformed(self, matrix, shift=(0.0, 0.0)) -> "ConvexPolygon":
        """Apply an orientation-preserving linear map plus translation."""
        m = np.asarray(matrix, dtype=float)
        if np.linalg.det(m) <= 0:
            raise ValueError("transform must preserve orientation")
        return ConvexPolygon(self.vs @ m.T + np.asarray(shift, dtype=float))

    def halfplanes(self):
        """The polygon as a list of HalfPlane constraints (a.p <= b)."""
        out = []
        a, b = self.vs, np.roll(self.vs, -1, axis=0)
        for i in range(a.shape[0]):
            e = b[i] - a[i]
            normal = np.array([e[1], -e[0]])  # outward for CCW
            out.append(HalfPlane(normal, float(normal @ a[i])))
        return out


def _canonical(vs: np.ndarray) -> np.ndarray:
    # Rotate the vertex cycle to start at the lexicographic minimum, so
    # equal polygons compare equal and serialization is deterministic.
    i = int(np.lexsort((vs[:, 1], vs[:, 0]))[0])
    return np.roll(vs, -i, axis=0) if i else np.array(vs, dtype=float)


def _segment_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    e = b - a
    ee = float(e @ e)
    if ee == 0.0:
        return np.sqrt(((pts - a) ** 2).sum(axis=1))
    t = np.clip(((pts - a) @ e) / ee, 0.0, 1.0)
    proj = a + t[:, None] * e
    return np.sqrt(((pts - proj) ** 2).sum(axis=1))


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane {p : a.p <= b} with a != 0."""

    a: tuple
    b: float

    def __post_init__(self):
        a = (float(self.a[0]), float(self.a[1]))
        if a == (0.0, 0.0) or not all(math.isfinite(v) for v in a + (self.b,)):
            raise ValueError("half-plane normal must be nonzero and finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))

    def contains(self, p, tol: float = TAU_GEO) -> bool:
        scale = math.hypot(*self.a)
        return self.a[0] * p[0] + self.a[1] * p[1] <= self.b + tol * scale


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, used for windows."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError("rectangle must have positive extent")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def corners(self) -> np.ndarray:
        return np.array(
            [
                [self.xmin, self.ymin],
                [self.xmax, self.ymin],
                [self.xmax, self.ymax],
                [self.xmin, self.ymax],
            ]
        )

    def polygon(self) -> ConvexPolygon:
        return ConvexPolygon._wrap(self.corners)

    def padded(self, pad: float) -> "Rect":
        return Rect(self.xmin - pad, self.xmax + pad, self.ymin - pad, self.ymax + pad)

    def contains(self, p, tol: float = TAU_GEO) -> bool:
        return (
            self.xmin - tol <= p[0] <= self.xmax + tol
            and self.ymin - tol <= p[1] <= self.ymax + tol
        )


def polygon_area(vs) -> float:
    """Shoelace area (nonnegative for CCW input)."""
    vs = np.asarray(vs, dtype=float)
    x, y = vs[:, 0], vs[:, 1]
    return 0.5 * float(
        np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))
    )


def convex_hull(points, _prefilter_threshold: int = 1024):
    """Convex hull of >= 1 finite points.

    Returns a ConvexPolygon, or a DegenerateHull when the input is a
    single repeated point or fully collinear. Raises EmptyInput on an
    empty list. Large inputs are reduced with an approximate hull first;
    candidate retention keeps every true hull vertex, and the final chain
    uses the exact orientation predicate.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise EmptyInput("convex_hull of no points")
    if pts.ndim == 1:
        pts = pts[None, :]
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    pts = np.unique(pts, axis=0)
    if pts.shape[0] > _prefilter_threshold:
        pts = _hull_candidates(pts)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    n = pts.shape[0]
    if n == 1:
        return DegenerateHull(points=((float(pts[0, 0]), float(pts[0, 1])),))
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return DegenerateHull(
            points=(
                (float(pts[0, 0]), float(pts[0, 1])),
                (float(pts[-1, 0]), float(pts[-1, 1])),
            )
        )
    return ConvexPolygon._wrap(np.array(hull))


def _hull_candidates(pts: np.ndarray, margin: float = 1e-7) -> np.ndarray:
    # Approximate hull via qhull, then keep every point within `margin` of
    # its boundary (or outside). True hull vertices sit on the true
    # boundary, within rounding of the approximate one, so none are lost.
    from scipy.spatial import ConvexHull as _QH
    from scipy.spatial import QhullError

    try:
        qh = _QH(pts)
    except QhullError:
        return pts
    hv = pts[qh.vertices]
    a = hv
    b = np.roll(hv, -1, axis=0)
    e = b - a
    ln = np.sqrt((e**2).sum(axis=1))
    best = np.full(pts.shape[0], -np.inf)
    for i in range(a.shape[0]):
        # outward signed distance from edge i
        d = (e[i, 1] * (pts[:, 0] - a[i, 0]) - e[i, 0] * (pts[:, 1] - a[i, 1])) / (
            -ln[i]
        )
        np.maximum(best, -d, out=best)
    return pts[best >= -margin]


def widen_degenerate(d: DegenerateHull, eps: float = 1e-6) -> ConvexPolygon:
    """Widen a degenerate hull into a thin triangle of width eps."""
    if d.is_point:
        (x, y) = d.points[0]
        return ConvexPolygon([(x, y), (x + eps, y), (x, y + eps)])
    (ax, ay), (bx, by) = d.points
    ex, ey = bx - ax, by - ay
    ln = math.hypot(ex, ey)
    nx, ny = -ey / ln * eps, ex / ln * eps
    return ConvexPolygon([(ax, ay), (bx, by), ((ax + bx) / 2 + nx, (ay + by) / 2 + ny)])


def convex_intersects(p: ConvexPolygon, q: ConvexPolygon, tol: float = TAU_GEO) -> bool:
    """True iff the closed polygons intersect (boundary contact counts).

    Separating-axis test over both polygons' edge normals; the polygons
    are reported disjoint only when some axis shows a gap above tol.
    """
    pl, pb = p.vs.min(axis=0), p.vs.max(axis=0)
    ql, qb = q.vs.min(axis=0), q.vs.max(axis=0)
    if (
        ql[0] - pb[0] > tol
        or pl[0] - qb[0] > tol
        or ql[1] - pb[1] > tol
        or pl[1] - qb[1] > tol
    ):
        return False
    return not (_sat_separates(p, q.vs, tol) or _sat_separates(q, p.vs, tol))


def _sat_separates(a: ConvexPolygon, bvs: np.ndarray, tol: float) -> bool:
    _, _, _, normals, off = a.edge_data
    proj = bvs @ normals.T
    gap = proj.min(axis=0) - off
    return bool(np.any(gap > tol))


def halfplane_intersection(hs, window: ConvexPolygon, tol: float = TAU_GEO):
    """window intersected with all half-planes; ConvexPolygon or None.

    Sutherland-Hodgman clipping of the convex window against each
    constraint. Every surviving vertex satisfies every constraint within
    tol; slivers thinner than tol collapse to empty.
    """
    vs = np.array(window.vs, dtype=float)
    for h in hs:
        vs = _clip(vs, np.asarray(h.a, dtype=float), h.b)
        if vs.shape[0] < 3:
            return None
    vs = _clean_ring(vs, tol)
    if vs is None:
        return None
    return ConvexPolygon._wrap(vs)


def clip_convex(p: ConvexPolygon, q: ConvexPolygon, tol: float = TAU_GEO):
    """The intersection p ∩ q as a ConvexPolygon, or None when empty."""
    return halfplane_intersection(q.halfplanes(), p, tol)


def _clip(vs: np.ndarray, a: np.ndarray, b: float) -> np.ndarray:
    d = vs @ a - b
    n = vs.shape[0]
    out = []
    for i in range(n):
        j = (i + 1) % n
        di, dj = d[i], d[j]
        if di <= 0.0:
            out.append(vs[i])
        if (di < 0.0) != (dj < 0.0) and di != dj:
            t = di / (di - dj)
            if 0.0 < t < 1.0:
                out.append(vs[i] + t * (vs[j] - vs[i]))
    return np.array(out) if out else np.empty((0, 2))


def _clean_ring(vs: np.ndarray, tol: float):
    # Merge near-duplicate consecutive vertices, then drop vertices that
    # do not make a strict left turn (exact predicate).
    keep = [vs[0]]
    for p in vs[1:]:
        if max(abs(p[0] - keep[-1][0]), abs(p[1] - keep[-1][1])) > tol:
            keep.append(p)
    if len(keep) >= 2 and max(
        abs(keep[0][0] - keep[-1][0]), abs(keep[0][1] - keep[-1][1])
    ) <= tol:
        keep.pop()
    changed = True
    while changed and len(keep) >= 3:
        changed = False
        for i in range(len(keep)):
            a = keep[i - 1]
            b = keep[i]
            c = keep[(i + 1) % len(keep)]
            if orient(a, b, c) <= 0:
                keep.pop(i)
                changed = True
                break
    if len(keep) < 3:
        return None
    return np.array(keep)


def minkowski_sum(base, shape: ConvexPolygon):
    """Minkowski sum of a hull result (polygon or degenerate) with shape.

    Computed as the exact hull of pairwise vertex sums; used to rebuild
    hulls of unions of translated copies of one convex shape, since
    hull(U_i (c_i + S)) == hull({c_i}) ⊕ S.
    """
    if isinstance(base, DegenerateHull):
        anchors = np.asarray(base.points, dtype=float)
    else:
        anchors = base.vs
    pts = (anchors[:, None, :] + shape.vs[None, :, :]).reshape(-1, 2)
    out = convex_hull(pts)
    if isinstance(out, DegenerateHull):  # cannot happen: shape has area
        raise ValueError("minkowski sum degenerated")
    return out


def regular_ngon(center, radius: float, m: int) -> ConvexPolygon:
    """Regular m-gon circumscribed about the circle (apothem = radius).

    All m-gons produced here share one orientation, so equal-radius disks
    discretize to translates of a single polygon.
    """
    if m < 3:
        raise ValueError("m >= 3")
    k = np.arange(m)
    ang = (2 * k + 1) * math.pi / m
    rr = radius / math.cos(math.pi / m)
    cx, cy = float(center[0]), float(center[1])
    vs = np.stack([cx + rr * np.cos(ang), cy + rr * np.sin(ang)], axis=1)
    return ConvexPolygon._wrap(vs)


def ngon_disks_intersect(
    c1, r1: float, c2, r2: float, m: int, tol: float = TAU_GEO
) -> bool:
    """Intersection test for two same-orientation circumscribed m-gons.

    Requires even m (the m-gon is then centrally symmetric, so the test
    reduces to membership of the center offset in the (r1+r2)-gon).
    """
    if m % 2:
        raise ValueError("even m required")
    dx = float(c2[0]) - float(c1[0])
    dy = float(c2[1]) - float(c1[1])
    d = math.hypot(dx, dy)
    if d == 0.0:
        return True
    theta = math.atan2(dy, dx)
    sector = 2 * math.pi / m
    rem = theta % sector
    delta = min(rem, sector - rem)  # offset from nearest edge-midpoint direction
    # boundary radius of the circumscribed (r1+r2) m-gon at angle theta
    boundary = (r1 + r2) / math.cos(delta)
    return d <= boundary + tol


def segment_distance_to_origin(b, c) -> float:
    """Distance from the origin to the closed segment [b, c]."""
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    e = c - b
    ee = float(e @ e)
    if ee == 0.0:
        return float(math.hypot(*b))
    t = min(1.0, max(0.0, float(-(b @ e)) / ee))
    p = b + t * e
    return float(math.hypot(*p))
