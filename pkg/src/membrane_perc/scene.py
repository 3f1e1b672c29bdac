"""Hole models and random scene generation.

A scene is a rectangular core window plus a list of convex holes (disks
or polygons) sampled on the window inflated by ``pad`` on each side:
hole centers follow a Poisson point process of rate lambda, shapes are
IID and independent of the centers. Generation is a pure function of
(parameters, seed); per-trial streams are derived with :func:`mix64`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidRate, ParseError, TooCoarse
from .geom import ConvexPolygon, Rect, convex_hull, regular_ngon

_MASK64 = (1 << 64) - 1
_MAX_POLY_VERTICES = 32


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold integers into one 64-bit stream seed (splitmix64 rounds).

    Used to derive independent per-trial seeds from a master seed, so a
    sweep re-partitioned across workers reproduces identical streams.
    """
    state = 0
    for p in parts:
        state = _splitmix64(state ^ (int(p) & _MASK64))
    return state


@dataclass(frozen=True)
class HoleShape:
    """A convex hole shape: a disk of given radius, or polygon offsets.

    Polygon offsets are vertex coordinates relative to the hole center;
    they must form a valid ConvexPolygon containing the origin.
    """

    kind: str  # "disk" | "polygon"
    radius: float = 0.0
    offsets: tuple = ()

    def __post_init__(self):
        if self.kind == "disk":
            if not self.radius > 0:
                raise ValueError("disk radius must be > 0")
        elif self.kind == "polygon":
            poly = ConvexPolygon(self.offsets)  # validates convexity
            if not poly.contains((0.0, 0.0)):
                raise ValueError("polygon offsets must contain the origin")
            object.__setattr__(
                self, "offsets", tuple(tuple(v) for v in np.asarray(self.offsets))
            )
        else:
            raise ValueError(f"unknown shape kind {self.kind!r}")

    @property
    def inscribed_radius(self) -> float:
        """Distance from the center to the shape boundary (min over directions)."""
        if self.kind == "disk":
            return self.radius
        vs = np.asarray(self.offsets, dtype=float)
        a, b = vs, np.roll(vs, -1, axis=0)
        best = math.inf
        for i in range(vs.shape[0]):
            e = b[i] - a[i]
            ee = float(e @ e)
            t = min(1.0, max(0.0, float(-(a[i] @ e)) / ee))
            p = a[i] + t * e
            best = min(best, math.hypot(p[0], p[1]))
        return best

    def polygon(self, center, m: int = 64) -> ConvexPolygon:
        """The shape as a polygon at `center` (disks as circumscribed m-gons)."""
        if self.kind == "disk":
            return regular_ngon(center, self.radius, m)
        vs = np.asarray(self.offsets, dtype=float) + np.asarray(center, dtype=float)
        return ConvexPolygon(vs)


@dataclass(frozen=True)
class Hole:
    id: int
    center: tuple
    shape: HoleShape


@dataclass(frozen=True)
class ShapeDistribution:
    """IID law for hole shapes.

    kinds:
      fixed_disk        -- every hole is a disk of radius `radius`
      disk_radius_law   -- disk with radius uniform on [rmin, rmax]
      random_polygon    -- vertex count uniform on [nmin, nmax] (capped at
                           32), angles sorted uniform on [0, 2pi), radial
                           coordinates uniform on [rmin, rmax]; samples
                           whose hull is degenerate or misses the origin
                           are redrawn, preserving IID-ness conditional
                           on validity
    """

    kind: str = "fixed_disk"
    radius: float = 1.0
    rmin: float = 0.5
    rmax: float = 1.5
    nmin: int = 4
    nmax: int = 8

    def __post_init__(self):
        if self.kind not in ("fixed_disk", "disk_radius_law", "random_polygon"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "fixed_disk" and not self.radius > 0:
            raise ValueError("fixed disk radius must be > 0")
        if self.kind in ("disk_radius_law", "random_polygon"):
            if not (0 < self.rmin <= self.rmax):
                raise ValueError("need 0 < rmin <= rmax")
        if self.kind == "random_polygon":
            if not (3 <= self.nmin <= self.nmax <= _MAX_POLY_VERTICES):
                raise ValueError("vertex count law must lie in [3, 32]")

    def sample(self, rng: np.random.Generator) -> HoleShape:
        if self.kind == "fixed_disk":
            return HoleShape("disk", radius=self.radius)
        if self.kind == "disk_radius_law":
            return HoleShape("disk", radius=float(rng.uniform(self.rmin, self.rmax)))
        while True:
            n = int(rng.integers(self.nmin, self.nmax + 1))
            ang = np.sort(rng.uniform(0.0, 2 * math.pi, size=n))
            rad = rng.uniform(self.rmin, self.rmax, size=n)
            pts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
            hull = convex_hull(pts)
            if isinstance(hull, ConvexPolygon) and hull.contains((0.0, 0.0)):
                return HoleShape("polygon", offsets=tuple(map(tuple, hull.vs)))

    def prob_inscribed_at_least(self, r: float) -> float:
        """P(inscribed radius >= r) where available in closed form."""
        if self.kind == "fixed_disk":
            return 1.0 if self.radius >= r else 0.0
        if self.kind == "disk_radius_law":
            if r <= self.rmin:
                return 1.0
            if r > self.rmax:
                return 0.0
            return (self.rmax - r) / (self.rmax - self.rmin)
        raise NotImplementedError("no closed form for random_polygon")


@dataclass(frozen=True)
class Scene:
    """A finite window plus generation-0 holes."""

    window: Rect
    pad: float
    lam: float
    seed: int
    holes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidRate(f"lambda must be > 0, got {self.lam}")
        if self.pad < 0:
            raise ValueError("pad must be >= 0")
        padded = self.window.padded(self.pad) if self.pad else self.window
        for h in self.holes:
            if not padded.contains(h.center):
                raise ValueError(f"hole {h.id} center outside padded window")

    @property
    def padded_window(self) -> Rect:
        return self.window.padded(self.pad) if self.pad else self.window

    def hole_by_id(self, hole_id: int):
        for h in self.holes:
            if h.id == hole_id:
                return h
        return None

    def polygons(self, m: int = 64):
        """Generation-0 defect polygons (disks as circumscribed m-gons)."""
        return [h.shape.polygon(h.center, m) for h in self.holes]


def default_pad(window: Rect) -> float:
    """Default padding: a quarter of the longer window side."""
    return 0.25 * max(window.width, window.height)


def sample_poisson_scene(
    window: Rect,
    pad: float,
    lam: float,
    dist: ShapeDistribution,
    seed: int,
) -> Scene:
    """Sample a Poisson scene: N ~ Poisson(lam * padded area), centers
    uniform IID on the padded window, shapes IID from dist.
    """
    if not lam > 0:
        raise InvalidRate(f"lambda must be > 0, got {lam}")
    padded = window.padded(pad) if pad else window
    rng = np.random.default_rng(seed)
    n = int(rng.poisson(lam * padded.area))
    xs = rng.uniform(padded.xmin, padded.xmax, size=n)
    ys = rng.uniform(padded.ymin, padded.ymax, size=n)
    holes = tuple(
        Hole(i, (float(xs[i]), float(ys[i])), dist.sample(rng)) for i in range(n)
    )
    return Scene(window=window, pad=pad, lam=lam, seed=int(seed), holes=holes)


def thin_scene(scene: Scene, r: float) -> Scene:
    """Keep exactly the holes with inscribed radius >= r.

    The surviving centers again form a Poisson process, with rate
    lam * P(inscribed radius >= r).
    """
    if not r > 0:
        raise ValueError("thinning radius must be > 0")
    kept = tuple(h for h in scene.holes if h.shape.inscribed_radius >= r)
    return replace(scene, holes=kept)


def discretize(scene: Scene, m: int) -> Scene:
    """Replace every disk by its circumscribed regular m-gon (m >= 8)."""
    if m < 8:
        raise TooCoarse(f"need m >= 8 polygon sides, got {m}")
    holes = []
    for h in scene.holes:
        if h.shape.kind == "disk":
            poly = regular_ngon((0.0, 0.0), h.shape.radius, m)
            shape = HoleShape("polygon", offsets=tuple(map(tuple, poly.vs)))
            holes.append(Hole(h.id, h.center, shape))
        else:
            holes.append(h)
    return replace(scene, holes=tuple(holes))


# ---------------------------------------------------------------------------
# Scene files: JSON with repr-exact floats, so write/read round-trips
# reproduce every coordinate bit for bit.


def scene_to_dict(scene: Scene) -> dict:
    holes = []
    for h in scene.holes:
        entry = {"id": h.id, "center": list(h.center), "kind": h.shape.kind}
        if h.shape.kind == "disk":
            entry["radius"] = h.shape.radius
        else:
            entry["vertices"] = [list(v) for v in h.shape.offsets]
        holes.append(entry)
    w = scene.window
    return {
        "window": {"xmin": w.xmin, "xmax": w.xmax, "ymin": w.ymin, "ymax": w.ymax},
        "pad": scene.pad,
        "lambda": scene.lam,
        "seed": scene.seed,
        "holes": holes,
    }


def scene_from_dict(doc: dict) -> Scene:
    def need(mapping, key, where):
        if key not in mapping:
            raise ParseError(f"missing field {key!r} in {where}")
        return mapping[key]

    w = need(doc, "window", "scene")
    try:
        window = Rect(
            float(need(w, "xmin", "window")),
            float(need(w, "xmax", "window")),
            float(need(w, "ymin", "window")),
            float(need(w, "ymax", "window")),
        )
        pad = float(need(doc, "pad", "scene"))
        lam = float(need(doc, "lambda", "scene"))
        seed = int(need(doc, "seed", "scene"))
        holes = []
        for k, e in enumerate(need(doc, "holes", "scene")):
            where = f"holes[{k}]"
            hid = int(need(e, "id", where))
            cx, cy = need(e, "center", where)
            kind = need(e, "kind", where)
            if kind == "disk":
                shape = HoleShape("disk", radius=float(need(e, "radius", where)))
            elif kind == "polygon":
                vs = need(e, "vertices", where)
                shape = HoleShape("polygon", offsets=tuple(tuple(map(float, v)) for v in vs))
            else:
                raise ParseError(f"unknown hole kind {kind!r} in {where}")
            holes.append(Hole(hid, (float(cx), float(cy)), shape))
        return Scene(window=window, pad=pad, lam=lam, seed=seed, holes=tuple(holes))
    except ParseError:
        raise
    except (TypeError, ValueError, InvalidRate) as exc:
        raise ParseError(f"invalid scene document: {exc}") from exc


def write_scene(scene: Scene, path) -> None:
    with open(path, "w") as fh:
        json.dump(scene_to_dict(scene), fh, indent=1)
        fh.write("\n")


def read_scene(path) -> Scene:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return scene_from_dict(doc)
