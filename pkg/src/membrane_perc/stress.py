"""Planar framework statics: equilibrium residuals, spider-web
feasibility, Hooke energy, and random triangular-lattice instances.

A framework is a planar graph realization with a pinned vertex subset.
An equilibrium stress assigns s_ij = s_ji to edges so the weighted edge
vectors cancel at every unpinned vertex; a spider web carries such a
stress with every s_ij > 0 (normalized here to s_ij >= 1, valid because
the feasible set is a cone).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import ParseError

TAU_LP = 1e-9


@dataclass(frozen=True)
class Framework:
    """Vertices, undirected edges (index pairs), pinned vertex indices."""

    vertices: tuple
    edges: tuple
    pinned: frozenset

    def __post_init__(self):
        vs = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", vs)
        n = len(vs)
        seen = set()
        edges = []
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError("self-loop edge")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError("edge endpoint out of range")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            if vs[i] == vs[j]:
                raise ValueError(f"edge {key} endpoints coincide")
            seen.add(key)
            edges.append(key)
        object.__setattr__(self, "edges", tuple(edges))
        pinned = frozenset(int(i) for i in self.pinned)
        if any(not (0 <= i < n) for i in pinned):
            raise ValueError("pinned index out of range")
        object.__setattr__(self, "pinned", pinned)

    @property
    def positions(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def edge_lengths(self) -> np.ndarray:
        p = self.positions
        e = np.asarray(self.edges, dtype=int)
        return np.sqrt(((p[e[:, 0]] - p[e[:, 1]]) ** 2).sum(axis=1))


def equilibrium_residual(fw: Framework, s) -> tuple:
    """Per-unpinned-vertex residual sum_j s_ij (v_j - v_i).

    Returns (max_norm, {vertex_index: residual 2-vector}).
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (len(fw.edges),):
        raise ValueError("one stress value per edge required")
    p = fw.positions
    res = np.zeros_like(p)
    for k, (i, j) in enumerate(fw.edges):
        d = p[j] - p[i]
        res[i] += s[k] * d
        res[j] -= s[k] * d
    out = {
        i: res[i].copy() for i in range(len(fw.vertices)) if i not in fw.pinned
    }
    max_norm = max((float(np.hypot(*v)) for v in out.values()), default=0.0)
    return max_norm, out


def spider_web_lp(fw: Framework, margin: float = 1.0):
    """Find a stress with equilibrium at unpinned vertices and s_e >= margin.

    Returns the stress array, or None when no all-positive equilibrium
    tension exists. The margin normalization is exact for existence: the
    feasible stresses form a cone, so some s > 0 iff some s >= 1.
    """
    ne = len(fw.edges)
    unpinned_count = len(fw.vertices) - len(fw.pinned)
    if ne == 0:
        # A web needs strands: edgeless frameworks with unpinned vertices
        # carry no all-positive tension.
        return None if unpinned_count else np.zeros(0)
    p = fw.positions
    unpinned = [i for i in range(len(fw.vertices)) if i not in fw.pinned]
    if not unpinned:
        return np.full(ne, margin)
    row_of = {v: r for r, v in enumerate(unpinned)}
    a_eq = np.zeros((2 * len(unpinned), ne))
    for k, (i, j) in enumerate(fw.edges):
        d = p[j] - p[i]
        if i in row_of:
            a_eq[2 * row_of[i], k] = d[0]
            a_eq[2 * row_of[i] + 1, k] = d[1]
        if j in row_of:
            a_eq[2 * row_of[j], k] = -d[0]
            a_eq[2 * row_of[j] + 1, k] = -d[1]
    res = linprog(
        c=np.ones(ne),
        A_eq=a_eq,
        b_eq=np.zeros(a_eq.shape[0]),
        bounds=[(margin, None)] * ne,
        method="highs",
    )
    if res.status != 0:
        return None
    return np.asarray(res.x, dtype=float)


@dataclass(frozen=True)
class HookeNetwork:
    """Framework plus per-edge rest lengths and spring constants."""

    framework: Framework
    rest_lengths: tuple
    spring_constants: tuple
    present: tuple = ()

    def __post_init__(self):
        ne = len(self.framework.edges)
        rl = tuple(float(v) for v in self.rest_lengths)
        sk = tuple(float(v) for v in self.spring_constants)
        pres = tuple(bool(v) for v in (self.present or (True,) * ne))
        if len(rl) != ne or len(sk) != ne or len(pres) != ne:
            raise ValueError("per-edge arrays must match the edge count")
        if any(v <= 0 for v in rl) or any(v <= 0 for v in sk):
            raise ValueError("rest lengths and spring constants must be > 0")
        object.__setattr__(self, "rest_lengths", rl)
        object.__setattr__(self, "spring_constants", sk)
        object.__setattr__(self, "present", pres)


def hooke_energy(net: HookeNetwork, positions) -> float:
    """Bar-network energy: (1/2) sum over ordered pairs of
    a_ij n_ij (l_ij - l0_ij)^2, i.e. a_ij (l_ij - l0_ij)^2 per bond.
    """
    p = np.asarray(positions, dtype=float)
    if p.shape != (len(net.framework.vertices), 2):
        raise ValueError("positions for all vertices required")
    total = 0.0
    for k, (i, j) in enumerate(net.framework.edges):
        if not net.present[k]:
            continue
        l = float(np.hypot(*(p[j] - p[i])))
        total += net.spring_constants[k] * (l - net.rest_lengths[k]) ** 2
    return total


def triangular_lattice(n: int, p: float, seed: int) -> Framework:
    """n x n rhombic patch of the triangular lattice with pinned boundary.

    Each edge of the full patch is kept independently with probability p
    (deterministic per seed). Vertex (i, j) sits at (i + j/2, j*sqrt(3)/2);
    boundary vertices are those with i or j in {0, n-1}.
    """
    if n < 2:
        raise ValueError("n >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p in [0, 1]")
    rng = np.random.default_rng(seed)
    idx = lambda i, j: j * n + i
    verts = [
        (i + 0.5 * j, j * math.sqrt(3.0) / 2.0) for j in range(n) for i in range(n)
    ]
    candidates = []
    for j in range(n):
        for i in range(n):
            if i + 1 < n:
                candidates.append((idx(i, j), idx(i + 1, j)))
            if j + 1 < n:
                candidates.append((idx(i, j), idx(i, j + 1)))
            if i - 1 >= 0 and j + 1 < n:
                candidates.append((idx(i, j), idx(i - 1, j + 1)))
    keep = rng.random(len(candidates)) < p
    edges = [e for e, k in zip(candidates, keep) if k]
    pinned = frozenset(
        idx(i, j)
        for j in range(n)
        for i in range(n)
        if i in (0, n - 1) or j in (0, n - 1)
    )
    return Framework(vertices=tuple(verts), edges=tuple(edges), pinned=pinned)


# ---------------------------------------------------------------------------
# Framework files (JSON).


def framework_to_dict(fw: Framework, stress=None) -> dict:
    doc = {
        "vertices": [list(v) for v in fw.vertices],
        "edges": [list(e) for e in fw.edges],
        "pinned": sorted(fw.pinned),
    }
    if stress is not None:
        doc["stress"] = [float(v) for v in stress]
    return doc


def framework_from_dict(doc: dict):
    try:
        fw = Framework(
            vertices=tuple(tuple(v) for v in doc["vertices"]),
            edges=tuple(tuple(e) for e in doc["edges"]),
            pinned=frozenset(doc.get("pinned", ())),
        )
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r} in framework") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"invalid framework document: {exc}") from exc
    stress = doc.get("stress")
    if stress is not None:
        stress = np.asarray(stress, dtype=float)
        if stress.shape != (len(fw.edges),):
            raise ParseError("stress array must match edge count")
    return fw, stress


def write_framework(fw: Framework, path, stress=None) -> None:
    with open(path, "w") as fh:
        json.dump(framework_to_dict(fw, stress), fh, indent=1)
        fh.write("\n")


def read_framework(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return framework_from_dict(doc)
