"""Convex polytope kernel and the Minkowski cell-volume optimizer.

Polytopes are given by halfspaces ``{p : p . n <= b}``.  Vertices come from
solving every d-subset of boundary hyperplanes, facet measures from the same
construction restricted to each supporting hyperplane (one dimension lower),
and volumes from the pyramid decomposition around the vertex centroid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConvergenceError, InputError

EPS_VERT = 1e-9
EPS_GEOM = 1e-8
FEAS_REL = 1e-9


def eps_feas(offset: float) -> float:
    """Feasibility slack for a constraint with the given (unit-normal) offset."""
    return FEAS_REL * (1.0 + abs(offset))


class GeometryError(InputError):
    pass


class MinkowskiIterationError(ConvergenceError):
    """Raised when the Minkowski ascent hits its iteration cap.

    ``best`` holds the best iterate found so far as a ``MinkowskiSolution``.
    """

    def __init__(self, message: str, best: "MinkowskiSolution", spread: float):
        super().__init__(message)
        self.best = best
        self.spread = spread


@dataclass(frozen=True)
class Halfspace:
    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float).reshape(-1)
        if not np.all(np.isfinite(n)) or np.linalg.norm(n) <= 0.0:
            raise GeometryError("halfspace normal must be a nonzero finite vector")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    def unit(self) -> tuple[np.ndarray, float]:
        s = float(np.linalg.norm(self.normal))
        return self.normal / s, self.offset / s


@dataclass(frozen=True)
class Facet:
    normal: np.ndarray
    area: float
    vertex_indices: tuple[int, ...]


@dataclass(frozen=True)
class Polytope:
    dim: int
    halfspaces: tuple[Halfspace, ...]
    vertices: np.ndarray
    facets: tuple[Facet, ...]
    volume: float
    unbounded: bool = False

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0 and not self.unbounded

    @property
    def has_interior(self) -> bool:
        return self.volume > 0.0

    def centroid(self) -> np.ndarray:
        if len(self.vertices) == 0:
            raise GeometryError("empty polytope has no centroid")
        return self.vertices.mean(axis=0)

    def facet_area(self, direction, tol: float = 1e-9) -> float:
        """Area of the facet whose outer unit normal is parallel to ``direction`` (0 if absent)."""
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        for f in self.facets:
            if np.linalg.norm(f.normal - d) <= tol:
                return f.area
        return 0.0

    def closure_residual(self) -> np.ndarray:
        """Vector sum of area times unit normal over facets; zero for closed bodies."""
        out = np.zeros(self.dim)
        for f in self.facets:
            out += f.area * f.normal
        return out

    def contains(self, point, slack: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float)
        for h in self.halfspaces:
            n, b = h.unit()
            if float(n @ p) > b + eps_feas(b) + slack:
                return False
        return True

    def contains_many(self, points: np.ndarray, slack: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        ok = np.ones(len(pts), dtype=bool)
        for h in self.halfspaces:
            n, b = h.unit()
            ok &= pts @ n <= b + eps_feas(b) + slack
        return ok

    def translate(self, shift) -> "Polytope":
        s = np.asarray(shift, dtype=float)
        hs = [Halfspace(h.normal, h.offset + float(h.normal @ s)) for h in self.halfspaces]
        return intersect_halfspaces(hs, self.dim)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "halfspaces": [{"n": h.normal.tolist(), "b": h.offset} for h in self.halfspaces],
            "vertices": self.vertices.tolist(),
            "volume": self.volume,
            "unbounded": self.unbounded,
            "facets": [{"n": f.normal.tolist(), "area": f.area} for f in self.facets],
        }


def _unit_rows(halfspaces: Sequence[Halfspace]) -> tuple[np.ndarray, np.ndarray]:
    normals = []
    offsets = []
    for h in halfspaces:
        n, b = h.unit()
        normals.append(n)
        offsets.append(b)
    return np.array(normals, dtype=float), np.array(offsets, dtype=float)


def _dedupe_planes(N: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # parallel same-orientation constraints: only the tightest one matters
    keep_n: list[np.ndarray] = []
    keep_b: list[float] = []
    for n, off in zip(N, b):
        for i, m in enumerate(keep_n):
            if np.linalg.norm(n - m) <= 1e-12:
                keep_b[i] = min(keep_b[i], off)
                break
        else:
            keep_n.append(n)
            keep_b.append(off)
    return np.array(keep_n).reshape(-1, N.shape[1]), np.array(keep_b)


def _dedupe_points(points: np.ndarray, tol: float = EPS_VERT) -> np.ndarray:
    n = len(points)
    if n <= 1:
        return points.reshape(n, -1)
    scale = 1.0 + np.max(np.abs(points), axis=1)
    D = np.max(np.abs(points[:, None, :] - points[None, :, :]), axis=2)
    close = D <= tol * np.maximum(scale[:, None], scale[None, :])
    keep = []
    dropped = np.zeros(n, dtype=bool)
    for i in range(n):
        if dropped[i]:
            continue
        keep.append(i)
        dropped |= close[i]
    return points[keep]


def _enumerate_vertices(N: np.ndarray, b: np.ndarray) -> np.ndarray:
    m, d = N.shape
    if m < d:
        return np.zeros((0, d))
    combos = np.array(list(itertools.combinations(range(m), d)), dtype=int)
    mats = N[combos]
    rhs = b[combos]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        dets = np.linalg.det(mats)
    ok = np.abs(dets) > 1e-12
    if not np.any(ok):
        return np.zeros((0, d))
    sol = np.linalg.solve(mats[ok], rhs[ok][..., None])[..., 0]
    slack = sol @ N.T - b[None, :]
    feas = np.all(slack <= FEAS_REL * (1.0 + np.abs(b))[None, :], axis=1)
    pts = sol[feas]
    if len(pts) == 0:
        return np.zeros((0, d))
    # order deterministically before deduplication
    order = np.lexsort(pts.T[::-1])
    return _dedupe_points(pts[order])


def _recession_trivial(N: np.ndarray) -> bool:
    """True iff the cone {w : N w <= 0} is {0} (bounded polytope when nonempty)."""
    d = N.shape[1]
    if np.linalg.matrix_rank(N) < d:
        return False
    box_n = np.vstack([N, np.eye(d), -np.eye(d)])
    box_b = np.concatenate([np.zeros(len(N)), np.ones(2 * d)])
    verts = _enumerate_vertices(box_n, box_b)
    return bool(np.all(np.abs(verts) <= 1e-9))


def _plane_basis(n: np.ndarray) -> np.ndarray:
    """Orthonormal basis (rows) of the hyperplane orthogonal to unit vector n."""
    d = len(n)
    # Householder-free: SVD of the projector gives a deterministic basis up to sign
    _, _, vt = np.linalg.svd(n.reshape(1, -1))
    basis = vt[1:]
    # fix signs for determinism
    for i in range(basis.shape[0]):
        j = int(np.argmax(np.abs(basis[i])))
        if basis[i, j] < 0:
            basis[i] = -basis[i]
    return basis.reshape(d - 1, d)


def _measure(N: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, list[tuple[np.ndarray, float, tuple[int, ...]]], float]:
    """Vertices, facets and volume of a bounded polytope given by unit rows.

    Works in any dimension by recursing into supporting hyperplanes for the
    facet measures.
    """
    m, d = N.shape
    verts = _enumerate_vertices(N, b) if d > 1 else _interval_vertices(N, b)
    if len(verts) == 0:
        return verts, [], 0.0
    if d == 1:
        lo, hi = float(verts.min()), float(verts.max())
        facets = []
        if hi - lo > EPS_VERT:
            facets = [
                (np.array([-1.0]), 1.0, (int(np.argmin(verts[:, 0])),)),
                (np.array([1.0]), 1.0, (int(np.argmax(verts[:, 0])),)),
            ]
        return verts, facets, hi - lo
    c = verts.mean(axis=0)
    centered = verts - c
    scale = 1.0 + float(np.max(np.abs(verts)))
    sv = np.linalg.svd(centered, compute_uv=False)
    if len(sv) < d or sv[d - 1] <= 1e-12 * scale:
        return verts, [], 0.0
    facets = []
    vol = 0.0
    for k in range(m):
        n, off = N[k], b[k]
        on = np.abs(verts @ n - off) <= 1e-8 * (1.0 + abs(off))
        idx = tuple(int(i) for i in np.nonzero(on)[0])
        if not idx:
            area = 0.0
        else:
            area = _facet_measure(N, b, k)
        facets.append((n.copy(), area, idx))
        vol += area * (off - float(n @ c)) / d
    return verts, facets, vol


def _interval_vertices(N: np.ndarray, b: np.ndarray) -> np.ndarray:
    lo, hi = -math.inf, math.inf
    for n, off in zip(N[:, 0], b):
        if n > 0:
            hi = min(hi, off / n)
        else:
            lo = max(lo, off / n)
    if lo > hi + EPS_VERT * (1 + abs(hi)):
        return np.zeros((0, 1))
    if hi <= lo:
        return np.array([[hi]])
    return np.array([[lo], [hi]])


def _facet_frame(N: np.ndarray, b: np.ndarray, k: int):
    """Row ``k``'s hyperplane as a polytope in its own coordinates.

    Returns ``(basis, origin, R, r)`` with points ``origin + z @ basis`` for
    ``R z <= r``, or None when the facet is empty.
    """
    n, off = N[k], b[k]
    d = len(n)
    basis = _plane_basis(n)
    origin = n * off
    rows = []
    offs = []
    for j in range(len(N)):
        if j == k:
            continue
        proj = basis @ N[j]
        rhs = b[j] - float(N[j] @ origin)
        s = float(np.linalg.norm(proj))
        if s <= 1e-12:
            if rhs < -eps_feas(b[j]):
                return None
            continue
        rows.append(proj / s)
        offs.append(rhs / s)
    if len(rows) < d:
        return None
    R, r = _dedupe_planes(np.array(rows), np.array(offs))
    return basis, origin, R, r


def _facet_measure(N: np.ndarray, b: np.ndarray, k: int) -> float:
    frame = _facet_frame(N, b, k)
    if frame is None:
        return 0.0
    # a face of a bounded polytope is bounded, so no recession test is needed here
    _, _, vol = _measure(frame[2], frame[3])
    return vol


def intersect_halfspaces(halfspaces: Iterable[Halfspace], dim: int) -> Polytope:
    """Intersect halfspaces in R^dim.

    Unbounded regions get ``unbounded=True`` and volume ``inf`` (or 0 when the
    region has empty interior).  Infeasible or flat regions come back with
    volume 0 rather than raising.
    """
    hs = tuple(halfspaces)
    for h in hs:
        if len(h.normal) != dim:
            raise GeometryError(f"halfspace normal has dimension {len(h.normal)}, expected {dim}")
    if not hs:
        return Polytope(dim, hs, np.zeros((0, dim)), (), math.inf, True)
    N, b = _unit_rows(hs)
    N, b = _dedupe_planes(N, b)
    if not _recession_trivial(N):
        verts = _enumerate_vertices(N, b) if dim > 1 else _interval_vertices(N, b)
        R = 1e6 * (1.0 + float(np.max(np.abs(b))))
        NB = np.vstack([N, np.eye(dim), -np.eye(dim)])
        bb = np.concatenate([b, np.full(2 * dim, R)])
        _, _, clipped = _measure(NB, bb)
        vol = math.inf if clipped > 0 else 0.0
        return Polytope(dim, hs, verts, (), vol, True)
    verts, raw, vol = _measure(N, b)
    facets = tuple(Facet(n, float(a), idx) for n, a, idx in raw)
    return Polytope(dim, hs, verts, facets, float(max(vol, 0.0)), False)


def hausdorff_vertices(a: Polytope, b: Polytope) -> float:
    """Symmetric Hausdorff distance between the two vertex sets."""
    if len(a.vertices) == 0 or len(b.vertices) == 0:
        return 0.0 if len(a.vertices) == len(b.vertices) else math.inf
    D = np.linalg.norm(a.vertices[:, None, :] - b.vertices[None, :, :], axis=2)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


# ---------------------------------------------------------------------------
# Minkowski cell optimization


@dataclass(frozen=True)
class MinkowskiSolution:
    fan: tuple[np.ndarray, ...]
    feasible: bool
    c: np.ndarray
    polytope: Polytope | None
    constant: float
    alpha: float
    iterations: int = 0
    spread: float = field(default=math.nan)

    def to_dict(self) -> dict:
        return {
            "fan": [v.tolist() for v in self.fan],
            "feasible": self.feasible,
            "c": self.c.tolist(),
            "constant": self.constant,
            "alpha": self.alpha,
            "iterations": self.iterations,
            "polytope": self.polytope.to_dict() if self.polytope is not None else None,
        }


def merge_fan(fan: Sequence) -> list[np.ndarray]:
    """Merge parallel same-direction vectors by summing their lengths."""
    merged: list[np.ndarray] = []
    for v in fan:
        v = np.asarray(v, dtype=float)
        if np.linalg.norm(v) <= 0:
            raise GeometryError("fan vectors must be nonzero")
        u = v / np.linalg.norm(v)
        for i, w in enumerate(merged):
            if np.linalg.norm(u - w / np.linalg.norm(w)) <= 1e-12:
                merged[i] = w + v
                break
        else:
            merged.append(v.copy())
    return merged


def fan_feasible(fan: Sequence[np.ndarray]) -> bool:
    V = np.array(fan, dtype=float)
    d = V.shape[1]
    if np.linalg.matrix_rank(V) < d:
        return False
    total = float(np.sum(np.linalg.norm(V, axis=1)))
    return bool(np.linalg.norm(V.sum(axis=0)) <= EPS_GEOM * max(total, 1.0))


def _cell(fan: Sequence[np.ndarray], c: np.ndarray) -> Polytope:
    d = len(fan[0])
    return intersect_halfspaces([Halfspace(v, ck) for v, ck in zip(fan, c)], d)


def _ratios(fan, poly: Polytope) -> np.ndarray:
    return np.array([poly.facet_area(v) / np.linalg.norm(v) for v in fan])


def _spread(r: np.ndarray) -> float:
    m = float(np.mean(r))
    if m <= 0:
        return math.inf
    return float((r.max() - r.min()) / m)


def minkowski_constant(fan: Sequence, max_iter: int = 10000, rtol: float = 1e-8) -> MinkowskiSolution:
    """Maximize the volume of ``{p : p . v <= c_v}`` subject to ``sum c_v = 1``.

    The gradient of the volume in ``c_k`` is ``area(F_k)/|v_k|``.  We ascend
    ``vol^(1/d)`` (concave along the constraint set) with a projected,
    Barzilai-Borwein-scaled step and Armijo backtracking.  Convergence means all
    ratios ``area(F_v)/|v|`` agree to relative ``rtol``.
    """
    vecs = merge_fan(fan)
    d = len(vecs[0])
    if any(len(v) != d for v in vecs):
        raise GeometryError("fan vectors have mixed dimensions")
    k = len(vecs)
    if not fan_feasible(vecs):
        return MinkowskiSolution(tuple(vecs), False, np.full(k, math.nan), None, math.nan, math.nan)

    def objective(c):
        poly = _cell(vecs, c)
        vol = poly.volume
        if not (vol > 0) or poly.unbounded:
            return -math.inf, poly, None
        r = _ratios(vecs, poly)
        grad = vol ** (1.0 / d - 1.0) / d * r
        return vol ** (1.0 / d), poly, grad

    c = np.full(k, 1.0 / k)
    f, poly, grad = objective(c)
    best = (f, c.copy(), poly)
    step = 1.0
    prev_c = prev_g = None
    spread = _spread(_ratios(vecs, poly))
    it = 0
    while spread > rtol and it < max_iter:
        it += 1
        pg = grad - grad.mean()
        if prev_c is not None:
            s = c - prev_c
            y = pg - prev_g
            sy = float(s @ y)
            if sy < 0:
                step = float(s @ s) / -sy
        step = min(max(step, 1e-12), 1e6)
        gnorm2 = float(pg @ pg)
        t = step
        while True:
            cand = c + t * pg
            cand += (1.0 - cand.sum()) / k
            fc, pc, gc = objective(cand)
            if fc >= f + 1e-4 * t * gnorm2 - 1e-14 * abs(f) or t < 1e-16:
                break
            t *= 0.5
        if not (fc > -math.inf) or fc < f - 1e-14 * abs(f):
            # no ascent possible at machine precision; stop at the current iterate
            break
        prev_c, prev_g = c, pg
        c, f, poly, grad = cand, fc, pc, gc
        if f > best[0]:
            best = (f, c.copy(), poly)
        spread = _spread(_ratios(vecs, poly))
        step = t
    r = _ratios(vecs, poly)
    alpha = float(np.mean(r))
    sol = MinkowskiSolution(tuple(vecs), True, c, poly, poly.volume, alpha, it, spread)
    if spread > rtol:
        raise MinkowskiIterationError(
            f"Minkowski ascent did not converge in {it} iterations (ratio spread {spread:.3e})",
            MinkowskiSolution(tuple(vecs), True, best[1], best[2], best[2].volume, alpha, it, spread),
            spread,
        )
    return sol


def wulff_shape(fan: Sequence) -> Polytope:
    vecs = [np.asarray(v, dtype=float) for v in fan]
    d = len(vecs[0])
    return intersect_halfspaces([Halfspace(v / np.linalg.norm(v), 1.0) for v in vecs], d)


# ---------------------------------------------------------------------------
# Hulls of small point sets


def affine_frame(points) -> tuple[np.ndarray, np.ndarray]:
    """Origin and orthonormal basis (rows) of the affine hull of ``points``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    o = P.mean(axis=0)
    if len(P) == 1:
        return o, np.zeros((0, P.shape[1]))
    _, s, vt = np.linalg.svd(P - o)
    scale = 1.0 + float(np.max(np.abs(P)))
    k = int(np.sum(s > 1e-9 * scale))
    return o, vt[:k]


def hull_halfspaces(points) -> list[Halfspace]:
    """Facet halfspaces of the convex hull of a full-dimensional point set.

    Brute force over d-subsets; meant for the handful of neighbors of a vertex.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    n_pts, d = P.shape
    if d == 1:
        return [Halfspace([1.0], float(P.max())), Halfspace([-1.0], -float(P.min()))]
    scale = 1.0 + float(np.max(np.abs(P)))
    out: list[tuple[np.ndarray, float]] = []
    for idx in itertools.combinations(range(n_pts), d):
        Q = P[list(idx)]
        M = Q[1:] - Q[0]
        _, s, vt = np.linalg.svd(M)
        if len(s) < d - 1 or s[-1] <= 1e-9 * scale:
            continue
        n = vt[-1]
        b = float(n @ Q[0])
        side = P @ n - b
        tol = 1e-9 * scale
        if np.all(side <= tol):
            pass
        elif np.all(side >= -tol):
            n, b = -n, -b
        else:
            continue
        if not any(np.linalg.norm(n - m) <= 1e-9 and abs(b - c) <= tol for m, c in out):
            out.append((n, b))
    return [Halfspace(n, b) for n, b in out]


def in_convex_hull(points, query, tol: float = 1e-9) -> bool:
    """Membership of ``query`` in conv(points), handling lower-dimensional hulls."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    q = np.asarray(query, dtype=float)
    o, basis = affine_frame(P)
    scale = 1.0 + float(np.max(np.abs(P)))
    resid = (q - o) - basis.T @ (basis @ (q - o))
    if np.linalg.norm(resid) > tol * scale:
        return False
    if basis.shape[0] == 0:
        return bool(np.linalg.norm(q - o) <= tol * scale)
    Pl = (P - o) @ basis.T
    ql = basis @ (q - o)
    for h in hull_halfspaces(Pl):
        n, b = h.unit()
        if float(n @ ql) > b + tol * scale:
            return False
    return True


# ---------------------------------------------------------------------------
# Triangulation and moments


def _simplices(N: np.ndarray, b: np.ndarray) -> list[np.ndarray]:
    m, d = N.shape
    if d == 1:
        verts = _interval_vertices(N, b)
        return [np.array([[verts.min()], [verts.max()]])] if len(verts) == 2 else []
    verts = _enumerate_vertices(N, b)
    if len(verts) <= d:
        return []
    a = verts.mean(axis=0)
    sv = np.linalg.svd(verts - a, compute_uv=False)
    if len(sv) < d or sv[d - 1] <= 1e-12 * (1.0 + float(np.max(np.abs(verts)))):
        return []
    out = []
    for k in range(m):
        on = np.abs(verts @ N[k] - b[k]) <= 1e-8 * (1.0 + abs(b[k]))
        if not np.any(on):
            continue
        frame = _facet_frame(N, b, k)
        if frame is None:
            continue
        basis, origin, R, r = frame
        for S in _simplices(R, r):
            out.append(np.vstack([a, origin + S @ basis]))
    return out


def triangulate(poly: Polytope) -> list[np.ndarray]:
    """Triangulation of a bounded full-dimensional polytope.

    Returns a list of ``(d+1, d)`` simplex vertex arrays: cones from the vertex
    mean over a triangulation of each facet, where each facet is rebuilt from
    the halfspaces inside its own hyperplane.  Nearly coincident vertices or
    planes therefore never merge two facets.
    """
    if poly.unbounded:
        raise GeometryError("cannot triangulate an unbounded region")
    if not poly.has_interior:
        return []
    N, b = _dedupe_planes(*_unit_rows(poly.halfspaces))
    return _simplices(N, b)


def simplex_volume(S: np.ndarray) -> float:
    d = S.shape[1]
    return abs(float(np.linalg.det(S[1:] - S[0]))) / math.factorial(d)


def _moments(N: np.ndarray, b: np.ndarray) -> tuple[float, np.ndarray, float]:
    """Integrals of 1, x and |x|^2 over a bounded polytope given by unit rows.

    Same facet recursion as ``_measure``: cones from the vertex mean over
    every facet, with facet moments computed inside the supporting hyperplane.
    """
    m, d = N.shape
    if d == 1:
        verts = _interval_vertices(N, b)
        if len(verts) < 2:
            return 0.0, np.zeros(1), 0.0
        lo, hi = float(verts.min()), float(verts.max())
        return hi - lo, np.array([(hi * hi - lo * lo) / 2.0]), (hi**3 - lo**3) / 3.0
    verts = _enumerate_vertices(N, b)
    if len(verts) <= d:
        return 0.0, np.zeros(d), 0.0
    a = verts.mean(axis=0)
    sv = np.linalg.svd(verts - a, compute_uv=False)
    if len(sv) < d or sv[d - 1] <= 1e-12 * (1.0 + float(np.max(np.abs(verts)))):
        return 0.0, np.zeros(d), 0.0
    # t^(d-1) weighted integrals of (1-t)^2, t(1-t), t^2 over [0, 1]
    k0 = 1.0 / d - 2.0 / (d + 1) + 1.0 / (d + 2)
    k1 = 1.0 / (d + 1) - 1.0 / (d + 2)
    k2 = 1.0 / (d + 2)
    vol, first, second = 0.0, np.zeros(d), 0.0
    for k in range(m):
        n, off = N[k], b[k]
        on = np.abs(verts @ n - off) <= 1e-8 * (1.0 + abs(off))
        if not np.any(on):
            continue
        A, Y, Q = _facet_moments(N, b, k)
        if A <= 0.0:
            continue
        h = off - float(n @ a)
        vol += h * A / d
        first += h * (a * A * (1.0 / d - 1.0 / (d + 1)) + Y / (d + 1))
        second += h * (float(a @ a) * A * k0 + 2.0 * float(a @ Y) * k1 + Q * k2)
    return vol, first, second


def _facet_moments(N: np.ndarray, b: np.ndarray, k: int) -> tuple[float, np.ndarray, float]:
    frame = _facet_frame(N, b, k)
    if frame is None:
        return 0.0, np.zeros(N.shape[1]), 0.0
    basis, origin, R, r = frame
    A, Z1, Z2 = _moments(R, r)
    # y = origin + basis^T z with origin orthogonal to the plane directions
    return A, A * origin + basis.T @ Z1, A * b[k] * b[k] + Z2


def second_moment(poly: Polytope, center) -> float:
    """Integral of ``|x - center|^2`` over the polytope."""
    if poly.unbounded:
        raise GeometryError("cannot integrate over an unbounded region")
    if not poly.has_interior:
        return 0.0
    c = np.asarray(center, dtype=float)
    N, b = _dedupe_planes(*_unit_rows(poly.halfspaces))
    vol, first, second = _moments(N, b)
    return second - 2.0 * float(c @ first) + float(c @ c) * vol
