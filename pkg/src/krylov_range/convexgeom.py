"""Planar convex geometry for numerical ranges.

Points of the plane are complex numbers.  ``ConvexPolygon`` holds the vertices
of a convex set in counterclockwise order; a single vertex is a point and two
vertices a segment.  The numerical range ``W(H)`` is approximated by sweeping
support directions: for each angle ``phi`` the top eigenvector ``x`` of
``(e^{i phi} H + e^{-i phi} H^*)/2`` yields the boundary point ``x^* H x`` and the
support line ``Re(e^{i phi} z) = lambda_max``.  The boundary points give an
inscribed polygon and the support lines a circumscribed one, so the gap
between the two is a rigorous a-posteriori error estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import DimensionError, DomainError, PreconditionError

__all__ = [
    "ConvexPolygon",
    "SweepConfig",
    "RangeBounds",
    "convex_hull",
    "support_values",
    "numerical_range",
    "numerical_range_bounds",
    "numerical_radius",
    "point_distance",
    "one_sided_hausdorff",
    "hausdorff",
    "set_distance",
    "boundary_distance",
    "inscribed_polygon",
    "prop21_bound",
    "projected_interval",
    "interval_gaps",
    "diameter",
    "perimeter",
    "ellipse_polygon",
]

# chunk size for pairwise point/edge computations (rows per block)
_CHUNK = 2048
# dense matrices up to this size are swept with one batched eigh call per chunk
_BATCH_MAX_N = 160


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Convex polygon with counterclockwise vertices stored as complex numbers."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=np.complex128).ravel()
        if v.size == 0:
            raise DomainError("polygon needs at least one vertex")
        if not np.all(np.isfinite(v)):
            raise DomainError("polygon vertices must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return self.vertices.size

    def __repr__(self) -> str:
        return f"ConvexPolygon({self.vertices.size} vertices)"

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Start and end points of the closed edge loop."""
        v = self.vertices
        return v, np.roll(v, -1)

    def is_convex(self, rtol: float = 1e-12) -> bool:
        v = self.vertices
        if v.size < 3:
            return True
        e = np.roll(v, -1) - v
        cross = (e.conj() * np.roll(e, -1)).imag
        return bool(np.all(cross >= -rtol * max(diameter(self) ** 2, 1e-300)))

    def transform(self, scale: complex = 1.0, shift: complex = 0.0) -> "ConvexPolygon":
        """Image under ``z -> scale*z + shift``; orientation is kept for ``scale != 0``."""
        return ConvexPolygon(scale * self.vertices + shift)

    def to_json(self) -> list[list[float]]:
        return [[float(z.real), float(z.imag)] for z in self.vertices]

    @classmethod
    def from_json(cls, pairs) -> "ConvexPolygon":
        a = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(a[:, 0] + 1j * a[:, 1])


@dataclass(frozen=True)
class SweepConfig:
    """Angle grid ``phi_j = 2 pi j / n_angles`` for the support-line sweep."""

    n_angles: int = 1024

    def __post_init__(self):
        if int(self.n_angles) != self.n_angles or self.n_angles < 8:
            raise DomainError("n_angles must be an integer >= 8")

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_angles) / self.n_angles


@dataclass(frozen=True)
class RangeBounds:
    """Inner and outer polygons sandwiching a numerical range."""

    inner: ConvexPolygon
    outer: ConvexPolygon
    support: np.ndarray
    angles: np.ndarray

    @property
    def sweep_error(self) -> float:
        """Upper bound on ``d_H(inner, W)`` since ``inner <= W <= outer``."""
        return one_sided_hausdorff(self.outer, self.inner)


def convex_hull(points) -> ConvexPolygon:
    """Convex hull by Andrew's monotone chain.

    Collinear boundary points are dropped, so only extreme points remain.
    """
    z = np.asarray(points, dtype=np.complex128).ravel()
    if z.size == 0:
        raise DomainError("convex hull of an empty set")
    if not np.all(np.isfinite(z)):
        raise DomainError("points must be finite")
    pts = np.unique(np.c_[z.real, z.imag], axis=0)  # lexicographic sort
    if pts.shape[0] == 1:
        return ConvexPolygon(pts[:, 0] + 1j * pts[:, 1])
    span = np.ptp(pts, axis=0).max()
    eps = 1e-15 * span * span

    def chain(seq):
        out: list = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                cross = (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])
                if cross > eps:
                    break
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if hull.shape[0] == 0:
        hull = pts[[0, -1]]
    return ConvexPolygon(hull[:, 0] + 1j * hull[:, 1])


def _is_sparse(H) -> bool:
    return scipy.sparse.issparse(H)


def support_values(H, angles) -> tuple[np.ndarray, np.ndarray]:
    """Support data of ``W(H)`` on an angle grid.

    Returns ``(lam, pts)`` where ``lam[j] = max Re(e^{i phi_j} z)`` over ``W(H)``
    and ``pts[j] = x^* H x`` for a corresponding unit top eigenvector ``x``.
    """
    angles = np.asarray(angles, dtype=float).ravel()
    if _is_sparse(H):
        return _support_sparse(H.tocsr().astype(np.complex128), angles)
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise DomainError("matrix has non-finite entries")
    n = H.shape[0]
    if n == 1:
        c = H[0, 0]
        return (np.exp(1j * angles) * c).real, np.full(angles.size, c)
    if n <= _BATCH_MAX_N:
        return _support_batched(H, angles)
    return _support_dense_large(H, angles)


def _support_batched(H, angles):
    n = H.shape[0]
    Hs = H.conj().T
    # keep each batch of complex n x n matrices under ~64 MB
    batch = max(1, int(4e6 // (n * n)))
    lam = np.empty(angles.size)
    pts = np.empty(angles.size, dtype=np.complex128)
    for s in range(0, angles.size, batch):
        e = np.exp(1j * angles[s:s + batch])[:, None, None]
        K = (e * H + e.conj() * Hs) / 2
        w, X = np.linalg.eigh(K)
        x = X[:, :, -1]
        lam[s:s + batch] = w[:, -1]
        pts[s:s + batch] = np.einsum("ki,ij,kj->k", x.conj(), H, x)
    return lam, pts


def _support_dense_large(H, angles):
    n = H.shape[0]
    Hs = H.conj().T
    lam = np.empty(angles.size)
    pts = np.empty(angles.size, dtype=np.complex128)
    for j, phi in enumerate(angles):
        e = np.exp(1j * phi)
        K = (e * H + np.conj(e) * Hs) / 2
        w, X = scipy.linalg.eigh(K, subset_by_index=[n - 1, n - 1], driver="evr",
                                 check_finite=False)
        x = X[:, 0]
        lam[j] = w[0]
        pts[j] = np.vdot(x, H @ x)
    return lam, pts


def _support_sparse(H, angles):
    n = H.shape[0]
    if H.shape[0] != H.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {H.shape}")
    Hs = H.conj().T.tocsr()
    if n <= _BATCH_MAX_N:
        return _support_batched(H.toarray(), angles)
    lam = np.empty(angles.size)
    pts = np.empty(angles.size, dtype=np.complex128)
    v0 = None
    for j, phi in enumerate(angles):
        e = np.exp(1j * phi)
        K = ((e / 2) * H + (np.conj(e) / 2) * Hs).tocsr()
        w, X = scipy.sparse.linalg.eigsh(K, k=1, which="LA", v0=v0, tol=0)
        x = X[:, 0]
        # warm start from the previous eigenvector; neighbouring angles are close
        v0 = x
        lam[j] = w[0]
        pts[j] = np.vdot(x, H @ x) / np.vdot(x, x).real
    return lam, pts


def _support_polygon(angles: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Vertices where consecutive support lines ``Re(e^{i phi} z) = lam`` meet."""
    p1, p2 = angles, np.roll(angles, -1)
    a1, a2 = lam, np.roll(lam, -1)
    # x cos(phi) - y sin(phi) = a
    det = np.sin(p1 - p2)
    x = (-a1 * np.sin(p2) + a2 * np.sin(p1)) / det
    y = (a2 * np.cos(p1) - a1 * np.cos(p2)) / det
    return x + 1j * y


def numerical_range_bounds(H, cfg: SweepConfig | None = None) -> RangeBounds:
    """Inner (boundary points) and outer (support lines) polygons for ``W(H)``."""
    cfg = cfg or SweepConfig()
    angles = cfg.angles
    lam, pts = support_values(H, angles)
    inner = convex_hull(pts)
    outer = convex_hull(np.concatenate([_support_polygon(angles, lam), inner.vertices]))
    return RangeBounds(inner, outer, lam, angles)


def numerical_range(H, cfg: SweepConfig | None = None) -> ConvexPolygon:
    """Inscribed polygonal approximation of the numerical range ``W(H)``.

    Parameters
    ----------
    H : (n, n) array_like or scipy sparse matrix
    cfg : SweepConfig, optional
        Angle grid; 1024 angles by default.

    Returns
    -------
    ConvexPolygon
        Convex hull of the boundary points ``x^* H x``.
    """
    cfg = cfg or SweepConfig()
    _, pts = support_values(H, cfg.angles)
    return convex_hull(pts)


def numerical_radius(H, cfg: SweepConfig | None = None) -> float:
    """``max |z|`` over ``W(H)``, as the largest support value on the angle grid."""
    cfg = cfg or SweepConfig()
    lam, _ = support_values(H, cfg.angles)
    return float(lam.max())


def _segment_dist(z: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from points ``z[:, None]`` to segments ``[a, b]`` (broadcast)."""
    ab = b - a
    den = np.abs(ab) ** 2
    t = ((z - a) * ab.conj()).real / np.where(den > 0, den, 1.0)
    t = np.clip(np.where(den > 0, t, 0.0), 0.0, 1.0)
    return np.abs(z - (a + t * ab))


def _strict_loop(v: np.ndarray) -> np.ndarray | None:
    """Drop repeated and straight-through vertices; ``None`` if the loop is not strictly convex after that."""
    scale = max(float(np.abs(v - v[0]).max()), 1e-300)
    v = v[np.abs(np.roll(v, -1) - v) > 1e-15 * scale]
    if v.size < 3:
        return None
    e_in = v - np.roll(v, 1)
    e_out = np.roll(v, -1) - v
    turn = (e_in.conj() * e_out)
    straight = (np.abs(turn.imag) <= 1e-14 * scale * scale) & (turn.real > 0)
    v = v[~straight]
    if v.size < 3:
        return None
    e_in = v - np.roll(v, 1)
    e_out = np.roll(v, -1) - v
    if np.any((e_in.conj() * e_out).imag <= 1e-14 * scale * scale):
        return None
    return v


def _point_distance_brute(a, b, z, solid):
    out = np.empty(z.size)
    for s in range(0, z.size, _CHUNK):
        zc = z[s:s + _CHUNK, None]
        d = _segment_dist(zc, a[None, :], b[None, :]).min(axis=1)
        if solid:
            cross = ((b - a).conj()[None, :] * (zc - a[None, :])).imag
            d = np.where(np.all(cross >= 0, axis=1), 0.0, d)
        out[s:s + _CHUNK] = d
    return out


def point_distance(P: ConvexPolygon, z):
    """Euclidean distance from ``z`` (scalar or array) to the polygon ``P``.

    Points inside or on ``P`` have distance zero.  For an outside point the
    edge whose supporting line is farthest from it, or one of that edge's two
    neighbours, carries the nearest boundary point, so only three segment
    distances are evaluated per point.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel()
    v = _strict_loop(P.vertices) if P.vertices.size >= 3 else None
    if v is None:
        a, b = P.edges()
        out = _point_distance_brute(a, b, z, a.size >= 3)
        return float(out[0]) if scalar else out
    a, b = v, np.roll(v, -1)
    e = b - a
    nrm = -1j * e / np.abs(e)
    N = np.stack([nrm.real, nrm.imag])
    off = (nrm.conj() * a).real
    k = a.size
    out = np.empty(z.size)
    for s in range(0, z.size, _CHUNK):
        zc = z[s:s + _CHUNK]
        sd = np.stack([zc.real, zc.imag], axis=1) @ N - off
        j = np.argmax(sd, axis=1)
        idx = (j[:, None] + np.array([-1, 0, 1])[None, :]) % k
        d = _segment_dist(zc[:, None], a[idx], b[idx]).min(axis=1)
        out[s:s + _CHUNK] = np.where(sd[np.arange(zc.size), j] <= 0, 0.0, d)
    return float(out[0]) if scalar else out


def one_sided_hausdorff(P: ConvexPolygon, Q: ConvexPolygon) -> float:
    """``sup_{p in P} d(p, Q)``; attained at a vertex of ``P`` since ``d(., Q)`` is convex."""
    return float(np.max(point_distance(Q, P.vertices)))


def hausdorff(P: ConvexPolygon, Q: ConvexPolygon) -> float:
    """Hausdorff distance between two convex polygons."""
    return max(one_sided_hausdorff(P, Q), one_sided_hausdorff(Q, P))


def _segments_cross(a1, b1, a2, b2) -> bool:
    """True if any segment ``[a1_i, b1_i]`` properly crosses any ``[a2_j, b2_j]``.

    Touching and collinear overlaps put an endpoint on the other segment, which
    the caller has already detected through the vertex distances.
    """
    def orient(p, q, r):
        return ((q - p).conj() * (r - p)).imag

    for s in range(0, a1.size, _CHUNK):
        p, q = a1[s:s + _CHUNK, None], b1[s:s + _CHUNK, None]
        r, t = a2[None, :], b2[None, :]
        d1, d2 = orient(p, q, r), orient(p, q, t)
        d3, d4 = orient(r, t, p), orient(r, t, q)
        if np.any((d1 * d2 < 0) & (d3 * d4 < 0)):
            return True
    return False


def set_distance(P: ConvexPolygon, Q: ConvexPolygon) -> float:
    """``inf |p - q|`` over ``p in P, q in Q``; zero when the polygons meet."""
    d = min(float(np.min(point_distance(Q, P.vertices))),
            float(np.min(point_distance(P, Q.vertices))))
    if d == 0.0:
        return 0.0
    a1, b1 = P.edges()
    a2, b2 = Q.edges()
    if _segments_cross(a1, b1, a2, b2):
        return 0.0
    return d


def boundary_distance(inner: ConvexPolygon, outer: ConvexPolygon, tol: float = 1e-9) -> float:
    """Distance from ``inner`` to the boundary of ``outer``.

    For ``inner`` contained in ``outer`` this is the minimum over edges of
    ``outer`` of the segment-to-polygon distance, which is attained either at an
    endpoint of the edge or at a vertex of ``inner``, so it is computed exactly.

    Raises
    ------
    PreconditionError
        If ``inner`` sticks out of ``outer`` by more than ``tol * max(1, diam(outer))``.
    """
    excess = one_sided_hausdorff(inner, outer)
    if excess > tol * max(1.0, diameter(outer)):
        raise PreconditionError(f"inner polygon leaves the outer one by {excess:.3e}")
    a, b = outer.edges()
    best = float(np.min(point_distance(inner, outer.vertices)))
    v = inner.vertices
    for s in range(0, v.size, _CHUNK):
        best = min(best, float(_segment_dist(v[s:s + _CHUNK, None], a[None, :], b[None, :]).min()))
    return best


def perimeter(P: ConvexPolygon) -> float:
    a, b = P.edges()
    if a.size == 2:
        return 2 * abs(b[0] - a[0])
    return float(np.abs(b - a).sum())


def prop21_bound(P: ConvexPolygon, k: int) -> float:
    """``(L / 2k) tan(pi / k)`` with ``L`` the perimeter of ``P``."""
    return perimeter(P) / (2 * k) * np.tan(np.pi / k)


def _arc_points(P: ConvexPolygon, s: np.ndarray) -> np.ndarray:
    """Boundary points at arc-length positions ``s`` (mod perimeter)."""
    a, b = P.edges()
    seg = np.abs(b - a)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    L = cum[-1]
    s = np.mod(s, L)
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, a.size - 1)
    t = (s - cum[idx]) / np.where(seg[idx] > 0, seg[idx], 1.0)
    return a[idx] + t * (b[idx] - a[idx])


def _normal_points(P: ConvexPolygon, k: int, phase: float) -> np.ndarray:
    """Vertices extreme in the directions ``e^{-i(phase + 2 pi j / k)}``."""
    phis = phase + 2 * np.pi * np.arange(k) / k
    proj = (np.exp(1j * phis)[:, None] * P.vertices[None, :]).real
    return P.vertices[np.argmax(proj, axis=1)]


def inscribed_polygon(P: ConvexPolygon, k: int, n_phases: int = 8) -> ConvexPolygon:
    """Polygon spanned by ``k`` boundary points of ``P``.

    Candidates are equal arc-length spacings (several starting offsets) and
    support points of equally spaced normal directions; the candidate with the
    smallest Hausdorff distance to ``P`` is returned.  If ``P`` has at most
    ``k`` vertices, ``P`` itself is returned.
    """
    if int(k) != k or k < 3:
        raise DomainError("k must be an integer >= 3")
    k = int(k)
    if len(P) <= k:
        return P
    L = perimeter(P)
    cands = []
    for j in range(n_phases):
        s = (j / n_phases + np.arange(k)) * (L / k)
        cands.append(convex_hull(_arc_points(P, s)))
        cands.append(convex_hull(_normal_points(P, k, 2 * np.pi * j / (k * n_phases))))
    dists = [one_sided_hausdorff(P, c) for c in cands]
    return cands[int(np.argmin(dists))]


def projected_interval(P: ConvexPolygon, theta: float) -> tuple[float, float]:
    """Range of ``Re(e^{i theta} z)`` over ``P``."""
    r = (np.exp(1j * theta) * P.vertices).real
    return float(r.min()), float(r.max())


def interval_gaps(P: ConvexPolygon, Q: ConvexPolygon, angles) -> np.ndarray:
    """Hausdorff distance between the projections ``Re(e^{i theta} P)`` and ``Re(e^{i theta} Q)``.

    For intervals ``[a, b]`` and ``[c, d]`` this is ``max(|a - c|, |b - d|)``.
    """
    e = np.exp(1j * np.asarray(angles, dtype=float))[:, None]
    p = (e * P.vertices[None, :]).real
    q = (e * Q.vertices[None, :]).real
    return np.maximum(np.abs(p.min(1) - q.min(1)), np.abs(p.max(1) - q.max(1)))


def diameter(P: ConvexPolygon) -> float:
    """Largest pairwise vertex distance."""
    v = P.vertices
    best = 0.0
    for s in range(0, v.size, _CHUNK):
        best = max(best, float(np.abs(v[s:s + _CHUNK, None] - v[None, :]).max()))
    return best


def ellipse_polygon(a: float, b: float, center: complex = 0.0, n: int = 4096) -> ConvexPolygon:
    """Regular-parameter polygon inscribed in the ellipse with semi-axes ``a`` (real) and ``b``."""
    t = 2 * np.pi * np.arange(n) / n
    return ConvexPolygon(center + a * np.cos(t) + 1j * b * np.sin(t))
