"""Flat-faced polyhedral parts, edge frames, and polynomial-exact quadrature.

Volume integrals use signed cones from the origin over a fan triangulation of
each oriented face, so they are exact for any closed, consistently oriented
surface (convex or not). Face integrals use the same fan triangulation with
signed areas, and edge integrals use Gauss-Legendre on each segment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .config import DEFAULT
from .fields import PolyField
from .tensor import as_vector


class GeometryError(ValueError):
    pass


class NonManifoldError(GeometryError):
    pass


class QuadratureOrderError(ValueError):
    """Requested quadrature degree is below the integrand degree."""


# -- edge frames ----------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class EdgeFrame:
    """Ordered quadruple ``(n', m'; n'', m'')`` describing an edge.

    ``n'`` and ``n''`` are the outward normals of the two faces meeting at the
    edge, ``m'`` and ``m''`` the in-plane unit vectors orthogonal to the edge
    that point out of each face. ``segment`` is optional.
    """

    n_prime: np.ndarray
    m_prime: np.ndarray
    n_second: np.ndarray
    m_second: np.ndarray
    segment: tuple[np.ndarray, np.ndarray] | None = None
    faces: tuple[int, int] | None = None

    def __post_init__(self):
        for name in ("n_prime", "m_prime", "n_second", "m_second"):
            vec = as_vector(getattr(self, name)).copy()
            vec.flags.writeable = False
            object.__setattr__(self, name, vec)
        if self.segment is not None:
            a, b = (as_vector(p).copy() for p in self.segment)
            object.__setattr__(self, "segment", (a, b))
        self.validate()

    def validate(self, tol: float = DEFAULT.frame):
        vecs = self.vectors
        for v in vecs:
            if abs(np.linalg.norm(v) - 1.0) > tol:
                raise GeometryError("edge frame vectors must be unit vectors")
        if abs(self.n_prime @ self.m_prime) > tol or abs(self.n_second @ self.m_second) > tol:
            raise GeometryError("edge frame pairs must be orthogonal")
        # Coplanarity: all four vectors orthogonal to the edge tangent.
        tangent = self.tangent
        if tangent is None:
            _, s, _ = np.linalg.svd(np.array(vecs))
            if s[-1] > tol * 10:
                raise GeometryError("edge frame vectors are not coplanar")
        else:
            if max(abs(v @ tangent) for v in vecs) > tol * 10:
                raise GeometryError("edge frame vectors are not orthogonal to the edge tangent")

    @property
    def vectors(self) -> tuple[np.ndarray, ...]:
        return (self.n_prime, self.m_prime, self.n_second, self.m_second)

    @property
    def tangent(self) -> np.ndarray | None:
        if self.segment is not None:
            d = self.segment[1] - self.segment[0]
            return d / np.linalg.norm(d)
        t = np.cross(self.n_prime, self.m_prime)
        return t / np.linalg.norm(t)

    @property
    def length(self) -> float:
        if self.segment is None:
            raise GeometryError("frame has no segment")
        return float(np.linalg.norm(self.segment[1] - self.segment[0]))

    def contraction_tensor(self) -> np.ndarray:
        """``n' (x) m' + n'' (x) m''``."""
        return np.outer(self.n_prime, self.m_prime) + np.outer(self.n_second, self.m_second)

    def swapped(self) -> "EdgeFrame":
        faces = None if self.faces is None else self.faces[::-1]
        return EdgeFrame(self.n_second, self.m_second, self.n_prime, self.m_prime,
                         segment=self.segment, faces=faces)

    def rotated(self, Q) -> "EdgeFrame":
        """Rotate all four vectors (and the segment) by ``Q``."""
        M = getattr(Q, "matrix", Q)
        seg = None if self.segment is None else (M @ self.segment[0], M @ self.segment[1])
        return EdgeFrame(M @ self.n_prime, M @ self.m_prime, M @ self.n_second, M @ self.m_second,
                         segment=seg, faces=self.faces)

    def to_json(self) -> dict:
        out = {k: getattr(self, k).tolist() for k in ("n_prime", "m_prime", "n_second", "m_second")}
        if self.segment is not None:
            out["segment"] = [p.tolist() for p in self.segment]
        return out


def coordinate_edge(j: int, k: int) -> EdgeFrame:
    """Frame of the coordinate edge ``E_jk`` (zero-based axes, ``j < k``):
    ``(e_j, e_k; e_k, e_j)``."""
    if j == k:
        raise GeometryError("a coordinate edge needs two distinct axes")
    if not (0 <= j < k <= 2):
        raise GeometryError("coordinate edge axes must satisfy 0 <= j < k <= 2")
    e = np.eye(3)
    return EdgeFrame(e[j], e[k], e[k], e[j])


def random_edge_frame(rng: np.random.Generator) -> EdgeFrame:
    """A generic valid frame: random edge tangent, two random in-plane normals."""
    t = rng.standard_normal(3)
    t /= np.linalg.norm(t)
    a = np.cross(t, rng.standard_normal(3))
    a /= np.linalg.norm(a)
    b = np.cross(t, a)
    phi1, phi2 = rng.uniform(0.0, 2 * np.pi, size=2)
    n1 = np.cos(phi1) * a + np.sin(phi1) * b
    n2 = np.cos(phi2) * a + np.sin(phi2) * b
    s1, s2 = rng.choice([-1.0, 1.0], size=2)
    return EdgeFrame(n1, s1 * np.cross(t, n1), n2, s2 * np.cross(t, n2))


# -- faces and parts ------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class OrientedFace:
    loop: tuple[int, ...]
    points: np.ndarray
    normal: np.ndarray
    area: float

    @property
    def triangles(self) -> np.ndarray:
        """Fan triangulation from the first vertex, shape ``(k, 3, 3)``."""
        p = self.points
        return np.array([[p[0], p[i], p[i + 1]] for i in range(1, len(p) - 1)])

    @property
    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)


@dataclass(frozen=True, eq=False)
class PolyhedralPart:
    name: str
    vertices: np.ndarray
    faces: tuple[OrientedFace, ...]
    edges: tuple[EdgeFrame, ...]
    volume: float = field(default=0.0)

    def to_json(self) -> dict:
        return {"vertices": self.vertices.tolist(), "faces": [list(f.loop) for f in self.faces]}


def _newell_normal(points: np.ndarray) -> np.ndarray:
    """Area vector of a planar polygon (half the Newell sum)."""
    nxt = np.roll(points, -1, axis=0)
    return 0.5 * np.cross(points, nxt).sum(axis=0)


def build_part(vertices, faces, name: str = "part", tol=DEFAULT) -> PolyhedralPart:
    """Validate a closed polyhedron and derive its faces' normals and edge frames.

    ``faces`` are vertex index loops, counterclockwise when seen from outside.
    Raises :class:`NonManifoldError` unless every edge is shared by exactly two
    faces with opposite traversal, and :class:`GeometryError` on non-planar
    faces or inward orientation.
    """
    V = np.asarray(vertices, dtype=float)
    if V.ndim != 2 or V.shape[1] != 3 or len(V) < 4:
        raise GeometryError("vertices must be a list of at least four 3D points")
    if not np.all(np.isfinite(V)):
        raise GeometryError("vertices must be finite")
    scale = max(1.0, float(np.max(np.abs(V))))

    built = []
    for fi, loop in enumerate(faces):
        loop = tuple(int(i) for i in loop)
        if len(loop) < 3 or len(set(loop)) != len(loop):
            raise GeometryError(f"face {fi} must list at least three distinct vertices")
        if min(loop) < 0 or max(loop) >= len(V):
            raise GeometryError(f"face {fi} references a missing vertex")
        pts = V[list(loop)]
        area_vec = _newell_normal(pts)
        area = float(np.linalg.norm(area_vec))
        if area <= tol.planarity * scale ** 2:
            raise GeometryError(f"face {fi} is degenerate")
        n = area_vec / area
        offsets = (pts - pts[0]) @ n
        if np.max(np.abs(offsets)) > tol.planarity * scale:
            raise GeometryError(f"face {fi} is not planar")
        built.append(OrientedFace(loop, pts, n, area))

    # Directed-edge bookkeeping: each undirected edge needs exactly one use per direction.
    directed: dict[tuple[int, int], int] = {}
    for fi, face in enumerate(built):
        for a, b in zip(face.loop, face.loop[1:] + face.loop[:1]):
            if (a, b) in directed:
                raise NonManifoldError(f"directed edge {a}->{b} used twice: inconsistent orientation or non-manifold")
            directed[(a, b)] = fi
    edges = []
    for (a, b), fa in sorted(directed.items()):
        if (b, a) not in directed:
            raise NonManifoldError(f"edge {a}-{b} belongs to a single face: boundary is not closed")
        if a > b:
            continue
        fb = directed[(b, a)]
        first, second = sorted((fa, fb))
        pa, pb = V[a], V[b]
        tangent = (pb - pa) / np.linalg.norm(pb - pa)
        ms = []
        for fi in (first, second):
            n = built[fi].normal
            # Face fi traverses (a, b) or (b, a); interior lies to the left of
            # the traversal direction, so m = traversal x n.
            t = tangent if directed.get((a, b)) == fi else -tangent
            m = np.cross(t, n)
            ms.append(m / np.linalg.norm(m))
        edges.append(EdgeFrame(built[first].normal, ms[0], built[second].normal, ms[1],
                               segment=(pa, pb), faces=(first, second)))

    closure = sum(f.area * f.normal for f in built)
    if np.max(np.abs(closure)) > tol.closure * scale ** 2 * len(built):
        raise GeometryError("face area vectors do not sum to zero")
    volume = sum(float(np.linalg.det(tri)) / 6.0 for f in built for tri in f.triangles)
    if volume <= 0:
        raise GeometryError("inverted orientation: signed volume is not positive")
    return PolyhedralPart(name, V, tuple(built), tuple(edges), volume)


def part_from_json(data, name: str = "part") -> PolyhedralPart:
    try:
        vertices = data["vertices"]
        faces = data["faces"]
    except (KeyError, TypeError) as exc:
        raise GeometryError(f"part description needs 'vertices' and 'faces': {exc}") from exc
    return build_part(vertices, faces, name=data.get("name", name) if isinstance(data, dict) else name)


def load_part(path) -> PolyhedralPart:
    """Load a part file ``{"vertices": [...], "faces": [...]}``.

    Malformed JSON raises :class:`json.JSONDecodeError`, which carries the
    line and column of the problem.
    """
    path = Path(path)
    with path.open() as fh:
        data = json.load(fh)
    return part_from_json(data, name=path.stem)


# -- canned parts ---------------------------------------------------------------
def unit_cube() -> PolyhedralPart:
    V = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
         [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]]
    F = [[0, 4, 7, 3],   # x1 = 0
         [1, 2, 6, 5],   # x1 = 1
         [0, 1, 5, 4],   # x2 = 0
         [3, 7, 6, 2],   # x2 = 1
         [0, 3, 2, 1],   # x3 = 0
         [4, 5, 6, 7]]   # x3 = 1
    return build_part(V, F, name="cube")


def tetrahedron() -> PolyhedralPart:
    """Regular tetrahedron inscribed in the cube ``[0, 1]^3``."""
    V = [[0, 0, 0], [1, 1, 0], [1, 0, 1], [0, 1, 1]]
    F = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]
    return build_part(V, F, name="tetrahedron")


def wedge() -> PolyhedralPart:
    """Triangular prism over the triangle (0,0),(1,0),(0,1), height 1."""
    V = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [0, 1, 1]]
    F = [[0, 2, 1], [3, 4, 5], [0, 1, 4, 3], [1, 2, 5, 4], [2, 0, 3, 5]]
    return build_part(V, F, name="wedge")


def chamfered_cube(cut: float = 0.4) -> PolyhedralPart:
    """Unit cube with the corner at (1, 1, 1) cut off by the plane
    ``x1 + x2 + x3 = 3 - cut``."""
    c = 1.0 - cut
    V = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
         [0, 0, 1], [1, 0, 1], [0, 1, 1],
         [1, 1, c], [1, c, 1], [c, 1, 1]]
    F = [[0, 4, 6, 3],          # x1 = 0
         [1, 2, 7, 8, 5],       # x1 = 1
         [0, 1, 5, 4],          # x2 = 0
         [3, 6, 9, 7, 2],       # x2 = 1
         [0, 3, 2, 1],          # x3 = 0
         [4, 5, 8, 9, 6],       # x3 = 1
         [7, 9, 8]]             # chamfer
    return build_part(V, F, name="chamfered_cube")


CANNED_PARTS: dict[str, Callable[[], PolyhedralPart]] = {
    "cube": unit_cube,
    "tetrahedron": tetrahedron,
    "wedge": wedge,
    "chamfered_cube": chamfered_cube,
}


def canned_parts() -> list[PolyhedralPart]:
    return [make() for make in CANNED_PARTS.values()]


# -- quadrature -----------------------------------------------------------------
def _points_for(degree: int) -> int:
    return max(1, degree // 2 + 1)


@lru_cache(maxsize=None)
def gauss_legendre_01(degree: int):
    """Points/weights on [0, 1] exact for polynomials of ``degree``."""
    x, w = roots_legendre(_points_for(degree))
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def triangle_rule(degree: int):
    """Collapsed Gauss-Jacobi rule on the reference triangle
    ``{(u, v): u, v >= 0, u + v <= 1}``; barycentric-free ``(u, v)`` points."""
    k = _points_for(degree + 1)
    a, wa = roots_jacobi(k, 1.0, 0.0)   # weight (1 - a) from the collapse
    b, wb = roots_legendre(k)
    a = 0.5 * (a + 1.0)
    b = 0.5 * (b + 1.0)
    wa = wa / 4.0
    wb = wb / 2.0
    A, B = np.meshgrid(a, b, indexing="ij")
    u = A
    v = (1.0 - A) * B
    w = np.outer(wa, wb)
    return np.stack([u.ravel(), v.ravel()], axis=1), w.ravel()


@lru_cache(maxsize=None)
def tetrahedron_rule(degree: int):
    """Collapsed Gauss-Jacobi rule on the reference tetrahedron with unit
    edge vectors; weights sum to 1/6."""
    k = _points_for(degree + 2)
    a, wa = roots_jacobi(k, 2.0, 0.0)
    b, wb = roots_jacobi(k, 1.0, 0.0)
    c, wc = roots_legendre(k)
    a, b, c = 0.5 * (a + 1.0), 0.5 * (b + 1.0), 0.5 * (c + 1.0)
    wa, wb, wc = wa / 8.0, wb / 4.0, wc / 2.0
    A, B, C = np.meshgrid(a, b, c, indexing="ij")
    u = A
    v = (1.0 - A) * B
    s = (1.0 - A) * (1.0 - B) * C
    w = np.einsum("i,j,k->ijk", wa, wb, wc)
    return np.stack([u.ravel(), v.ravel(), s.ravel()], axis=1), w.ravel()


def _check_order(order, integrand_degree):
    if order is None:
        if integrand_degree is None:
            raise QuadratureOrderError("either a PolyField integrand or an explicit order is required")
        return integrand_degree
    if integrand_degree is not None and order < integrand_degree:
        raise QuadratureOrderError(f"quadrature order {order} is below the integrand degree {integrand_degree}")
    return order


def _as_pointwise(f):
    if isinstance(f, PolyField):
        return f.evaluate_many, f.degree
    return f, None


def volume_points(part: PolyhedralPart, degree: int):
    """Quadrature points and signed weights over ``part``, exact to ``degree``."""
    ref, w = tetrahedron_rule(degree)
    pts, wts = [], []
    for face in part.faces:
        for tri in face.triangles:
            # Cone from the origin; signed Jacobian handles every orientation.
            J = tri.T
            pts.append(ref @ J.T)
            wts.append(w * np.linalg.det(J))
    return np.concatenate(pts), np.concatenate(wts)


def face_points(face: OrientedFace, degree: int):
    ref, w = triangle_rule(degree)
    pts, wts = [], []
    for p0, p1, p2 in face.triangles:
        signed = np.cross(p1 - p0, p2 - p0) @ face.normal
        pts.append(p0 + np.outer(ref[:, 0], p1 - p0) + np.outer(ref[:, 1], p2 - p0))
        wts.append(w * signed)
    return np.concatenate(pts), np.concatenate(wts)


def edge_points(edge: EdgeFrame, degree: int):
    s, w = gauss_legendre_01(degree)
    a, b = edge.segment
    return a + np.outer(s, b - a), w * edge.length


def integrate_volume(f, part: PolyhedralPart, order: int | None = None):
    """Integral of ``f`` over ``part``. ``f`` is a :class:`PolyField` of any
    rank (order defaults to its degree) or a vectorized callable ``(N, 3) -> (N, ...)``
    with an explicit ``order``."""
    fn, deg = _as_pointwise(f)
    pts, wts = volume_points(part, _check_order(order, deg))
    return np.tensordot(wts, fn(pts), axes=(0, 0))


def integrate_face(f, face: OrientedFace, order: int | None = None):
    fn, deg = _as_pointwise(f)
    pts, wts = face_points(face, _check_order(order, deg))
    return np.tensordot(wts, fn(pts), axes=(0, 0))


def integrate_edge(f, edge: EdgeFrame, order: int | None = None):
    fn, deg = _as_pointwise(f)
    pts, wts = edge_points(edge, _check_order(order, deg))
    return np.tensordot(wts, fn(pts), axes=(0, 0))
