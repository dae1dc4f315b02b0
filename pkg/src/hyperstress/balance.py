"""Virtual-power bookkeeping over polyhedral parts.

All integrals are evaluated with quadrature rules whose degree is read off the
polynomial degrees of the fields involved, so every identity checked here is
exact up to roundoff.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .fields import PolyField, grad2_velocity
from .geometry import PolyhedralPart, edge_points, face_points, volume_points
from .traction import reduced_stress, surface_traction_many


@dataclass
class BalanceReport:
    part: str
    internal_power: float
    external_power: float
    bulk_term: float
    pvp_residual: float
    bulk_residual_max: float
    global_force_residual: list
    per_face: list
    per_edge: list
    tol: float
    passed: bool
    seed: int | None = None
    edge_weight: float = 1.0

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class BoundaryResiduals:
    traction: list = field(default_factory=list)
    hypertraction: list = field(default_factory=list)
    edge: list = field(default_factory=list)

    def max(self) -> float:
        return max(self.traction + self.hypertraction + self.edge, default=0.0)

    def to_json(self) -> dict:
        return asdict(self)


def random_triple(seed: int, degree_T: int = 2, degree_H: int = 2, degree_v: int = 3):
    """Seeded random ``(T, H, v)``: symmetric ``T``, right-pair-symmetric ``H``."""
    rng = np.random.default_rng(seed)
    Tf = PolyField.random(rng, 2, degree_T, symmetric=True)
    Hf = PolyField.random(rng, 3, degree_H, hyperstress=True)
    v = PolyField.random(rng, 1, degree_v)
    return Tf, Hf, v


def _deg(f: PolyField) -> int:
    return 0 if f.is_zero() else f.degree


def _face_terms(Tf, Hf, v, part, with_fields=True):
    """Per-face integrals of ``t . v + h . d_n v``."""
    dv = _deg(v)
    dt = max(_deg(Tf), _deg(Hf) - 1)
    order = max(dt + dv, _deg(Hf) + max(dv - 1, 0))
    gv = v.grad()
    out = []
    for face in part.faces:
        n = face.normal
        pts, wts = face_points(face, order)
        t = surface_traction_many(Tf, Hf, pts, n)
        h = np.einsum("nijk,j,k->ni", Hf.evaluate_many(pts), n, n)
        vv = v.evaluate_many(pts)
        dnv = gv.evaluate_many(pts) @ n
        out.append(float(wts @ (np.einsum("ni,ni->n", t, vv) + np.einsum("ni,ni->n", h, dnv))))
    return out


def _edge_terms(Hf, v, part):
    order = _deg(Hf) + _deg(v)
    out = []
    for edge in part.edges:
        pts, wts = edge_points(edge, order)
        f = np.einsum("nijk,jk->ni", Hf.evaluate_many(pts), edge.contraction_tensor())
        out.append(float(wts @ np.einsum("ni,ni->n", f, v.evaluate_many(pts))))
    return out


def internal_power(Tf: PolyField, Hf: PolyField, v: PolyField, part: PolyhedralPart) -> float:
    """``int_P T . grad v + H . grad^2 v``."""
    dv = _deg(v)
    order = max(_deg(Tf) + max(dv - 1, 0), _deg(Hf) + max(dv - 2, 0))
    pts, wts = volume_points(part, order)
    G = v.grad().evaluate_many(pts)
    G2 = grad2_velocity(v).evaluate_many(pts)
    dens = (np.einsum("nij,nij->n", Tf.evaluate_many(pts), G)
            + np.einsum("nijk,nijk->n", Hf.evaluate_many(pts), G2))
    return float(wts @ dens)


def external_power(Tf: PolyField, Hf: PolyField, v: PolyField, part: PolyhedralPart,
                   edge_weight: float = 1.0) -> float:
    """Face integrals of ``t . v + h . d_n v`` plus edge integrals of ``f . v``,
    with ``t``, ``h``, ``f`` induced by the stress fields. ``edge_weight``
    scales the edge integrals (``0`` drops them)."""
    return float(sum(_face_terms(Tf, Hf, v, part)) + edge_weight * sum(_edge_terms(Hf, v, part)))


def bulk_term(Tf: PolyField, Hf: PolyField, v: PolyField, part: PolyhedralPart) -> float:
    """``int_P (-div T~) . v``."""
    dtt = reduced_stress(Tf, Hf).div()
    pts, wts = volume_points(part, _deg(dtt) + _deg(v))
    return float(wts @ np.einsum("ni,ni->n", -dtt.evaluate_many(pts), v.evaluate_many(pts)))


def bulk_residual(Tf: PolyField, Hf: PolyField, sample_points) -> float:
    """``max |div(T - div H)|`` over the sample points."""
    vals = reduced_stress(Tf, Hf).div().evaluate_many(sample_points)
    return float(np.max(np.linalg.norm(vals, axis=1), initial=0.0))


def global_balance(Tf: PolyField, Hf: PolyField, part: PolyhedralPart) -> np.ndarray:
    """``int_dP t + int_edges f``; zero whenever ``div T~ = 0`` on the part."""
    total = np.zeros(3)
    order_t = max(_deg(Tf), _deg(Hf) - 1)
    for face in part.faces:
        pts, wts = face_points(face, order_t)
        total += wts @ surface_traction_many(Tf, Hf, pts, face.normal)
    for edge in part.edges:
        pts, wts = edge_points(edge, _deg(Hf))
        total += wts @ np.einsum("nijk,jk->ni", Hf.evaluate_many(pts), edge.contraction_tensor())
    return total


def verify_pvp(Tf: PolyField, Hf: PolyField, v: PolyField, part: PolyhedralPart,
               tol: float = 1e-10, *, seed: int | None = None,
               edge_weight: float = 1.0) -> BalanceReport:
    """Check the integrated-by-parts power identity on ``part``::

        int_P T . grad v + H . grad^2 v
          = int_P (-div T~) . v
            + sum_faces int (t . v + h . d_n v) + sum_edges int f . v

    and report ``|lhs - rhs| / max(|lhs|, 1)``. A breach is flagged in the
    report, never raised. ``edge_weight`` other than 1 is a mutation hook.
    """
    if not Hf.hyperstress and not Hf.is_zero():
        Hf = PolyField(3, Hf.terms, hyperstress=True)
    lhs = internal_power(Tf, Hf, v, part)
    faces = _face_terms(Tf, Hf, v, part)
    edges = _edge_terms(Hf, v, part)
    bulk = bulk_term(Tf, Hf, v, part)
    external = float(sum(faces) + edge_weight * sum(edges))
    residual = abs(lhs - (bulk + external)) / max(abs(lhs), 1.0)
    pts, _ = volume_points(part, 2)
    return BalanceReport(
        part=part.name,
        internal_power=lhs,
        external_power=external,
        bulk_term=bulk,
        pvp_residual=float(residual),
        bulk_residual_max=bulk_residual(Tf, Hf, pts),
        global_force_residual=global_balance(Tf, Hf, part).tolist(),
        per_face=faces,
        per_edge=edges,
        tol=tol,
        passed=bool(residual <= tol),
        seed=seed,
        edge_weight=edge_weight,
    )


def boundary_residuals(Tf: PolyField, Hf: PolyField, part: PolyhedralPart,
                       t0: Callable | None = None, h0: Callable | None = None,
                       f0: Callable | None = None, degree: int = 4) -> BoundaryResiduals:
    """Residuals of the boundary balances against assigned data.

    ``t0(face_index, points)`` and ``h0(face_index, points)`` return ``(N, 3)``
    assigned traction/hypertraction at face sample points,
    ``f0(edge_index, points)`` the assigned edge force. A ``None`` assignment
    (or a callable returning ``None`` for some index) leaves that part of the
    boundary free. Each entry is the max Euclidean residual over the samples.
    """
    out = BoundaryResiduals()
    for fi, face in enumerate(part.faces):
        pts, _ = face_points(face, degree)
        n = face.normal
        if t0 is not None:
            assigned = t0(fi, pts)
            if assigned is not None:
                r = surface_traction_many(Tf, Hf, pts, n) - np.asarray(assigned)
                out.traction.append(float(np.max(np.linalg.norm(r, axis=1))))
        if h0 is not None:
            assigned = h0(fi, pts)
            if assigned is not None:
                h = np.einsum("nijk,j,k->ni", Hf.evaluate_many(pts), n, n)
                out.hypertraction.append(float(np.max(np.linalg.norm(h - np.asarray(assigned), axis=1))))
    if f0 is not None:
        for ei, edge in enumerate(part.edges):
            pts, _ = edge_points(edge, degree)
            assigned = f0(ei, pts)
            if assigned is None:
                continue
            f = np.einsum("nijk,jk->ni", Hf.evaluate_many(pts), edge.contraction_tensor())
            out.edge.append(float(np.max(np.linalg.norm(f - np.asarray(assigned), axis=1))))
    return out


def self_consistent_data(Tf: PolyField, Hf: PolyField, part: PolyhedralPart):
    """Boundary data ``(t0, h0, f0)`` generated by the fields themselves."""
    def t0(fi, pts):
        return surface_traction_many(Tf, Hf, pts, part.faces[fi].normal)

    def h0(fi, pts):
        n = part.faces[fi].normal
        return np.einsum("nijk,j,k->ni", Hf.evaluate_many(pts), n, n)

    def f0(ei, pts):
        return np.einsum("nijk,jk->ni", Hf.evaluate_many(pts), part.edges[ei].contraction_tensor())

    return t0, h0, f0


def sweep(parts: Sequence[PolyhedralPart], seeds: Sequence[int], tol: float = 1e-10,
          degrees=(2, 2, 3)) -> list[BalanceReport]:
    """``verify_pvp`` over every part and seeded random field triple."""
    reports = []
    for part in parts:
        for seed in seeds:
            Tf, Hf, v = random_triple(seed, *degrees)
            reports.append(verify_pvp(Tf, Hf, v, part, tol, seed=seed))
    return reports
