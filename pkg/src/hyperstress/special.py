"""Hyperstresses that produce no edge forces, and the Navier-Stokes-alpha
hyperstress decomposition.

A hyperstress yields zero edge force on every edge iff it is spherical,
``H = h (x) I``. The forward direction is checked here the way it is proved:
zero force on the coordinate edges reduces ``H`` to ``sum_j h_j (x) e_j (x) e_j``,
and edges rotated by ``pi/4`` about ``e_3`` and ``e_1`` expose ``h_2 - h_1`` and
``h_3 - h_2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT
from .fields import PolyField, curl, grad2_velocity, is_divergence_free
from .geometry import EdgeFrame, coordinate_edge
from .tensor import (IDENTITY, Rotation, Tensor3Sym, as_vector, t3_contract2, t3_inner,
                     t3_transpose_vector)
from .traction import edge_force

PROBE_ANGLE = np.pi / 4


class NotSphericalError(ValueError):
    """Raised when the edge probes show a nonzero edge force."""

    def __init__(self, message: str, probes: dict):
        super().__init__(message)
        self.probes = probes


@dataclass(frozen=True)
class SphericalHyperstress:
    h: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h", as_vector(self.h))

    def tensor(self) -> Tensor3Sym:
        return Tensor3Sym.spherical(self.h)


@dataclass(frozen=True)
class NsAlphaDecomposition:
    H1: Tensor3Sym
    H2: Tensor3Sym
    g: np.ndarray

    @property
    def total(self) -> Tensor3Sym:
        return self.H1 + self.H2


def classify_spherical(H: Tensor3Sym, tol: float = DEFAULT.spherical):
    """Fit ``h = H[I] / 3`` and measure the max-abs packed deviation from
    ``h (x) I``. Returns ``(h, residual)``, with ``h = None`` if the residual
    exceeds ``tol``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    h = t3_contract2(H, IDENTITY) / 3.0
    residual = (H - Tensor3Sym.spherical(h)).max_abs()
    return (h if residual <= tol else None), residual


def _scan_pair(axis: int) -> tuple[int, int]:
    if axis not in (0, 1, 2):
        raise ValueError("axis must be 0, 1 or 2")
    return (axis + 1) % 3, (axis + 2) % 3


def rotated_edge(axis: int, theta: float) -> EdgeFrame:
    """The coordinate edge of the basis rotated by ``theta`` about ``e_axis``."""
    j, k = _scan_pair(axis)
    Q = Rotation.about_axis(IDENTITY[axis], theta).matrix
    ej, ek = Q @ IDENTITY[j], Q @ IDENTITY[k]
    return EdgeFrame(ej, ek, ek, ej)


def edge_scan(H: Tensor3Sym, axis: int = 2, theta_samples: Sequence[float] = ()):
    """Edge force on the rotated coordinate edge as a function of the angle.

    For ``axis = 2`` (rotation about ``e_3``)::

        f12(theta) = sin(2 theta) (h2 - h1) + cos(2 theta) f12(0)

    and cyclically for the other axes. Returns ``[(theta, force), ...]``.
    """
    j, k = _scan_pair(axis)
    hj = t3_contract2(H, np.outer(IDENTITY[j], IDENTITY[j]))
    hk = t3_contract2(H, np.outer(IDENTITY[k], IDENTITY[k]))
    fjk = 2.0 * t3_contract2(H, np.outer(IDENTITY[j], IDENTITY[k]))
    out = []
    for theta in theta_samples:
        if not 0.0 <= theta < np.pi:
            raise ValueError("scan angles must lie in [0, pi)")
        s, c = np.sin(theta), np.cos(theta)
        out.append((float(theta), -2 * s * c * hj + 2 * s * c * hk + c * c * fjk - s * s * fjk))
    return out


def edge_scan_direct(H: Tensor3Sym, axis: int = 2, theta_samples: Sequence[float] = ()):
    """Same scan, computed by rotating the edge and contracting."""
    return [(float(t), edge_force(H, rotated_edge(axis, t))) for t in theta_samples]


def probe_set() -> dict[str, EdgeFrame]:
    probes = {f"E{j + 1}{k + 1}": coordinate_edge(j, k) for j, k in ((0, 1), (0, 2), (1, 2))}
    probes["rot_e3_pi/4"] = rotated_edge(2, PROBE_ANGLE)
    probes["rot_e1_pi/4"] = rotated_edge(0, PROBE_ANGLE)
    return probes


def prove_spherical_from_zero_edges(f_map: Callable, h_map: Callable,
                                    tol: float = DEFAULT.spherical) -> np.ndarray:
    """Return ``h`` for edge/hypertraction maps with no edge forces.

    The edge map is probed on the three coordinate edges and on the two
    rotated edges; any probe above ``tol`` raises :class:`NotSphericalError`.
    Otherwise ``h_1 = h_2 = h_3`` follows and their mean is returned.
    """
    probes = {name: as_vector(f_map(E)) for name, E in probe_set().items()}
    bad = {name: float(np.linalg.norm(f)) for name, f in probes.items() if np.linalg.norm(f) > tol}
    if bad:
        raise NotSphericalError(f"nonzero edge force on probes {sorted(bad)}", probes)
    hs = [as_vector(h_map(IDENTITY[j])) for j in range(3)]
    spread = max(np.max(np.abs(a - b)) for a in hs for b in hs)
    if spread > 10 * tol:
        raise NotSphericalError(f"hypertractions on coordinate planes differ by {spread:.3e}", probes)
    return np.mean(hs, axis=0)


def forte_vianello_check(H: Tensor3Sym, w, tol: float = DEFAULT.spherical):
    """Fit ``wH = lambda I`` with ``lambda = tr(wH) / 3``; returns
    ``(lambda, max-abs residual)``. Spherical ``H`` gives ``lambda = h . w``."""
    wH = t3_transpose_vector(H, w)
    lam = float(np.trace(wH) / 3.0)
    return lam, float(np.max(np.abs(wH - lam * IDENTITY)))


def nsalpha_decompose(g) -> NsAlphaDecomposition:
    """Reactive ``(H1)_ijk = (delta_ij g_k + delta_ik g_j) / 2`` and active
    ``H2 = -g (x) I``."""
    g = as_vector(g)
    H1 = 0.5 * (np.einsum("ij,k->ijk", IDENTITY, g) + np.einsum("ik,j->ijk", IDENTITY, g))
    return NsAlphaDecomposition(Tensor3Sym.from_full(H1), Tensor3Sym.spherical(-g), g)


def nsalpha_power_check(g, v: PolyField, x, decomposition: NsAlphaDecomposition | None = None):
    """Residuals at ``x`` of ``(H1 + H2) . grad^2 v = g . curl curl v`` and, when
    ``div v`` vanishes identically, of ``g . curl curl v = -g . lap v``.

    Returns ``(residual_full, residual_divfree)``; the second is ``None`` for
    compressible ``v``.
    """
    g = as_vector(g)
    dec = nsalpha_decompose(g) if decomposition is None else decomposition
    x = as_vector(x)
    ccv = curl(curl(v))(x)
    lhs = t3_inner(dec.total, grad2_velocity(v).at_sym(x))
    full = abs(lhs - g @ ccv)
    divfree = abs(g @ ccv + g @ v.laplacian()(x)) if is_divergence_free(v) else None
    return full, divfree


def nsalpha_constitutive(zeta: float, v: PolyField, x) -> np.ndarray:
    """``g = zeta lap v`` at ``x``."""
    if not zeta > 0:
        raise ValueError("zeta must be positive")
    return zeta * v.laplacian()(as_vector(x))


def divergence_free_velocity(rng: np.random.Generator, degree: int) -> PolyField:
    """A random velocity with identically zero divergence, ``v = curl psi``.

    Small dyadic coefficients keep ``div curl psi`` cancelling bit-exactly, so the
    symbolic incompressibility test recognizes it.
    """
    return curl(0.125 * PolyField.random(rng, 1, degree + 1, integer=True))
