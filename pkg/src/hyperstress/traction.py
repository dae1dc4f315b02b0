"""Traction, hypertraction and edge-force maps, and the reconstruction of the
stress pair ``(T, H)`` from them.

Pointwise maps take constant tensors; field maps take :class:`PolyField`
stress fields and handle the surface-divergence term exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT
from .fields import PolyField, surface_div_flat_many
from .geometry import EdgeFrame, GeometryError
from .tensor import Tensor3Sym, TensorError, as_tensor2, as_unit, as_vector, t3_contract2


@dataclass(frozen=True)
class TractionSample:
    x: np.ndarray
    n: np.ndarray
    t: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        as_unit(self.n)

    def to_json(self) -> dict:
        return {"x": np.asarray(self.x).tolist(), "n": np.asarray(self.n).tolist(),
                "t": np.asarray(self.t).tolist(), "h": np.asarray(self.h).tolist()}


@dataclass(frozen=True)
class EdgeForceSample:
    x: np.ndarray
    frame: EdgeFrame
    f: np.ndarray

    def __post_init__(self):
        self.frame.validate()

    def to_json(self) -> dict:
        return {"x": np.asarray(self.x).tolist(), "frame": self.frame.to_json(),
                "f": np.asarray(self.f).tolist()}


def standard_basis() -> np.ndarray:
    return np.eye(3)


def _check_basis(basis) -> np.ndarray:
    B = as_tensor2(basis)
    if np.max(np.abs(B @ B.T - np.eye(3))) > DEFAULT.rotation:
        raise TensorError("basis vectors (rows) must be orthonormal")
    return B


# -- simple continua ------------------------------------------------------------
def simple_traction(T, n) -> np.ndarray:
    """Cauchy traction ``T n``."""
    return as_tensor2(T) @ as_unit(n)


def simple_stress_from_tractions(t_map: Callable, basis=None) -> np.ndarray:
    """``sum_i t(n_i) (x) n_i`` over the rows of ``basis``."""
    B = _check_basis(np.eye(3) if basis is None else basis)
    return sum(np.outer(as_vector(t_map(n)), n) for n in B)


# -- second-gradient maps ---------------------------------------------------------
def reduced_stress(Tf: PolyField, Hf: PolyField) -> PolyField:
    """The field ``T - div H``."""
    return Tf - Hf.div()


def surface_traction_many(Tf: PolyField, Hf: PolyField, points, n) -> np.ndarray:
    n = as_unit(n)
    Tt = reduced_stress(Tf, Hf).evaluate_many(points)
    return Tt @ n - surface_div_flat_many(Hf, n, points)


def surface_traction(Tf: PolyField, Hf: PolyField, x, n) -> np.ndarray:
    """Traction on the plane through ``x`` with normal ``n``:
    ``(T - div H) n - sdiv((H n) sI)``."""
    return surface_traction_many(Tf, Hf, as_vector(x)[None, :], n)[0]


def surface_hypertraction(H: Tensor3Sym, n) -> np.ndarray:
    """``(H n) n = H[n (x) n]``."""
    n = as_unit(n)
    return t3_contract2(H, np.outer(n, n))


def edge_force(H: Tensor3Sym, E: EdgeFrame) -> np.ndarray:
    """``H[n' (x) m' + n'' (x) m'']``."""
    if not isinstance(E, EdgeFrame):
        raise GeometryError("edge_force needs an EdgeFrame")
    E.validate()
    return t3_contract2(H, np.outer(E.n_prime, E.m_prime)) + t3_contract2(H, np.outer(E.n_second, E.m_second))


def hypertraction_map(H: Tensor3Sym) -> Callable:
    return lambda n: surface_hypertraction(H, n)


def edge_force_map(H: Tensor3Sym) -> Callable:
    return lambda E: edge_force(H, E)


def basis_edges(basis) -> dict[tuple[int, int], EdgeFrame]:
    """Coordinate edges ``E_jk`` (``j < k``) of an orthonormal basis given as rows."""
    B = _check_basis(basis)
    return {(j, k): EdgeFrame(B[j], B[k], B[k], B[j]) for j, k in ((0, 1), (0, 2), (1, 2))}


def reconstruct_hyperstress(h_map: Callable, f_map: Callable, basis=None) -> Tensor3Sym:
    """Hyperstress from hypertractions on three coordinate planes and edge
    forces on the three coordinate edges of ``basis``::

        H = sum_j h(e_j) (x) e_j (x) e_j
            + 1/2 sum_{j<k} f(E_jk) (x) (e_j (x) e_k + e_k (x) e_j)
    """
    B = _check_basis(np.eye(3) if basis is None else basis)
    full = np.zeros((3, 3, 3))
    for j in range(3):
        full += np.einsum("i,j,k->ijk", as_vector(h_map(B[j])), B[j], B[j])
    for (j, k), E in basis_edges(B).items():
        pair = np.outer(B[j], B[k]) + np.outer(B[k], B[j])
        full += 0.5 * np.einsum("i,jk->ijk", as_vector(f_map(E)), pair)
    return Tensor3Sym.from_full(full, tol=1e-12)


def reconstruct_Ttilde(t_map: Callable, Hf: PolyField, x, basis=None) -> np.ndarray:
    """``T - div H`` at ``x`` from the traction map ``t_map(x, n)``::

        sum_i (t(x, n_i) + sdiv((H n_i) sI)) (x) n_i
    """
    B = _check_basis(np.eye(3) if basis is None else basis)
    x = as_vector(x)
    out = np.zeros((3, 3))
    for n in B:
        surface = surface_div_flat_many(Hf, n, x[None, :])[0]
        out += np.outer(as_vector(t_map(x, n)) + surface, n)
    return out


def reconstruct_T(Ttilde, Hf: PolyField, x) -> np.ndarray:
    """``T = T~ + div H`` at ``x``."""
    return as_tensor2(Ttilde) + Hf.div()(as_vector(x))


def traction_map_from_fields(Tf: PolyField, Hf: PolyField) -> Callable:
    """``t(x, n)`` induced by the stress fields."""
    return lambda x, n: surface_traction(Tf, Hf, x, n)


def sample_tractions(Tf: PolyField, Hf: PolyField, x, normals: Sequence) -> list[TractionSample]:
    H = Hf.at_sym(x) if Hf.hyperstress else Tensor3Sym.from_full(Hf(x))
    return [TractionSample(np.asarray(x, float), np.asarray(n, float),
                           surface_traction(Tf, Hf, x, n), surface_hypertraction(H, n))
            for n in normals]
