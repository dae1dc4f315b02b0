"""Observer changes and pointwise invariance checks of the internal power."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .fields import PolyField
from .geometry import EdgeFrame
from .tensor import (Rotation, Tensor3Sym, TensorError, as_tensor2, as_vector, inner2,
                     rotate2, rotate3, skew, t3_inner)
from .traction import edge_force, surface_hypertraction, surface_traction


@dataclass(frozen=True)
class ObserverChange:
    """Instantaneous observer change ``x+ = q + Q x`` with translation velocity
    ``q_dot`` and spin ``W = Q_dot Q^T``."""

    q_dot: np.ndarray
    Q: Rotation
    W: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q_dot", as_vector(self.q_dot))
        W = as_tensor2(self.W)
        if np.max(np.abs(W + W.T)) > DEFAULT.invariance:
            raise TensorError("spin tensor W must be skew")
        object.__setattr__(self, "W", W)

    @classmethod
    def identity(cls) -> "ObserverChange":
        return cls(np.zeros(3), Rotation.identity(), np.zeros((3, 3)))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "ObserverChange":
        return cls(rng.uniform(-1, 1, 3), Rotation.random(rng), skew(rng.uniform(-1, 1, (3, 3))))


def transform_velocity(v, x_plus, obs: ObserverChange) -> np.ndarray:
    """``v+ = q_dot + Q v + W x+``."""
    return obs.q_dot + obs.Q.matrix @ as_vector(v) + obs.W @ as_vector(x_plus)


def transform_gradients(gradv, grad2v: Tensor3Sym, obs: ObserverChange):
    """``(grad v)+ = Q * grad v + W`` and ``(grad^2 v)+ = Q * grad^2 v``."""
    return rotate2(obs.Q, gradv) + obs.W, rotate3(obs.Q, grad2v)


def transform_dynamics(T, H: Tensor3Sym, Q: Rotation):
    """Indifferent stress pair: ``(Q * T, Q * H)``."""
    return rotate2(Q, T), rotate3(Q, H)


def power_invariance_residual(T, H: Tensor3Sym, gradv, grad2v: Tensor3Sym,
                              obs: ObserverChange) -> float:
    """Difference of the specific internal power before and after the
    observer change, with the stress pair transformed indifferently.

    Analytically equal to ``|(Q * T) . W|``, which vanishes for every spin
    exactly when ``T`` is symmetric.
    """
    T = as_tensor2(T)
    before = inner2(T, gradv) + t3_inner(H, grad2v)
    gp, g2p = transform_gradients(gradv, grad2v, obs)
    Tp, Hp = transform_dynamics(T, H, obs.Q)
    after = inner2(Tp, gp) + t3_inner(Hp, g2p)
    return abs(before - after)


def find_symmetry_witness(T, tol: float = 0.0) -> np.ndarray | None:
    """A unit spin ``W = skew(T) / |skew(T)|`` exposing a non-symmetric ``T``.

    With ``Q = I`` and zero kinematics the residual at this ``W`` equals the
    Frobenius norm of ``skew(T)``. Returns ``None`` when ``|skew(T)| <= tol``.
    """
    S = skew(as_tensor2(T))
    norm = float(np.linalg.norm(S))
    if norm <= tol or norm == 0.0:
        return None
    return S / norm


def traction_indifference_check(T, H: Tensor3Sym, n, frame: EdgeFrame, Q: Rotation) -> dict:
    """Residuals of ``t+ = Q t``, ``h+ = Q h``, ``f+ = Q f`` for constant
    ``(T, H)`` transformed indifferently, with the normal and the edge frame
    rotated vectorwise."""
    M = Q.matrix
    Tp, Hp = transform_dynamics(T, H, Q)
    n = as_vector(n)
    origin = np.zeros(3)
    t = surface_traction(PolyField.constant(T), PolyField.constant(H), origin, n)
    tp = surface_traction(PolyField.constant(Tp), PolyField.constant(Hp), origin, M @ n)
    return {
        "t": float(np.max(np.abs(tp - M @ t))),
        "h": float(np.max(np.abs(surface_hypertraction(Hp, M @ n) - M @ surface_hypertraction(H, n)))),
        "f": float(np.max(np.abs(edge_force(Hp, frame.rotated(Q)) - M @ edge_force(H, frame)))),
    }
