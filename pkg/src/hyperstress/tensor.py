"""Fixed-dimension tensor algebra: vectors, second-order tensors, rotations and
third-order tensors symmetric in their last two indices.

Vectors and second-order tensors are plain ``numpy`` arrays of shape ``(3,)``
and ``(3, 3)``. Rotations and right-pair-symmetric third-order tensors get
small immutable wrapper classes because each carries an invariant that must be
checked (or made unbreakable) at construction.
"""

from __future__ import annotations

import numpy as np

# Canonical ordering of the unordered index pair {jk}.
PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
PAIR_INDEX = np.empty((3, 3), dtype=int)
for _p, (_j, _k) in enumerate(PAIRS):
    PAIR_INDEX[_j, _k] = PAIR_INDEX[_k, _j] = _p
del _p, _j, _k

ROTATION_TOL = 1e-12
PACKING_TOL = 1e-14

IDENTITY = np.eye(3)
E1, E2, E3 = IDENTITY


class TensorError(ValueError):
    pass


def as_vector(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise TensorError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise TensorError("vector has non-finite components")
    return a


def as_tensor2(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.shape != (3, 3):
        raise TensorError(f"expected a 3x3 tensor, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise TensorError("tensor has non-finite components")
    return A


def as_unit(n, tol: float = ROTATION_TOL) -> np.ndarray:
    n = as_vector(n)
    if abs(np.linalg.norm(n) - 1.0) > tol:
        raise TensorError(f"expected a unit vector, |n| = {np.linalg.norm(n)!r}")
    return n


def sym(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return 0.5 * (A + A.T)


def skew(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return 0.5 * (A - A.T)


def inner2(A, B) -> float:
    """Full contraction ``A . B = A_ij B_ij``."""
    return float(np.einsum("ij,ij->", A, B))


def outer(a, b) -> np.ndarray:
    return np.outer(a, b)


class Rotation:
    """A proper orthogonal tensor, validated to roundoff at construction."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix, tol: float = ROTATION_TOL):
        Q = as_tensor2(matrix).copy()
        if np.max(np.abs(Q.T @ Q - IDENTITY)) > tol:
            raise TensorError("matrix is not orthogonal")
        if abs(np.linalg.det(Q) - 1.0) > tol:
            raise TensorError("matrix is not a proper rotation (det != +1)")
        Q.flags.writeable = False
        self._matrix = Q

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def T(self) -> "Rotation":
        return Rotation(self._matrix.T)

    def __matmul__(self, other):
        if isinstance(other, Rotation):
            return Rotation(self._matrix @ other._matrix)
        return self._matrix @ np.asarray(other, dtype=float)

    def __repr__(self):
        return f"Rotation({self._matrix.tolist()!r})"

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(IDENTITY)

    @classmethod
    def about_axis(cls, axis, angle: float) -> "Rotation":
        """Right-handed rotation by ``angle`` about ``axis`` (Rodrigues)."""
        k = as_vector(axis)
        k = k / np.linalg.norm(k)
        K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
        Q = IDENTITY + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)
        return cls(Q)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "Rotation":
        # QR of a Gaussian matrix with sign fix gives a Haar-distributed rotation.
        Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
        Q = Q * np.sign(np.diag(R))
        if np.linalg.det(Q) < 0:
            Q[:, 0] = -Q[:, 0]
        return cls(Q)


class Tensor3Sym:
    """Third-order tensor with ``H_ijk = H_ikj``, stored as 18 packed numbers.

    ``packed[i, p]`` holds ``H_ijk`` for the ``p``-th pair of :data:`PAIRS`.
    Off-diagonal pairs are stored once, so the right-pair symmetry cannot be
    violated by construction.
    """

    __slots__ = ("_packed",)

    def __init__(self, packed):
        P = np.array(packed, dtype=float)
        if P.shape != (3, 6):
            raise TensorError(f"packed storage must have shape (3, 6), got {P.shape}")
        if not np.all(np.isfinite(P)):
            raise TensorError("tensor has non-finite components")
        P.flags.writeable = False
        self._packed = P

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    def full(self) -> np.ndarray:
        return self._packed[:, PAIR_INDEX]

    def __getitem__(self, idx) -> float:
        i, j, k = idx
        return float(self._packed[i, PAIR_INDEX[j, k]])

    @classmethod
    def zeros(cls) -> "Tensor3Sym":
        return cls(np.zeros((3, 6)))

    @classmethod
    def from_full(cls, A, tol: float = PACKING_TOL) -> "Tensor3Sym":
        """Pack a full ``3x3x3`` array; the pair asymmetry must stay below
        ``tol`` relative to ``max(1, max|A|)``."""
        A = np.asarray(A, dtype=float)
        if A.shape != (3, 3, 3):
            raise TensorError(f"expected a 3x3x3 array, got shape {A.shape}")
        gap = np.max(np.abs(A - A.transpose(0, 2, 1)))
        if gap > tol * max(1.0, float(np.max(np.abs(A)))):
            raise TensorError(f"array is not symmetric in its last two indices (gap {gap:.3e})")
        S = 0.5 * (A + A.transpose(0, 2, 1))
        return cls(np.stack([S[:, j, k] for j, k in PAIRS], axis=1))

    @classmethod
    def from_entries(cls, entries: dict) -> "Tensor3Sym":
        """Build from ``{(i, j, k): value}`` with zero-based indices; the
        mirrored entry ``(i, k, j)`` is implied."""
        P = np.zeros((3, 6))
        for (i, j, k), value in entries.items():
            P[i, PAIR_INDEX[j, k]] = value
        return cls(P)

    @classmethod
    def spherical(cls, h) -> "Tensor3Sym":
        """``h (x) I``, i.e. ``H_ijk = h_i delta_jk``."""
        return cls.from_full(np.einsum("i,jk->ijk", as_vector(h), IDENTITY))

    @classmethod
    def random(cls, rng: np.random.Generator, scale: float = 1.0) -> "Tensor3Sym":
        return cls(scale * rng.uniform(-1.0, 1.0, size=(3, 6)))

    def __add__(self, other: "Tensor3Sym") -> "Tensor3Sym":
        return Tensor3Sym(self._packed + other._packed)

    def __sub__(self, other: "Tensor3Sym") -> "Tensor3Sym":
        return Tensor3Sym(self._packed - other._packed)

    def __neg__(self) -> "Tensor3Sym":
        return Tensor3Sym(-self._packed)

    def __mul__(self, alpha: float) -> "Tensor3Sym":
        return Tensor3Sym(float(alpha) * self._packed)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Tensor3Sym):
            return NotImplemented
        return bool(np.array_equal(self._packed, other._packed))

    def __hash__(self):
        return hash(self._packed.tobytes())

    def __repr__(self):
        return f"Tensor3Sym({self._packed.tolist()!r})"

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._packed)))


def t3_apply_vector(H: Tensor3Sym, a) -> np.ndarray:
    """``(H a)_ij = H_ijk a_k``."""
    return H.full() @ as_vector(a)


def t3_contract2(H: Tensor3Sym, A) -> np.ndarray:
    """``(H[A])_i = H_ijk A_jk``."""
    return np.einsum("ijk,jk->i", H.full(), as_tensor2(A))


def t3_inner(H: Tensor3Sym, K: Tensor3Sym) -> float:
    # Expanded sum: off-diagonal pairs count twice.
    return float(np.einsum("ijk,ijk->", H.full(), K.full()))


def t3_transpose_vector(H: Tensor3Sym, w) -> np.ndarray:
    """The symmetric second-order tensor ``(wH)_jk = w_i H_ijk``."""
    return np.einsum("i,ijk->jk", as_vector(w), H.full())


def rotate2(Q: Rotation, A) -> np.ndarray:
    """``Q * A = Q A Q^T``."""
    M = Q.matrix
    return M @ as_tensor2(A) @ M.T


def rotate3(Q: Rotation, H: Tensor3Sym) -> Tensor3Sym:
    """``[Q * H]_ijk = Q_ip Q_jq Q_kr H_pqr``."""
    M = Q.matrix
    return Tensor3Sym.from_full(np.einsum("ip,jq,kr,pqr->ijk", M, M, M, H.full()))
