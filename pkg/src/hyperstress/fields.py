"""Polynomial tensor fields over 3D space with exact differentiation.

A :class:`PolyField` of rank ``r`` is a finite sum of monomials
``x1**a x2**b x3**c`` times constant coefficients of shape ``(3,) * r``.
Differentiation acts on the exponent/coefficient pairs directly, so every
differential operator below is exact up to the roundoff of multiplying a
coefficient by a small integer.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping

import numpy as np

from .config import MAX_DEGREE
from .tensor import PACKING_TOL, Tensor3Sym, as_unit, as_vector

Exponent = tuple[int, int, int]

_UNIT_EXP = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
# Levi-Civita symbol.
EPSILON = np.zeros((3, 3, 3))
for _i, _j, _k in itertools.permutations(range(3)):
    EPSILON[_i, _j, _k] = np.linalg.det(np.eye(3)[[_i, _j, _k]])
del _i, _j, _k


class FieldError(ValueError):
    pass


class DegreeError(FieldError):
    pass


def monomial_exponents(degree: int) -> list[Exponent]:
    """All exponent triples of total degree ``<= degree``, graded order."""
    out = []
    for d in range(degree + 1):
        for a in range(d, -1, -1):
            for b in range(d - a, -1, -1):
                out.append((a, b, d - a - b))
    return out


class PolyField:
    """Immutable polynomial field with tensor coefficients.

    Parameters
    ----------
    rank : int
        Tensor rank of the values, 0 to 3.
    terms : mapping or iterable of (exponent, coefficient)
        Duplicate exponents are summed; exactly-zero coefficients dropped.
    hyperstress : bool
        Rank-3 only. Coefficients must be symmetric in their last two indices
        (to :data:`~hyperstress.tensor.PACKING_TOL`); they are stored
        symmetrized so that point values pack into :class:`Tensor3Sym`.
    """

    __slots__ = ("rank", "hyperstress", "_terms", "_exps", "_coefs")

    def __init__(self, rank: int, terms: Mapping | Iterable = (), hyperstress: bool = False):
        if rank not in (0, 1, 2, 3):
            raise FieldError(f"unsupported rank {rank}")
        if hyperstress and rank != 3:
            raise FieldError("only rank-3 fields can be flagged as hyperstress fields")
        shape = (3,) * rank
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[Exponent, np.ndarray] = {}
        for exp, coef in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != 3 or min(exp) < 0:
                raise FieldError(f"invalid exponent {exp}")
            if sum(exp) > MAX_DEGREE:
                raise DegreeError(f"total degree {sum(exp)} exceeds the supported maximum {MAX_DEGREE}")
            c = np.asarray(coef, dtype=float)
            if c.shape != shape:
                raise FieldError(f"coefficient shape {c.shape} does not match rank {rank}")
            if not np.all(np.isfinite(c)):
                raise FieldError("non-finite coefficient")
            merged[exp] = merged[exp] + c if exp in merged else c.copy()
        if hyperstress:
            for exp, c in merged.items():
                gap = np.max(np.abs(c - c.transpose(0, 2, 1)))
                if gap > PACKING_TOL * max(1.0, float(np.max(np.abs(c)))):
                    raise FieldError(f"coefficient of {exp} is not symmetric in its last two indices")
                merged[exp] = 0.5 * (c + c.transpose(0, 2, 1))
        merged = {e: c for e, c in sorted(merged.items()) if np.any(c != 0.0)}
        for c in merged.values():
            c.flags.writeable = False
        self.rank = rank
        self.hyperstress = hyperstress
        self._terms = merged
        self._exps = np.array(list(merged), dtype=float).reshape(-1, 3)
        self._coefs = (np.stack(list(merged.values())) if merged
                       else np.zeros((0,) + shape))

    # -- construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, rank: int, hyperstress: bool = False) -> "PolyField":
        return cls(rank, {}, hyperstress=hyperstress)

    @classmethod
    def constant(cls, value, hyperstress: bool = False) -> "PolyField":
        if isinstance(value, Tensor3Sym):
            value, hyperstress = value.full(), True
        value = np.asarray(value, dtype=float)
        return cls(value.ndim, {(0, 0, 0): value}, hyperstress=hyperstress)

    @classmethod
    def position(cls) -> "PolyField":
        """The identity flow ``v(x) = x``."""
        return cls(1, {e: row for e, row in zip(_UNIT_EXP, np.eye(3))})

    @classmethod
    def random(cls, rng: np.random.Generator, rank: int, degree: int, *,
               symmetric: bool = False, hyperstress: bool = False,
               integer: bool = False) -> "PolyField":
        """Dense random field with every monomial up to ``degree``.

        ``symmetric`` makes rank-2 coefficients symmetric; ``hyperstress``
        makes rank-3 coefficients right-pair symmetric. ``integer`` draws
        small integers so that derived identities hold bit-exactly.
        """
        shape = (3,) * rank
        terms = {}
        for exp in monomial_exponents(degree):
            if integer:
                c = rng.integers(-5, 6, size=shape).astype(float)
            else:
                c = rng.uniform(-1.0, 1.0, size=shape)
            if symmetric and rank == 2:
                c = 0.5 * (c + c.T)
            if hyperstress:
                c = 0.5 * (c + c.transpose(0, 2, 1))
            terms[exp] = c
        return cls(rank, terms, hyperstress=hyperstress)

    # -- inspection -----------------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, np.ndarray]:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def __repr__(self):
        flag = ", hyperstress" if self.hyperstress else ""
        return f"PolyField(rank={self.rank}, terms={len(self._terms)}, degree={self.degree}{flag})"

    # -- evaluation -----------------------------------------------------------
    def evaluate_many(self, points) -> np.ndarray:
        """Values at ``points`` of shape ``(N, 3)``; result ``(N,) + (3,) * rank``."""
        X = np.asarray(points, dtype=float).reshape(-1, 3)
        if not self._terms:
            return np.zeros((X.shape[0],) + (3,) * self.rank)
        mono = np.prod(X[:, None, :] ** self._exps[None, :, :], axis=2)
        return np.tensordot(mono, self._coefs, axes=(1, 0))

    def __call__(self, x) -> np.ndarray:
        return self.evaluate_many(as_vector(x)[None, :])[0]

    def at_sym(self, x) -> Tensor3Sym:
        """Point value of a hyperstress field as packed :class:`Tensor3Sym`."""
        if not self.hyperstress:
            raise FieldError("field is not flagged as a hyperstress field")
        return Tensor3Sym.from_full(self(x))

    # -- algebra --------------------------------------------------------------
    def _check_same_rank(self, other: "PolyField"):
        if not isinstance(other, PolyField) or other.rank != self.rank:
            raise FieldError("fields must have equal rank")

    def __add__(self, other: "PolyField") -> "PolyField":
        self._check_same_rank(other)
        return PolyField(self.rank, itertools.chain(self._terms.items(), other._terms.items()),
                         hyperstress=self.hyperstress and other.hyperstress)

    def __neg__(self) -> "PolyField":
        return PolyField(self.rank, {e: -c for e, c in self._terms.items()}, hyperstress=self.hyperstress)

    def __sub__(self, other: "PolyField") -> "PolyField":
        return self + (-other)

    def __mul__(self, alpha: float) -> "PolyField":
        alpha = float(alpha)
        return PolyField(self.rank, {e: alpha * c for e, c in self._terms.items()},
                         hyperstress=self.hyperstress)

    __rmul__ = __mul__

    def coefficients_equal(self, other: "PolyField", atol: float = 0.0) -> bool:
        """Coefficientwise comparison; ``atol=0`` asks for bit equality."""
        self._check_same_rank(other)
        for exp in set(self._terms) | set(other._terms):
            a = self._terms.get(exp, 0.0)
            b = other._terms.get(exp, 0.0)
            if np.max(np.abs(np.asarray(a) - np.asarray(b))) > atol:
                return False
        return True

    def contract_last(self, a) -> "PolyField":
        """``f_{...k} a_k`` with a constant vector ``a``."""
        if self.rank == 0:
            raise FieldError("cannot contract a scalar field")
        a = as_vector(a)
        return PolyField(self.rank - 1, {e: c @ a for e, c in self._terms.items()})

    def map_coefficients(self, rank: int, fn, hyperstress: bool = False) -> "PolyField":
        """Apply a linear map to every coefficient (e.g. a rotation action)."""
        return PolyField(rank, {e: fn(c) for e, c in self._terms.items()}, hyperstress=hyperstress)

    # -- differentiation ------------------------------------------------------
    def partial(self, axis: int) -> "PolyField":
        out = {}
        for exp, c in self._terms.items():
            if exp[axis]:
                new = list(exp)
                new[axis] -= 1
                out[tuple(new)] = exp[axis] * c
        return PolyField(self.rank, out, hyperstress=self.hyperstress)

    def grad(self) -> "PolyField":
        """Gradient; the new last index is the derivative index."""
        if self.rank >= 3:
            raise FieldError("gradient of a rank-3 field would need rank 4, which is unsupported")
        out: dict[Exponent, np.ndarray] = {}
        for exp, c in self._terms.items():
            for axis in range(3):
                if not exp[axis]:
                    continue
                new = list(exp)
                new[axis] -= 1
                new = tuple(new)
                block = out.setdefault(new, np.zeros(c.shape + (3,)))
                block[..., axis] += exp[axis] * c
        return PolyField(self.rank + 1, out)

    def div(self) -> "PolyField":
        """Divergence on the last index: ``(div f)_{...} = d f_{...k} / dx_k``."""
        if self.rank == 0:
            raise FieldError("divergence of a scalar field is undefined")
        out: dict[Exponent, np.ndarray] = {}
        for exp, c in self._terms.items():
            for axis in range(3):
                if not exp[axis]:
                    continue
                new = list(exp)
                new[axis] -= 1
                new = tuple(new)
                block = out.setdefault(new, np.zeros(c.shape[:-1]))
                block += exp[axis] * c[..., axis]
        return PolyField(self.rank - 1, out)

    def laplacian(self) -> "PolyField":
        result = PolyField.zero(self.rank, hyperstress=self.hyperstress)
        for axis in range(3):
            result = result + self.partial(axis).partial(axis)
        return result


VelocityField = PolyField


def velocity_field(terms) -> PolyField:
    """A rank-1 field; ``terms`` maps exponents to 3-vectors."""
    return PolyField(1, terms)


def grad(f: PolyField) -> PolyField:
    return f.grad()


def div(f: PolyField) -> PolyField:
    return f.div()


def grad2_velocity(v: PolyField) -> PolyField:
    """Second gradient ``(grad^2 v)_ijk = d^2 v_i / dx_j dx_k`` as a hyperstress-
    flagged field. The integer multiplier of each mixed partial is formed once,
    so the ``jk`` symmetry is bit-exact."""
    if v.rank != 1:
        raise FieldError("grad2_velocity expects a rank-1 field")
    out: dict[Exponent, np.ndarray] = {}
    for exp, c in v.terms.items():
        for j in range(3):
            for k in range(3):
                mult = exp[j] * (exp[k] - (j == k))
                if mult <= 0:
                    continue
                new = list(exp)
                new[j] -= 1
                new[k] -= 1
                new = tuple(new)
                block = out.setdefault(new, np.zeros((3, 3, 3)))
                block[:, j, k] += mult * c
    return PolyField(3, out, hyperstress=True)


def curl(v: PolyField) -> PolyField:
    """``(curl v)_i = eps_ijk d v_k / dx_j``."""
    if v.rank != 1:
        raise FieldError("curl expects a rank-1 field")
    return v.grad().map_coefficients(1, lambda G: np.einsum("ijk,kj->i", EPSILON, G))


def laplacian(f: PolyField) -> PolyField:
    return f.laplacian()


def divergence_scalar(v: PolyField) -> PolyField:
    if v.rank != 1:
        raise FieldError("divergence_scalar expects a rank-1 field")
    return v.div()


def is_divergence_free(v: PolyField) -> bool:
    """Symbolic check: the divergence has no nonzero coefficient."""
    return divergence_scalar(v).is_zero()


def tangent_basis(n) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal tangent pair for the plane with normal ``n``:
    Gram-Schmidt on the coordinate axis least aligned with ``n``, then
    ``n x t1`` so that ``(t1, t2, n)`` is right-handed."""
    n = as_unit(n)
    axis = int(np.argmin(np.abs(n)))
    t1 = np.eye(3)[axis] - n[axis] * n
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(n, t1)
    return t1, t2


def surface_div_flat_many(Hf: PolyField, n, points) -> np.ndarray:
    """Surface divergence of ``(H n) sI`` on the plane with normal ``n``,
    evaluated at each of ``points``; result ``(N, 3)``."""
    if Hf.rank != 3:
        raise FieldError("surface_div_flat expects a rank-3 field")
    n = as_unit(n)
    t1, t2 = tangent_basis(n)
    G = Hf.contract_last(n).grad().evaluate_many(points)
    return (np.einsum("nijl,j,l->ni", G, t1, t1)
            + np.einsum("nijl,j,l->ni", G, t2, t2))


def surface_div_flat(Hf: PolyField, n, x) -> np.ndarray:
    """``sum_a d/d(tau_a) [H(x) n] tau_a`` over an orthonormal tangent basis of
    the flat face through ``x`` with unit normal ``n``."""
    return surface_div_flat_many(Hf, n, as_vector(x)[None, :])[0]


# -- serialization ------------------------------------------------------------
def field_to_json(f: PolyField) -> dict:
    out = {
        "rank": f.rank,
        "terms": [{"exp": list(exp), "coef": np.asarray(c).ravel().tolist()}
                  for exp, c in f.terms.items()],
    }
    if f.hyperstress:
        out["hyperstress"] = True
    return out


def field_from_json(data: Mapping) -> PolyField:
    try:
        rank = int(data["rank"])
        raw_terms = data["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FieldError(f"malformed field description: {exc}") from exc
    if rank not in (0, 1, 2, 3):
        raise FieldError(f"unsupported rank {rank}")
    shape = (3,) * rank
    terms = []
    for t in raw_terms:
        coef = np.asarray(t["coef"], dtype=float)
        if coef.size != 3 ** rank:
            raise FieldError(f"term {t['exp']} has {coef.size} coefficients, expected {3 ** rank}")
        terms.append((tuple(t["exp"]), coef.reshape(shape)))
    return PolyField(rank, terms, hyperstress=bool(data.get("hyperstress", False)))
