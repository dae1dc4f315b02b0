"""Default numerical tolerances, kept in one place."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

ENV_DEFAULT_TOL = "HSK_DEFAULT_TOL"
MAX_DEGREE = 8


@dataclass(frozen=True)
class Tolerances:
    rotation: float = 1e-12
    packing: float = 1e-14
    unit_vector: float = 1e-12
    frame: float = 1e-12
    planarity: float = 1e-10
    closure: float = 1e-12
    pvp: float = 1e-10
    reconstruction: float = 1e-13
    basis_independence: float = 1e-12
    stress_chain: float = 1e-11
    spherical: float = 1e-12
    converse: float = 1e-14
    invariance: float = 1e-13
    indifference: float = 1e-12
    nsalpha: float = 1e-12
    divergence: float = 1e-11

    def with_overrides(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT = Tolerances()


def env_tol() -> float | None:
    raw = os.environ.get(ENV_DEFAULT_TOL)
    if raw is None or raw.strip() == "":
        return None
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{ENV_DEFAULT_TOL} must be positive, got {raw!r}")
    return value


def default_cli_tol() -> float:
    """The suite tolerance used by the CLI, overridable through the environment."""
    value = env_tol()
    return DEFAULT.pvp if value is None else value
