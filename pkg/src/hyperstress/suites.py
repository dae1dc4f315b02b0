"""Seeded verification batteries behind the command-line subcommands.

Each battery returns a list of :class:`Check` records; a battery passes when
every check does. ``inject_defect`` swaps in a deliberately wrong ingredient
so the failure path can be exercised end to end.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .balance import BalanceReport, random_triple, verify_pvp
from .config import DEFAULT
from .fields import PolyField
from .geometry import PolyhedralPart, random_edge_frame
from .invariance import (ObserverChange, find_symmetry_witness, power_invariance_residual,
                         traction_indifference_check)
from .special import (PROBE_ANGLE, NotSphericalError, NsAlphaDecomposition, classify_spherical,
                      divergence_free_velocity, edge_scan, nsalpha_decompose, nsalpha_power_check,
                      prove_spherical_from_zero_edges)
from .tensor import Rotation, Tensor3Sym, inner2, rotate2, skew, t3_contract2
from .traction import edge_force, edge_force_map, hypertraction_map, reconstruct_hyperstress


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    comparison: str = "<="

    def to_json(self) -> dict:
        return asdict(self)


def _le(name, value, tol) -> Check:
    value = float(value)
    return Check(name, value, tol, bool(value <= tol))


def _ge(name, value, bound) -> Check:
    value = float(value)
    return Check(name, value, bound, bool(value >= bound), ">=")


# -- virtual power ----------------------------------------------------------------
def pvp_battery(parts: list[PolyhedralPart], seeds: list[int], tol: float,
                degree: int = 2, fields=None, inject_defect: bool = False,
                workers: int = 4) -> list[BalanceReport]:
    """``verify_pvp`` for every part and seed, run in a thread pool; the
    output order is parts-major regardless of completion order."""
    edge_weight = -1.0 if inject_defect else 1.0
    jobs = [(p, s) for p in parts for s in seeds]

    def run(job):
        part, seed = job
        Tf, Hf, v = fields if fields is not None else random_triple(seed, degree, degree, degree + 1)
        return verify_pvp(Tf, Hf, v, part, tol, seed=seed, edge_weight=edge_weight)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))


# -- reconstruction -----------------------------------------------------------------
def _one_sided_edge_map(H: Tensor3Sym):
    """Defective edge map using only the first face of each edge."""
    return lambda E: t3_contract2(H, np.outer(E.n_prime, E.m_prime))


def reconstruct_battery(seed: int, samples: int = 1000, bases: int = 100, tol=None,
                        tensors=None, inject_defect: bool = False) -> list[Check]:
    rng = np.random.default_rng(seed)
    tol_rt = DEFAULT.reconstruction if tol is None else tol
    tol_basis = DEFAULT.basis_independence if tol is None else tol
    Hs = tensors if tensors is not None else [Tensor3Sym.random(rng) for _ in range(samples)]
    f_map_for = _one_sided_edge_map if inject_defect else edge_force_map
    roundtrip = 0.0
    for H in Hs:
        R = reconstruct_hyperstress(hypertraction_map(H), f_map_for(H))
        roundtrip = max(roundtrip, (R - H).max_abs())
    cross = 0.0
    for i in range(bases):
        H = Hs[i % len(Hs)]
        h_map, f_map = hypertraction_map(H), f_map_for(H)
        basis = Rotation.random(rng).matrix.T
        gap = reconstruct_hyperstress(h_map, f_map, basis) - reconstruct_hyperstress(h_map, f_map)
        cross = max(cross, gap.max_abs())
    return [_le("roundtrip_max_abs_error", roundtrip, tol_rt),
            _le("cross_basis_max_abs_error", cross, tol_basis)]


# -- no-edge-force classification -----------------------------------------------------------
def _deviation(H: Tensor3Sym) -> float:
    h = t3_contract2(H, np.eye(3)) / 3.0
    return (H - Tensor3Sym.spherical(h)).max_abs()


def rotated_probe_magnitude(H: Tensor3Sym) -> float:
    """Largest rotated-edge probe ``|f(pi/4)|`` about ``e_3`` and ``e_1``."""
    return max(float(np.linalg.norm(edge_scan(H, axis, [PROBE_ANGLE])[0][1])) for axis in (2, 0))


def classify_battery(seed: int, samples: int = 50, tol=None, tensors=None,
                     inject_defect: bool = False) -> list[Check]:
    rng = np.random.default_rng(seed)
    tol_s = DEFAULT.spherical if tol is None else tol
    if tensors is not None:
        spherical = [H for H in tensors if _deviation(H) <= tol_s]
        generic = [H for H in tensors if _deviation(H) > tol_s]
    else:
        spherical = [Tensor3Sym.spherical(rng.uniform(-1, 1, 3)) for _ in range(samples)]
        generic = [Tensor3Sym.random(rng) for _ in range(samples)]
    if inject_defect:
        spherical = [H + Tensor3Sym.from_entries({(0, 1, 2): 1e-3}) for H in spherical]

    worst_residual, failures = 0.0, 0
    for H in spherical:
        try:
            prove_spherical_from_zero_edges(edge_force_map(H), hypertraction_map(H), tol_s)
        except NotSphericalError:
            failures += 1
            continue
        h, residual = classify_spherical(H, tol_s)
        worst_residual = max(worst_residual, residual)
        failures += h is None
    checks = [_le("spherical_max_residual", worst_residual, tol_s),
              _le("spherical_failures", failures, 0)]

    missed, worst_ratio = 0, np.inf
    for H in generic:
        rejected = False
        try:
            prove_spherical_from_zero_edges(edge_force_map(H), hypertraction_map(H), tol_s)
        except NotSphericalError:
            rejected = True
        h, _ = classify_spherical(H, tol_s)
        ratio = rotated_probe_magnitude(H) / _deviation(H)
        worst_ratio = min(worst_ratio, ratio)
        missed += (not rejected) or (h is not None)
    checks.append(_le("non_spherical_accepted", missed, 0))
    if generic:
        checks.append(_ge("min_rotated_probe_ratio", worst_ratio, 0.1))
    return checks


# -- observer invariance -------------------------------------------------------------------
def invariance_battery(seed: int, samples: int = 500, tol=None, stress=None,
                       inject_defect: bool = False) -> list[Check]:
    rng = np.random.default_rng(seed)
    tol_i = DEFAULT.invariance if tol is None else tol
    tol_ind = DEFAULT.indifference if tol is None else tol
    analytic_gap = sym_worst = 0.0
    witness_misses = 0
    for _ in range(samples):
        T = stress if stress is not None else rng.uniform(-1, 1, (3, 3))
        H = Tensor3Sym.random(rng)
        G, G2 = rng.uniform(-1, 1, (3, 3)), Tensor3Sym.random(rng)
        obs = ObserverChange.random(rng)
        r = power_invariance_residual(T, H, G, G2, obs)
        analytic_gap = max(analytic_gap, abs(r - abs(inner2(skew(rotate2(obs.Q, T)), obs.W))))
        S = 0.5 * (T + T.T)
        if inject_defect:
            S = S + np.outer([1.0, 0, 0], [0, 1.0, 0])
        sym_worst = max(sym_worst, power_invariance_residual(S, H, G, G2, obs))
        if np.linalg.norm(skew(T)) >= 1e-6:
            W = find_symmetry_witness(T)
            hit = W is not None and power_invariance_residual(
                T, H, np.zeros((3, 3)), Tensor3Sym.zeros(),
                ObserverChange(np.zeros(3), Rotation.identity(), W)) > 0.5 * np.linalg.norm(skew(T))
            witness_misses += not hit
    indiff = 0.0
    for _ in range(50):
        T = rng.uniform(-1, 1, (3, 3))
        T = 0.5 * (T + T.T)
        res = traction_indifference_check(T, Tensor3Sym.random(rng), _unit(rng), random_edge_frame(rng),
                                          Rotation.random(rng))
        indiff = max(indiff, *res.values())
    return [_le("power_residual_vs_analytic", analytic_gap, tol_i),
            _le("symmetric_stress_power_residual", sym_worst, tol_i),
            _le("witness_misses", witness_misses, 0),
            _le("indifference_max_residual", indiff, tol_ind)]


def _unit(rng):
    n = rng.standard_normal(3)
    return n / np.linalg.norm(n)


# -- Navier-Stokes-alpha ------------------------------------------------------------------
def nsalpha_battery(seed: int, samples: int = 100, tol=None, g=None,
                    inject_defect: bool = False) -> list[Check]:
    rng = np.random.default_rng(seed)
    tol_n = DEFAULT.nsalpha if tol is None else tol
    full_worst = divfree_worst = 0.0
    for _ in range(samples):
        gv = rng.uniform(-1, 1, 3) if g is None else np.asarray(g, float)
        v = PolyField.random(rng, 1, 4)
        dec = nsalpha_decompose(gv)
        if inject_defect:
            dec = NsAlphaDecomposition(Tensor3Sym.zeros(), dec.H2, dec.g)
        full, _ = nsalpha_power_check(gv, v, rng.uniform(-1, 1, 3), dec)
        full_worst = max(full_worst, full)
    for _ in range(max(1, samples // 2)):
        gv = rng.uniform(-1, 1, 3) if g is None else np.asarray(g, float)
        v = divergence_free_velocity(rng, 4)
        _, divfree = nsalpha_power_check(gv, v, rng.uniform(-1, 1, 3))
        divfree_worst = max(divfree_worst, divfree)
    converse = 0.0
    for _ in range(20):
        gv = rng.uniform(-1, 1, 3) if g is None else np.asarray(g, float)
        H2 = nsalpha_decompose(gv).H2
        converse = max(converse, float(np.max(np.abs(edge_force(H2, random_edge_frame(rng))))))
    return [_le("full_identity_max_residual", full_worst, tol_n),
            _le("divfree_identity_max_residual", divfree_worst, tol_n),
            _le("active_part_edge_force", converse, DEFAULT.converse if tol is None else tol)]


def scan_rows(H: Tensor3Sym, axis: int, samples: int):
    thetas = np.linspace(0.0, np.pi, samples, endpoint=False)
    return [(t, *f) for t, f in edge_scan(H, axis, thetas)]
