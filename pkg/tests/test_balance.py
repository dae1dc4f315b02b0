import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperstress.balance import (boundary_residuals, bulk_residual, external_power, global_balance,
                                 internal_power, random_triple, self_consistent_data, verify_pvp)
from hyperstress.fields import EPSILON, PolyField, grad2_velocity
from hyperstress.geometry import canned_parts, tetrahedron, unit_cube, wedge
from hyperstress.tensor import E3, IDENTITY, Tensor3Sym, t3_inner
from hyperstress.traction import edge_force

seeds = st.integers(min_value=0, max_value=2**32 - 1)
ZERO_T = PolyField.zero(2)
ZERO_H = PolyField.zero(3, hyperstress=True)


def divergence_free_stress(rng, degree):
    """``T_ij = eps_jkl d_k psi_il`` has zero divergence for any ``psi``."""
    psi = PolyField.random(rng, 2, degree)
    return psi.grad().map_coefficients(2, lambda G: np.einsum("jkl,ilk->ij", EPSILON, G))


class TestPowers:
    def test_identity_stress_on_position(self):
        cube, v = unit_cube(), PolyField.position()
        T = PolyField.constant(IDENTITY)
        assert internal_power(T, ZERO_H, v, cube) == pytest.approx(3.0, abs=1e-14)
        assert external_power(T, ZERO_H, v, cube) == pytest.approx(3.0, abs=1e-14)

    def test_zero_stresses(self, rng):
        v = PolyField.random(rng, 1, 3)
        assert internal_power(ZERO_T, ZERO_H, v, wedge()) == 0.0
        assert external_power(ZERO_T, ZERO_H, v, wedge()) == 0.0

    def test_constant_hyperstress_on_quadratic_velocity(self, rng):
        part = tetrahedron()
        H = Tensor3Sym.random(rng)
        v = PolyField.random(rng, 1, 2)
        G2 = Tensor3Sym.from_full(grad2_velocity(v)([0.0, 0.0, 0.0]))
        want = part.volume * t3_inner(H, G2)
        assert internal_power(ZERO_T, PolyField.constant(H), v, part) == pytest.approx(want, abs=1e-13)

    def test_edge_integrals_match_edge_by_edge_sum(self):
        cube = unit_cube()
        H = Tensor3Sym.from_entries({(2, 0, 1): 1.0})
        c = np.array([0.3, -0.7, 1.1])
        oracle = sum(e.length * edge_force(H, e) @ c for e in cube.edges)
        along_e3 = [edge_force(H, e) for e in cube.edges if abs(e.tangent @ E3) == 1.0]
        assert all(np.allclose(np.abs(f), 2 * E3) for f in along_e3)
        v = PolyField.constant(c)
        Hf = PolyField.constant(H)
        with_edges = external_power(ZERO_T, Hf, v, cube)
        without = external_power(ZERO_T, Hf, v, cube, edge_weight=0.0)
        assert with_edges - without == pytest.approx(oracle, abs=1e-14)
        assert oracle == pytest.approx(0.0, abs=1e-14)

    @given(seeds)
    def test_rigid_velocity_does_no_work(self, seed):
        rng = np.random.default_rng(seed)
        W = rng.uniform(-1, 1, (3, 3))
        W = W - W.T
        v = PolyField(1, {(0, 0, 0): rng.uniform(-1, 1, 3),
                          (1, 0, 0): W[:, 0], (0, 1, 0): W[:, 1], (0, 0, 1): W[:, 2]})
        Tf = PolyField.random(rng, 2, 2, symmetric=True)
        Hf = PolyField.random(rng, 3, 2, hyperstress=True)
        assert abs(internal_power(Tf, Hf, v, unit_cube())) <= 1e-12


class TestVerifyPvp:
    def test_constant_fields(self, rng):
        Tf = PolyField.constant(rng.uniform(-1, 1, (3, 3)))
        Hf = PolyField.constant(Tensor3Sym.random(rng))
        v = PolyField.random(rng, 1, 3)
        report = verify_pvp(Tf, Hf, v, unit_cube())
        assert report.passed and report.pvp_residual <= 1e-12

    @pytest.mark.parametrize("part", canned_parts(), ids=lambda p: p.name)
    def test_random_fields(self, part):
        report = verify_pvp(*random_triple(7), part, seed=7)
        assert report.passed, report.pvp_residual
        assert len(report.per_face) == len(part.faces) and len(report.per_edge) == len(part.edges)

    def test_edge_term_is_load_bearing(self, rng):
        # A linear velocity already sees the edge forces of a constant hyperstress.
        H = PolyField.constant(Tensor3Sym.random(rng))
        v = PolyField.position()
        report = verify_pvp(ZERO_T, H, v, tetrahedron())
        dropped = verify_pvp(ZERO_T, H, v, tetrahedron(), edge_weight=0.0)
        assert report.passed and abs(sum(report.per_edge)) > 1e-3
        assert dropped.pvp_residual >= 1e-3

    def test_flipped_edge_sign_is_caught(self):
        Tf, Hf, v = random_triple(3)
        good = verify_pvp(Tf, Hf, v, wedge())
        bad = verify_pvp(Tf, Hf, v, wedge(), edge_weight=-1.0)
        expected = 2 * abs(sum(good.per_edge)) / max(abs(good.internal_power), 1.0)
        assert not bad.passed
        assert bad.pvp_residual == pytest.approx(expected, rel=1e-9)

    def test_report_serializes(self):
        data = verify_pvp(*random_triple(1), unit_cube(), seed=1).to_json()
        assert data["part"] == "cube" and data["seed"] == 1 and isinstance(data["per_edge"], list)


class TestBalances:
    def test_bulk_residual(self, rng):
        pts = rng.uniform(-1, 1, (10, 3))
        assert bulk_residual(PolyField.constant(IDENTITY), ZERO_H, pts) == 0.0
        T = PolyField(2, {(2, 0, 0): np.outer([1.0, 0, 0], [1.0, 0, 0])})
        assert bulk_residual(T, ZERO_H, np.array([[0.5, 0, 0]])) == pytest.approx(1.0)

    def test_constant_stress_is_globally_balanced(self, rng):
        for part in canned_parts():
            total = global_balance(PolyField.constant(rng.uniform(-1, 1, (3, 3))), ZERO_H, part)
            assert np.max(np.abs(total)) <= 1e-13

    def test_stress_equal_to_hyperstress_divergence(self, rng):
        Hf = PolyField.random(rng, 3, 3, hyperstress=True)
        for part in canned_parts():
            assert np.max(np.abs(global_balance(Hf.div(), Hf, part))) <= 1e-11

    @settings(max_examples=20, deadline=None)
    @given(seeds, st.sampled_from(canned_parts()))
    def test_divergence_free_reduced_stress_is_balanced(self, seed, part):
        rng = np.random.default_rng(seed)
        Hf = PolyField.random(rng, 3, 2, hyperstress=True)
        Tf = divergence_free_stress(rng, 3) + Hf.div()
        assert np.max(np.abs(global_balance(Tf, Hf, part))) <= 1e-11

    def test_unbalanced_stress_is_detected(self):
        T = PolyField(2, {(1, 0, 0): np.outer([1.0, 0, 0], [1.0, 0, 0])})
        total = global_balance(T, ZERO_H, unit_cube())
        np.testing.assert_allclose(total, [1.0, 0, 0], atol=1e-14)


class TestBoundaryResiduals:
    def test_self_consistent_data(self, rng):
        Tf, Hf, _ = random_triple(11)
        res = boundary_residuals(Tf, Hf, wedge(), *self_consistent_data(Tf, Hf, wedge()))
        assert res.max() <= 1e-13
        assert len(res.traction) == 5 and len(res.edge) == 9

    def test_perturbed_traction(self):
        Tf, Hf, _ = random_triple(12)
        part = unit_cube()
        t0, h0, f0 = self_consistent_data(Tf, Hf, part)
        shifted = lambda fi, pts: t0(fi, pts) + (1e-6 * E3 if fi == 2 else 0.0)
        res = boundary_residuals(Tf, Hf, part, shifted, h0, f0)
        assert res.traction[2] == pytest.approx(1e-6, rel=1e-6)
        assert max(res.traction[:2] + res.traction[3:]) <= 1e-13

    def test_free_boundary_pieces(self):
        Tf, Hf, _ = random_triple(13)
        part = unit_cube()
        _, h0, f0 = self_consistent_data(Tf, Hf, part)
        only_top = lambda fi, pts: h0(fi, pts) if fi == 5 else None
        res = boundary_residuals(Tf, Hf, part, None, only_top, None)
        assert res.traction == [] and res.edge == [] and len(res.hypertraction) == 1
        assert set(res.to_json()) == {"traction", "hypertraction", "edge"}

    def test_edge_data_check(self):
        part = unit_cube()
        Hf = PolyField.constant(Tensor3Sym.from_entries({(2, 0, 1): 1.0}))
        res = boundary_residuals(ZERO_T, Hf, part, f0=lambda ei, pts: np.zeros((len(pts), 3)))
        along_e3 = [r for r, e in zip(res.edge, part.edges) if abs(e.tangent @ E3) == 1.0]
        assert along_e3 == pytest.approx([2.0] * 4)
