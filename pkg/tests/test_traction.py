import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperstress.fields import PolyField
from hyperstress.geometry import coordinate_edge, random_edge_frame
from hyperstress.tensor import E1, E2, E3, IDENTITY, Rotation, Tensor3Sym, TensorError
from hyperstress.traction import (edge_force, edge_force_map, hypertraction_map, reconstruct_T,
                                  reconstruct_Ttilde, reconstruct_hyperstress, sample_tractions,
                                  simple_stress_from_tractions, simple_traction,
                                  surface_hypertraction, surface_traction, traction_map_from_fields)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
H123 = Tensor3Sym.from_entries({(0, 1, 2): 1.0})


def e1_times_identity_field():
    return PolyField(3, {(1, 0, 0): np.einsum("i,jk->ijk", E1, IDENTITY)}, hyperstress=True)


def unit(rng):
    n = rng.standard_normal(3)
    return n / np.linalg.norm(n)


class TestSimpleContinuum:
    def test_identity_stress(self, rng):
        n = unit(rng)
        np.testing.assert_array_equal(simple_traction(IDENTITY, n), n)

    def test_stress_from_tractions(self, rng):
        T = rng.uniform(-1, 1, (3, 3))
        basis = Rotation.random(rng).matrix
        np.testing.assert_allclose(simple_stress_from_tractions(lambda n: T @ n, basis), T, atol=1e-14)

    def test_basis_must_be_orthonormal(self):
        with pytest.raises(TensorError):
            simple_stress_from_tractions(lambda n: n, 2 * IDENTITY)


class TestSurfaceTraction:
    def test_identity_stress_no_hyperstress(self):
        t = surface_traction(PolyField.constant(IDENTITY), PolyField.zero(3, hyperstress=True),
                             [0.2, 0.3, 0.4], E2)
        np.testing.assert_array_equal(t, E2)

    def test_pure_hyperstress(self):
        t = surface_traction(PolyField.zero(2), e1_times_identity_field(), [0.5, 0.5, 0.5], E1)
        np.testing.assert_array_equal(t, -E1)

    def test_reduces_to_simple_traction(self, rng):
        Tf = PolyField.random(rng, 2, 2)
        x, n = rng.uniform(-1, 1, 3), unit(rng)
        np.testing.assert_allclose(surface_traction(Tf, PolyField.zero(3, hyperstress=True), x, n),
                                   Tf(x) @ n, atol=1e-15)


class TestHypertractionAndEdgeForce:
    def test_spherical_hypertraction(self, rng):
        h = rng.uniform(-1, 1, 3)
        np.testing.assert_allclose(surface_hypertraction(Tensor3Sym.spherical(h), unit(rng)), h, atol=1e-15)

    def test_single_pair_hypertraction(self):
        np.testing.assert_array_equal(surface_hypertraction(H123, E2), 0)

    def test_single_pair_edge_force(self):
        np.testing.assert_array_equal(edge_force(H123, coordinate_edge(1, 2)), 2 * E1)

    def test_spherical_edge_force_vanishes(self, rng):
        H = Tensor3Sym.spherical(rng.uniform(-1, 1, 3))
        for _ in range(10):
            assert np.max(np.abs(edge_force(H, random_edge_frame(rng)))) <= 1e-15

    @given(seeds)
    def test_edge_force_ignores_face_labels(self, seed):
        rng = np.random.default_rng(seed)
        H, E = Tensor3Sym.random(rng), random_edge_frame(rng)
        np.testing.assert_allclose(edge_force(H, E.swapped()), edge_force(H, E), rtol=0, atol=1e-15)

    def test_samples_serialize(self, rng):
        Hf = PolyField.random(rng, 3, 1, hyperstress=True)
        samples = sample_tractions(PolyField.random(rng, 2, 1), Hf, [0.1, 0.2, 0.3], [E1, E3])
        assert [s.to_json()["n"] for s in samples] == [E1.tolist(), E3.tolist()]


class TestReconstruction:
    def test_single_pair(self):
        R = reconstruct_hyperstress(hypertraction_map(H123), edge_force_map(H123))
        assert R == H123

    @settings(max_examples=100)
    @given(seeds)
    def test_roundtrip(self, seed):
        H = Tensor3Sym.random(np.random.default_rng(seed))
        R = reconstruct_hyperstress(hypertraction_map(H), edge_force_map(H))
        assert (R - H).max_abs() <= 1e-13

    @given(seeds)
    def test_basis_independence(self, seed):
        rng = np.random.default_rng(seed)
        H, basis = Tensor3Sym.random(rng), Rotation.random(rng).matrix.T
        R = reconstruct_hyperstress(hypertraction_map(H), edge_force_map(H), basis)
        assert (R - H).max_abs() <= 1e-12

    def test_one_sided_edge_data_is_wrong(self, rng):
        H = Tensor3Sym.random(rng)
        half = lambda E: edge_force(H, E) / 2
        assert (reconstruct_hyperstress(hypertraction_map(H), half) - H).max_abs() > 1e-3

    def test_reduced_stress(self):
        Hf = e1_times_identity_field()
        t_map = traction_map_from_fields(PolyField.zero(2), Hf)
        np.testing.assert_array_equal(reconstruct_Ttilde(t_map, Hf, [0.3, 0.1, 0.2]), -np.outer(E1, E1))

    @settings(max_examples=30)
    @given(seeds)
    def test_stress_roundtrip(self, seed):
        rng = np.random.default_rng(seed)
        Tf = PolyField.random(rng, 2, 2)
        Hf = PolyField.random(rng, 3, 3, hyperstress=True)
        basis = Rotation.random(rng).matrix
        t_map = traction_map_from_fields(Tf, Hf)
        for x in rng.uniform(-1, 1, (3, 3)):
            T = reconstruct_T(reconstruct_Ttilde(t_map, Hf, x, basis), Hf, x)
            np.testing.assert_allclose(T, Tf(x), rtol=0, atol=1e-11)
