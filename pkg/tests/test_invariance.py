import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperstress.geometry import random_edge_frame
from hyperstress.invariance import (ObserverChange, find_symmetry_witness, power_invariance_residual,
                                    traction_indifference_check, transform_dynamics,
                                    transform_gradients, transform_velocity)
from hyperstress.tensor import E1, E2, E3, Rotation, Tensor3Sym, TensorError, inner2, rotate2, skew

seeds = st.integers(min_value=0, max_value=2**32 - 1)
Q90 = Rotation.about_axis(E3, np.pi / 2)
SPIN12 = np.outer(E1, E2) - np.outer(E2, E1)


def at_rest(W, Q=None):
    return ObserverChange(np.zeros(3), Q or Rotation.identity(), W)


class TestObserverChange:
    def test_spin_must_be_skew(self):
        with pytest.raises(TensorError):
            ObserverChange(np.zeros(3), Rotation.identity(), np.outer(E1, E2))

    def test_velocity(self):
        obs = ObserverChange(np.zeros(3), Q90, np.zeros((3, 3)))
        np.testing.assert_allclose(transform_velocity(E1, np.zeros(3), obs), E2, atol=1e-15)
        obs = ObserverChange(E3, Rotation.identity(), SPIN12)
        np.testing.assert_array_equal(transform_velocity(np.zeros(3), E2, obs), E3 + E1)

    def test_gradients(self, rng):
        G, G2 = rng.uniform(-1, 1, (3, 3)), Tensor3Sym.random(rng)
        gp, g2p = transform_gradients(G, G2, at_rest(SPIN12))
        np.testing.assert_array_equal(gp, G + SPIN12)
        assert g2p == G2

    def test_identity_leaves_power_unchanged(self, rng):
        T, H = rng.uniform(-1, 1, (3, 3)), Tensor3Sym.random(rng)
        r = power_invariance_residual(T, H, rng.uniform(-1, 1, (3, 3)), Tensor3Sym.random(rng),
                                      ObserverChange.identity())
        assert r == 0.0


class TestPowerResidual:
    def test_single_shear(self):
        r = power_invariance_residual(np.outer(E1, E2), Tensor3Sym.zeros(), np.zeros((3, 3)),
                                      Tensor3Sym.zeros(), at_rest(SPIN12))
        assert r == pytest.approx(1.0, abs=1e-15)

    def test_symmetric_stress(self, rng):
        T = rng.uniform(-1, 1, (3, 3))
        r = power_invariance_residual(T + T.T, Tensor3Sym.random(rng), rng.uniform(-1, 1, (3, 3)),
                                      Tensor3Sym.random(rng), ObserverChange.random(rng))
        assert r <= 1e-13

    @given(seeds)
    def test_matches_closed_form(self, seed):
        rng = np.random.default_rng(seed)
        T, H = rng.uniform(-1, 1, (3, 3)), Tensor3Sym.random(rng)
        obs = ObserverChange.random(rng)
        r = power_invariance_residual(T, H, rng.uniform(-1, 1, (3, 3)), Tensor3Sym.random(rng), obs)
        assert r == pytest.approx(abs(inner2(skew(rotate2(obs.Q, T)), obs.W)), abs=1e-13)

    def test_witness(self):
        T = np.outer(E1, E2)
        W = find_symmetry_witness(T)
        np.testing.assert_allclose(W, SPIN12 / np.sqrt(2), atol=1e-15)
        r = power_invariance_residual(T, Tensor3Sym.zeros(), np.zeros((3, 3)), Tensor3Sym.zeros(), at_rest(W))
        assert r == pytest.approx(np.sqrt(0.5), abs=1e-15)

    def test_no_witness_for_symmetric_stress(self, rng):
        T = rng.uniform(-1, 1, (3, 3))
        assert find_symmetry_witness(T + T.T) is None
        assert find_symmetry_witness(np.outer(E1, E2), tol=1.0) is None


class TestIndifference:
    def test_dynamics(self, rng):
        T, H = rng.uniform(-1, 1, (3, 3)), Tensor3Sym.random(rng)
        Tp, Hp = transform_dynamics(T, H, Q90)
        np.testing.assert_allclose(Tp, Q90.matrix @ T @ Q90.matrix.T, atol=1e-15)

    @given(seeds)
    def test_tractions_rotate_with_observer(self, seed):
        rng = np.random.default_rng(seed)
        T = rng.uniform(-1, 1, (3, 3))
        n = rng.standard_normal(3)
        res = traction_indifference_check(T + T.T, Tensor3Sym.random(rng), n / np.linalg.norm(n),
                                          random_edge_frame(rng), Rotation.random(rng))
        assert set(res) == {"t", "h", "f"}
        assert max(res.values()) <= 1e-12
