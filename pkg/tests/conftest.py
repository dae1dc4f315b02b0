import numpy as np
import pytest

from hyperstress.tensor import Rotation, Tensor3Sym


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def rotate3_loops(Q, H):
    """Component loop oracle for the rotation action on third-order tensors."""
    M, A = Q.matrix, H.full()
    out = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for p in range(3):
                    for q in range(3):
                        for r in range(3):
                            out[i, j, k] += M[i, p] * M[j, q] * M[k, r] * A[p, q, r]
    return out


def fd_surface_div(Hf, n, x, tangents, step=1e-5):
    """Central finite-difference surface divergence of (H n) on a flat face."""
    out = np.zeros(3)
    for tau in tangents:
        plus = Hf(x + step * tau) @ n
        minus = Hf(x - step * tau) @ n
        out += ((plus - minus) / (2 * step)) @ tau
    return out


def rotated_tangents(n, angle):
    """An orthonormal tangent pair for the plane with normal n, built without
    the library's tangent-basis routine."""
    a = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    t1 = np.cross(n, a)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(n, t1)
    c, s = np.cos(angle), np.sin(angle)
    return c * t1 + s * t2, -s * t1 + c * t2


def random_sym3(seed):
    return Tensor3Sym.random(np.random.default_rng(seed))


def random_rotation(seed):
    return Rotation.random(np.random.default_rng(seed))


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_line(request):
    """Record and print one pass/fail line for an acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
