import numpy as np
import pytest

from conftest import fd_gradient, fd_jacobian
from qriccati import fields as F
from qriccati.errors import DivisionNearZero, DomainError
from qriccati.jet import Jet2, constant, jet_arith, jet_func, seed


def seeds(p):
    return [seed(np.asarray(p, float), k) for k in range(3)]


def test_seed_jets():
    x1, x2, x3 = seeds([1.0, 2.0, 3.0])
    assert x2.val == 2
    assert np.array_equal(x2.grad, [0, 1, 0])
    assert np.array_equal(x2.hess, np.zeros((3, 3)))


def test_product_of_seeds():
    x1, x2, _ = seeds([1.0, 2.0, 3.0])
    j = jet_arith(x1, x2, "mul")
    assert j.val == 2
    assert np.array_equal(j.grad, [2, 1, 0])
    expect = np.zeros((3, 3))
    expect[0, 1] = expect[1, 0] = 1
    assert np.array_equal(j.hess, expect)


def test_sum_of_seeds_at_origin():
    x1, _, x3 = seeds([0.0, 0.0, 0.0])
    j = x1 + x3
    assert np.array_equal(j.grad, [1, 0, 1])
    assert not np.any(j.hess)


def test_self_quotient_is_one(rng):
    p = rng.uniform(-1, 1, size=(20, 3))
    a = F.exp(F.X1 * F.X2) * (2 + F.sin(F.X3))
    j = a(p) / a(p)
    assert np.allclose(j.val, 1, atol=1e-15)
    assert np.allclose(j.grad, 0, atol=1e-14)
    assert np.allclose(j.hess, 0, atol=1e-13)


def test_exp_seed():
    x1, _, _ = seeds([0.0, 0.0, 0.0])
    j = jet_func(x1, "exp")
    assert j.val == 1
    assert np.array_equal(j.grad, [1, 0, 0])
    expect = np.zeros((3, 3))
    expect[0, 0] = 1
    assert np.array_equal(j.hess, expect)


def test_log_exp_roundtrip(rng):
    p = rng.uniform(-1, 1, size=(10, 3))
    x2 = seed(p, 1)
    j = jet_func(jet_func(x2, "exp"), "log")
    assert np.allclose(j.val, x2.val, atol=1e-15)
    assert np.allclose(j.grad, x2.grad, atol=1e-15)
    assert np.allclose(j.hess, 0, atol=1e-15)


def test_reciprocal_radius():
    j = F.recip(F.radius())(np.array([1.0, 0.0, 0.0]))
    # 1/r: grad = -x/r^3, hess = (3 x x^T - r^2 I)/r^5
    assert np.isclose(j.val, 1)
    assert np.allclose(j.grad, [-1, 0, 0])
    assert np.allclose(j.hess, np.diag([2, -1, -1]))


def test_division_floor():
    x1, x2, _ = seeds([0.0, 1.0, 0.0])
    with pytest.raises(DivisionNearZero):
        jet_arith(x2, x1, "div")
    with pytest.raises(DivisionNearZero):
        jet_arith(x2, x2 * 1e-31, "div")


@pytest.mark.parametrize("name", ["log", "sqrt", "recip"])
def test_domain_errors(name):
    x1, _, _ = seeds([0.0, 1.0, 0.0])
    with pytest.raises(DomainError, match=name):
        jet_func(x1, name)


def test_pow_integer_and_fractional(rng):
    p = rng.uniform(0.5, 2, size=(10, 3))
    x = seed(p, 0)
    j = jet_func(x, "pow", 3)
    assert np.allclose(j.grad[:, 0], 3 * p[:, 0] ** 2)
    assert np.allclose(j.hess[:, 0, 0], 6 * p[:, 0])
    j = jet_func(x, "pow", 0.5)
    assert np.allclose(j.hess[:, 0, 0], -0.25 * p[:, 0] ** -1.5)
    assert np.array_equal(jet_func(x, "pow", 0).grad, np.zeros((10, 3)))


def test_first_order_jets_propagate_truncation():
    a = Jet2(1.0, [1, 0, 0])
    b = constant(2.0)
    assert (a * b).hess is None
    assert jet_func(a, "exp").hess is None
    with pytest.raises(ValueError):
        a.laplacian()


PI4 = 4 * np.pi
COMPOSITES = {
    "exp(x1)": F.exp(F.X1),
    "x1 x2": F.X1 * F.X2,
    "1/(4 pi r)": F.recip(PI4 * F.radius()),
    "sin(x1) sin(x2)": F.sin(F.X1) * F.sin(F.X2),
    "x1^2 - x2^2": F.X1**2 - F.X2**2,
    "exp(-2 x1)": F.exp(-2 * F.X1),
    "exp(x1^2/2)": F.exp(0.5 * F.X1**2),
    "w family": (1 + 1j) * F.exp(F.X1 - F.X2),
    "log composite": F.log(2 + F.cos(F.X1 * F.X3)) * F.tanh(F.X2),
    "sqrt / quotient": F.sqrt(1.5 + F.X1 * F.X2) / (3 + F.sin(F.X3)),
    "exp(-x1) cosh(x2)": F.exp(-F.X1) * (F.exp(F.X2) + F.exp(-F.X2)) / 2,
}


@pytest.mark.parametrize("name", sorted(COMPOSITES))
def test_jets_agree_with_finite_differences(name, rng):
    u = COMPOSITES[name]
    p = rng.uniform(0.3, 1.2, size=(50, 3)) * rng.choice([-1, 1], size=(50, 1))
    p[:, 0] = np.abs(p[:, 0])  # keep 1/r and log away from trouble
    j = u(p)
    g_fd = fd_gradient(lambda q: u(q).val, p)
    h_fd = fd_jacobian(lambda q: u(q).grad, p)
    scale = max(1.0, np.abs(j.grad).max())
    assert np.abs(j.grad - g_fd).max() <= 1e-6 * scale
    scale = max(1.0, np.abs(j.hess).max())
    assert np.abs(j.hess - h_fd).max() <= 1e-6 * scale
    assert np.array_equal(j.hess, np.swapaxes(j.hess, -1, -2))


def test_hessian_symmetry_after_long_chain(rng):
    u = F.X1
    for k in range(5):
        u = F.exp(0.1 * u) * F.sin(u + F.X2 * (k + 1)) / (2 + F.cos(F.X3 * u)) + F.X3
    j = u(rng.uniform(-1, 1, size=(30, 3)))
    assert np.array_equal(j.hess, np.swapaxes(j.hess, -1, -2))
