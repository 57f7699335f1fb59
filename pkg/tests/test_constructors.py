import math

import numpy as np
import pytest

from qriccati import constructors as C
from qriccati.errors import (
    BlowUp,
    DivisionNearZero,
    NotASchrodingerSolution,
    NotATransportSolution,
    NotHarmonic,
    PoleOfFamily,
    QuadratureFailure,
    SeedNotASolution,
)
from qriccati.fields import (
    X1,
    X2,
    X3,
    Region,
    ScalarField,
    VectorField,
    const,
    exp,
    log_deriv,
    near_plane,
    outside_shell,
    radius,
    recip,
    sin,
    where_small,
)
from qriccati.verify import quat_norm, riccati_residual

CUBE = Region((-1, 1, -1, 1, -1, 1))
POS = Region((0.5, 2, 0.5, 2, -1, 1))
SHELL = Region((-2, 2) * 3, outside_shell(0.5, 2))
FUND = recip(4 * math.pi * radius())


def pts(region, n=200, seed=0):
    return region.sample(n, seed)


def assert_solves(pair, tol=1e-10, n=200):
    rep = riccati_residual(pair, pts(pair.valid_region, n))
    assert rep.sup_norm <= tol, rep
    assert rep.vector_part_sup <= tol
    return rep


def vec_of(pair, p):
    return pair.f(p).vector


def test_from_schrodinger_exp():
    pair = C.from_schrodinger(exp(X1), -1, CUBE)
    p = pts(CUBE).points
    assert np.allclose(vec_of(pair, p), [1, 0, 0], atol=1e-15)
    assert riccati_residual(pair, p).sup_norm <= 1e-15


def test_from_schrodinger_sin():
    region = Region((0.1, math.pi - 0.1, -1, 1, -1, 1))
    pair = C.from_schrodinger(sin(X1), 1, region)
    p = pts(region).points
    assert np.allclose(vec_of(pair, p)[:, 0], 1 / np.tan(p[:, 0]), rtol=1e-13)
    assert_solves(pair)
    # 1-D oracle: y = cot x solves y' + y^2 = -1; check with centred differences
    x = np.linspace(0.3, 2.8, 11)
    y = lambda t: 1 / np.tan(t)
    assert np.allclose((y(x + 1e-5) - y(x - 1e-5)) / 2e-5 + y(x) ** 2, -1, atol=1e-6)


def test_from_schrodinger_fundamental():
    pair = C.from_schrodinger(FUND, 0, SHELL)
    p = pts(SHELL).points
    assert np.allclose(vec_of(pair, p), -p / np.sum(p**2, 1)[:, None], rtol=1e-13)
    assert_solves(pair, 1e-12)


def test_from_schrodinger_rejects_non_solution():
    with pytest.raises(NotASchrodingerSolution):
        C.from_schrodinger(exp(X1), 1, CUBE)
    # nonvanishing is checked pointwise: the singular plane only bites on evaluation
    pair = C.from_schrodinger(X1, 0, CUBE)
    with pytest.raises(DivisionNearZero):
        pair.f(np.array([[0.0, 0.5, 0.5]]))
    with pytest.raises(DivisionNearZero):
        C.from_schrodinger(X1 - X1, 0, CUBE)


def test_harmonic_to_homogeneous_examples():
    r1 = CUBE.excluding(near_plane(1))
    pair = C.harmonic_to_homogeneous(X1, r1)
    p = pts(r1).points
    assert np.allclose(vec_of(pair, p)[:, 0], 1 / p[:, 0])
    assert_solves(pair)

    r12 = r1.excluding(near_plane(2))
    pair = C.harmonic_to_homogeneous(X1 * X2, r12)
    p = pts(r12).points
    assert np.allclose(vec_of(pair, p), np.stack([1 / p[:, 0], 1 / p[:, 1], 0 * p[:, 0]], -1), rtol=1e-14)
    assert_solves(pair)

    rq = CUBE.excluding(lambda q: np.abs(np.abs(q[..., 0]) - np.abs(q[..., 1])) < 0.1)
    assert_solves(C.harmonic_to_homogeneous(X1**2 - X2**2, rq))


def test_harmonic_to_homogeneous_rejects():
    with pytest.raises(NotHarmonic):
        C.harmonic_to_homogeneous(exp(X1), CUBE)
    with pytest.raises(DivisionNearZero):
        C.harmonic_to_homogeneous(X1, CUBE).f(np.array([[0.0, 0.1, 0.2]]))


def test_separable_tanh():
    region = Region((-2, 2) * 3)
    pair = C.separable([const(-1)] * 3, [0, 0, 0], [0, 0, 0], region)
    p = pts(region).points
    assert np.abs(vec_of(pair, p) - np.tanh(p)).max() <= 1e-8
    assert np.all(pair.v(p).val == -3)
    assert_solves(pair, 1e-8)


def test_separable_homogeneous_reciprocal():
    region = Region((0, 2) * 3)
    pair = C.separable([const(0)] * 3, [1, 1, 1], [0, 0, 0], region)
    p = pts(region, 100).points
    assert np.abs(vec_of(pair, p) - 1 / (p + 1)).max() <= 1e-8
    assert_solves(pair, 1e-8)


def test_separable_one_dimensional_embedding():
    region = Region((-2, 2) * 3)
    pair = C.separable([const(-1), const(0), const(0)], [0, 0, 0], [0, 0, 0], region)
    p = pts(region).points
    f = vec_of(pair, p)
    assert np.all(f[:, 1:] == 0)
    assert np.abs(f[:, 0] - np.tanh(p[:, 0])).max() <= 1e-8
    assert np.all(pair.v(p).val == -1)
    # the i1 component solves y' + y^2 = -v1 as a 1-D ODE
    j = pair.f.c1(p)
    assert np.abs(j.grad[:, 0] + j.val**2 - 1).max() <= 1e-8


def test_separable_nonconstant_potential():
    # no closed form needed: the residual oracle checks the integrator
    region = Region((-1, 1) * 3)
    v1 = -2 / (1 + X1**2)
    pair = C.separable([v1, const(0), const(0)], [0, 0, 0], [0, 0, 0], region)
    assert_solves(pair, 1e-8)


def test_separable_blow_up_and_bad_potential():
    with pytest.raises(BlowUp) as info:
        C.separable([const(0)] * 3, [1, 0, 0], [0, 0, 0], Region((-2, 2) * 3))
    assert info.value.axis == 1
    assert -1.01 < info.value.location < -0.99
    with pytest.raises(ValueError):
        C.separable([X2, const(0), const(0)], [0, 0, 0], [0, 0, 0], CUBE)


@pytest.mark.parametrize(
    "phi1, phi2, v_expected, f_expected",
    [
        (X1, X2, lambda p: 0 * p[:, 0], lambda p: np.stack([1 / p[:, 0], 1 / p[:, 1], 0 * p[:, 0]], -1)),
        (X1, X1, lambda p: -2 / p[:, 0] ** 2, lambda p: np.stack([2 / p[:, 0], 0 * p[:, 0], 0 * p[:, 0]], -1)),
        (X1, X1 * X2, lambda p: -2 / p[:, 0] ** 2, lambda p: np.stack([2 / p[:, 0], 1 / p[:, 1], 0 * p[:, 0]], -1)),
    ],
)
def test_anticommutator_potential(phi1, phi2, v_expected, f_expected):
    pair = C.anticommutator_potential(phi1, phi2, POS)
    p = pts(POS).points
    assert np.allclose(pair.v(p).val, v_expected(p), rtol=1e-13, atol=1e-15)
    assert np.allclose(vec_of(pair, p), f_expected(p), rtol=1e-13)
    assert_solves(pair)


def test_anticommutator_matches_homogeneous_product():
    a = C.anticommutator_potential(X1, X2, POS)
    b = C.harmonic_to_homogeneous(X1 * X2, POS)
    p = pts(POS).points
    assert np.allclose(a.f(p).coeffs, b.f(p).coeffs, rtol=1e-14)


def test_axis_pair_examples():
    p = pts(POS).points
    res = C.axis_pair(-2 / X1**2, 1, POS)
    assert res.harmonic and res.harmonic_defect <= 1e-8
    # anchored at x1 = 0.5, so phi2 = x1 / 0.5
    assert np.allclose(res.phi2(p).val, p[:, 0] / 0.5, rtol=1e-9)
    assert np.allclose(vec_of(res.pair, p), np.stack([2 / p[:, 0], 0 * p[:, 0], 0 * p[:, 0]], -1), rtol=1e-9)
    assert_solves(res.pair)

    res = C.axis_pair(-2 / X1**2, X2, POS)
    assert res.harmonic
    assert np.allclose(vec_of(res.pair, p), np.stack([2 / p[:, 0], 1 / p[:, 1], 0 * p[:, 0]], -1), rtol=1e-9)
    assert_solves(res.pair)


def test_axis_pair_reports_non_harmonic_partner():
    res = C.axis_pair(const(-2), 1, POS)
    assert not res.harmonic and res.pair is None
    p = pts(POS, 50).points
    j = res.phi2(p)
    # anchored at a = 0.5: phi2 = exp((x1^2 - a^2)/2), lap = (1 + x1^2) phi2
    expect = np.exp((p[:, 0] ** 2 - 0.25) / 2)
    assert np.allclose(j.val, expect, rtol=1e-9)
    assert np.allclose(j.laplacian(), (1 + p[:, 0] ** 2) * expect, rtol=1e-8)
    assert res.harmonic_defect > 1


def test_axis_pair_quadrature_failure():
    bad = ScalarField(lambda q: const(float("nan"))(q), "nan")
    with pytest.raises(QuadratureFailure):
        C.axis_pair(bad, 1, POS)


def test_eikonal_fundamental():
    pair = C.eikonal_solution(FUND, SHELL)
    p = pts(SHELL).points
    r2 = np.sum(p**2, 1)
    assert np.allclose(vec_of(pair, p), -2 * p / r2[:, None], rtol=1e-13)
    assert np.allclose(pair.v(p).val, -2 / r2, rtol=1e-13)
    assert_solves(pair, 1e-12)
    printed = C.RiccatiPair(pair.f, recip(radius() ** 2), SHELL, "printed potential")
    assert riccati_residual(printed, p).sup_norm > 1


def test_eikonal_other_examples():
    r1 = POS
    pair = C.eikonal_solution(X1, r1)
    p = pts(r1).points
    assert np.allclose(pair.v(p).val, -2 / p[:, 0] ** 2)
    trivial = C.eikonal_solution(const(1), CUBE)
    q = pts(CUBE).points
    assert np.all(trivial.f(q).coeffs == 0) and np.all(trivial.v(q).val == 0)
    with pytest.raises(NotHarmonic):
        C.eikonal_solution(exp(X1), CUBE)


@pytest.mark.parametrize("phi, region", [(X1, POS), (X1 * X2, POS), (FUND, SHELL), (X1**2 - X2**2 + 5, CUBE)])
def test_eikonal_equals_anticommutator_self_pair(phi, region):
    a = C.eikonal_solution(phi, region)
    b = C.anticommutator_potential(phi, phi, region)
    p = pts(region).points
    assert np.allclose(a.f(p).coeffs, b.f(p).coeffs, rtol=1e-14)
    assert np.allclose(a.v(p).val, b.v(p).val, rtol=1e-14)


def test_euler_one_examples():
    region = CUBE.excluding(near_plane(2))
    p = pts(region).points
    pair = C.euler_one(X1, -1, exp(-2 * X1), region)
    assert np.allclose(vec_of(pair, p), [-1, 0, 0], atol=1e-14)
    assert_solves(pair, 1e-12)
    pair = C.euler_one(X1, -1, X2, region)
    assert np.allclose(vec_of(pair, p), np.stack([np.ones(len(p)), 1 / p[:, 1], 0 * p[:, 0]], -1))
    assert_solves(pair, 1e-12)
    pair = C.euler_one(X1, -1, const(1), region)
    assert np.all(vec_of(pair, p) == [1, 0, 0])


def test_euler_one_rejects():
    with pytest.raises(SeedNotASolution):
        C.euler_one(X1, 1, const(1), CUBE)
    with pytest.raises(NotATransportSolution):
        C.euler_one(X1, -1, exp(2 * X1), CUBE)
    with pytest.raises(DivisionNearZero):
        C.euler_one(X1, -1, X2, CUBE).f(np.array([[0.5, 0.0, 0.5]]))


@pytest.mark.parametrize("A", [-2, -1, 0.5, 1, 2, 1 + 1j])
def test_euler_two_family(A):
    pair = C.euler_two(X1, X2, -1, A, CUBE, pole_margin=0.1)
    p = pts(pair.valid_region).points
    w = A * np.exp(p[:, 0] - p[:, 1])
    expect = np.stack([w, -np.ones(len(p)), 0 * w], -1) / (w - 1)[:, None]
    assert np.allclose(vec_of(pair, p), expect, rtol=1e-13)
    assert np.all(pair.f(p).coeffs[:, 3] == 0)
    assert quat_norm(pair.f(p).coeffs - [0, 0, 0, 1]).max() >= 1
    assert_solves(pair)


def test_euler_two_degenerate_limits():
    p = pts(CUBE, 50).points
    assert np.allclose(C.euler_two(X1, X2, -1, 1e-14, CUBE).f(p).coeffs, [0, 0, 1, 0], atol=1e-12)
    assert np.allclose(C.euler_two(X1, X2, -1, 1e14, CUBE).f(p).coeffs, [0, 1, 0, 0], atol=1e-12)
    collapsed = C.euler_two(X1, X1, -1, 2, CUBE)
    assert np.allclose(collapsed.f(p).coeffs, [0, 1, 0, 0], atol=1e-15)


def test_euler_two_pole():
    pair = C.euler_two(X1, X2, -1, 1, CUBE, pole_margin=1e-6)
    with pytest.raises(PoleOfFamily):
        pair.f(np.array([[0.3, 0.3, 0.0]]))
    with pytest.raises(SeedNotASolution):
        C.euler_two(X1, X1**2, -1, 1, CUBE)


def test_constructed_fields_are_irrotational():
    cases = [
        C.from_schrodinger(FUND, 0, SHELL),
        C.eikonal_solution(FUND, SHELL),
        C.anticommutator_potential(X1, X1 * X2, POS),
        C.euler_two(X1, X2, -1, 1 + 1j, CUBE, pole_margin=0.1),
    ]
    for pair in cases:
        assert riccati_residual(pair, pts(pair.valid_region)).vector_part_sup <= 1e-12
