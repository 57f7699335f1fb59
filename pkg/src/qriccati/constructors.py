"""Recipes that build solutions ``(f, v)`` of ``D f + f^2 = v``.

Each constructor checks its preconditions numerically on quasi-random sample
points of the supplied region and returns a :class:`RiccatiPair`.  The
returned pair is never trusted: :func:`qriccati.verify.riccati_residual` is
the independent judge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad_vec, solve_ivp

from . import jet as J
from .errors import (
    BlowUp,
    DivisionNearZero,
    NotASchrodingerSolution,
    NotATransportSolution,
    NotHarmonic,
    PoleOfFamily,
    QuadratureFailure,
    SeedNotASolution,
)
from .fields import (
    X1,
    Region,
    ScalarField,
    VectorField,
    as_field,
    const,
    exp,
    grad_field,
    log_deriv,
    where_small,
)
from .verify import quat_norm, riccati_defect, schrodinger_residual

__all__ = [
    "RiccatiPair",
    "AxisPairResult",
    "from_schrodinger",
    "harmonic_to_homogeneous",
    "separable",
    "anticommutator_potential",
    "axis_pair",
    "eikonal_solution",
    "euler_one",
    "euler_two",
    "inner",
]

CHECK_TOL = 1e-8
N_CHECK = 200


@dataclass(frozen=True)
class RiccatiPair:
    f: VectorField
    v: ScalarField
    valid_region: Region
    provenance: str
    meta: dict = field(default_factory=dict, compare=False)


def inner(a: VectorField, b: VectorField) -> ScalarField:
    """Bilinear ``<a, b>`` (no complex conjugation)."""
    return a.c1 * b.c1 + a.c2 * b.c2 + a.c3 * b.c3


# ---------------------------------------------------------------------------
# precondition helpers
# ---------------------------------------------------------------------------


def _probe(region: Region, n_check: int, seed: int) -> np.ndarray:
    return region.sample(n_check, seed).points


def _require_nonvanishing(u: ScalarField, pts, floor=J.DEFAULT_FLOOR):
    m = np.abs(u(pts).val).min()
    if m < floor:
        raise DivisionNearZero(f"{u.label} vanishes on the region (min |u| = {m:.3g})")


def _within(defect: np.ndarray, scale: np.ndarray, tol: float) -> tuple[bool, float]:
    sup = float(np.max(np.abs(defect)))
    return sup <= tol * max(1.0, float(np.max(np.abs(scale)))), sup


def _require_harmonic(phi: ScalarField, pts, tol):
    j = phi(pts)
    ok, sup = _within(j.laplacian(), j.val, tol)
    if not ok:
        raise NotHarmonic(f"sup |lap {phi.label}| = {sup:.3e} exceeds {tol:g}")


def _require_seed(xi: ScalarField, v: ScalarField, pts, tol):
    h = grad_field(xi)
    d = quat_norm(riccati_defect(h, v, pts))
    ok, sup = _within(d, v(pts).val, tol)
    if not ok:
        raise SeedNotASolution(f"grad {xi.label} misses D f + f^2 = {v.label} by {sup:.3e}")


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def from_schrodinger(phi: ScalarField, v: ScalarField, region: Region, *, tol: float = CHECK_TOL,
                     n_check: int = N_CHECK, seed: int = 0) -> RiccatiPair:
    """``f = grad(phi)/phi`` for a nonvanishing solution of ``lap phi + v phi = 0``."""
    v = as_field(v)
    pts = _probe(region, n_check, seed)
    _require_nonvanishing(phi, pts)
    rep = schrodinger_residual(phi, v, pts)
    if rep.sup_norm > tol * max(1.0, float(np.abs(phi(pts).val).max())):
        raise NotASchrodingerSolution(f"sup |lap phi + v phi| = {rep.sup_norm:.3e} at {rep.worst_point}")
    return RiccatiPair(log_deriv(phi), v, region, f"from_schrodinger(phi={phi.label}, v={v.label})")


def harmonic_to_homogeneous(phi: ScalarField, region: Region, *, tol: float = CHECK_TOL,
                            n_check: int = N_CHECK, seed: int = 0) -> RiccatiPair:
    pts = _probe(region, n_check, seed)
    _require_nonvanishing(phi, pts)
    _require_harmonic(phi, pts, tol)
    return RiccatiPair(log_deriv(phi), const(0), region, f"harmonic_to_homogeneous(phi={phi.label})")


class _AxisRiccati:
    """Dense-output solution of ``y' = -y^2 - v_k(x_k)`` along one axis."""

    def __init__(self, axis, vk, y0, x0, lo, hi, anchor, rtol, atol, cap):
        self.axis, self.vk = axis, vk
        self.pieces = []
        base = np.array(anchor, dtype=float)

        def v_at(t):
            p = base.copy()
            p[axis] = t
            val = vk(p).val
            return float(np.real(val))

        def rhs(t, y):
            return [-y[0] * y[0] - v_at(t)]

        def blowup(t, y):
            return abs(y[0]) - cap

        blowup.terminal = True

        for end in (hi, lo):
            if end == x0:
                continue
            sol = solve_ivp(rhs, (x0, end), [y0], method="DOP853", dense_output=True,
                            rtol=rtol, atol=atol, events=blowup)
            if sol.status == 1 or not np.all(np.isfinite(sol.y)):
                where = sol.t_events[0][0] if len(sol.t_events[0]) else sol.t[-1]
                raise BlowUp(axis + 1, float(where))
            if sol.status != 0:
                raise BlowUp(axis + 1, float(sol.t[-1]))
            self.pieces.append((min(x0, end), max(x0, end), sol.sol))
        self.x0, self.y0 = x0, y0

    def value(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.y0, dtype=float)
        for a, b, interp in self.pieces:
            m = (t >= a) & (t <= b) & (t != self.x0)
            if np.any(m):
                out[m] = interp(t[m])[0]
        outside = t < min([a for a, _, _ in self.pieces] + [self.x0]) - 1e-12
        outside |= t > max([b for _, b, _ in self.pieces] + [self.x0]) + 1e-12
        if np.any(outside):
            raise ValueError(f"axis {self.axis + 1}: evaluation outside the integrated interval")
        return out

    def field(self) -> ScalarField:
        k = self.axis

        def fn(p):
            vj = self.vk(p)
            y = self.value(np.asarray(p)[..., k])
            dy = -y * y - vj.val
            grad = np.zeros(y.shape + (3,), complex)
            grad[..., k] = dy
            hess = np.zeros(y.shape + (3, 3), complex)
            hess[..., k, k] = -2.0 * y * dy - vj.grad[..., k]
            return J.Jet2(y, grad, hess)

        return ScalarField(fn, f"riccati_ode_{k + 1}")


def separable(v: Sequence, y0: Sequence[float], x0: Sequence[float], region: Region, *,
              rtol: float = 1e-10, atol: float = 1e-12, cap: float = 1e8,
              n_check: int = N_CHECK, seed: int = 0) -> RiccatiPair:
    """``f = sum_k f_k(x_k) i_k`` for ``v = v1(x1) + v2(x2) + v3(x3)``.

    Each ``f_k`` solves ``f_k' + f_k^2 = -v_k`` with ``f_k(x0[k]) = y0[k]``,
    integrated over the region's extent along axis k.  ``v[k]`` must depend on
    ``x_k`` only.
    """
    vs = [as_field(vk) for vk in v]
    pts = _probe(region, n_check, seed)
    for k, vk in enumerate(vs):
        j = vk(pts)
        others = np.delete(j.grad, k, axis=-1)
        if np.max(np.abs(others)) > 0 or np.max(np.abs(j.val.imag)) > 0:
            raise ValueError(f"v{k + 1} must be real and depend on x{k + 1} only")
    comps = []
    for k in range(3):
        lo, hi = region.box[2 * k], region.box[2 * k + 1]
        ode = _AxisRiccati(k, vs[k], float(y0[k]), float(x0[k]), min(lo, x0[k]), max(hi, x0[k]),
                           x0, rtol, atol, cap)
        comps.append(ode.field())
    total = vs[0] + vs[1] + vs[2]
    return RiccatiPair(VectorField(*comps), total, region,
                       f"separable(v=({', '.join(x.label for x in vs)}), y0={tuple(y0)}, x0={tuple(x0)})")


def anticommutator_potential(phi1: ScalarField, phi2: ScalarField, region: Region, *,
                             tol: float = CHECK_TOL, n_check: int = N_CHECK, seed: int = 0) -> RiccatiPair:
    """Sum of two homogeneous solutions; the cross term ``{f1, f2} = -2<f1, f2>`` becomes ``v``."""
    pts = _probe(region, n_check, seed)
    for phi in (phi1, phi2):
        _require_nonvanishing(phi, pts)
        _require_harmonic(phi, pts, tol)
    f1, f2 = log_deriv(phi1), log_deriv(phi2)
    v = -2 * inner(f1, f2)
    return RiccatiPair(f1 + f2, v, region, f"anticommutator_potential({phi1.label}, {phi2.label})")


@dataclass(frozen=True)
class AxisPairResult:
    phi2: ScalarField
    harmonic_defect: float
    harmonic: bool
    pair: Optional[RiccatiPair]


def _x1_antiderivative(v: ScalarField, a: float, tol: float) -> ScalarField:
    """Jet of ``I(x) = int_a^{x1} v(t, x2, x3) t dt`` with derivatives under the integral."""
    iu = np.triu_indices(2)

    def fn(p):
        p = np.asarray(p, dtype=float)
        flat = p.reshape(-1, 3)
        span = flat[:, 0] - a

        def integrand(s):
            q = flat.copy()
            q[:, 0] = a + s * span
            j = v(q)
            if j.hess is None:
                raise QuadratureFailure("potential must provide second derivatives")
            t = q[:, 0] * span
            h = j.hess[:, 1:, 1:][:, iu[0], iu[1]]
            z = np.concatenate([j.val[:, None], j.grad[:, 1:], h], axis=1) * t[:, None]
            return np.concatenate([z.real, z.imag], axis=1).ravel()

        try:
            res, err = quad_vec(integrand, 0.0, 1.0, epsabs=tol, epsrel=tol, norm="max")
        except Exception as exc:  # quad_vec surfaces integrand errors as-is
            raise QuadratureFailure(str(exc)) from exc
        if not np.all(np.isfinite(res)) or err > 10 * tol * max(1.0, np.max(np.abs(res))):
            raise QuadratureFailure(f"quadrature error estimate {err:.3e} above tolerance {tol:g}")
        res = res.reshape(len(flat), 12)
        z = res[:, :6] + 1j * res[:, 6:]
        jv = v(flat)
        x1 = flat[:, 0]
        grad = np.stack([jv.val * x1, z[:, 1], z[:, 2]], axis=-1)
        hess = np.empty((len(flat), 3, 3), complex)
        hess[:, 0, 0] = jv.grad[:, 0] * x1 + jv.val
        hess[:, 0, 1] = hess[:, 1, 0] = jv.grad[:, 1] * x1
        hess[:, 0, 2] = hess[:, 2, 0] = jv.grad[:, 2] * x1
        hess[:, 1, 1], hess[:, 1, 2], hess[:, 2, 2] = z[:, 3], z[:, 4], z[:, 5]
        hess[:, 2, 1] = hess[:, 1, 2]
        shape = p.shape[:-1]
        return J.Jet2(z[:, 0].reshape(shape), grad.reshape(shape + (3,)), hess.reshape(shape + (3, 3)))

    return ScalarField(fn, f"int_{a:g}^x1 {v.label} t dt")


def axis_pair(v: ScalarField, A, region: Region, *, tol: float = CHECK_TOL, quad_tol: float = 1e-10,
              n_check: int = N_CHECK, seed: int = 0) -> AxisPairResult:
    """Partner of ``f1 = i1/x1``: ``phi2 = A(x2, x3) exp(-1/2 int v x1 dx1)``.

    The antiderivative is anchored at the region's lower x1 bound.  Whether
    ``phi2`` is harmonic depends on ``v`` and ``A``; the defect is reported
    and a pair is returned only when it vanishes within ``tol``.
    """
    v, A = as_field(v), as_field(A)
    pts = _probe(region, n_check, seed)
    integral = _x1_antiderivative(v, region.box[0], quad_tol)
    phi2 = A * exp(-0.5 * integral)
    j = phi2(pts)
    harmonic, defect = _within(j.laplacian(), j.val, tol)
    pair = None
    if harmonic:
        _require_nonvanishing(phi2, pts)
        _require_nonvanishing(X1, pts)
        f = log_deriv(X1) + log_deriv(phi2)
        pair = RiccatiPair(f, v, region, f"axis_pair(v={v.label}, A={A.label})")
    return AxisPairResult(phi2, defect, harmonic, pair)


def eikonal_solution(phi: ScalarField, region: Region, *, tol: float = CHECK_TOL,
                     n_check: int = N_CHECK, seed: int = 0) -> RiccatiPair:
    """``f = 2 grad(phi)/phi`` for harmonic ``phi``, with ``v = -2 |grad phi|^2 / phi^2``.

    The potential is the one that makes ``D f + f^2 = v`` hold; it equals
    ``2 (grad(phi)/phi)^2`` as a quaternion square.
    """
    pts = _probe(region, n_check, seed)
    _require_nonvanishing(phi, pts)
    _require_harmonic(phi, pts, tol)
    g = log_deriv(phi)
    return RiccatiPair(2 * g, -2 * inner(g, g), region, f"eikonal_solution(phi={phi.label})")


def euler_one(xi: ScalarField, v: ScalarField, Psi: ScalarField, region: Region, *,
              tol: float = CHECK_TOL, n_check: int = N_CHECK, seed: int = 0) -> RiccatiPair:
    """New solution ``grad(Psi)/Psi + grad(xi)`` from a seed ``grad(xi)``.

    ``Psi`` must solve the transport equation ``lap Psi + 2 <grad xi, grad Psi> = 0``.
    """
    v = as_field(v)
    pts = _probe(region, n_check, seed)
    _require_seed(xi, v, pts, tol)
    _require_nonvanishing(Psi, pts)
    jx, jp = xi(pts), Psi(pts)
    ok, sup = _within(jp.laplacian() + 2 * np.sum(jx.grad * jp.grad, axis=-1), jp.val, tol)
    if not ok:
        raise NotATransportSolution(f"sup |lap Psi + 2 <grad xi, grad Psi>| = {sup:.3e}")
    return RiccatiPair(log_deriv(Psi) + grad_field(xi), v, region,
                       f"euler_one(xi={xi.label}, Psi={Psi.label})")


def _pole_guard(w1: ScalarField, floor: float) -> ScalarField:
    def fn(p):
        j = w1(p)
        if np.any(np.abs(j.val) < floor):
            raise PoleOfFamily(f"|w - 1| below {floor:g} at evaluation point")
        return J.jet_func(j, "recip")

    return ScalarField(fn, f"1/({w1.label})")


def euler_two(xi1: ScalarField, xi2: ScalarField, v: ScalarField, A, region: Region, *,
              pole_margin: float = 1e-6, tol: float = CHECK_TOL, n_check: int = N_CHECK,
              seed: int = 0) -> RiccatiPair:
    """One-parameter family ``(h1 w - h2)/(w - 1)``, ``w = A exp(xi1 - xi2)``.

    The valid region drops the points with ``|w - 1| < pole_margin``.
    """
    v = as_field(v)
    A = complex(A)
    pts = _probe(region, n_check, seed)
    _require_seed(xi1, v, pts, tol)
    _require_seed(xi2, v, pts, tol)
    w = A * exp(xi1 - xi2)
    h1, h2 = grad_field(xi1), grad_field(xi2)
    scale = _pole_guard(w - 1, pole_margin)
    f = VectorField(*((w * a - b) * scale for a, b in zip(h1.components, h2.components)))
    valid = region.excluding(where_small(w - 1, pole_margin))
    return RiccatiPair(f, v, valid, f"euler_two(xi1={xi1.label}, xi2={xi2.label}, A={A!r})", {"w": w})
