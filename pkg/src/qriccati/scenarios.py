"""Named scenarios: one per construction or identity, plus oracle calibration.

Each scenario takes a :class:`ScenarioConfig` and returns a JSON-ready dict
holding the individual checks, the residual reports and an overall verdict.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import constructors as C
from . import grid as G
from .cquat import CQuat, qmul, table_mul
from .errors import ConfigError, NotASchrodingerSolution, NotHarmonic
from .fields import (
    X1,
    X2,
    X3,
    QuatField,
    Region,
    ScalarField,
    VectorField,
    const,
    cos,
    exp,
    grad_field,
    log,
    log_deriv,
    near_plane,
    outside_shell,
    radius,
    recip,
    sin,
    tanh,
)
from .verify import (
    factorization_check,
    quat_norm,
    riccati_defect,
    riccati_residual,
    scalar_form_residual,
    schrodinger_residual,
)

NEGATIVE_FLOOR = 1e-2


@dataclass
class ScenarioConfig:
    scenario: str
    box: Optional[tuple] = None
    grid: Optional[tuple] = None
    grids: Optional[tuple] = None
    tol: Optional[float] = None
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: Optional[str] = None
    format: str = "json"

    def param(self, key, default, cast=float):
        if key not in self.params:
            return default
        try:
            return cast(self.params[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for parameter {key!r}: {self.params[key]!r}") from exc


def parse_complex(text) -> complex:
    """Accept ``2``, ``1+1j``, ``1+1i`` or a ``re,im`` pair."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return complex(float(text[0]), float(text[1]))
    s = str(text).strip().replace(" ", "")
    try:
        if "," in s:
            re_, im_ = s.split(",")
            return complex(float(re_), float(im_))
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"not a complex number: {text!r}") from exc


class Checks:
    """Accumulates named pass/fail checks for a report."""

    def __init__(self, tol_override: Optional[float] = None):
        self.items = []
        self.tol_override = tol_override

    def at_most(self, name, value, tol, overridable=True):
        if overridable and self.tol_override is not None:
            tol = self.tol_override
        self.items.append({"name": name, "value": float(value), "bound": f"<= {tol:g}", "passed": bool(value <= tol)})

    def at_least(self, name, value, floor):
        self.items.append({"name": name, "value": float(value), "bound": f">= {floor:g}", "passed": bool(value >= floor)})

    def within(self, name, value, lo, hi):
        ok = bool(lo <= value <= hi)
        self.items.append({"name": name, "value": float(value), "bound": f"in [{lo:g}, {hi:g}]", "passed": ok})

    def holds(self, name, ok, detail=""):
        self.items.append({"name": name, "value": detail, "bound": "true", "passed": bool(ok)})

    @property
    def passed(self):
        return all(c["passed"] for c in self.items)


def _box(cfg, default):
    return tuple(cfg.box) if cfg.box is not None else default


# ---------------------------------------------------------------------------
# random inputs
# ---------------------------------------------------------------------------


def random_complex_quats(rng, n):
    return rng.normal(size=(n, 4)) + 1j * rng.normal(size=(n, 4))


def random_composite(rng) -> ScalarField:
    """A nonvanishing composite scalar field with random (possibly complex) constants."""
    a = rng.normal(scale=0.5, size=4)
    c, d = rng.uniform(0.5, 1.5, size=2)
    scale = complex(rng.uniform(0.5, 2.0), rng.choice([0.0, rng.uniform(-1, 1)]))
    positive = 2.5 + sin(c * X1 + d * X3) + 0.5 * cos(X2)
    return scale * exp(a[0] * X1 + a[1] * X2 + a[2] * X3 + a[3] * X1 * X2) * positive


def random_quat_field(rng) -> QuatField:
    comps = []
    for _ in range(4):
        a = rng.normal(size=5)
        comps.append(a[0] + a[1] * X1 * X2 + a[2] * X3**2 + a[3] * sin(X1 + 0.5 * X2) + a[4] * tanh(X3 - X1))
    return QuatField(*comps)


def random_polynomial(rng, degree=3) -> ScalarField:
    u = const(rng.normal())
    for i, j, k in itertools.product(range(degree + 1), repeat=3):
        if 0 < i + j + k <= degree:
            u = u + rng.normal() * (X1**i) * (X2**j) * (X3**k)
    return u


def random_poly_quat(rng, degree=3) -> QuatField:
    return QuatField(*(random_polynomial(rng, degree) for _ in range(4)))


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------


def algebra_properties(cfg: ScenarioConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    n = cfg.param("n", 10_000, int)
    chk = Checks(cfg.tol)
    a, b, c = (random_complex_quats(rng, n) for _ in range(3))
    na, nb, nc = (quat_norm(x) for x in (a, b, c))

    table_exact = all(
        np.array_equal(qmul(np.eye(4)[j], np.eye(4)[k]), table_mul(np.eye(4)[j], np.eye(4)[k]))
        for j in range(4)
        for k in range(4)
    )
    chk.holds("multiplication table exact", table_exact)
    chk.holds("i1 i2 = i3", CQuat.from_array(qmul(np.eye(4)[1], np.eye(4)[2])) == CQuat(0, 0, 0, 1))
    chk.holds("noncommutative witness i1 i2 != i2 i1", not np.array_equal(qmul(np.eye(4)[1], np.eye(4)[2]), qmul(np.eye(4)[2], np.eye(4)[1])))

    assoc = quat_norm(qmul(qmul(a, b), c) - qmul(a, qmul(b, c))) / (na * nb * nc)
    chk.at_most("associativity (relative)", assoc.max(), 1e-12)
    dist = quat_norm(qmul(a, b + c) - qmul(a, b) - qmul(a, c)) / (na * (nb + nc))
    chk.at_most("distributivity (relative)", dist.max(), 1e-12)
    expansion = quat_norm(qmul(a, b) - table_mul(a, b)) / (na * nb)
    chk.at_most("scalar-vector expansion vs unit table (relative)", expansion.max(), 1e-12)

    av, bv = a.copy(), b.copy()
    av[:, 0] = bv[:, 0] = 0
    anti = qmul(av, bv) + qmul(bv, av)
    expect = np.zeros_like(anti)
    expect[:, 0] = -2 * np.sum(av[:, 1:] * bv[:, 1:], axis=1)
    chk.at_most("anticommutator of vectors = -2<a,b> (relative)", (quat_norm(anti - expect) / (quat_norm(av) * quat_norm(bv))).max(), 1e-12)
    sq = qmul(av, av)
    expect = np.zeros_like(sq)
    expect[:, 0] = -np.sum(av[:, 1:] ** 2, axis=1)
    chk.at_most("vector square = -|a|^2 (relative)", (quat_norm(sq - expect) / quat_norm(av) ** 2).max(), 1e-12)
    return {"checks": chk, "extra": {"n_triples": n}}


def leibniz_logderiv(cfg: ScenarioConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    region = Region(_box(cfg, (-1, 1, -1, 1, -1, 1)))
    pts = region.sample(cfg.param("points", 50, int), cfg.seed).points
    chk = Checks(cfg.tol)
    worst_leib = worst_log = 0.0
    for _ in range(cfg.param("pairs", 10, int)):
        u, u2, g = random_composite(rng), random_composite(rng), random_quat_field(rng)
        ug = QuatField(*(u * ci for ci in g.c))
        lhs = ug.qjet(pts).dirac().val
        ju = u(pts)
        gq = g.qjet(pts)
        du = np.concatenate([np.zeros(ju.val.shape + (1,)), ju.grad], axis=-1)
        t1 = qmul(du, gq.val)
        t2 = ju.val[:, None] * gq.dirac().val
        rel = quat_norm(lhs - t1 - t2) / (quat_norm(t1) + quat_norm(t2))
        worst_leib = max(worst_leib, rel.max())
        prod = log_deriv(u * u2)(pts).coeffs
        parts = log_deriv(u)(pts).coeffs + log_deriv(u2)(pts).coeffs
        worst_log = max(worst_log, (quat_norm(prod - parts) / quat_norm(parts)).max())
    chk.at_most("Leibniz rule D(u g) = (Du) g + u Dg (relative)", worst_leib, 1e-12)
    chk.at_most("log-derivative additivity (relative)", worst_log, 1e-12)
    return {"checks": chk}


def _schrodinger_cases():
    return [
        ("exp(x1), v=-1", exp(X1), const(-1), Region((-1, 1, -1, 1, -1, 1))),
        ("sin(x1), v=1", sin(X1), const(1), Region((0.1, math.pi - 0.1, -1, 1, -1, 1))),
        ("1/(4 pi |x|), v=0", recip(4 * math.pi * radius()), const(0), Region((-2, 2, -2, 2, -2, 2), outside_shell(0.5, 2))),
    ]


def schrodinger_roundtrip(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    reports = {}
    n = cfg.param("points", 200, int)
    for name, phi, v, region in _schrodinger_cases():
        pts = region.sample(n, cfg.seed)
        srep = schrodinger_residual(phi, v, pts, region, provenance=name)
        chk.at_most(f"{name}: Schrodinger residual", srep.sup_norm, 1e-12)
        pair = C.from_schrodinger(phi, v, region, seed=cfg.seed)
        rrep = riccati_residual(pair, pts)
        reports[name] = rrep.to_dict()
        chk.at_most(f"{name}: Riccati residual of grad(phi)/phi", rrep.sup_norm, 1e-10)
        potential = log(phi)
        scalar = scalar_form_residual(potential, v, pts)
        grad_def = riccati_defect(grad_field(potential), v, pts.points)
        sform = potential(pts.points).laplacian() + np.sum(potential(pts.points).grad ** 2, axis=-1) + v(pts.points).val
        agree = np.abs(sform + grad_def[:, 0]).max()
        chk.at_most(f"{name}: scalar form agrees with quaternion form", agree, 1e-12)
        chk.at_most(f"{name}: scalar form residual", scalar.sup_norm, 1e-10)
    return {"checks": chk, "reports": reports}


def homogeneous_harmonic(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    reports = {}
    base = Region(_box(cfg, (-1, 1, -1, 1, -1, 1)))
    cases = [
        ("x1", X1, base.excluding(near_plane(1))),
        ("x1 x2", X1 * X2, base.excluding(near_plane(1)).excluding(near_plane(2))),
        ("x1^2 - x2^2", X1**2 - X2**2, base.excluding(lambda p: np.abs(np.abs(p[..., 0]) - np.abs(p[..., 1])) < 0.1)),
    ]
    for name, phi, region in cases:
        pair = C.harmonic_to_homogeneous(phi, region, seed=cfg.seed)
        pts = region.sample(cfg.param("points", 200, int), cfg.seed)
        rep = riccati_residual(pair, pts)
        reports[name] = rep.to_dict()
        chk.at_most(f"phi = {name}: homogeneous residual", rep.sup_norm, 1e-10)
    pts = cases[1][2].sample(50, cfg.seed).points
    direct = VectorField(1 / X1, 1 / X2, 0)(pts).coeffs
    got = log_deriv(X1 * X2)(pts).coeffs
    chk.at_most("grad(x1 x2)/(x1 x2) = i1/x1 + i2/x2", np.abs(got - direct).max(), 1e-12)
    return {"checks": chk, "reports": reports}


def separable_tanh(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    region = Region(_box(cfg, (-2, 2, -2, 2, -2, 2)))
    pair = C.separable([const(-1)] * 3, [0, 0, 0], [0, 0, 0], region)
    pts = region.sample(cfg.param("points", 200, int), cfg.seed)
    rep = riccati_residual(pair, pts)
    p = pts.points
    closed = np.stack([np.tanh(p[:, k]) for k in range(3)], axis=-1)
    got = pair.f(p).vector
    chk.at_most("ODE components match tanh", np.abs(got - closed).max(), 1e-8)
    chk.at_most("Riccati residual", rep.sup_norm, 1e-8)
    chk.at_most("total potential is -3", np.abs(pair.v(p).val + 3).max(), 0.0, overridable=False)

    homog_region = Region((0, 2, 0, 2, 0, 2))
    hpair = C.separable([const(0)] * 3, [1, 1, 1], [0, 0, 0], homog_region)
    hp = homog_region.sample(100, cfg.seed).points
    chk.at_most("homogeneous components match 1/(x+1)", np.abs(hpair.f(hp).vector - 1 / (hp + 1)).max(), 1e-8)
    return {"checks": chk, "reports": {"tanh": rep.to_dict()}}


def anticommutator_pairs(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    reports = {}
    region = Region(_box(cfg, (0.5, 2, 0.5, 2, -1, 1)))
    cases = [
        ("x1, x2", X1, X2, const(0)),
        ("x1, x1", X1, X1, -2 / X1**2),
        ("x1, x1 x2", X1, X1 * X2, -2 / X1**2),
    ]
    pts = region.sample(cfg.param("points", 200, int), cfg.seed)
    for name, p1, p2, v_expected in cases:
        pair = C.anticommutator_potential(p1, p2, region, seed=cfg.seed)
        rep = riccati_residual(pair, pts)
        reports[name] = rep.to_dict()
        chk.at_most(f"{name}: residual", rep.sup_norm, 1e-10)
        chk.at_most(f"{name}: potential matches closed form", np.abs(pair.v(pts).val - v_expected(pts).val).max(), 1e-12)
    return {"checks": chk, "reports": reports}


def axis_pair_scenario(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    reports = {}
    region = Region(_box(cfg, (0.5, 2, 0.5, 2, -1, 1)))
    pts = region.sample(cfg.param("points", 200, int), cfg.seed)
    res = C.axis_pair(-2 / X1**2, 1, region, seed=cfg.seed)
    chk.holds("v=-2/x1^2, A=1: partner is harmonic", res.harmonic, f"defect {res.harmonic_defect:.3e}")
    if res.pair is not None:
        rep = riccati_residual(res.pair, pts)
        reports["A=1"] = rep.to_dict()
        chk.at_most("v=-2/x1^2, A=1: residual", rep.sup_norm, 1e-10)
        chk.at_most("A=1: f = 2 i1/x1", np.abs(res.pair.f(pts).coeffs - VectorField(2 / X1)(pts).coeffs).max(), 1e-9)
    res = C.axis_pair(-2 / X1**2, X2, region, seed=cfg.seed)
    chk.holds("v=-2/x1^2, A=x2: partner is harmonic", res.harmonic, f"defect {res.harmonic_defect:.3e}")
    if res.pair is not None:
        rep = riccati_residual(res.pair, pts)
        reports["A=x2"] = rep.to_dict()
        chk.at_most("v=-2/x1^2, A=x2: residual", rep.sup_norm, 1e-10)
        chk.at_most("A=x2: f = 2 i1/x1 + i2/x2", np.abs(res.pair.f(pts).coeffs - VectorField(2 / X1, 1 / X2)(pts).coeffs).max(), 1e-9)
    res = C.axis_pair(const(-2), 1, region, seed=cfg.seed)
    chk.holds("v=-2, A=1: construction reports failure", not res.harmonic and res.pair is None)
    chk.at_least("v=-2, A=1: harmonicity defect", res.harmonic_defect, NEGATIVE_FLOOR)
    return {"checks": chk, "reports": reports}


def fundamental_example(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    rmin, rmax = cfg.param("rmin", 0.5), cfg.param("rmax", 2.0)
    region = Region(_box(cfg, (-rmax, rmax) * 3), outside_shell(rmin, rmax))
    phi = recip(4 * math.pi * radius())
    pair = C.eikonal_solution(phi, region, seed=cfg.seed)
    pts = region.sample(cfg.param("points", 200, int), cfg.seed)
    rep = riccati_residual(pair, pts)
    chk.at_most("residual with v = -2/|x|^2", rep.sup_norm, 1e-12)
    p = pts.points
    r2 = np.sum(p**2, axis=1)
    chk.at_most("f = -2 x/|x|^2", np.abs(pair.f(p).vector + 2 * p / r2[:, None]).max(), 1e-12)
    chk.at_most("v = -2/|x|^2", np.abs(pair.v(p).val + 2 / r2).max(), 1e-12)
    alt = C.RiccatiPair(pair.f, recip(radius() ** 2), region, "fundamental example with v = 1/|x|^2")
    alt_rep = riccati_residual(alt, pts)
    extra = {
        "conflicting_v": {
            "expr": "1/|x|^2",
            "sup_residual": alt_rep.sup_norm,
            "note": "v = 1/|x|^2 does not satisfy D f + f^2 = v for f = -2x/|x|^2; v = -2/|x|^2 does",
        }
    }
    return {"checks": chk, "reports": {"eikonal": rep.to_dict()}, "extra": extra}


def euler1_analytic(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    reports = {}
    region = Region(_box(cfg, (-1, 1, -1, 1, -1, 1))).excluding(near_plane(2))
    pts = region.sample(cfg.param("points", 200, int), cfg.seed)
    for name, Psi in (("Psi=exp(-2x1)", exp(-2 * X1)), ("Psi=x2", X2), ("Psi=1", const(1))):
        pair = C.euler_one(X1, const(-1), Psi, region, seed=cfg.seed)
        rep = riccati_residual(pair, pts)
        reports[name] = rep.to_dict()
        chk.at_most(f"xi=x1, {name}: residual", rep.sup_norm, 1e-12)
    return {"checks": chk, "reports": reports}


def _transport_pipeline(n, exact, xi=X1, v=const(-1), tol=1e-10, box=(0, 1, 0, 1, 0, 1), probe=None):
    grid = G.Grid3(box, n)
    problem = G.TransportProblem(xi, grid, exact)
    psi = G.transport_solve(problem, tol=tol)
    nodal = float(np.abs(psi.values - G.sample(exact, grid).values).max())
    f = log_deriv(G.grid_to_field(psi)) + grad_field(xi)
    if probe is None:
        probe = grid.nodes()[1:-1, 1:-1, 1:-1].reshape(-1, 3)
    res = quat_norm(riccati_defect(f, v, probe))
    return problem, psi, nodal, float(res.max())


TRANSPORT_SOLUTIONS = {
    "exp": (lambda: exp(-2 * X1), "exp(-2 x1)"),
    "cosh": (lambda: exp(-X1) * (exp(X2) + exp(-X2)) / 2, "exp(-x1) cosh(x2)"),
}


def _transport_solution(cfg):
    key = cfg.params.get("solution", "exp")
    if key not in TRANSPORT_SOLUTIONS:
        raise ConfigError(f"unknown transport solution {key!r}; choose from {sorted(TRANSPORT_SOLUTIONS)}")
    make, label = TRANSPORT_SOLUTIONS[key]
    return make(), label


def euler1_transport(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    n = cfg.grid or (17, 17, 17)
    exact, label = _transport_solution(cfg)
    problem, psi, nodal, res = _transport_pipeline(n, exact, box=_box(cfg, (0, 1, 0, 1, 0, 1)))
    h = float(np.max(psi.h))
    C_const = 5.0
    chk.at_most("max nodal error <= C h^2 (C=5)", nodal / h**2, C_const, overridable=False)
    chk.at_most("interior Riccati residual of grad(Psi)/Psi + i1 <= C h^2 (C=5)", res / h**2, C_const, overridable=False)
    lo = np.ones(3, int)
    hi = np.array(psi.n) - 2
    net = abs(G.box_flux(problem, psi, lo, hi))
    gross = G.box_flux(problem, psi, lo, hi, absolute=True)
    chk.at_most("discrete conservation |net flux| / gross flux", net / gross, 10 * 1e-10, overridable=False)
    return {
        "checks": chk,
        "extra": {"solution": label, "n": list(psi.n), "h": h, "max_nodal_error": nodal, "max_interior_residual": res},
        "grid": psi,
    }


def transport_convergence(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    grids = tuple(cfg.grids or (9, 17, 33))
    if len(grids) < 2:
        raise ConfigError("transport-convergence needs at least two grids")
    exact, label = _transport_solution(cfg)
    coarse = G.Grid3((0, 1, 0, 1, 0, 1), grids[0]).nodes()[1:-1, 1:-1, 1:-1].reshape(-1, 3)
    errs, ress, hs = [], [], []
    for n in grids:
        _, psi, nodal, res = _transport_pipeline(n, exact, probe=coarse)
        errs.append(nodal)
        ress.append(res)
        hs.append(float(np.max(psi.h)))
    orders = [math.log(errs[i] / errs[i + 1]) / math.log(hs[i] / hs[i + 1]) for i in range(len(grids) - 1)]
    rorders = [math.log(ress[i] / ress[i + 1]) / math.log(hs[i] / hs[i + 1]) for i in range(len(grids) - 1)]
    for i, o in enumerate(orders):
        chk.within(f"nodal error order {grids[i]}->{grids[i + 1]}", o, 1.7, 2.3)
    for i, o in enumerate(rorders):
        chk.within(f"recombined residual order {grids[i]}->{grids[i + 1]}", o, 1.7, 2.3)
    return {
        "checks": chk,
        "extra": {"solution": label, "grids": list(grids), "h": hs, "nodal_errors": errs,
                  "residuals": ress, "nodal_orders": orders, "residual_orders": rorders},
    }


def euler2_family(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    reports = {}
    if "A" in cfg.params:
        As = [parse_complex(cfg.params["A"])]
    else:
        As = [-2, -1, 0.5, 2, 1 + 1j]
    margin = cfg.param("margin", 0.1)
    region = Region(_box(cfg, (-1, 1, -1, 1, -1, 1)))
    n = cfg.param("points", 200, int)
    for A in As:
        A = complex(A)
        pair = C.euler_two(X1, X2, const(-1), A, region, pole_margin=margin, seed=cfg.seed)
        pts = pair.valid_region.sample(n, cfg.seed)
        rep = riccati_residual(pair, pts)
        name = f"A={A}"
        reports[name] = rep.to_dict()
        vals = pair.f(pts).coeffs
        chk.at_most(f"{name}: residual", rep.sup_norm, 1e-10)
        third = float(np.abs(vals[:, 3]).max())
        chk.at_most(f"{name}: third component sup", third, 0.0, overridable=False)
        dist = float(quat_norm(vals - np.array([0, 0, 0, 1])).min())
        chk.at_least(f"{name}: sup-distance to i3", float(quat_norm(vals - np.array([0, 0, 0, 1])).max()), 1.0)
        reports[name]["min_distance_to_i3"] = dist
    pts = region.sample(50, cfg.seed).points
    small = C.euler_two(X1, X2, const(-1), 1e-12, region, seed=cfg.seed)
    large = C.euler_two(X1, X2, const(-1), 1e12, region, seed=cfg.seed)
    chk.at_most("A -> 0 gives i2", np.abs(small.f(pts).coeffs - [0, 0, 1, 0]).max(), 1e-10)
    chk.at_most("|A| -> inf gives i1", np.abs(large.f(pts).coeffs - [0, 1, 0, 0]).max(), 1e-10)
    third = C.RiccatiPair(VectorField(0, 0, 1), const(-1), region, "i3")
    chk.at_most("i3 itself solves the equation", riccati_residual(third, pts).sup_norm, 0.0, overridable=False)
    return {"checks": chk, "reports": reports}


def factorization(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    rng = np.random.default_rng(cfg.seed)
    region = Region(_box(cfg, (-1, 1, -1, 1, -1, 1)))
    pts = region.sample(cfg.param("points", 50, int), cfg.seed)
    pair = C.RiccatiPair(VectorField(1), const(-1), region, "f=i1, v=-1")
    chk.at_most("g = x2 i3", factorization_check(pair, QuatField(0, 0, 0, X2), pts), 1e-12)
    worst = max(factorization_check(pair, random_poly_quat(rng), pts) for _ in range(cfg.param("functions", 10, int)))
    chk.at_most("random cubic quaternion test functions", worst, 1e-10)
    bad = C.RiccatiPair(VectorField(X1), const(-1), region, "f=x1 i1, v=-1")
    chk.at_least("negative control f = x1 i1", factorization_check(bad, random_poly_quat(rng), pts), NEGATIVE_FLOOR)
    shell = Region((-2, 2) * 3, outside_shell(0.5, 2))
    fpair = C.eikonal_solution(recip(4 * math.pi * radius()), shell, seed=cfg.seed)
    spts = shell.sample(50, cfg.seed)
    scalar_worst = max(factorization_check(fpair, QuatField(random_polynomial(rng)), spts) for _ in range(5))
    chk.at_most("nonconstant f, scalar test functions", scalar_worst, 1e-10)
    vector_defect = factorization_check(fpair, QuatField(0, X2, X3, X1), spts)
    return {"checks": chk, "extra": {"nonconstant_f_vector_test_function_defect": vector_defect}}


def negative_controls(cfg: ScenarioConfig) -> dict:
    chk = Checks(cfg.tol)
    region = Region(_box(cfg, (-1, 1, -1, 1, -1, 1)))
    pts = region.sample(cfg.param("points", 200, int), cfg.seed)
    wrong = C.RiccatiPair(VectorField(1), const(1), region, "f=i1, v=+1")
    rep = riccati_residual(wrong, pts)
    chk.at_least("f = i1 with v = +1", rep.sup_norm, NEGATIVE_FLOOR)
    chk.at_most("f = i1 with v = +1 gives exactly 2 everywhere", np.abs(quat_norm(riccati_defect(wrong.f, wrong.v, pts.points)) - 2).max(), 0.0, overridable=False)
    chk.at_least("scalar form phi = x1^2, v = 0", scalar_form_residual(X1**2, const(0), pts).sup_norm, NEGATIVE_FLOOR)
    chk.at_least("Schrodinger phi = exp(x1), v = +1", schrodinger_residual(exp(X1), const(1), pts).sup_norm, NEGATIVE_FLOOR)
    bad = C.RiccatiPair(VectorField(X1), const(-1), region, "f=x1 i1")
    chk.at_least("factorization f = x1 i1", factorization_check(bad, QuatField(1 + X2, X3, 0, X1 * X2), pts), NEGATIVE_FLOOR)
    shell = Region((-2, 2) * 3, outside_shell(0.5, 2))
    f = VectorField(-2 * X1 / radius() ** 2, -2 * X2 / radius() ** 2, -2 * X3 / radius() ** 2)
    conflicting = C.RiccatiPair(f, recip(radius() ** 2), shell, "f=-2x/|x|^2, v=1/|x|^2")
    chk.at_least("fundamental example with v = 1/|x|^2", riccati_residual(conflicting, shell.sample(200, cfg.seed)).sup_norm, NEGATIVE_FLOOR)
    nonrot = C.RiccatiPair(VectorField(X2, -X1, 0), const(0), region, "rotational field")
    chk.at_least("rotational field (rot f != 0)", riccati_residual(nonrot, pts).vector_part_sup, NEGATIVE_FLOOR)
    try:
        C.from_schrodinger(exp(X1), const(1), region)
        raised = False
    except NotASchrodingerSolution:
        raised = True
    chk.holds("from_schrodinger rejects exp(x1) with v = +1", raised)
    try:
        C.harmonic_to_homogeneous(exp(X1), region)
        raised = False
    except NotHarmonic:
        raised = True
    chk.holds("harmonic_to_homogeneous rejects exp(x1)", raised)
    return {"checks": chk, "reports": {"f=i1,v=+1": rep.to_dict()}}


SCENARIOS: dict[str, tuple[Callable, str]] = {
    "algebra-properties": (algebra_properties, "complex quaternion multiplication rules and anticommutator"),
    "leibniz-logderiv": (leibniz_logderiv, "Leibniz rule for D and additivity of the logarithmic derivative"),
    "schrodinger-roundtrip": (schrodinger_roundtrip, "Schrodinger <-> Riccati correspondence via the logarithmic derivative"),
    "homogeneous-harmonic": (homogeneous_harmonic, "homogeneous Riccati PDE solved by log-derivatives of harmonic functions"),
    "separable-tanh": (separable_tanh, "separable potentials: system of 1-D Riccati ODEs"),
    "anticommutator-pairs": (anticommutator_pairs, "sum of homogeneous solutions, potential from the anticommutator"),
    "axis-pair": (axis_pair_scenario, "partner of i1/x1 via exp(-1/2 int v x1 dx1)"),
    "fundamental-example": (fundamental_example, "eikonal construction from the fundamental solution of the Laplacian"),
    "euler1-analytic": (euler1_analytic, "first Euler theorem: seed plus log-derivative of a transport solution"),
    "euler1-transport": (euler1_transport, "first Euler theorem with a grid-solved div(exp(2 xi) grad Psi) = 0"),
    "euler2-family": (euler2_family, "second Euler theorem: one-parameter family from two solutions"),
    "factorization": (factorization, "factorization -lap - v = (D + M^f)(D - M^f)"),
    "transport-convergence": (transport_convergence, "transport equation solver, manufactured-solution convergence"),
    "negative-controls": (negative_controls, "oracle calibration with deliberately wrong inputs"),
}


def run_scenario(cfg: ScenarioConfig) -> tuple[dict, Optional[G.Grid3]]:
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {cfg.scenario!r}; choose from {', '.join(SCENARIOS)}")
    fn, anchor = SCENARIOS[cfg.scenario]
    out = fn(cfg)
    chk: Checks = out["checks"]
    report = {
        "scenario": cfg.scenario,
        "anchor": anchor,
        "seed": cfg.seed,
        "params": {k: str(v) for k, v in sorted(cfg.params.items())},
        "checks": chk.items,
        "reports": out.get("reports", {}),
        "extra": out.get("extra", {}),
        "passed": chk.passed,
    }
    return report, out.get("grid")
