"""Scalar, vector and quaternion fields over a region of R^3, and the
first-order operators built on them: grad, div, rot, the Laplacian, the
Moisil-Theodoresco operator ``D = i1 d1 + i2 d2 + i3 d3`` and the logarithmic
derivative ``u^{-1} D u``.

Fields are composable evaluators.  ``field(points)`` returns a
:class:`~qriccati.jet.Jet2` with exact derivatives, so a formula assembled
from coordinates, constants, arithmetic and elementary functions is
differentiated without truncation error.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

from . import jet as J
from .cquat import CQuat, qmul
from .errors import DivisionNearZero, EvalOutsideRegion

Predicate = Callable[[np.ndarray], np.ndarray]

DEFAULT_MARGIN = 0.1


# ---------------------------------------------------------------------------
# regions and sampling
# ---------------------------------------------------------------------------


def _never(points):
    return np.zeros(np.asarray(points).shape[:-1], bool)


@dataclass(frozen=True)
class Region:
    """Axis-aligned box minus an excluded set.

    ``exclusion(points)`` returns True where a point must not be used
    (typically a neighbourhood of a singular set).
    """

    box: tuple
    exclusion: Predicate = dc_field(default=_never, compare=False)

    def __post_init__(self):
        box = tuple(float(b) for b in self.box)
        if len(box) != 6:
            raise ValueError("box needs six bounds: x1min, x1max, x2min, x2max, x3min, x3max")
        for k in range(3):
            if not box[2 * k] < box[2 * k + 1]:
                raise ValueError(f"empty extent along axis {k + 1}: {box[2 * k]} >= {box[2 * k + 1]}")
        object.__setattr__(self, "box", box)

    @property
    def lower(self):
        return np.array(self.box[0::2])

    @property
    def upper(self):
        return np.array(self.box[1::2])

    def contains(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        inside = np.all((p >= self.lower) & (p <= self.upper), axis=-1)
        return inside & ~np.asarray(self.exclusion(p), bool)

    def check(self, points):
        p = np.asarray(points, dtype=float)
        ok = self.contains(p)
        if not np.all(ok):
            bad = p[~ok] if p.ndim > 1 else p
            raise EvalOutsideRegion(f"{int(np.size(ok) - np.count_nonzero(ok))} point(s) outside region, e.g. {np.atleast_2d(bad)[0]}")

    def excluding(self, predicate: Predicate) -> "Region":
        old = self.exclusion
        return Region(self.box, lambda p: np.asarray(old(p), bool) | np.asarray(predicate(p), bool))

    def sample(self, n: int = 200, seed: int = 0, max_batches: int = 200) -> "Samples":
        """Scrambled-Halton points in the box, rejecting excluded ones."""
        sampler = qmc.Halton(d=3, scramble=True, seed=seed)
        kept = []
        count = 0
        for _ in range(max_batches):
            batch = qmc.scale(sampler.random(max(n, 64)), self.lower, self.upper)
            batch = batch[self.contains(batch)]
            kept.append(batch)
            count += len(batch)
            if count >= n:
                return Samples(np.concatenate(kept)[:n], seed)
        raise EvalOutsideRegion(f"could only place {count} of {n} sample points; the region is almost entirely excluded")


@dataclass(frozen=True)
class Samples:
    points: np.ndarray
    seed: Optional[int] = None

    def __len__(self):
        return len(self.points)


def as_points(points) -> tuple[np.ndarray, Optional[int]]:
    if isinstance(points, Samples):
        return points.points, points.seed
    return np.asarray(points, dtype=float), None


def near_plane(axis: int, value: float = 0.0, margin: float = DEFAULT_MARGIN) -> Predicate:
    """Exclusion for ``|x_axis - value| < margin`` (axis is 1-based)."""
    return lambda p: np.abs(np.asarray(p)[..., axis - 1] - value) < margin


def near_point(center=(0.0, 0.0, 0.0), margin: float = DEFAULT_MARGIN) -> Predicate:
    c = np.asarray(center, dtype=float)
    return lambda p: np.max(np.abs(np.asarray(p) - c), axis=-1) < margin


def outside_shell(rmin: float, rmax: float) -> Predicate:
    """Exclude everything except ``rmin <= |x| <= rmax``."""

    def pred(p):
        r = np.linalg.norm(np.asarray(p), axis=-1)
        return (r < rmin) | (r > rmax)

    return pred


def where_small(u: "ScalarField", margin: float) -> Predicate:
    """Exclude points where ``|u| < margin``."""
    return lambda p: np.abs(u(p).val) < margin


# ---------------------------------------------------------------------------
# scalar fields
# ---------------------------------------------------------------------------


class ScalarField:
    """A complex scalar field evaluated as jets."""

    __slots__ = ("_fn", "label")

    def __init__(self, fn: Callable[[np.ndarray], J.Jet2], label: str = "u"):
        self._fn = fn
        self.label = label

    def __call__(self, points) -> J.Jet2:
        p, _ = as_points(points)
        return self._fn(p)

    evaluate = __call__

    def __repr__(self):
        return f"ScalarField({self.label})"

    def _binary(self, other, op, sym, reflected=False):
        other = as_field(other)
        a, b = (other, self) if reflected else (self, other)
        return ScalarField(lambda p: J.jet_arith(a(p), b(p), op), f"({a.label} {sym} {b.label})")

    def __add__(self, other):
        return self._binary(other, "add", "+")

    def __radd__(self, other):
        return self._binary(other, "add", "+", True)

    def __sub__(self, other):
        return self._binary(other, "sub", "-")

    def __rsub__(self, other):
        return self._binary(other, "sub", "-", True)

    def __mul__(self, other):
        if isinstance(other, (VectorField, QuatField)):
            return NotImplemented
        return self._binary(other, "mul", "*")

    def __rmul__(self, other):
        return self._binary(other, "mul", "*", True)

    def __truediv__(self, other):
        return self._binary(other, "div", "/")

    def __rtruediv__(self, other):
        return self._binary(other, "div", "/", True)

    def __neg__(self):
        return ScalarField(lambda p: -self(p), f"-{self.label}")

    def __pow__(self, p):
        return ScalarField(lambda q: J.jet_func(self(q), "pow", p), f"{self.label}^{p}")


def as_field(x) -> ScalarField:
    if isinstance(x, ScalarField):
        return x
    return const(x)


def const(c) -> ScalarField:
    c = complex(c)
    label = repr(c.real) if c.imag == 0 else repr(c)
    return ScalarField(lambda p: J.constant(c, np.asarray(p).shape[:-1]), label)


def coord(k: int) -> ScalarField:
    """The coordinate x_k, 1-based."""
    return ScalarField(lambda p: J.seed(p, k - 1), f"x{k}")


X1, X2, X3 = coord(1), coord(2), coord(3)


def _unary(name):
    def f(u) -> ScalarField:
        u = as_field(u)
        return ScalarField(lambda p: J.jet_func(u(p), name), f"{name}({u.label})")

    f.__name__ = name
    return f


exp = _unary("exp")
log = _unary("log")
sin = _unary("sin")
cos = _unary("cos")
tanh = _unary("tanh")
sqrt = _unary("sqrt")
recip = _unary("recip")


def radius() -> ScalarField:
    return ScalarField(lambda p: J.jet_func(J.seed(p, 0) ** 2 + J.seed(p, 1) ** 2 + J.seed(p, 2) ** 2, "sqrt"), "|x|")


def partial(u: ScalarField, k: int) -> ScalarField:
    """The field d_k u (1-based axis); evaluates to first-order jets."""
    return ScalarField(lambda p: u(p).partial(k - 1), f"d{k}({u.label})")


# ---------------------------------------------------------------------------
# vector and quaternion fields
# ---------------------------------------------------------------------------


class QuatField:
    """Quaternion field with components along i0, i1, i2, i3."""

    __slots__ = ("c",)

    def __init__(self, c0=0, c1=0, c2=0, c3=0):
        self.c = tuple(as_field(x) for x in (c0, c1, c2, c3))

    def qjet(self, points) -> "QJet":
        p, _ = as_points(points)
        return QJet.from_components([ci(p) for ci in self.c])

    def __call__(self, points) -> CQuat:
        return self.qjet(points).cquat()

    def __add__(self, other):
        other = as_quat_field(other)
        return QuatField(*(a + b for a, b in zip(self.c, other.c)))

    def __sub__(self, other):
        other = as_quat_field(other)
        return QuatField(*(a - b for a, b in zip(self.c, other.c)))

    def __rmul__(self, u):
        u = as_field(u)
        return QuatField(*(u * ci for ci in self.c))

    def __repr__(self):
        return "QuatField(" + ", ".join(ci.label for ci in self.c) + ")"


class VectorField:
    """Purely vectorial quaternion field ``c1 i1 + c2 i2 + c3 i3``."""

    __slots__ = ("c1", "c2", "c3")

    def __init__(self, c1=0, c2=0, c3=0):
        self.c1, self.c2, self.c3 = (as_field(x) for x in (c1, c2, c3))

    @property
    def components(self):
        return (self.c1, self.c2, self.c3)

    @property
    def quat(self) -> QuatField:
        return QuatField(0, self.c1, self.c2, self.c3)

    def qjet(self, points) -> "QJet":
        return self.quat.qjet(points)

    def __call__(self, points) -> CQuat:
        p, _ = as_points(points)
        return CQuat.from_vector(np.stack([ci(p).val for ci in self.components], axis=-1))

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return VectorField(*(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return VectorField(*(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self):
        return VectorField(*(-a for a in self.components))

    def __rmul__(self, u):
        u = as_field(u)
        return VectorField(*(u * a for a in self.components))

    def __truediv__(self, u):
        u = as_field(u)
        return VectorField(*(a / u for a in self.components))

    def __repr__(self):
        return "VectorField(" + ", ".join(ci.label for ci in self.components) + ")"


def as_quat_field(x) -> QuatField:
    if isinstance(x, QuatField):
        return x
    if isinstance(x, VectorField):
        return x.quat
    return QuatField(as_field(x))


def grad_field(u: ScalarField) -> VectorField:
    return VectorField(partial(u, 1), partial(u, 2), partial(u, 3))


def log_deriv(u: ScalarField, floor: float = J.DEFAULT_FLOOR) -> VectorField:
    """``u^{-1} D u = grad(u) / u``; nonvanishing is checked at each evaluation."""

    def component(k):
        def fn(p):
            ju = u(p)
            if np.any(np.abs(ju.val) < floor):
                raise DivisionNearZero(f"log_deriv: |{u.label}| below floor {floor:g}")
            return J.jet_arith(ju.partial(k), ju.truncated(), "div", floor)

        return ScalarField(fn, f"d{k + 1}({u.label})/{u.label}")

    return VectorField(component(0), component(1), component(2))


# ---------------------------------------------------------------------------
# quaternion-valued jets
# ---------------------------------------------------------------------------

_UNITS = np.eye(4, dtype=complex)[1:]  # i1, i2, i3


class QJet:
    """Quaternion-valued jet: value, first partials and (optionally) second partials.

    ``val``: ``S + (4,)``; ``d``: ``S + (3, 4)``; ``dd``: ``S + (3, 3, 4)`` or None.
    Products keep the factor order, so the algebra's noncommutativity is
    respected in every Leibniz term.
    """

    __slots__ = ("val", "d", "dd")

    def __init__(self, val, d, dd=None):
        self.val = np.asarray(val, complex)
        self.d = np.asarray(d, complex)
        self.dd = None if dd is None else np.asarray(dd, complex)

    @classmethod
    def from_components(cls, jets) -> "QJet":
        val = np.stack([j.val for j in jets], axis=-1)
        d = np.stack([j.grad for j in jets], axis=-1)
        dd = None
        if all(j.hess is not None for j in jets):
            dd = np.stack([j.hess for j in jets], axis=-1)
        return cls(val, d, dd)

    @classmethod
    def from_scalar(cls, j: J.Jet2) -> "QJet":
        zero = J.Jet2(np.zeros_like(j.val), np.zeros_like(j.grad), None if j.hess is None else np.zeros_like(j.hess))
        return cls.from_components([j, zero, zero, zero])

    def cquat(self) -> CQuat:
        return CQuat.from_array(self.val)

    def partial_quat(self, k: int) -> CQuat:
        return CQuat.from_array(self.d[..., k, :])

    def __add__(self, other):
        dd = None if self.dd is None or other.dd is None else self.dd + other.dd
        return QJet(self.val + other.val, self.d + other.d, dd)

    def __sub__(self, other):
        dd = None if self.dd is None or other.dd is None else self.dd - other.dd
        return QJet(self.val - other.val, self.d - other.d, dd)

    def __neg__(self):
        return QJet(-self.val, -self.d, None if self.dd is None else -self.dd)

    def __mul__(self, other: "QJet") -> "QJet":
        a, b = self, other
        av, bv = a.val[..., None, :], b.val[..., None, :]
        d = qmul(a.d, bv) + qmul(av, b.d)
        dd = None
        if a.dd is not None and b.dd is not None:
            cross = qmul(a.d[..., :, None, :], b.d[..., None, :, :])
            dd = (
                qmul(a.dd, av[..., None, :])
                + qmul(av[..., None, :], b.dd)
                + cross
                + np.swapaxes(cross, -2, -3)
            )
        return QJet(qmul(a.val, b.val), d, dd)

    def scale(self, j: J.Jet2) -> "QJet":
        """Multiply by a complex scalar jet (commutes with every unit)."""
        return self * QJet.from_scalar(j)

    def dirac(self) -> "QJet":
        """``D q = sum_k i_k d_k q``; one order lower than ``self``."""
        val = sum(qmul(_UNITS[k], self.d[..., k, :]) for k in range(3))
        if self.dd is None:
            return QJet(val, np.full_like(self.d, np.nan))
        d = sum(qmul(_UNITS[k], self.dd[..., k, :, :]) for k in range(3))
        return QJet(val, d)

    def laplacian(self) -> np.ndarray:
        if self.dd is None:
            raise ValueError("first-order quaternion jet has no Laplacian")
        return self.dd[..., 0, 0, :] + self.dd[..., 1, 1, :] + self.dd[..., 2, 2, :]


# ---------------------------------------------------------------------------
# pointwise operators
# ---------------------------------------------------------------------------


def _points(points, region):
    p, _ = as_points(points)
    if region is not None:
        region.check(p)
    return p


def grad(u: ScalarField, points, region: Optional[Region] = None) -> CQuat:
    """``D u = grad u`` as a vectorial quaternion."""
    return CQuat.from_vector(u(_points(points, region)).grad)


def laplacian(u: ScalarField, points, region: Optional[Region] = None) -> np.ndarray:
    return u(_points(points, region)).laplacian()


def div(F: VectorField, points, region: Optional[Region] = None) -> np.ndarray:
    p = _points(points, region)
    return sum(F.components[k](p).grad[..., k] for k in range(3))


def rot(F: VectorField, points, region: Optional[Region] = None) -> CQuat:
    p = _points(points, region)
    g = [c(p).grad for c in F.components]  # g[i][..., j] = d_j F_i
    curl = np.stack(
        [g[2][..., 1] - g[1][..., 2], g[0][..., 2] - g[2][..., 0], g[1][..., 0] - g[0][..., 1]],
        axis=-1,
    )
    return CQuat.from_vector(curl)


def dirac(g, points, region: Optional[Region] = None) -> CQuat:
    """Moisil-Theodoresco operator applied to a scalar, vector or quaternion field."""
    p = _points(points, region)
    if isinstance(g, ScalarField):
        q = QJet.from_scalar(g(p))
    else:
        q = as_quat_field(g).qjet(p)
    return q.dirac().cquat()
