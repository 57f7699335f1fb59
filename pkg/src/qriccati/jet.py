"""Second-order forward-mode jets over R^3.

A :class:`Jet2` carries the value, gradient and Hessian of a complex scalar
at one or more points.  ``val`` has the batch shape ``S``, ``grad`` has shape
``S + (3,)`` and ``hess`` has shape ``S + (3, 3)``.

``hess`` may be ``None``: such a jet is exact only through first order.
Fields that are themselves derivatives of other fields (components of a
gradient or of a logarithmic derivative) evaluate to truncated jets, which is
all the first-order operators D, div and rot need.
"""

from __future__ import annotations

import numpy as np

from .errors import DivisionNearZero, DomainError

__all__ = ["Jet2", "DEFAULT_FLOOR", "seed", "constant", "jet_arith", "jet_func"]

DEFAULT_FLOOR = 1e-30


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


def _sym(h):
    # exact symmetry regardless of how the backend fuses complex products
    return 0.5 * (h + np.swapaxes(h, -1, -2))


class Jet2:
    __slots__ = ("val", "grad", "hess")

    def __init__(self, val, grad, hess=None):
        self.val = np.asarray(val, dtype=complex)
        self.grad = np.asarray(grad, dtype=complex)
        self.hess = None if hess is None else np.asarray(hess, dtype=complex)
        if self.grad.shape != self.val.shape + (3,):
            raise ValueError(f"grad shape {self.grad.shape} does not match value shape {self.val.shape}")
        if self.hess is not None:
            if self.hess.shape != self.val.shape + (3, 3):
                raise ValueError(f"hess shape {self.hess.shape} does not match value shape {self.val.shape}")
            assert np.array_equal(self.hess, np.swapaxes(self.hess, -1, -2), equal_nan=True), "asymmetric Hessian"

    @property
    def shape(self):
        return self.val.shape

    @property
    def order(self) -> int:
        return 1 if self.hess is None else 2

    def laplacian(self):
        if self.hess is None:
            raise ValueError("jet truncated to first order has no Hessian")
        return np.trace(self.hess, axis1=-2, axis2=-1)

    def truncated(self) -> "Jet2":
        return Jet2(self.val, self.grad)

    def partial(self, k: int) -> "Jet2":
        """Jet of the k-th partial derivative (one order lower)."""
        if self.hess is None:
            raise ValueError("cannot differentiate a first-order jet")
        return Jet2(self.grad[..., k], self.hess[..., k, :])

    def __getitem__(self, idx) -> "Jet2":
        hess = None if self.hess is None else self.hess[idx]
        return Jet2(self.val[idx], self.grad[idx], hess)

    # --- arithmetic ------------------------------------------------------
    def __add__(self, other):
        return jet_arith(self, other, "add")

    def __radd__(self, other):
        return jet_arith(constant(other, self.shape), self, "add")

    def __sub__(self, other):
        return jet_arith(self, other, "sub")

    def __rsub__(self, other):
        return jet_arith(constant(other, self.shape), self, "sub")

    def __mul__(self, other):
        return jet_arith(self, other, "mul")

    def __rmul__(self, other):
        return jet_arith(constant(other, self.shape), self, "mul")

    def __truediv__(self, other):
        return jet_arith(self, other, "div")

    def __rtruediv__(self, other):
        return jet_arith(constant(other, self.shape), self, "div")

    def __neg__(self):
        hess = None if self.hess is None else -self.hess
        return Jet2(-self.val, -self.grad, hess)

    def __pow__(self, p):
        return jet_func(self, "pow", p)

    def __repr__(self):
        return f"Jet2(val={self.val!r}, grad={self.grad!r}, order={self.order})"


def seed(points: np.ndarray, k: int) -> Jet2:
    """Jet of the coordinate x_k (0-based) at ``points`` of shape ``S + (3,)``."""
    points = np.asarray(points, dtype=float)
    shape = points.shape[:-1]
    grad = np.zeros(shape + (3,), complex)
    grad[..., k] = 1.0
    return Jet2(points[..., k], grad, np.zeros(shape + (3, 3), complex))


def constant(c, shape=()) -> Jet2:
    val = np.broadcast_to(np.asarray(c, dtype=complex), shape)
    return Jet2(val, np.zeros(val.shape + (3,), complex), np.zeros(val.shape + (3, 3), complex))


def _as_jet(x, shape):
    return x if isinstance(x, Jet2) else constant(x, shape)


def _check_floor(val, floor, what):
    bad = np.abs(val) < floor
    if np.any(bad):
        raise DivisionNearZero(f"{what}: |value| below floor {floor:g} (min |value| = {np.abs(val).min():.3g})")


def jet_arith(a: Jet2, b: Jet2, op: str, floor: float = DEFAULT_FLOOR) -> Jet2:
    """Add, subtract, multiply or divide two jets with exact second-order propagation."""
    a = _as_jet(a, getattr(b, "shape", ()))
    b = _as_jet(b, a.shape)
    both = a.hess is not None and b.hess is not None
    if op == "add":
        return Jet2(a.val + b.val, a.grad + b.grad, a.hess + b.hess if both else None)
    if op == "sub":
        return Jet2(a.val - b.val, a.grad - b.grad, a.hess - b.hess if both else None)
    if op == "mul":
        av, bv = a.val[..., None], b.val[..., None]
        hess = None
        if both:
            hess = _sym(
                a.hess * bv[..., None]
                + b.hess * av[..., None]
                + _outer(a.grad, b.grad)
                + _outer(b.grad, a.grad)
            )
        return Jet2(a.val * b.val, a.grad * bv + b.grad * av, hess)
    if op == "div":
        _check_floor(b.val, floor, "division")
        return jet_arith(a, jet_func(b, "recip", floor=floor), "mul")
    raise ValueError(f"unknown jet operation {op!r}")


def _chain(a: Jet2, f0, f1, f2) -> Jet2:
    grad = f1[..., None] * a.grad
    hess = None
    if a.hess is not None:
        hess = _sym(f2[..., None, None] * _outer(a.grad, a.grad) + f1[..., None, None] * a.hess)
    return Jet2(f0, grad, hess)


def jet_func(a: Jet2, f: str, p=None, floor: float = DEFAULT_FLOOR) -> Jet2:
    """Apply an elementary function through second order (principal branches).

    ``p`` is the exponent for ``f="pow"``.
    """
    x = a.val
    if f == "exp":
        e = np.exp(x)
        return _chain(a, e, e, e)
    if f == "log":
        if np.any(np.abs(x) < floor):
            raise DomainError("log", _worst(x))
        r = 1.0 / x
        return _chain(a, np.log(x), r, -r * r)
    if f == "sin":
        s, c = np.sin(x), np.cos(x)
        return _chain(a, s, c, -s)
    if f == "cos":
        s, c = np.sin(x), np.cos(x)
        return _chain(a, c, -s, -c)
    if f == "tanh":
        t = np.tanh(x)
        d = 1.0 - t * t
        return _chain(a, t, d, -2.0 * t * d)
    if f == "recip":
        if np.any(np.abs(x) < floor):
            raise DomainError("recip", _worst(x))
        r = 1.0 / x
        return _chain(a, r, -r * r, 2.0 * r * r * r)
    if f == "sqrt":
        if np.any(np.abs(x) < floor):
            raise DomainError("sqrt", _worst(x))
        s = np.sqrt(x)
        return _chain(a, s, 0.5 / s, -0.25 / (s * x))
    if f == "pow":
        if p is None:
            raise ValueError("pow needs an exponent")
        if _is_nonneg_int(p):
            n = int(np.real(p))
            zero = np.zeros_like(x)
            f1 = n * x ** (n - 1) if n >= 1 else zero
            f2 = n * (n - 1) * x ** (n - 2) if n >= 2 else zero
            return _chain(a, x**n, f1, f2)
        if np.any(np.abs(x) < floor):
            raise DomainError("pow", _worst(x))
        return _chain(a, np.power(x, p), p * np.power(x, p - 1), p * (p - 1) * np.power(x, p - 2))
    raise ValueError(f"unknown jet function {f!r}")


def _is_nonneg_int(p):
    return np.imag(p) == 0 and float(np.real(p)).is_integer() and np.real(p) >= 0


def _worst(x):
    x = np.atleast_1d(x)
    return complex(x.flat[np.argmin(np.abs(x))])
