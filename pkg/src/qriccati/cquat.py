"""Complex quaternions H(C).

A :class:`CQuat` stores the coefficients of ``i0, i1, i2, i3`` as a complex
array whose last axis has length 4.  Leading axes are batch axes, so one
object can hold a single quaternion or a whole sample of them; every
operation broadcasts over the batch.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "CQuat",
    "qmul",
    "mul",
    "anticommutator",
    "sc",
    "vec",
    "conj",
    "norm_sq",
    "ONE",
    "I1",
    "I2",
    "I3",
    "BASIS",
    "MULTIPLICATION_TABLE",
    "table_mul",
]


def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Quaternion product of coefficient arrays (last axis = 4), broadcasting.

    Uses ``ab = a0 b0 - <a,b> + a0 b + b0 a + [a x b]``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    a0, av = a[..., 0], a[..., 1:]
    b0, bv = b[..., 0], b[..., 1:]
    s = a0 * b0 - np.sum(av * bv, axis=-1)
    v = a0[..., None] * bv + b0[..., None] * av + _cross(av, bv)
    return np.concatenate([s[..., None], v], axis=-1)


def _cross(a, b):
    # np.cross is slow and awkward with broadcasting of complex batches
    return np.stack(
        [
            a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
            a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
            a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
        ],
        axis=-1,
    )


class CQuat:
    """Immutable complex quaternion (or batch of them)."""

    __slots__ = ("_c",)

    def __init__(self, a0=0, a1=0, a2=0, a3=0):
        c = np.stack(np.broadcast_arrays(*map(np.asarray, (a0, a1, a2, a3))), axis=-1)
        self._set(c)

    def _set(self, c):
        c = np.array(c, dtype=complex)
        c.flags.writeable = False
        object.__setattr__(self, "_c", c)

    @classmethod
    def from_array(cls, c) -> "CQuat":
        c = np.asarray(c)
        if c.shape[-1:] != (4,):
            raise ValueError(f"last axis must have length 4, got shape {c.shape}")
        q = cls.__new__(cls)
        q._set(c)
        return q

    @classmethod
    def from_vector(cls, v) -> "CQuat":
        v = np.asarray(v, dtype=complex)
        return cls.from_array(np.concatenate([np.zeros(v.shape[:-1] + (1,), complex), v], axis=-1))

    def __setattr__(self, name, value):
        raise AttributeError("CQuat is immutable")

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def shape(self):
        return self._c.shape[:-1]

    def __getitem__(self, idx) -> "CQuat":
        if not self.shape:
            raise TypeError("scalar CQuat is not indexable")
        return CQuat.from_array(self._c[idx])

    def __len__(self):
        return self.shape[0]

    # --- scalar/vector split -------------------------------------------
    @property
    def a0(self):
        return self._c[..., 0]

    @property
    def vector(self) -> np.ndarray:
        return self._c[..., 1:]

    def sc(self) -> "CQuat":
        c = np.zeros_like(self._c)
        c[..., 0] = self._c[..., 0]
        return CQuat.from_array(c)

    def vec(self) -> "CQuat":
        c = self._c.copy()
        c[..., 0] = 0
        return CQuat.from_array(c)

    def conj(self) -> "CQuat":
        c = -self._c
        c[..., 0] = self._c[..., 0]
        return CQuat.from_array(c)

    def norm_sq(self):
        """``a * conj(a)``; complex-valued for complex coefficients."""
        return np.sum(self._c * self._c, axis=-1)

    def is_vector(self, atol=0.0) -> bool:
        return bool(np.all(np.abs(self._c[..., 0]) <= atol))

    # --- arithmetic ------------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, CQuat):
            return other._c
        other = np.asarray(other, dtype=complex)
        c = np.zeros(other.shape + (4,), complex)
        c[..., 0] = other
        return c

    def __add__(self, other):
        return CQuat.from_array(self._c + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return CQuat.from_array(self._c - self._coerce(other))

    def __rsub__(self, other):
        return CQuat.from_array(self._coerce(other) - self._c)

    def __neg__(self):
        return CQuat.from_array(-self._c)

    def __mul__(self, other):
        if isinstance(other, CQuat):
            return CQuat.from_array(qmul(self._c, other._c))
        return CQuat.from_array(self._c * np.asarray(other, dtype=complex)[..., None])

    def __rmul__(self, other):
        # scalars (complex or real arrays) commute with every i_k
        return CQuat.from_array(np.asarray(other, dtype=complex)[..., None] * self._c)

    def __truediv__(self, other):
        if isinstance(other, CQuat):
            raise TypeError("quaternion division is ambiguous; multiply by an inverse explicitly")
        return CQuat.from_array(self._c / np.asarray(other, dtype=complex)[..., None])

    def __eq__(self, other):
        if not isinstance(other, CQuat):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    __hash__ = None

    def isclose(self, other, rtol=1e-12, atol=1e-12) -> bool:
        return bool(np.allclose(self._c, self._coerce(other), rtol=rtol, atol=atol))

    def __repr__(self):
        if self.shape:
            return f"CQuat(shape={self.shape})"
        parts = ", ".join(_fmt(z) for z in self._c)
        return f"CQuat({parts})"


def _fmt(z):
    z = complex(z)
    return repr(z.real) if z.imag == 0 else repr(z)


ONE = CQuat(1, 0, 0, 0)
I1 = CQuat(0, 1, 0, 0)
I2 = CQuat(0, 0, 1, 0)
I3 = CQuat(0, 0, 0, 1)
BASIS = (ONE, I1, I2, I3)


def _build_table():
    # unit products i_j i_k = sign * i_m, written out from the defining rules
    t = {(0, k): (1, k) for k in range(4)}
    t.update({(k, 0): (1, k) for k in range(1, 4)})
    t.update({(k, k): (-1, 0) for k in range(1, 4)})
    for j, k, m in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        t[(j, k)] = (1, m)
        t[(k, j)] = (-1, m)
    return t


MULTIPLICATION_TABLE = _build_table()


def table_mul(a, b) -> np.ndarray:
    """Product by bilinear expansion over the unit table (reference oracle)."""
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), complex)
    for (j, k), (sign, m) in MULTIPLICATION_TABLE.items():
        out[..., m] += sign * a[..., j] * b[..., k]
    return out


def mul(a: CQuat, b: CQuat) -> CQuat:
    return a * b


def anticommutator(a: CQuat, b: CQuat) -> CQuat:
    return a * b + b * a


def sc(a: CQuat) -> CQuat:
    return a.sc()


def vec(a: CQuat) -> CQuat:
    return a.vec()


def conj(a: CQuat) -> CQuat:
    return a.conj()


def norm_sq(a: CQuat):
    return a.norm_sq()
