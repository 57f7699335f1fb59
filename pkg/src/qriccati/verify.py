"""Residual oracles for the Riccati PDE ``D f + f^2 = v`` and its companions.

Every check evaluates the defining identity pointwise with exact jet
derivatives and summarises the defect in a :class:`ResidualReport`.  Reports
use the real norm ``sqrt(sum |c_k|^2)`` over all four complex coefficients,
which stays positive for complex quaternions.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .fields import QJet, QuatField, Region, ScalarField, VectorField, as_points, as_quat_field

__all__ = [
    "ResidualReport",
    "quat_norm",
    "riccati_defect",
    "riccati_residual",
    "scalar_form_residual",
    "schrodinger_residual",
    "factorization_defect",
    "factorization_check",
]


def quat_norm(c) -> np.ndarray:
    """Real norm of quaternion coefficient arrays (last axis 4)."""
    return np.sqrt(np.sum(np.abs(np.asarray(c)) ** 2, axis=-1))


@dataclass(frozen=True)
class ResidualReport:
    sup_norm: float
    l2_norm: float
    n_points: int
    scalar_part_sup: float
    vector_part_sup: float
    worst_point: tuple
    provenance: str
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["worst_point"] = list(self.worst_point)
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    @classmethod
    def from_defect(cls, defect, points, provenance="", seed=None) -> "ResidualReport":
        """Summarise pointwise quaternion defects (shape ``(N, 4)``)."""
        defect = np.atleast_2d(defect)
        points = np.atleast_2d(points)
        total = quat_norm(defect)
        scalar = np.abs(defect[:, 0])
        vector = quat_norm(defect[:, 1:])
        worst = int(np.argmax(total))
        return cls(
            sup_norm=float(total.max()),
            l2_norm=float(np.sqrt(np.sum(total**2))),
            n_points=len(total),
            scalar_part_sup=float(scalar.max()),
            vector_part_sup=float(vector.max()),
            worst_point=tuple(float(x) for x in points[worst]),
            provenance=provenance,
            seed=seed,
        )

    def passed(self, tol: float) -> bool:
        return self.sup_norm <= tol


def _scalar_as_quat(z):
    z = np.asarray(z, complex)
    out = np.zeros(z.shape + (4,), complex)
    out[..., 0] = z
    return out


def riccati_defect(f: VectorField, v: ScalarField, points) -> np.ndarray:
    """Pointwise ``D f + f^2 - v`` as coefficient array ``(..., 4)``."""
    p, _ = as_points(points)
    q = f.qjet(p)
    return q.dirac().val + (q * q).val - _scalar_as_quat(v(p).val)


def riccati_residual(pair, points) -> ResidualReport:
    """Residual of a constructed pair on points of its valid region."""
    p, seed = as_points(points)
    pair.valid_region.check(p)
    defect = riccati_defect(pair.f, pair.v, p)
    return ResidualReport.from_defect(defect, p, pair.provenance, seed)


def _check(points, region):
    p, seed = as_points(points)
    if region is not None:
        region.check(p)
    return p, seed


def scalar_form_residual(phi: ScalarField, v: ScalarField, points, region: Optional[Region] = None,
                         provenance: str = "scalar form") -> ResidualReport:
    """``|lap phi + <grad phi, grad phi> + v|`` (bilinear inner product)."""
    p, seed = _check(points, region)
    j = phi(p)
    r = j.laplacian() + np.sum(j.grad * j.grad, axis=-1) + v(p).val
    return ResidualReport.from_defect(_scalar_as_quat(r), p, provenance, seed)


def schrodinger_residual(phi: ScalarField, v: ScalarField, points, region: Optional[Region] = None,
                         provenance: str = "schrodinger") -> ResidualReport:
    """``|lap phi + v phi|``."""
    p, seed = _check(points, region)
    j = phi(p)
    r = j.laplacian() + v(p).val * j.val
    return ResidualReport.from_defect(_scalar_as_quat(r), p, provenance, seed)


def factorization_defect(f: VectorField, v: ScalarField, g, points) -> np.ndarray:
    """Pointwise ``(D + M^f)(D - M^f) g - (-lap g - v g)``, with ``M^f q = q f``."""
    p, _ = as_points(points)
    G = as_quat_field(g).qjet(p)
    F = f.qjet(p)
    inner = G.dirac() - G * F
    lhs = inner.dirac().val + (inner * F).val
    rhs = -G.laplacian() - v(p).val[..., None] * G.val
    return lhs - rhs


def factorization_check(pair, g: QuatField, points) -> float:
    """Sup over points of the factorization defect for test function ``g``."""
    p, _ = as_points(points)
    pair.valid_region.check(p)
    return float(np.max(quat_norm(factorization_defect(pair.f, pair.v, g, p))))
