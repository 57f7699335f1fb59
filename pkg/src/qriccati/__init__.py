"""Construction and verification of solutions of the quaternionic Riccati
equation ``D f + f^2 = v`` over complex quaternions."""

from .constructors import (
    RiccatiPair,
    anticommutator_potential,
    axis_pair,
    eikonal_solution,
    euler_one,
    euler_two,
    from_schrodinger,
    harmonic_to_homogeneous,
    separable,
)
from .cquat import I1, I2, I3, ONE, CQuat
from .fields import X1, X2, X3, QuatField, Region, ScalarField, VectorField
from .jet import Jet2
from .verify import ResidualReport, factorization_check, riccati_residual, scalar_form_residual, schrodinger_residual

__version__ = "0.1.0"
