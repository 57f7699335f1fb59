"""Uniform Cartesian grids, finite-difference jets and the transport solver.

The solver discretises ``div(exp(2 xi) grad Psi) = 0`` with the flux-form
7-point stencil (face coefficient = arithmetic mean of the nodal values),
takes Dirichlet data on all six faces and solves the resulting symmetric
positive-definite system with unpreconditioned conjugate gradients.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from . import jet as J
from .errors import BoundaryNode, NodeInExcludedSet, NonPositiveCoefficient, NotConverged, QueryOffNode
from .fields import Region, ScalarField

__all__ = [
    "Grid3",
    "TransportProblem",
    "sample",
    "fd_jet",
    "grid_to_field",
    "assemble",
    "conjugate_gradient",
    "transport_solve",
    "box_flux",
    "write_csv",
]


@dataclass(frozen=True)
class Grid3:
    box: tuple
    n: tuple
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        box = tuple(float(b) for b in self.box)
        n = tuple(int(k) for k in (self.n if np.ndim(self.n) else (self.n,) * 3))
        if len(box) != 6 or len(n) != 3:
            raise ValueError("Grid3 needs six box bounds and three node counts")
        if min(n) < 3:
            raise ValueError(f"need at least 3 nodes per axis, got {n}")
        for k in range(3):
            if not box[2 * k] < box[2 * k + 1]:
                raise ValueError(f"empty extent along axis {k + 1}")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "n", n)
        if self.values is not None:
            vals = np.asarray(self.values, dtype=complex)
            if vals.size != n[0] * n[1] * n[2]:
                raise ValueError(f"expected {n[0] * n[1] * n[2]} values, got {vals.size}")
            vals = vals.reshape(n)
            vals.flags.writeable = False
            object.__setattr__(self, "values", vals)

    @property
    def h(self) -> np.ndarray:
        return np.array([(self.box[2 * k + 1] - self.box[2 * k]) / (self.n[k] - 1) for k in range(3)])

    def axis(self, k: int) -> np.ndarray:
        """Node coordinates along 0-based axis ``k``; corners are reproduced exactly."""
        return np.linspace(self.box[2 * k], self.box[2 * k + 1], self.n[k])

    def nodes(self) -> np.ndarray:
        """Coordinates of every node, shape ``(n1, n2, n3, 3)``."""
        return np.stack(np.meshgrid(self.axis(0), self.axis(1), self.axis(2), indexing="ij"), axis=-1)

    def interior_mask(self) -> np.ndarray:
        m = np.zeros(self.n, bool)
        m[1:-1, 1:-1, 1:-1] = True
        return m

    def with_values(self, values) -> "Grid3":
        return Grid3(self.box, self.n, values)

    @property
    def region(self) -> Region:
        return Region(self.box)


def sample(field: ScalarField, grid: Grid3, region: Optional[Region] = None) -> Grid3:
    """Evaluate ``field`` at every node."""
    pts = grid.nodes()
    if region is not None:
        bad = ~region.contains(pts)
        if np.any(bad):
            raise NodeInExcludedSet(np.argwhere(bad))
    return grid.with_values(field(pts).val)


def fd_jet(grid: Grid3, node) -> J.Jet2:
    """Central-difference jet at interior node(s) ``(i, j, k)`` or an ``(M, 3)`` index array."""
    if grid.values is None:
        raise ValueError("grid has no values")
    idx = np.asarray(node, dtype=int)
    single = idx.ndim == 1
    idx = np.atleast_2d(idx)
    n = np.array(grid.n)
    if np.any(idx < 1) or np.any(idx > n - 2):
        raise BoundaryNode(f"finite-difference jets need a one-node margin; got {idx[np.any((idx < 1) | (idx > n - 2), axis=1)][0]}")
    f = grid.values
    h = grid.h
    e = np.eye(3, dtype=int)

    def at(offset):
        q = idx + offset
        return f[q[:, 0], q[:, 1], q[:, 2]]

    f0 = at(0)
    grad = np.empty((len(idx), 3), complex)
    hess = np.empty((len(idx), 3, 3), complex)
    for a in range(3):
        fp, fm = at(e[a]), at(-e[a])
        grad[:, a] = (fp - fm) / (2 * h[a])
        hess[:, a, a] = (fp - 2 * f0 + fm) / h[a] ** 2
        for b in range(a + 1, 3):
            mixed = (at(e[a] + e[b]) - at(e[a] - e[b]) - at(e[b] - e[a]) + at(-e[a] - e[b])) / (4 * h[a] * h[b])
            hess[:, a, b] = hess[:, b, a] = mixed
    jet = J.Jet2(f0, grad, hess)
    return jet[0] if single else jet


def grid_to_field(grid: Grid3, snap: float = 0.5) -> ScalarField:
    """Node-snapped field whose jets come from :func:`fd_jet`.

    The distance to the nearest node is measured in units of the spacing
    (``sqrt(sum((dx_k / h_k)^2))``); beyond ``snap`` the query raises
    :class:`QueryOffNode`.  Queries snapping to a boundary node raise
    :class:`BoundaryNode`.
    """
    lo = np.array(grid.box[0::2])
    h = grid.h

    def fn(p):
        p = np.asarray(p, dtype=float)
        shape = p.shape[:-1]
        flat = p.reshape(-1, 3)
        s = (flat - lo) / h
        idx = np.rint(s).astype(int)
        dist = np.sqrt(np.sum((s - idx) ** 2, axis=-1))
        bad = (dist > snap) | np.any(idx < 0, axis=-1) | np.any(idx > np.array(grid.n) - 1, axis=-1)
        if np.any(bad):
            raise QueryOffNode(f"query farther than {snap} h from any node, e.g. {flat[bad][0]}")
        jet = fd_jet(grid, idx)
        return J.Jet2(jet.val.reshape(shape), jet.grad.reshape(shape + (3,)), jet.hess.reshape(shape + (3, 3)))

    return ScalarField(fn, f"grid{grid.n}")


@dataclass(frozen=True)
class TransportProblem:
    xi: ScalarField
    grid: Grid3
    boundary: ScalarField

    def coefficient(self) -> np.ndarray:
        """``exp(2 xi)`` at every node; must be real and positive."""
        xi = self.xi(self.grid.nodes()).val
        if np.any(xi.imag != 0):
            raise NonPositiveCoefficient("complex xi gives a complex coefficient; the grid solver needs a real one")
        kappa = np.exp(2 * xi.real)
        if not np.all(kappa > 0):
            raise NonPositiveCoefficient(f"coefficient not positive (min {kappa.min():.3g})")
        return kappa


def assemble(problem: TransportProblem):
    """System ``A psi = b`` for the interior unknowns (row-major order).

    Returns ``(A, b, boundary_values)``; ``A`` is the negated flux-form
    stencil, symmetric positive definite for a positive coefficient.
    """
    g = problem.grid
    h = g.h
    kappa = problem.coefficient()
    bvals = problem.boundary(g.nodes()).val
    if not np.all(np.isfinite(bvals)):
        raise ValueError("boundary values must be finite")
    interior = g.interior_mask()
    number = -np.ones(g.n, dtype=np.int64)
    number[interior] = np.arange(int(interior.sum()))
    ii = np.argwhere(interior)
    rows_c = number[tuple(ii.T)]
    m = len(ii)

    diag = np.zeros(m)
    rhs = np.zeros(m, complex)
    rows, cols, data = [], [], []
    for a in range(3):
        for step in (1, -1):
            nb = ii.copy()
            nb[:, a] += step
            k_face = 0.5 * (kappa[tuple(ii.T)] + kappa[tuple(nb.T)])
            w = k_face / h[a] ** 2
            diag += w
            nb_num = number[tuple(nb.T)]
            inner = nb_num >= 0
            rows.append(rows_c[inner])
            cols.append(nb_num[inner])
            data.append(-w[inner])
            rhs[~inner] += w[~inner] * bvals[tuple(nb[~inner].T)]
    rows.append(rows_c)
    cols.append(rows_c)
    data.append(diag)
    A = sp.csr_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(m, m))
    asym = abs(A - A.T)
    assert asym.nnz == 0 or asym.max() == 0, "transport matrix is not symmetric"
    if not np.any(rhs.imag):
        rhs = rhs.real
    return A, rhs, bvals


def conjugate_gradient(A, b, tol: float = 1e-10, max_iters: Optional[int] = None, x0=None):
    """Plain CG to relative residual ``||b - A x|| <= tol ||b||``.

    Returns ``(x, iterations, relative_residual)``.
    """
    b = np.asarray(b)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=b.dtype)
    max_iters = 10 * len(b) if max_iters is None else max_iters
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return np.zeros_like(b), 0, 0.0
    r = b - A @ x
    p = r.copy()
    rr = np.vdot(r, r).real
    for it in range(max_iters + 1):
        rel = np.sqrt(rr) / bnorm
        if rel <= tol:
            return x, it, float(rel)
        if it == max_iters:
            break
        Ap = A @ p
        alpha = rr / np.vdot(p, Ap).real
        x = x + alpha * p
        r = r - alpha * Ap
        rr_new = np.vdot(r, r).real
        p = r + (rr_new / rr) * p
        rr = rr_new
    raise NotConverged(max_iters, float(rel))


def transport_solve(problem: TransportProblem, tol: float = 1e-10, max_iters: Optional[int] = None) -> Grid3:
    """Solve ``div(exp(2 xi) grad Psi) = 0`` with Dirichlet data; returns Psi on all nodes."""
    g = problem.grid
    A, b, bvals = assemble(problem)
    if max_iters is None:
        max_iters = 10 * g.n[0] * g.n[1] * g.n[2]
    x, _, _ = conjugate_gradient(A, b, tol, max_iters)
    psi = np.array(bvals, dtype=complex)
    psi[g.interior_mask()] = x
    return g.with_values(psi)


def box_flux(problem: TransportProblem, psi: Grid3, lo, hi, absolute: bool = False):
    """Net outward flux of ``exp(2 xi) grad Psi`` through the faces of the node box ``lo..hi``.

    ``lo``/``hi`` are inclusive node indices; the box must lie in the interior.
    Each face flux is ``k_face (Psi_out - Psi_in) / h_a`` times the face area.
    With ``absolute=True`` the magnitudes of the face fluxes are summed
    instead, giving the gross flux that sets the scale of the net value.
    """
    g = psi
    kappa = problem.coefficient()
    v = psi.values
    h = g.h
    lo, hi = np.asarray(lo), np.asarray(hi)
    if np.any(lo < 1) or np.any(hi > np.array(g.n) - 2) or np.any(lo > hi):
        raise BoundaryNode("flux box must be a non-empty set of interior nodes")
    total = 0j
    for a in range(3):
        area = np.prod(np.delete(h, a))
        for face, step in ((lo[a], -1), (hi[a], 1)):
            sl = [slice(lo[b], hi[b] + 1) for b in range(3)]
            sl[a] = slice(face, face + 1)
            nb = list(sl)
            nb[a] = slice(face + step, face + step + 1)
            k_face = 0.5 * (kappa[tuple(sl)] + kappa[tuple(nb)])
            face_flux = k_face * (v[tuple(nb)] - v[tuple(sl)]) / h[a] * area
            total += np.sum(np.abs(face_flux)) if absolute else np.sum(face_flux)
    return float(total.real) if absolute else complex(total)


def write_csv(grid: Grid3, dest=None) -> str:
    """CSV dump ``x1,x2,x3,re,im``, one node per row, x3 varying fastest."""
    if grid.values is None:
        raise ValueError("grid has no values")
    pts = grid.nodes().reshape(-1, 3)
    vals = grid.values.reshape(-1)
    buf = io.StringIO()
    buf.write("x1,x2,x3,re,im\n")
    for (x1, x2, x3), z in zip(pts.tolist(), vals.tolist()):
        buf.write(f"{x1!r},{x2!r},{x3!r},{z.real!r},{z.imag!r}\n")
    text = buf.getvalue()
    if dest is not None:
        if hasattr(dest, "write"):
            dest.write(text)
        else:
            with open(dest, "w", newline="") as fh:
                fh.write(text)
    return text
