"""Least-squares solution sets under perturbation of both operator and data."""

from dataclasses import dataclass, field

import numpy as np

from .errors import NotStableError
from .linalg_core import Subspace, as_vec, spectral_norm, svd_split
from .perturb import GOLDEN, BoundRow

MEMBERSHIP_RTOL = 1e-9


@dataclass(frozen=True)
class LsqProblem:
    inst: object
    b: np.ndarray
    db: np.ndarray
    bbar: np.ndarray = field(init=False)

    def __post_init__(self):
        m = self.inst.shape[0]
        object.__setattr__(self, "b", as_vec(self.b, m, "b"))
        object.__setattr__(self, "db", as_vec(self.db, m, "db"))
        object.__setattr__(self, "bbar", self.b + self.db)


def make_problem(inst, b, db=None):
    if db is None:
        db = np.zeros(inst.shape[0])
    return LsqProblem(inst=inst, b=b, db=db)


@dataclass(frozen=True)
class SolutionSet:
    """Affine set ``particular + span(kernel_basis)`` of least-squares solutions."""

    particular: np.ndarray
    kernel_basis: Subspace

    def point(self, coeffs):
        return self.particular + self.kernel_basis.basis @ np.asarray(coeffs)


@dataclass(frozen=True)
class SolutionPair:
    """A solution ``x`` of the unperturbed problem, its partner ``xbar`` of the
    perturbed one, the bound relating them, and both normal-equation residuals."""

    x: np.ndarray
    xbar: np.ndarray
    bound: BoundRow
    residual_x: float
    residual_xbar: float
    tol_x: float
    tol_xbar: float

    @property
    def members(self):
        return self.residual_x <= self.tol_x and self.residual_xbar <= self.tol_xbar


def normal_residual(T, x, b):
    """``||T^* (T x - b)||``; zero exactly on the least-squares solution set."""
    return float(np.linalg.norm(T.conj().T @ (T @ x - b)))


def membership_tol(T, b, norm_T=None):
    """``1e-9 (1 + ||T|| ||b||)``; pass `norm_T` when it is already known."""
    if norm_T is None:
        norm_T = spectral_norm(T)
    return MEMBERSHIP_RTOL * (1.0 + norm_T * np.linalg.norm(b))


def min_norm_solution(T, b, rank_tol=None):
    split = svd_split(T, rank_tol)
    b = as_vec(b, split.shape[0], "b")
    kernel = Subspace(split.shape[1], split.kernel_basis, split.rank_tol)
    return SolutionSet(particular=split.pinv @ b, kernel_basis=kernel)


def _require_stable(p):
    preds = p.inst.predicates
    if not preds.all_true:
        raise NotStableError(f"perturbation is not stable (predicates {preds.flags})")


def _pair(p, x, xbar, bound):
    inst = p.inst
    return SolutionPair(
        x=x,
        xbar=xbar,
        bound=bound,
        residual_x=normal_residual(inst.T, x, p.b),
        residual_xbar=normal_residual(inst.Tbar, xbar, p.bbar),
        tol_x=membership_tol(inst.T, p.b, inst.norm_T),
        tol_xbar=membership_tol(inst.Tbar, p.bbar, inst.norm_Tbar),
    )


def forward_pair(p, z):
    """From ``x = T^dag b + (I - T^dag T) z`` build its perturbed partner
    ``xbar = Tbar^dag bbar + (I - Tbar^dag Tbar) x``, with
    ``||xbar - x|| <= ||Tbar^dag|| ||(b - T x) + (db - dT x)||``."""
    _require_stable(p)
    inst = p.inst
    z = as_vec(z, inst.shape[1], "z")
    Td, Tbd = inst.T_dag, inst.Tbar_dag
    x = Td @ p.b + (z - Td @ (inst.T @ z))
    xbar = Tbd @ p.bbar + (x - Tbd @ (inst.Tbar @ x))
    rhs = inst.norm_Tbar_dag * np.linalg.norm((p.b - inst.T @ x) + (p.db - inst.dT @ x))
    return _pair(p, x, xbar, BoundRow("forward_solution", float(np.linalg.norm(xbar - x)), float(rhs)))


def backward_pair(p, z):
    """From ``xbar = Tbar^dag bbar + (I - Tbar^dag Tbar) z`` build
    ``x = T^dag b + (I - T^dag T) xbar``, with
    ``||xbar - x|| <= ||T^dag|| ||(bbar - Tbar xbar) - (db - dT xbar)||``."""
    _require_stable(p)
    inst = p.inst
    z = as_vec(z, inst.shape[1], "z")
    Td, Tbd = inst.T_dag, inst.Tbar_dag
    xbar = Tbd @ p.bbar + (z - Tbd @ (inst.Tbar @ z))
    x = Td @ p.b + (xbar - Td @ (inst.T @ xbar))
    rhs = inst.norm_T_dag * np.linalg.norm((p.bbar - inst.Tbar @ xbar) - (p.db - inst.dT @ xbar))
    return _pair(p, x, xbar, BoundRow("backward_solution", float(np.linalg.norm(xbar - x)), float(rhs)))


def solution_bounds(p):
    """Bounds on ``||Tbar^dag bbar - T^dag b||``.

    ``lstsq_printed`` carries ``(1 + ||T^dag||^2)^{1/2}`` in its second term and
    is recorded only. ``lstsq_safe`` carries the full power
    ``(1 + ||T^dag||^2)``, which is what chaining the norm bound for
    ``||Tbar^dag||`` into the difference bound yields; it is the asserted row.
    """
    _require_stable(p)
    inst = p.inst
    lhs = float(np.linalg.norm(inst.Tbar_dag @ p.bbar - inst.T_dag @ p.b))
    nTd2 = inst.norm_T_dag ** 2
    inv = inst.inv_norm
    dTn = inst.dT_T_norm
    nb, ndb = np.linalg.norm(p.b), np.linalg.norm(p.db)
    first = inv * np.sqrt(nTd2 + 1.0) * ndb
    printed = first + GOLDEN * inv * dTn * np.sqrt(1.0 + nTd2) * nb
    safe = first + GOLDEN * inv * dTn * (1.0 + nTd2) * nb
    return (
        BoundRow("lstsq_printed", lhs, float(printed), asserted=False),
        BoundRow("lstsq_safe", lhs, float(safe)),
    )
