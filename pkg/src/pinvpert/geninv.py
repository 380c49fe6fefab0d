"""Generalized inverses and closed-form conversions to the Moore-Penrose inverse."""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .errors import ConstructionError, DimensionError, FormulaBreakdownError
from .graph_space import GraphSpace, make_graph_space
from .linalg_core import (
    CheckedSolver,
    as_mat,
    default_rank_tol,
    identity_like,
    numerical_rank,
    scaled_tol,
    spectral_norm,
    svd_split,
)

_MAX_DRAWS = 10


class PenroseResiduals(NamedTuple):
    """Spectral-norm residuals of the four Penrose equations."""

    txt: float
    xtx: float
    tx_hermitian: float
    xt_hermitian: float

    def max(self):
        return max(self)


@dataclass(frozen=True)
class GenInverseBundle:
    """A matrix ``T``, a (1,2)-inverse ``S`` and the idempotents built from them.

    ``P = I - S T`` projects onto ``ker T`` and ``Q = T S`` onto ``R(T)``, both
    generally oblique.
    """

    T: np.ndarray
    S: np.ndarray
    rank_tol: float
    tol: float
    P: np.ndarray = field(init=False)
    Q: np.ndarray = field(init=False)

    def __post_init__(self):
        m, n = self.T.shape
        object.__setattr__(self, "P", identity_like(n, self.T, self.S) - self.S @ self.T)
        object.__setattr__(self, "Q", self.T @ self.S)

    def violations(self):
        """Names of the bundle invariants that fail at ``tol``."""
        T, S, P, Q = self.T, self.S, self.P, self.Q
        m, n = T.shape
        nT, nS = spectral_norm(T), spectral_norm(S)
        bad = []
        if spectral_norm(T @ S @ T - T) > scaled_tol(nT * nT * nS, rtol=self.tol):
            bad.append("TST=T")
        if spectral_norm(S @ T @ S - S) > scaled_tol(nS * nS * nT, rtol=self.tol):
            bad.append("STS=S")
        if spectral_norm(P @ P - P) > scaled_tol(spectral_norm(P) ** 2, rtol=self.tol):
            bad.append("P^2=P")
        if spectral_norm(Q @ Q - Q) > scaled_tol(spectral_norm(Q) ** 2, rtol=self.tol):
            bad.append("Q^2=Q")
        rT = numerical_rank(T, self.rank_tol)
        rS = numerical_rank(S, self.rank_tol)
        # X = ker T (+) R(S) and Y = R(T) (+) ker S, counted by dimension.
        if (n - rT) + rS != n or rT + (m - rS) != m:
            bad.append("direct-sum dimensions")
        return bad


def make_bundle(T, S, rank_tol=None, tol=1e-9):
    T = as_mat(T, "T")
    S = as_mat(S, "S")
    if S.shape != T.shape[::-1]:
        raise DimensionError(f"S has shape {S.shape}, expected {T.shape[::-1]}")
    if rank_tol is None:
        rank_tol = default_rank_tol(T)
    return GenInverseBundle(T=T, S=S, rank_tol=float(rank_tol), tol=float(tol))


def random_geninv(T, seed=0, rank_tol=None, spread=1.0):
    """Random, generically non-Moore-Penrose (1,2)-inverse of `T`.

    ``S = (I + (I - T^dag T) Z1) T^dag (I + Z2 (I - T T^dag))`` with Gaussian
    ``Z1`` (n x n) and ``Z2`` (m x m) scaled by `spread`. Adding kernel
    components on the left and cokernel components on the right keeps both
    ``TST = T`` and ``STS = S``.
    """
    T = as_mat(T, "T")
    m, n = T.shape
    if rank_tol is None:
        rank_tol = default_rank_tol(T)
    split = svd_split(T, rank_tol)
    T_dag = split.pinv
    K = split.kernel_basis
    C = split.cokernel_basis
    rng = np.random.default_rng(seed)
    complex_ = np.iscomplexobj(T)

    def gauss(shape):
        Z = rng.standard_normal(shape)
        if complex_:
            Z = Z + 1j * rng.standard_normal(shape)
        return spread * Z

    for _ in range(_MAX_DRAWS):
        left = identity_like(n, T) + K @ (K.conj().T @ gauss((n, n)))
        right = identity_like(m, T) + (gauss((m, m)) @ C) @ C.conj().T
        bundle = make_bundle(T, left @ T_dag @ right, rank_tol)
        if not bundle.violations():
            return bundle
    raise ConstructionError(f"no valid generalized inverse after {_MAX_DRAWS} draws")


def penrose_residuals(T, X):
    """``(||TXT-T||, ||XTX-X||, ||(TX)^*-TX||, ||(XT)^*-XT||)``."""
    T = as_mat(T, "T")
    X = as_mat(X, "X")
    if X.shape != T.shape[::-1]:
        raise DimensionError(f"X has shape {X.shape}, expected {T.shape[::-1]}")
    TX = T @ X
    XT = X @ T
    return PenroseResiduals(
        spectral_norm(TX @ T - T),
        spectral_norm(XT @ X - X),
        spectral_norm(TX.conj().T - TX),
        spectral_norm(XT.conj().T - XT),
    )


def _domain_adjoint(P, W):
    if W is None:
        return P.conj().T
    # W^{-1} P^* W; W = I + T^*T is Hermitian positive definite.
    return sla.cho_solve(sla.cho_factor(W, check_finite=False), P.conj().T @ W, check_finite=False)


def mp_from_idempotents(S, P, Q, kernel_basis, max_cond, W=None, prefix=True):
    """Evaluate ``-P_{ker^perp} (I + P (I-P-P^*)^{-1}) S (I-Q-Q^*)^{-1}``.

    `P` is the domain idempotent onto the kernel, `Q` the codomain idempotent
    onto the range, `S` the generalized inverse. ``P^*`` is the adjoint for the
    weight `W` (standard when ``W is None``); ``Q^*`` is always standard.
    The ``P_{ker^perp}`` prefix uses the orthonormal `kernel_basis`.
    """
    n, m = S.shape
    mid_dom = identity_like(n, P) - P - _domain_adjoint(P, W)
    mid_cod = identity_like(m, Q) - Q - Q.conj().T
    cod = CheckedSolver(mid_cod, max_cond, "I-Q-Q*")
    dom = CheckedSolver(mid_dom, max_cond, "I-P-P*")
    Y = cod.right(S)
    X = -(Y + P @ dom.left(Y))
    if prefix and kernel_basis.shape[1]:
        X = X - kernel_basis @ (kernel_basis.conj().T @ X)
    return X


def _resolve_metric(metric, T):
    if isinstance(metric, GraphSpace):
        return metric.W
    if metric == "standard":
        return None
    if metric == "graph":
        return make_graph_space(T).W
    raise ValueError(f"metric must be 'standard', 'graph' or a GraphSpace, got {metric!r}")


def mp_from_geninv(bundle, metric="standard", prefix=True):
    """Moore-Penrose inverse of ``bundle.T`` from its generalized inverse.

    Parameters
    ----------
    bundle : GenInverseBundle
    metric : {"standard", "graph"} or GraphSpace
        Inner product on the domain used for the adjoint ``P^*``. ``"graph"``
        builds the graph space of ``bundle.T``.
    prefix : bool
        Apply the standard orthogonal projector onto ``ker(T)^perp``.

    Raises
    ------
    FormulaBreakdownError
        If ``I - P - P^*`` or ``I - Q - Q^*`` is singular beyond
        ``1 / rank_tol`` conditioning.
    """
    W = _resolve_metric(metric, bundle.T)
    K = svd_split(bundle.T, bundle.rank_tol).kernel_basis
    return mp_from_idempotents(bundle.S, bundle.P, bundle.Q, K, 1.0 / bundle.rank_tol, W=W, prefix=prefix)


class ProductFactors(NamedTuple):
    A_dag: np.ndarray
    B_dag: np.ndarray
    X_dag: np.ndarray
    braced: np.ndarray
    condition: float


def _check_product(A, B, rank_tol):
    A = as_mat(A, "A")
    B = as_mat(B, "B")
    if A.shape[1] != B.shape[0]:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    if rank_tol is None:
        rank_tol = max(default_rank_tol(A), default_rank_tol(B))
    return A, B, rank_tol


def product_factors(A, B, rank_tol=None):
    """Pieces of the product formula, including the braced factor's 2-norm condition."""
    A, B, rank_tol = _check_product(A, B, rank_tol)
    A_dag = svd_split(A, rank_tol).pinv
    B_dag = svd_split(B, rank_tol).pinv
    X = A_dag @ A @ B @ B_dag
    X_dag = svd_split(X, rank_tol).pinv
    XX = X @ X_dag
    braced = A @ XX @ A_dag + A_dag.conj().T @ XX @ A.conj().T - identity_like(A.shape[0], A)
    s = np.linalg.svd(braced, compute_uv=False)
    cond = float("inf") if s[-1] == 0 else float(s[0] / s[-1])
    return ProductFactors(A_dag, B_dag, X_dag, braced, cond)


def mp_of_product(A, B, rank_tol=None, max_cond=None):
    """Moore-Penrose inverse of ``A B`` by the product formula.

    ``(AB)^dag = P_{ker(AB)^perp} B^dag X^dag A^dag {A X X^dag A^dag
    + (A^dag)^* X X^dag A^* - I}^{-1}`` with ``X = A^dag A B B^dag``; the inner
    pseudoinverses come from the SVD oracle.

    Raises
    ------
    FormulaBreakdownError
        When the braced factor's condition number exceeds `max_cond`
        (default ``1 / rank_tol``); the exception carries the condition number.
    """
    A, B, rank_tol = _check_product(A, B, rank_tol)
    if max_cond is None:
        max_cond = 1.0 / rank_tol
    f = product_factors(A, B, rank_tol)
    if not np.isfinite(f.condition) or f.condition > max_cond:
        raise FormulaBreakdownError(
            f"braced factor is ill conditioned (cond_2 = {f.condition:.3e})",
            condition=f.condition,
            factor="braced",
        )
    core = f.B_dag @ f.X_dag @ f.A_dag
    K = svd_split(A @ B, rank_tol).kernel_basis
    core = core - K @ (K.conj().T @ core)
    return CheckedSolver(f.braced, max_cond, "braced").right(core)
