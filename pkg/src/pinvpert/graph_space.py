"""Graph inner product on the domain of ``T`` and the operator norms it induces.

The domain with ``(x, y)_T = (x, y) + (Tx, Ty)`` is the same coordinate space
as the original one, carrying the Gram matrix ``W = I + T^* T``.  Changing
metric is multiplication by ``W^{+-1/2}``: for an operator ``dT`` leaving the
graph space, ``||dT||_T = ||dT W^{-1/2}||``, and for an operator ``S`` landing
in it, ``||S||_T = ||W^{1/2} S||``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionError, InvalidInputError
from .linalg_core import (
    ATOL,
    as_mat,
    as_vec,
    default_rank_tol,
    hermitian_sqrt,
    identity_like,
    spectral_norm,
)

# Relative slack in the sampled T-boundedness inequality.
CERT_RTOL = 1e-10
_EXTREMAL_DIRECTIONS = 8


@dataclass(frozen=True)
class GraphSpace:
    T: np.ndarray
    W: np.ndarray
    W_half: np.ndarray
    W_half_inv: np.ndarray

    @property
    def n(self):
        return self.T.shape[1]


@dataclass(frozen=True)
class TBoundCertificate:
    """Outcome of checking ``||dT x|| <= a||x|| + b||Tx||``."""

    a: float
    b: float
    holds: bool
    worst_ratio: float
    samples: int


def make_graph_space(T, floor=None, svd=None):
    """Graph space of `T`.

    With a full SVD of `T` (an :class:`~pinvpert.linalg_core.SVDSplit`), the
    roots of ``W = V diag(1 + s^2) V^*`` are formed from it directly instead
    of diagonalizing ``W`` again.
    """
    T = as_mat(T, "T")
    n = T.shape[1]
    W = identity_like(n, T) + T.conj().T @ T
    W = 0.5 * (W + W.conj().T)
    if svd is None:
        W_half, W_half_inv = hermitian_sqrt(W, default_rank_tol(W) if floor is None else floor)
    else:
        V = svd.Vh.conj().T
        s = np.zeros(n)
        s[: svd.s.size] = svd.s
        root = np.sqrt(1.0 + s * s)
        W_half = (V * root) @ svd.Vh
        W_half_inv = (V / root) @ svd.Vh
        W_half = 0.5 * (W_half + W_half.conj().T)
        W_half_inv = 0.5 * (W_half_inv + W_half_inv.conj().T)
    for arr in (T, W, W_half, W_half_inv):
        arr.flags.writeable = False
    return GraphSpace(T=T, W=W, W_half=W_half, W_half_inv=W_half_inv)


def graph_norm(gs, x):
    """Return ``(||x||_T, ||x||_G)`` with ``||x||_T^2 = ||x||^2 + ||Tx||^2``."""
    x = as_vec(x, gs.n, "x")
    nx = np.linalg.norm(x)
    ntx = np.linalg.norm(gs.T @ x)
    return float(np.hypot(nx, ntx)), float(nx + ntx)


def _check_domain(gs, dT):
    dT = as_mat(dT, "dT")
    if dT.shape[1] != gs.n:
        raise DimensionError(f"operator has {dT.shape[1]} columns, graph space has dimension {gs.n}")
    return dT


def t_norm_dom(gs, dT):
    """``sup ||dT x|| / ||x||_T``, exactly, as ``||dT W^{-1/2}||_2``."""
    dT = _check_domain(gs, dT)
    return spectral_norm(dT @ gs.W_half_inv)


def t_norm_cod(gs, S):
    """T-norm of an operator mapping into the graph space: ``||W^{1/2} S||_2``."""
    S = as_mat(S, "S")
    if S.shape[0] != gs.n:
        raise DimensionError(f"operator has {S.shape[0]} rows, graph space has dimension {gs.n}")
    return spectral_norm(gs.W_half @ S)


def _top_right_singular_vectors(A, k):
    n = A.shape[1]
    k = min(k, n)
    gram = A.conj().T @ A
    gram = 0.5 * (gram + gram.conj().T)
    _, V = sla.eigh(gram, subset_by_index=[n - k, n - 1])
    return V[:, ::-1]


def _random_unit_columns(rng, n, count, complex_):
    X = rng.standard_normal((n, count))
    if complex_:
        X = X + 1j * rng.standard_normal((n, count))
    return X / np.linalg.norm(X, axis=0)


def t_bound_certificate(gs, dT, a, b, samples=256, seed=0):
    """Check T-boundedness of `dT` with constants ``(a, b)``.

    The inequality is tested on `samples` random unit vectors and on the
    extremal directions ``W^{-1/2} v`` for the top right singular vectors ``v``
    of ``dT W^{-1/2}``. Testing the top direction is what makes a passing
    certificate imply ``||dT||_T <= sqrt(2) * max(a, b)``.
    """
    if a < 0 or b < 0:
        raise InvalidInputError("certificate constants must be nonnegative")
    dT = _check_domain(gs, dT)
    rng = np.random.default_rng(seed)
    complex_ = np.iscomplexobj(dT) or np.iscomplexobj(gs.T)
    X = _random_unit_columns(rng, gs.n, samples, complex_)
    ext = gs.W_half_inv @ _top_right_singular_vectors(dT @ gs.W_half_inv, _EXTREMAL_DIRECTIONS)
    X = np.hstack([X, ext]) if samples else ext

    num = np.linalg.norm(dT @ X, axis=0)
    den = a * np.linalg.norm(X, axis=0) + b * np.linalg.norm(gs.T @ X, axis=0)
    tiny = np.finfo(np.float64).tiny
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(den > tiny, num / np.where(den > tiny, den, 1.0), np.where(num > tiny, np.inf, 0.0))
    holds = bool(np.all(num <= den * (1.0 + CERT_RTOL) + ATOL))
    worst = float(ratio.max()) if ratio.size else 0.0
    return TBoundCertificate(a=float(a), b=float(b), holds=holds, worst_ratio=worst, samples=int(X.shape[1]))
