"""Dense linear algebra primitives.

Matrices are plain 2-D numpy arrays. Real input stays ``float64`` and anything
complex becomes ``complex128``; every routine here is written for the complex
case and is exact on the real subfield.

Rank decisions are relative: a singular value counts as nonzero when it
exceeds ``rank_tol * sigma_max``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionError,
    FormulaBreakdownError,
    InvalidInputError,
    InvalidWeightError,
)

EPS = np.finfo(np.float64).eps
ATOL = 1e-12
RTOL = 1e-9

# Below this size a spectral norm via singular values is cheaper than via a Gram matrix.
_GRAM_NORM_MIN_DIM = 64


def scaled_tol(norm=0.0, atol=ATOL, rtol=RTOL):
    """Scale-aware tolerance ``atol + rtol * (1 + norm)``."""
    return atol + rtol * (1.0 + float(norm))


def as_mat(A, name="matrix"):
    """Validate and normalize a matrix.

    Returns a 2-D ``float64`` array, or ``complex128`` if `A` has a complex
    dtype. Raises :class:`InvalidInputError` on non-finite entries.
    """
    arr = np.asarray(A)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=False)
    else:
        try:
            arr = arr.astype(np.float64, copy=False)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"{name} is not numeric") from exc
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def as_vec(x, dim=None, name="vector"):
    """Validate a vector; column or row matrices are flattened."""
    arr = np.asarray(x)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be 1-D")
    arr = as_mat(arr[:, None], name)[:, 0]
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"{name} has length {arr.shape[0]}, expected {dim}")
    return arr


def default_rank_tol(A):
    """``max(rows, cols) * eps``."""
    return max(max(np.shape(A)), 1) * EPS


def _result_dtype(*arrays):
    return np.result_type(np.float64, *[a.dtype for a in arrays])


def identity_like(n, *arrays):
    return np.eye(n, dtype=_result_dtype(*arrays))


def spectral_norm(A):
    """Largest singular value of `A` (0 for empty or zero matrices).

    Large matrices go through the top eigenvalue of the smaller Gram matrix;
    the largest eigenvalue is computed to relative accuracy, so taking the
    square root loses nothing.
    """
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    m, n = A.shape
    k = min(m, n)
    if k < _GRAM_NORM_MIN_DIM:
        return float(np.linalg.svd(A, compute_uv=False)[0])
    gram = A @ A.conj().T if m <= n else A.conj().T @ A
    top = sla.eigh(gram, eigvals_only=True, subset_by_index=[k - 1, k - 1], driver="evx")
    return float(np.sqrt(max(top[0].real, 0.0)))


@dataclass(frozen=True)
class SVDSplit:
    """Full SVD of a matrix together with its numerical rank.

    Caches the four fundamental subspaces and the pseudoinverse so that one
    factorization serves every query about the same matrix.
    """

    U: np.ndarray
    s: np.ndarray
    Vh: np.ndarray
    rank: int
    rank_tol: float

    @property
    def shape(self):
        return self.U.shape[0], self.Vh.shape[0]

    @property
    def sigma_max(self):
        return float(self.s[0]) if self.s.size else 0.0

    @cached_property
    def range_basis(self):
        return self.U[:, : self.rank]

    @cached_property
    def cokernel_basis(self):
        """Orthonormal basis of ``R(A)^perp`` (equivalently ``ker A^*``)."""
        return self.U[:, self.rank :]

    @cached_property
    def corange_basis(self):
        """Orthonormal basis of ``ker(A)^perp`` (equivalently ``R(A^*)``)."""
        return self.Vh[: self.rank].conj().T

    @cached_property
    def kernel_basis(self):
        return self.Vh[self.rank :].conj().T

    @cached_property
    def pinv(self):
        r = self.rank
        if r == 0:
            return np.zeros(self.shape[::-1], dtype=self.U.dtype)
        return (self.Vh[:r].conj().T / self.s[:r]) @ self.U[:, :r].conj().T


def svd_split(A, rank_tol=None):
    """Full SVD of `A` with rank decided at ``rank_tol * sigma_max``."""
    A = as_mat(A)
    if rank_tol is None:
        rank_tol = default_rank_tol(A)
    U, s, Vh = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    return SVDSplit(U=U, s=s, Vh=Vh, rank=rank, rank_tol=float(rank_tol))


def pinv_oracle(A, rank_tol=None):
    """Moore-Penrose inverse by truncated SVD.

    Singular values at or below ``rank_tol * sigma_max`` are treated as zero.
    This is the reference every closed-form expression is checked against.

    >>> pinv_oracle([[2.0, 0.0], [0.0, 0.0]])
    array([[0.5, 0. ],
           [0. , 0. ]])
    """
    return svd_split(A, rank_tol).pinv


def numerical_rank(A, rank_tol=None):
    A = as_mat(A)
    if A.size == 0:
        return 0
    if rank_tol is None:
        rank_tol = default_rank_tol(A)
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


@dataclass(frozen=True)
class Subspace:
    """Subspace stored as an orthonormal basis (``ambient_dim x dim``).

    `complement`, when known, is an orthonormal basis of the orthogonal
    complement. Gap and projector computations use whichever of the two
    bases is thinner.
    """

    ambient_dim: int
    basis: np.ndarray
    tol: float = ATOL
    complement: np.ndarray = None

    @property
    def dim(self):
        return self.basis.shape[1]

    def orthonormality_error(self):
        k = self.dim
        if k == 0:
            return 0.0
        return spectral_norm(self.basis.conj().T @ self.basis - np.eye(k))


@dataclass(frozen=True)
class Projector:
    mat: np.ndarray
    orthogonal: bool
    tol: float = ATOL

    def idempotency_error(self):
        return spectral_norm(self.mat @ self.mat - self.mat)

    def hermitian_error(self):
        return spectral_norm(self.mat.conj().T - self.mat)


def subspace_from_basis(basis, tol=None):
    """Wrap an already-orthonormal basis."""
    basis = np.asarray(basis)
    if tol is None:
        tol = scaled_tol(0.0) + default_rank_tol(basis)
    return Subspace(ambient_dim=basis.shape[0], basis=basis, tol=float(tol))


def trivial_subspace(ambient_dim, dtype=np.float64):
    return Subspace(ambient_dim, np.zeros((ambient_dim, 0), dtype=dtype))


def orthonormal_basis(A, which="range", rank_tol=None):
    """Orthonormal basis of the numerical range or kernel of `A`.

    Parameters
    ----------
    A : array_like
        Matrix of shape (m, n).
    which : {"range", "kernel"}
        Range gives left singular vectors with sigma above the threshold,
        kernel gives the right singular vectors at or below it.
    rank_tol : float, optional
        Relative rank threshold, default ``max(m, n) * eps``.
    """
    split = svd_split(A, rank_tol)
    tol = max(split.rank_tol, ATOL)
    if which == "range":
        return Subspace(split.shape[0], split.range_basis, tol, split.cokernel_basis)
    if which == "kernel":
        return Subspace(split.shape[1], split.kernel_basis, tol, split.corange_basis)
    raise ValueError(f"which must be 'range' or 'kernel', got {which!r}")


def image_subspace(M, S):
    """Subspace ``M(S)`` for `M` injective on `S`.

    The images of an orthonormal basis stay linearly independent, so an
    economic QR re-orthonormalizes them without a rank decision.
    """
    if S.dim == 0:
        return trivial_subspace(M.shape[0], M.dtype)
    Q, _ = np.linalg.qr(M @ S.basis)
    return Subspace(M.shape[0], Q, S.tol)


def projector_onto(S):
    """Orthogonal projector ``B B^*`` for the orthonormal basis `B` of `S`."""
    B = S.basis
    if S.dim == 0:
        return Projector(np.zeros((S.ambient_dim, S.ambient_dim), dtype=B.dtype), True, S.tol)
    return Projector(B @ B.conj().T, True, S.tol)


def _check_weight(W, name):
    W = as_mat(W, name)
    if W.shape[0] != W.shape[1]:
        raise InvalidWeightError(f"{name} must be square")
    if spectral_norm(W - W.conj().T) > scaled_tol(spectral_norm(W)):
        raise InvalidWeightError(f"{name} is not Hermitian")
    try:
        cho = sla.cho_factor(W)
    except np.linalg.LinAlgError as exc:
        raise InvalidWeightError(f"{name} is not positive definite") from exc
    return W, cho


def weighted_adjoint(A, W_dom, W_cod):
    """Adjoint of `A` for the inner products ``<x, y>_W = y^* W x``.

    Returns ``W_dom^{-1} A^* W_cod``, the operator with
    ``<A x, y>_{W_cod} = <x, A# y>_{W_dom}``.
    """
    A = as_mat(A)
    W_dom, cho = _check_weight(W_dom, "W_dom")
    W_cod, _ = _check_weight(W_cod, "W_cod")
    m, n = A.shape
    if W_dom.shape[0] != n or W_cod.shape[0] != m:
        raise DimensionError(f"weights {W_dom.shape}, {W_cod.shape} do not fit operator {A.shape}")
    return sla.cho_solve(cho, A.conj().T @ W_cod)


def hermitian_sqrt(W, floor=None):
    """``(W^{1/2}, W^{-1/2})`` by Hermitian eigendecomposition.

    Eigenvalues are floored at `floor` (default ``n * eps``) before the roots
    are taken.
    """
    W = as_mat(W, "W")
    if floor is None:
        floor = default_rank_tol(W)
    w, V = np.linalg.eigh(W)
    w = np.maximum(w, floor)
    root = np.sqrt(w)
    return (V * root) @ V.conj().T, (V / root) @ V.conj().T


def _lu_with_condition(M, max_cond, factor):
    lu, piv = sla.lu_factor(M, check_finite=False)
    gecon = sla.get_lapack_funcs("gecon", (lu,))
    anorm = np.linalg.norm(M, 1)
    rcond, _ = gecon(lu, anorm, norm="1")
    cond = float("inf") if rcond == 0 else 1.0 / rcond
    if not np.isfinite(cond) or cond > max_cond:
        raise FormulaBreakdownError(
            f"factor {factor} is numerically singular (cond_1 ~ {cond:.3e})",
            condition=cond,
            factor=factor,
        )
    return (lu, piv), cond


class CheckedSolver:
    """LU of a square factor that must be invertible.

    Raises :class:`FormulaBreakdownError` when the 1-norm condition estimate
    exceeds `max_cond`.
    """

    def __init__(self, M, max_cond, factor="M"):
        self.factor = factor
        self.M = M
        self._lu, self.condition = _lu_with_condition(M, max_cond, factor)

    def left(self, B):
        """``M^{-1} B``."""
        return sla.lu_solve(self._lu, B, check_finite=False)

    def right(self, B):
        """``B M^{-1}``."""
        return sla.lu_solve(self._lu, B.T, trans=1, check_finite=False).T
