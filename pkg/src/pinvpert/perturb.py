"""Stable perturbations of a matrix and the Moore-Penrose inverse of ``T + dT``.

A :class:`PerturbationInstance` caches every factorization an analysis needs
(SVDs of ``T`` and ``Tbar``, the factor ``I + dT T^dag``), so predicates,
closed forms and bounds can be evaluated repeatedly on the same instance
without refactoring.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .errors import DimensionError, NotInvertibleError, NotStableError, NumericalInconsistencyError
from .geninv import mp_from_idempotents, penrose_residuals
from .graph_space import make_graph_space, t_norm_dom
from .linalg_core import (
    ATOL,
    EPS,
    CheckedSolver,
    Subspace,
    as_mat,
    identity_like,
    scaled_tol,
    spectral_norm,
    svd_split,
)

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0
DEFAULT_RANK_TOL = 1e-10
DEFAULT_STABILITY_MARGIN = 1e-6
BOUND_RTOL = 1e-10
BOUND_ATOL = 1e-12
IDENTITY_RTOL = 1e-10
GAP_HAT_CHECK = 1e-10
# Rounding floor of an exact subspace intersection (sigma = 1) in the p1 statistic.
INTERSECTION_FLOOR = 1e-12
# relative accuracy demanded of sigma_min(I + dT T^dag) before the Gram route is trusted
SIGMA_GRAM_RTOL = 2e-12


def _freeze(*arrays):
    for a in arrays:
        a.flags.writeable = False


@dataclass(frozen=True)
class PerturbationInstance:
    """``T``, a perturbation ``dT`` and ``Tbar = T + dT``.

    ``gs`` is the graph space of the unperturbed ``T``; every T-norm of the
    analysis uses it.
    """

    T: np.ndarray
    dT: np.ndarray
    rank_tol: float = DEFAULT_RANK_TOL
    stability_margin: float = DEFAULT_STABILITY_MARGIN
    Tbar: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        T = as_mat(self.T, "T")
        dT = as_mat(self.dT, "dT")
        if T.shape != dT.shape:
            raise DimensionError(f"T has shape {T.shape} but dT has shape {dT.shape}")
        dtype = np.result_type(T, dT)
        T = np.array(T, dtype=dtype)
        dT = np.array(dT, dtype=dtype)
        Tbar = T + dT
        _freeze(T, dT, Tbar)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "dT", dT)
        object.__setattr__(self, "Tbar", Tbar)

    @cached_property
    def gs(self):
        """Graph space of ``T``, built from its cached SVD."""
        return make_graph_space(self.T, svd=self.svd_T)

    @property
    def shape(self):
        return self.T.shape

    @cached_property
    def svd_T(self):
        return svd_split(self.T, self.rank_tol)

    @cached_property
    def svd_Tbar(self):
        return svd_split(self.Tbar, self.rank_tol)

    @cached_property
    def T_dag(self):
        return self.svd_T.pinv

    @cached_property
    def Tbar_dag(self):
        """Oracle pseudoinverse of ``Tbar``."""
        return self.svd_Tbar.pinv

    def _sub(self, basis, complement=None):
        return Subspace(basis.shape[0], basis, max(self.rank_tol, ATOL), complement)

    @cached_property
    def range_T(self):
        return self._sub(self.svd_T.range_basis, self.svd_T.cokernel_basis)

    @cached_property
    def kernel_T(self):
        return self._sub(self.svd_T.kernel_basis, self.svd_T.corange_basis)

    @cached_property
    def range_T_dag(self):
        """``R(T^dag) = ker(T)^perp``, taken from ``T`` rather than ``T^dag``."""
        return self._sub(self.svd_T.corange_basis, self.svd_T.kernel_basis)

    @cached_property
    def kernel_T_dag(self):
        """``ker T^dag = R(T)^perp``."""
        return self._sub(self.svd_T.cokernel_basis, self.svd_T.range_basis)

    @cached_property
    def range_Tbar(self):
        return self._sub(self.svd_Tbar.range_basis, self.svd_Tbar.cokernel_basis)

    @cached_property
    def kernel_Tbar(self):
        return self._sub(self.svd_Tbar.kernel_basis, self.svd_Tbar.corange_basis)

    @staticmethod
    def _norm_and_inverse_norm(split):
        if split.rank == 0:
            return 0.0, 0.0
        return split.sigma_max, 1.0 / float(split.s[split.rank - 1])

    @cached_property
    def norm_T(self):
        return self._norm_and_inverse_norm(self.svd_T)[0]

    @cached_property
    def norm_T_dag(self):
        return self._norm_and_inverse_norm(self.svd_T)[1]

    @cached_property
    def norm_Tbar(self):
        return self._norm_and_inverse_norm(self.svd_Tbar)[0]

    @cached_property
    def norm_Tbar_dag(self):
        """``||Tbar^dag||_2`` of the oracle, read off the singular values."""
        return self._norm_and_inverse_norm(self.svd_Tbar)[1]

    @cached_property
    def factor(self):
        """``I + dT T^dag`` on the codomain."""
        m = self.shape[0]
        return identity_like(m, self.T) + self.dT @ self.T_dag

    @cached_property
    def factor_sigma(self):
        """Extreme singular values ``(sigma_max, sigma_min)`` of ``I + dT T^dag``.

        Near-identity factors (the common case) are handled by the Gram matrix
        eigenvalues, whose absolute error ``~ m eps sigma_max^2`` translates into
        a relative error below ``SIGMA_GRAM_RTOL`` on ``sigma_min``; otherwise a
        full singular value decomposition is used.
        """
        F = self.factor
        m = F.shape[0]
        if m == 0:
            return 1.0, 1.0
        w = sla.eigvalsh(F.conj().T @ F, check_finite=False)
        lo, hi = float(w[0]), float(w[-1])
        if lo > 0 and 4.0 * m * EPS * hi <= SIGMA_GRAM_RTOL * lo:
            return float(np.sqrt(hi)), float(np.sqrt(lo))
        s = np.linalg.svd(F, compute_uv=False)
        return float(s[0]), float(s[-1])

    def require_invertible(self):
        sigma_min = self.factor_sigma[1]
        if sigma_min < self.rank_tol:
            raise NotInvertibleError(
                f"I + dT T^dag is not invertible (sigma_min = {sigma_min:.3e})", sigma_min=sigma_min
            )

    @cached_property
    def factor_solver(self):
        self.require_invertible()
        return CheckedSolver(self.factor, 1.0 / self.rank_tol, "I+dT T^dag")

    @property
    def inv_norm(self):
        """``||(I + dT T^dag)^{-1}||_2``."""
        return 1.0 / self.factor_sigma[1]

    @cached_property
    def dT_T_norm(self):
        return t_norm_dom(self.gs, self.dT)

    @cached_property
    def condition(self):
        """``kappa(T) * kappa(I + dT T^dag)``, the scale of subspace rounding errors."""
        s = self.svd_T
        kT = s.sigma_max / s.s[s.rank - 1] if s.rank else 1.0
        hi, lo = self.factor_sigma
        return kT * hi / lo

    @cached_property
    def gap_tol(self):
        return scaled_tol(self.condition)

    @cached_property
    def G(self):
        """``T^dag (I + dT T^dag)^{-1}``."""
        G = self.factor_solver.right(self.T_dag)
        G.flags.writeable = False
        return G

    @cached_property
    def predicates(self):
        """Memoized :func:`stability_predicates`."""
        return stability_predicates(self)


def make_instance(T, dT, rank_tol=DEFAULT_RANK_TOL, stability_margin=DEFAULT_STABILITY_MARGIN):
    return PerturbationInstance(T=T, dT=dT, rank_tol=rank_tol, stability_margin=stability_margin)


# --------------------------------------------------------------------------- gaps


def _check_ambient(M, N):
    if M.ambient_dim != N.ambient_dim:
        raise DimensionError(f"ambient dimensions differ: {M.ambient_dim} vs {N.ambient_dim}")


def gap(M, N):
    """One-sided gap ``sup{dist(u, N) : u in M, ||u|| = 1} = ||(I - P_N) B_M||``.

    When ``N`` carries a thinner complement basis ``C``, the same number is
    ``||C^* B_M||``.
    """
    _check_ambient(M, N)
    if M.dim == 0:
        return 0.0
    B = M.basis
    C = N.complement
    if C is not None and C.shape[1] < N.dim:
        return min(spectral_norm(C.conj().T @ B), 1.0)
    if N.dim:
        B = B - N.basis @ (N.basis.conj().T @ B)
    return min(spectral_norm(B), 1.0)


def _signed_outer_norm(X, Y):
    """``||X X^* - Y Y^*||_2`` via a QR of ``[X, Y]`` (cheap when both are thin)."""
    Z = np.hstack([X, Y])
    if Z.shape[1] == 0:
        return 0.0
    if Z.shape[1] >= Z.shape[0]:
        return spectral_norm(X @ X.conj().T - Y @ Y.conj().T)
    R = np.linalg.qr(Z, mode="r")
    k = X.shape[1]
    D = np.concatenate([np.ones(k), -np.ones(Y.shape[1])])
    H = (R * D) @ R.conj().T
    return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (H + H.conj().T)))))


def projector_distance(M, N):
    """``||P_M - P_N||_2``, using ``P_M - P_N = P_{N^perp} - P_{M^perp}`` when the
    complements are thinner."""
    _check_ambient(M, N)
    if M.complement is not None and N.complement is not None:
        if M.complement.shape[1] + N.complement.shape[1] < M.dim + N.dim:
            return _signed_outer_norm(N.complement, M.complement)
    return _signed_outer_norm(M.basis, N.basis)


def gap_hat(M, N, check=True):
    """Symmetric gap ``max(gap(M, N), gap(N, M))``.

    With `check`, the projector route ``||P_M - P_N||`` is computed as well and
    a disagreement above 1e-10 raises :class:`NumericalInconsistencyError`.
    """
    g = max(gap(M, N), gap(N, M))
    if check:
        pd = projector_distance(M, N)
        if abs(pd - g) > GAP_HAT_CHECK:
            raise NumericalInconsistencyError(f"gap_hat {g!r} disagrees with ||P_M - P_N|| = {pd!r}")
    return g


# --------------------------------------------------------------------- predicates


class Predicate(NamedTuple):
    """One stability condition: its verdict, the raw statistic, and the signed
    distance of that statistic to the decision threshold (positive = holds)."""

    name: str
    holds: bool
    value: float
    margin: float


@dataclass(frozen=True)
class PredicateSet:
    items: tuple
    stability_margin: float

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def flags(self):
        return tuple(p.holds for p in self.items)

    @property
    def margins(self):
        return tuple(p.margin for p in self.items)

    @property
    def all_true(self):
        return all(self.flags)

    @property
    def unanimous(self):
        return len(set(self.flags)) == 1

    @property
    def in_guard_band(self):
        """p1 is too close to its threshold to be trusted.

        Exact intersections give a p1 statistic of 1 up to rounding, i.e. a margin
        of ``-stability_margin``; that point is excluded from the band.
        """
        sm = self.stability_margin
        return -sm + INTERSECTION_FLOOR < self.items[0].margin < sm

    @property
    def status(self):
        if self.in_guard_band:
            return "indeterminate"
        if not self.unanimous:
            return "inconsistent"
        return "stable" if self.all_true else "unstable"

    @property
    def is_stable(self):
        return self.status == "stable"


def _p1(inst):
    # Sine of the largest angle from R(Tbar) to R(T); equals 1 iff R(Tbar) meets R(T)^perp.
    value = gap(inst.range_Tbar, inst.range_T)
    margin = (1.0 - inst.stability_margin) - value
    return Predicate("p1", margin > 0, value, margin)


def _p2(inst, G):
    Tb = inst.Tbar
    split_G = svd_split(G, inst.rank_tol)
    nTb, nG = inst.norm_Tbar, split_G.sigma_max
    TbG = Tb @ G
    r1 = spectral_norm(TbG @ Tb - Tb)
    r2 = spectral_norm(G @ TbG - G)
    range_G = inst._sub(split_G.range_basis, split_G.cokernel_basis)
    kernel_G = inst._sub(split_G.kernel_basis, split_G.corange_basis)
    g1 = gap_hat(range_G, inst.range_T_dag, check=False)
    g2 = gap_hat(kernel_G, inst.kernel_T_dag, check=False)
    margins = (
        scaled_tol(nTb * nTb * nG) - r1,
        scaled_tol(nG * nG * nTb) - r2,
        inst.gap_tol - g1,
        inst.gap_tol - g2,
    )
    margin = min(margins)
    return Predicate("p2", margin >= 0, max(r1, r2, g1, g2), margin)


def _p3(inst):
    K = inst.kernel_T.basis
    if K.shape[1] == 0:
        return Predicate("p3", True, 0.0, float("inf"))
    TbK = inst.Tbar @ K
    Y = inst.factor_solver.left(TbK)
    U = inst.range_T.basis
    if U.shape[1]:
        Y = Y - U @ (U.conj().T @ Y)
    resid = np.linalg.norm(Y, axis=0)
    scale = inst.inv_norm * np.linalg.norm(TbK, axis=0)
    margins = np.array([scaled_tol(s) for s in scale]) - resid
    return Predicate("p3", bool(np.all(margins >= 0)), float(resid.max()), float(margins.min()))


def _mapped(solver, S):
    """``M^{-1} S`` for the solver's matrix ``M``, re-orthonormalized by QR.

    ``M`` is invertible, so the mapped basis keeps full column rank, and the
    complement of the image is ``M^* S^perp``.
    """
    if S.dim == 0:
        return S
    basis = np.linalg.qr(solver.left(S.basis))[0]
    comp = None
    if S.complement is not None and S.complement.shape[1] < S.dim:
        C = S.complement
        comp = np.linalg.qr(solver.M.conj().T @ C)[0] if C.shape[1] else C
    return Subspace(S.ambient_dim, basis, S.tol, comp)


def _mapped_distance(solver, S, N):
    """``gap_hat(M^{-1} S, N) = ||P_{M^{-1} S} - P_N||``.

    When both complements are thinner than the subspaces, only the complement
    ``M^* S^perp`` of the image is formed; the image itself has ``dim S``.
    """
    C, D = S.complement, N.complement
    if C is not None and D is not None and C.shape[1] < S.dim and D.shape[1] < N.dim:
        if S.dim != N.dim:
            return 1.0
        comp = np.linalg.qr(solver.M.conj().T @ C)[0] if C.shape[1] else C
        return _signed_outer_norm(D, comp)
    return projector_distance(_mapped(solver, S), N)


def _p4(inst):
    value = _mapped_distance(inst.factor_solver, inst.range_Tbar, inst.range_T)
    margin = inst.gap_tol - value
    return Predicate("p4", margin >= 0, value, margin)


def _p5(inst):
    n = inst.shape[1]
    right = identity_like(n, inst.T) + inst.T_dag @ inst.dT
    solver = CheckedSolver(right, 1.0 / inst.rank_tol, "I+T^dag dT")
    value = _mapped_distance(solver, inst.kernel_T, inst.kernel_Tbar)
    margin = inst.gap_tol - value
    return Predicate("p5", margin >= 0, value, margin)


def stability_predicates(inst):
    """Evaluate the five equivalent stable-perturbation conditions.

    p1
        ``R(Tbar)`` meets ``ker T^dag = R(T)^perp`` only in 0.
    p2
        ``G = T^dag (I + dT T^dag)^{-1}`` is a (1,2)-inverse of ``Tbar`` with the
        range and kernel of ``T^dag``.
    p3
        ``(I + dT T^dag)^{-1} Tbar`` maps ``ker T`` into ``R(T)``.
    p4
        ``(I + dT T^dag)^{-1} R(Tbar) = R(T)``.
    p5
        ``(I + T^dag dT)^{-1} ker T = ker Tbar``.

    Raises
    ------
    NotInvertibleError
        If ``sigma_min(I + dT T^dag) < rank_tol``.
    """
    inst.require_invertible()
    G = inst.G
    items = (_p1(inst), _p2(inst, G), _p3(inst), _p4(inst), _p5(inst))
    return PredicateSet(items=items, stability_margin=inst.stability_margin)


def compute_G(inst):
    """``G = T^dag (I + dT T^dag)^{-1}`` (memoized on the instance)."""
    return inst.G


def _require_stable(inst, predicates=None):
    preds = predicates if predicates is not None else inst.predicates
    if not preds.all_true:
        raise NotStableError(f"perturbation is not stable (predicates {preds.flags})")
    return preds


def perturbed_mp(inst, metric="standard", prefix=True, weight_from="T", predicates=None):
    """Moore-Penrose inverse of ``Tbar`` from ``G`` by the closed form.

    ``Tbar^dag = -P_{ker Tbar^perp} (I + Pb (I - Pb - Pb^*)^{-1}) G (I - Tbar G - (Tbar G)^*)^{-1}``
    with ``Pb = I - G Tbar``.

    Parameters
    ----------
    metric : {"standard", "graph"}
        Inner product used for the adjoint ``Pb^*``.
    prefix : bool
        Apply the orthogonal projector onto ``ker(Tbar)^perp``.
    weight_from : {"T", "Tbar"}
        Which operator's graph metric the ``"graph"`` adjoint uses. The
        unperturbed ``T`` is the default.
    """
    _require_stable(inst, predicates)
    G = compute_G(inst)
    n = inst.shape[1]
    Pb = identity_like(n, G) - G @ inst.Tbar
    Qb = inst.Tbar @ G
    if metric == "standard":
        W = None
    elif metric == "graph":
        W = inst.gs.W if weight_from == "T" else make_graph_space(inst.Tbar).W
    else:
        raise ValueError(f"metric must be 'standard' or 'graph', got {metric!r}")
    return mp_from_idempotents(G, Pb, Qb, inst.kernel_Tbar.basis, 1.0 / inst.rank_tol, W=W, prefix=prefix)


# ------------------------------------------------------------------------- bounds


@dataclass(frozen=True)
class BoundRow:
    """An inequality ``lhs <= rhs`` (``kind="upper"``) or an identity
    ``lhs == rhs`` (``kind="equality"``) evaluated on one instance."""

    name: str
    lhs: float
    rhs: float
    kind: str = "upper"
    asserted: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "rhs", float(self.rhs))

    @property
    def slack(self):
        return self.rhs - self.lhs

    @property
    def holds(self):
        if self.kind == "equality":
            return bool(abs(self.lhs - self.rhs) <= IDENTITY_RTOL * (1.0 + abs(self.lhs)))
        return bool(self.lhs <= self.rhs * (1.0 + BOUND_RTOL) + BOUND_ATOL)

    @property
    def tightness(self):
        if self.lhs == 0:
            return 0.0
        return self.lhs / self.rhs if self.rhs > 0 else float("inf")


class Gaps(NamedTuple):
    range_gap: float
    kernel_gap: float
    gap_hat_range: float
    projector_diff: float
    gap_hat_kernel: float
    kernel_projector_diff: float


@dataclass(frozen=True)
class StabilityReport:
    predicates: PredicateSet
    is_stable: bool
    status: str
    G: np.ndarray = None
    Tbar_dag_formula: np.ndarray = None
    Tbar_dag_oracle: np.ndarray = None
    inv_norm: float = float("nan")
    norms: dict = field(default_factory=dict)
    bounds: tuple = ()
    gaps: Gaps = None
    formula_error: float = float("nan")
    formula_residuals: tuple = ()
    variants: dict = field(default_factory=dict)
    warnings: tuple = ()

    def bound(self, name):
        for row in self.bounds:
            if row.name == name:
                return row
        raise KeyError(name)

    @property
    def all_asserted_hold(self):
        return all(row.holds for row in self.bounds if row.asserted)


def theorem_bounds(inst, Tbar_dag=None):
    """Norm and difference bounds for ``Tbar^dag`` plus the subspace-gap rows.

    Rows: ``norm_bound``, ``difference_bound``, ``range_gap_bound``,
    ``kernel_gap_bound``, the equality ``projector_identity`` and, when the
    kernels are at gap below 1, the equality ``kernel_gap_identity``. Returns
    ``(rows, gaps, warnings)``.
    """
    T_dag = inst.T_dag
    Tbar_dag = inst.Tbar_dag if Tbar_dag is None else Tbar_dag
    nTd = inst.norm_T_dag
    nTbd = inst.norm_Tbar_dag if Tbar_dag is inst.Tbar_dag else spectral_norm(Tbar_dag)
    dTn = inst.dT_T_norm
    root = np.sqrt(nTd**2 + 1.0)
    warnings = []

    range_gap = gap(inst.range_T, inst.range_Tbar)
    kernel_gap = gap(inst.kernel_T, inst.kernel_Tbar)
    proj_diff = projector_distance(inst.range_T, inst.range_Tbar)
    ker_proj_diff = projector_distance(inst.kernel_T, inst.kernel_Tbar)
    ghat_kernel = max(kernel_gap, gap(inst.kernel_Tbar, inst.kernel_T))
    gaps = Gaps(
        range_gap=range_gap,
        kernel_gap=kernel_gap,
        gap_hat_range=max(range_gap, gap(inst.range_Tbar, inst.range_T)),
        projector_diff=proj_diff,
        gap_hat_kernel=ghat_kernel,
        kernel_projector_diff=ker_proj_diff,
    )

    rows = [
        BoundRow("norm_bound", nTbd, inst.inv_norm * root),
        BoundRow("difference_bound", spectral_norm(Tbar_dag - T_dag), GOLDEN * nTbd * dTn * root),
        BoundRow("range_gap_bound", range_gap, dTn * root),
        BoundRow("kernel_gap_bound", kernel_gap, nTbd * dTn),
        BoundRow("projector_identity", proj_diff, range_gap, kind="equality"),
    ]
    if ghat_kernel < 1.0:
        rows.append(BoundRow("kernel_gap_identity", kernel_gap, ker_proj_diff, kind="equality"))
    else:
        warnings.append(f"kernel gap_hat = {ghat_kernel!r}; kernel_gap_identity not evaluated")
    return tuple(rows), gaps, warnings


def verify_bounds(inst, metric="standard", paranoid=False, penrose=True):
    """Full stability analysis of one instance.

    Unstable (or indeterminate) instances yield a report carrying only the
    predicates. Stable ones also get ``G``, the closed-form and oracle
    ``Tbar^dag``, their distance and Penrose residuals, and all bound rows.
    With `paranoid`, every (metric, weight source, prefix) variant of the
    closed form is compared against the oracle.
    `penrose` adds the four Penrose residuals of the closed form.

    Raises
    ------
    NotInvertibleError
        Propagated from :func:`stability_predicates`.
    """
    preds = inst.predicates
    status = preds.status
    if not preds.all_true:
        return StabilityReport(predicates=preds, is_stable=False, status=status, inv_norm=inst.inv_norm)

    warnings = []
    G = compute_G(inst)
    formula = perturbed_mp(inst, metric=metric, predicates=preds)
    oracle = inst.Tbar_dag
    n_oracle = inst.norm_Tbar_dag
    err = spectral_norm(formula - oracle)
    residuals = penrose_residuals(inst.Tbar, formula) if penrose else ()
    if err > 1e-8 * (1.0 + n_oracle):
        warnings.append(f"closed form differs from oracle by {err!r}")

    variants = {}
    if paranoid:
        for name, kw in (
            ("standard", dict(metric="standard")),
            ("standard_no_prefix", dict(metric="standard", prefix=False)),
            ("graph_W_T", dict(metric="graph", weight_from="T")),
            ("graph_W_T_no_prefix", dict(metric="graph", weight_from="T", prefix=False)),
            ("graph_W_Tbar", dict(metric="graph", weight_from="Tbar")),
            ("graph_W_Tbar_no_prefix", dict(metric="graph", weight_from="Tbar", prefix=False)),
        ):
            d = spectral_norm(perturbed_mp(inst, predicates=preds, **kw) - oracle)
            variants[name] = d
            if d > 1e-8 * (1.0 + n_oracle):
                warnings.append(f"variant {name} differs from oracle by {d!r}")

    rows, gaps, gap_warnings = theorem_bounds(inst)
    warnings.extend(gap_warnings)
    for row in rows:
        if not row.holds:
            warnings.append(f"bound {row.name} fails: lhs={row.lhs!r} rhs={row.rhs!r}")

    norms = {
        "T": inst.norm_T,
        "Tbar": inst.norm_Tbar,
        "dT_T": inst.dT_T_norm,
        "T_dag": inst.norm_T_dag,
        "Tbar_dag": n_oracle,
        "inv_factor": inst.inv_norm,
        "factor_sigma_min": inst.factor_sigma[1],
    }
    return StabilityReport(
        predicates=preds,
        is_stable=preds.is_stable,
        status=status,
        G=G,
        Tbar_dag_formula=formula,
        Tbar_dag_oracle=oracle,
        inv_norm=inst.inv_norm,
        norms=norms,
        bounds=rows,
        gaps=gaps,
        formula_error=err,
        formula_residuals=tuple(residuals),
        variants=variants,
        warnings=tuple(warnings),
    )
