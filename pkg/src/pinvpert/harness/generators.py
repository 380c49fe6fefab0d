"""Seeded instance generators.

Random instances are built from Haar-distributed factors with prescribed rank
and singular values in ``sv_range``. Their post-conditions are checked with
rank and invertibility tests only, never with the stability predicates the
instances exist to exercise.
"""

import numpy as np

from ..errors import ConstructionError, InvalidInputError
from ..linalg_core import Subspace, numerical_rank, spectral_norm, svd_split
from ..perturb import DEFAULT_RANK_TOL, DEFAULT_STABILITY_MARGIN, PerturbationInstance

KINDS = ("stable", "unstable", "boundary")
MAX_RETRIES = 10
DEFAULT_SV_RANGE = (1.0, 4.0)


def _gauss(rng, shape, complex_):
    Z = rng.standard_normal(shape)
    if complex_:
        Z = Z + 1j * rng.standard_normal(shape)
    return Z


def haar(rng, n, complex_=False):
    """Haar-distributed orthogonal/unitary matrix (QR with phase correction)."""
    Q, R = np.linalg.qr(_gauss(rng, (n, n), complex_))
    d = np.diag(R)
    d = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return Q * d


def low_rank(rng, m, n, rank, sv_range=DEFAULT_SV_RANGE, complex_=False):
    """``U diag(s) V^*`` with log-uniform singular values in `sv_range`.

    Returns ``(T, U, V)`` with full Haar factors so callers can reach the
    range, kernel and their complements.
    """
    U, V = haar(rng, m, complex_), haar(rng, n, complex_)
    lo, hi = np.log10(sv_range[0]), np.log10(sv_range[1])
    s = np.sort(10.0 ** rng.uniform(lo, hi, rank))[::-1]
    T = (U[:, :rank] * s) @ V[:, :rank].conj().T
    return T, U, V


def _unit_spectral(rng, shape, complex_):
    E = _gauss(rng, shape, complex_)
    return E / spectral_norm(E)


def draw_instance(
    m,
    n,
    rank,
    scale,
    kind="stable",
    rng=None,
    field="real",
    sv_range=DEFAULT_SV_RANGE,
    rank_tol=DEFAULT_RANK_TOL,
    stability_margin=DEFAULT_STABILITY_MARGIN,
):
    """One unchecked draw; see :func:`gen_instance`.

    Random quantities are drawn before `scale` is used, so one generator state
    yields the same direction at every scale.
    """
    if kind not in KINDS:
        raise InvalidInputError(f"kind must be one of {KINDS}, got {kind!r}")
    if not 0 <= rank <= min(m, n):
        raise InvalidInputError(f"rank {rank} outside [0, {min(m, n)}]")
    if scale < 0:
        raise InvalidInputError("scale must be nonnegative")
    if kind != "stable" and rank >= min(m, n):
        raise ConstructionError(f"kind={kind} needs rank < min(m, n); got rank {rank} for {m}x{n}")
    if kind == "boundary" and rank == 0:
        raise ConstructionError("kind=boundary needs rank >= 1")
    rng = np.random.default_rng(rng)
    complex_ = field == "complex"
    T, U, V = low_rank(rng, m, n, rank, sv_range, complex_)
    E1 = _unit_spectral(rng, (m, m), complex_)
    E2 = _unit_spectral(rng, (n, n), complex_)
    c_unit = rng.uniform(0.5, 1.0)
    phi_unit = rng.uniform(0.25, 0.75)

    # Rank-preserving tilt: Tbar = (I + s E1) T (I + s E2).
    E1T = E1 @ T
    dT = scale * (E1T + T @ E2) + scale**2 * (E1T @ E2)

    if kind == "unstable":
        # Map a kernel direction onto R(T)^perp so the rank of Tbar goes up by one.
        u, v = U[:, rank], V[:, rank]
        c = max(scale, 0.1) * c_unit * max(spectral_norm(T), 1.0)
        dT = dT + c * np.outer(u, v.conj())
    elif kind == "boundary":
        # Rotate a range direction to within angle phi of R(T)^perp. The p1 statistic
        # becomes cos(phi) ~ 1 - phi^2/2, i.e. within the guard band of its threshold.
        u0, u1 = U[:, 0], U[:, rank]
        phi = np.sqrt(2.0 * stability_margin * (2.0 * phi_unit))
        theta = np.pi / 2 - phi
        R = np.eye(m, dtype=U.dtype)
        R += (np.cos(theta) - 1.0) * (np.outer(u0, u0.conj()) + np.outer(u1, u1.conj()))
        R += np.sin(theta) * (np.outer(u1, u0.conj()) - np.outer(u0, u1.conj()))
        dT = R @ T - T
    return PerturbationInstance(T=T, dT=dT, rank_tol=rank_tol, stability_margin=stability_margin)


def _postcondition(inst, kind):
    rT = numerical_rank(inst.T, inst.rank_tol)
    rTbar = numerical_rank(inst.Tbar, inst.rank_tol)
    if kind != "boundary" and inst.factor_sigma[1] < 1e-3:
        return False
    if kind == "unstable":
        return rTbar > rT
    return rTbar == rT


def gen_instance(m, n, rank, scale, kind="stable", seed=0, max_retries=MAX_RETRIES, **kwargs):
    """Seeded perturbation instance on a chosen side of the stability condition.

    Parameters
    ----------
    m, n, rank : int
        Shape of ``T`` and its rank.
    scale : float
        Size of the rank-preserving tilt ``Tbar = (I + s E1) T (I + s E2)`` with
        ``||E1|| = ||E2|| = 1``.
    kind : {"stable", "unstable", "boundary"}
        ``stable`` keeps the rank. ``unstable`` adds ``c u v^*`` with ``v`` in
        ``ker T`` and ``u`` in ``R(T)^perp``, so ``R(Tbar)`` meets ``ker T^dag``.
        ``boundary`` rotates a range direction almost onto ``R(T)^perp``, leaving
        the intersection test inside the guard band.
    seed : int
    **kwargs
        ``field`` ("real"/"complex"), ``sv_range``, ``rank_tol``,
        ``stability_margin``.

    Raises
    ------
    ConstructionError
        If no draw meets the rank post-condition within `max_retries` attempts.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        inst = draw_instance(m, n, rank, scale, kind, rng, **kwargs)
        if _postcondition(inst, kind):
            return inst
    raise ConstructionError(f"no {kind} instance after {max_retries} draws (seed {seed})")


def forward_difference(n, dtype=np.float64):
    """``(n-1) x n`` matrix with rows ``e_{i+1} - e_i``."""
    D = np.zeros((n - 1, n), dtype=dtype)
    idx = np.arange(n - 1)
    D[idx, idx] = -1.0
    D[idx, idx + 1] = 1.0
    return D


def gen_surrogate(n, eps, seed=0, rank_tol=DEFAULT_RANK_TOL, stability_margin=DEFAULT_STABILITY_MARGIN):
    """Finite-dimensional stand-in for an unbounded operator.

    ``T = n D`` with ``D`` the forward difference, so ``||T||_2`` grows like
    ``2n`` at rank ``n - 1``; ``dT = eps T`` is T-bounded with ``(a, b) = (0, eps)``.
    `seed` is accepted for interface uniformity; the construction is deterministic.
    """
    if n < 2:
        raise InvalidInputError("surrogate needs n >= 2")
    T = n * forward_difference(n)
    return PerturbationInstance(T=T, dT=eps * T, rank_tol=rank_tol, stability_margin=stability_margin)


def random_subspace_pair(rng, ambient, complex_=False):
    """Two random subspaces of random dimensions (possibly trivial) in C^ambient."""
    out = []
    for _ in range(2):
        k = int(rng.integers(0, ambient + 1))
        if k == 0:
            out.append(Subspace(ambient, np.zeros((ambient, 0))))
            continue
        split = svd_split(_gauss(rng, (ambient, k), complex_))
        out.append(Subspace(ambient, split.range_basis))
    return tuple(out)
