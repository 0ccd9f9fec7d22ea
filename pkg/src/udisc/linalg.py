"""Dense complex linear algebra kernel.

Hermitian eigendecomposition by parallel-ordered cyclic Jacobi, rank and
nullspace with an explicit relative cut, and positive semidefiniteness tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EmptyMatrix, NoConvergence, NonSquare, NotHermitian

HERMITIAN_TOL = 1e-8
RANK_TOL = 1e-9
PSD_TOL = 1e-9

# Above this size the Jacobi sweeps get slow in pure numpy; LAPACK takes over.
JACOBI_MAX_DIM = 256
MAX_SWEEPS = 60


@dataclass(frozen=True)
class HermitianEig:
    """Ascending eigenvalues and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])


def as_cmatrix(a) -> np.ndarray:
    """Coerce to a 2-d complex array, rejecting NaN/Inf."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {m.shape}")
    if m.size == 0:
        raise EmptyMatrix("matrix has no entries")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def max_norm(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermitianize(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def _check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"matrix of shape {a.shape} is not square")
    defect = max_norm(a - a.conj().T)
    if defect > tol * max(1.0, max_norm(a)):
        raise NotHermitian(f"Hermiticity defect {defect:.3e} exceeds {tol:.0e}")
    return hermitianize(a)


@lru_cache(maxsize=64)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Disjoint index pairings covering every pair (p, q) once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            p, q = players[k], players[m - 1 - k]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(rounds)


def _offdiag_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _jacobi(a: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=complex)
    if n == 1:
        return a.diagonal().real.copy(), v
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(n), v
    target = n * np.finfo(float).eps * scale
    # pivots this small cannot affect convergence; rotating them would divide
    # by denormals when forming the phase
    negligible = np.finfo(float).eps ** 2 * scale
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= target:
            break
        for P, Q in rounds:
            apq = a[P, Q]
            r = np.abs(apq)
            live = r > negligible
            if not np.any(live):
                continue
            P, Q, apq, r = P[live], Q[live], apq[live], r[live]
            phase = apq / r
            with np.errstate(over="ignore"):
                # tau may overflow to inf for negligible r; t then becomes 0
                tau = (a[Q, Q].real - a[P, P].real) / (2.0 * r)
                sign = np.where(tau >= 0.0, 1.0, -1.0)
                t = sign / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] on each (p, q) plane
            jqp = -s * phase.conj()
            jqq = c * phase.conj()
            for m in (a, v):
                cp, cq = m[:, P], m[:, Q]
                m[:, P] = cp * c + cq * jqp
                m[:, Q] = cp * s + cq * jqq
            rp, rq = a[P, :], a[Q, :]
            a[P, :] = c[:, None] * rp + jqp.conj()[:, None] * rq
            a[Q, :] = s[:, None] * rp + jqq.conj()[:, None] * rq
            a[P, Q] = 0.0
            a[Q, P] = 0.0
    else:
        if _offdiag_norm(a) > target:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    return a.diagonal().real.copy(), v


def eig_hermitian(a, method: str = "auto") -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (A + A^H)/2 before solving. ``method`` is
    ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    ``JACOBI_MAX_DIM``, LAPACK beyond).
    """
    a = _check_hermitian(a)
    n = a.shape[0]
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        w, v = _jacobi(a)
    elif method == "lapack":
        w, v = np.linalg.eigh(a)
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")
    order = np.argsort(w, kind="stable")
    return HermitianEig(eigenvalues=np.asarray(w)[order], eigenvectors=np.asarray(v)[:, order])


def eigvals_hermitian(a, method: str = "auto") -> np.ndarray:
    return eig_hermitian(a, method=method).eigenvalues


def rank_and_nullspace(a, tol_rel: float = RANK_TOL) -> tuple[int, np.ndarray]:
    """Numerical rank and an orthonormal basis of the right nullspace.

    Singular values above ``tol_rel * sigma_max`` count toward the rank.
    The nullspace basis has shape ``(cols, cols - rank)``.
    """
    if tol_rel <= 0:
        raise ValueError("tol_rel must be positive")
    a = as_cmatrix(a)
    cols = a.shape[1]
    _, sv, vh = np.linalg.svd(a, full_matrices=True)
    smax = float(sv[0]) if sv.size else 0.0
    rank = int(np.sum(sv > tol_rel * smax)) if smax > 0.0 else 0
    return rank, vh[rank:].conj().T.reshape(cols, cols - rank)


def range_basis(a, tol_rel: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column space, shape ``(rows, rank)``."""
    a = as_cmatrix(a)
    u, sv, _ = np.linalg.svd(a, full_matrices=False)
    smax = float(sv[0]) if sv.size else 0.0
    rank = int(np.sum(sv > tol_rel * smax)) if smax > 0.0 else 0
    return u[:, :rank]


def is_psd(a, tol_abs: float | None = None) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol_abs``.

    Default tolerance is ``1e-9 * max(1, ||A||_max)``.
    """
    a = _check_hermitian(a)
    if tol_abs is None:
        tol_abs = PSD_TOL * max(1.0, max_norm(a))
    # A + tol*I factors iff lambda_min > -tol; only a failed factorization
    # needs the eigensolver to settle the borderline.
    try:
        np.linalg.cholesky(a + tol_abs * np.eye(a.shape[0]))
        return True
    except np.linalg.LinAlgError:
        return eig_hermitian(a).lambda_min >= -tol_abs


def psd_sqrt_factor(
    a: np.ndarray, tol_rel: float = RANK_TOL, eig: HermitianEig | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Split a PSD matrix as ``A = F F^H`` on its numerical range.

    Returns ``(eigenvalues, eigenvectors)`` restricted to eigenvalues above
    ``tol_rel * lambda_max``. A decomposition already computed for ``a`` may
    be passed as ``eig``.
    """
    if eig is None:
        eig = eig_hermitian(a)
    top = max(eig.lambda_max, 0.0)
    keep = eig.eigenvalues > tol_rel * top if top > 0 else np.zeros(len(eig.eigenvalues), bool)
    return eig.eigenvalues[keep], eig.eigenvectors[:, keep]
