"""Finite families of pure states, their Gram matrices and dual families.

Every span-level quantity is computed from the Gram matrix alone, so a
family of coherent states (no finite ambient space) is handled exactly like
a family of explicit vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DimensionMismatch, LengthMismatch, NotMinimal

NORM_TOL = 1e-10
GRAM_TOL = 1e-10
DEFAULT_TOL = 1e-9


def _default_labels(n: int) -> tuple[str, ...]:
    return tuple(str(i + 1) for i in range(n))


def _check_labels(labels: Sequence, n: int) -> tuple[str, ...]:
    labels = tuple(str(lab) for lab in labels)
    if len(labels) != n:
        raise LengthMismatch(f"{len(labels)} labels for {n} states")
    if len(set(labels)) != n:
        raise ValueError("labels must be unique")
    return labels


@dataclass(frozen=True)
class StateFamily:
    """Unit vectors psi_i in C^d, stored as the rows of ``states``."""

    states: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        psi = np.array(self.states, dtype=complex)
        if psi.ndim == 1:
            psi = psi[None, :]
        if psi.ndim != 2 or psi.shape[0] < 1 or psi.shape[1] < 1:
            raise DimensionMismatch(f"states must form an (N, d) array, got shape {psi.shape}")
        if not np.all(np.isfinite(psi)):
            raise ValueError("states contain non-finite amplitudes")
        norms = np.linalg.norm(psi, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > NORM_TOL)
        if bad.size:
            raise ValueError(f"state {int(bad[0])} has norm {norms[bad[0]]:.12g}, expected 1")
        psi.setflags(write=False)
        object.__setattr__(self, "states", psi)
        labels = self.labels or _default_labels(psi.shape[0])
        object.__setattr__(self, "labels", _check_labels(labels, psi.shape[0]))

    @classmethod
    def from_vectors(cls, vectors, labels: Sequence = ()) -> "StateFamily":
        """Build a family from arbitrary nonzero vectors, normalizing each."""
        psi = np.array(vectors, dtype=complex)
        if psi.ndim == 1:
            psi = psi[None, :]
        norms = np.linalg.norm(psi, axis=1)
        if np.any(norms == 0):
            raise ValueError("zero vector cannot be normalized")
        return cls(psi / norms[:, None], tuple(labels))

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return self.states.shape[0]

    def transformed(self, unitary: np.ndarray) -> "StateFamily":
        """Apply the same operator to every state."""
        u = np.asarray(unitary, dtype=complex)
        if u.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"operator shape {u.shape} does not act on C^{self.dim}")
        return StateFamily.from_vectors(self.states @ u.T, self.labels)

    def delete(self, index: int) -> "StateFamily":
        keep = [k for k in range(len(self)) if k != index]
        return StateFamily(self.states[keep], tuple(self.labels[k] for k in keep))


@dataclass(frozen=True)
class GramFamily:
    """A family known only through its Gram matrix G_ij = <psi_i|psi_j>."""

    gram: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        g = linalg.as_cmatrix(self.gram)
        n = g.shape[0]
        if g.shape != (n, n):
            raise DimensionMismatch(f"Gram matrix must be square, got {g.shape}")
        if linalg.max_norm(g - g.conj().T) > GRAM_TOL:
            raise ValueError("Gram matrix is not Hermitian")
        if np.max(np.abs(np.diag(g) - 1.0)) > GRAM_TOL:
            raise ValueError("Gram matrix diagonal must be 1 (unit vectors)")
        g = linalg.hermitianize(g)
        if not linalg.is_psd(g):
            raise ValueError("Gram matrix is not positive semidefinite")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)
        labels = self.labels or _default_labels(n)
        object.__setattr__(self, "labels", _check_labels(labels, n))

    def __len__(self) -> int:
        return self.gram.shape[0]

    @property
    def eig(self) -> linalg.HermitianEig:
        cached = self.__dict__.get("_eig")
        if cached is None:
            cached = linalg.eig_hermitian(self.gram)
            object.__setattr__(self, "_eig", cached)
        return cached

    @property
    def lambda_min(self) -> float:
        return self.eig.lambda_min

    def sub(self, indices: Sequence[int]) -> "GramFamily":
        """Sub-family on the given indices (a principal submatrix of G)."""
        idx = np.asarray(indices, dtype=int)
        return GramFamily(self.gram[np.ix_(idx, idx)], tuple(self.labels[k] for k in idx))

    def delete(self, index: int) -> "GramFamily":
        return self.sub([k for k in range(len(self)) if k != index])


@dataclass(frozen=True)
class DualFamily:
    """Biorthogonal family inside the span: phi_i = sum_j coeffs[j, i] psi_j."""

    coeffs: np.ndarray
    gram_inverse: np.ndarray
    labels: tuple[str, ...] = field(default=())

    def vectors(self, family: StateFamily) -> np.ndarray:
        """Ambient dual vectors as rows, given the ambient states."""
        return self.coeffs.T @ family.states


class Level(str, Enum):
    NONE = "none"
    UNIFORM = "distinguishable_uniform"
    PERFECT = "perfect"


@dataclass(frozen=True)
class DistinguishabilityVerdict:
    level: Level
    q_max: float
    lambda_min: float
    tolerance_used: float

    @property
    def distinguishable(self) -> bool:
        return self.level is not Level.NONE

    def to_dict(self) -> dict:
        return {
            "level": self.level.value,
            "q_max": self.q_max,
            "lambda_min": self.lambda_min,
            "tolerance_used": self.tolerance_used,
        }


def gram(family: StateFamily) -> GramFamily:
    """Gram matrix with G_ij = <psi_i|psi_j> (conjugate-linear in the first slot)."""
    psi = family.states
    g = psi.conj() @ psi.T
    np.fill_diagonal(g, 1.0)
    return GramFamily(linalg.hermitianize(g), family.labels)


def dual_family(gf: GramFamily, tol_rel: float = DEFAULT_TOL) -> DualFamily:
    """Unique biorthogonal family inside span{psi_i}.

    The inverse Gram matrix is assembled from the eigendecomposition of G.
    Raises NotMinimal when lambda_min(G) <= tol_rel.
    """
    eig = gf.eig
    if eig.lambda_min <= tol_rel:
        raise NotMinimal(
            f"lambda_min(G) = {eig.lambda_min:.3e} <= {tol_rel:.1e}: family is linearly dependent"
        )
    v = eig.eigenvectors
    inv = (v / eig.eigenvalues) @ v.conj().T
    inv = linalg.hermitianize(inv)
    return DualFamily(coeffs=inv, gram_inverse=inv, labels=gf.labels)


def max_uniform_success(gf: GramFamily, tol: float = DEFAULT_TOL) -> float:
    """Largest uniform success probability of an unambiguous measurement.

    Equals 1 / ||sum_k |phi_k><phi_k| ||, which is lambda_min(G) because the
    dual dyad sum has the same nonzero spectrum as G^-1. Returns 0 for
    families that are dependent at tolerance ``tol``.
    """
    lam = gf.lambda_min
    return float(min(lam, 1.0)) if lam > tol else 0.0


def verdict(gf: GramFamily, tol_rel: float = DEFAULT_TOL) -> DistinguishabilityVerdict:
    lam = gf.lambda_min
    if lam <= tol_rel:
        level, q = Level.NONE, 0.0
    elif linalg.max_norm(gf.gram - np.eye(len(gf))) <= tol_rel:
        level, q = Level.PERFECT, 1.0
    else:
        level, q = Level.UNIFORM, float(lam)
    return DistinguishabilityVerdict(level, q, float(lam), tol_rel)


def riesz_fischer_check(gf: GramFamily, coeffs, claimed_bound: float) -> bool:
    """Witness test of ``bound * sum|a_i|^2 <= ||sum a_i psi_i||^2``."""
    a = np.asarray(coeffs, dtype=complex).ravel()
    if a.shape[0] != len(gf):
        raise LengthMismatch(f"{a.shape[0]} coefficients for a family of {len(gf)}")
    lhs = float(np.real(a.conj() @ gf.gram @ a))
    return lhs >= claimed_bound * float(np.sum(np.abs(a) ** 2)) - 1e-12


def dual_dyad_sum(family: StateFamily, dual: DualFamily) -> np.ndarray:
    """Ambient operator X = sum_k |phi_k><phi_k|."""
    phi = dual.vectors(family)
    return phi.T @ phi.conj()
