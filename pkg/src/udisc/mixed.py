"""Kernel/range criterion for unambiguous discrimination of mixed states.

Family member i can be singled out iff some vector is annihilated by every
other rho_k but not by rho_i. Equivalently, dropping rho_i shrinks the span
of all the ranges. Both forms are computed and compared.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import InvalidDensityMatrix, NotDistinguishable
from .pure import _check_labels, _default_labels

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
TRACE_TOL = 1e-8
DEFAULT_TOL = 1e-9


def density_diagnostic(rho: np.ndarray) -> str | None:
    """Why ``rho`` is not a density matrix, or None if it is one."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return f"not square (shape {rho.shape})"
    if not np.all(np.isfinite(rho)):
        return "non-finite entries"
    defect = linalg.max_norm(rho - rho.conj().T)
    if defect > HERMITIAN_TOL:
        return f"not Hermitian (defect {defect:.3e})"
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > TRACE_TOL:
        return f"trace {tr:.12g} != 1"
    if not linalg.is_psd(linalg.hermitianize(rho), PSD_TOL):
        lam = linalg.eig_hermitian(linalg.hermitianize(rho)).lambda_min
        return f"not positive semidefinite (lambda_min {lam:.3e})"
    return None


@dataclass(frozen=True, eq=False)
class MixedFamily:
    """Density matrices rho_i on C^d, stacked as an (N, d, d) array."""

    rhos: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        rhos = np.array(self.rhos, dtype=complex)
        if rhos.ndim == 2:
            rhos = rhos[None]
        if rhos.ndim != 3 or rhos.shape[0] < 1:
            raise InvalidDensityMatrix(f"expected an (N, d, d) stack, got shape {rhos.shape}")
        for k, rho in enumerate(rhos):
            problem = density_diagnostic(rho)
            if problem:
                raise InvalidDensityMatrix(f"rho[{k}]: {problem}")
            rhos[k] = linalg.hermitianize(rho)
        rhos.setflags(write=False)
        object.__setattr__(self, "rhos", rhos)
        labels = self.labels or _default_labels(rhos.shape[0])
        object.__setattr__(self, "labels", _check_labels(labels, rhos.shape[0]))

    @classmethod
    def from_pure(cls, states, labels: Sequence = ()) -> "MixedFamily":
        psi = np.asarray(states, dtype=complex)
        psi = psi / np.linalg.norm(psi, axis=1)[:, None]
        return cls(np.einsum("ia,ib->iab", psi, psi.conj()), tuple(labels))

    @property
    def dim(self) -> int:
        return self.rhos.shape[1]

    def __len__(self) -> int:
        return self.rhos.shape[0]


@dataclass(frozen=True, eq=False)
class MixedVerdict:
    distinguishable: bool
    witnesses: tuple[np.ndarray | None, ...]
    failing_index: str | None
    labels: tuple[str, ...]
    kernel_test: tuple[bool, ...]
    range_test: tuple[bool, ...]
    tolerance_used: float

    @property
    def criteria_agree(self) -> bool:
        return self.kernel_test == self.range_test

    def to_dict(self) -> dict:
        return {
            "distinguishable": self.distinguishable,
            "failing_index": self.failing_index,
            "labels": list(self.labels),
            "witnesses": [
                None if w is None else [[float(z.real), float(z.imag)] for z in w] for w in self.witnesses
            ],
            "kernel_test": list(self.kernel_test),
            "range_test": list(self.range_test),
            "criteria_agree": self.criteria_agree,
            "tolerance_used": self.tolerance_used,
        }


def _ranges(family: MixedFamily, tol_rel: float) -> list[np.ndarray]:
    return [linalg.range_basis(rho, tol_rel) for rho in family.rhos]


def _stack(bases: list[np.ndarray], d: int) -> np.ndarray:
    return np.hstack(bases) if bases else np.zeros((d, 0), dtype=complex)


def _complement(basis: np.ndarray, d: int, tol_rel: float) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(columns)."""
    if basis.shape[1] == 0:
        return np.eye(d, dtype=complex)
    _, null = linalg.rank_and_nullspace(basis.conj().T, tol_rel)
    return null


def _rank(basis: np.ndarray, tol_rel: float) -> int:
    if basis.shape[1] == 0:
        return 0
    rank, _ = linalg.rank_and_nullspace(basis, tol_rel)
    return rank


def mixed_verdict(family: MixedFamily, tol_rel: float = DEFAULT_TOL) -> MixedVerdict:
    """Decide unambiguous distinguishability of a finite mixed family.

    For each i the common kernel of the other members is obtained as the
    orthogonal complement of their stacked range bases; rho_i compressed to
    that subspace must be nonzero. The witness is its top eigenvector. The
    range-span rank drop is evaluated independently and must agree.
    """
    d, n = family.dim, len(family)
    ranges = _ranges(family, tol_rel)
    full_rank = _rank(_stack(ranges, d), tol_rel)
    witnesses: list[np.ndarray | None] = []
    kernel_ok, range_ok = [], []
    for i, rho in enumerate(family.rhos):
        others = _stack([r for k, r in enumerate(ranges) if k != i], d)
        kernel = _complement(others, d, tol_rel)
        witness = None
        if kernel.shape[1]:
            compressed = kernel.conj().T @ rho @ kernel
            eig = linalg.eig_hermitian(compressed)
            if eig.lambda_max > tol_rel * max(linalg.eig_hermitian(rho).lambda_max, 0.0):
                w = kernel @ eig.eigenvectors[:, -1]
                witness = w / np.linalg.norm(w)
        witnesses.append(witness)
        kernel_ok.append(witness is not None)
        range_ok.append(_rank(others, tol_rel) < full_rank)
    if kernel_ok != range_ok:
        log.warning("kernel and range criteria disagree at tol %.1e: %s vs %s", tol_rel, kernel_ok, range_ok)
    failing = next((family.labels[i] for i in range(n) if not kernel_ok[i]), None)
    return MixedVerdict(
        distinguishable=all(kernel_ok),
        witnesses=tuple(witnesses),
        failing_index=failing,
        labels=family.labels,
        kernel_test=tuple(kernel_ok),
        range_test=tuple(range_ok),
        tolerance_used=tol_rel,
    )


def build_mixed_povm(family: MixedFamily, verdict: MixedVerdict | None = None):
    """Witness POVM Pi_i = c |e_i><e_i| with c = 1 / ||sum_k |e_k><e_k| ||."""
    from .povm import UnambiguousPOVM

    if verdict is None:
        verdict = mixed_verdict(family)
    if not verdict.distinguishable:
        raise NotDistinguishable(f"no witness for member {verdict.failing_index!r}")
    dyads = [np.outer(e, e.conj()) for e in verdict.witnesses]
    c = 1.0 / linalg.eig_hermitian(sum(dyads)).lambda_max
    return UnambiguousPOVM.dense([c * p for p in dyads], family.labels)
