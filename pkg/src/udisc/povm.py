"""Unambiguous-measurement POVMs: construction, validation and diagnostics.

A POVM is stored either densely (d x d operators on the ambient space) or in
span-coefficient form, where each element is
``Pi_i = sum_ab C_i[a, b] |psi_a><psi_b|`` and the inconclusive element is
implicitly ``1 - sum_i Pi_i``. Off the span that implicit element is the
identity, so only its span block is ever checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import linalg
from .errors import IndexMismatch, NotAPOVM, NotDistinguishing
from .mixed import MixedFamily
from .pure import DEFAULT_TOL, GramFamily, StateFamily, dual_family, gram

POSITIVITY_TOL = 1e-9
UNAMBIGUITY_TOL = 1e-10
NORMALIZATION_TOL = 1e-8
LEAK_TOL = 1e-9

Family = Union[StateFamily, GramFamily, MixedFamily]


@dataclass(frozen=True, eq=False)
class UnambiguousPOVM:
    elements: tuple[np.ndarray, ...]
    labels: tuple[str, ...]
    representation: str = "span"
    inconclusive: np.ndarray | None = None
    gram: np.ndarray | None = None

    def __post_init__(self):
        if self.representation not in ("span", "dense"):
            raise ValueError(f"unknown representation {self.representation!r}")
        if len(self.elements) != len(self.labels):
            raise IndexMismatch(f"{len(self.elements)} elements for {len(self.labels)} labels")
        elements = tuple(linalg.as_cmatrix(e) for e in self.elements)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if self.representation == "span":
            if self.gram is None:
                raise ValueError("span-coefficient POVM needs the family Gram matrix")
            object.__setattr__(self, "gram", linalg.as_cmatrix(self.gram))
        elif self.inconclusive is None:
            d = elements[0].shape[0]
            object.__setattr__(self, "inconclusive", np.eye(d) - sum(elements))

    @classmethod
    def dense(cls, elements: Sequence[np.ndarray], labels: Sequence, inconclusive=None):
        return cls(tuple(elements), tuple(labels), "dense", inconclusive)

    def scaled(self, factor: float) -> "UnambiguousPOVM":
        """Shrink every outcome element by ``factor``; the remainder goes to '?'."""
        elements = tuple(factor * e for e in self.elements)
        if self.representation == "span":
            return UnambiguousPOVM(elements, self.labels, "span", gram=self.gram)
        d = elements[0].shape[0]
        return UnambiguousPOVM(elements, self.labels, "dense", np.eye(d) - sum(elements))

    def to_dense(self, family: StateFamily) -> "UnambiguousPOVM":
        """Materialize d x d operators from the ambient vectors of ``family``."""
        if self.representation == "dense":
            return self
        psi = family.states
        elements = tuple(psi.T @ c @ psi.conj() for c in self.elements)
        return UnambiguousPOVM.dense(elements, self.labels)


@dataclass(frozen=True, eq=False)
class ConfusionReport:
    """Outcome probabilities q_ji = tr[Pi_j rho_i]; last row is '?'."""

    labels: tuple[str, ...]
    q_matrix: np.ndarray
    distinguishes: bool
    uniform: bool
    q_uniform: float | None
    diagnostics: dict = field(default_factory=dict)

    @property
    def q_success(self) -> np.ndarray:
        return np.diag(self.q_matrix[:-1]).copy()

    @property
    def q_inconclusive(self) -> np.ndarray:
        return self.q_matrix[-1].copy()

    @property
    def q_min(self) -> float:
        return float(np.min(self.q_success))

    @property
    def max_offdiagonal(self) -> float:
        off = self.q_matrix[:-1] - np.diag(self.q_success)
        return float(np.max(np.abs(off))) if off.size else 0.0

    @property
    def outcomes(self) -> tuple[str, ...]:
        return self.labels + ("?",)

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "outcomes": list(self.outcomes),
            "q_matrix": self.q_matrix.tolist(),
            "q_success": self.q_success.tolist(),
            "q_inconclusive": self.q_inconclusive.tolist(),
            "distinguishes": self.distinguishes,
            "uniform": self.uniform,
            "q_uniform": self.q_uniform,
            "diagnostics": dict(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConfusionReport":
        return cls(
            labels=tuple(data["labels"]),
            q_matrix=np.asarray(data["q_matrix"], dtype=float),
            distinguishes=bool(data["distinguishes"]),
            uniform=bool(data["uniform"]),
            q_uniform=data["q_uniform"],
            diagnostics=dict(data.get("diagnostics", {})),
        )

    def table(self) -> list[list]:
        """Rows = outcomes (incl. '?'), columns = input labels."""
        header = ["outcome", *self.labels]
        rows = [[o, *map(float, self.q_matrix[k])] for k, o in enumerate(self.outcomes)]
        return [header, *rows]


def _gram_frame(gf: GramFamily, tol_rel: float = linalg.RANK_TOL):
    """Orthonormal coordinates for span{psi_i} from G alone.

    Returns ``(B, V, lam)`` where the columns of ``B = diag(sqrt(lam)) V^H``
    are the coordinates of psi_i in the basis E = Psi V diag(lam^-1/2).
    """
    lam, v = linalg.psd_sqrt_factor(gf.gram, tol_rel, eig=gf.eig)
    b = np.sqrt(lam)[:, None] * v.conj().T
    return b, v, lam


def _family_gram(family: StateFamily | GramFamily) -> GramFamily:
    return gram(family) if isinstance(family, StateFamily) else family


def _pure_frame(povm: UnambiguousPOVM, family: StateFamily | GramFamily):
    """Element blocks, inconclusive block and state coordinates in one frame."""
    if povm.representation == "dense":
        if not isinstance(family, StateFamily):
            raise IndexMismatch("a dense POVM needs the ambient vectors of the family")
        if povm.elements[0].shape[0] != family.dim:
            raise IndexMismatch(f"POVM acts on C^{povm.elements[0].shape[0]}, states on C^{family.dim}")
        return list(povm.elements), povm.inconclusive, family.states.T, True
    gf = _family_gram(family)
    if povm.gram.shape != gf.gram.shape or linalg.max_norm(povm.gram - gf.gram) > NORMALIZATION_TOL:
        raise IndexMismatch("span-coefficient POVM was built for a different family")
    b, _, _ = _gram_frame(gf)
    blocks = [b @ c @ b.conj().T for c in povm.elements]
    rest = np.eye(b.shape[0]) - sum(blocks)
    return blocks, rest, b, False


def _check_positive(blocks, rest, explicit_rest: bool) -> None:
    for k, m in enumerate(blocks):
        if not linalg.is_psd(m, POSITIVITY_TOL * max(1.0, linalg.max_norm(m))):
            raise NotAPOVM(f"element {k} is not positive semidefinite")
    if not linalg.is_psd(rest, POSITIVITY_TOL * max(1.0, linalg.max_norm(rest))):
        raise NotAPOVM("inconclusive element is not positive semidefinite")
    if explicit_rest:
        d = rest.shape[0]
        total = sum(blocks) + rest
        if linalg.max_norm(total - np.eye(d)) > NORMALIZATION_TOL:
            raise NotAPOVM("elements do not sum to the identity")


def _expect(m: np.ndarray, y: np.ndarray) -> np.ndarray:
    """<y_i|M|y_i> for every column y_i."""
    return np.real(np.einsum("ai,ab,bi->i", y.conj(), m, y))


def _summarize(labels, q: np.ndarray, diagnostics: dict) -> ConfusionReport:
    n = len(labels)
    success = np.diag(q[:n])
    off = q[:n] - np.diag(success)
    distinguishes = bool(
        (np.max(np.abs(off)) if n > 1 else 0.0) <= UNAMBIGUITY_TOL and np.all(success > UNAMBIGUITY_TOL)
    )
    uniform = distinguishes and float(np.ptp(success)) <= POSITIVITY_TOL
    q_uniform = float(np.mean(success)) if uniform else None
    if not distinguishes:
        diagnostics["failed"] = (
            "outcome confusion above tolerance"
            if n > 1 and np.max(np.abs(off)) > UNAMBIGUITY_TOL
            else "some success probability vanishes"
        )
    return ConfusionReport(tuple(labels), q, distinguishes, uniform, q_uniform, diagnostics)


def validate(povm: UnambiguousPOVM, family: Family) -> ConfusionReport:
    """Confusion probabilities of ``povm`` on ``family`` plus zero-leak checks.

    Raises NotAPOVM on a positivity or normalization violation and
    IndexMismatch if the outcome labels do not match the family labels.
    """
    if tuple(povm.labels) != tuple(family.labels):
        raise IndexMismatch(f"POVM labels {povm.labels} do not match family labels {family.labels}")
    if isinstance(family, MixedFamily):
        return _validate_mixed(povm, family)

    blocks, rest, y, explicit = _pure_frame(povm, family)
    _check_positive(blocks, rest, explicit)
    n = len(blocks)
    q = np.vstack([_expect(m, y) for m in blocks] + [_expect(rest, y)])

    success = np.diag(q[:n])
    leak = 0.0
    for j, m in enumerate(blocks):
        images = np.linalg.norm(m @ y, axis=0)
        images[j] = 0.0
        leak = max(leak, float(images.max()))
    rest_leak = 0.0
    for i in np.flatnonzero(success >= 1.0 - NORMALIZATION_TOL):
        rest_leak = max(rest_leak, float(np.linalg.norm(rest @ y[:, i])))
    cross = 0.0
    for k, m in enumerate(blocks):
        target = np.zeros((n, n))
        target[k, k] = success[k]
        cross = max(cross, linalg.max_norm(y.conj().T @ m @ y - target))
    diagnostics = {
        "max_leak": leak,
        "max_inconclusive_leak_on_perfect": rest_leak,
        "max_cross_term": cross,
    }
    report = _summarize(family.labels, q, diagnostics)
    leak_ok = leak <= LEAK_TOL and rest_leak <= NORMALIZATION_TOL and cross <= NORMALIZATION_TOL
    report.diagnostics["zero_leak_checks_pass"] = bool(leak_ok) if report.distinguishes else None
    return report


def _validate_mixed(povm: UnambiguousPOVM, family: MixedFamily) -> ConfusionReport:
    if povm.representation != "dense":
        raise IndexMismatch("mixed families need a dense POVM")
    if povm.elements[0].shape[0] != family.dim:
        raise IndexMismatch(f"POVM acts on C^{povm.elements[0].shape[0]}, states on C^{family.dim}")
    blocks, rest = list(povm.elements), povm.inconclusive
    _check_positive(blocks, rest, True)
    rhos = family.rhos
    q = np.array([[np.real(np.trace(m @ rho)) for rho in rhos] for m in [*blocks, rest]])
    return _summarize(family.labels, q, {})


def build_optimal_povm(family: StateFamily | GramFamily, tol_rel: float = DEFAULT_TOL) -> UnambiguousPOVM:
    """Optimal uniform-success POVM, Pi_j = |phi_j><phi_j| / ||sum_k |phi_k><phi_k| ||.

    Returned in span-coefficient form; call ``to_dense`` with the ambient
    family to materialize matrices. Raises NotMinimal for dependent families.
    """
    gf = _family_gram(family)
    dual = dual_family(gf, tol_rel)
    weight = gf.lambda_min
    d = dual.coeffs
    elements = tuple(weight * np.outer(d[:, i], d[:, i].conj()) for i in range(len(gf)))
    return UnambiguousPOVM(elements, gf.labels, "span", gram=gf.gram)


def dual_projection_check(povm: UnambiguousPOVM, family: StateFamily | GramFamily) -> float:
    """Largest max-norm gap between P Pi_i P and q_i |phi_i><phi_i| on the span.

    Raises NotDistinguishing unless ``povm`` unambiguously distinguishes the
    family.
    """
    report = validate(povm, family)
    if not report.distinguishes:
        raise NotDistinguishing(report.diagnostics.get("failed", "POVM does not distinguish the family"))
    gf = _family_gram(family)
    b, v, lam = _gram_frame(gf)
    if povm.representation == "dense":
        e = family.states.T @ v / np.sqrt(lam)
        blocks = [e.conj().T @ m @ e for m in povm.elements]
    else:
        blocks = [b @ c @ b.conj().T for c in povm.elements]
    phi = b @ dual_family(gf).coeffs
    residual = 0.0
    for i, m in enumerate(blocks):
        target = report.q_success[i] * np.outer(phi[:, i], phi[:, i].conj())
        residual = max(residual, linalg.max_norm(m - target))
    return residual
