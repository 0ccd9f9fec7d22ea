"""Coherent states on von Neumann lattices and their square truncations.

Lattice points are n1*omega1 + n2*omega2; the fundamental cell has area
S = Im(conj(omega1) * omega2). Truncation n keeps max(|n1|, |n2|) <= n - 1,
i.e. the vacuum plus n - 1 surrounding square rings, (2n - 1)^2 states.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammainc

from .errors import DegenerateLattice, HypothesisViolated, SizeCap, TailTooLarge
from .pure import DEFAULT_TOL, GramFamily, max_uniform_success

MAX_STATES = 2500
FOCK_TAIL = 1e-14


def coherent_overlap(z, w):
    """<z|w> = exp(-(|z|^2 + |w|^2)/2 + conj(z) w); broadcasts over arrays."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    out = np.exp(-(np.abs(z) ** 2 + np.abs(w) ** 2) / 2 + z.conj() * w)
    return out[()] if out.ndim == 0 else out


def poisson_tail(z: complex, n_max: int) -> float:
    """Probability weight of |z> above Fock level n_max."""
    return float(gammainc(n_max + 1, abs(z) ** 2)) if z != 0 else 0.0


def fock_cutoff(z: complex, tail: float = FOCK_TAIL) -> int:
    """Smallest n_max whose truncation of |z> drops at most ``tail``."""
    n = int(abs(z) ** 2)
    while poisson_tail(z, n) > tail:
        n += 1
    return n


def fock_truncated_state(z: complex, n_max: int, tail: float = FOCK_TAIL) -> np.ndarray:
    """Amplitudes <n|z> for n = 0..n_max, renormalized after truncation.

    Raises TailTooLarge if the discarded weight exceeds ``tail``.
    """
    dropped = poisson_tail(z, n_max)
    if dropped > tail:
        raise TailTooLarge(f"n_max={n_max} drops weight {dropped:.3e} of |{z}> (limit {tail:.0e})")
    amps = np.empty(n_max + 1, dtype=complex)
    amps[0] = math.exp(-abs(z) ** 2 / 2)
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * z / math.sqrt(n)
    return amps / np.linalg.norm(amps)


@dataclass(frozen=True)
class LatticeSpec:
    omega1: complex
    omega2: complex

    def __post_init__(self):
        object.__setattr__(self, "omega1", complex(self.omega1))
        object.__setattr__(self, "omega2", complex(self.omega2))
        if not (np.isfinite(self.omega1) and np.isfinite(self.omega2)):
            raise DegenerateLattice("lattice generators must be finite")
        if self.area <= 0:
            raise DegenerateLattice(
                f"Im(conj(omega1) omega2) = {self.area:.6g} <= 0; generators must be positively oriented"
            )

    @property
    def area(self) -> float:
        return (self.omega1.conjugate() * self.omega2).imag

    @classmethod
    def square(cls, area: float, shear: float = 0.0) -> "LatticeSpec":
        """Square lattice of cell area ``area``; ``shear`` adds shear*omega1 to omega2."""
        s = math.sqrt(area)
        return cls(s, 1j * s + shear * s)


def fundamental_area(spec: LatticeSpec) -> float:
    return spec.area


@dataclass(frozen=True, eq=False)
class LatticeRing:
    n: int
    indices: np.ndarray
    points: np.ndarray

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f"({a},{b})" for a, b in self.indices)


def ring_count(n: int) -> int:
    return (2 * n - 1) ** 2


def lattice_ring(spec: LatticeSpec, n: int) -> LatticeRing:
    """Lattice points with max(|n1|, |n2|) <= n - 1, ordered ring by ring.

    The ordering makes truncation n a leading block of truncation n + 1.
    """
    if n < 1:
        raise ValueError("truncation index n must be >= 1")
    if ring_count(n) > MAX_STATES:
        raise SizeCap(f"n={n} gives {ring_count(n)} states, above the cap of {MAX_STATES}")
    idx = [(a, b) for a in range(-(n - 1), n) for b in range(-(n - 1), n)]
    idx.sort(key=lambda ab: (max(abs(ab[0]), abs(ab[1])), ab[0], ab[1]))
    indices = np.array(idx, dtype=int).reshape(-1, 2)
    points = indices[:, 0] * spec.omega1 + indices[:, 1] * spec.omega2
    return LatticeRing(n, indices, points)


def coherent_gram(points) -> np.ndarray:
    pts = np.asarray(points, dtype=complex)
    g = coherent_overlap(pts[:, None], pts[None, :])
    np.fill_diagonal(g, 1.0)
    return g


def ring_family(spec: LatticeSpec, n: int) -> GramFamily:
    ring = lattice_ring(spec, n)
    return GramFamily(coherent_gram(ring.points), ring.labels)


def gaussian_sum_terms(spec: LatticeSpec, cutoff: int) -> tuple[float, float]:
    """Finite part and certified tail of sum_{(m,n) != 0} exp(-|Omega_mn|^2 / 2).

    The finite part runs over 0 < max(|m|, |n|) <= cutoff. Beyond it,
    |Omega_mn|^2 >= S^2 / (2 max|omega|^2) (m^2 + n^2), so each term is at
    most exp(-c (m^2 + n^2)) with c = S^2 / (4 max|omega|^2). That outer
    sum equals theta^2 - theta_K^2 with theta_K the truncated theta series,
    and the theta tail is dominated by its integral.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    k = np.arange(-cutoff, cutoff + 1)
    m, n = np.meshgrid(k, k, indexing="ij")
    omega = m * spec.omega1 + n * spec.omega2
    terms = np.exp(-np.abs(omega) ** 2 / 2)
    partial = float(terms.sum() - 1.0)

    c = spec.area**2 / (4 * max(abs(spec.omega1), abs(spec.omega2)) ** 2)
    theta_k = float(np.sum(np.exp(-c * k.astype(float) ** 2)))
    theta_tail = math.sqrt(math.pi / c) * float(erfc(math.sqrt(c) * cutoff))
    tail = (theta_k + theta_tail) ** 2 - theta_k**2
    return partial, tail


def gaussian_sum_bound(spec: LatticeSpec, cutoff: int = 20) -> float:
    """Certified lower bound on A = 1 - sum_{(m,n) != 0} exp(-|Omega_mn|^2 / 2).

    Whenever A > 0 the whole lattice has Riesz-Fischer bound A. The value
    may be negative, in which case it certifies nothing.
    """
    partial, tail = gaussian_sum_terms(spec, cutoff)
    return 1.0 - partial - tail


def closed_form_bound(spec: LatticeSpec) -> float:
    """2 - (1 + 2 sqrt(pi) / (sin arg(conj(w1) w2) * min|w_i|))^2, valid for S > pi."""
    s = spec.area
    if s <= math.pi:
        raise HypothesisViolated(f"closed-form bound needs S > pi, got S = {s:.6g}")
    r1, r2 = abs(spec.omega1), abs(spec.omega2)
    sin_arg = s / (r1 * r2)
    return 2.0 - (1.0 + 2.0 * math.sqrt(math.pi) / (sin_arg * min(r1, r2))) ** 2


def two_state_upper_bound(spec: LatticeSpec) -> float:
    """min over Omega in {omega1, omega2} of 1 - |<0|Omega>|."""
    return min(1.0 - math.exp(-abs(w) ** 2 / 2) for w in (spec.omega1, spec.omega2))


@dataclass(frozen=True)
class ScanRow:
    n: int
    count: int
    S: float
    q_n: float
    collapsed: bool
    gaussian_sum_bound: float
    closed_form_bound: float | None
    upper_bound: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "count": self.count,
            "S": self.S,
            "q_n": self.q_n,
            "collapsed_flag": self.collapsed,
            "gaussian_sum_bound": self.gaussian_sum_bound,
            "closed_form_bound": self.closed_form_bound,
            "upper_bound": self.upper_bound,
        }


@dataclass(frozen=True)
class ThresholdScan:
    spec: LatticeSpec
    rows: tuple[ScanRow, ...]

    @property
    def q(self) -> np.ndarray:
        return np.array([r.q_n for r in self.rows])

    def is_monotone(self, slack: float = 1e-12) -> bool:
        q = self.q
        return bool(np.all(np.diff(q) <= slack))


def threshold_scan(
    spec: LatticeSpec,
    n_max: int,
    tol: float = DEFAULT_TOL,
    cutoff: int = 20,
    workers: int = 1,
) -> ThresholdScan:
    """Maximum uniform success probability q_n for n = 1..n_max.

    Rows with lambda_min at or below ``tol`` report q_n = 0 and set the
    collapsed flag. Rows are independent; ``workers > 1`` computes them in a
    thread pool, and output order is always n = 1..n_max.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    outer = ring_family(spec, n_max)
    lower = gaussian_sum_bound(spec, cutoff)
    try:
        closed = closed_form_bound(spec)
    except HypothesisViolated:
        closed = None
    upper = two_state_upper_bound(spec)

    def row(n: int) -> ScanRow:
        count = ring_count(n)
        q = max_uniform_success(outer.sub(range(count)), tol)
        return ScanRow(n, count, spec.area, q, q == 0.0, lower, closed, upper)

    ns = range(1, n_max + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(row, ns))
    else:
        rows = tuple(row(n) for n in ns)
    return ThresholdScan(spec, rows)
