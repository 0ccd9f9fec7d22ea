"""Random instances for property checks and the ``crosscheck`` command."""

from __future__ import annotations

import numpy as np


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_states(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-random unit vectors in C^d as rows."""
    v = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    return v / np.linalg.norm(v, axis=1)[:, None]


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(d: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    """Density matrix of exactly the given rank with a random range."""
    x = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = x @ x.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_mixed(n: int, d: int, rng: np.random.Generator, max_rank: int | None = None) -> np.ndarray:
    top = d if max_rank is None else min(d, max_rank)
    return np.array([random_density(d, int(rng.integers(1, top + 1)), rng) for _ in range(n)])


def random_coherent_point(radius: float, rng: np.random.Generator) -> complex:
    """Uniform point in the disc |z| <= radius."""
    r = radius * np.sqrt(rng.uniform())
    return complex(r * np.exp(2j * np.pi * rng.uniform()))
