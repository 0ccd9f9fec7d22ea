import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from udisc.errors import LengthMismatch, NotMinimal
from udisc.lattice import coherent_overlap, fock_cutoff, fock_truncated_state
from udisc.linalg import eig_hermitian
from udisc.pure import (
    GramFamily,
    Level,
    StateFamily,
    dual_dyad_sum,
    dual_family,
    gram,
    max_uniform_success,
    riesz_fischer_check,
    verdict,
)
from udisc.sampling import random_states, random_unitary

seeds = st.integers(0, 2**32 - 1)


def pair_gram(gamma):
    return GramFamily(np.array([[1, gamma], [np.conj(gamma), 1]]))


def test_orthonormal_pair_gram():
    np.testing.assert_allclose(gram(StateFamily(np.eye(2))).gram, np.eye(2))


def test_angle_pair_gram():
    t = math.pi / 3
    g = gram(StateFamily([[1, 0], [math.cos(t), math.sin(t)]])).gram
    assert abs(g[0, 1] - 0.5) < 1e-15


def test_coherent_pair_gram_via_fock():
    n = fock_cutoff(1.0)
    fam = StateFamily([fock_truncated_state(0, n), fock_truncated_state(1.0, n)])
    g = gram(fam).gram[0, 1]
    assert abs(g - math.exp(-0.5)) < 1e-10
    assert abs(g - coherent_overlap(0, 1)) < 1e-10


def test_state_family_validation():
    with pytest.raises(ValueError):
        StateFamily([[1, 1]])
    with pytest.raises(ValueError):
        StateFamily(np.eye(2), ("a", "a"))
    with pytest.raises(LengthMismatch):
        StateFamily(np.eye(2), ("a",))


def test_gram_family_validation():
    with pytest.raises(ValueError):
        GramFamily([[1, 2], [2, 1]])  # not PSD
    with pytest.raises(ValueError):
        GramFamily([[2, 0], [0, 1]])  # diagonal


def test_dual_identity():
    d = dual_family(GramFamily(np.eye(3)))
    np.testing.assert_allclose(d.coeffs, np.eye(3), atol=1e-15)


def test_dual_two_by_two_inverse():
    d = dual_family(pair_gram(0.5))
    np.testing.assert_allclose(d.coeffs, np.array([[1, -0.5], [-0.5, 1]]) / 0.75, atol=1e-14)


def test_dual_not_minimal():
    v = np.array([1.0, 1e-7])
    fam = StateFamily.from_vectors([[1.0, 0.0], v])
    # lambda_min of this pair is ~ 5e-15
    assert gram(fam).lambda_min < 1e-13
    with pytest.raises(NotMinimal):
        dual_family(gram(fam))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 12), extra=st.integers(0, 6), seed=seeds)
def test_dual_invariants(n, extra, seed):
    rng = np.random.default_rng(seed)
    fam = StateFamily(random_states(n, n + extra, rng))
    gf = gram(fam)
    d = dual_family(gf)
    assert np.max(np.abs(gf.gram @ d.coeffs - np.eye(n))) <= 1e-8 * max(1, 1 / gf.lambda_min)
    phi = d.vectors(fam)
    # <phi_j|psi_i> = delta_ij in the ambient space
    np.testing.assert_allclose(phi.conj() @ fam.states.T, np.eye(n), atol=1e-8 / gf.lambda_min)
    np.testing.assert_allclose(np.linalg.norm(phi, axis=1) ** 2, np.diag(d.gram_inverse).real, rtol=1e-8)


def test_two_state_reference_value():
    g = math.exp(-0.5)
    assert abs(max_uniform_success(pair_gram(g)) - (1 - g)) < 1e-15
    assert abs(max_uniform_success(pair_gram(g)) - 0.393469) < 1e-6


def test_orthonormal_success_is_one():
    assert max_uniform_success(GramFamily(np.eye(5))) == 1.0


def test_c9_lattice_value():
    # frozen from LAPACK on the 9x9 overlap matrix at omega = 2, 2i
    pts = np.array([a * 2 + b * 2j for a in (-1, 0, 1) for b in (-1, 0, 1)])
    g = coherent_overlap(pts[:, None], pts[None, :])
    q = max_uniform_success(GramFamily(g))
    assert abs(q - 0.6476824728769052) < 1e-12


def test_max_uniform_success_dependent_is_zero():
    assert max_uniform_success(GramFamily(np.ones((2, 2)))) == 0.0


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 10), extra=st.integers(0, 5), seed=seeds)
def test_success_equals_inverse_dyad_norm(n, extra, seed):
    rng = np.random.default_rng(seed)
    fam = StateFamily(random_states(n, n + extra, rng))
    gf = gram(fam)
    x = dual_dyad_sum(fam, dual_family(gf))
    assert abs(1 / eig_hermitian(x).lambda_max - max_uniform_success(gf)) <= 1e-9


def test_verdict_examples():
    v = verdict(GramFamily(np.eye(3)))
    assert v.level is Level.PERFECT and v.q_max == 1.0
    psi = random_states(2, 3, np.random.default_rng(1))
    dup = StateFamily(np.vstack([psi, psi[:1]]))
    assert verdict(gram(dup)).level is Level.NONE
    v = verdict(pair_gram(0.9))
    assert v.level is Level.UNIFORM
    assert abs(v.q_max - 0.1) < 1e-14


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 8), seed=seeds)
def test_verdict_invariants(n, seed):
    rng = np.random.default_rng(seed)
    gf = gram(StateFamily(random_states(n, int(rng.integers(1, 10)), rng)))
    v = verdict(gf)
    if v.level is Level.PERFECT:
        assert abs(v.q_max - 1) <= v.tolerance_used
    if v.level is Level.NONE:
        assert v.lambda_min <= v.tolerance_used


def test_riesz_fischer_examples():
    gf = pair_gram(0.3 + 0.4j)
    eig = eig_hermitian(gf.gram)
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert riesz_fischer_check(gf, a, eig.lambda_min)
    bottom = eig.eigenvectors[:, 0]
    assert not riesz_fischer_check(gf, bottom, eig.lambda_min + 0.01)
    assert riesz_fischer_check(gf, np.zeros(2), 100.0)
    with pytest.raises(LengthMismatch):
        riesz_fischer_check(gf, np.zeros(3), 0.1)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 10), seed=seeds)
def test_rayleigh_characterization(n, seed):
    rng = np.random.default_rng(seed)
    gf = gram(StateFamily(random_states(n, n + 2, rng)))
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    ratio = np.real(a.conj() @ gf.gram @ a) / np.real(a.conj() @ a)
    assert gf.lambda_min <= ratio + 1e-12


@settings(max_examples=60, deadline=None)
@given(d=st.integers(1, 20), seed=seeds)
def test_two_state_closed_form(d, seed):
    rng = np.random.default_rng(seed)
    psi = random_states(2, d, rng)
    q = max_uniform_success(gram(StateFamily(psi)))
    assert abs(q - (1 - abs(np.vdot(psi[0], psi[1])))) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 30), seed=seeds)
def test_dual_bessel_reciprocity(n, seed):
    rng = np.random.default_rng(seed)
    gf = gram(StateFamily(random_states(n, n + int(rng.integers(0, 10)), rng)))
    dual = dual_family(gf)
    # Gram of the duals is D^H G D = G^-1
    dual_gram = dual.coeffs.conj().T @ gf.gram @ dual.coeffs
    np.testing.assert_allclose(dual_gram, dual.gram_inverse, atol=1e-8 / gf.lambda_min**2)
    assert abs(eig_hermitian(dual.gram_inverse).lambda_max * gf.lambda_min - 1) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), extra=st.integers(0, 4), seed=seeds)
def test_unitary_invariance(n, extra, seed):
    rng = np.random.default_rng(seed)
    fam = StateFamily(random_states(n, n + extra, rng))
    moved = fam.transformed(random_unitary(fam.dim, rng))
    np.testing.assert_allclose(gram(moved).gram, gram(fam).gram, atol=1e-10)
    assert verdict(gram(moved)).level is verdict(gram(fam)).level


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 10), seed=seeds)
def test_deletion_never_decreases_success(n, seed):
    rng = np.random.default_rng(seed)
    gf = gram(StateFamily(random_states(n, int(rng.integers(2, 12)), rng)))
    q = max_uniform_success(gf)
    for k in range(n):
        assert max_uniform_success(gf.delete(k)) >= q - 1e-12
