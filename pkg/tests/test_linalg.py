import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from altunitary import linalg
from altunitary.linalg import (
    HermiticityError, evolve, fidelity, normalize, phase_distance, populations,
    shannon_entropy, spectral_decompose, subspace_fidelity, unitary,
)
from conftest import random_hermitian, random_state

X = np.array([[0, 1], [1, 0]], dtype=float)
Z = np.diag([1.0, -1.0])


def test_diagonal_input_gives_standard_basis():
    d = spectral_decompose(np.diag([-1.0, 1.0]))
    np.testing.assert_array_equal(d.eigenvalues, [-1.0, 1.0])
    np.testing.assert_array_equal(d.eigenvectors, np.eye(2))


def test_minus_z_ground_state_is_up():
    d = spectral_decompose(-Z)
    np.testing.assert_allclose(d.eigenvalues, [-1, 1])
    np.testing.assert_allclose(d.eigenvectors[:, 0], [1, 0])


def test_transverse_field_gap():
    e = spectral_decompose(-0.2 * X).eigenvalues
    assert e[1] - e[0] == pytest.approx(0.4, abs=1e-14)


def test_real_input_keeps_real_vectors():
    assert not np.iscomplexobj(spectral_decompose(X).eigenvectors)


def test_phase_convention_first_component_positive(rng):
    d = spectral_decompose(random_hermitian(rng, 6))
    for col in d.eigenvectors.T:
        first = col[np.argmax(np.abs(col) > 1e-10)]
        assert abs(first.imag) < 1e-14 and first.real > 0


def test_non_hermitian_names_entry():
    h = np.array([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(HermiticityError, match=r"H\[\d,\d\]"):
        spectral_decompose(h)


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros(3), np.array([[np.nan]])])
def test_malformed_operators_rejected(bad):
    with pytest.raises(HermiticityError):
        linalg.as_hermitian(bad)


def test_evolve_zero_time_identity(rng):
    psi = random_state(rng, 4)
    np.testing.assert_allclose(evolve(random_hermitian(rng, 4), 0.0, psi), psi, atol=1e-14)


def test_evolve_z_pi_global_phase():
    psi = np.array([1, 1]) / np.sqrt(2)
    out = evolve(Z, np.pi, psi)
    np.testing.assert_allclose(out, -psi, atol=1e-14)
    assert fidelity(out, psi) == pytest.approx(1.0, abs=1e-14)


def test_evolve_x_half_pi_flips_against_expm():
    out = evolve(X, np.pi / 2, np.array([1.0, 0.0]))
    np.testing.assert_allclose(out, expm(-1j * np.pi / 2 * X) @ [1, 0], atol=1e-14)
    assert abs(out[1]) ** 2 == pytest.approx(1.0, abs=1e-14)


def test_evolve_matches_expm_oracle(rng):
    h, psi = random_hermitian(rng, 9), random_state(rng, 9)
    np.testing.assert_allclose(evolve(h, -0.73, psi), expm(0.73j * h) @ psi, atol=1e-12)


def test_evolve_errors(rng):
    with pytest.raises(ValueError, match="dimension"):
        evolve(np.eye(3), 1.0, np.ones(2) / np.sqrt(2))
    with pytest.raises(ValueError, match="finite"):
        evolve(np.eye(2), np.inf, np.array([1.0, 0.0]))


def test_fidelity_examples():
    up, down = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    assert fidelity(up, up) == 1.0
    assert fidelity(up, down) == 0.0
    assert fidelity(up, plus) == pytest.approx(0.5, abs=1e-15)


def test_fidelity_rejects_unnormalized():
    with pytest.raises(ValueError, match="not normalized"):
        fidelity(np.array([1.0, 1.0]), np.array([1.0, 0.0]))


def test_populations_examples(rng):
    d = spectral_decompose(random_hermitian(rng, 5))
    v = d.eigenvectors
    np.testing.assert_allclose(populations(d, v[:, 0]), [1, 0, 0, 0, 0], atol=1e-14)
    mix = (v[:, 0] + v[:, 1]) / np.sqrt(2)
    np.testing.assert_allclose(populations(d, mix), [0.5, 0.5, 0, 0, 0], atol=1e-14)


def test_populations_sum_to_one_for_100_random_states(rng):
    d = spectral_decompose(random_hermitian(rng, 12))
    for _ in range(100):
        assert populations(d, random_state(rng, 12)).sum() == pytest.approx(1.0, abs=1e-10)


def test_subspace_fidelity_sums_degenerate_block():
    basis = np.eye(3)[:, :2]
    psi = np.array([0.6, 0.0, 0.8])
    assert subspace_fidelity(basis, psi) == pytest.approx(0.36)


def test_phase_distance_ignores_global_phase(rng):
    psi = random_state(rng, 4)
    assert phase_distance(np.exp(0.7j) * psi, psi) == pytest.approx(0.0, abs=1e-7)


def test_normalize_zero_rejected():
    with pytest.raises(ValueError):
        normalize(np.zeros(3))


def test_shannon_entropy():
    assert shannon_entropy([1.0, 0.0]) == 0.0
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(np.log(2))


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, dim=st.integers(1, 128))
def test_reconstruction_error(seed, dim):
    h = random_hermitian(np.random.default_rng(seed), dim)
    assert np.max(np.abs(spectral_decompose(h).reconstruct() - h)) <= 1e-10 * max(1, np.abs(h).max())


@settings(max_examples=50, deadline=None)
@given(seed=seeds, dim=st.integers(1, 16), t1=st.floats(-50, 50), t2=st.floats(-50, 50))
def test_norm_and_group_property(seed, dim, t1, t2):
    rng = np.random.default_rng(seed)
    h, psi = random_hermitian(rng, dim), random_state(rng, dim)
    once = evolve(h, t1 + t2, psi)
    twice = evolve(h, t1, evolve(h, t2, psi))
    assert abs(np.linalg.norm(once) - 1) <= 1e-12
    np.testing.assert_allclose(twice, once, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, dim=st.integers(1, 32))
def test_populations_property(seed, dim):
    rng = np.random.default_rng(seed)
    d = spectral_decompose(random_hermitian(rng, dim))
    assert populations(d, random_state(rng, dim)).sum() == pytest.approx(1.0, abs=1e-10)


def test_unitary_is_unitary(rng):
    u = unitary(spectral_decompose(random_hermitian(rng, 7)), 3.1)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(7), atol=1e-12)
