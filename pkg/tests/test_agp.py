import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from altunitary import agp, models, verify
from altunitary.models import HamiltonianFamily, PAULI_Z

PAULI_Y = np.array([[0, -1j], [1j, 0]])


def _max_dev(a, b):
    return max(float(np.max(np.abs(x - y))) for x, y in zip(a.components, b.components))


@pytest.fixture
def commuting():
    # H = lam Z, grad H = Z: no level mixing
    return HamiltonianFamily(np.zeros((2, 2)), (PAULI_Z,))


def test_exact_two_level_hz_component_is_pauli_y(two_level):
    a = agp.exact_agp(two_level, [0.2, 0.0]).components[1]
    coeff = np.trace(a @ PAULI_Y) / 2
    np.testing.assert_allclose(a, coeff * PAULI_Y, atol=1e-14)
    assert abs(coeff) > 0.1


def test_exact_two_level_matches_finite_difference(two_level):
    fd = verify.finite_difference_agp(two_level, [0.2, 0.0])
    ex = agp.exact_agp(two_level, [0.2, 0.0]).components
    assert max(np.max(np.abs(x - y)) for x, y in zip(ex, fd)) <= 1e-5


def test_exact_pspin_n6_matches_finite_difference(rng):
    fam = models.pspin_family(6, 3)
    for lam in rng.uniform(0.05, 0.95, 3):
        fd = verify.finite_difference_agp(fam, [lam])
        ex = agp.exact_agp(fam, [lam]).components
        assert np.max(np.abs(ex[0] - fd[0])) <= 1e-5


def test_commuting_family_gives_zero(commuting):
    assert np.all(agp.exact_agp(commuting, [1.0]).components[0] == 0)
    assert np.all(agp.regularized_agp(commuting, [1.0], 0.3).components[0] == 0)
    assert np.all(agp.discretized_agp(commuting, [1.0], 0.3, 50).components[0] == 0)


def test_exact_rejects_degenerate_pair():
    fam = models.pspin_family(10, 2)
    with pytest.raises(agp.DegenerateSpectrumError, match="levels 0 and 1"):
        agp.exact_agp(fam, [1.0])


def test_regularized_degenerate_elements_vanish():
    fam = models.pspin_family(10, 2)
    a = agp.regularized_agp(fam, [1.0], 0.5).components[0]
    assert np.all(np.isfinite(a))
    assert np.allclose(a, a.conj().T, atol=1e-12)


def test_regularized_half_of_exact_when_eta_equals_gap(two_level):
    lam = [0.2, 0.0]  # gap 0.4
    reg = agp.regularized_agp(two_level, lam, 0.4).components
    ex = agp.exact_agp(two_level, lam).components
    for r, e in zip(reg, ex):
        np.testing.assert_allclose(r, 0.5 * e, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(eta_frac=st.floats(1e-3, 0.5), lam=st.floats(0.1, 0.9))
def test_regularized_relative_error_bound(eta_frac, lam):
    fam = models.pspin_family(6, 3)
    d = fam.decompose([lam])
    gap = float(np.min(np.diff(d.eigenvalues)))  # smallest spacing of any pair
    eta = eta_frac * gap
    v = d.eigenvectors
    ex = v.conj().T @ agp.exact_agp(fam, [lam]).components[0] @ v
    reg = v.conj().T @ agp.regularized_agp(fam, [lam], eta).components[0] @ v
    big = np.abs(ex) > 1e-8
    rel = np.abs(reg[big] - ex[big]) / np.abs(ex[big])
    assert np.all(rel <= eta**2 / gap**2 * (1 + 1e-6))


def test_regularized_slope(two_level):
    assert verify.check_regularized_slope(two_level, [0.2, 0.3]).passed


def test_discretized_matches_dense_construction(two_level):
    fam = models.pspin_family(5, 3)
    for f, lam in ((two_level, [0.2, 0.3]), (fam, [0.4])):
        fast = agp.discretized_agp(f, lam, 0.7, 40)
        slow = agp.discretized_agp_direct(f, lam, 0.7, 40)
        assert _max_dev(fast, slow) <= 1e-12


def test_discretized_two_level_hermitian(two_level):
    a = agp.discretized_agp(two_level, [0.2, 0.0], 0.4, 64)
    for c in a.components:
        assert np.max(np.abs(c - c.conj().T)) <= 1e-12


def test_discretized_monotone_over_decades(two_level):
    lam = [0.2, 0.3]
    eta = models.gap_at(two_level, lam)
    assert verify.check_discretized_convergence(two_level, lam, eta).passed


def test_discretized_error_within_first_order_envelope(two_level):
    # trapezoid at the u -> 0 endpoint: error ~ C/M with an oscillating
    # M^(-i w/eta) phase, so only the envelope M * err is bounded
    lam = [0.2, 0.3]
    eta = models.gap_at(two_level, lam)
    reg = agp.regularized_agp(two_level, lam, eta)
    scaled = [M * _max_dev(agp.discretized_agp(two_level, lam, eta, M), reg)
              for M in (10, 30, 100, 300, 1000, 3000, 10000)]
    assert max(scaled) <= 1.0
    # doubling M never increases the envelope by much
    assert max(scaled[3:]) <= 2 * max(scaled[:3])


def test_discretized_pspin_converges():
    fam = models.pspin_family(8, 3)
    lam = [0.5]
    reg = agp.regularized_agp(fam, lam, 0.5)
    errs = [_max_dev(agp.discretized_agp(fam, lam, 0.5, M), reg) for M in (10, 100, 1000)]
    assert errs[2] < errs[0]
    assert errs[2] <= 20.0 / 1000


@pytest.mark.parametrize("M", [0, 1, 2.5])
def test_discretized_rejects_bad_M(two_level, M):
    with pytest.raises(ValueError):
        agp.discretized_agp(two_level, [0.2, 0.3], 0.4, M)


def test_eta_must_be_positive(two_level):
    with pytest.raises(ValueError):
        agp.regularized_agp(two_level, [0.2, 0.3], 0.0)


def test_along_combines_components(two_level):
    a = agp.exact_agp(two_level, [0.2, 0.3])
    np.testing.assert_allclose(a.along([2.0, -1.0]), 2 * a.components[0] - a.components[1])


def test_suite_passes_on_two_level():
    checks = verify.agp_suite()
    assert all(c.passed for c in checks), [c.line() for c in checks if not c.passed]


def test_suite_passes_on_pspin():
    checks = verify.agp_suite(models.pspin_family(6, 3), [0.4])
    assert all(c.passed for c in checks), [c.line() for c in checks if not c.passed]
