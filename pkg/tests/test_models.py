import pickle

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from altunitary import models, verify
from altunitary.models import PAULI_X

SX_N2 = np.sqrt(2.0)


def test_two_level_endpoints_and_gap(two_level):
    d = two_level.decompose([0.0, 1.0])
    np.testing.assert_allclose(d.eigenvectors[:, 0], [1, 0])
    assert models.gap_at(two_level, [0.2, 0.0]) == pytest.approx(0.4, abs=1e-14)


def test_two_level_linearity(two_level):
    diff = two_level.hamiltonian_at([0.1, 0.3]) - two_level.hamiltonian_at([0.0, 0.3])
    np.testing.assert_allclose(diff, 0.1 * -PAULI_X, atol=1e-15)


def test_two_level_schedule():
    sched = models.two_level_schedule(0.2, 1.0, 2)
    np.testing.assert_allclose(sched(0.0), [0, 1], atol=1e-15)
    np.testing.assert_allclose(sched(1.0), [0, -1], atol=1e-15)
    np.testing.assert_allclose(sched(0.5), [0.2, 0], atol=1e-15)
    np.testing.assert_allclose(sched.slices, [[0, 1], [0.2, 0], [0, -1]], atol=1e-15)


@pytest.mark.parametrize("hx0,hz0", [(0.0, 1.0), (-0.1, 1.0), (1.5, 1.0)])
def test_two_level_parameter_validation(hx0, hz0):
    with pytest.raises(ValueError):
        models.two_level_family(hx0, hz0)


def test_wrong_parameter_count(two_level):
    with pytest.raises(ValueError, match="parameter"):
        two_level.hamiltonian_at([0.1])


def test_pspin_schedule_slices():
    np.testing.assert_allclose(models.pspin_schedule(6).slices[:, 0], np.arange(7) / 6)
    np.testing.assert_allclose(models.pspin_schedule(1).slices[:, 0], [0, 1])
    assert models.pspin_schedule(1)(0.5)[0] == 0.5
    with pytest.raises(ValueError):
        models.pspin_schedule(0)


def test_dicke_n2_transverse_offdiagonal_matches_bruteforce():
    _, sx = models.dicke_operators(2)
    np.testing.assert_allclose(np.diag(sx, 1), [SX_N2, SX_N2])
    full_z, full_x = verify.full_space_operators(2)
    P = verify.symmetric_basis(2)
    np.testing.assert_allclose(P.T @ full_x @ P, sx, atol=1e-14)


@pytest.mark.parametrize("N", range(2, 11))
@pytest.mark.parametrize("p", [2, 3])
def test_dicke_sector_oracle(N, p):
    assert verify.dicke_oracle_deviation(N, p) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(-1, 2), d=st.floats(-1, 1), N=st.integers(2, 30), p=st.sampled_from([2, 3]))
def test_pspin_linearity(lam, d, N, p):
    fam = models.pspin_family(N, p)
    diff = fam.hamiltonian_at([lam + d]) - fam.hamiltonian_at([lam])
    np.testing.assert_allclose(diff, d * fam.gradient_at([lam])[0], atol=1e-9 * N)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-1, 1), b=st.floats(-1, 1), da=st.floats(-1, 1), db=st.floats(-1, 1))
def test_two_level_linearity_property(a, b, da, db):
    fam = models.two_level_family(0.2, 1.0)
    diff = fam.hamiltonian_at([a + da, b + db]) - fam.hamiltonian_at([a, b])
    np.testing.assert_allclose(diff, fam.directional_gradient([a, b], [da, db]), atol=1e-14)


@pytest.mark.parametrize("N", [10, 50, 100])
def test_p2_endpoint_degenerate(N):
    e = models.pspin_family(N, 2).decompose([1.0]).eigenvalues
    assert e[1] - e[0] <= 1e-10
    assert e[2] - e[0] > 1.0


def test_families_pickle():
    fam = models.pspin_family(8, 3)
    back = pickle.loads(pickle.dumps(fam))
    np.testing.assert_array_equal(back.hamiltonian_at([0.3]), fam.hamiltonian_at([0.3]))
    sched = pickle.loads(pickle.dumps(models.two_level_schedule(0.1, 1.0, 4)))
    np.testing.assert_allclose(sched(0.5), [0.1, 0.0], atol=1e-15)


def test_min_gap_two_level_equals_twice_transverse_field():
    fam = models.two_level_family(0.05, 1.0)
    assert models.min_gap(fam, models.two_level_schedule(0.05, 1.0, 1)) == pytest.approx(0.1, abs=1e-6)


def _fine_scan(fam, lo, hi, n):
    xs = np.linspace(lo, hi, n)
    return min(models.gap_at(fam, [x]) for x in xs)


@pytest.mark.parametrize("N,window", [(50, (0.40, 0.46)), (100, (0.4315, 0.4325))])
def test_min_gap_p3_matches_fine_scan(N, window):
    # oracle: brute-force eigvalsh on a dense grid inside the transition window
    fam = models.pspin_family(N, 3)
    got = models.min_gap(fam, models.pspin_schedule(1))
    ref = _fine_scan(fam, *window, 20001)
    assert got <= ref * (1 + 1e-9)
    assert got == pytest.approx(ref, rel=1e-4)


def test_reference_gap_scaling_forms():
    assert models.reference_gap(50, 3) == pytest.approx(50 * 2 ** (-0.126 * 50))
    assert models.reference_gap(100, 2) == pytest.approx(100 ** (2 / 3))
    with pytest.raises(ValueError):
        models.reference_gap(10, 4)


def test_pspin_validation():
    with pytest.raises(ValueError):
        models.pspin_family(1, 3)
    with pytest.raises(ValueError):
        models.pspin_family(10, 4)
