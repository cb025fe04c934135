import numpy as np
import pytest

from dressed_me import analytic
from dressed_me.ep import ep_scan
from dressed_me.moments import drift
from dressed_me.reduction import eliminate
from dressed_me.scenario import load_preset


def test_pairing_w_values():
    w_plus, w_minus = analytic.pairing_w_pm(5.0, 3.0)
    assert w_plus == pytest.approx(np.sqrt(9 / 8), abs=1e-12)
    assert w_minus == pytest.approx(-np.sqrt(1 / 8), abs=1e-12)
    assert w_plus ** 2 - w_minus ** 2 == pytest.approx(1.0)
    assert w_plus ** 2 + w_minus ** 2 == pytest.approx(analytic.pairing_w(5.0, 3.0))


def test_pairing_eigenvalues_are_imaginary():
    ev = analytic.pairing_eigenvalues(5.0, 3.0, 0.3, 0.1)
    np.testing.assert_allclose(ev.real, 0)
    np.testing.assert_allclose(ev.imag, [-0.21712, 0.09212], atol=1e-5)


def test_perturbative_loss_matrix_is_symmetric():
    lam = analytic.perturbative_loss_matrix(1.0, 20.0, 200.0, 2e4)
    np.testing.assert_allclose(lam, lam.T)
    assert lam[2, 2] == 2e4


@pytest.mark.parametrize("g1,g3", [(4000.0, 1e6), (8105.7, 1e6), (12000.0, 1e6), (50.0, 1e5)])
def test_exact_regime_scaled_form(g1, g3):
    g, dp = 1.0, 20.0
    h = analytic.exact_regime_reduced(g, dp, g1, g3).h * analytic.exact_regime_denominator(g, dp, g1, g3)
    target = analytic.exact_regime_scaled(g, dp, g1, g3)
    assert np.max(np.abs(h - target)) < 1e-12 * np.max(np.abs(target))


def test_exact_regime_zero_mode_carries_fast_rate():
    d = analytic.exact_regime_drift(1.0, 20.0, 100.0, 1e6)
    h = analytic.three_mode_frame_hamiltonian(1.0, 20.0, 40.0)
    w, u = np.linalg.eigh(h)
    middle = u[:, 1]
    rate = -np.real(middle @ d.annihilation_block() @ middle)
    assert w[1] == pytest.approx(0.0, abs=1e-12)
    assert rate == pytest.approx(1e6)


def test_family_lookup():
    fam = analytic.family("textbook", omega=1.0, gamma=0.1)
    assert fam(0.2).dim == 2
    with pytest.raises(KeyError):
        analytic.family("missing")
    assert set(analytic.FAMILIES) >= {"textbook", "perturbative_reduced", "perturbative_simplified",
                                      "exact_anti_pt", "exact_pt_locus"}


def test_perturbative_family_scan():
    fam = analytic.family("perturbative_reduced", g=1.0, delta_prime=20.0, gamma1=200.0, gamma3=2e4)
    _, reports = ep_scan(fam, 0.0, 2.0, 201)
    assert len(reports) == 1
    assert reports[0].location == pytest.approx(analytic.perturbative_ep(1.0, 20.0, 200.0, 2e4), rel=1e-9)


def test_dressed_bath_model_shows_avoided_crossing():
    # with baths attached to the exact dressed modes, mode 3 also mediates a
    # coherent exchange of order 2 g^2 / D' between modes 1 and 2; it keeps the
    # eigenvalues apart and no EP appears along the detuning sweep
    sc = load_preset("three_mode")

    def family(omega2):
        s = sc.with_value(["modes.1.omega"], omega2)
        d = drift(s.model(), basis="bare", frame=s.frame_frequencies("bare"))
        return eliminate(d, [2])

    points, reports = ep_scan(family, 120.0, 118.0, 81)
    assert reports == []
    assert max(p.coalescence for p in points) < 0.999
    assert min(p.min_gap for p in points) > 0.05

