import warnings

import numpy as np
import pytest

from dressed_me import analytic
from dressed_me.ep import discriminant
from dressed_me.errors import SingularFastBlock
from dressed_me.moments import DriftMatrix
from dressed_me.nambu import QuadraticSystem, diagonalize
from dressed_me.reduction import (
    WeakSeparationWarning,
    compare_three_mode_transform,
    eliminate,
    elimination_error_estimate,
    fast_block_determinant,
)

G, DP, G1, G3 = 1.0, 20.0, 200.0, 2e4


def nambu(block):
    z = np.zeros_like(block)
    return DriftMatrix(np.block([[block, z], [z, block.conj()]]))


def coherent_three_mode(gamma3, eps=1.0):
    h = analytic.three_mode_frame_hamiltonian(G, DP, eps)
    return nambu(-1j * h - np.diag([G1, G1, gamma3]))


def test_decoupled_fast_block_leaves_slow_block():
    block = np.diag([-1.0 - 2j, -1.5 + 1j, -100.0]).astype(complex)
    block[0, 1] = 0.3
    h = eliminate(nambu(block), [2])
    np.testing.assert_allclose(h.h, 1j * block[:2, :2])
    assert elimination_error_estimate(nambu(block), [2], t_horizon=1.0) < 1e-14


def test_schur_complement_formula():
    rng = np.random.default_rng(3)
    block = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) - 50 * np.diag([0, 0, 1])
    h = eliminate(nambu(block), [2], check_separation=False)
    expected = block[:2, :2] - np.outer(block[:2, 2], block[2, :2]) / block[2, 2]
    np.testing.assert_allclose(h.h, 1j * expected, atol=1e-13)
    assert h.mode_labels == (0, 1)


def test_perturbative_reduction_coalesces():
    eps = analytic.perturbative_ep(G, DP, G1, G3)
    assert eps == pytest.approx(0.99)
    h = analytic.perturbative_reduced(G, DP, G1, G3, eps)
    assert abs(discriminant(h)) < 1e-12 * np.max(np.abs(h.h)) ** 2


def test_simplified_reduction_coalesces_at_one():
    h = analytic.simplified_reduced(G, DP, G1, 1.0)
    assert abs(discriminant(h)) < 1e-12
    ev = np.linalg.eigvals(h.h)
    np.testing.assert_allclose(ev, [-1j * G1, -1j * G1], atol=1e-6)


def test_singular_fast_block():
    block = np.diag([-1.0, -2.0, 0.0]).astype(complex)
    block[2, 0] = block[0, 2] = 1.0
    with pytest.raises(SingularFastBlock):
        eliminate(nambu(block), [2])
    scaled = eliminate(nambu(block), [2], scale_by_determinant=True)
    assert np.all(np.isfinite(scaled.h))


def test_determinant_scaling_matches_inverse():
    d = coherent_three_mode(G3)
    plain = eliminate(d, [2]).h
    scaled = eliminate(d, [2], scale_by_determinant=True).h
    np.testing.assert_allclose(scaled, fast_block_determinant(d, [2]) * plain, rtol=1e-12)


def test_weak_separation_warning():
    with pytest.warns(WeakSeparationWarning):
        eliminate(coherent_three_mode(300.0), [2])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        eliminate(coherent_three_mode(G3), [2])


def test_invalid_subsets():
    d = coherent_three_mode(G3)
    with pytest.raises(ValueError):
        eliminate(d, [0, 1, 2])
    with pytest.raises(ValueError):
        eliminate(d, [3])
    with pytest.raises(ValueError):
        eliminate(d, [2], slow=[1, 2])


def test_elimination_error_falls_with_fast_rate():
    errs = [elimination_error_estimate(coherent_three_mode(g3), [2], t_horizon=5 / G1) for g3 in (2e3, 2e4, 2e5)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] / errs[2] > 50


def test_dissipative_coupling_error_saturates():
    # the perturbative drift couples mode 3 with strength (g/D') G3, so the
    # leading correction is G3-independent and the error levels off
    errs = [elimination_error_estimate(analytic.perturbative_drift(G, DP, G1, g3, 1.0), [2], t_horizon=5 / G1)
            for g3 in (2e3, 2e4, 2e5)]
    assert errs[2] == pytest.approx(errs[1], rel=0.05)
    assert errs[2] < 2 * (G / DP) ** 2


def test_slow_only_gives_zero_error():
    d = coherent_three_mode(G3)
    assert elimination_error_estimate(d, [], t_horizon=1.0) == 0.0


def test_first_order_transform():
    sys = QuadraticSystem.from_couplings([120.0, 119.0, 100.0], [(0, 2, G, 0.0), (1, 2, G, 0.0)])
    cmp = compare_three_mode_transform(diagonalize(sys), G, DP)
    assert cmp["mode3_entries"] < (G / (DP - 1.0)) ** 2
    assert cmp["bound"] == pytest.approx((G / DP) ** 2)
