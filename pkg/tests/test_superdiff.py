"""Limit-momentum extraction tests."""

import numpy as np
import pytest

from shockflow import fixtures, superdiff
from shockflow.legendre import HamiltonianModel
from shockflow.superdiff import (
    LimitMomentumSet,
    is_shock,
    limit_data,
    superdifferential_vertices,
)

Q1 = HamiltonianModel.quadratic(1)


def test_onset_fixture_entries():
    ic = fixtures.negative_power()
    lms = limit_data(ic, Q1, 0.1, 0.0)
    assert lms.k == 2
    np.testing.assert_allclose(lms.momenta.ravel(), [-0.4, 0.4], atol=1e-6)
    np.testing.assert_allclose(lms.energies, [0.08, 0.08], atol=1e-7)
    np.testing.assert_allclose(lms.velocities.ravel(), [-0.4, 0.4], atol=1e-6)


def test_neg_abs_entries():
    ic = fixtures.negative_abs()
    lms = limit_data(ic, Q1, 0.5, 0.0)
    assert lms.k == 2
    np.testing.assert_allclose(lms.momenta.ravel(), [-1.0, 1.0], atol=1e-6)
    np.testing.assert_allclose(lms.energies, [0.5, 0.5], atol=1e-6)


def test_smooth_point_single_entry():
    lms = limit_data(fixtures.linear([0.7]), Q1, 0.4, 0.2)
    assert lms.k == 1
    assert not is_shock(lms)
    assert lms.momenta[0, 0] == pytest.approx(0.7, abs=1e-7)


def test_momentum_collapse_near_onset():
    # just past the birth time the momenta +-4t are closer than the cluster
    # tolerance and must merge to a single smooth-looking entry
    ic = fixtures.negative_power()
    lms = limit_data(ic, Q1, 1e-4, 0.0, momentum_tol=1e-2)
    assert lms.k == 1
    assert not is_shock(lms)


def test_shock_flags():
    ic = fixtures.negative_power()
    assert is_shock(limit_data(ic, Q1, 0.1, 0.0))
    assert not is_shock(limit_data(fixtures.linear([0.3]), Q1, 0.1, 0.0))


def test_vertices():
    ic = fixtures.negative_power()
    lms = limit_data(ic, Q1, 0.1, 0.0)
    verts = superdifferential_vertices(lms)
    assert len(verts) == 2
    got = sorted((round(h, 10), float(p[0])) for h, p in verts)
    assert got[0][0] == pytest.approx(-0.08, abs=1e-7)
    assert got[0][1] == pytest.approx(-0.4, abs=1e-6)
    assert got[1][1] == pytest.approx(0.4, abs=1e-6)

    single = limit_data(fixtures.linear([0.5]), Q1, 0.3, 0.0)
    assert len(superdifferential_vertices(single)) == 1

    neg = limit_data(fixtures.negative_abs(), Q1, 0.5, 0.0)
    got = sorted((round(h, 10), float(p[0])) for h, p in superdifferential_vertices(neg))
    assert got == [
        (pytest.approx(-0.5, abs=1e-6), pytest.approx(-1.0, abs=1e-6)),
        (pytest.approx(-0.5, abs=1e-6), pytest.approx(1.0, abs=1e-6)),
    ]


def test_velocity_energy_consistency():
    # every entry satisfies v_i = grad H(p_i) and H_i = H(p_i)
    cases = [
        (fixtures.negative_abs(), HamiltonianModel.power_law(4.0)),
        (fixtures.negative_power(), Q1),
        (fixtures.cosine(), HamiltonianModel.cosh_sum(1)),
    ]
    for ic, model in cases:
        lms = limit_data(ic, model, 0.3, 0.1)
        for i in range(lms.k):
            np.testing.assert_allclose(
                lms.velocities[i],
                np.atleast_1d(model.grad_hamiltonian(lms.momenta[i])),
                atol=1e-10,
            )
            assert lms.energies[i] == pytest.approx(
                model.hamiltonian(lms.momenta[i]), abs=1e-10
            )


def test_from_momenta_builder():
    m = HamiltonianModel.quadratic(2)
    lms = LimitMomentumSet.from_momenta(m, [[1.0, 0.0], [-1.0, 0.0]])
    assert lms.k == 2
    np.testing.assert_allclose(lms.velocities, lms.momenta)
    np.testing.assert_allclose(lms.energies, [0.5, 0.5])


def test_upper_semicontinuity_toward_shock():
    # approaching the standing kink from the right, the single momentum
    # stays at the right-branch value, a vertex of the shock's polytope
    ic = fixtures.negative_abs()
    shock = limit_data(ic, Q1, 0.5, 0.0)
    for n in range(3, 11):
        x = 2.0**-n
        lms = limit_data(ic, Q1, 0.5, x)
        assert lms.k == 1
        dist = np.min(np.abs(shock.momenta.ravel() - lms.momenta[0, 0]))
        assert dist <= 1e-6


def test_supergradient_inequality_shrinking_balls():
    # each vertex (-H_i, p_i) majorizes local increments of phi up to o(|w|)
    from shockflow.hopf_lax import solve_value

    ic = fixtures.negative_power()
    tau = 0.1
    base = solve_value(ic, Q1, tau, 0.0).value
    lms = limit_data(ic, Q1, tau, 0.0)
    rng = np.random.default_rng(31)
    worst_ratio = []
    for radius in (1e-2, 1e-3):
        worst = 0.0
        for _ in range(40):
            w = rng.normal(size=2)
            w *= radius / np.linalg.norm(w)
            dtau, dxi = w
            val = solve_value(ic, Q1, tau + dtau, dxi).value
            for h, p in superdifferential_vertices(lms):
                viol = (val - base) - (h * dtau + p[0] * dxi)
                worst = max(worst, viol)
        worst_ratio.append(worst / radius)
        assert worst <= 5.0 * radius**2 + 1e-9
    assert worst_ratio[1] <= worst_ratio[0] + 1e-9
