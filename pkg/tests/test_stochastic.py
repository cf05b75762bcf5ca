import numpy as np
import pytest

from shockflow import HamiltonianModel, make_fixture
from shockflow.admissible import admissible_velocity
from shockflow.errors import ConfigError
from shockflow.stochastic import (
    compare_regularizations,
    self_consistent_velocity,
    simulate_sde,
)
from shockflow.superdiff import LimitMomentumSet

from helpers import random_lms, random_model


def test_zero_noise_follows_characteristic():
    ic = make_fixture("sawtooth", 1)
    model = HamiltonianModel.quadratic(1)
    ens = simulate_sde(ic, model, 0.0, [-np.pi / 2], 0.4, dt=1e-3,
                       n_paths=4, rng_seed=0)
    # slope of the profile left of the crest is +1, so the branch
    # velocity is 1 and every path is the same straight line
    ref = -np.pi / 2 + ens.times[:, None]
    assert np.abs(ens.paths - ref).max() <= 1e-6
    assert ens.occupancy.shape == (1,)
    assert ens.occupancy[0] == pytest.approx(1.0)


def test_standing_shock_occupancy_split():
    ic = make_fixture("sawtooth", 1)
    model = HamiltonianModel.quadratic(1)
    ens = simulate_sde(ic, model, 0.05, [0.0], 0.5, dt=1e-3,
                       n_paths=150, rng_seed=5)
    assert ens.occupancy.shape == (2,)
    assert np.all(ens.occupancy >= 0.0)
    assert ens.occupancy.sum() == pytest.approx(1.0, abs=1e-12)
    for j in range(2):
        se = max(ens.occupancy_se[j], 1e-4)
        assert abs(ens.occupancy[j] - 0.5) <= 3.0 * se
    assert np.all(ens.occupancy_se <= 0.02)
    assert abs(ens.mean_velocity) <= 3.0 * ens.mean_velocity_se + 1e-3


def test_drifting_shock_mean_velocity():
    ic = make_fixture("sawtooth", 1, tilt=0.2)
    model = HamiltonianModel.quadratic(1)
    ens = simulate_sde(ic, model, 0.05, [0.0], 0.6, dt=1e-3,
                       n_paths=120, rng_seed=3)
    assert abs(ens.mean_velocity - 0.2) <= 3.0 * ens.mean_velocity_se


def test_same_seed_reproduces_bitwise():
    ic = make_fixture("sawtooth", 1, tilt=0.2)
    model = HamiltonianModel.quadratic(1)
    kw = dict(dt=1e-3, n_paths=8, rng_seed=42)
    a = simulate_sde(ic, model, 0.05, [0.0], 0.05, **kw)
    b = simulate_sde(ic, model, 0.05, [0.0], 0.05, **kw)
    assert np.array_equal(a.paths, b.paths)
    assert np.array_equal(a.occupancy, b.occupancy)
    kw["rng_seed"] = 43
    c = simulate_sde(ic, model, 0.05, [0.0], 0.05, **kw)
    assert not np.array_equal(a.paths, c.paths)


def test_single_branch_fixed_point():
    model = HamiltonianModel.cosh_sum(1)
    lms = LimitMomentumSet.from_momenta(model, np.array([[0.7]]))
    sols = self_consistent_velocity(lms, model)
    assert len(sols) == 1
    assert sols[0].active_set == (0,)
    np.testing.assert_allclose(sols[0].v_dagger, lms.velocities[0],
                               atol=1e-12)
    np.testing.assert_allclose(sols[0].shares, [1.0], atol=1e-12)


def test_power_law_pair_shares():
    model = HamiltonianModel.power_law(4.0, 1)
    lms = LimitMomentumSet.from_momenta(model, np.array([[2.0], [-1.0]]))
    sols = self_consistent_velocity(lms, model)
    assert len(sols) == 1
    sol = sols[0]
    assert sol.active_set == (0, 1)
    np.testing.assert_allclose(sol.v_dagger, [1.25], atol=1e-12)
    np.testing.assert_allclose(sol.shares, [0.25, 0.75], atol=1e-12)


def test_quadratic_fixed_point_matches_minmax():
    # for quadratic energies the unique fixed point is the min-max velocity
    rng = np.random.default_rng(20)
    model = HamiltonianModel.quadratic(2)
    for _ in range(50):
        k = int(rng.integers(2, 5))
        momenta = rng.normal(scale=1.5, size=(k, 2))
        if min(np.linalg.norm(momenta[i] - momenta[j])
               for i in range(k) for j in range(i)) < 5e-2:
            continue
        lms = LimitMomentumSet.from_momenta(model, momenta)
        sols = self_consistent_velocity(lms, model)
        assert len(sols) == 1
        v_star = admissible_velocity(lms, model).v_star
        assert np.linalg.norm(sols[0].v_dagger - v_star) <= 1e-8


def test_pairwise_fixed_point_is_rankine_hugoniot():
    rng = np.random.default_rng(31)
    for model in (HamiltonianModel.quadratic(1),
                  HamiltonianModel.power_law(1.5, 1),
                  HamiltonianModel.cosh_sum(1)):
        for _ in range(20):
            lms = random_lms(rng, model, k_max=2)
            if lms.k != 2:
                continue
            rep = compare_regularizations(lms, model)
            assert rep.verdict == "coincide"
            assert rep.gaps.max() <= 1e-6


def test_three_branch_quadratic_coincides():
    model = HamiltonianModel.quadratic(2)
    lms = LimitMomentumSet.from_momenta(
        model, np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0]]))
    rep = compare_regularizations(lms, model)
    assert rep.verdict == "coincide"
    assert len(rep.candidates) == 1


def test_planar_power_law_report():
    # all three branches stay active for both notions here, pinning the
    # velocity at the common tie point
    model = HamiltonianModel.power_law(4.0, 2)
    lms = LimitMomentumSet.from_momenta(
        model, np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.5]]))
    rep = compare_regularizations(lms, model)
    assert len(rep.candidates) == 1
    assert np.all(np.isfinite(rep.gaps))
    assert rep.verdict in ("coincide", "differ")


def test_two_branch_power_law_gap():
    # with only two branches in the plane the tie line and the segment
    # between branch velocities cross away from the min-max point
    model = HamiltonianModel.power_law(4.0, 2)
    lms = LimitMomentumSet.from_momenta(
        model, np.array([[2.0, 0.0], [0.0, 1.0]]))
    rep = compare_regularizations(lms, model)
    assert rep.verdict == "differ"
    assert rep.gaps.max() > 1e-3
    sol = rep.candidates[0]
    np.testing.assert_allclose(sol.v_dagger, [2.23529412, 0.72058824],
                               atol=1e-6)


def test_report_carries_ensemble_summary():
    ic = make_fixture("sawtooth", 1)
    model = HamiltonianModel.quadratic(1)
    ens = simulate_sde(ic, model, 0.05, [0.0], 0.3, dt=1e-3,
                       n_paths=60, rng_seed=9)
    lms = LimitMomentumSet.from_momenta(model, np.array([[1.0], [-1.0]]))
    rep = compare_regularizations(lms, model, ens)
    assert rep.occupancy is not None
    assert rep.mean_velocity == pytest.approx(ens.mean_velocity)
    assert rep.sde_consistent


def test_fixed_points_on_random_instances():
    rng = np.random.default_rng(77)
    for _ in range(30):
        dim = int(rng.integers(1, 4))
        model = random_model(rng, dim)
        lms = random_lms(rng, model)
        sols = self_consistent_velocity(lms, model)
        for sol in sols:
            assert np.all(sol.shares >= -1e-12)
            assert sol.shares.sum() == pytest.approx(1.0, abs=1e-9)
            recon = sol.shares @ lms.velocities[list(sol.active_set)]
            np.testing.assert_allclose(sol.v_dagger, recon, atol=1e-9)


def test_configuration_validation():
    ic = make_fixture("sawtooth", 1)
    model = HamiltonianModel.quadratic(1)
    with pytest.raises(ConfigError):
        simulate_sde(ic, model, 0.05, [0.0], 0.5, dt=5e-3)
    with pytest.raises(ConfigError):
        simulate_sde(ic, model, -0.1, [0.0], 0.5)
    with pytest.raises(ConfigError):
        simulate_sde(make_fixture("cosine", 2), HamiltonianModel.quadratic(2),
                     0.05, [0.0, 0.0], 0.5)
