import numpy as np
import pytest

from helpers import (
    GRID_STEP,
    grid_lhat_argmin,
    meb_by_enumeration,
    random_lms,
    random_model,
)
from shockflow.admissible import (
    AdmissibleSolution,
    active_set,
    admissible_velocity,
    branch_values,
    check_admissibility,
    classify_shock,
    effective_hamiltonian,
    lhat,
    min_enclosing_ball,
    simplex_least_distance,
)
from shockflow.errors import CertificationFailure
from shockflow.legendre import HamiltonianModel, bregman_divergence
from shockflow.superdiff import LimitMomentumSet


def burgers_standing_shock():
    model = HamiltonianModel.quadratic(1)
    lms = LimitMomentumSet.from_momenta(model, [[1.0], [-1.0]])
    return model, lms


def test_burgers_standing_shock_solution():
    model, lms = burgers_standing_shock()
    sol = admissible_velocity(lms, model)
    assert sol.v_star == pytest.approx([0.0], abs=1e-12)
    assert sol.p_star == pytest.approx([0.0], abs=1e-12)
    assert sol.H_star == pytest.approx(0.5, abs=1e-12)
    assert np.sort(sol.weights) == pytest.approx([0.5, 0.5], abs=1e-9)
    assert sol.anomaly == pytest.approx(0.5, abs=1e-12)
    assert sol.hull_distance <= 1e-8
    assert classify_shock(lms, model, sol) == "restraining"


def test_lhat_and_branch_values_burgers():
    model, lms = burgers_standing_shock()
    assert lhat(lms, model, np.array([[0.0]]))[0] == pytest.approx(0.5)
    assert lhat(lms, model, np.array([[1.0]]))[0] == pytest.approx(2.0)
    vals = branch_values(lms, np.array([1.0]))
    assert vals == pytest.approx([0.5, -1.5])


def test_active_set_examples():
    model, lms = burgers_standing_shock()
    assert active_set(lms, model, np.array([0.0])) == (0, 1)
    assert active_set(lms, model, np.array([1.0])) == (1,)
    single = LimitMomentumSet.from_momenta(model, [[0.7]])
    assert active_set(single, model, np.array([3.0])) == (0,)


def test_quadratic_three_point_example():
    # momenta (1,0), (-1,0), (0,2); the smallest ball around the equal
    # velocities is centered at (0, 0.75) with radius 1.25
    model = HamiltonianModel.quadratic(2)
    lms = LimitMomentumSet.from_momenta(
        model, [[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0]]
    )
    sol = admissible_velocity(lms, model)
    assert sol.v_star == pytest.approx([0.0, 0.75], abs=1e-9)
    assert sol.anomaly == pytest.approx(0.78125, abs=1e-9)
    assert sol.active_set == (0, 1, 2)
    center, radius = min_enclosing_ball(lms.velocities)
    assert center == pytest.approx([0.0, 0.75], abs=1e-12)
    assert radius == pytest.approx(1.25, abs=1e-12)


def test_power_law_two_branch_example():
    model = HamiltonianModel.power_law(4.0, 1)
    lms = LimitMomentumSet.from_momenta(model, [[2.0], [-1.0]])
    sol = admissible_velocity(lms, model)
    # two strictly convex branches in 1D cross where the affine parts tie
    assert sol.v_star == pytest.approx([1.25], abs=1e-9)
    assert sol.active_set == (0, 1)
    assert np.all(sol.weights >= -1e-12)
    assert np.sum(sol.weights) == pytest.approx(1.0, abs=1e-9)
    recon = sol.weights @ lms.momenta[list(sol.active_set)]
    assert recon == pytest.approx(sol.p_star, abs=1e-7)


def test_min_enclosing_ball_examples():
    center, radius = min_enclosing_ball([[1.0, 0.0], [-1.0, 0.0]])
    assert center == pytest.approx([0.0, 0.0], abs=1e-12)
    assert radius == pytest.approx(1.0, abs=1e-12)
    center, radius = min_enclosing_ball([[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0]])
    assert center == pytest.approx([0.0, 0.75], abs=1e-12)
    assert radius == pytest.approx(1.25, abs=1e-12)
    # third point interior: support stays on the first two
    center, radius = min_enclosing_ball([[1.0, 0.0], [-1.0, 0.0], [0.0, 0.3]])
    assert center == pytest.approx([0.0, 0.0], abs=1e-12)
    assert radius == pytest.approx(1.0, abs=1e-12)


def test_min_enclosing_ball_matches_enumeration():
    rng = np.random.default_rng(21)
    for _ in range(60):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(1, 8))
        pts = rng.normal(size=(n, d)) * rng.uniform(0.2, 2.0)
        center, radius = min_enclosing_ball(pts)
        ref_center, ref_radius = meb_by_enumeration(pts)
        assert radius == pytest.approx(ref_radius, abs=1e-9)
        assert np.linalg.norm(center - ref_center) <= 1e-8


def _model_catalog_1d():
    return [
        HamiltonianModel.quadratic(1),
        HamiltonianModel.anisotropic(np.array([[1.7]])),
        HamiltonianModel.power_law(1.5, 1),
        HamiltonianModel.power_law(4.0, 1),
        HamiltonianModel.cosh_sum(1),
    ]


def test_rankine_hugoniot_1d_closed_form():
    rng = np.random.default_rng(33)
    for model in _model_catalog_1d():
        for _ in range(100):
            p1, p2 = rng.uniform(-2.5, 2.5, size=2)
            if abs(p1 - p2) < 1e-2:
                continue
            lms = LimitMomentumSet.from_momenta(model, [[p1], [p2]])
            sol = admissible_velocity(lms, model)
            expect = (lms.energies[0] - lms.energies[1]) / (p1 - p2)
            assert abs(sol.v_star[0] - expect) <= 1e-8


def test_quadratic_reduction_matches_ball():
    rng = np.random.default_rng(34)
    for _ in range(40):
        d = int(rng.integers(1, 4))
        model = HamiltonianModel.quadratic(d)
        lms = random_lms(rng, model)
        sol = admissible_velocity(lms, model)
        center, _ = min_enclosing_ball(lms.velocities)
        assert np.linalg.norm(sol.v_star - center) <= 1e-8
        iterative = admissible_velocity(
            lms, model, method="iterative", rng=np.random.default_rng(1)
        )
        assert np.linalg.norm(iterative.v_star - sol.v_star) <= 1e-6


def test_uniqueness_under_restarts():
    rng = np.random.default_rng(35)
    for _ in range(12):
        d = int(rng.integers(1, 4))
        model = random_model(rng, d)
        lms = random_lms(rng, model)
        base = admissible_velocity(
            lms, model, method="iterative", rng=np.random.default_rng(0)
        )
        for restart in range(1, 7):
            other = admissible_velocity(
                lms, model, method="iterative",
                rng=np.random.default_rng(restart),
            )
            assert np.linalg.norm(other.v_star - base.v_star) <= 1e-6


def test_grid_oracle_agreement():
    rng = np.random.default_rng(36)
    for _ in range(15):
        d = int(rng.integers(1, 4))
        model = random_model(rng, d)
        lms = random_lms(rng, model)
        sol = admissible_velocity(lms, model)
        v_grid, f_grid = grid_lhat_argmin(lms, model)
        assert np.linalg.norm(sol.v_star - v_grid) <= 2.0 * GRID_STEP[d]
        assert sol.anomaly <= f_grid + 1e-9


def test_certification_soundness():
    rng = np.random.default_rng(37)
    for _ in range(8):
        d = int(rng.integers(1, 4))
        model = random_model(rng, d)
        lms = random_lms(rng, model)
        sol = admissible_velocity(lms, model)
        verdict = check_admissibility(lms, model, sol.v_star)
        assert verdict.accepted
        probes = sol.v_star + rng.normal(size=(1000, d))
        assert sol.anomaly <= np.min(lhat(lms, model, probes)) + 1e-6


def test_perturbed_points_rejected():
    rng = np.random.default_rng(38)
    for _ in range(10):
        d = int(rng.integers(1, 4))
        model = random_model(rng, d)
        lms = random_lms(rng, model)
        sol = admissible_velocity(lms, model)
        for _ in range(20):
            direction = rng.normal(size=d)
            direction /= np.linalg.norm(direction)
            probe = sol.v_star + 0.05 * direction
            verdict = check_admissibility(lms, model, probe)
            assert not verdict.accepted
            assert verdict.distance > 0


def test_bregman_form_equivalence():
    rng = np.random.default_rng(39)
    for _ in range(25):
        d = int(rng.integers(1, 4))
        model = random_model(rng, d)
        lms = random_lms(rng, model)
        v = rng.normal(size=d)
        direct = lhat(lms, model, v[None, :])[0]
        branches = [
            bregman_divergence(model, v, lms.velocities[i])
            for i in range(lms.k)
        ]
        assert direct == pytest.approx(max(branches), abs=1e-10)


def test_anomaly_identity():
    rng = np.random.default_rng(40)
    for _ in range(25):
        d = int(rng.integers(1, 4))
        model = random_model(rng, d)
        lms = random_lms(rng, model)
        sol = admissible_velocity(lms, model)
        gap = sol.H_star - float(model.hamiltonian(sol.p_star))
        assert sol.anomaly == pytest.approx(gap, abs=1e-9)
        direct = effective_hamiltonian(lms, sol.v_star, sol.p_star)
        assert direct == pytest.approx(sol.H_star, abs=1e-12)


def test_check_admissibility_examples():
    model, lms = burgers_standing_shock()
    sol = admissible_velocity(lms, model)
    verdict = check_admissibility(lms, model, sol.v_star)
    assert verdict.accepted
    assert np.sort(verdict.weights) == pytest.approx(
        np.sort(sol.weights), abs=1e-6
    )
    rejected = check_admissibility(lms, model, np.array([1.0]))
    assert not rejected.accepted
    assert rejected.active_set == (1,)
    assert rejected.distance == pytest.approx(2.0, abs=1e-12)
    single = LimitMomentumSet.from_momenta(model, [[0.7]])
    ok = check_admissibility(single, model, np.array([0.7]))
    assert ok.accepted
    assert ok.weights == pytest.approx([1.0], abs=1e-12)


def test_classify_examples():
    model = HamiltonianModel.quadratic(1)
    rng = np.random.default_rng(41)
    for _ in range(10):
        p1, p2 = np.sort(rng.uniform(-2.0, 2.0, size=2))
        if p2 - p1 < 0.1:
            continue
        lms = LimitMomentumSet.from_momenta(model, [[p1], [p2]])
        sol = admissible_velocity(lms, model)
        assert classify_shock(lms, model, sol) == "restraining"
    single = LimitMomentumSet.from_momenta(model, [[0.4]])
    sol = admissible_velocity(single, model)
    assert classify_shock(single, model, sol) == "not-a-shock"
    # p* lands on the hull edge between the two outer momenta
    model2 = HamiltonianModel.quadratic(2)
    edge = LimitMomentumSet.from_momenta(
        model2, [[1.0, 0.0], [-1.0, 0.0], [0.0, 0.5]]
    )
    sol2 = admissible_velocity(edge, model2)
    assert sol2.p_star == pytest.approx([0.0, 0.0], abs=1e-9)
    assert classify_shock(edge, model2, sol2) == "nonrestraining"


def test_tie_tolerance_stability():
    rng = np.random.default_rng(42)
    for _ in range(15):
        d = int(rng.integers(1, 4))
        model = random_model(rng, d)
        lms = random_lms(rng, model)
        sol = admissible_velocity(lms, model)
        tight = check_admissibility(lms, model, sol.v_star, tie_tol=1e-9)
        loose = check_admissibility(lms, model, sol.v_star, tie_tol=1e-6)
        assert tight.accepted and loose.accepted
        far = sol.v_star + 0.1
        assert not check_admissibility(lms, model, far, tie_tol=1e-9).accepted
        assert not check_admissibility(lms, model, far, tie_tol=1e-6).accepted


def test_simplex_least_distance_cases():
    pts = np.array([[0.0], [1.0]])
    weights, dist = simplex_least_distance(pts, np.array([2.0]))
    assert dist == pytest.approx(1.0, abs=1e-12)
    assert weights == pytest.approx([0.0, 1.0], abs=1e-12)
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    q = np.array([0.25, 0.25])
    weights, dist = simplex_least_distance(tri, q)
    assert dist <= 1e-12
    assert weights @ tri == pytest.approx(q, abs=1e-12)
    assert np.sum(weights) == pytest.approx(1.0, abs=1e-12)


def test_unreachable_tolerance_fails_loudly():
    model = HamiltonianModel.cosh_sum(2)
    lms = LimitMomentumSet.from_momenta(
        model, [[1.3, 0.2], [-0.7, 0.9], [0.1, -1.1]]
    )
    with pytest.raises(CertificationFailure) as info:
        admissible_velocity(lms, model, tol=1e-300)
    assert info.value.best_point is not None
    assert info.value.hull_distance > 0


def test_solution_is_frozen_record():
    model, lms = burgers_standing_shock()
    sol = admissible_velocity(lms, model)
    assert isinstance(sol, AdmissibleSolution)
    assert sol.dim == 1
    with pytest.raises(Exception):
        sol.anomaly = 0.0
