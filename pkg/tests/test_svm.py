import math

import numpy as np
import pytest

from datasets import random_dataset
from oracles import best_margin_for_direction, brute_force_dual
from snpsvm.errors import DegenerateModelError, SchemaError, UsageError
from snpsvm.svm import (LabeledVector, SvmConfig, SvmModel, classify, decision_value, dual_objective,
                        geometric_margin, kkt_violation, normalized_hyperplane, primal_objective, stack,
                        train, with_alphas)

HARD = SvmConfig(C=math.inf)


def two_point_model():
    return SvmModel(np.array([0.0, 0.5]), 0.0, np.array([0.125, 0.125]), HARD)


def test_two_point_hyperplane(two_points):
    X, y = two_points
    model, diag = train(X, y, HARD)
    assert abs(model.w[0]) <= 1e-8
    assert abs(model.w[1] - 0.5) <= 1e-6
    assert abs(model.b) <= 1e-8
    assert diag.converged
    assert "hard margin" in diag.notes[0]


def test_one_dimensional_mirror():
    model, _ = train([[1.0], [-1.0]], [1, -1], HARD)
    assert model.w == pytest.approx([1.0]) and model.b == pytest.approx(0.0, abs=1e-12)
    assert 2 * geometric_margin(model) == pytest.approx(2.0)


def test_stack_labelled_vectors():
    X, y = stack([LabeledVector((0, 2), 1), LabeledVector((0, -2), -1)])
    model, _ = train(X, y, HARD)
    assert model.w == pytest.approx([0.0, 0.5])


def test_dual_objective_values(two_points):
    X, y = two_points
    assert dual_objective([0.0, 0.0], X, y) == 0.0
    # 2a - 8a^2 by hand: sum(a) = 2a, |sum a_i y_i x_i|^2 = (4a)^2
    for a in (0.05, 0.125, 0.3):
        assert dual_objective([a, a], X, y) == pytest.approx(2 * a - 8 * a * a)
    grid = np.linspace(0, 0.5, 2001)
    values = [dual_objective([a, a], X, y) for a in grid]
    assert grid[int(np.argmax(values))] == pytest.approx(0.125)
    assert max(values) == pytest.approx(0.125)
    with pytest.raises(UsageError):
        dual_objective([0.1], X, y)


def test_strong_duality_on_separable(rng):
    for _ in range(20):
        X, y = random_dataset(rng, separable=True)
        model, diag = train(X, y, HARD)
        assert diag.dual_objective == pytest.approx(0.5 * model.w @ model.w, rel=1e-6, abs=1e-9)


def test_kkt_violation_two_point_model(two_points):
    X, y = two_points
    model = two_point_model()
    assert kkt_violation(model, X, y, math.inf) <= 1e-9
    perturbed = with_alphas(model, [0.225, 0.125])
    assert kkt_violation(perturbed, X, y, math.inf) > 0


@pytest.mark.parametrize("C", [0.5, 1.0, 10.0])
def test_matches_brute_force(C, rng):
    for _ in range(25):
        X, y = random_dataset(rng)
        best, _ = brute_force_dual(X, y, C)
        _, diag = train(X, y, SvmConfig(C=C))
        assert diag.converged
        assert abs(diag.dual_objective - best) <= 1e-6


def test_invariants_on_random_instances(rng):
    for k in range(40):
        C = [0.5, 1.0, 10.0, math.inf][k % 4]
        X, y = random_dataset(rng, l_max=12, n_max=4, separable=math.isinf(C))
        config = SvmConfig(C=C)
        model, diag = train(X, y, config)
        assert diag.converged and diag.max_kkt_violation <= config.kkt_tolerance
        explicit = sum(a * yi * xi for a, yi, xi in zip(model.alphas, y, X))
        assert np.max(np.abs(model.w - explicit)) <= 1e-9
        assert abs(model.alphas @ y) <= config.kkt_tolerance
        assert (model.alphas >= 0).all() and (model.alphas <= config.effective_C).all()
        assert abs(diag.duality_gap) <= 1e-6 * max(1.0, diag.primal_objective)


def test_weak_duality_along_iterates(rng):
    for _ in range(10):
        X, y = random_dataset(rng, l_max=10)
        C = 2.0
        config = SvmConfig(C=C)
        iterates = []
        train(X, y, config, callback=iterates.append)
        for a in iterates:
            w = (a * y) @ X
            # any offset gives a feasible primal point
            for b in (-1.0, 0.0, 0.7):
                probe = SvmModel(w, b, a, config)
                assert dual_objective(a, X, y) <= primal_objective(probe, X, y) + 1e-12


def test_training_input_errors():
    with pytest.raises(UsageError):
        train([[0.0], [1.0]], [1, 1])
    with pytest.raises(UsageError):
        train([[0.0]], [1])
    with pytest.raises(SchemaError):
        train([[0.0, 1.0], [1.0, 0.0]], [1, -1, 1])
    with pytest.raises(SchemaError):
        train([[np.nan], [1.0]], [1, -1])
    with pytest.raises(UsageError):
        SvmConfig(C=0)


def test_nonconvergence_reports_best_iterate(rng):
    X, y = random_dataset(rng, l_min=10, l_max=10, n_max=3)
    model, diag = train(X, y, SvmConfig(C=10.0, max_passes=1, kkt_tolerance=1e-12))
    assert diag.iterations <= 10
    assert not diag.converged
    assert (model.alphas >= 0).all()


def test_decision_value_and_classify():
    model = two_point_model()
    assert decision_value(model, [0, 2]) == 1.0
    assert decision_value(model, [0, 4]) == 2.0
    assert decision_value(model, [3.5, 0]) == 0.0
    assert classify(model, [0, 2]).label == 1
    assert classify(model, [0, -2]).label == -1
    tie = classify(model, [0, 0])
    assert tie.label == 1 and tie.tie
    assert not classify(model, [0, 2]).tie
    with pytest.raises(UsageError):
        decision_value(model, [1, 2, 3])


def test_geometric_margin():
    assert geometric_margin(two_point_model()) == 2.0
    unit = SvmModel(np.array([0.6, 0.8]), 0.0, np.zeros(2))
    assert geometric_margin(unit) == pytest.approx(1.0)
    with pytest.raises(DegenerateModelError):
        geometric_margin(SvmModel(np.zeros(2), 1.0, np.zeros(2)))


def test_normalized_hyperplane_sign():
    model = SvmModel(np.array([0.0, -2.0]), 4.0, np.zeros(2))
    u, c = normalized_hyperplane(model)
    assert u.tolist() == [0.0, 1.0] and c == -2.0


def test_margin_is_maximal(rng):
    for _ in range(5):
        X, y = random_dataset(rng, l_max=10, n_max=3, separable=True)
        model, _ = train(X, y, HARD)
        margin = geometric_margin(model)
        u0, _ = normalized_hyperplane(model)
        for _ in range(200):
            u = u0 + rng.normal(scale=0.3, size=len(u0))
            best = best_margin_for_direction(u, X, y)
            assert best <= margin + 1e-9


def test_label_flip_antisymmetry(rng):
    for _ in range(20):
        X, y = random_dataset(rng, l_max=8)
        config = SvmConfig(C=1.0)
        m1, _ = train(X, y, config)
        m2, _ = train(X, -y, config)
        assert np.allclose(m2.w, -m1.w, atol=1e-6)
        assert m2.b == pytest.approx(-m1.b, abs=1e-6)
        for x in X:
            s = decision_value(m1, x)
            if abs(s) > 1e-6:
                assert classify(m2, x).label == -classify(m1, x).label


def test_deterministic_rerun(rng):
    X, y = random_dataset(rng, l_max=10)
    a, _ = train(X, y, SvmConfig(C=1.0, seed=3))
    b, _ = train(X, y, SvmConfig(C=1.0, seed=3))
    assert a.same_as(b)


def test_slack_non_increasing_in_c_matches_oracle():
    rng = np.random.default_rng(31)
    for _ in range(10):
        X, y = random_dataset(rng, l_min=6, l_max=6, n_max=2)
        previous = np.inf
        for C in (0.1, 1.0, 10.0):
            best, a = brute_force_dual(X, y, C)
            w = (a * y) @ X
            # strong duality: dual = 1/2 |w|^2 + C * slack at the optimum
            oracle_slack = (best - 0.5 * w @ w) / C
            _, diag = train(X, y, SvmConfig(C=C))
            assert diag.slack_sum == pytest.approx(oracle_slack, abs=1e-6)
            assert diag.slack_sum <= previous + 1e-9
            previous = diag.slack_sum


def test_max_passes_bounds_iterations(rng):
    X, y = random_dataset(rng, l_min=8, l_max=8)
    _, diag = train(X, y, SvmConfig(C=100.0, max_passes=2))
    assert diag.iterations <= 2 * len(y)
