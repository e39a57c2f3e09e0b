"""Smoke tests for the betreg extension module."""

import json
import math

import pytest

import betreg


def test_clip_and_betting_term():
    assert betreg.clip(0.5, -0.25, 0.25) == 0.25
    assert betreg.clip(-3.0, -0.25, 0.25) == -0.25
    assert betreg.betting_term(0.7, 0.4, 0.4, 3.0, 0.2) == 0.0
    assert betreg.betting_term(1.0, 0.5, 1.0, 1.0, 0.25) == pytest.approx(
        math.log(1.125), rel=1e-14
    )


def test_bound_values():
    assert betreg.first_order_bound(0.25, n=400, class_size=20, delta=0.1) == pytest.approx(
        0.5133446562657534, rel=1e-13
    )
    assert betreg.second_order_bound(0.01, n=400, class_size=20, delta=0.1) == pytest.approx(
        0.43816277037107154, rel=1e-13
    )
    assert betreg.linear_bound(0.05, n=1000, d=2, delta=0.1) == pytest.approx(
        1.1612947013001003, rel=1e-13
    )
    lhs, rhs = betreg.gap_example(0.01)
    assert lhs == pytest.approx(0.01, abs=1e-12)
    assert rhs == pytest.approx(0.5, abs=1e-12)


def test_losses_on_a_tiny_dataset():
    f = betreg.Tabulated([0.5])
    data = betreg.Dataset([betreg.DataPoint([0.0], 0.0, 0),
                           betreg.DataPoint([0.0], 1.0, 0)])
    assert betreg.squared_loss(f, data) == 0.125
    assert betreg.log_loss(f, data) == pytest.approx(math.log(2.0), rel=1e-14)
    diverging = betreg.Tabulated([0.0])
    assert math.isinf(betreg.log_loss(diverging, data))


def test_fit_recovers_the_truth_without_noise():
    inst = betreg.make_instance(
        support_size=5, class_size=4, label_family="deterministic", seed=3
    )
    data = betreg.sample_dataset(inst, 40, 4)
    for fit in (betreg.fit_betting, betreg.fit_squared, betreg.fit_log):
        report = fit(inst.hypothesis_class, data)
        assert report.chosen_index == inst.hypothesis_class.star_index
    report = betreg.fit_betting(inst.hypothesis_class, data)
    assert report.objective_value == 0.0
    assert report.inner_witness is not None
    assert min(report.per_candidate_objectives) >= 0.0


def test_fit_is_deterministic_across_threads():
    inst = betreg.make_instance(
        support_size=6, class_size=8, label_family="threepoint", seed=11
    )
    data = betreg.sample_dataset(inst, 80, 12)
    a = betreg.fit_betting(inst.hypothesis_class, data, threads=1)
    b = betreg.fit_betting(inst.hypothesis_class, data, threads=4)
    assert a.chosen_index == b.chosen_index
    assert a.objective_value == b.objective_value
    assert a.per_candidate_objectives == b.per_candidate_objectives


def test_population_quantities_and_mae():
    inst = betreg.make_instance(
        support_size=6, class_size=5, label_family="bernoulli", seed=21
    )
    data = betreg.sample_dataset(inst, 200, 22)
    report = betreg.fit_log(inst.hypothesis_class, data)
    chosen = inst.hypothesis_class.members[report.chosen_index]
    pq = betreg.population_quantities(
        chosen, inst.hypothesis_class, inst.space, inst.variance_per_point()
    )
    assert 0.0 <= pq.second_order_q <= pq.first_order_q <= 0.25
    assert 0.0 <= pq.mae <= 1.0
    # Bernoulli labels sit at the equality case
    assert pq.second_order_q == pytest.approx(pq.first_order_q, rel=1e-12)


def test_label_models():
    assert betreg.conditional_variance(betreg.Bernoulli(0.3)) == pytest.approx(0.21)
    assert betreg.conditional_variance(betreg.ThreePoint(0.5, 0.25, 0.08)) == pytest.approx(0.01)
    assert betreg.conditional_variance(betreg.Deterministic(0.9)) == 0.0
    model = betreg.ThreePoint(0.4, 0.2, 0.3)
    mass = sum(p for _, p in betreg.support_distribution(model))
    assert mass == pytest.approx(1.0)
    assert betreg.conditional_variance(model) <= betreg.bernoulli_variance_bound(model)


def test_linear_cover_and_bound():
    cover, eps_used = betreg.linear_cover_capped(2, 1e-4, 500)
    assert 10 < len(cover) <= 500
    assert eps_used > 1e-4
    thetas = [m.theta for m in cover.members]
    assert any(t == [0.0, 0.0] for t in thetas)


def test_file_roundtrip(tmp_path):
    inst = betreg.make_instance(support_size=4, class_size=3,
                                label_family="threepoint", seed=5)
    class_path = str(tmp_path / "inst.json")
    data_path = str(tmp_path / "data.csv")
    betreg.save_instance_file(class_path, inst)
    loaded = betreg.load_instance_file(class_path)
    assert loaded.space.points == inst.space.points

    data = betreg.sample_dataset(inst, 30, 6)
    betreg.save_dataset_csv(data_path, data)
    back = betreg.load_dataset_csv(data_path, loaded.space)
    assert len(back) == 30
    assert back.fully_indexed


def test_experiment_json_and_verify():
    config = {
        "seed": 5,
        "replications": 2,
        "estimators": ["log", "betting"],
        "n": [30],
        "instance": {"support_size": 4, "class_size": 3, "label_family": "bernoulli"},
    }
    csv, summary = betreg.run_experiment_json(json.dumps(config))
    header = csv.splitlines()[0]
    assert header == (
        "replication,estimator,n,sigma2,first_order_q,mae,bound_rhs,objective,"
        "grid_slack,seed,wall_ms"
    )
    assert len(csv.splitlines()) == 1 + 2 * 2
    cells = json.loads(summary)["cells"]
    assert len(cells) == 1

    report = json.loads(betreg.run_verify_json(suites=["gap", "structural"]))
    assert report["all_passed"]
