"""Smoke tests for the papm python module."""

import math

import numpy as np
import pytest

papm = pytest.importorskip("papm")


def test_kernel_matches_closed_form():
    assert papm.ggd_kernel(0.0, sigma=4.0, shape=8.0) == 1.0
    assert papm.ggd_kernel(4.0, sigma=4.0, shape=2.0) == pytest.approx(math.exp(-0.5), rel=1e-12)
    assert papm.ggd_kernel(4.0, sigma=4.0, shape=8.0) == pytest.approx(
        math.exp(-0.0625), rel=1e-12
    )


def test_gen_papm_counts_points():
    pts = np.array([[8.5, 8.5], [24.5, 20.5]])
    m = papm.gen_papm(pts, width=32, height=32, sigma=4.0, shape=8.0)
    assert m.shape == (32, 32)
    assert m.sum() == pytest.approx(2.0, abs=1e-9)
    assert (m >= 0).all()


def test_transport_cost_table_rows():
    assert papm.transport_cost(16.0, family="ggd-l2", sigma=16.0, shape=2.0) == pytest.approx(
        256.0 * math.exp(0.5), rel=1e-12
    )
    assert papm.transport_cost(32.0, family="power", scale=16.0, power=4.0) == pytest.approx(
        16.0, rel=1e-12
    )


def test_sinkhorn_agrees_with_exact_oracle():
    rng = np.random.default_rng(5)
    C = rng.uniform(1.0, 2.0, size=(3, 6))
    source = np.full(3, 1.0 / 3.0)
    target = rng.uniform(0.2, 1.0, size=6)
    target /= target.sum()
    sol = papm.sinkhorn(
        C,
        list(source),
        list(target),
        eps=1e-3 * C.max(),
        eps_absolute=True,
        decay=0.5,
        max_iters=100000,
        tol=1e-7,
    )
    exact_value, plan = papm.exact_ot(C, list(source), list(target))
    assert sol["converged"]
    assert sol["value"] == pytest.approx(exact_value, rel=0.01)
    assert plan.shape == (3, 6)


def test_al_papm_loss_zero_at_rasterized_points():
    pts = np.array([[4.5, 4.5], [12.5, 10.5]])
    pred = np.zeros((16, 16))
    pred[4, 4] = 1.0
    pred[10, 12] = 1.0
    out = papm.al_papm_loss(pts, pred, max_iters=20000, tol=1e-10)
    assert out["total"] == pytest.approx(0.0, abs=1e-9)
    assert out["grad"].shape == (16, 16)


def test_metrics_and_localization():
    mae, mse = papm.mae_mse([3.0, 5.0], [4.0, 4.0])
    assert (mae, mse) == (pytest.approx(1.0), pytest.approx(1.0))

    pts = np.array([[8.2, 9.7], [24.5, 16.5]])
    pred = papm.gen_papm(pts, width=32, height=24)
    assert papm.game(pred, pts, 0) == pytest.approx(abs(pred.sum() - 2.0), abs=1e-12)
    loc = papm.localize_and_match(pred, pts, peak_threshold=0.5, match_radius=4.0)
    assert loc["precision"] == 1.0
    assert loc["recall"] == 1.0


def test_perturb_is_seeded_and_exact():
    pts = np.array([[16.0, 16.0], [40.0, 40.0]])
    moved_a, clamped_a = papm.perturb(pts, 64, 64, magnitude=8.0, mode="exact", seed=7)
    moved_b, _ = papm.perturb(pts, 64, 64, magnitude=8.0, mode="exact", seed=7)
    np.testing.assert_array_equal(moved_a, moved_b)
    assert clamped_a == 0
    d = np.hypot(*(moved_a - pts).T)
    np.testing.assert_allclose(d, 8.0, atol=1e-9)


def test_fit_map_concentrates_mass():
    pts = np.array([[12.0, 12.0]])
    out = papm.fit_map(pts, 24, 24, loss="al-papm", steps=300, max_iters=150)
    assert not out["diverged"]
    assert out["map"].sum() == pytest.approx(1.0, abs=0.25)
    assert len(out["trace"]) == 301


def test_map_io_roundtrip(tmp_path):
    m = np.random.default_rng(3).uniform(size=(4, 5))
    path = str(tmp_path / "m.papm")
    papm.write_map(path, m, format="binary")
    np.testing.assert_array_equal(papm.read_map(path), m)
