"""Unit tests for cell layout, UE drops, and channel correlation models."""

import math

import numpy as np
import pytest

from pdra.geometry import (
    CellLayout,
    ChannelModelSpec,
    UePlacement,
    correlation_factor,
    correlation_matrix,
    drop_ue,
    pathloss_db,
    sample_channel,
    shadow_fading_db,
)


def test_cell_counts_by_tier():
    assert CellLayout(tiers=0).n_cells == 1
    assert CellLayout(tiers=1).n_cells == 7
    assert CellLayout(tiers=2).n_cells == 19
    assert CellLayout(tiers=3).n_cells == 37


def test_two_tier_grid_geometry():
    layout = CellLayout(radius_m=500.0, tiers=2)
    centers = layout.cell_centers()
    assert centers.shape == (19, 2)
    np.testing.assert_allclose(centers[0], [0.0, 0.0], atol=1e-9)
    d = np.hypot(centers[:, 0], centers[:, 1])
    spacing = math.sqrt(3.0) * 500.0
    # first ring of 6 at one spacing, second ring alternating sqrt(3) and 2 spacings
    np.testing.assert_allclose(d[1:7], spacing, rtol=1e-12)
    assert np.sum(np.isclose(d, 2 * spacing)) == 6
    assert np.sum(np.isclose(d, math.sqrt(3.0) * spacing)) == 6


def test_layout_validation():
    with pytest.raises(ValueError):
        CellLayout(radius_m=0.0)
    with pytest.raises(ValueError):
        CellLayout(min_dist_m=500.0, radius_m=500.0)
    with pytest.raises(ValueError):
        CellLayout(tiers=-1)


def test_drops_respect_cell_and_exclusion():
    layout = CellLayout()
    rng = np.random.default_rng(11)
    s3 = math.sqrt(3.0)
    for _ in range(2000):
        p = drop_ue(layout, rng)
        assert p.distance_m >= layout.min_dist_m
        assert abs(p.y_m) <= s3 / 2 * layout.radius_m + 1e-9
        assert abs(s3 * p.x_m + p.y_m) <= s3 * layout.radius_m + 1e-9
        assert abs(s3 * p.x_m - p.y_m) <= s3 * layout.radius_m + 1e-9
        assert -math.pi <= p.angle_rad <= math.pi


def test_exclusion_disk_area_fraction():
    # the 30 m disk removes pi*30^2 / (3*sqrt(3)/2 * 500^2) = 0.435% of the cell
    layout = CellLayout()
    frac = math.pi * layout.min_dist_m**2 / (1.5 * math.sqrt(3.0) * layout.radius_m**2)
    assert abs(frac - 0.004353) < 1e-6

    rng = np.random.default_rng(7)
    n, inside_disk = 200_000, 0
    for _ in range(n):
        x = rng.uniform(-500, 500)
        y = rng.uniform(-500, 500)
        s3 = math.sqrt(3.0)
        if abs(y) > s3 * 250 or abs(s3 * x + y) > s3 * 500 or abs(s3 * x - y) > s3 * 500:
            continue
        if math.hypot(x, y) < 30.0:
            inside_disk += 1
    hex_draws = n * 1.5 * math.sqrt(3.0) * 500**2 / 1000**2
    assert abs(inside_disk / hex_draws - frac) < 7e-4


def test_correlation_matrix_2x2_eigenvalues():
    r = correlation_matrix(2, 0.7, 0.9)
    vals = np.sort(np.linalg.eigvalsh(r))
    np.testing.assert_allclose(vals, [0.3, 1.7], atol=1e-12)


@pytest.mark.parametrize("rho", [0.0, 0.3, 0.7, 0.99])
def test_correlation_matrix_is_psd_hermitian(rho):
    r = correlation_matrix(48, rho, 1.3)
    np.testing.assert_allclose(r, r.conj().T, atol=1e-12)
    assert np.min(np.linalg.eigvalsh(r)) > -1e-10
    np.testing.assert_allclose(np.diag(r).real, 1.0, atol=1e-12)


def test_correlation_matrix_entries():
    r = correlation_matrix(4, 0.7, 0.5)
    assert abs(r[1, 2] - 0.7 * np.exp(1j * 0.5)) < 1e-12
    assert abs(r[2, 1] - 0.7 * np.exp(-1j * 0.5)) < 1e-12
    np.testing.assert_allclose(correlation_matrix(6, 0.0, 0.4), np.eye(6), atol=1e-15)


def test_correlation_factor_reproduces_matrix():
    for m, rho, delta in [(16, 0.7, 0.0), (64, 0.7, 1.1), (32, 0.4, -2.0)]:
        f = correlation_factor(m, rho, delta)
        np.testing.assert_allclose(
            f @ f.conj().T, correlation_matrix(m, rho, delta), atol=1e-9
        )


def test_iid_channel_statistics():
    spec = ChannelModelSpec(kind="iid", m_antennas=8)
    rng = np.random.default_rng(3)
    h = np.array([sample_channel(spec, rng) for _ in range(20000)])
    cov = h.T.conj() @ h / len(h)
    np.testing.assert_allclose(cov, np.eye(8), atol=0.05)
    assert abs(np.mean(h)) < 0.01


def test_correlated_channel_adjacent_correlation():
    spec = ChannelModelSpec(kind="correlated", m_antennas=16, rho=0.7)
    place = UePlacement(x_m=100.0, y_m=150.0)
    delta = place.angle_rad
    rng = np.random.default_rng(5)
    h = np.array([sample_channel(spec, rng, place) for _ in range(20000)])
    adj = np.mean(h[:, :-1] * np.conj(h[:, 1:]))
    assert abs(adj - 0.7 * np.exp(1j * delta)) < 0.02
    # per-antenna power stays normalized
    assert abs(np.mean(np.abs(h) ** 2) - 1.0) < 0.02


def test_correlated_channel_requires_placement():
    spec = ChannelModelSpec(kind="correlated", m_antennas=8, rho=0.7)
    with pytest.raises(ValueError, match="placement"):
        sample_channel(spec, np.random.default_rng(0))


def test_channel_spec_validation():
    with pytest.raises(ValueError):
        ChannelModelSpec(kind="rayleigh", m_antennas=8)
    with pytest.raises(ValueError):
        ChannelModelSpec(kind="iid", m_antennas=0)
    with pytest.raises(ValueError):
        ChannelModelSpec(kind="correlated", m_antennas=8, rho=1.0)
    with pytest.raises(ValueError):
        correlation_matrix(8, -0.1, 0.0)


def test_pathloss_slopes():
    assert abs((pathloss_db(200.0) - pathloss_db(100.0)) - 38.0 * math.log10(2.0)) < 1e-9
    assert abs(pathloss_db(200.0) - pathloss_db(100.0) - 11.44) < 0.01
    for d in (2.0, 50.0, 500.0):
        assert pathloss_db(d, "los") <= pathloss_db(d, "nlos")
    with pytest.raises(ValueError):
        pathloss_db(100.0, "indoor")
    with pytest.raises(ValueError):
        pathloss_db(0.0)


def test_shadow_fading_spread():
    rng = np.random.default_rng(9)
    draws = np.array([shadow_fading_db("nlos", rng) for _ in range(100_000)])
    assert abs(np.std(draws) - 10.0) < 0.1
    assert abs(np.mean(draws)) < 0.15
    draws_los = np.array([shadow_fading_db("los", rng) for _ in range(100_000)])
    assert abs(np.std(draws_los) - 4.0) < 0.05
