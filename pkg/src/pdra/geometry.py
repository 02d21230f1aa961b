"""Cell layout, UE placement, and antenna-domain channel models.

The simulator assumes perfect uplink power control, so placement geometry
enters the link model only through the per-UE departure angle that steers
the antenna correlation matrix.  Pathloss and shadow fading are provided
for run reporting and topology exports, not for the success statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import cholesky

# urban micro mean-pathloss slopes
PATHLOSS_EXPONENT = {"nlos": 3.8, "los": 2.5}
SHADOW_SIGMA_DB = {"nlos": 10.0, "los": 4.0}


@dataclass(frozen=True)
class CellLayout:
    """Hexagonal cell grid: a center cell surrounded by full rings of neighbors."""

    radius_m: float = 500.0
    min_dist_m: float = 30.0
    tiers: int = 2

    def __post_init__(self):
        if self.radius_m <= 0:
            raise ValueError(f"radius_m must be positive, got {self.radius_m}")
        if not 0 <= self.min_dist_m < self.radius_m:
            raise ValueError(
                f"min_dist_m must lie in [0, radius_m), got {self.min_dist_m}"
            )
        if self.tiers < 0:
            raise ValueError(f"tiers must be >= 0, got {self.tiers}")

    @property
    def n_cells(self) -> int:
        return 1 + 3 * self.tiers * (self.tiers + 1)

    def cell_centers(self) -> np.ndarray:
        """(n_cells, 2) base-station positions, center cell first."""
        spacing = math.sqrt(3.0) * self.radius_m
        centers = []
        t = self.tiers
        for q in range(-t, t + 1):
            for r in range(-t, t + 1):
                if abs(q + r) > t:
                    continue
                x = spacing * (q + r / 2.0)
                y = spacing * (math.sqrt(3.0) / 2.0) * r
                centers.append((math.hypot(x, y), x, y))
        centers.sort(key=lambda c: (round(c[0], 9), round(c[1], 9), round(c[2], 9)))
        return np.array([(x, y) for _, x, y in centers])


@dataclass(frozen=True)
class UePlacement:
    """One UE dropped in the center cell, in BS-centered coordinates."""

    x_m: float
    y_m: float

    @property
    def distance_m(self) -> float:
        return math.hypot(self.x_m, self.y_m)

    @property
    def angle_rad(self) -> float:
        """Departure angle measured from the array broadside (BS x-axis)."""
        return math.atan2(self.y_m, self.x_m)


@dataclass(frozen=True)
class ChannelModelSpec:
    """Antenna count and spatial correlation of the UE-to-BS channel."""

    kind: str  # "iid" or "correlated"
    m_antennas: int
    rho: float = 0.0

    def __post_init__(self):
        if self.kind not in ("iid", "correlated"):
            raise ValueError(f"kind must be 'iid' or 'correlated', got {self.kind!r}")
        if self.m_antennas < 1:
            raise ValueError(f"m_antennas must be >= 1, got {self.m_antennas}")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")


def _inside_hexagon(x: float, y: float, radius: float) -> bool:
    # flat-top hexagon with vertices at (+-radius, 0), (+-radius/2, +-sqrt(3)/2 radius)
    s3 = math.sqrt(3.0)
    return (
        abs(y) <= s3 * radius / 2.0 + 1e-12
        and abs(s3 * x + y) <= s3 * radius + 1e-12
        and abs(s3 * x - y) <= s3 * radius + 1e-12
    )


def drop_ue(layout: CellLayout, rng: np.random.Generator) -> UePlacement:
    """Uniform drop in the center hexagon outside the BS exclusion disk."""
    r = layout.radius_m
    while True:
        x = rng.uniform(-r, r)
        y = rng.uniform(-r, r)
        if not _inside_hexagon(x, y, r):
            continue
        if math.hypot(x, y) < layout.min_dist_m:
            continue
        return UePlacement(x_m=x, y_m=y)


def correlation_matrix(m: int, rho: float, delta: float) -> np.ndarray:
    """Exponential correlation with angle steering: R[i,j] = rho^|j-i| e^{j delta (j-i)}."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    idx = np.arange(m)
    diff = idx[None, :] - idx[:, None]  # j - i
    return rho ** np.abs(diff) * np.exp(1j * delta * diff)


@lru_cache(maxsize=32)
def _toeplitz_cholesky(m: int, rho: float) -> np.ndarray:
    """Lower Cholesky factor of the real part rho^|j-i| (PD for rho < 1)."""
    idx = np.arange(m)
    t = rho ** np.abs(idx[None, :] - idx[:, None])
    out = cholesky(t, lower=True)
    out.setflags(write=False)
    return out


def correlation_factor(m: int, rho: float, delta: float) -> np.ndarray:
    """Factor F with F F^H equal to correlation_matrix(m, rho, delta).

    R = D* T D*^H with T the real exponential Toeplitz and D* = diag(e^{-j delta i}),
    so F = D* chol(T) works and the Toeplitz factor is cached across angles.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    phases = np.exp(-1j * delta * np.arange(m))
    return phases[:, None] * _toeplitz_cholesky(m, rho)


def sample_channel(
    spec: ChannelModelSpec,
    rng: np.random.Generator,
    placement: UePlacement | None = None,
) -> np.ndarray:
    """One CN(0, R) channel vector of length m_antennas.

    The iid model ignores placement; the correlated model steers the
    correlation matrix by the UE departure angle.
    """
    m = spec.m_antennas
    w = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / math.sqrt(2.0)
    if spec.kind == "iid":
        return w
    if placement is None:
        raise ValueError("correlated channels need a UE placement for the angle")
    f = correlation_factor(m, spec.rho, placement.angle_rad)
    return f @ w


def pathloss_db(distance_m: float, scenario: str = "nlos") -> float:
    """Mean pathloss slope 10*n*log10(d), n = 3.8 (NLoS) or 2.5 (LoS)."""
    if scenario not in PATHLOSS_EXPONENT:
        raise ValueError(f"scenario must be one of {sorted(PATHLOSS_EXPONENT)}, got {scenario!r}")
    if distance_m <= 0:
        raise ValueError(f"distance_m must be positive, got {distance_m}")
    return 10.0 * PATHLOSS_EXPONENT[scenario] * math.log10(distance_m)


def shadow_fading_db(scenario: str, rng: np.random.Generator) -> float:
    """Log-normal shadow fading draw in dB: sigma 10 (NLoS) or 4 (LoS)."""
    if scenario not in SHADOW_SIGMA_DB:
        raise ValueError(f"scenario must be one of {sorted(SHADOW_SIGMA_DB)}, got {scenario!r}")
    return float(rng.normal(0.0, SHADOW_SIGMA_DB[scenario]))
