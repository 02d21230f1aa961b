"""Zadoff-Chu root sequences, cyclic shifts, and correlation primitives.

Root sequences c_u[l] = exp(-j*pi*u*l*(l+1)/N_ZC) for odd prime-length N_ZC
have unit modulus, ideal periodic autocorrelation, and constant-magnitude
sqrt(N_ZC) cross-correlation between distinct coprime roots.  Cyclic shifts
in steps of N_CS samples stay mutually orthogonal as long as N_CS covers the
round-trip delay plus delay spread of the cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT_M_S = 299_792_458.0


@dataclass(frozen=True)
class ZcConfig:
    """Sequence length and root index of a Zadoff-Chu family member."""

    n_zc: int
    root_u: int

    def __post_init__(self):
        if self.n_zc < 3 or self.n_zc % 2 == 0:
            raise ValueError(f"n_zc must be an odd integer >= 3, got {self.n_zc}")
        if not 1 <= self.root_u < self.n_zc:
            raise ValueError(
                f"root_u must satisfy 1 <= u < n_zc, got u={self.root_u}, n_zc={self.n_zc}"
            )
        if math.gcd(self.root_u, self.n_zc) != 1:
            raise ValueError(
                f"root_u must be coprime to n_zc: gcd({self.root_u}, {self.n_zc}) = "
                f"{math.gcd(self.root_u, self.n_zc)}"
            )


@dataclass(frozen=True)
class ZcSequence:
    """A (possibly cyclically shifted) Zadoff-Chu sequence realization."""

    config: ZcConfig
    shift_v: int
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.shift_v < 0:
            raise ValueError(f"shift_v must be nonnegative, got {self.shift_v}")
        if self.samples.shape != (self.config.n_zc,):
            raise ValueError(
                f"samples must have shape ({self.config.n_zc},), got {self.samples.shape}"
            )
        self.samples.setflags(write=False)


@dataclass(frozen=True)
class ShiftPlan:
    """Cyclic-shift step N_CS and the resulting shift count N_SS per root."""

    n_cs: int
    n_ss: int

    def __post_init__(self):
        if self.n_cs < 1:
            raise ValueError(f"n_cs must be >= 1, got {self.n_cs}")
        if self.n_ss < 2:
            raise ValueError(
                f"n_ss must be >= 2 for a usable shift family, got {self.n_ss}"
            )


def generate_root_sequence(config: ZcConfig) -> ZcSequence:
    """Generate c_u[l] = exp(-j*pi*u*l*(l+1)/n_zc), l = 0..n_zc-1."""
    l = np.arange(config.n_zc, dtype=np.float64)
    # u*l*(l+1) stays well inside float64 integer range for any practical n_zc.
    phase = -np.pi * config.root_u * l * (l + 1.0) / config.n_zc
    return ZcSequence(config=config, shift_v=0, samples=np.exp(1j * phase))


def cyclic_shift(seq: ZcSequence, v: int, n_cs: int) -> ZcSequence:
    """Shift by v steps of n_cs samples: out[l] = in[(l + v*n_cs) mod n_zc]."""
    n_zc = seq.config.n_zc
    n_ss = n_zc // n_cs
    if not 0 <= v < n_ss:
        raise ValueError(f"shift index v must satisfy 0 <= v < {n_ss}, got {v}")
    shifted = np.roll(seq.samples, -v * n_cs)
    return ZcSequence(config=seq.config, shift_v=seq.shift_v + v, samples=shifted)


def compute_ncs(
    cell_radius_m: float,
    tau_max_s: float,
    n_zc: int,
    delta_f_ra_hz: float,
    n_g: int = 0,
) -> int:
    """Smallest shift step covering round-trip delay, delay spread and guard.

    N_CS = ceil((2*R_c/c + tau_max) * n_zc * delta_f_ra) + n_g, clamped to a
    minimum of 1.  Raises when the cell is too large for any two shifts of one
    root to remain orthogonal (N_CS >= n_zc).
    """
    if cell_radius_m < 0 or tau_max_s < 0 or delta_f_ra_hz <= 0 or n_g < 0:
        raise ValueError("cell_radius_m, tau_max_s >= 0 and delta_f_ra_hz > 0 required")
    guard_time = 2.0 * cell_radius_m / SPEED_OF_LIGHT_M_S + tau_max_s
    n_cs = math.ceil(guard_time * n_zc * delta_f_ra_hz) + n_g
    n_cs = max(n_cs, 1)
    if n_cs >= n_zc:
        raise ValueError(
            f"cell too large for single-root orthogonality: N_CS={n_cs} >= n_zc={n_zc}"
        )
    return n_cs


def make_shift_plan(n_zc: int, n_cs: int) -> ShiftPlan:
    """Plan with N_SS = floor(n_zc / n_cs) shifts per root at step n_cs."""
    if n_cs < 1 or n_cs >= n_zc:
        raise ValueError(f"n_cs must satisfy 1 <= n_cs < n_zc, got {n_cs}")
    return ShiftPlan(n_cs=n_cs, n_ss=n_zc // n_cs)


def plan_from_subset_size(n_zc: int, n_ss: int) -> ShiftPlan:
    """Plan realizing exactly n_ss shifts, using the largest step that fits."""
    if not 2 <= n_ss <= n_zc:
        raise ValueError(f"n_ss must satisfy 2 <= n_ss <= n_zc, got {n_ss}")
    n_cs = n_zc // n_ss
    if n_cs < 1:
        raise ValueError(f"n_ss={n_ss} exceeds the number of samples {n_zc}")
    plan = make_shift_plan(n_zc, n_cs)
    if plan.n_ss < n_ss:
        raise ValueError(f"no shift step realizes n_ss={n_ss} for n_zc={n_zc}")
    # floor(n_zc / floor(n_zc / n_ss)) can exceed n_ss; keep the requested count.
    return ShiftPlan(n_cs=n_cs, n_ss=n_ss)


def periodic_crosscorrelation(a: np.ndarray, b: np.ndarray, lag: int) -> complex:
    """Periodic cross-correlation sum_l a[l] * conj(b[(l + lag) mod N])."""
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"a and b must be 1-d arrays of equal length, got {a.shape} vs {b.shape}")
    n = a.shape[0]
    return complex(np.dot(a, np.conj(np.roll(b, -(lag % n)))))


def correlation_profile(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Periodic cross-correlation at every lag 0..N-1 (direct summation)."""
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"a and b must be 1-d arrays of equal length, got {a.shape} vs {b.shape}")
    n = a.shape[0]
    idx = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    # row `lag` holds b[(l + lag) mod N], l = 0..N-1
    return np.conj(b[idx]) @ a


def default_roots(n_zc: int, r: int) -> tuple[int, ...]:
    """First r positive integers coprime to n_zc (all of 1..r when n_zc is prime)."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    roots = []
    u = 1
    while len(roots) < r:
        if u >= n_zc:
            raise ValueError(f"cannot find {r} distinct roots for n_zc={n_zc}")
        if math.gcd(u, n_zc) == 1:
            roots.append(u)
        u += 1
    return tuple(roots)
