"""Closed-form success probability of pattern-domain random access (L = 2).

The tagged UE succeeds when no other UE drew its exact pattern, the pattern
collision events leave at least one component recoverable (E0: neither shift
shared, E1: exactly one shared), and the post-despreading SINR clears the
detection threshold.  With matched-filter reception and a large antenna
array the SINR condition reduces to a cap on the number K of other-root
interferers, so

    P_MF = P_S * sum_{K=0..Kcap} P(K) * (p_e0(K) + p_e1(K))

with all factors available in closed form.  Everything here is evaluated in
the log domain to stay stable for large user counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import binom


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        raise ValueError(f"need a positive linear value, got {x}")
    return 10.0 * math.log10(x)


def _ln_comb(n: int, k: int) -> float:
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


@dataclass(frozen=True)
class AnalyticParams:
    """Inputs of the closed-form model.

    alpha_th is the linear SINR threshold; interface layers convert from dB.
    """

    n_active: int
    r_roots: int
    n_ss: int
    n_zc: int
    alpha_th: float

    def __post_init__(self):
        if self.n_active < 1:
            raise ValueError(f"n_active must be >= 1, got {self.n_active}")
        if self.r_roots < 1:
            raise ValueError(f"r_roots must be >= 1, got {self.r_roots}")
        if self.n_ss < 4:
            raise ValueError(
                f"n_ss must be >= 4 for the collision decomposition, got {self.n_ss}"
            )
        if self.n_zc < 3:
            raise ValueError(f"n_zc must be >= 3, got {self.n_zc}")
        if self.alpha_th <= 0:
            raise ValueError(f"alpha_th must be a positive linear value, got {self.alpha_th}")

    @property
    def n_ps(self) -> int:
        """Patterns per root for the two-component design."""
        return math.comb(self.n_ss, 2)

    @property
    def n_p(self) -> int:
        """Total pattern pool size."""
        return self.r_roots * self.n_ps


@dataclass(frozen=True)
class CollisionEventProbs:
    """Conditional probabilities of the recoverable collision events."""

    p_e0: float
    p_e1: float


def p_no_pattern_collision(n_active: int, n_p: int) -> float:
    """P_S = (1 - 1/N_P)^(N-1): no other UE drew the tagged pattern."""
    if n_active < 1 or n_p < 1:
        raise ValueError(f"need n_active >= 1 and n_p >= 1, got {n_active}, {n_p}")
    if n_active == 1:
        return 1.0
    if n_p == 1:
        return 0.0
    return math.exp((n_active - 1) * math.log1p(-1.0 / n_p))


def p_no_pattern_collision_binomial(p_a: float, population: int, n_p: int) -> float:
    """Collision-free probability with Binomial(population-1, p_a) other UEs.

    E[(1 - 1/N_P)^B] is the binomial generating function at 1 - 1/N_P,
    giving the closed form (1 - p_a/N_P)^(population-1).
    """
    if not 0.0 <= p_a <= 1.0:
        raise ValueError(f"p_a must lie in [0, 1], got {p_a}")
    if population < 1 or n_p < 1:
        raise ValueError(f"need population >= 1 and n_p >= 1, got {population}, {n_p}")
    return math.exp((population - 1) * math.log1p(-p_a / n_p))


def p_k_other_roots(k: int, params: AnalyticParams) -> float:
    """P(K): K of the other N-1 UEs hold different-root patterns.

    Conditioned on no exact pattern collision, each other UE is uniform over
    the remaining R*N_PS - 1 patterns, of which (R-1)*N_PS belong to other
    roots.  Evaluated via log-gamma to stay exact for large N.
    """
    n_others = params.n_active - 1
    if not 0 <= k <= n_others:
        raise ValueError(f"k must lie in [0, {n_others}], got {k}")
    return math.exp(_log_p_k_other_roots(k, params))


def _log_p_k_other_roots(k: int, params: AnalyticParams) -> float:
    n_others = params.n_active - 1
    n_ps = params.n_ps
    other_root = (params.r_roots - 1) * n_ps
    same_root = n_ps - 1
    total = params.r_roots * n_ps - 1
    if n_others == 0:
        return 0.0 if k == 0 else -math.inf
    if other_root == 0:
        return 0.0 if k == 0 else -math.inf
    log_p = _ln_comb(n_others, k) - n_others * math.log(total)
    if k > 0:
        log_p += k * math.log(other_root)
    if n_others - k > 0:
        log_p += (n_others - k) * math.log(same_root)
    return float(log_p)


def collision_event_probs(n_same_root_others: int, n_ss: int) -> CollisionEventProbs:
    """Conditional E0/E1 probabilities given n same-root non-identical others.

    Each such UE is uniform over the N_PS - 1 same-root patterns other than
    the tagged one.  With a = n_ss - 2 subsets sharing a given single shift
    and d = (n_ss - 2)(n_ss - 3)/2 subsets avoiding both tagged shifts:

        p_e0 = (d / (N_PS - 1))^n
        p_e1 = 2 * sum_{T=1..n} C(n, T) a^T d^(n-T) / (N_PS - 1)^n

    The factor 2 counts which of the two tagged shifts stays collision-free.
    """
    if n_same_root_others < 0:
        raise ValueError(f"n_same_root_others must be >= 0, got {n_same_root_others}")
    if n_ss < 4:
        raise ValueError(f"n_ss must be >= 4, got {n_ss}")
    n = n_same_root_others
    if n == 0:
        return CollisionEventProbs(p_e0=1.0, p_e1=0.0)
    a = n_ss - 2
    d = (n_ss - 2) * (n_ss - 3) // 2
    n_ps = math.comb(n_ss, 2)
    log_den = n * math.log(n_ps - 1)
    p_e0 = math.exp(n * math.log(d) - log_den)
    # d >= 1 whenever n_ss >= 4, so every term is finite in the log domain
    terms = [
        _ln_comb(n, t) + t * math.log(a) + (n - t) * math.log(d)
        for t in range(1, n + 1)
    ]
    p_e1 = 2.0 * math.exp(float(logsumexp(terms)) - log_den)
    return CollisionEventProbs(p_e0=p_e0, p_e1=min(p_e1, 1.0 - p_e0))


def asymptotic_sinr(n_zc: int, k_different_root: int) -> float:
    """Large-array matched-filter SINR model: N_ZC / (4K), inf at K = 0."""
    if k_different_root < 0:
        raise ValueError(f"k_different_root must be >= 0, got {k_different_root}")
    if k_different_root == 0:
        return math.inf
    return n_zc / (4.0 * k_different_root)


def sinr_limited_k_cap(n_zc: int, alpha_th: float, l: int = 2) -> int:
    """Largest K whose asymptotic SINR still clears the linear threshold.

    Two-component patterns tolerate K <= N_ZC / (4 * alpha_th) other-root
    interferers; plain single-shift pilots tolerate K <= N_ZC / alpha_th.
    Boundary K with equality counts as admissible.
    """
    if l == 2:
        limit = n_zc / (4.0 * alpha_th)
        step = 4.0
    elif l == 1:
        limit = n_zc / alpha_th
        step = 1.0
    else:
        raise ValueError(f"asymptotic SINR cap defined only for l in {{1, 2}}, got l={l}")
    cap = int(math.floor(limit))
    # guard the floating-point boundary: equality 4*K*alpha = N_ZC is admissible
    while step * (cap + 1) * alpha_th <= n_zc:
        cap += 1
    while cap > 0 and step * cap * alpha_th > n_zc:
        cap -= 1
    return cap


def success_probability_pdra(params: AnalyticParams) -> float:
    """Closed-form matched-filter success probability for two-component patterns."""
    n_others = params.n_active - 1
    k_cap = min(sinr_limited_k_cap(params.n_zc, params.alpha_th, l=2), n_others)
    bracket = 0.0
    for k in range(k_cap + 1):
        log_pk = _log_p_k_other_roots(k, params)
        if log_pk == -math.inf:
            continue
        ev = collision_event_probs(n_others - k, params.n_ss)
        bracket += math.exp(log_pk) * (ev.p_e0 + ev.p_e1)
    return p_no_pattern_collision(params.n_active, params.n_p) * bracket


def success_probability_conventional(params: AnalyticParams) -> float:
    """Single-shift pilot baseline under the same activity and threshold.

    Each UE draws one of R*N_SS plain cyclic shifts.  Non-identical pilots
    never partially collide, so the event bracket is 1 and only the exact
    collision term and the other-root SINR cap remain.
    """
    n_others = params.n_active - 1
    pool = params.r_roots * params.n_ss
    p_s = p_no_pattern_collision(params.n_active, pool)
    k_cap = min(sinr_limited_k_cap(params.n_zc, params.alpha_th, l=1), n_others)
    other_root = (params.r_roots - 1) * params.n_ss
    same_root = params.n_ss - 1
    total = pool - 1
    bracket = 0.0
    for k in range(k_cap + 1):
        if n_others == 0:
            bracket += 1.0 if k == 0 else 0.0
            continue
        if other_root == 0:
            bracket += 1.0 if k == 0 else 0.0
            continue
        log_p = _ln_comb(n_others, k) - n_others * math.log(total)
        if k > 0:
            log_p += k * math.log(other_root)
        if n_others - k > 0:
            log_p += (n_others - k) * math.log(same_root)
        bracket += math.exp(log_p)
    return p_s * bracket


def success_probability_random_activity(
    p_a: float,
    population: int,
    params: AnalyticParams,
    scheme: str = "pdra",
) -> float:
    """Mixture of the fixed-N model over binomial random activity.

    The tagged UE is active by construction; the other population - 1 UEs
    are active independently with probability p_a.  The binomial tail is
    truncated once the discarded mass falls below 1e-12.
    """
    if not 0.0 <= p_a <= 1.0:
        raise ValueError(f"p_a must lie in [0, 1], got {p_a}")
    if population < 1:
        raise ValueError(f"population must be >= 1, got {population}")
    if scheme == "pdra":
        fixed_n = success_probability_pdra
    elif scheme == "conventional":
        fixed_n = success_probability_conventional
    else:
        raise ValueError(f"scheme must be 'pdra' or 'conventional', got {scheme!r}")

    n_others_max = population - 1
    dist = binom(n_others_max, p_a)
    lo = int(dist.ppf(1e-13)) if n_others_max > 0 else 0
    hi = int(dist.ppf(1.0 - 1e-13)) if n_others_max > 0 else 0
    # widen until the kept mass provably leaves < 1e-12 outside
    while lo > 0 and dist.cdf(lo - 1) > 0.5e-12:
        lo -= 1
    while hi < n_others_max and dist.sf(hi) > 0.5e-12:
        hi += 1
    total = 0.0
    for n_others in range(lo, hi + 1):
        w = float(dist.pmf(n_others))
        if w == 0.0:
            continue
        point = AnalyticParams(
            n_active=n_others + 1,
            r_roots=params.r_roots,
            n_ss=params.n_ss,
            n_zc=params.n_zc,
            alpha_th=params.alpha_th,
        )
        total += w * fixed_n(point)
    return total
