"""Ergodic capacity of the composite link by three independent methods:
a Fox-H closed form, direct quadrature of the capacity integral, and
Monte-Carlo simulation.

All three evaluate C = E[log2(1 + Delta * |h_fp|**2)] in bits/s/Hz, where
h_fp = h_f * h_p is the product of the fading and misalignment envelopes
and Delta = |h_l|**2 * P/N_o absorbs the deterministic gain; no bandwidth
multiplication happens anywhere here.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as sc

from .absorption import AbsorptionProvider
from .channel import (
    AlphaMuParams,
    Environment,
    LinkParams,
    MisalignmentGeometry,
    deterministic_gain,
    hp_of_r,
    sample_alpha_mu,
    sample_radial,
)
from .errors import AccuracyError, UnsupportedParametersError
from .specfun import FoxHSpec, fox_h, upper_incomplete_gamma

__all__ = [
    "TheoremConstants",
    "CapacityResult",
    "build_constants",
    "snr_instant",
    "capacity_closed_form",
    "capacity_quadrature",
    "capacity_monte_carlo",
    "MC_CHUNK",
]

_LN2 = math.log(2.0)

# Monte-Carlo sampling is chunked in fixed blocks; chunk i draws from a
# generator seeded by SeedSequence(entropy=seed, spawn_key=(i,)).  The
# chunk partition depends only on the sample count, so results are
# invariant to how the chunks are scheduled.
MC_CHUNK = 1_000_000


@dataclass(frozen=True)
class TheoremConstants:
    """Constants of the closed-form capacity expression.

    delta   -- deterministic SNR gain |h_l|**2 * P/N_o
    lam     -- xi - 1 (misalignment exponent shift)
    phi     -- (alpha*mu - xi)/alpha; may be negative (tracked, supported)
    x_scale -- mu / (h_hat**alpha * A_o**alpha)
    theta   -- xi * A_o**(-xi) * mu**(xi/alpha) / (h_hat**xi * Gamma(mu))
    alpha   -- fading shape, needed to assemble the H-function rows
    """

    delta: float
    lam: float
    phi: float
    x_scale: float
    theta: float
    alpha: float

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ValueError("TheoremConstants.delta must be > 0")
        if not self.lam + 1.0 > 0.0:
            raise ValueError("TheoremConstants: lam + 1 (= xi) must be > 0")
        if not self.x_scale > 0.0:
            raise ValueError("TheoremConstants.x_scale must be > 0")
        if not self.theta > 0.0:
            raise ValueError("TheoremConstants.theta must be > 0")
        if not self.alpha > 0.0:
            raise ValueError("TheoremConstants.alpha must be > 0")


@dataclass(frozen=True)
class CapacityResult:
    """Capacity in bits/s/Hz plus provenance.  std_error and sample_count
    are zero for the deterministic methods."""

    value: float
    method: str
    std_error: float = 0.0
    sample_count: int = 0
    warning: str | None = None


def build_constants(
    link: LinkParams,
    env: Environment,
    provider: AbsorptionProvider,
    geom: MisalignmentGeometry,
    fading: AlphaMuParams,
) -> TheoremConstants:
    """Assemble the closed-form constants from the channel description.

    Raises UnsupportedParametersError when a constant leaves the double
    range (extreme xi makes the A_o**(-xi) prefactor overflow; the
    Monte-Carlo path remains usable there).
    """
    h_l = deterministic_gain(link, env, provider)
    a, mu, h_hat = fading.alpha, fading.mu, fading.h_hat
    xi, A_o = geom.xi, geom.A_o
    try:
        theta = float(xi * A_o ** (-xi) * mu ** (xi / a) / (h_hat**xi * sc.gamma(mu)))
    except OverflowError:
        theta = math.inf
    if not math.isfinite(theta) or theta <= 0.0:
        raise UnsupportedParametersError(
            f"closed-form constants leave the double range for xi={xi:g}, "
            f"mu={mu:g}, alpha={a:g}; use the monte_carlo method"
        )
    return TheoremConstants(
        delta=h_l * h_l * link.snr0,
        lam=xi - 1.0,
        phi=(a * mu - xi) / a,
        x_scale=mu / (h_hat**a * A_o**a),
        theta=theta,
        alpha=a,
    )


def snr_instant(h: float, snr0: float) -> float:
    """Instantaneous SNR |h|**2 * P/N_o for channel amplitude h."""
    if not h > 0.0:
        raise ValueError("snr_instant: h must be > 0")
    if not snr0 > 0.0:
        raise ValueError("snr_instant: snr0 must be > 0")
    return h * h * snr0


def capacity_fox_h_spec(constants: TheoremConstants) -> FoxHSpec:
    """H-function orders and rows of the closed-form capacity kernel."""
    half_xi = 0.5 * (constants.lam + 1.0)
    half_a = 0.5 * constants.alpha
    return FoxHSpec(
        m=4,
        n=1,
        upper_params=((-half_xi, half_a), (1.0 - half_xi, half_a), (1.0, 1.0)),
        lower_params=((0.0, 1.0), (constants.phi, 1.0), (-half_xi, half_a), (-half_xi, half_a)),
    )


def capacity_closed_form(constants: TheoremConstants) -> CapacityResult:
    """Closed-form ergodic capacity

        C = Theta * Delta**(-xi/2) / (2 ln 2) * H[x_scale / Delta**(alpha/2)]

    with the H-function of capacity_fox_h_spec.  The 1/2 is the Jacobian
    of folding the envelope integral onto the squared-envelope axis;
    dropping it makes this path disagree with capacity_quadrature by a
    factor of two (pinned by the cross-validation tests).
    """
    half_xi = 0.5 * (constants.lam + 1.0)
    spec = capacity_fox_h_spec(constants)
    z = constants.x_scale / constants.delta ** (0.5 * constants.alpha)
    try:
        h_val = fox_h(spec, z)
    except (ArithmeticError, ValueError) as exc:
        raise type(exc)(
            f"closed-form capacity failed for delta={constants.delta:g}, "
            f"lam={constants.lam:g}, phi={constants.phi:g}, "
            f"x_scale={constants.x_scale:g}, alpha={constants.alpha:g}: {exc}"
        ) from exc
    value = constants.theta * constants.delta ** (-half_xi) / (2.0 * _LN2) * h_val
    return CapacityResult(value=value, method="closed_form")


def capacity_quadrature(constants: TheoremConstants) -> CapacityResult:
    """Direct quadrature of

        C = Theta / ln 2 * int_0^inf x**lam ln(1 + Delta x**2)
                                     G(phi, x_scale * x**alpha) dx.

    The domain is split where the incomplete-gamma argument w = x_scale *
    x**alpha crosses 1.  The origin piece integrates in v = x**p with
    p = min(xi, alpha*mu): near x = 0 the integrand behaves like
    x**(xi-1) when phi > 0 but like x**(alpha*mu - 1) when phi < 0 (the
    incomplete gamma itself then diverges as x**(alpha*phi)), and this p
    absorbs whichever singularity applies.  The tail piece integrates in
    w itself, where the integrand decays like exp(-w), truncated at
    w = 200.  Independent of the Fox-H path: only the incomplete gamma
    is shared.
    """
    xi = constants.lam + 1.0
    a = constants.alpha
    delta = constants.delta
    x_scale = constants.x_scale
    phi = constants.phi
    p = min(xi, xi + a * phi)

    def origin_integrand_logv(y: float) -> float:
        # v = exp(y); the exp(y) Jacobian is folded into the v power, so
        # this is v**(xi/p) * log1p(delta x**2) * G(phi, x_scale * x**a).
        x_sq = math.exp(2.0 * y / p)
        weight = math.exp(y * xi / p)
        if weight == 0.0:
            return 0.0
        return (
            weight
            * math.log1p(delta * x_sq)
            * upper_incomplete_gamma(phi, x_scale * math.exp(y * a / p))
        )

    def tail_integrand(w: float) -> float:
        return (
            w ** (xi / a - 1.0)
            * math.log1p(delta * (w / x_scale) ** (2.0 / a))
            * upper_incomplete_gamma(phi, w)
        )

    # Origin piece in log space (the integrand spans many decades of v for
    # large xi).  Two lower cutoffs apply: y_sliver, deep enough that the
    # truncated mass is ~1e-60 of the endpoint value (the integrand grows
    # at least like exp(y (p+2)/p) toward y_split), and y_overflow, below
    # which G(phi, u) ~ u**phi alone would overflow the double range for
    # strongly negative phi.  When the overflow cutoff is the binding one
    # the residual sliver bound is added to the error estimate.
    y_split = -math.log(x_scale) * p / a
    y_sliver = y_split - 60.0 * math.log(10.0) * p / (p + 2.0)
    if phi < 0.0:
        y_overflow = math.log(max(math.exp(-700.0 / -phi), 1e-300) / x_scale) * p / a
    else:
        y_overflow = math.log(1e-300 / x_scale) * p / a
    y_floor = max(y_sliver, y_overflow)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        origin, origin_err = integrate.quad(
            origin_integrand_logv, y_floor, y_split, limit=300, epsabs=0.0, epsrel=1e-11
        )
        if y_floor > y_sliver:
            origin_err += (
                origin_integrand_logv(y_split)
                * math.exp((y_floor - y_split) * (p + 2.0) / p)
                * p
                / (p + 2.0)
            )
        tail, tail_err = integrate.quad(
            tail_integrand, 1.0, 200.0, points=[50.0], limit=300,
            epsabs=0.0, epsrel=1e-11,
        )
    scale = constants.theta / _LN2
    value = scale * (origin / p + tail * x_scale ** (-xi / a) / a)
    err = scale * (origin_err / p + tail_err * x_scale ** (-xi / a) / a)
    if err > max(1e-10, 1e-8 * abs(value)):
        raise AccuracyError(
            f"capacity quadrature error estimate {err:.2e} above tolerance",
            achieved=err,
        )
    return CapacityResult(value=value, method="quadrature")


def capacity_monte_carlo(
    link: LinkParams,
    env: Environment,
    provider: AbsorptionProvider,
    geom: MisalignmentGeometry,
    fading: AlphaMuParams,
    n: int,
    seed: int,
) -> CapacityResult:
    """Sample-mean estimate of the ergodic capacity.

    Draws n i.i.d. (radial displacement, fading envelope) pairs, forms
    h = h_l * h_p(r) * h_f and averages log2(1 + |h|**2 * snr0).  Sampling
    is chunked (MC_CHUNK) with one child generator per chunk derived from
    the seed by a fixed spawn rule, so the result is bit-reproducible for
    a given (seed, n) regardless of scheduling.
    """
    if n < 1:
        raise ValueError("capacity_monte_carlo: n must be >= 1")
    h_l = deterministic_gain(link, env, provider)
    gain2 = h_l * h_l * link.snr0

    total = 0.0
    total_sq = 0.0
    done = 0
    chunk_index = 0
    while done < n:
        m = min(MC_CHUNK, n - done)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,)))
        r = sample_radial(geom.sigma_s_m, rng, size=m)
        h_f = sample_alpha_mu(fading, rng, size=m)
        h_fp = hp_of_r(r, geom) * h_f
        c = np.log1p(gain2 * h_fp * h_fp) / _LN2
        total += float(np.sum(c))
        total_sq += float(np.sum(c * c))
        done += m
        chunk_index += 1

    mean = total / n
    if n > 1:
        var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
        std_error = math.sqrt(var / n)
    else:
        std_error = math.inf
    warning = "std_error unreliable below 1e4 samples" if n < 10_000 else None
    return CapacityResult(
        value=mean,
        method="monte_carlo",
        std_error=std_error,
        sample_count=n,
        warning=warning,
    )
