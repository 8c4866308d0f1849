"""Volume of small chordal-metric balls between unequal-dimensional planes.

For a center in ``G_{n,q}`` and a ball in ``G_{n,p}`` (``p <= q``), the
volume for radius ``delta <= 1`` expands as::

    mu(B(delta)) = c * delta^t * (1 + c1 * delta^2 + o(delta^2)),
    t = beta * p * (n - q),

with a closed-form leading coefficient ``c`` and second-order coefficient
``c1``.  The expansion is exact (no higher-order terms) for complex
``q = p`` and for real ``q = p + 1``.  This module evaluates the closed
form, two-sided bounds, the Barg-Nogin large-``n`` approximation used as a
baseline, and a Monte-Carlo estimate of the true volume.

All gamma-ratio products are accumulated as log-gamma sums so that large
``n`` (up to several hundred) neither overflows nor underflows.
"""

from __future__ import annotations

import concurrent.futures
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, RadiusTooLarge
from .manifold import FieldKind, GrassmannSpec, sample_isotropic_bases

# Sample chunk bound for Monte-Carlo passes, sized for ~100 MB working sets.
_MC_CHUNK = 1 << 17


class VolumeMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    LOWER_BOUND = "lower_bound"
    UPPER_BOUND = "upper_bound"
    BARG_NOGIN = "barg_nogin"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class VolumeEstimate:
    """A volume value in [0, 1] with its provenance.

    ``stderr`` is zero for closed-form methods; ``samples`` is set for
    Monte-Carlo estimates only.
    """

    value: float
    stderr: float
    method: VolumeMethod
    samples: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"volume must lie in [0, 1], got {self.value}")
        if self.stderr < 0.0:
            raise DomainError(f"stderr must be non-negative, got {self.stderr}")


@dataclass(frozen=True)
class BallSpec:
    """Ball of chordal radius ``radius`` in ``G_{n,p}`` about a center in ``G_{n,q}``.

    Requires ``1 <= p <= q <= n - 1``.  The radius may not exceed
    ``sqrt(p)``, the diameter of the metric; ``radius = 0`` is allowed and
    denotes the measure-zero ball.  Closed-form operations additionally
    require ``radius <= 1``.
    """

    n: int
    p: int
    q: int
    beta: int
    radius: float

    def __post_init__(self) -> None:
        _check_dims(self.n, self.p, self.q, self.beta)
        max_radius = math.sqrt(self.p)
        if not 0.0 <= self.radius <= max_radius + 1e-12:
            raise DomainError(
                f"radius must lie in [0, sqrt(p)] = [0, {max_radius:.6g}], got {self.radius}"
            )

    @property
    def degree(self) -> int:
        """Leading exponent t = beta * p * (n - q)."""
        return self.beta * self.p * (self.n - self.q)

    @property
    def field(self) -> FieldKind:
        return FieldKind.from_beta(self.beta)


def _check_dims(n: int, p: int, q: int, beta: int) -> None:
    for name, v in (("n", n), ("p", p), ("q", q), ("beta", beta)):
        if not isinstance(v, (int, np.integer)):
            raise DomainError(f"{name} must be an integer, got {v!r}")
    if beta not in (1, 2):
        raise DomainError(f"beta must be 1 or 2, got {beta}")
    if not 1 <= p <= q <= n - 1:
        raise DomainError(
            f"dimensions must satisfy 1 <= p <= q <= n - 1, got n={n}, p={p}, q={q}"
        )


def log_coeff_c(n: int, p: int, q: int, beta: int) -> float:
    """Natural log of the leading volume coefficient ``c``.

    Two equivalent gamma-product forms cover ``p + q <= n`` and
    ``p + q >= n``; they agree on the boundary.  Computed entirely in
    log space.
    """
    _check_dims(n, p, q, beta)
    h = beta / 2.0
    out = -float(gammaln(h * p * (n - q) + 1.0))
    if p + q <= n:
        i = np.arange(1, p + 1)
        out += float(np.sum(gammaln(h * (n - i + 1)) - gammaln(h * (q - i + 1))))
    else:
        i = np.arange(1, n - q + 1)
        out += float(np.sum(gammaln(h * (n - i + 1)) - gammaln(h * (n - p - i + 1))))
    return out


def coeff_c(n: int, p: int, q: int, beta: int) -> float:
    """Leading volume coefficient ``c`` (may be subnormal for very large n)."""
    return math.exp(log_coeff_c(n, p, q, beta))


def coeff_c1(n: int, p: int, q: int, beta: int) -> float:
    """Second-order coefficient ``c1`` of the small-radius expansion.

    Zero exactly in the two exact cases (complex ``q = p``; real
    ``q = p + 1``).
    """
    _check_dims(n, p, q, beta)
    half_t = beta * p * (n - q) / 2.0
    return -(beta * (q - p + 1) / 2.0 - 1.0) * half_t / (half_t + 1.0)


def _leading_term(spec: BallSpec) -> float:
    """c * radius^t, via logs when the coefficient leaves normal float range."""
    if spec.radius == 0.0:
        return 0.0
    log_c = log_coeff_c(spec.n, spec.p, spec.q, spec.beta)
    c = math.exp(log_c)
    if math.isfinite(c) and c > 0.0:
        return c * spec.radius**spec.degree
    return math.exp(log_c + spec.degree * math.log(spec.radius))


def _require_unit_radius(spec: BallSpec) -> None:
    if spec.radius > 1.0:
        raise RadiusTooLarge(
            f"closed-form volume requires radius <= 1, got {spec.radius}"
        )


def ball_volume_approx(spec: BallSpec, include_correction: bool = False) -> VolumeEstimate:
    """Closed-form volume ``c * delta^t``, optionally with the ``c1 delta^2`` term.

    Valid for ``radius <= 1``; the result is clamped into [0, 1].  The
    remainder beyond the second-order term is not modeled.
    """
    _require_unit_radius(spec)
    value = _leading_term(spec)
    if include_correction:
        c1 = coeff_c1(spec.n, spec.p, spec.q, spec.beta)
        value *= 1.0 + c1 * spec.radius**2
    value = min(max(value, 0.0), 1.0)
    return VolumeEstimate(value=value, stderr=0.0, method=VolumeMethod.CLOSED_FORM)


def ball_volume_bounds(spec: BallSpec) -> tuple[VolumeEstimate, VolumeEstimate]:
    """Two-sided volume bounds valid for all ``radius <= 1``.

    Real field with ``p = q``::

        c d^t <= mu <= c d^t (1 - d^2)^(-p/2)

    all other cases::

        (1 - d^2)^(beta p (q - p + 1)/2 - p) c d^t <= mu <= c d^t

    Both sides are clamped into [0, 1] (the volume never exceeds 1).
    """
    _require_unit_radius(spec)
    lead = _leading_term(spec)
    dsq = spec.radius**2
    if spec.beta == 1 and spec.p == spec.q:
        lower = lead
        if spec.radius < 1.0:
            upper = lead * (1.0 - dsq) ** (-spec.p / 2.0)
        else:
            upper = math.inf
    else:
        exponent = spec.beta * spec.p * (spec.q - spec.p + 1) / 2.0 - spec.p
        lower = (1.0 - dsq) ** exponent * lead
        upper = lead
    lower = min(max(lower, 0.0), 1.0)
    upper = min(max(upper, 0.0), 1.0)
    return (
        VolumeEstimate(value=lower, stderr=0.0, method=VolumeMethod.LOWER_BOUND),
        VolumeEstimate(value=upper, stderr=0.0, method=VolumeMethod.UPPER_BOUND),
    )


def barg_nogin_approx(n: int, p: int, beta: int, radius: float) -> VolumeEstimate:
    """Laplace-method volume approximation ``(radius / sqrt(p))^(beta n p)``.

    A baseline for the equal-dimensional case, accurate only when
    ``p = q << n``.
    """
    _check_dims(n, p, p, beta)
    if not 0.0 <= radius <= math.sqrt(p) + 1e-12:
        raise DomainError(f"radius must lie in [0, sqrt(p)], got {radius}")
    value = (radius / math.sqrt(p)) ** (beta * n * p)
    return VolumeEstimate(value=min(value, 1.0), stderr=0.0, method=VolumeMethod.BARG_NOGIN)


def chordal_sq_to_canonical(
    n: int, p: int, q: int, beta: int, samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Squared chordal distances of isotropic p-planes to span(e_1..e_q).

    Ball volumes are center-independent, so the canonical coordinate plane
    serves as the center.  Returns a length-``samples`` array.
    """
    _check_dims(n, p, q, beta)
    spec = GrassmannSpec(n, p, FieldKind.from_beta(beta))
    out = np.empty(samples)
    done = 0
    while done < samples:
        m = min(_MC_CHUNK, samples - done)
        bases = sample_isotropic_bases(spec, m, rng)
        # ||B^H C||_F^2 for C = [e_1..e_q] is the mass of the first q rows.
        overlap = np.sum(np.abs(bases[:, :q, :]) ** 2, axis=(1, 2))
        out[done : done + m] = np.clip(p - overlap, 0.0, None)
        done += m
    return out


def _binomial_estimate(hits: int, samples: int) -> tuple[float, float]:
    v = hits / samples
    return v, math.sqrt(v * (1.0 - v) / samples)


def ball_volume_mc_grid(
    n: int,
    p: int,
    q: int,
    beta: int,
    radii: np.ndarray,
    samples: int,
    rng: np.random.Generator,
) -> list[VolumeEstimate]:
    """Monte-Carlo volumes for several radii from one shared distance sample.

    Estimates across the grid share samples (cheap, and monotone in the
    radius by construction) and are therefore correlated.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        return []
    for r in radii:
        BallSpec(n, p, q, beta, float(r))  # validates each radius
    if samples < 1000:
        raise DomainError(f"samples must be >= 1000, got {samples}")
    dsq = chordal_sq_to_canonical(n, p, q, beta, samples, rng)
    estimates = []
    for r in radii:
        hits = int(np.count_nonzero(dsq <= float(r) ** 2))
        value, stderr = _binomial_estimate(hits, samples)
        estimates.append(
            VolumeEstimate(
                value=value,
                stderr=stderr,
                method=VolumeMethod.MONTE_CARLO,
                samples=samples,
            )
        )
    return estimates


def ball_volume_mc(
    spec: BallSpec, samples: int, rng: np.random.Generator, threads: int = 1
) -> VolumeEstimate:
    """Monte-Carlo volume: the fraction of isotropic planes within the radius.

    With ``threads > 1`` the samples are partitioned across sub-seeded
    streams and merged by count weighting; the result depends only on the
    injected generator, not on scheduling.
    """
    if samples < 1000:
        raise DomainError(f"samples must be >= 1000, got {samples}")
    if threads <= 1:
        dsq = chordal_sq_to_canonical(spec.n, spec.p, spec.q, spec.beta, samples, rng)
        hits = int(np.count_nonzero(dsq <= spec.radius**2))
    else:
        counts = [samples // threads] * threads
        counts[0] += samples - sum(counts)
        streams = rng.spawn(threads)

        def task(args: tuple[int, np.random.Generator]) -> int:
            m, child = args
            d = chordal_sq_to_canonical(spec.n, spec.p, spec.q, spec.beta, m, child)
            return int(np.count_nonzero(d <= spec.radius**2))

        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(task, zip(counts, streams)))
    value, stderr = _binomial_estimate(hits, samples)
    return VolumeEstimate(
        value=value, stderr=stderr, method=VolumeMethod.MONTE_CARLO, samples=samples
    )
