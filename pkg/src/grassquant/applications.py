"""Communication-theory experiments built on subspace quantization.

Two studies: (1) decoding an additive-Gaussian-noise channel by nearest
line in ``G_{n,1}``, which recovers the channel's capacity threshold and
concentrates the transmit/receive squared distance in a predictable
window; (2) limited-feedback MIMO beamforming, where selecting a
beamforming matrix from a feedback codebook is exactly quantization of
the channel's right singular subspace, possibly with unequal dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, DomainError, SpecMismatch
from .manifold import FieldKind, GrassmannSpec
from .quantization import (
    MAX_CODEBOOK,
    Codebook,
    _sq_overlaps,
    design_maxmin,
    distortion_mc,
    drf_bounds,
    random_codebook,
)
from .reports import ExperimentReport, Stopwatch
from .rng import derive_rng


@dataclass(frozen=True)
class AwgnConfig:
    """Configuration of the Gaussian-channel nearest-line decoding run.

    Exactly one of ``rate`` (bits per dimension; codebook size
    ``round(2^(n rate))``) or ``codebook_size`` must be given.  Codewords
    are Gaussian draws rescaled onto the shell ``||X||^2 = n (1 - 1.5
    epsilon)``, the midpoint of the admissible power window
    ``(1 - 2 epsilon, 1 - epsilon)``.  Sizes beyond ``MAX_CODEBOOK`` raise
    :class:`CapExceeded` unless ``clamp_to_cap`` is set, in which case the
    size is clamped and flagged.
    """

    n: int
    sigma_sq: float
    epsilon: float
    rate: float | None = None
    codebook_size: int | None = None
    field: FieldKind = FieldKind.COMPLEX
    trials: int = 200
    seed: int = 0
    clamp_to_cap: bool = False

    def __post_init__(self) -> None:
        if self.n < 4:
            raise DomainError(f"block length n must be >= 4, got {self.n}")
        if self.sigma_sq <= 0:
            raise DomainError(f"sigma_sq must be positive, got {self.sigma_sq}")
        if not 0.0 < self.epsilon < 0.25:
            raise DomainError(f"epsilon must lie in (0, 1/4), got {self.epsilon}")
        if (self.rate is None) == (self.codebook_size is None):
            raise DomainError("give exactly one of rate or codebook_size")
        if self.rate is not None and self.rate <= 0:
            raise DomainError(f"rate must be positive, got {self.rate}")
        if self.codebook_size is not None and self.codebook_size < 1:
            raise DomainError(f"codebook_size must be >= 1, got {self.codebook_size}")
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.nominal_size > MAX_CODEBOOK and not self.clamp_to_cap:
            raise CapExceeded(
                f"codebook size {self.nominal_size} exceeds cap {MAX_CODEBOOK}; "
                "set clamp_to_cap to run at the cap"
            )

    @property
    def nominal_size(self) -> int:
        if self.codebook_size is not None:
            return self.codebook_size
        return round(2.0 ** (self.n * self.rate))

    @property
    def effective_size(self) -> int:
        return min(self.nominal_size, MAX_CODEBOOK) if self.clamp_to_cap else self.nominal_size

    @property
    def capped(self) -> bool:
        return self.effective_size != self.nominal_size

    @property
    def effective_rate(self) -> float:
        """Bits per dimension actually realized, log2(K)/n."""
        return math.log2(self.effective_size) / self.n


def _gaussian_vector(shape, field: FieldKind, scale: float, rng: np.random.Generator):
    if field is FieldKind.COMPLEX:
        # Per-entry variance scale: real/imag parts carry half each.
        return math.sqrt(scale / 2.0) * (
            rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        )
    return math.sqrt(scale) * rng.standard_normal(shape)


def awgn_grassmann_decode_experiment(cfg: AwgnConfig) -> ExperimentReport:
    """Transmit one shell codeword over Y = X + W and decode by nearest line.

    Each trial draws a fresh codebook of ``K`` codewords on the power
    shell, transmits the first, and decodes by minimizing the chordal
    distance between the lines spanned by the codewords and by ``Y``.
    Reports the block-error frequency and the statistics of
    ``d_c^2(line(X_1), line(Y))``, together with the window
    ``[sigma^2/(1 + sigma^2 - eps), sigma^2/(1 + sigma^2 - 2 eps)]``
    that the squared distance concentrates in for long blocks.
    """
    k = cfg.effective_size
    n = cfg.n
    shell_sq = n * (1.0 - 1.5 * cfg.epsilon)
    errors = 0
    dsq = np.empty(cfg.trials)
    with Stopwatch() as sw:
        for t in range(cfg.trials):
            rng = derive_rng(cfg.seed, t)
            code = _gaussian_vector((k, n), cfg.field, 1.0, rng)
            code *= math.sqrt(shell_sq) / np.linalg.norm(code, axis=1, keepdims=True)
            noise = _gaussian_vector((n,), cfg.field, cfg.sigma_sq, rng)
            y = code[0] + noise
            scores = np.abs(code.conj() @ y)
            decoded = int(np.argmax(scores))
            errors += decoded != 0
            y_sq = float(np.linalg.norm(y) ** 2)
            dsq[t] = max(0.0, 1.0 - scores[0] ** 2 / (shell_sq * y_sq))
    beta = cfg.field.beta
    window_low = cfg.sigma_sq / (1.0 + cfg.sigma_sq - cfg.epsilon)
    window_high = cfg.sigma_sq / (1.0 + cfg.sigma_sq - 2.0 * cfg.epsilon)
    row = {
        "n": n,
        "beta": beta,
        "sigma_sq": cfg.sigma_sq,
        "epsilon": cfg.epsilon,
        "K": k,
        "rate_nominal": cfg.rate if cfg.rate is not None else math.log2(cfg.nominal_size) / n,
        "rate_effective": cfg.effective_rate,
        "capped": cfg.capped,
        "trials": cfg.trials,
        "error_count": errors,
        "error_rate": errors / cfg.trials,
        "dsq_mean": float(dsq.mean()),
        "dsq_stderr": float(dsq.std(ddof=1) / math.sqrt(cfg.trials)) if cfg.trials > 1 else 0.0,
        "dsq_var": float(dsq.var(ddof=1)) if cfg.trials > 1 else 0.0,
        "window_low": window_low,
        "window_high": window_high,
        "capacity_bits_per_dim": beta / 2.0 * math.log2(1.0 + 1.0 / cfg.sigma_sq),
        "row_seed": [cfg.seed],
    }
    config = {
        "n": n,
        "sigma_sq": cfg.sigma_sq,
        "epsilon": cfg.epsilon,
        "rate": cfg.rate,
        "codebook_size": cfg.codebook_size,
        "beta": beta,
        "trials": cfg.trials,
        "clamp_to_cap": cfg.clamp_to_cap,
    }
    report = ExperimentReport(
        experiment="awgn_decode", config=config, seed=cfg.seed, rows=[row]
    )
    report.wall_time_s = sw.elapsed
    return report


@dataclass(frozen=True)
class BeamformingConfig:
    """Limited-feedback beamforming setup.

    ``l_t`` transmit and ``l_r < l_t`` receive antennas, ``s`` data
    streams mapped through an ``l_t x s`` semi-orthonormal beamforming
    matrix chosen from a ``2^r_fb``-entry feedback codebook; ``rho`` is
    the SNR.  ``s != l_r`` gives unequal-dimensional quantization.
    """

    l_t: int
    l_r: int
    s: int
    rho: float
    r_fb: int
    trials: int = 10_000
    seed: int = 0
    codebook_kind: str = "maxmin"
    design_iters: int = 8
    distortion_samples: int | None = None
    log_base: str = "bits"

    def __post_init__(self) -> None:
        if self.l_r >= self.l_t:
            raise DomainError(
                f"need l_r < l_t, got l_r={self.l_r}, l_t={self.l_t}"
            )
        if not 1 <= self.s <= self.l_t - 1:
            raise DomainError(
                f"streams must satisfy 1 <= s <= l_t - 1, got s={self.s}"
            )
        if self.l_r < 1:
            raise DomainError(f"l_r must be >= 1, got {self.l_r}")
        if self.rho <= 0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if not 1 <= self.r_fb <= 16:
            raise DomainError(f"r_fb must lie in [1, 16], got {self.r_fb}")
        if self.trials < 1000:
            raise DomainError(f"trials must be >= 1000, got {self.trials}")
        if self.codebook_kind not in ("maxmin", "random"):
            raise DomainError(f"codebook_kind must be maxmin or random, got {self.codebook_kind!r}")
        if self.log_base not in ("bits", "nats"):
            raise DomainError(f"log_base must be bits or nats, got {self.log_base!r}")

    @property
    def codebook_size(self) -> int:
        return 1 << self.r_fb

    @property
    def source_spec(self) -> GrassmannSpec:
        return GrassmannSpec(self.l_t, self.l_r, FieldKind.COMPLEX)

    @property
    def code_spec(self) -> GrassmannSpec:
        return GrassmannSpec(self.l_t, self.s, FieldKind.COMPLEX)


def right_singular_plane_bases(h: np.ndarray) -> np.ndarray:
    """Orthonormal bases of the right singular subspaces of stacked channels.

    ``h`` has shape (..., l_r, l_t) with ``l_r <= l_t``; returns
    (..., l_t, l_r) with columns ordered by non-increasing singular value.
    """
    _, _, vh = np.linalg.svd(h, full_matrices=False)
    return np.conj(np.swapaxes(vh, -2, -1))


def beamforming_selection(h: np.ndarray, codebook: Codebook) -> int:
    """Feedback index: the entry nearest to the channel's right singular plane.

    ``h`` is an ``l_r x l_t`` realization; the codebook quantizes
    ``G_{l_t, l_r}`` with beamforming planes in ``G_{l_t, s}``.  Distance
    uses ``min(s, l_r)`` principal angles; ties break to the lowest index.
    """
    h = np.asarray(h, dtype=np.complex128)
    src = codebook.source_spec
    if h.ndim != 2 or h.shape != (src.p, src.n):
        raise SpecMismatch(
            f"channel shape {h.shape} does not match (l_r, l_t) = ({src.p}, {src.n})"
        )
    v = right_singular_plane_bases(h[None, :, :])
    ov = _sq_overlaps(v, codebook.stacked_bases)[0]
    return int(np.argmax(ov))


def _log_det_throughput(
    h: np.ndarray, q_sel: np.ndarray, rho: float, s: int
) -> np.ndarray:
    """log det(I + (rho/s) H Q Q^H H^H) per trial, in nats."""
    m = h @ q_sel  # (T, l_r, s)
    l_r = h.shape[1]
    if s <= l_r:
        gram = np.einsum("trs,tru->tsu", m.conj(), m)
        eye = np.eye(s)
    else:
        gram = np.einsum("trs,tus->tru", m, m.conj())
        eye = np.eye(l_r)
    sign, logdet = np.linalg.slogdet(eye + (rho / s) * gram)
    return logdet


def beamforming_throughput_experiment(
    cfg: BeamformingConfig, codebook: Codebook | None = None
) -> ExperimentReport:
    """Monte-Carlo throughput of codebook beamforming against its bounds.

    Reports (a) the Monte-Carlo expected log-det throughput, (b) the
    Monte-Carlo mean of ``tr(V^H Q Q^H V)`` for the selected entries,
    (c) the same quantity computed as ``min(s, l_r) - D`` from an
    independent distortion estimate of the codebook, (d) the throughput
    bound ``l_r log(1 + (rho/s)(l_t/l_r) * (c))`` evaluated from (c), and
    (e) the same bound evaluated from the distortion-rate lower bound at
    the feedback size.  (b) and (c) estimate the same expectation on
    disjoint streams; (a) never exceeds (d) beyond Monte-Carlo error.
    """
    if codebook is None:
        rng_cb = derive_rng(cfg.seed, 0)
        if cfg.codebook_kind == "maxmin":
            codebook = design_maxmin(
                cfg.source_spec,
                cfg.code_spec,
                cfg.codebook_size,
                rng_cb,
                iters=cfg.design_iters,
                seed=cfg.seed,
            )
        else:
            codebook = random_codebook(
                cfg.source_spec, cfg.code_spec, cfg.codebook_size, rng_cb, seed=cfg.seed
            )
    else:
        if codebook.source_spec != cfg.source_spec or codebook.code_spec != cfg.code_spec:
            raise SpecMismatch("codebook specs do not match the beamforming config")

    min_dim = min(cfg.s, cfg.l_r)
    with Stopwatch() as sw:
        rng_h = derive_rng(cfg.seed, 1)
        h = (
            rng_h.standard_normal((cfg.trials, cfg.l_r, cfg.l_t))
            + 1j * rng_h.standard_normal((cfg.trials, cfg.l_r, cfg.l_t))
        ) / math.sqrt(2.0)
        v = right_singular_plane_bases(h)
        ov = _sq_overlaps(v, codebook.stacked_bases)
        sel = np.argmax(ov, axis=1)
        trace_samples = ov[np.arange(cfg.trials), sel]
        q_sel = codebook.stacked_bases[sel]
        throughput_nats = _log_det_throughput(h, q_sel, cfg.rho, cfg.s)

        dist_samples = cfg.distortion_samples or max(cfg.trials, 1000)
        dist = distortion_mc(codebook, dist_samples, derive_rng(cfg.seed, 2))

    scale = 1.0 if cfg.log_base == "nats" else 1.0 / math.log(2.0)
    log1p = lambda x: math.log1p(x) * scale
    throughput = throughput_nats * scale

    trace_from_distortion = min_dim - dist.mean
    gain = cfg.rho / cfg.s * cfg.l_t / cfg.l_r
    bound_from_distortion = cfg.l_r * log1p(gain * trace_from_distortion)
    p_eff, q_eff = min(cfg.s, cfg.l_r), max(cfg.s, cfg.l_r)
    drf = drf_bounds(cfg.l_t, p_eff, q_eff, 2, cfg.codebook_size)
    bound_from_drf = cfg.l_r * log1p(gain * (min_dim - drf.lower))

    t_mean = float(throughput.mean())
    t_se = float(throughput.std(ddof=1) / math.sqrt(cfg.trials))
    tr_mean = float(trace_samples.mean())
    tr_se = float(trace_samples.std(ddof=1) / math.sqrt(cfg.trials))
    row = {
        "l_t": cfg.l_t,
        "l_r": cfg.l_r,
        "s": cfg.s,
        "rho": cfg.rho,
        "r_fb": cfg.r_fb,
        "K": cfg.codebook_size,
        "trials": cfg.trials,
        "log_base": cfg.log_base,
        "throughput_mean": t_mean,
        "throughput_stderr": t_se,
        "trace_mean": tr_mean,
        "trace_stderr": tr_se,
        "distortion": dist.mean,
        "distortion_stderr": dist.stderr,
        "trace_from_distortion": trace_from_distortion,
        "identity_gap": abs(tr_mean - trace_from_distortion),
        "identity_sigma": math.hypot(tr_se, dist.stderr),
        "bound_from_distortion": bound_from_distortion,
        "bound_from_drf": bound_from_drf,
        "drf_lower": drf.lower,
        "drf_upper": drf.upper,
        "drf_regime_ok": drf.regime_ok,
        "bound_ok": t_mean <= bound_from_distortion + 3.0 * t_se,
        "row_seed": [cfg.seed],
    }
    config = {
        "l_t": cfg.l_t,
        "l_r": cfg.l_r,
        "s": cfg.s,
        "rho": cfg.rho,
        "r_fb": cfg.r_fb,
        "trials": cfg.trials,
        "codebook_kind": cfg.codebook_kind,
        "design_iters": cfg.design_iters,
        "log_base": cfg.log_base,
    }
    report = ExperimentReport(
        experiment="beamforming", config=config, seed=cfg.seed, rows=[row]
    )
    report.wall_time_s = sw.elapsed
    return report
