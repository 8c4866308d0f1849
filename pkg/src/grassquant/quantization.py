"""Codebooks and rate-distortion machinery for subspace quantization.

A source plane in ``G_{n,p}`` is quantized onto a finite codebook of
planes in ``G_{n,q}`` by minimum chordal distance; the distortion of a
codebook is the mean squared quantization distance under the isotropic
source.  This module provides random and max-min/Lloyd codebook
construction, Monte-Carlo distortion estimation, closed-form bounds on
the distortion-rate and rate-distortion functions, their shared
large-``n`` asymptote, and the random-code optimality experiment.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SpecMismatch
from .manifold import (
    TOL_EQ,
    TOL_ORTHO,
    FieldKind,
    GrassmannSpec,
    Plane,
    sample_isotropic_bases,
)
from .reports import ExperimentReport, Stopwatch
from .rng import derive_rng
from .volume import log_coeff_c

# Desk-scale cap on codebook sizes in experiments.
MAX_CODEBOOK = 1 << 16
# Pairwise duplicate checking is O(K^2); skipped above this size, where
# constructors rely on the a.s. distinctness of independent Haar draws.
DUPLICATE_CHECK_MAX = 4096
# Candidate pool per greedy farthest-point step.
DESIGN_POOL = 256

# Entry budget for chunked overlap computations (~128 MB complex blocks).
_OVERLAP_BUDGET = 1 << 23


@dataclass(frozen=True)
class Provenance:
    """How a codebook came to be: 'random', 'maxmin', or 'loaded'."""

    kind: str
    seed: int | None = None
    path: str | None = None
    trace: dict | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.seed is not None:
            out["seed"] = self.seed
        if self.path is not None:
            out["path"] = self.path
        if self.trace is not None:
            out["trace"] = self.trace
        return out


def _sq_overlaps(samples: np.ndarray, entries: np.ndarray) -> np.ndarray:
    """``out[s, k] = ||samples[s]^H entries[k]||_F^2`` via chunked GEMMs."""
    n_s, _, p_a = samples.shape
    n_k, _, p_b = entries.shape
    out = np.zeros((n_s, n_k))
    step = max(1, _OVERLAP_BUDGET // max(1, n_k * p_a * p_b))
    cols_b = [np.ascontiguousarray(entries[:, :, j].T) for j in range(p_b)]
    for lo in range(0, n_s, step):
        hi = min(lo + step, n_s)
        block = np.zeros((hi - lo, n_k))
        for i in range(p_a):
            a_i = samples[lo:hi, :, i].conj()
            for j in range(p_b):
                m = a_i @ cols_b[j]
                if np.iscomplexobj(m):
                    block += m.real**2 + m.imag**2
                else:
                    block += m**2
        out[lo:hi] = block
    return out


def _pairwise_min_dsq(bases: np.ndarray) -> tuple[float, tuple[int, int]]:
    """Smallest off-diagonal squared distance among equal-dimensional planes."""
    k, _, q = bases.shape
    if k < 2:
        return math.inf, (-1, -1)
    best = math.inf
    pair = (-1, -1)
    step = max(1, _OVERLAP_BUDGET // max(1, k * q * q))
    for lo in range(0, k, step):
        hi = min(lo + step, k)
        ov = _sq_overlaps(bases[lo:hi], bases)
        dsq = np.clip(q - ov, 0.0, None)
        for r in range(lo, hi):
            dsq[r - lo, r] = math.inf
        idx = np.unravel_index(np.argmin(dsq), dsq.shape)
        v = float(dsq[idx])
        if v < best:
            best = v
            pair = (lo + int(idx[0]), int(idx[1]))
    return best, pair


# Squared-distance screen for duplicate detection; the fast overlap form
# has a cancellation noise floor near 1e-15, so candidates are confirmed
# with the stable projection-residual form before being called duplicates.
_DUP_SCREEN = 1e-12


def _duplicate_pairs(bases: np.ndarray) -> list[tuple[int, int]]:
    """Entry pairs at chordal distance < TOL_EQ among equal-dimensional planes."""
    k, _, q = bases.shape
    if k < 2:
        return []
    dups = []
    step = max(1, _OVERLAP_BUDGET // max(1, k * q * q))
    for lo in range(0, k, step):
        hi = min(lo + step, k)
        ov = _sq_overlaps(bases[lo:hi], bases)
        dsq = q - ov
        for r in range(lo, hi):
            dsq[r - lo, r] = math.inf
        for r, c in np.argwhere(dsq <= _DUP_SCREEN):
            i, j = lo + int(r), int(c)
            if i > j:
                continue
            cross = bases[j].conj().T @ bases[i]
            resid = bases[i] - bases[j] @ cross
            if float(np.sum(np.abs(resid) ** 2)) < TOL_EQ**2:
                dups.append((i, j))
    return dups


class Codebook:
    """Ordered codebook of ``K`` planes in ``G_{n,q}`` quantizing ``G_{n,p}``.

    ``source_spec`` and ``code_spec`` share the ambient dimension and
    field; ``p`` and ``q`` need not be equal (either may be larger).
    Entries are pairwise-distinct; the O(K^2) check is performed at
    construction for K up to ``DUPLICATE_CHECK_MAX``.
    """

    def __init__(
        self,
        source_spec: GrassmannSpec,
        code_spec: GrassmannSpec,
        entries: "list[Plane] | tuple[Plane, ...]",
        provenance: Provenance,
    ) -> None:
        for pl in entries:
            if pl.spec != code_spec:
                raise SpecMismatch(f"entry spec {pl.spec} does not match {code_spec}")
        bases = np.stack([pl.basis for pl in entries]) if entries else None
        self._init_common(source_spec, code_spec, bases, provenance)
        self._entries = tuple(entries)

    @classmethod
    def from_bases(
        cls,
        source_spec: GrassmannSpec,
        code_spec: GrassmannSpec,
        bases: np.ndarray,
        provenance: Provenance,
    ) -> "Codebook":
        """Construct from a stacked ``(K, n, q)`` array of orthonormal bases."""
        cb = cls.__new__(cls)
        bases = np.asarray(bases, dtype=code_spec.field.dtype)
        if bases.ndim != 3 or bases.shape[1:] != (code_spec.n, code_spec.p):
            raise SpecMismatch(
                f"bases shape {bases.shape} does not match (K, {code_spec.n}, {code_spec.p})"
            )
        gram = np.einsum("knp,knq->kpq", bases.conj(), bases)
        resid = np.abs(gram - np.eye(code_spec.p))
        worst = float(np.sqrt(np.sum(resid**2, axis=(1, 2))).max()) if len(bases) else 0.0
        if worst > TOL_ORTHO:
            raise DomainError(
                f"entry basis is not orthonormal (residual {worst:.3e} > {TOL_ORTHO})"
            )
        cb._init_common(source_spec, code_spec, bases, provenance)
        cb._entries = None
        return cb

    def _init_common(
        self,
        source_spec: GrassmannSpec,
        code_spec: GrassmannSpec,
        bases: "np.ndarray | None",
        provenance: Provenance,
    ) -> None:
        if source_spec.n != code_spec.n or source_spec.field is not code_spec.field:
            raise SpecMismatch(
                "source and code specs must share the ambient dimension and field"
            )
        if bases is None or len(bases) < 1:
            raise DomainError("a codebook needs at least one entry")
        self.source_spec = source_spec
        self.code_spec = code_spec
        self.provenance = provenance
        bases = bases.copy()
        bases.setflags(write=False)
        self._bases = bases
        if len(bases) <= DUPLICATE_CHECK_MAX:
            dups = _duplicate_pairs(bases)
            if dups:
                raise DomainError(f"duplicate codebook entries: {dups[:4]}")

    @property
    def size(self) -> int:
        return len(self._bases)

    def __len__(self) -> int:
        return self.size

    @property
    def stacked_bases(self) -> np.ndarray:
        """Read-only ``(K, n, q)`` array of entry bases."""
        return self._bases

    @property
    def entries(self) -> tuple[Plane, ...]:
        if self._entries is None:
            self._entries = tuple(Plane(self.code_spec, b) for b in self._bases)
        return self._entries

    @property
    def min_dim(self) -> int:
        """Number of principal angles in source/entry distances."""
        return min(self.source_spec.p, self.code_spec.p)

    def min_pairwise_distance(self) -> float:
        """Smallest chordal distance between two entries (inf for K = 1)."""
        dsq, _ = _pairwise_min_dsq(self._bases)
        return math.sqrt(dsq) if math.isfinite(dsq) else math.inf


@dataclass(frozen=True)
class DistortionEstimate:
    """Monte-Carlo mean squared quantization distance with its standard error."""

    mean: float
    stderr: float
    samples: int


@dataclass(frozen=True)
class BoundPair:
    """Lower/upper bound values plus the asymptotic-regime flag."""

    lower: float
    upper: float
    regime_ok: bool


def quantize(P: Plane, codebook: Codebook) -> tuple[int, float]:
    """Index and distance of the codebook entry nearest to ``P``.

    Ties break to the lowest index.
    """
    if P.spec != codebook.source_spec:
        raise SpecMismatch(
            f"plane spec {P.spec} does not match codebook source {codebook.source_spec}"
        )
    ov = _sq_overlaps(P.basis[None, :, :], codebook.stacked_bases)[0]
    dsq = np.clip(codebook.min_dim - ov, 0.0, None)
    idx = int(np.argmin(dsq))
    return idx, math.sqrt(float(dsq[idx]))


def _distortion_moments(
    codebook: Codebook, samples: int, rng: np.random.Generator
) -> tuple[int, float, float]:
    """(count, sum, sum of squares) of min squared distances over fresh draws."""
    entry_cols = codebook.stacked_bases
    k = codebook.size
    min_dim = codebook.min_dim
    pa = codebook.source_spec.p
    pb = codebook.code_spec.p
    step = max(64, _OVERLAP_BUDGET // max(1, k * pa * pb))
    total = 0
    acc = 0.0
    acc_sq = 0.0
    while total < samples:
        m = min(step, samples - total)
        draws = sample_isotropic_bases(codebook.source_spec, m, rng)
        best = _sq_overlaps(draws, entry_cols).max(axis=1)
        dsq = np.clip(min_dim - best, 0.0, None)
        acc += float(dsq.sum())
        acc_sq += float((dsq**2).sum())
        total += m
    return total, acc, acc_sq


def distortion_mc(
    codebook: Codebook, samples: int, rng: np.random.Generator, threads: int = 1
) -> DistortionEstimate:
    """Monte-Carlo distortion: mean min squared distance over isotropic sources.

    With ``threads > 1``, samples are partitioned over sub-seeded streams
    and merged by count weighting.
    """
    if samples < 1000:
        raise DomainError(f"samples must be >= 1000, got {samples}")
    if threads <= 1:
        parts = [_distortion_moments(codebook, samples, rng)]
    else:
        counts = [samples // threads] * threads
        counts[0] += samples - sum(counts)
        streams = rng.spawn(threads)
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(
                    lambda args: _distortion_moments(codebook, args[0], args[1]),
                    zip(counts, streams),
                )
            )
    count = sum(p[0] for p in parts)
    total = sum(p[1] for p in parts)
    total_sq = sum(p[2] for p in parts)
    mean = total / count
    var = max(total_sq / count - mean**2, 0.0)
    return DistortionEstimate(
        mean=mean, stderr=math.sqrt(var / count), samples=count
    )


def _resolve_rng(
    rng: "np.random.Generator | None", seed: "int | None"
) -> np.random.Generator:
    if rng is None:
        if seed is None:
            raise DomainError("provide either an rng or a seed")
        return derive_rng(seed)
    return rng


def random_codebook(
    source_spec: GrassmannSpec,
    code_spec: GrassmannSpec,
    size: int,
    rng: "np.random.Generator | None" = None,
    *,
    seed: "int | None" = None,
    check_duplicates: "bool | None" = None,
) -> Codebook:
    """Codebook of ``size`` independent Haar draws from ``G_{n,q}``.

    Collisions (probability zero) are re-drawn when checking is on;
    checking defaults to on for ``size <= DUPLICATE_CHECK_MAX``.
    """
    if size < 1:
        raise DomainError(f"size must be >= 1, got {size}")
    rng = _resolve_rng(rng, seed)
    if check_duplicates is None:
        check_duplicates = size <= DUPLICATE_CHECK_MAX
    bases = sample_isotropic_bases(code_spec, size, rng)
    if check_duplicates and size > 1:
        while True:
            dups = _duplicate_pairs(bases)
            if not dups:
                break
            rows = np.unique([j for _, j in dups])
            bases[rows] = sample_isotropic_bases(code_spec, rows.size, rng)
    return Codebook.from_bases(
        source_spec, code_spec, bases, Provenance(kind="random", seed=seed)
    )


def design_maxmin(
    source_spec: GrassmannSpec,
    code_spec: GrassmannSpec,
    size: int,
    rng: "np.random.Generator | None" = None,
    iters: int = 8,
    *,
    seed: "int | None" = None,
    pool: int = DESIGN_POOL,
    train_samples: int = 10_000,
) -> Codebook:
    """Greedy farthest-point codebook, refined by Lloyd iterations.

    Initialization: the first entry is a Haar draw; each subsequent entry
    maximizes the minimum distance to the chosen entries over a fresh pool
    of ``pool`` Haar candidates.  Refinement: ``iters`` rounds of
    assigning ``train_samples`` isotropic sources by nearest entry, then
    replacing each entry with the dominant q-dimensional eigenspace of its
    cell's mean projector (empty cells keep their entry).  Returns the
    codebook with the lowest training distortion seen.  Training draws are
    internal to this call; evaluate distortion on a separate stream.
    """
    if size < 2:
        raise DomainError(f"size must be >= 2, got {size}")
    if iters < 0:
        raise DomainError(f"iters must be >= 0, got {iters}")
    rng = _resolve_rng(rng, seed)
    n = code_spec.n
    q = code_spec.p

    bases = np.empty((size, n, q), dtype=code_spec.field.dtype)
    bases[0] = sample_isotropic_bases(code_spec, 1, rng)[0]
    for k in range(1, size):
        cands = sample_isotropic_bases(code_spec, pool, rng)
        ov = _sq_overlaps(cands, bases[:k])
        min_dsq = np.clip(q - ov, 0.0, None).min(axis=1)
        bases[k] = cands[int(np.argmax(min_dsq))]

    train = sample_isotropic_bases(source_spec, train_samples, rng)
    min_dim = min(source_spec.p, q)
    history: list[float] = []
    best_bases = bases.copy()
    best_distortion = math.inf
    best_iter = -1

    def training_distortion(current: np.ndarray) -> tuple[float, np.ndarray]:
        ov = _sq_overlaps(train, current)
        assign = np.argmax(ov, axis=1)
        dsq = np.clip(min_dim - ov[np.arange(len(train)), assign], 0.0, None)
        return float(dsq.mean()), assign

    for it in range(iters + 1):
        distortion, assign = training_distortion(bases)
        history.append(distortion)
        if distortion < best_distortion:
            best_distortion = distortion
            best_bases = bases.copy()
            best_iter = it
        if it == iters:
            break
        new_bases = bases.copy()
        for k in range(size):
            members = train[assign == k]
            if len(members) == 0:
                continue
            proj = np.einsum("snp,smp->nm", members, members.conj()) / len(members)
            proj = (proj + proj.conj().T) / 2.0
            _, vecs = np.linalg.eigh(proj)
            new_bases[k] = vecs[:, -q:]
        bases = new_bases

    trace = {
        "pool": pool,
        "iters": iters,
        "train_samples": train_samples,
        "training_history": history,
        "best_iter": best_iter,
        "best_training_distortion": best_distortion,
    }
    return Codebook.from_bases(
        source_spec,
        code_spec,
        best_bases,
        Provenance(kind="maxmin", seed=seed, trace=trace),
    )


def _degree(n: int, p: int, q: int, beta: int) -> int:
    return beta * p * (n - q)


def drf_bounds(n: int, p: int, q: int, beta: int, size: int) -> BoundPair:
    """Bounds on the distortion-rate function at codebook size ``size``.

    With ``t = beta p (n - q)`` and leading volume coefficient ``c``::

        t/(t+2) * (cK)^(-2/t)  <=  D*(K)  <=  2 Gamma(2/t)/t * (cK)^(-2/t)

    up to factors that tend to 1 as K grows; both are returned with those
    factors taken as exactly 1.  ``regime_ok`` is set when
    ``(cK)^(-2/t) <= 1``, the high-rate regime the bounds assume.
    """
    if size < 1:
        raise DomainError(f"size must be >= 1, got {size}")
    t = _degree(n, p, q, beta)
    log_c = log_coeff_c(n, p, q, beta)
    ck = math.exp(log_c) * size
    # Plain powers where safe: keeps round-number anchors exact.
    if math.isfinite(ck) and ck > 0.0:
        base = ck ** (-2.0 / t)
    else:
        base = math.exp(-2.0 / t * (log_c + math.log(size)))
    lower = t / (t + 2.0) * base
    upper = 2.0 * math.gamma(2.0 / t) / t * base
    return BoundPair(lower=lower, upper=upper, regime_ok=base <= 1.0)


def rdf_bounds(n: int, p: int, q: int, beta: int, distortion: float) -> BoundPair:
    """Bounds on the minimum codebook size achieving ``distortion``.

    Requires ``0 < distortion <= 1``.  Exact algebraic inverse of
    :func:`drf_bounds`: the size lower bound inverts the distortion lower
    bound (a size below it cannot reach the distortion) and the size
    upper bound inverts the distortion upper bound (that many random-like
    codewords suffice)::

        (1/c) ((t+2) D / t)^(-t/2)  <=  K*(D)  <=  (1/c) (t D / (2 Gamma(2/t)))^(-t/2)

    Linear values can overflow for very large ``t``; see
    :func:`rdf_bounds_log2`.
    """
    if not 0.0 < distortion <= 1.0:
        raise DomainError(f"distortion must lie in (0, 1], got {distortion}")
    t = _degree(n, p, q, beta)
    log_c = log_coeff_c(n, p, q, beta)
    c = math.exp(log_c)
    arg_lower = (t + 2.0) * distortion / t
    arg_upper = t * distortion / (2.0 * math.gamma(2.0 / t))
    if math.isfinite(c) and c > 0.0:
        lower = arg_lower ** (-t / 2.0) / c
        upper = arg_upper ** (-t / 2.0) / c
    else:
        lower = math.exp(-t / 2.0 * math.log(arg_lower) - log_c)
        upper = math.exp(-t / 2.0 * math.log(arg_upper) - log_c)
    return BoundPair(lower=lower, upper=upper, regime_ok=True)


def rdf_bounds_log2(n: int, p: int, q: int, beta: int, distortion: float) -> tuple[float, float]:
    """Base-2 logs of the rate-distortion bounds; finite where the linear
    values of :func:`rdf_bounds` may overflow."""
    if not 0.0 < distortion <= 1.0:
        raise DomainError(f"distortion must lie in (0, 1], got {distortion}")
    t = _degree(n, p, q, beta)
    log_c = log_coeff_c(n, p, q, beta)
    ln2 = math.log(2.0)
    lower = (-t / 2.0 * math.log((t + 2.0) * distortion / t) - log_c) / ln2
    upper = (-t / 2.0 * math.log(t * distortion / (2.0 * math.gamma(2.0 / t))) - log_c) / ln2
    return lower, upper


def asymptotic_drf(p: int, beta: int, rbar: float) -> float:
    """Limit distortion ``p 2^(-2 rbar / (beta p))`` at normalized rate ``rbar``.

    The limit is taken with ``p``, ``q`` fixed while ``n`` and ``log2 K``
    grow linearly with ratio ``rbar``; meaningful as a distortion-rate
    value when the result is <= 1.
    """
    if p < 1 or beta not in (1, 2):
        raise DomainError(f"need p >= 1 and beta in {{1, 2}}, got p={p}, beta={beta}")
    if rbar < 0:
        raise DomainError(f"rbar must be non-negative, got {rbar}")
    return p * 2.0 ** (-2.0 * rbar / (beta * p))


def asymptotic_rate(p: int, beta: int, distortion: float) -> float:
    """Limit normalized rate ``(beta p / 2) log2(p / D)``; inverse of
    :func:`asymptotic_drf`."""
    if p < 1 or beta not in (1, 2):
        raise DomainError(f"need p >= 1 and beta in {{1, 2}}, got p={p}, beta={beta}")
    if not 0.0 < distortion <= p:
        raise DomainError(f"distortion must lie in (0, p], got {distortion}")
    return beta * p / 2.0 * math.log2(p / distortion)


def random_code_optimality_experiment(
    p: int,
    q: int,
    beta: int,
    rbar: float,
    n_list: "list[int]",
    trials: int,
    seed: int = 0,
    *,
    epsilon: float = 0.05,
    samples: int = 2000,
    max_codebook: int = MAX_CODEBOOK,
) -> ExperimentReport:
    """Fraction of random codebooks whose distortion exceeds the asymptote.

    For each ``n`` the codebook size is ``round(2^(rbar n))``; points whose
    size exceeds ``max_codebook`` are skipped and flagged.  Each trial
    draws a fresh random codebook and estimates its distortion with
    ``samples`` Monte-Carlo draws on a disjoint stream; the reported
    fraction counts trials with distortion above ``asymptote + epsilon``.
    """
    if beta not in (1, 2):
        raise DomainError(f"beta must be 1 or 2, got {beta}")
    if not 1 <= p <= q:
        raise DomainError(f"need 1 <= p <= q, got p={p}, q={q}")
    if rbar <= 0:
        raise DomainError(f"rbar must be positive, got {rbar}")
    if trials < 0:
        raise DomainError(f"trials must be non-negative, got {trials}")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise DomainError(f"n_list must be strictly increasing, got {n_list}")
    if n_list and n_list[0] <= q:
        raise DomainError(f"every n must exceed q={q}, got {n_list}")
    field = FieldKind.from_beta(beta)
    d_asym = asymptotic_drf(p, beta, rbar)
    config = {
        "p": p,
        "q": q,
        "beta": beta,
        "rbar": rbar,
        "n_list": list(n_list),
        "trials": trials,
        "epsilon": epsilon,
        "samples": samples,
        "max_codebook": max_codebook,
    }
    report = ExperimentReport(
        experiment="random_code_optimality", config=config, seed=seed
    )
    with Stopwatch() as sw:
        for i, n in enumerate(n_list):
            size = round(2.0 ** (rbar * n))
            row = {
                "n": n,
                "K": size,
                "skipped": False,
                "trials": trials,
                "epsilon": epsilon,
                "d_asymptotic": d_asym,
                "exceed_count": 0,
                "exceed_fraction": math.nan,
                "distortion_mean": math.nan,
                "distortion_min": math.nan,
                "distortion_max": math.nan,
                "row_seed": [seed, i],
            }
            if size > max_codebook:
                row["skipped"] = True
                row["skip_reason"] = "cap_exceeded"
                report.rows.append(row)
                continue
            source = GrassmannSpec(n, p, field)
            code = GrassmannSpec(n, q, field)
            values = []
            for t in range(trials):
                cb = random_codebook(
                    source, code, size, derive_rng(seed, i, t, 0),
                    check_duplicates=size <= DUPLICATE_CHECK_MAX,
                )
                est = distortion_mc(cb, samples, derive_rng(seed, i, t, 1))
                values.append(est.mean)
            if values:
                arr = np.asarray(values)
                exceed = int(np.count_nonzero(arr > d_asym + epsilon))
                row.update(
                    exceed_count=exceed,
                    exceed_fraction=exceed / trials,
                    distortion_mean=float(arr.mean()),
                    distortion_min=float(arr.min()),
                    distortion_max=float(arr.max()),
                )
            report.rows.append(row)
    report.wall_time_s = sw.elapsed
    return report
