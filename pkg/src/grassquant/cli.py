"""Config-driven experiment runner.

Subcommands: ``volume``, ``distortion``, ``design``, ``random-opt``,
``awgn``, ``beamforming``, and ``codebook {save,load,verify}``.  Each
experiment reads a JSON config, validates every numeric parameter against
the target module's preconditions before dispatch, and writes a CSV of
sweep rows plus a JSON report into the output directory.  The CSV is
byte-identical across runs for the same config and seed (wall time lives
only in the JSON report); rows are sub-seeded from ``(seed, row_index)``
so parallelism never changes results.

Exit codes: 0 success, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import codebook_io
from .applications import (
    AwgnConfig,
    BeamformingConfig,
    awgn_grassmann_decode_experiment,
    beamforming_throughput_experiment,
)
from .errors import (
    CapExceeded,
    ConfigError,
    DomainError,
    GrassquantError,
)
from .manifold import FieldKind, GrassmannSpec
from .quantization import (
    DUPLICATE_CHECK_MAX,
    design_maxmin,
    distortion_mc,
    drf_bounds,
    random_code_optimality_experiment,
    random_codebook,
)
from .reports import ExperimentReport, Stopwatch, __version__
from .rng import derive_rng
from .volume import (
    BallSpec,
    ball_volume_approx,
    ball_volume_bounds,
    ball_volume_mc,
    barg_nogin_approx,
)

DEFAULT_DELTAS = [round(0.1 * i, 1) for i in range(1, 11)]

CSV_COLUMNS = {
    "volume": ["delta", "mc", "stderr", "closed_form", "lower", "upper", "barg_nogin"],
    "distortion": ["K", "mean", "stderr", "samples", "drf_lower", "drf_upper", "regime_ok"],
    "design": [
        "K",
        "train_distortion",
        "eval_mean",
        "eval_stderr",
        "drf_lower",
        "drf_upper",
        "regime_ok",
    ],
    "random_opt": [
        "n",
        "K",
        "skipped",
        "trials",
        "epsilon",
        "d_asymptotic",
        "exceed_count",
        "exceed_fraction",
        "distortion_mean",
    ],
    "awgn": [
        "n",
        "K",
        "rate_nominal",
        "rate_effective",
        "capped",
        "trials",
        "error_rate",
        "dsq_mean",
        "dsq_stderr",
        "window_low",
        "window_high",
        "capacity_bits_per_dim",
    ],
    "beamforming": [
        "l_t",
        "l_r",
        "s",
        "rho",
        "r_fb",
        "K",
        "trials",
        "throughput_mean",
        "throughput_stderr",
        "trace_mean",
        "trace_stderr",
        "trace_from_distortion",
        "distortion",
        "distortion_stderr",
        "bound_from_distortion",
        "bound_from_drf",
        "identity_gap",
        "identity_sigma",
    ],
}


# ---------------------------------------------------------------------------
# config access helpers


def _get(params: dict, name: str, kind, default=None, required: bool = False):
    if name not in params:
        if required:
            raise ConfigError(f"{name}: required field is missing")
        return default
    value = params[name]
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name}: expected an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name}: expected a number, got {value!r}")
        return float(value)
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{name}: expected a boolean, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{name}: expected a string, got {value!r}")
        return value
    if kind is list:
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{name}: expected a non-empty list, got {value!r}")
        return value
    raise AssertionError(kind)


def _num_list(params: dict, name: str, default=None) -> list[float]:
    raw = _get(params, name, list, default, required=default is None)
    if raw is default:
        return list(default)
    out = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{name}: expected numbers, got {v!r}")
        out.append(float(v))
    return out


def _int_list(params: dict, name: str) -> list[int]:
    raw = _get(params, name, list, required=True)
    out = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{name}: expected integers, got {v!r}")
        out.append(v)
    return out


def _dims(params: dict, require_order: bool = True) -> tuple[int, int, int, int]:
    n = _get(params, "n", int, required=True)
    p = _get(params, "p", int, required=True)
    q = _get(params, "q", int, required=True)
    beta = _get(params, "beta", int, required=True)
    if beta not in (1, 2):
        raise ConfigError(f"beta: must be 1 or 2, got {beta}")
    if n < 2:
        raise ConfigError(f"n: must be >= 2, got {n}")
    if not 1 <= p <= n - 1:
        raise ConfigError(f"p: must satisfy 1 <= p <= n - 1, got p={p}, n={n}")
    if not 1 <= q <= n - 1:
        raise ConfigError(f"q: must satisfy 1 <= q <= n - 1, got q={q}, n={n}")
    if require_order and p > q:
        raise ConfigError(
            f"p, q: source dimension p must not exceed code dimension q, got p={p}, q={q}"
        )
    return n, p, q, beta


def _row_seed_int(seed: int, index: int) -> int:
    """Stable per-row integer seed; reproduces the row in isolation."""
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, np.uint64)[0])


def _run_rows(fns: list, threads: int) -> list:
    if threads <= 1 or len(fns) <= 1:
        return [fn() for fn in fns]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn) for fn in fns]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# experiment runners


def run_volume(params: dict, seed: int, threads: int) -> ExperimentReport:
    n, p, q, beta = _dims(params)
    deltas = _num_list(params, "deltas", DEFAULT_DELTAS)
    samples = _get(params, "samples", int, 100_000)
    if samples < 1000:
        raise ConfigError(f"samples: must be >= 1000, got {samples}")
    for d in deltas:
        if not 0.0 <= d <= math.sqrt(p) + 1e-12:
            raise ConfigError(f"deltas: radius {d} outside [0, sqrt(p)]")

    def make_row(i: int, delta: float):
        def row() -> dict:
            spec = BallSpec(n, p, q, beta, delta)
            mc = ball_volume_mc(spec, samples, derive_rng(seed, i))
            out = {
                "delta": delta,
                "mc": mc.value,
                "stderr": mc.stderr,
                "closed_form": math.nan,
                "lower": math.nan,
                "upper": math.nan,
                "barg_nogin": math.nan,
                "row_seed": [seed, i],
            }
            if delta <= 1.0:
                out["closed_form"] = ball_volume_approx(spec).value
                lo, hi = ball_volume_bounds(spec)
                out["lower"] = lo.value
                out["upper"] = hi.value
            if p == q:
                out["barg_nogin"] = barg_nogin_approx(n, p, beta, delta).value
            return out

        return row

    with Stopwatch() as sw:
        rows = _run_rows([make_row(i, d) for i, d in enumerate(deltas)], threads)
    report = ExperimentReport(
        experiment="volume",
        config={"n": n, "p": p, "q": q, "beta": beta, "deltas": deltas, "samples": samples},
        seed=seed,
        rows=rows,
        wall_time_s=sw.elapsed,
    )
    return report


def _specs(n: int, p: int, q: int, beta: int) -> tuple[GrassmannSpec, GrassmannSpec]:
    field = FieldKind.from_beta(beta)
    return GrassmannSpec(n, p, field), GrassmannSpec(n, q, field)


def run_distortion(params: dict, seed: int, threads: int) -> ExperimentReport:
    n, p, q, beta = _dims(params)
    k_values = _int_list(params, "k_values")
    samples = _get(params, "samples", int, 10_000)
    if samples < 1000:
        raise ConfigError(f"samples: must be >= 1000, got {samples}")
    for k in k_values:
        if k < 1:
            raise ConfigError(f"k_values: sizes must be >= 1, got {k}")
    source, code = _specs(n, p, q, beta)

    def make_row(i: int, k: int):
        def row() -> dict:
            cb = random_codebook(source, code, k, derive_rng(seed, i, 0))
            est = distortion_mc(cb, samples, derive_rng(seed, i, 1))
            bounds = drf_bounds(n, p, q, beta, k)
            return {
                "K": k,
                "mean": est.mean,
                "stderr": est.stderr,
                "samples": est.samples,
                "drf_lower": bounds.lower,
                "drf_upper": bounds.upper,
                "regime_ok": bounds.regime_ok,
                "row_seed": [seed, i],
            }

        return row

    with Stopwatch() as sw:
        rows = _run_rows([make_row(i, k) for i, k in enumerate(k_values)], threads)
    return ExperimentReport(
        experiment="distortion",
        config={"n": n, "p": p, "q": q, "beta": beta, "k_values": k_values, "samples": samples},
        seed=seed,
        rows=rows,
        wall_time_s=sw.elapsed,
    )


def run_design(params: dict, seed: int, threads: int, out_dir: str | None = None) -> ExperimentReport:
    n, p, q, beta = _dims(params)
    k_values = _int_list(params, "k_values")
    iters = _get(params, "iters", int, 8)
    train_samples = _get(params, "train_samples", int, 10_000)
    eval_samples = _get(params, "eval_samples", int, 20_000)
    save_codebooks = _get(params, "save_codebooks", bool, False)
    if iters < 0:
        raise ConfigError(f"iters: must be >= 0, got {iters}")
    if eval_samples < 1000:
        raise ConfigError(f"eval_samples: must be >= 1000, got {eval_samples}")
    for k in k_values:
        if k < 2:
            raise ConfigError(f"k_values: designed sizes must be >= 2, got {k}")
    source, code = _specs(n, p, q, beta)
    if save_codebooks and out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)

    def make_row(i: int, k: int):
        def row() -> dict:
            cb = design_maxmin(
                source,
                code,
                k,
                derive_rng(seed, i, 0),
                iters=iters,
                train_samples=train_samples,
                seed=_row_seed_int(seed, i),
            )
            est = distortion_mc(cb, eval_samples, derive_rng(seed, i, 1))
            bounds = drf_bounds(n, p, q, beta, k)
            if save_codebooks and out_dir is not None:
                codebook_io.save_codebook(
                    cb, os.path.join(out_dir, f"design_K{k}.json")
                )
            return {
                "K": k,
                "train_distortion": cb.provenance.trace["best_training_distortion"],
                "eval_mean": est.mean,
                "eval_stderr": est.stderr,
                "drf_lower": bounds.lower,
                "drf_upper": bounds.upper,
                "regime_ok": bounds.regime_ok,
                "row_seed": [seed, i],
            }

        return row

    with Stopwatch() as sw:
        rows = _run_rows([make_row(i, k) for i, k in enumerate(k_values)], threads)
    return ExperimentReport(
        experiment="design",
        config={
            "n": n,
            "p": p,
            "q": q,
            "beta": beta,
            "k_values": k_values,
            "iters": iters,
            "train_samples": train_samples,
            "eval_samples": eval_samples,
        },
        seed=seed,
        rows=rows,
        wall_time_s=sw.elapsed,
    )


def run_random_opt(params: dict, seed: int, threads: int) -> ExperimentReport:
    p = _get(params, "p", int, required=True)
    q = _get(params, "q", int, required=True)
    beta = _get(params, "beta", int, required=True)
    rbar = _get(params, "rbar", float, required=True)
    n_list = _int_list(params, "n_list")
    trials = _get(params, "trials", int, 20)
    epsilon = _get(params, "epsilon", float, 0.05)
    samples = _get(params, "samples", int, 2000)
    try:
        report = random_code_optimality_experiment(
            p,
            q,
            beta,
            rbar,
            n_list,
            trials,
            seed=seed,
            epsilon=epsilon,
            samples=samples,
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    report.experiment = "random_opt"
    return report


def run_awgn(params: dict, seed: int, threads: int) -> ExperimentReport:
    n = _get(params, "n", int, required=True)
    sigma_sq = _get(params, "sigma_sq", float, required=True)
    epsilon = _get(params, "epsilon", float, required=True)
    trials = _get(params, "trials", int, 200)
    beta = _get(params, "beta", int, 2)
    clamp = _get(params, "clamp_to_cap", bool, False)
    if beta not in (1, 2):
        raise ConfigError(f"beta: must be 1 or 2, got {beta}")
    rates = _num_list(params, "rates", []) if "rates" in params else []
    k_values = _int_list(params, "k_values") if "k_values" in params else []
    if bool(rates) == bool(k_values):
        raise ConfigError("rates / k_values: give exactly one sweep list")
    sweep = [("rate", r) for r in rates] + [("codebook_size", k) for k in k_values]

    configs = []
    for i, (kind, value) in enumerate(sweep):
        kwargs = {
            "n": n,
            "sigma_sq": sigma_sq,
            "epsilon": epsilon,
            "field": FieldKind.from_beta(beta),
            "trials": trials,
            "seed": _row_seed_int(seed, i),
            "clamp_to_cap": clamp,
            kind: value,
        }
        try:
            configs.append(AwgnConfig(**kwargs))
        except (DomainError, CapExceeded) as exc:
            raise ConfigError(f"{kind}={value}: {exc}") from exc

    with Stopwatch() as sw:
        reports = _run_rows(
            [lambda cfg=cfg: awgn_grassmann_decode_experiment(cfg) for cfg in configs],
            threads,
        )
    rows = [r.rows[0] for r in reports]
    return ExperimentReport(
        experiment="awgn",
        config={
            "n": n,
            "sigma_sq": sigma_sq,
            "epsilon": epsilon,
            "beta": beta,
            "trials": trials,
            "rates": rates,
            "k_values": k_values,
            "clamp_to_cap": clamp,
        },
        seed=seed,
        rows=rows,
        wall_time_s=sw.elapsed,
    )


def run_beamforming(params: dict, seed: int, threads: int) -> ExperimentReport:
    l_t = _get(params, "l_t", int, required=True)
    l_r = _get(params, "l_r", int, required=True)
    s = _get(params, "s", int, required=True)
    rho = _get(params, "rho", float, required=True)
    trials = _get(params, "trials", int, 10_000)
    kind = _get(params, "codebook_kind", str, "maxmin")
    design_iters = _get(params, "design_iters", int, 8)
    log_base = _get(params, "log_base", str, "bits")
    if "r_fb_values" in params:
        r_fbs = _int_list(params, "r_fb_values")
    else:
        r_fbs = [_get(params, "r_fb", int, required=True)]

    configs = []
    for i, r_fb in enumerate(r_fbs):
        try:
            configs.append(
                BeamformingConfig(
                    l_t=l_t,
                    l_r=l_r,
                    s=s,
                    rho=rho,
                    r_fb=r_fb,
                    trials=trials,
                    seed=_row_seed_int(seed, i),
                    codebook_kind=kind,
                    design_iters=design_iters,
                    log_base=log_base,
                )
            )
        except DomainError as exc:
            raise ConfigError(f"r_fb={r_fb}: {exc}") from exc

    with Stopwatch() as sw:
        reports = _run_rows(
            [lambda cfg=cfg: beamforming_throughput_experiment(cfg) for cfg in configs],
            threads,
        )
    rows = [r.rows[0] for r in reports]
    return ExperimentReport(
        experiment="beamforming",
        config={
            "l_t": l_t,
            "l_r": l_r,
            "s": s,
            "rho": rho,
            "r_fb_values": r_fbs,
            "trials": trials,
            "codebook_kind": kind,
            "design_iters": design_iters,
            "log_base": log_base,
        },
        seed=seed,
        rows=rows,
        wall_time_s=sw.elapsed,
    )


# ---------------------------------------------------------------------------
# serialization


def _csv_value(value) -> str:
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def write_csv(path: str, columns: list[str], rows: list[dict]) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_csv_value(row.get(c)) for c in columns))
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_report(report: ExperimentReport, out_dir: str) -> tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    base = report.experiment
    csv_path = os.path.join(out_dir, base + ".csv")
    json_path = os.path.join(out_dir, base + ".json")
    write_csv(csv_path, CSV_COLUMNS[report.experiment], report.rows)
    with open(json_path, "w", encoding="ascii") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    return csv_path, json_path


# ---------------------------------------------------------------------------
# codebook subcommands


def _codebook_save(params: dict, seed: int, out_dir: str) -> str:
    n, p, q, beta = _dims(params, require_order=False)
    k = _get(params, "K", int, required=True)
    kind = _get(params, "kind", str, "random")
    if k < 1:
        raise ConfigError(f"K: must be >= 1, got {k}")
    if kind not in ("random", "maxmin"):
        raise ConfigError(f"kind: must be random or maxmin, got {kind!r}")
    name = _get(params, "name", str, f"codebook_n{n}_p{p}_q{q}_b{beta}_K{k}")
    source, code = _specs(n, p, q, beta)
    if kind == "random":
        cb = random_codebook(source, code, k, seed=seed)
    else:
        if k < 2:
            raise ConfigError(f"K: maxmin design needs K >= 2, got {k}")
        iters = _get(params, "iters", int, 8)
        train_samples = _get(params, "train_samples", int, 10_000)
        cb = design_maxmin(
            source, code, k, seed=seed, iters=iters, train_samples=train_samples
        )
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name + ".json")
    codebook_io.save_codebook(cb, path)
    return path


def _codebook_summary(path: str) -> str:
    cb = codebook_io.load_codebook(path)
    parts = [
        f"file: {path}",
        f"ambient n={cb.code_spec.n}, source p={cb.source_spec.p}, "
        f"code q={cb.code_spec.p}, beta={cb.code_spec.beta}",
        f"entries: {cb.size}",
        f"provenance: {cb.provenance.kind}",
    ]
    if cb.size <= DUPLICATE_CHECK_MAX:
        parts.append(f"min pairwise distance: {cb.min_pairwise_distance():.6g}")
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# entry point


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path}: expected a JSON object")
    return doc


RUNNERS = {
    "volume": run_volume,
    "distortion": run_distortion,
    "design": run_design,
    "random-opt": run_random_opt,
    "awgn": run_awgn,
    "beamforming": run_beamforming,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grassquant",
        description="Subspace-quantization experiments: volumes, distortion bounds, "
        "codebook design, and channel studies.",
    )
    parser.add_argument("--version", action="version", version=f"grassquant {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--seed", type=int, default=None, help="override config seed")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument(
            "--threads",
            type=int,
            default=None,
            help="row parallelism (default: config value or cpu count)",
        )

    for name in RUNNERS:
        common(sub.add_parser(name, help=f"run the {name} experiment"))

    cb = sub.add_parser("codebook", help="codebook file tools")
    cb_sub = cb.add_subparsers(dest="cb_command", required=True)
    save = cb_sub.add_parser("save", help="generate and save a codebook")
    save.add_argument("--config", required=True)
    save.add_argument("--seed", type=int, default=None)
    save.add_argument("--out", default=".")
    for name in ("load", "verify"):
        p = cb_sub.add_parser(name, help=f"{name} a codebook file")
        p.add_argument("--path", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "codebook":
            if args.cb_command == "save":
                params = _load_config(args.config)
                seed = args.seed if args.seed is not None else _get(params, "seed", int, 0)
                path = _codebook_save(params, seed, args.out)
                print(path)
            else:
                print(_codebook_summary(args.path))
                if args.cb_command == "verify":
                    print("OK")
            return 0

        params = _load_config(args.config)
        seed = args.seed if args.seed is not None else _get(params, "seed", int, 0)
        threads = args.threads
        if threads is None:
            threads = _get(params, "threads", int, os.cpu_count() or 1)
        if threads < 1:
            raise ConfigError(f"threads: must be >= 1, got {threads}")
        runner = RUNNERS[args.command]
        if args.command == "design":
            report = runner(params, seed, threads, out_dir=args.out)
        else:
            report = runner(params, seed, threads)
        csv_path, json_path = write_report(report, args.out)
        print(csv_path)
        print(json_path)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GrassquantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
