"""Batch experiment runner: seeded trials in, CSV/JSON reports out.

Non-interactive by design. Option values resolve as defaults < config file
(--config, JSON mirroring the flag names) < explicit flags. Trials run in
a process pool (size ``--threads``, capped by the NORMAL_APPROX_THREADS
environment variable); per-trial seeds are derived from the base seed and
the trial index, and output rows are ordered by trial index regardless of
completion order, so a fixed configuration reproduces its report files
byte for byte (pass --no-timestamp to also suppress the timestamp and the
wall-clock column).

Exit status: 0 all trials passed, 1 certification/verdict failures,
2 configuration or input errors, 3 solver failures.
"""

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .approx import certify_bound, fraas_check, normality_defect
from .core import (
    DEFAULT_COMMUTATION_TOL,
    commutator_defect,
    family_from_json,
    gram_sum,
    load_matrix,
    matrix_to_json,
    members_to_json,
    MatrixFamily,
)
from .errors import CommutationError, InvalidInputError, NormalApproxError, SolverError
from .generators import GeneratorSpec, build_family, cholesky_counterexample
from .rng import derive_seed
from .spectra import DEFAULT_GRID, numerical_spread
from .splitting import split as split_family
from .triangular import DEFAULT_SCHUR_TOL

CSV_COLUMNS = ("trial", "n", "k", "lhs", "rhs", "ratio", "schur_residual", "verdict", "wall_ms")

_TRIAL_COMMANDS = ("certify", "fraas", "split")


@dataclass
class ExperimentConfig:
    command: str
    gen: str | None = None
    input: str | None = None
    n: int = 8
    k: int = 3
    n_qn: int | None = None
    n_n: int | None = None
    seed: int = 0
    scale: float = 1.0
    trials: int = 1
    grid: int = DEFAULT_GRID
    commutation_tol: float = DEFAULT_COMMUTATION_TOL
    schur_tol: float = DEFAULT_SCHUR_TOL
    normality_tol: float = 1e-8
    out: str | None = None
    format: str = "csv"
    threads: int | None = None
    timestamp: bool = True


def _thread_count(requested: int | None) -> int:
    cap = os.environ.get("NORMAL_APPROX_THREADS")
    count = requested if requested is not None else (os.cpu_count() or 1)
    if cap is not None:
        try:
            count = min(count, max(1, int(cap)))
        except ValueError:
            raise InvalidInputError(
                f"NORMAL_APPROX_THREADS must be an integer, got {cap!r}"
            ) from None
    return max(1, count)


def _generator_spec(cfg: ExperimentConfig, trial_seed: int) -> GeneratorSpec:
    return GeneratorSpec(
        kind=cfg.gen,
        n=cfg.n,
        k=cfg.k,
        seed=trial_seed,
        scale=cfg.scale,
        n_qn=cfg.n_qn,
        n_n=cfg.n_n,
    )


def _family_for_trial(cfg: ExperimentConfig, trial_seed: int) -> MatrixFamily:
    if cfg.input is not None:
        with open(cfg.input, "r", encoding="utf-8") as fh:
            return family_from_json(json.load(fh), commutation_tolerance=cfg.commutation_tol)
    return build_family(_generator_spec(cfg, trial_seed))


def _run_trial(payload: tuple[dict, int]) -> dict:
    cfg_dict, trial = payload
    cfg = ExperimentConfig(**cfg_dict)
    trial_seed = derive_seed(cfg.seed, trial)
    start = time.perf_counter()
    family = _family_for_trial(cfg, trial_seed)
    record = {
        "record": "trial",
        "command": cfg.command,
        "trial": trial,
        "seed": trial_seed,
        "n": family.dim,
        "k": family.size,
    }
    if cfg.command == "certify":
        report = certify_bound(family, spread_grid=cfg.grid, tol=cfg.schur_tol)
        record.update(
            lhs=report.lhs_unnormalized,
            rhs=report.rhs_unnormalized,
            ratio=report.ratio,
            schur_residual=report.schur_residual,
            verdict=report.certified,
            report=report.to_json(),
        )
    elif cfg.command == "fraas":
        report = fraas_check(family, tol=cfg.normality_tol, spread_grid=cfg.grid)
        record.update(
            lhs=max(report.normality_defects),
            rhs=report.gram_spread,
            ratio=None,
            schur_residual=None,
            verdict=report.verdict,
            report=report.to_json(),
        )
    else:  # split
        result = split_family(family)
        scale = 1.0 + max(float(np.linalg.norm(a, "fro")) for a in family.members)
        defects_ok = (
            result.invariance_defect <= cfg.normality_tol * scale
            and all(d <= cfg.normality_tol * scale for d in result.normality_defects_on_Hn)
            and all(r <= 1e-6 * scale for r in result.qn_spectral_radii)
        )
        dims_ok = True
        if cfg.gen == "nilpotent_plus_normal":
            dims_ok = result.qn_dim == cfg.n_qn and result.n_dim == cfg.n_n
        record.update(
            lhs=result.invariance_defect,
            rhs=max(result.normality_defects_on_Hn),
            ratio=None,
            schur_residual=None,
            verdict=bool(defects_ok and dims_ok),
            report={
                "qn_dim": result.qn_dim,
                "n_dim": result.n_dim,
                "invariance_defect": result.invariance_defect,
                "orthogonality_defect": result.orthogonality_defect,
                "qn_spectral_radii": list(result.qn_spectral_radii),
                "normality_defects_on_Hn": list(result.normality_defects_on_Hn),
            },
        )
    record["wall_ms"] = (time.perf_counter() - start) * 1000.0 if cfg.timestamp else 0.0
    return record


def _summary(cfg: ExperimentConfig, records: list[dict]) -> dict:
    failures = sum(1 for r in records if not r["verdict"])
    ratios = sorted(r["ratio"] for r in records if isinstance(r["ratio"], float))
    summary = {
        "record": "summary",
        "command": cfg.command,
        "trials": len(records),
        "failures": failures,
        "ratio_min": ratios[0] if ratios else None,
        "ratio_median": ratios[len(ratios) // 2] if ratios else None,
        "ratio_max": ratios[-1] if ratios else None,
    }
    if cfg.timestamp:
        summary["generated_at"] = datetime.now(timezone.utc).isoformat()
    return summary


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_reports(cfg: ExperimentConfig, records: list[dict], summary: dict) -> None:
    if cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([_csv_cell(r.get(col)) for col in CSV_COLUMNS])
        payload = buf.getvalue()
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(payload)
            with open(cfg.out + ".summary.json", "w", encoding="utf-8") as fh:
                json.dump(summary, fh, sort_keys=True)
                fh.write("\n")
        else:
            sys.stdout.write(payload)
    else:
        lines = [json.dumps(r, sort_keys=True) for r in records]
        lines.append(json.dumps(summary, sort_keys=True))
        payload = "\n".join(lines) + "\n"
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(payload)
        else:
            sys.stdout.write(payload)
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)


def run(cfg: ExperimentConfig) -> int:
    """Execute a trial-based command and write its reports; returns exit status."""
    if cfg.command not in _TRIAL_COMMANDS:
        raise InvalidInputError(f"run() handles {_TRIAL_COMMANDS}, not {cfg.command!r}")
    if cfg.trials < 1:
        raise InvalidInputError("trials must be at least 1")
    if cfg.input is None and cfg.gen is None:
        raise InvalidInputError("either --gen or --input is required")
    if cfg.input is not None and cfg.trials != 1:
        raise InvalidInputError("--input runs exactly one trial; drop --trials")
    threads = _thread_count(cfg.threads)
    payloads = [(cfg.__dict__.copy(), t) for t in range(cfg.trials)]
    if threads == 1 or cfg.trials == 1:
        records = [_run_trial(p) for p in payloads]
    else:
        chunk = max(1, cfg.trials // (threads * 8))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_trial, payloads, chunksize=chunk))
    summary = _summary(cfg, records)
    _write_reports(cfg, records, summary)
    return 0 if summary["failures"] == 0 else 1


def _cmd_spread(args) -> int:
    matrix = load_matrix(args.input)
    result = numerical_spread(matrix, grid=args.grid)
    payload = json.dumps(result.to_json(), sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return 0


def _cmd_counterexample(args) -> int:
    a1, a2 = cholesky_counterexample()
    gram = a1.conj().T @ a1 + a2.conj().T @ a2
    gram_residual = float(np.linalg.norm(gram - np.eye(2), "fro"))
    try:
        MatrixFamily((a1, a2))
        rejected = False
    except CommutationError:
        rejected = True
    report = {
        "a1": matrix_to_json(a1),
        "a2": matrix_to_json(a2),
        "gram_sum_identity_residual": gram_residual,
        "normality_defects": [normality_defect(a1), normality_defect(a2)],
        "commutator_defect": commutator_defect(a1, a2),
        "family_construction_rejected": rejected,
    }
    out = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


def _cmd_generate(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = GeneratorSpec.from_json(json.load(fh))
    if spec.kind == "cholesky_counterexample":
        payload = members_to_json(cholesky_counterexample())
    else:
        payload = members_to_json(build_family(spec).members)
    text = json.dumps(payload, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _add_trial_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gen", choices=(
        "poly_in_one", "planted_normal_scalar_sum", "planted_triangular",
        "nilpotent_plus_normal", "truncated_shift",
    ), default=None, help="family generator kind")
    parser.add_argument("--input", default=None, help="family JSON file instead of a generator")
    parser.add_argument("--n", type=int, default=None, help="matrix dimension")
    parser.add_argument("--k", type=int, default=None, help="family size")
    parser.add_argument("--n-qn", type=int, default=None, dest="n_qn",
                        help="nilpotent block dimension (nilpotent_plus_normal)")
    parser.add_argument("--n-n", type=int, default=None, dest="n_n",
                        help="normal block dimension (nilpotent_plus_normal)")
    parser.add_argument("--seed", type=int, default=None, help="base seed (trial seeds derive from it)")
    parser.add_argument("--scale", type=float, default=None, help="overall member scale")
    parser.add_argument("--trials", type=int, default=None, help="number of seeded trials")
    parser.add_argument("--grid", type=int, default=None, help="spread sweep grid size")
    parser.add_argument("--commutation-tol", type=float, default=None, dest="commutation_tol")
    parser.add_argument("--schur-tol", type=float, default=None, dest="schur_tol")
    parser.add_argument("--normality-tol", type=float, default=None, dest="normality_tol")
    parser.add_argument("--out", default=None, help="report file (stdout when omitted)")
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--threads", type=int, default=None, help="worker pool size")
    parser.add_argument("--no-timestamp", action="store_true",
                        help="suppress the timestamp and zero the wall_ms column")
    parser.add_argument("--config", default=None, help="JSON config file mirroring the flags")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normal-approx",
        description="Nearby commuting normal families: construction and certification.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("certify", "certify the distance bound over seeded families"),
        ("fraas", "check the scalar-gram-sum normality condition"),
        ("split", "quasi-nilpotent/normal subspace split"),
    ):
        p = sub.add_parser(name, help=blurb)
        _add_trial_options(p)
    p = sub.add_parser("spread", help="numerical spread of one matrix")
    p.add_argument("--input", required=True, help="matrix JSON file")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.add_argument("--out", default=None)
    p = sub.add_parser("counterexample", help="print the non-commuting Cholesky pair")
    p.add_argument("--out", default=None)
    p = sub.add_parser("generate", help="write the family a generator spec describes")
    p.add_argument("--spec", required=True, help="GeneratorSpec JSON file")
    p.add_argument("--out", default=None)
    return parser


def _merge_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig(command=args.command)
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                overrides = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidInputError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(overrides, dict):
            raise InvalidInputError("config file must hold a JSON object")
        for key, value in overrides.items():
            field = key.replace("-", "_")
            if field == "command" or not hasattr(cfg, field):
                raise InvalidInputError(f"unknown config field {key!r}")
            setattr(cfg, field, value)
    for field in ("gen", "input", "n", "k", "n_qn", "n_n", "seed", "scale", "trials",
                  "grid", "commutation_tol", "schur_tol", "normality_tol", "out",
                  "format", "threads"):
        value = getattr(args, field, None)
        if value is not None:
            setattr(cfg, field, value)
    if args.no_timestamp:
        cfg.timestamp = False
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command in _TRIAL_COMMANDS:
            return run(_merge_config(args))
        if args.command == "spread":
            return _cmd_spread(args)
        if args.command == "counterexample":
            return _cmd_counterexample(args)
        return _cmd_generate(args)
    except (InvalidInputError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except NormalApproxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
