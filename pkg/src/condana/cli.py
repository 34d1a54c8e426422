"""Command-line surface: condition analyses, bound-verification suites,
delta sweeps, and moment tables, emitted as CSV or JSON.

Floats are serialized with 17 significant digits so reports round-trip
losslessly; infinite condition numbers appear as a boolean flag column,
never as IEEE infinity. Exit codes: 0 success / all checks passed,
1 usage or configuration error, 2 completed with degenerate or failed
rows, 3 internal numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import closed_forms
from .condition import (
    ConditionReport,
    EstimatorConfig,
    PowerIterationError,
    SweepReport,
    delta_sweep,
    report,
)
from .problems import Problem, get_problem, load_matrix_problem, random_point
from .sampling import SampleStream
from .verify import GROUPS, SuiteConfig, run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FLAGGED = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    """Bad flags or configuration; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(value) -> str:
    """One CSV cell: 17 significant digits for floats, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else format(value, ".17g")
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, np.ndarray):
        return [float(v) for v in value]
    return value


def write_rows(rows: list[dict], fields: list[str], fmt: str, out_path: str | None,
               meta: dict | None = None) -> None:
    """Emit rows to a file or stdout. CSV: header plus one line per row.
    JSON: {"meta": ..., "rows": [...]} with the same field order."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_fmt(row.get(f)) for f in fields])
        text = buf.getvalue()
    else:
        payload = {"meta": meta or {}, "rows": [
            {f: _jsonable(row.get(f)) for f in fields} for row in rows
        ]}
        text = json.dumps(payload, indent=2) + "\n"
    if out_path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text)


def _parse_point(text: str, problem: Problem, stream: SampleStream) -> np.ndarray:
    if text == "random":
        # reproducible but non-degenerate: redraw while any |f_j| < 1e-9
        return random_point(problem, stream, min_component=1e-9)
    try:
        values = [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"could not parse point {text!r}") from None
    if len(values) != problem.m:
        raise UsageError(f"point has {len(values)} coordinates, problem needs {problem.m}")
    return np.array(values)


def _parse_deltas(text: str) -> tuple[float, ...]:
    try:
        deltas = tuple(float(tok) for tok in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"could not parse deltas {text!r}") from None
    if not deltas:
        raise UsageError("deltas list is empty")
    if any(d <= 0 for d in deltas) or any(a <= b for a, b in zip(deltas, deltas[1:])):
        raise UsageError("deltas must be positive and strictly decreasing")
    return deltas


def _parse_range(text: str) -> tuple[int, int]:
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            pair = (int(lo), int(hi))
        else:
            pair = (int(text), int(text))
    except ValueError:
        raise UsageError(f"could not parse range {text!r}; use LO:HI") from None
    if pair[0] > pair[1] or pair[0] < 0:
        raise UsageError(f"bad range {text!r}")
    return pair


def _load_problem(spec: str) -> Problem:
    if os.path.exists(spec):
        try:
            return load_matrix_problem(spec)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    try:
        return get_problem(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="condana",
                     description="Condition-number analysis and bound verification")
    parser.add_argument("--command", required=True,
                        choices=("analyze", "verify", "sweep", "moments"))
    parser.add_argument("--problem", help="corpus problem name or matrix file path")
    parser.add_argument("--point", default="random",
                        help="comma-separated coordinates, or 'random'")
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=42,
                        help="master seed (CONDANA_SEED overrides when set)")
    parser.add_argument("--deltas", help="comma-separated decreasing deltas (sweep)")
    parser.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", help="output path; stdout when omitted")
    parser.add_argument("--m-range", help="dimension range LO:HI")
    parser.add_argument("--n-range", help="output-dimension range LO:HI (verify)")
    parser.add_argument("--trials", type=int, default=100,
                        help="random problem instances for the norm-wise suite")
    parser.add_argument("--checks", help="comma-separated verify groups "
                        f"(subset of: {', '.join(GROUPS)})")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for the verify suite")
    return parser


ANALYZE_FIELDS = [
    "problem", "point", "m", "n", "k", "j", "wnc", "wcc_j",
    "snc_est", "snc_half_width", "snc_exact", "snlp", "snlp_half_width",
    "scc_j", "scc_half_width", "sclp_j", "sclp_half_width", "log_skewness",
    "flag_norm_degenerate", "flag_output_degenerate",
]


def _analyze_rows(rep: ConditionReport) -> list[dict]:
    point_str = " ".join(format(v, ".17g") for v in rep.point)
    rows = []
    for j in range(rep.n):
        est = rep.scc[j]
        row = {
            "problem": rep.problem, "point": point_str,
            "m": rep.m, "n": rep.n, "k": rep.k, "j": j,
            "wnc": rep.wnc, "wcc_j": rep.wcc[j],
            "snc_est": rep.snc.estimate if rep.snc else None,
            "snc_half_width": rep.snc.half_width if rep.snc else None,
            "snc_exact": rep.snc.exact if rep.snc else None,
            "snlp": rep.snc.log_estimate if rep.snc else None,
            "snlp_half_width": rep.snc.log_half_width if rep.snc else None,
            "scc_j": est.estimate if est else None,
            "scc_half_width": est.half_width if est else None,
            "sclp_j": est.log_estimate if est else None,
            "sclp_half_width": est.log_half_width if est else None,
            "log_skewness": est.log_skewness if est else None,
            "flag_norm_degenerate": rep.degenerate_norm,
            "flag_output_degenerate": j in rep.degenerate_outputs,
        }
        rows.append(row)
    return rows


def run_analyze(args) -> int:
    if not args.problem:
        raise UsageError("analyze needs --problem")
    problem = _load_problem(args.problem)
    master = SampleStream(args.seed)
    point_stream, est_stream = master.split(2)
    x = _parse_point(args.point, problem, point_stream)
    cfg = EstimatorConfig(stream=est_stream, samples=args.samples)
    rep = report(problem, x, cfg)
    rows = _analyze_rows(rep)
    meta = {"command": "analyze", "seed": args.seed, "samples": args.samples}
    write_rows(rows, ANALYZE_FIELDS, args.fmt, args.out, meta)
    flagged = rep.degenerate_norm or bool(rep.degenerate_outputs)
    return EXIT_FLAGGED if flagged else EXIT_OK


VERIFY_FIELDS = [
    "name", "instance", "computed", "bound", "relation", "slack",
    "tolerance_or_halfwidth", "passed", "warning",
]


def run_verify(args) -> int:
    groups = tuple(GROUPS)
    if args.checks:
        groups = tuple(tok.strip() for tok in args.checks.split(",") if tok.strip())
    try:
        cfg = SuiteConfig(
            seed=args.seed,
            samples=args.samples,
            trials=args.trials,
            m_range=_parse_range(args.m_range) if args.m_range else None,
            n_range=_parse_range(args.n_range) if args.n_range else None,
            groups=groups,
            threads=max(args.threads, 1),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    suite = run_suite(cfg)
    rows = [{
        "name": c.name, "instance": c.instance, "computed": c.computed,
        "bound": c.bound, "relation": c.relation, "slack": c.slack,
        "tolerance_or_halfwidth": c.tolerance_or_halfwidth,
        "passed": c.passed, "warning": c.warning,
    } for c in suite.checks]
    meta = {"command": "verify", "seed": suite.seed,
            "passed": suite.passed_count, "failed": suite.failed_count}
    write_rows(rows, VERIFY_FIELDS, args.fmt, args.out, meta)
    return EXIT_OK if suite.all_passed else EXIT_FLAGGED


SWEEP_FIELDS = [
    "problem", "point", "delta", "j", "snc_fd", "snc_fd_half_width",
    "snc_linearized", "scc_fd_j", "scc_fd_half_width", "scc_linearized_j",
    "flag_underflow", "slope_snc", "slope_scc_j",
]


def _fit_slope(points) -> float | None:
    """log-log slope of |finite-delta - linearized| against delta."""
    xs, ys = [], []
    for pt, lin in points:
        if pt.underflowed or lin is None:
            continue
        gap = abs(pt.estimate - lin)
        if gap > 0.0:
            xs.append(math.log2(pt.delta))
            ys.append(math.log2(gap))
    if len(xs) < 2:
        return None
    return float(np.polyfit(xs, ys, 1)[0])


def _sweep_rows(rep: SweepReport) -> tuple[list[dict], bool]:
    point_str = " ".join(format(v, ".17g") for v in rep.point)
    slope_snc = _fit_slope([(pt, rep.snc_linearized) for pt in rep.snc_by_delta])
    slopes_scc = [
        _fit_slope([(pt, rep.scc_linearized[j]) for pt in rep.scc_by_delta[j]])
        if rep.scc_by_delta[j] else None
        for j in range(len(rep.scc_linearized))
    ]
    rows = []
    any_flag = rep.degenerate_norm or bool(rep.degenerate_outputs)
    for d_idx, delta in enumerate(rep.deltas):
        snc_pt = rep.snc_by_delta[d_idx] if rep.snc_by_delta else None
        for j in range(len(rep.scc_linearized)):
            scc_pt = rep.scc_by_delta[j][d_idx] if rep.scc_by_delta[j] else None
            underflow = bool((snc_pt and snc_pt.underflowed) or
                             (scc_pt and scc_pt.underflowed))
            any_flag = any_flag or underflow
            rows.append({
                "problem": rep.problem, "point": point_str, "delta": delta, "j": j,
                "snc_fd": snc_pt.estimate if snc_pt and not snc_pt.underflowed else None,
                "snc_fd_half_width": snc_pt.half_width if snc_pt and not snc_pt.underflowed else None,
                "snc_linearized": rep.snc_linearized,
                "scc_fd_j": scc_pt.estimate if scc_pt and not scc_pt.underflowed else None,
                "scc_fd_half_width": scc_pt.half_width if scc_pt and not scc_pt.underflowed else None,
                "scc_linearized_j": rep.scc_linearized[j],
                "flag_underflow": underflow,
                "slope_snc": slope_snc,
                "slope_scc_j": slopes_scc[j],
            })
    return rows, any_flag


def run_sweep(args) -> int:
    if not args.problem:
        raise UsageError("sweep needs --problem")
    if not args.deltas:
        raise UsageError("sweep needs --deltas")
    problem = _load_problem(args.problem)
    deltas = _parse_deltas(args.deltas)
    master = SampleStream(args.seed)
    point_stream, est_stream = master.split(2)
    x = _parse_point(args.point, problem, point_stream)
    cfg = EstimatorConfig(stream=est_stream, samples=args.samples,
                          mode="finite-delta", deltas=deltas)
    rep = delta_sweep(problem, x, cfg)
    rows, flagged = _sweep_rows(rep)
    meta = {"command": "sweep", "seed": args.seed, "samples": args.samples}
    write_rows(rows, SWEEP_FIELDS, args.fmt, args.out, meta)
    return EXIT_FLAGGED if flagged else EXIT_OK


MOMENTS_FIELDS = [
    "m", "e_norm", "e_norm_sq", "e_log_norm", "e_abs_cos", "e_cos_sq",
    "e_log_abs_cos", "snc_wnc_ratio", "snlp_gap_bits",
    "t1_ratio_lo", "t1_ratio_hi", "t1_gap_lo", "t1_gap_hi",
    "t2_ratio_lo", "t2_ratio_hi", "t2_gap_lo", "t2_gap_hi", "epsilon_m",
]


def run_moments(args) -> int:
    if not args.m_range:
        raise UsageError("moments needs --m-range")
    lo, hi = _parse_range(args.m_range)
    if lo < 1:
        raise UsageError("moments needs m >= 1")
    rows = []
    for m in range(lo, hi + 1):
        table = closed_forms.moment_table(m)
        ratio, gap = closed_forms.snc_wnc_exact(m)
        t1 = closed_forms.theorem1_bounds(m, 1)
        row = {
            "m": m, "e_norm": table.e_norm, "e_norm_sq": table.e_norm_sq,
            "e_log_norm": table.e_log_norm, "e_abs_cos": table.e_abs_cos,
            "e_cos_sq": table.e_cos_sq, "e_log_abs_cos": table.e_log_abs_cos,
            "snc_wnc_ratio": ratio, "snlp_gap_bits": gap,
            "t1_ratio_lo": t1.snc_ratio_lo, "t1_ratio_hi": t1.snc_ratio_hi,
            "t1_gap_lo": t1.snlp_gap_lo, "t1_gap_hi": t1.snlp_gap_hi,
            "t2_ratio_lo": None, "t2_ratio_hi": None,
            "t2_gap_lo": None, "t2_gap_hi": None, "epsilon_m": None,
        }
        if m > 1:
            t2 = closed_forms.theorem2_bounds(m)
            row.update({
                "t2_ratio_lo": t2.scc_ratio_lo, "t2_ratio_hi": t2.scc_ratio_hi,
                "t2_gap_lo": t2.sclp_gap_lo, "t2_gap_hi": t2.sclp_gap_hi,
                "epsilon_m": t2.epsilon_m,
            })
        rows.append(row)
    meta = {"command": "moments"}
    write_rows(rows, MOMENTS_FIELDS, args.fmt, args.out, meta)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        env_seed = os.environ.get("CONDANA_SEED")
        if env_seed is not None:
            try:
                args.seed = int(env_seed)
            except ValueError:
                raise UsageError(f"CONDANA_SEED={env_seed!r} is not an integer") from None
        if args.samples < 100:
            raise UsageError("--samples must be >= 100")
        dispatch = {"analyze": run_analyze, "verify": run_verify,
                    "sweep": run_sweep, "moments": run_moments}
        return dispatch[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PowerIterationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
