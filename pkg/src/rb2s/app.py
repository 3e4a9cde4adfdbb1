"""Command-line interface: data ingestion, test/simulate commands, outputs.

Exit codes for ``rb2s test``: 0 evidence for equality, 1 evidence against,
2 inconclusive, 3 and above for errors.  JSON output is byte-deterministic
for a fixed seed and flag set; wall-clock timings therefore go to the
human-readable table only.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, replace

import numpy as np

from .catalog import CATALOG_A_VALUES, CATALOGS, parse_case
from .distributions import DistParseError, parse_dist
from .relbelief import DistanceSamples
from .streams import KIND_CASE_DATA, KIND_CASE_TEST, substream, substream_seed
from .testkit import (DegenerateSamplesError, TestConfig, TestReport, Verdict,
                      sensitivity_sweep)

EXIT_FOR = 0
EXIT_AGAINST = 1
EXIT_INCONCLUSIVE = 2
EXIT_ERROR = 3

_VERDICT_EXIT = {
    Verdict.EVIDENCE_FOR: EXIT_FOR,
    Verdict.EVIDENCE_AGAINST: EXIT_AGAINST,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class IngestError(ValueError):
    """A data file could not be read as a single numeric column."""


def ingest(path: str) -> np.ndarray:
    """Read one real per line (or a single CSV column, optional header)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IngestError(f"{path}: {exc.strerror or exc}") from None
    values = []
    for lineno, raw in enumerate(lines, 1):
        fields = [f.strip() for f in raw.strip().split(",") if f.strip()]
        if not fields:
            continue
        if len(fields) > 1:
            raise IngestError(f"{path}: line {lineno}: expected a single column, "
                              f"got {len(fields)} fields")
        tok = fields[0]
        try:
            value = float(tok)
        except ValueError:
            if lineno == 1 and not values:
                continue  # header row
            raise IngestError(f"{path}: line {lineno}: non-numeric value {tok!r}") from None
        if not np.isfinite(value):
            raise IngestError(f"{path}: line {lineno}: non-finite value {tok!r}")
        values.append(value)
    if not values:
        raise IngestError(f"{path}: no numeric data found")
    return np.asarray(values, dtype=np.float64)


@dataclass
class ResultRecord:
    """One test outcome row; mirrors the RB (strength) presentation."""

    label: str
    a: float
    rb_zero: float
    strength: float
    baseline_p: float | None
    seed: int
    timing_s: float | None = None

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "label": self.label,
            "a": self.a,
            "rb_zero": self.rb_zero,
            "strength": self.strength,
            "baseline_p": self.baseline_p,
            "seed": self.seed,
        }
        if include_timing:
            out["timing_s"] = self.timing_s
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ResultRecord":
        return cls(label=d["label"], a=d["a"], rb_zero=d["rb_zero"],
                   strength=d["strength"], baseline_p=d["baseline_p"],
                   seed=d["seed"], timing_s=d.get("timing_s"))


def emit_density(samples: DistanceSamples, path: str, n_bins: int = 200) -> None:
    """Write per-bin normalized histogram densities of both distance samples.

    CSV columns: distance (bin center), prior_density, posterior_density,
    over equal-width bins spanning [0, max of all draws].
    """
    hi = float(max(samples.prior.max(), samples.posterior.max(), 1e-12))
    edges = np.linspace(0.0, hi, n_bins + 1)
    prior_d, _ = np.histogram(samples.prior, bins=edges, density=True)
    post_d, _ = np.histogram(samples.posterior, bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("distance,prior_density,posterior_density\n")
            for c, p, q in zip(centers, prior_d, post_d):
                fh.write(f"{float(c)!r},{float(p)!r},{float(q)!r}\n")
    except OSError as exc:
        raise IngestError(f"{path}: cannot write density file: {exc.strerror or exc}") from None


def _rb_cell(rb: float, st: float) -> str:
    return f"{rb:.2f} ({st:.2f})"


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("RB2S_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"RB2S_SEED is not an integer: {env!r}") from None
    raise ValueError("no seed given: pass --seed or set RB2S_SEED "
                     "(runs must be reproducible)")


def _load_config(args) -> TestConfig:
    """Merge precedence: CLI flags > config file > defaults."""
    fields = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"{args.config}: cannot read config: {exc}") from None
        if not isinstance(raw, dict):
            raise ValueError(f"{args.config}: config must be a flat JSON object")
        known = {"master_seed", "n_atoms", "r1", "r2", "n_bins", "zero_bins",
                 "a_values", "base"}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{args.config}: unknown config keys {sorted(unknown)}")
        fields.update(raw)
    if "base" in fields and isinstance(fields["base"], str):
        fields["base"] = parse_dist(fields["base"])
    if args.a is not None:
        fields["a_values"] = _parse_a_list(args.a)
    for name in ("r1", "r2", "n_atoms", "n_bins", "zero_bins"):
        value = getattr(args, name, None)
        if value is not None:
            fields[name] = value
    if args.seed is not None:
        fields["master_seed"] = args.seed
    elif "master_seed" not in fields:
        fields["master_seed"] = _resolve_seed(args)
    return TestConfig(**fields)


def _parse_a_list(text: str) -> tuple:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"bad concentration list {text!r}") from None
    if not values:
        raise ValueError("empty concentration list")
    return values


def _report_records(label: str, report: TestReport, seed: int,
                    timing_s: float | None) -> list:
    records = []
    for a, summary in zip(report.a_values, report.summaries):
        records.append(ResultRecord(
            label=label, a=a, rb_zero=summary.rb_zero, strength=summary.strength,
            baseline_p=report.baseline_p, seed=seed, timing_s=timing_s))
    return records


def _print_report(label: str, report: TestReport, elapsed: float) -> None:
    print(f"{label}   (n1={report.n1}, n2={report.n2})")
    print(f"{'a':>8}  {'RB (Strength)':<16}  p-value")
    for i, (a, summary) in enumerate(zip(report.a_values, report.summaries)):
        pcell = f"{report.baseline_p:.4f}" if i == 0 and report.baseline_p is not None else ""
        print(f"{a:>8g}  {_rb_cell(summary.rb_zero, summary.strength):<16}  {pcell}")
    print(f"verdict: {report.verdict.value}   [{elapsed:.1f}s]")


def _test_json_doc(cfg: TestConfig, report: TestReport, records: list) -> dict:
    return {
        "command": "test",
        "config": cfg.to_dict(),
        "n1": report.n1,
        "n2": report.n2,
        "verdict": report.verdict.value,
        "baseline_p": report.baseline_p,
        "records": [r.to_dict() for r in records],
        "summaries": [
            {
                "a": a,
                "rb_zero": s.rb_zero,
                "strength": s.strength,
                "bin_rb": list(s.bin_rb),
                "edges": list(s.edges),
                "n_bins": s.n_bins,
                "zero_bins": s.zero_bins,
                "r1": s.r1,
                "r2": s.r2,
            }
            for a, s in zip(report.a_values, report.summaries)
        ],
    }


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def cmd_test(args) -> int:
    cfg = _load_config(args)
    x = ingest(args.x)
    y = ingest(args.y)
    base_x = parse_dist(args.unsafe_base_x) if args.unsafe_base_x else None
    base_y = parse_dist(args.unsafe_base_y) if args.unsafe_base_y else None
    t0 = time.perf_counter()
    report = sensitivity_sweep(
        x, y, cfg, n_perm=args.n_perm, base_x=base_x, base_y=base_y,
        keep_samples=bool(args.emit_density), workers=args.workers)
    elapsed = time.perf_counter() - t0
    label = f"{args.x} vs {args.y}"
    records = _report_records(label, report, cfg.master_seed, elapsed)
    _print_report(label, report, elapsed)
    if args.emit_density:
        emit_density(report.samples[0], args.emit_density)
        print(f"density data for a={report.a_values[0]:g} written to {args.emit_density}")
    if args.json:
        _write_json(args.json, _test_json_doc(cfg, report, records))
    return _VERDICT_EXIT[report.verdict]


def _simulate_cases(args) -> tuple:
    if args.case:
        if args.catalog:
            raise ValueError("give either --catalog or --case, not both")
        case = parse_case(args.case)
        return (case,), (1.0,)
    if not args.catalog:
        raise ValueError("simulate needs --catalog table1|table2|table3 or --case")
    try:
        cases = tuple(CATALOGS[args.catalog]())
    except KeyError:
        raise ValueError(f"unknown catalog {args.catalog!r}; "
                         f"choose from {sorted(CATALOGS)}") from None
    return cases, CATALOG_A_VALUES[args.catalog]


def _config_file_names(args, key: str) -> bool:
    if not args.config:
        return False
    try:
        with open(args.config, encoding="utf-8") as fh:
            return key in json.load(fh)
    except (OSError, json.JSONDecodeError):
        return False


def cmd_simulate(args) -> int:
    cases, default_a = _simulate_cases(args)
    cfg = _load_config(args)
    # catalog sweep applies unless --a or the config file chose one
    if args.a is None and not _config_file_names(args, "a_values"):
        cfg = replace(cfg, a_values=default_a)
    reps = args.reps
    all_records = []
    aggregates = []
    for case_idx, case in enumerate(cases):
        per_rep = {a: [] for a in sorted(cfg.a_values)}
        pvals = []
        for rep in range(reps):
            data_rng = substream(cfg.master_seed, KIND_CASE_DATA, case_idx, rep)
            x = case.dist_x.sample_n(data_rng, case.n1)
            y = case.dist_y.sample_n(data_rng, case.n2)
            rep_seed = substream_seed(cfg.master_seed, KIND_CASE_TEST, case_idx, rep)
            rep_cfg = replace(cfg, master_seed=rep_seed)
            t0 = time.perf_counter()
            report = sensitivity_sweep(x, y, rep_cfg, n_perm=args.n_perm,
                                       base_x=case.base_x, base_y=case.base_y,
                                       workers=args.workers)
            elapsed = time.perf_counter() - t0
            pvals.append(report.baseline_p)
            for a, summary in zip(report.a_values, report.summaries):
                per_rep[a].append((summary.rb_zero, summary.strength))
            all_records.extend(_report_records(
                f"{case.label} [rep {rep}]", report, rep_seed, elapsed))
        rejection = float(np.mean([p <= 0.05 for p in pvals])) if args.n_perm else None
        print(case.label)
        for a in sorted(cfg.a_values):
            rbs = [rb for rb, _ in per_rep[a]]
            sts = [st for _, st in per_rep[a]]
            cell = _rb_cell(float(np.median(rbs)), float(np.median(sts)))
            extra = f"  baseline rejection rate: {rejection:.2f}" if a == sorted(cfg.a_values)[0] \
                and rejection is not None else ""
            print(f"  a={a:<6g} median RB (Strength): {cell}{extra}")
            aggregates.append({
                "label": case.label,
                "a": a,
                "median_rb_zero": float(np.median(rbs)),
                "median_strength": float(np.median(sts)),
                "baseline_rejection_rate": rejection,
                "reps": reps,
            })
    if args.json:
        doc = {
            "command": "simulate",
            "catalog": args.catalog or "case",
            "config": cfg.to_dict(),
            "reps": reps,
            "aggregates": aggregates,
            "records": [r.to_dict() for r in all_records],
        }
        _write_json(args.json, doc)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rb2s",
                     description="Bayesian two-sample test via relative belief "
                                 "on the Cramer-von Mises distance")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master seed (or set RB2S_SEED)")
    common.add_argument("--a", default=None,
                        help="comma-separated concentration values, e.g. 1,10,20")
    common.add_argument("--config", default=None,
                        help="flat JSON config naming TestConfig fields")
    common.add_argument("--r1", type=int, default=None, help="prior draws")
    common.add_argument("--r2", type=int, default=None, help="posterior draws")
    common.add_argument("--n-atoms", dest="n_atoms", type=int, default=None,
                        help="series truncation per measure draw")
    common.add_argument("--n-bins", dest="n_bins", type=int, default=None,
                        help="prior-quantile bins")
    common.add_argument("--zero-bins", dest="zero_bins", type=int, default=None,
                        help="leading bins forming the zero region")
    common.add_argument("--n-perm", dest="n_perm", type=int, default=1999,
                        help="permutation count for the baseline p-value")
    common.add_argument("--workers", type=int, default=1,
                        help="parallel chunk workers (results are identical)")
    common.add_argument("--json", default=None, help="write machine-readable JSON here")

    t = sub.add_parser("test", parents=[common],
                       help="run the two-sample test on two data files")
    t.add_argument("--x", required=True, help="first sample file")
    t.add_argument("--y", required=True, help="second sample file")
    t.add_argument("--emit-density", default=None,
                   help="write distance density CSV (lowest concentration)")
    t.add_argument("--unsafe-base-x", default=None,
                   help="override the x-side base measure (conflict demo only)")
    t.add_argument("--unsafe-base-y", default=None,
                   help="override the y-side base measure (conflict demo only)")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", parents=[common],
                       help="run catalog cases on freshly simulated samples")
    s.add_argument("--catalog", default=None, help="table1, table2, or table3")
    s.add_argument("--case", default=None,
                   help='single case as "dist|dist|n1|n2"')
    s.add_argument("--reps", type=int, default=20, help="replications per case")
    s.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, DistParseError, DegenerateSamplesError, ValueError) as exc:
        print(f"rb2s: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
