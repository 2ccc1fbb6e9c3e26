"""Command-line interface.

Subcommands
-----------
stat      one statistic from a CSV file, printed with 10 significant digits
test      one hypothesis test from a CSV file, printed as a one-row CSV
simulate  rejection-rate study for a case (1..5) or the filtering study (6)
filter    the 400-predictor filtering study
bench     wall-clock timings of the statistics and permutation tests

Results go to stdout or --out; diagnostics and errors go to stderr. Exit code
0 means the command completed; argparse usage errors exit 2, everything else
(bad data, bad config) exits 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
import zlib
from dataclasses import replace

import numpy as np

from . import _fast
from .dcor import dcor_bias_corrected, dcor_biased_sq
from .distributions import as_spec
from .exceptions import ConfigError, DataError, DcorkitError
from .inference import (dcor_test_asymptotic, dcor_test_permutation,
                        pdcor_test_asymptotic, pdcor_test_permutation)
from .pdcor import pdcor
from .pearson import partial_pearson, pearson_corr, pearson_test
from .rng import RngStream, derive_seed
from .simulation import (FILTER_KEYS, METHODS, run_case, run_filtering,
                         scenarios_for_case)

_FULL_GRID = (50, 100, 200, 500, 1000, 2000, 5000, 10000)
_DEFAULT_GRID = {
    1: _FULL_GRID, 2: _FULL_GRID, 3: _FULL_GRID, 4: _FULL_GRID,
    5: tuple(range(50, 501, 50)),
    6: (100, 200, 300, 500, 1000),
}
_DEFAULT_REPS = {1: 1000, 2: 1000, 3: 500, 4: 500, 5: 500, 6: 50}


def _fmt(v, digits: int = 6) -> str:
    if isinstance(v, float):
        return f"{v:.{digits}g}"
    return str(v)


def _read_columns(path: str, names: list[str]) -> list[np.ndarray]:
    """Read named numeric columns from a headered CSV file."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        indices = []
        for nm in names:
            if nm not in header:
                raise DataError(f"{path}: no column {nm!r}; available: {', '.join(header)}")
            indices.append(header.index(nm))
        cols: list[list[float]] = [[] for _ in names]
        for ln, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            for out, i, nm in zip(cols, indices, names):
                if i >= len(row) or not row[i].strip():
                    raise DataError(f"{path}:{ln}: missing value in column {nm!r}")
                try:
                    v = float(row[i])
                except ValueError:
                    raise DataError(f"{path}:{ln}: cannot parse {row[i]!r} in column {nm!r}") from None
                if not math.isfinite(v):
                    raise DataError(f"{path}:{ln}: non-finite value in column {nm!r}")
                out.append(v)
    if not cols[0]:
        raise DataError(f"{path}: no data rows")
    return [np.asarray(c, dtype=np.float64) for c in cols]


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _rows_to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _rows_to_json(header: list[str], rows: list[list]) -> str:
    return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"


def _emit(header: list[str], rows: list[list], fmt: str, out: str | None) -> None:
    if fmt == "json":
        _write_text(_rows_to_json(header, rows), out)
    else:
        _write_text(_rows_to_csv(header, rows), out)


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"cannot parse integer list {text!r}") from None
    if not vals:
        raise ConfigError(f"empty integer list {text!r}")
    return vals


def _z_columns(arg: str | None) -> list[str]:
    if arg is None:
        return []
    return [c.strip() for c in arg.split(",") if c.strip()]


def _cmd_stat(args) -> int:
    znames = _z_columns(args.z)
    data = _read_columns(args.input, [args.x, args.y] + znames)
    x, y, zcols = data[0], data[1], data[2:]
    kind = args.kind
    if kind in ("partial_pearson", "pdcor") and not zcols:
        raise ConfigError(f"--kind {kind} needs --z")
    if kind not in ("partial_pearson",) and len(zcols) > 1:
        raise ConfigError(f"--kind {kind} takes at most one z column")

    degenerate = False
    if kind == "pearson":
        est = pearson_corr(x, y)
        value, degenerate = est.r, est.degenerate
    elif kind == "partial_pearson":
        est = partial_pearson(x, y, zcols)
        value, degenerate = est.r, est.degenerate
    elif kind == "dcor_biased":
        est = dcor_biased_sq(x, y)
        value, degenerate = est.value, est.degenerate
    elif kind == "dcor_bc":
        est = dcor_bias_corrected(x, y)
        value, degenerate = est.value, est.degenerate
    else:
        est = pdcor(x, y, zcols[0])
        value, degenerate = est.value, est.degenerate
    if degenerate:
        print("warning: degenerate sample (zero distance variance); statistic set to 0",
              file=sys.stderr)
    sys.stdout.write(f"{value:.10g}\n")
    return 0


def _cmd_test(args) -> int:
    znames = _z_columns(args.z)
    if len(znames) > 1:
        raise ConfigError("test takes at most one z column")
    data = _read_columns(args.input, [args.x, args.y] + znames)
    x, y = data[0], data[1]
    z = data[2] if znames else None

    if args.method == "perm":
        rng = RngStream(args.seed)
        if z is None:
            res = dcor_test_permutation(x, y, args.perms, rng)
        else:
            res = pdcor_test_permutation(x, y, z, args.perms, rng)
    elif args.method == "asymp":
        res = dcor_test_asymptotic(x, y) if z is None else pdcor_test_asymptotic(x, y, z)
    else:
        est = pearson_corr(x, y) if z is None else partial_pearson(x, y, [z])
        res = pearson_test(est)

    header = ["method", "statistic", "p_value", "n_permutations", "seed"]
    row = [res.method, _fmt(res.statistic, 10), _fmt(res.p_value, 10),
           res.n_permutations, res.seed]
    _emit(header, [row], "csv", None)
    return 0


# Flag spellings accepted as config keys alongside the canonical names.
_CONFIG_ALIASES = {"n": "n_grid", "reps": "replications", "perms": "permutations"}
_CONFIG_KEYS = frozenset({"case", "n_grid", "replications", "alpha", "permutations",
                          "seed", "threads", "pairs", "x_dist", "y_dist", "z_dist"})


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot open config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    # A misspelled key silently reverting to a default grid turns a small run
    # into an hours-long one, so unknown keys are errors.
    out = {}
    for key, value in cfg.items():
        canon = _CONFIG_ALIASES.get(key, key)
        if canon not in _CONFIG_KEYS:
            known = ", ".join(sorted(_CONFIG_KEYS | set(_CONFIG_ALIASES)))
            raise ConfigError(f"unknown config key {key!r} in {path}; known keys: {known}")
        if canon in out:
            raise ConfigError(f"config {path} sets {canon!r} more than once")
        out[canon] = value
    return out


def _config_grid(value) -> tuple[int, ...]:
    if isinstance(value, str):
        return _parse_int_list(value)
    if isinstance(value, bool):
        raise ConfigError(f"cannot read sample sizes from {value!r}")
    if isinstance(value, int):
        return (value,)
    try:
        return tuple(int(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"cannot read sample sizes from {value!r}") from None


def _config_scalar(cfg: dict, key: str, default, conv):
    if key not in cfg:
        return default
    try:
        return conv(cfg[key])
    except (TypeError, ValueError):
        raise ConfigError(f"config key {key!r} has unusable value {cfg[key]!r}") from None


def _rate_rows(report, run_seed: int) -> list[list]:
    rows = []
    for method in METHODS:
        for i, n in enumerate(report.n_grid):
            rate = report.counts[method][i] / report.replications
            se = math.sqrt(rate * (1.0 - rate) / report.replications)
            rows.append([report.case, report.x_label, report.y_label, method, n,
                         _fmt(rate), _fmt(se), report.replications, run_seed])
    return rows


_RATE_HEADER = ["case", "x_dist", "y_dist", "method", "n", "rate", "se",
                "replications", "seed"]
_FILTER_HEADER = ["n"] + list(FILTER_KEYS) + ["replications", "seed"]


def _filter_rows(report, run_seed: int) -> list[list]:
    rows = []
    for i, n in enumerate(report.n_grid):
        rows.append([n] + [_fmt(report.mean_counts[k][i]) for k in FILTER_KEYS]
                    + [report.replications, run_seed])
    return rows


def _run_filter_study(n_grid, reps, alpha, perms, seed, threads, fmt, out) -> int:
    report = run_filtering(n_grid=n_grid, replications=reps, alpha=alpha,
                           permutations=perms, seed=derive_seed(seed, 6),
                           threads=threads)
    _emit(_FILTER_HEADER, _filter_rows(report, seed), fmt, out)
    return 0


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config) if args.config else {}
    case = args.case if args.case is not None else cfg.get("case")
    if case is None:
        raise ConfigError("simulate needs --case (or 'case' in the config file)")
    case = int(case)
    if case not in (1, 2, 3, 4, 5, 6):
        raise ConfigError(f"case must lie in 1..6, got {case}")

    n_grid = (_parse_int_list(args.n) if args.n
              else _config_grid(cfg["n_grid"]) if "n_grid" in cfg
              else _DEFAULT_GRID[case])
    reps = (args.reps if args.reps is not None
            else _config_scalar(cfg, "replications", _DEFAULT_REPS[case], int))
    alpha = args.alpha if args.alpha is not None else _config_scalar(cfg, "alpha", 0.05, float)
    perms = args.perms if args.perms is not None else _config_scalar(cfg, "permutations", 500, int)
    seed = args.seed if args.seed is not None else _config_scalar(cfg, "seed", 0, int)
    threads = args.threads if args.threads is not None else _config_scalar(cfg, "threads", 1, int)

    if case == 6:
        return _run_filter_study(n_grid, reps, alpha, perms, seed, threads,
                                 args.format, args.out)

    pairs = None
    if args.pairs:
        pairs = [p.strip() for p in args.pairs.split(",") if p.strip()]
    elif cfg.get("pairs"):
        pairs = list(cfg["pairs"])

    scenarios = scenarios_for_case(case, n_grid, reps, alpha, perms, 0, pairs)
    overrides = {}
    for key, field_name in (("x_dist", "x_dist"), ("y_dist", "y_dist"), ("z_dist", "z_dist")):
        if key in cfg:
            overrides[field_name] = as_spec(cfg[key])
    if overrides:
        if len(scenarios) > 1 and ("x_dist" in overrides or "y_dist" in overrides):
            raise ConfigError("x_dist/y_dist overrides need --pairs narrowing to one scenario")
        scenarios = [replace(s, **overrides) for s in scenarios]

    rows = []
    for scen in scenarios:
        # Scenario seeds hang off the run seed and the scenario identity, so
        # a narrowed rerun reproduces the same rows.
        scen = replace(scen, seed=derive_seed(seed, scen.case, zlib.crc32(scen.label.encode())))
        report = run_case(scen, threads=threads)
        rows.extend(_rate_rows(report, seed))
        print(f"[simulate] {scen.label} done "
              f"({len(scen.n_grid)} sizes x {scen.replications} replications)",
              file=sys.stderr)
    _emit(_RATE_HEADER, rows, args.format, args.out)
    return 0


def _cmd_filter(args) -> int:
    n_grid = _parse_int_list(args.n) if args.n else _DEFAULT_GRID[6]
    reps = args.reps if args.reps is not None else _DEFAULT_REPS[6]
    return _run_filter_study(n_grid, reps, args.alpha, args.perms, args.seed,
                             args.threads if args.threads is not None else 1,
                             args.format, args.out)


def _time_call(fn, min_time: float = 0.05, max_reps: int = 50) -> float:
    best = math.inf
    spent = 0.0
    reps = 0
    while True:
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = min(best, dt)
        spent += dt
        reps += 1
        if spent >= min_time or reps >= max_reps:
            return best


def _cmd_bench(args) -> int:
    n_grid = _parse_int_list(args.n) if args.n else (100, 1000, 10000)
    perms = args.perms
    _fast.warmup()
    rows = []
    for idx, n in enumerate(n_grid):
        g = RngStream(args.seed, idx).generator()
        x = g.standard_normal(n)
        y = g.standard_normal(n)
        z = g.standard_normal(n)
        single = [
            ("dcor", lambda: dcor_bias_corrected(x, y)),
            ("pdcor", lambda: pdcor(x, y, z)),
        ]
        for name, fn in single:
            rows.append([n, name, _fmt(_time_call(fn)), 0, args.seed])
        perm_rng = RngStream(args.seed, 1000 + idx)
        tests = [
            ("dcor_perm_test", lambda: dcor_test_permutation(x, y, perms, perm_rng)),
            ("pdcor_perm_test", lambda: pdcor_test_permutation(x, y, z, perms, perm_rng)),
        ]
        for name, fn in tests:
            rows.append([n, name, _fmt(_time_call(fn)), perms, args.seed])
        print(f"[bench] n={n} done", file=sys.stderr)
    _emit(["n", "operation", "seconds", "permutations", "seed"], rows,
          args.format, args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcorkit",
        description="Distance-correlation dependence tests and Monte-Carlo studies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_stat = sub.add_parser("stat", help="compute one statistic from a CSV file")
    p_stat.add_argument("--input", required=True, help="CSV file with a header row")
    p_stat.add_argument("--x", required=True, help="column name for x")
    p_stat.add_argument("--y", required=True, help="column name for y")
    p_stat.add_argument("--z", help="conditioning column(s), comma separated")
    p_stat.add_argument("--kind", required=True,
                        choices=["pearson", "partial_pearson", "dcor_biased",
                                 "dcor_bc", "pdcor"])
    p_stat.set_defaults(func=_cmd_stat)

    p_test = sub.add_parser("test", help="run one hypothesis test from a CSV file")
    p_test.add_argument("--input", required=True)
    p_test.add_argument("--x", required=True)
    p_test.add_argument("--y", required=True)
    p_test.add_argument("--z", help="conditioning column (partial tests)")
    p_test.add_argument("--method", required=True, choices=["perm", "asymp", "pearson"])
    p_test.add_argument("--perms", type=int, default=500)
    p_test.add_argument("--seed", type=int, default=0)
    p_test.set_defaults(func=_cmd_test)

    p_sim = sub.add_parser("simulate", help="rejection-rate or filtering study")
    p_sim.add_argument("--case", type=int, choices=range(1, 7))
    p_sim.add_argument("--n", help="sample sizes, comma separated")
    p_sim.add_argument("--reps", type=int)
    p_sim.add_argument("--alpha", type=float)
    p_sim.add_argument("--perms", type=int)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--pairs", help="scenario labels like Be-M2N (case 4: driver labels)")
    p_sim.add_argument("--config", help="JSON file; flag keys (n, reps, perms, ...) "
                       "or long names (n_grid, replications, permutations), plus "
                       "x_dist/y_dist/z_dist overrides")
    p_sim.add_argument("--threads", type=int)
    p_sim.add_argument("--format", choices=["csv", "json"], default="csv")
    p_sim.add_argument("--out", help="output file (default stdout)")
    p_sim.set_defaults(func=_cmd_simulate)

    p_filt = sub.add_parser("filter", help="400-predictor filtering study")
    p_filt.add_argument("--n", help="sample sizes, comma separated")
    p_filt.add_argument("--reps", type=int)
    p_filt.add_argument("--alpha", type=float, default=0.05)
    p_filt.add_argument("--perms", type=int, default=500)
    p_filt.add_argument("--seed", type=int, default=0)
    p_filt.add_argument("--threads", type=int)
    p_filt.add_argument("--format", choices=["csv", "json"], default="csv")
    p_filt.add_argument("--out")
    p_filt.set_defaults(func=_cmd_filter)

    p_bench = sub.add_parser("bench", help="time the statistics and permutation tests")
    p_bench.add_argument("--n", help="sample sizes, comma separated")
    p_bench.add_argument("--perms", type=int, default=500)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--format", choices=["csv", "json"], default="csv")
    p_bench.add_argument("--out")
    p_bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DcorkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
