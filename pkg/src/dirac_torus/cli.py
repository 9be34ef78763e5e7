"""Command-line front end.

    dirac-torus <command> [--config FILE] [--out DIR] [--threads K] [--tolerance X]

Commands: spectrum, hill-compare, commutator, growth, example1d.  Results go
to CSV/JSON/plot-data files in ``--out``; stdout gets one summary line and
stderr any diagnostics.  Exit codes: 0 success, 2 bad configuration,
3 numerical failure, 4 a regression tolerance was exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import config as configmod
from .circle import growth_sequence
from .dirac import assemble_block, block_spectrum, inverse_norm_report
from .errors import ConfigError, NotADiffeomorphism, NumericalFailure, RationalRotation
from .export import write_csv, write_json, write_plot_data
from .fredholm import (
    FredholmContext,
    circle_example,
    circle_general,
    connes_bound,
    connes_operator,
)
from .hill import ComparisonRow, hill_compare

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_TOLERANCE = 0, 2, 3, 4


class Outcome:
    """Files to write plus the summary line and exit code of a command."""

    def __init__(self):
        self.files = []       # (writer, filename, payload...)
        self.summary = ""
        self.code = EXIT_OK

    def add(self, writer, name, *payload):
        self.files.append((writer, name, payload))


def _threads(args) -> int:
    if args.threads:
        return max(1, args.threads)
    env = os.environ.get("DIRAC_TORUS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"DIRAC_TORUS_THREADS must be an integer, got {env!r}")
    return 1


def _map(fn, items, threads: int):
    """Ordered map, optionally over a thread pool (results keep input order)."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ------------------------------------------------------------------ commands

def cmd_spectrum(cfg, args) -> Outcome:
    f = cfg.diffeo()
    eta, M = cfg.etas[0], cfg.M
    threads = _threads(args)
    reports = _map(lambda n: block_spectrum(assemble_block(f, n, M, eta, cfg.variant)),
                   cfg.levels, threads)
    rows, plot, js = [], [], []
    for rep in reports:
        order = np.argsort(rep.eigenvalues)
        for j in order:
            rows.append((rep.n, float(rep.eigenvalues[j]), rep.method, float(rep.residuals[j])))
            plot.append(rep.eigenvalues[j])
        js.append({"n": rep.n, "M": rep.M, "eta": rep.eta, "method": rep.method,
                   "eigenvalues": [float(x) for x in rep.eigenvalues[order]],
                   "residuals": [float(x) for x in rep.residuals[order]]})
    nonzero = [n for n in cfg.levels if n != 0]
    inv = inverse_norm_report(f, nonzero, M, eta) if nonzero else []
    out = Outcome()
    out.add(write_csv, "spectrum.csv", ("n", "lambda", "method", "residual"), rows)
    out.add(write_json, "spectrum.json", {"variant": cfg.variant, "blocks": js})
    out.add(write_plot_data, "spectrum.dat", plot)
    out.add(write_csv, "inverse_norms.csv", ("n", "inverse_norm", "bound", "bound_satisfied"),
            [(r.n, r.inverse_norm, r.bound, r.bound_satisfied) for r in inv])
    held = sum(r.bound_satisfied for r in inv)
    out.summary = (f"spectrum: {len(reports)} blocks, {len(rows)} eigenvalues; "
                   f"inverse-norm bound holds on {held}/{len(inv)} levels")
    return out


def cmd_hill_compare(cfg, args) -> Outcome:
    f = cfg.diffeo()
    tol = args.tolerance if args.tolerance is not None else (cfg.tolerance or 1e-5)
    threads = _threads(args)
    tasks = [(eta, n) for eta in cfg.etas for n in cfg.levels]

    def run(task, printed=False):
        eta, n = task
        return hill_compare(f, n, eta, cfg.M, cfg.count, cfg.steps, printed)

    def to_rows(tables):
        return [tuple(getattr(r, k) for k in ComparisonRow.CSV_FIELDS)
                for table in tables for r in table]

    tables = _map(run, tasks, threads)
    rows = to_rows(tables)
    worst = max((r.rel_gap for t in tables for r in t), default=0.0)
    out = Outcome()
    out.add(write_csv, "hill_compare.csv", ComparisonRow.CSV_FIELDS, rows)
    note = ""
    if cfg.printed_coefficient:
        printed = _map(lambda t: run(t, True), tasks, threads)
        out.add(write_csv, "hill_compare_printed.csv", ComparisonRow.CSV_FIELDS, to_rows(printed))
        pworst = max((r.rel_gap for t in printed for r in t), default=0.0)
        note = f"; without factor n max rel_gap {pworst:.3e}"
    out.code = EXIT_OK if worst <= tol else EXIT_TOLERANCE
    verdict = "ok" if out.code == EXIT_OK else "TOLERANCE EXCEEDED"
    out.summary = (f"hill-compare: {len(rows)} rows, max rel_gap {worst:.3e} "
                   f"(tolerance {tol:.1e}) {verdict}{note}")
    return out


def cmd_commutator(cfg, args) -> Outcome:
    f = cfg.diffeo()
    tol = args.tolerance if args.tolerance is not None else (cfg.tolerance or 1e-7)
    summary_rows, sv_rows, js = [], [], []
    worst = 0.0
    for M in cfg.Ms:
        for eta in cfg.etas:
            ctx = FredholmContext(f, cfg.N, M, eta)
            for name, A in zip(cfg.element_names, cfg.elements):
                rep = ctx.commutator(A)
                worst = max(worst, rep.gap)
                summary_rows.append((name, M, eta, rep.gap, rep.norm_A,
                                     rep.norm_derivation, rep.triple_norm))
                sv_rows.extend((name, M, eta, j, float(s))
                               for j, s in enumerate(rep.singular_values))
                js.append({"element": name, **rep.to_dict()})
    out = Outcome()
    out.add(write_csv, "commutator.csv",
            ("element", "M", "eta", "gap", "norm_A", "norm_derivation", "triple_norm"),
            summary_rows)
    out.add(write_csv, "singular_values.csv", ("element", "M", "eta", "index", "sigma"), sv_rows)
    out.add(write_json, "commutator.json", js)
    if sv_rows:
        first = [r[4] for r in sv_rows if r[:3] == sv_rows[0][:3]]
        out.add(write_plot_data, "singular_values.dat", first)
    out.code = EXIT_OK if worst <= tol else EXIT_TOLERANCE
    out.summary = (f"commutator: {len(summary_rows)} runs, max gap {worst:.3e} "
                   f"(tolerance {tol:.1e}) {'ok' if out.code == EXIT_OK else 'TOLERANCE EXCEEDED'}")
    return out


def cmd_growth(cfg, args) -> Outcome:
    f = cfg.diffeo()
    table = growth_sequence(f, cfg.n_max, cfg.grid_size)
    rows = [(n, table.entries[n], table.gaps[n]) for n in range(cfg.n_max + 1)]
    out = Outcome()
    out.add(write_csv, "growth.csv", ("n", "gamma", "refinement_gap"), rows)
    out.add(write_plot_data, "growth.dat", [r[1] for r in rows])
    out.summary = (f"growth: n = 0..{cfg.n_max}, max gamma {max(r[1] for r in rows):.6g}, "
                   f"max refinement gap {max(r[2] for r in rows):.3e}")
    return out


def _matrix_rows(ex):
    return [(int(k), *[float(v) for v in row]) for k, row in zip(ex.frequencies, ex.matrix)]


def cmd_example1d(cfg, args) -> Outcome:
    tol = args.tolerance if args.tolerance is not None else (cfg.tolerance or 1e-12)
    l, K = cfg.l, cfg.K
    deformed = circle_example(l, K, True)
    plain = circle_example(l, K, False)
    dev_def = float(np.abs(circle_general(l, K, True) - deformed.matrix).max())
    dev_plain = float(np.abs(circle_general(l, K, False) - plain.matrix).max())
    rng = np.random.default_rng(cfg.seed)
    connes = []
    for _ in range(cfg.polys):
        degree = int(rng.integers(1, 6))
        poly = {j: complex(rng.normal(), rng.normal()) for j in range(-degree, degree + 1) if j}
        norm = float(np.linalg.norm(connes_operator(poly, max(K, degree + 2)), 2))
        connes.append({"degree": degree, "norm": norm, "bound": connes_bound(poly),
                       "holds": norm <= connes_bound(poly) * (1 + 1e-12)})
    header = ("row_freq", *[int(k) for k in deformed.frequencies])
    out = Outcome()
    out.add(write_csv, "example1d_deformed.csv", header, _matrix_rows(deformed))
    out.add(write_csv, "example1d_undeformed.csv", header, _matrix_rows(plain))
    out.add(write_json, "example1d.json", {
        "l": l, "K": K, "deviation_deformed": dev_def, "deviation_undeformed": dev_plain,
        "undeformed_rank": plain.rank, "expected_rank": max(abs(l) - 1, 0), "connes": connes})
    ok = max(dev_def, dev_plain) <= tol and all(c["holds"] for c in connes)
    out.code = EXIT_OK if ok else EXIT_TOLERANCE
    out.summary = (f"example1d: l={l} K={K}, max deviation {max(dev_def, dev_plain):.1e}, "
                   f"undeformed rank {plain.rank}, Connes bound held "
                   f"{sum(c['holds'] for c in connes)}/{len(connes)}")
    return out


COMMANDS = {
    "spectrum": cmd_spectrum,
    "hill-compare": cmd_hill_compare,
    "commutator": cmd_commutator,
    "growth": cmd_growth,
    "example1d": cmd_example1d,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirac-torus", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key-value run configuration file")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (fallback: DIRAC_TORUS_THREADS, else 1)")
        p.add_argument("--tolerance", type=float, default=None,
                       help="regression tolerance overriding the config value")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    name = args.command
    try:
        cfg = configmod.load(args.config)
        _threads(args)
    except (ConfigError, NotADiffeomorphism, RationalRotation, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        print(f"{name}: failed (configuration error)")
        return EXIT_CONFIG
    try:
        outcome = COMMANDS[name](cfg, args)
    except NumericalFailure as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        print(f"{name}: failed (numerical failure)")
        return EXIT_NUMERICAL
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        print(f"{name}: failed (configuration error)")
        return EXIT_CONFIG
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for writer, filename, payload in outcome.files:
        writer(out_dir / filename, *payload)
    if outcome.code == EXIT_TOLERANCE:
        print("regression tolerance exceeded", file=sys.stderr)
    print(f"{outcome.summary} -> {out_dir}")
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
