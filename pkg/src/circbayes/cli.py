"""Command-line interface: ``fit``, ``simulate`` and ``zselect``.

Angles cross the boundary in degrees unless ``--unit radians`` is given;
everything inside the package is radians.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .circular import ConjugatePrior, GroupedAngles, posterior_params, wrap_angle
from .errors import CircBayesError, ConfigurationError, DatasetError
from .inference import summarize
from .samplers import METHODS, SamplerConfig, run_posterior
from .simulation import expand_design, grid_points, run_cell, write_results, z_selection_study

logger = logging.getLogger("circbayes")

UNITS = ("degrees", "radians")


def _to_rad(x, unit):
    return np.deg2rad(x) if unit == "degrees" else np.asarray(x, float)


def _from_rad(x, unit):
    return np.rad2deg(x) if unit == "degrees" else np.asarray(x, float)


def parse_dataset(path, unit: str = "degrees") -> GroupedAngles:
    """Read a CSV with header ``angle,group``.

    Groups are numbered in order of first appearance. Errors name the
    offending line.
    """
    if unit not in UNITS:
        raise ConfigurationError(f"unit must be one of {UNITS}")
    groups: dict[str, list] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = None
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
                continue
            if header is None:
                header = [c.strip().lower() for c in row]
                if header != ["angle", "group"]:
                    raise DatasetError(f"{path}:{lineno}: expected header 'angle,group', got {row}")
                continue
            if len(row) != 2:
                raise DatasetError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                angle = float(row[0])
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: angle {row[0]!r} is not a number") from None
            if not math.isfinite(angle):
                raise DatasetError(f"{path}:{lineno}: angle {row[0]!r} is not finite")
            label = row[1].strip()
            if not label:
                raise DatasetError(f"{path}:{lineno}: missing group label")
            groups.setdefault(label, []).append(angle)
    if header is None:
        raise DatasetError(f"{path}: file is empty")
    if not groups:
        raise DatasetError(f"{path}: no observations after the header")
    return GroupedAngles(tuple(_to_rad(g, unit) for g in groups.values()), tuple(groups))


def write_dataset(data: GroupedAngles, path, unit: str = "degrees") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["angle", "group"])
        for label, g in zip(data.labels, data.groups):
            for a in _from_rad(g, unit):
                w.writerow([repr(float(a)), label])


def _per_group(values, J, name):
    if values is None:
        return None
    if len(values) == 1:
        return list(values) * J
    if len(values) != J:
        raise ConfigurationError(f"{name} needs 1 or {J} values, got {len(values)}")
    return list(values)


def build_priors(args, J):
    mu0 = _per_group(args.prior_mu0, J, "--prior-mu0") or [0.0] * J
    r0 = _per_group(args.prior_r0, J, "--prior-r0") or [0.0] * J
    c = _per_group(args.prior_c, J, "--prior-c") or [0.0] * J
    return [ConjugatePrior(float(_to_rad(m, args.unit)), r, k) for m, r, k in zip(mu0, r0, c)]


def _remove(paths):
    for p in paths:
        try:
            os.remove(p)
        except FileNotFoundError:
            pass


def fit_command(args) -> int:
    out = Path(args.output)
    trace_path, summary_path = out / "trace.csv", out / "summary.json"
    try:
        data = parse_dataset(args.input, args.unit)
        priors = build_priors(args, data.J)
        seed = args.seed if args.seed is not None else int(np.random.SeedSequence().entropy % 2**63)
        mu_start = _per_group(args.mu_start, data.J, "--mu-start") or [0.0]
        config = SamplerConfig(
            iterations=args.iterations, lag=args.lag, burn_in=args.burn_in,
            kappa_start=args.kappa_start, mu_start=tuple(float(x) for x in _to_rad(mu_start, args.unit)),
            w_start=args.w_start, Z=args.z,
        )
        echo = {
            "command": "fit",
            "input": str(args.input),
            "unit": args.unit,
            "method": args.method,
            "seed": seed,
            "iterations": config.iterations,
            "lag": config.lag,
            "burn_in": config.burn_in,
            "kappa_start": config.kappa_start,
            "mu_start": list(mu_start),
            "w_start": config.w_start,
            "Z": config.Z,
            "prior": [{"mu0": float(_from_rad(p.mu0, args.unit)), "R0": p.R0, "c": p.c}
                      for p in priors],
            "groups": list(data.labels),
        }
        post = posterior_params(data, priors)
        trace = run_posterior(args.method, post, config, np.random.default_rng(seed))
        summ = summarize(trace)

        out.mkdir(parents=True, exist_ok=True)
        with open(trace_path, "w", newline="") as fh:
            fh.write("# " + json.dumps(echo, sort_keys=True) + "\n")
            fh.write(",".join(["iter"] + [f"mu_{j + 1}" for j in range(data.J)] + ["kappa"]) + "\n")
            mu_deg = np.rad2deg(trace.mu_draws)
            for i in range(trace.Q):
                cells = [str(i + 1)] + [f"{v:.6f}" for v in mu_deg[i]] + [repr(float(trace.kappa_draws[i]))]
                fh.write(",".join(cells) + "\n")

        def ang(x):
            return None if x is None or math.isnan(x) else float(_from_rad(x, args.unit))

        summary = {
            "config": echo,
            "mu": [
                {
                    "group": label,
                    "mean_direction": ang(m),
                    "cci95": None if ci is None else {
                        "lower": ang(ci.lower), "upper": ang(ci.upper), "width": ang(ci.width)},
                }
                for label, m, ci in zip(data.labels, summ.mu_mean, summ.mu_cci)
            ],
            "kappa": {
                "mode": summ.kappa_mode,
                "hdi95": {"lower": summ.kappa_hdi95.lower, "upper": summ.kappa_hdi95.upper},
            },
            "acceptance_rate": summ.acceptance,
            "wall_time_seconds": summ.wall_time,
        }
        if args.method == "gibbs":
            summary["max_selected_k"] = trace.max_selected_k
        with open(summary_path, "w") as fh:
            json.dump(summary, fh, indent=2)
    except (CircBayesError, OSError, ValueError) as exc:
        _remove([trace_path, summary_path])
        print(f"circbayes fit: error: {exc}", file=sys.stderr)
        return 1
    except BaseException:
        _remove([trace_path, summary_path])
        raise
    print(f"wrote {trace_path} and {summary_path}")
    return 0


def simulate_command(args) -> int:
    try:
        with open(args.design) as fh:
            doc = json.load(fh)
        designs, excluded = expand_design(doc)
        for d in excluded:
            logger.warning("dropping Gibbs from cell J=%s n=%s kappa=%s (infeasible)",
                           d["J"], d["n_per_group"], d["kappa_true"])
        results = []
        for d in designs:
            logger.info("cell J=%s n=%s kappa=%s methods=%s", d.J, d.n_per_group, d.kappa_true,
                        ",".join(d.methods))
            results.append(run_cell(d, workers=args.workers))
        meta = {"design_file": str(args.design), "design": doc, "excluded": excluded}
        csv_path, json_path = write_results(results, args.output, meta)
    except (CircBayesError, OSError, ValueError, KeyError) as exc:
        print(f"circbayes simulate: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {csv_path} and {json_path}")
    return 0


def zselect_command(args) -> int:
    try:
        with open(args.grid) as fh:
            grid = grid_points(json.load(fh))
        rows = z_selection_study(grid, datasets=args.datasets, iterations=args.iterations,
                                 z_cap=args.z_cap, burn_in=args.burn_in, seed=args.seed,
                                 workers=args.workers)
        meta = {"grid_file": str(args.grid), "datasets": args.datasets,
                "iterations": args.iterations, "burn_in": args.burn_in,
                "z_cap": args.z_cap, "seed": args.seed}
        text = "# " + json.dumps(meta) + "\nJ,n_per_group,kappa,max_k\n" + "".join(
            f"{r.J},{r.n_per_group},{r.kappa_true},{r.max_k}\n" for r in rows)
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
    except (CircBayesError, OSError, ValueError, KeyError) as exc:
        print(f"circbayes zselect: error: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="circbayes",
                                description="Bayesian inference for grouped von Mises data.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="sample the posterior for a dataset")
    f.add_argument("--input", required=True, help="CSV with header angle,group")
    f.add_argument("--output", default=".", help="directory for trace.csv and summary.json")
    f.add_argument("--unit", choices=UNITS, default="degrees")
    f.add_argument("--method", choices=METHODS, required=True)
    f.add_argument("--iterations", type=int, default=10_000)
    f.add_argument("--lag", type=int, default=1)
    f.add_argument("--burn-in", type=int, default=None, help="default 500 * lag")
    f.add_argument("--seed", type=int, default=None)
    f.add_argument("--prior-mu0", type=float, nargs="+", help="one value or one per group")
    f.add_argument("--prior-r0", type=float, nargs="+")
    f.add_argument("--prior-c", type=float, nargs="+")
    f.add_argument("--kappa-start", type=float, default=2.0)
    f.add_argument("--mu-start", type=float, nargs="+", default=None)
    f.add_argument("--w-start", type=float, default=4.0)
    f.add_argument("--z", type=int, default=25)
    f.set_defaults(func=fit_command)

    s = sub.add_parser("simulate", help="run a simulation study from a design file")
    s.add_argument("--design", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    s.set_defaults(func=simulate_command)

    z = sub.add_parser("zselect", help="largest Gibbs series index selected over a grid")
    z.add_argument("--grid", required=True)
    z.add_argument("--z-cap", type=int, default=40)
    z.add_argument("--datasets", type=int, default=100)
    z.add_argument("--iterations", type=int, default=10_000)
    z.add_argument("--burn-in", type=int, default=500)
    z.add_argument("--seed", type=int, default=0)
    z.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    z.add_argument("--output", default=None, help="CSV path; stdout if omitted")
    z.set_defaults(func=zselect_command)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
