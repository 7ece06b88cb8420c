"""Simulation-study harness: dataset generation, replicated cells, Z selection.

Every replication draws its random numbers from streams keyed on
``(cell seed, replication index)``, so a cell's result does not depend on
how replications are spread over worker processes.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .circular import FLAT_PRIOR, GroupedAngles, circular_mean, posterior_params, sample_von_mises
from .errors import ConfigurationError, InfeasibleDesignError, ReplicationError
from .inference import PosteriorSummary, relative_bias, summarize
from .samplers import METHODS, SamplerConfig, run_posterior

logger = logging.getLogger(__name__)

GIBBS_KAPPA_LIMIT = 7.0

# Known Gibbs lags: 2 at (kappa 0.1, 10 observations), 250 at (kappa 4, 300).
_LAG_ANCHORS = ((0.1, 10, 2), (4.0, 300, 250))

LAG_SCHEDULE_NOTE = (
    "Gibbs lag interpolated geometrically between lag 2 at (kappa=0.1, N=10) and "
    "lag 250 at (kappa=4, N=300), N = total sample size; MH and rejection use lag 1. "
    "Burn-in is 500 * lag."
)


def default_true_means(J: int) -> tuple:
    return tuple(math.radians(20.0 * (j + 1)) for j in range(J))


@dataclass(frozen=True)
class CellDesign:
    """One (J, n, kappa) cell of the study and how to analyse it.

    ``true_means`` are radians (default 20, 40, 60, ... degrees). ``lags``
    overrides :func:`lag_schedule` per method.
    """

    J: int
    n_per_group: int
    kappa_true: float
    replications: int = 2000
    methods: tuple = METHODS
    true_means: tuple | None = None
    lags: dict = field(default_factory=dict)
    seed: int = 0
    iterations: int = 10_000
    kappa_start: float = 2.0
    mu_start: float = 0.0
    w_start: float = 4.0
    Z: int = 25

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "lags", dict(self.lags))
        if self.J < 1 or self.n_per_group < 1:
            raise ConfigurationError("J and n_per_group must be >= 1")
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")
        if not self.kappa_true >= 0:
            raise ConfigurationError("kappa_true must be non-negative")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ConfigurationError(f"unknown or missing methods: {bad}")
        if "gibbs" in self.methods and self.kappa_true > GIBBS_KAPPA_LIMIT:
            raise InfeasibleDesignError(
                f"Gibbs sampling is infeasible for kappa_true={self.kappa_true} "
                f"(> {GIBBS_KAPPA_LIMIT}); drop it from the methods"
            )
        if self.true_means is None:
            object.__setattr__(self, "true_means", default_true_means(self.J))
        object.__setattr__(self, "true_means", tuple(float(m) for m in self.true_means))
        if len(self.true_means) != self.J:
            raise ConfigurationError("one true mean per group is required")

    def lag(self, method: str) -> int:
        if method in self.lags:
            return int(self.lags[method])
        return lag_schedule(self, method)

    def sampler_config(self, method: str) -> SamplerConfig:
        return SamplerConfig(
            iterations=self.iterations, lag=self.lag(method), kappa_start=self.kappa_start,
            mu_start=self.mu_start, w_start=self.w_start, Z=self.Z,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["true_means_deg"] = [math.degrees(m) for m in d.pop("true_means")]
        d["methods"] = list(self.methods)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CellDesign":
        d = dict(d)
        if "true_means_deg" in d:
            d["true_means"] = tuple(math.radians(x) for x in d.pop("true_means_deg"))
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigurationError(f"unknown design fields: {sorted(extra)}")
        return cls(**d)


def lag_schedule(design: CellDesign, method: str) -> int:
    """Thinning lag for ``method`` in ``design``."""
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r}")
    if method != "gibbs":
        return 1
    if design.kappa_true > GIBBS_KAPPA_LIMIT:
        raise InfeasibleDesignError(
            f"Gibbs sampling is infeasible for kappa_true={design.kappa_true}"
        )
    (k0, n0, lag0), (k1, n1, lag1) = _LAG_ANCHORS
    N = design.J * design.n_per_group
    kappa = max(design.kappa_true, k0)
    t = 0.5 * (math.log(kappa / k0) / math.log(k1 / k0) + math.log(N / n0) / math.log(n1 / n0))
    t = min(1.0, max(0.0, t))
    return int(round(lag0 * (lag1 / lag0) ** t))


def _stream(seed: int, index: int, slot: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index), int(slot)]))


def generate_dataset(design: CellDesign, index: int, rng=None) -> GroupedAngles:
    """``n_per_group`` draws from VM(true_mean_j, kappa_true) for each group."""
    rng = rng if rng is not None else _stream(design.seed, index, 0)
    return GroupedAngles(tuple(
        sample_von_mises(mu, design.kappa_true, rng, size=design.n_per_group)
        for mu in design.true_means
    ))


def run_replication(design: CellDesign, index: int) -> dict:
    """Analyse replication ``index`` with every method. Returns method -> summary."""
    data = generate_dataset(design, index)
    post = posterior_params(data, FLAT_PRIOR)
    out = {}
    for slot, method in enumerate(design.methods, start=1):
        try:
            trace = run_posterior(method, post, design.sampler_config(method),
                                  _stream(design.seed, index, slot))
            out[method] = summarize(trace)
        except Exception as exc:
            raise ReplicationError(design.seed, index, method, exc) from exc
    return out


def _replication_job(args):
    return run_replication(*args)


@dataclass(frozen=True)
class MethodResult:
    """Averages over replications for one method in one cell.

    Angles are radians; ``mu_coverage`` is averaged over groups.
    """

    method: str
    lag: int
    replications: int
    mu_mean: tuple
    mu_coverage: float
    kappa_mode: float
    kappa_coverage: float
    kappa_relative_bias: float
    acceptance: float
    mct: float

    def as_row(self, design: CellDesign) -> dict:
        row = {
            "J": design.J,
            "n": design.n_per_group,
            "kappa": design.kappa_true,
            "method": self.method,
            "lag": self.lag,
            "replications": self.replications,
        }
        for j, m in enumerate(self.mu_mean, start=1):
            row[f"mu_{j}_mean_deg"] = round(math.degrees(m), 6)
        row.update(
            mu_coverage=self.mu_coverage,
            kappa_mode=self.kappa_mode,
            kappa_coverage=self.kappa_coverage,
            kappa_relative_bias=self.kappa_relative_bias,
            acceptance=self.acceptance,
            mct_seconds=self.mct,
        )
        return row


@dataclass(frozen=True)
class CellResult:
    design: CellDesign
    methods: dict

    def __getitem__(self, method: str) -> MethodResult:
        return self.methods[method]

    def rows(self) -> list:
        return [r.as_row(self.design) for r in self.methods.values()]


def aggregate(design: CellDesign, summaries: list) -> CellResult:
    """Reduce per-replication summaries (in replication order) into a cell result."""
    results = {}
    R = len(summaries)
    for method in design.methods:
        per = [s[method] for s in summaries]
        mu_mean = []
        for j in range(design.J):
            vals = np.array([p.mu_mean[j] for p in per])
            vals = vals[~np.isnan(vals)]
            mu_mean.append(circular_mean(vals) if vals.size else math.nan)
        mu_hits = [hit for p in per for hit in p.mu_covered(design.true_means)]
        kappa_mode = float(np.mean([p.kappa_mode for p in per]))
        results[method] = MethodResult(
            method=method,
            lag=design.lag(method),
            replications=R,
            mu_mean=tuple(mu_mean),
            mu_coverage=sum(mu_hits) / len(mu_hits),
            kappa_mode=kappa_mode,
            kappa_coverage=sum(p.kappa_covered(design.kappa_true) for p in per) / R,
            kappa_relative_bias=(relative_bias(kappa_mode, design.kappa_true)
                                 if design.kappa_true > 0 else math.nan),
            acceptance=float(np.mean([p.acceptance for p in per])),
            mct=float(np.mean([p.wall_time for p in per])),
        )
    return CellResult(design, results)


def _map(fn, jobs, workers):
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def run_cell(design: CellDesign, workers: int | None = 1) -> CellResult:
    """Generate and analyse ``design.replications`` datasets and aggregate."""
    jobs = [(design, i) for i in range(design.replications)]
    summaries = _map(_replication_job, jobs, workers)
    return aggregate(design, summaries)


# -- study design files ---------------------------------------------------------

def expand_design(spec: dict) -> tuple:
    """Turn a design document into cells.

    The document holds shared defaults plus either a ``grid`` (lists of
    ``J``, ``n_per_group``, ``kappa_true`` crossed factorially) or a list of
    explicit ``cells``. Gibbs is dropped from grid cells with kappa above the
    feasibility limit; those exclusions are returned alongside the cells.
    """
    spec = dict(spec)
    grid = spec.pop("grid", None)
    cells = spec.pop("cells", None)
    if (grid is None) == (cells is None):
        raise ConfigurationError("design needs exactly one of 'grid' or 'cells'")
    base_seed = int(spec.pop("seed", 0))
    designs, excluded = [], []
    if grid is not None:
        combos = itertools.product(grid["J"], grid["n_per_group"], grid["kappa_true"])
        cells = []
        for J, n, k in combos:
            methods = list(spec.get("methods", METHODS))
            if "gibbs" in methods and k > GIBBS_KAPPA_LIMIT:
                methods.remove("gibbs")
                excluded.append({"J": J, "n_per_group": n, "kappa_true": k, "method": "gibbs"})
            cells.append({"J": J, "n_per_group": n, "kappa_true": k, "methods": methods})
    for idx, cell in enumerate(cells):
        merged = {**spec, **cell}
        if "seed" not in cell:
            merged["seed"] = int(np.random.SeedSequence([base_seed, idx]).generate_state(1)[0])
        designs.append(CellDesign.from_dict(merged))
    return designs, excluded


def load_design(path) -> tuple:
    with open(path) as fh:
        return expand_design(json.load(fh))


def write_results(results: list, outdir, metadata: dict | None = None) -> tuple:
    """Write ``cells.csv`` and ``cells.json`` into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = [row for r in results for row in r.rows()]
    fields = []
    for row in rows:
        fields.extend(k for k in row if k not in fields)
    csv_path = outdir / "cells.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write("# " + json.dumps({"lag_schedule": LAG_SCHEDULE_NOTE, **(metadata or {})}) + "\n")
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    json_path = outdir / "cells.json"
    doc = {
        "metadata": {"lag_schedule": LAG_SCHEDULE_NOTE, **(metadata or {})},
        "cells": [
            {"design": r.design.to_dict(), "results": r.rows()} for r in results
        ],
    }
    with open(json_path, "w") as fh:
        json.dump(doc, fh, indent=2)
    return csv_path, json_path


# -- choosing Z ---------------------------------------------------------------

@dataclass(frozen=True)
class ZSelectionRow:
    J: int
    n_per_group: int
    kappa_true: float
    max_k: int


def _z_job(args):
    J, n, kappa, index, seed, iterations, burn_in, z_cap = args
    from .samplers import gibbs

    design = CellDesign(J, n, kappa, replications=1, methods=("mh",), seed=seed)
    data = generate_dataset(design, index)
    post = posterior_params(data, FLAT_PRIOR)
    cfg = SamplerConfig(iterations=iterations, lag=1, burn_in=burn_in, Z=z_cap)
    mu = cfg.mu_start_array(J)
    mu_out = np.empty((iterations, J))
    kappa_out = np.empty(iterations)
    return int(gibbs.gibbs_run(
        _stream(seed, index, 1), mu, cfg.kappa_start, cfg.w_start, post.kernel_mu_n(),
        np.ascontiguousarray(post.R_n), post.R_t, post.m_t, z_cap, gibbs._LOG_FACT_SQ,
        False, burn_in, iterations, 1, mu_out, kappa_out,
    ))


def z_selection_study(grid, datasets: int = 100, iterations: int = 10_000,
                      z_cap: int = 40, burn_in: int = 500, seed: int = 0,
                      workers: int | None = 1) -> list:
    """Largest index ``k`` ever selected as the minimum ``N_k`` by the Gibbs sampler.

    ``grid`` is an iterable of ``(J, n_per_group, kappa)`` triples. For each
    point, ``datasets`` datasets are analysed for ``iterations`` sweeps after
    ``burn_in``, with ``Z = z_cap``.
    """
    if z_cap < 1:
        raise ConfigurationError("z_cap must be >= 1")
    points = [tuple(p) for p in grid]
    rows = []
    for p_idx, (J, n, kappa) in enumerate(points):
        point_seed = int(np.random.SeedSequence([seed, p_idx]).generate_state(1)[0])
        jobs = [(J, n, kappa, i, point_seed, iterations, burn_in, z_cap) for i in range(datasets)]
        max_k = max(_map(_z_job, jobs, workers))
        rows.append(ZSelectionRow(int(J), int(n), float(kappa), max_k))
        logger.info("z-selection J=%s n=%s kappa=%s: max k = %s", J, n, kappa, max_k)
    return rows


def grid_points(spec) -> list:
    """Grid triples from a JSON-style spec: a dict of lists or a list of points."""
    if isinstance(spec, dict):
        return list(itertools.product(spec["J"], spec["n_per_group"], spec["kappa_true"]))
    return [(p["J"], p["n_per_group"], p["kappa_true"]) if isinstance(p, dict) else tuple(p)
            for p in spec]
