"""Monte Carlo power and size studies, and the coupling experiment.

Every random quantity is drawn from an :class:`RngStream` keyed by
``(seed, grid index, replicate, purpose)``, so a study is a pure function
of its :class:`StudySpec` whatever the number of worker threads.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import reference
from .bootstrap import EXPONENTIAL, NAIVE, SMOOTHED, BootstrapConfig, run_test
from .families import BumpFamily, DFamily, ExponentialModel, HazardModel, LinearizedModel
from .hazard import DegenerateIntervalError, SampleError, as_interval
from .rng import DATA, DEFAULT_SEED, RngStream
from .statistics import INTEGRAL, SUP, StatisticSpec, t_n_batch

log = logging.getLogger(__name__)

THREADS_ENV = "ISOHAZARD_THREADS"

# method name -> (bootstrap engine, statistic kind, stream purpose code)
METHODS = {
    "Tn_smoothed": (SMOOTHED, INTEGRAL, 1),
    "Tn_naive": (NAIVE, INTEGRAL, 2),
    "durot_sup": (EXPONENTIAL, SUP, 3),
    "durot_Tn": (EXPONENTIAL, INTEGRAL, 4),
}
FAMILIES = ("d", "bump", "exponential")
CSV_COLUMNS = (
    "method", "parameter", "n", "R", "B", "alpha", "interval_q", "reject_freq", "mc_se", "excluded",
)


def default_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class StudySpec:
    family: str = "d"
    grid: tuple = (-1.0,)
    grid_param: str = "d"
    fixed: dict = field(default_factory=dict)
    n: int = 50
    replicates: int = 500
    B: int = 500
    alpha: float = 0.1
    methods: tuple = ("Tn_smoothed", "durot_sup")
    interval_rule: str = "fixed"
    quantile: float = 0.95
    seed: int = DEFAULT_SEED
    p: float = 1.0
    bandwidth_constant: float = 1.0
    bandwidth_exponent: float = -0.25
    penalty_constant: float = 2.0
    reflect: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.replicates < 1 or self.B < 1 or self.n < 2:
            raise ValueError("need replicates >= 1, B >= 1 and n >= 2")
        if not 0 < self.quantile < 1:
            raise ValueError("quantile must lie in (0, 1)")
        if not self.methods:
            raise ValueError("at least one method is required")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods: {', '.join(unknown)}")
        if self.interval_rule not in ("fixed", "empirical"):
            raise ValueError("interval_rule must be 'fixed' or 'empirical'")
        if not self.grid:
            raise ValueError("the parameter grid is empty")
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(self, "methods", tuple(self.methods))

    def model(self, value) -> HazardModel:
        params = dict(self.fixed)
        params[self.grid_param] = value
        if self.family == "d":
            return DFamily(params["d"])
        if self.family == "bump":
            return BumpFamily(
                params.get("beta", 0.0), params.get("gamma", 0.0),
                params.get("mu", 1.0), params.get("sigma", 0.1),
            )
        return ExponentialModel(params.get("rate", 1.0))

    def bootstrap_config(self, method) -> BootstrapConfig:
        return BootstrapConfig(
            B=self.B, alpha=self.alpha, method=METHODS[method][0], seed=self.seed,
            bandwidth_constant=self.bandwidth_constant,
            bandwidth_exponent=self.bandwidth_exponent,
            penalty_constant=self.penalty_constant, reflect=self.reflect,
        )


@dataclass
class PowerCell:
    method: str
    parameter: float
    n: int
    R: int
    B: int
    alpha: float
    interval_q: float
    rejections: int
    excluded: int
    runtime: float = 0.0

    @property
    def valid(self):
        return self.R - self.excluded

    @property
    def reject_freq(self):
        return self.rejections / self.valid if self.valid else math.nan

    @property
    def mc_se(self):
        p = self.reject_freq
        return math.sqrt(p * (1 - p) / self.valid) if self.valid else math.nan

    def row(self):
        return {
            "method": self.method, "parameter": self.parameter, "n": self.n, "R": self.R,
            "B": self.B, "alpha": self.alpha, "interval_q": self.interval_q,
            "reject_freq": self.reject_freq, "mc_se": self.mc_se, "excluded": self.excluded,
        }


@dataclass
class PowerTable:
    spec: StudySpec
    cells: list
    kind: str = "power"

    def cell(self, method, parameter):
        for c in self.cells:
            if c.method == method and abs(c.parameter - parameter) < 1e-12:
                return c
        raise KeyError((method, parameter))

    def freq(self, method, parameter):
        return self.cell(method, parameter).reject_freq

    def curve(self, method):
        return [(c.parameter, c.reject_freq) for c in self.cells if c.method == method]

    def reference_rows(self):
        """Frozen reference values for designs matching this study (never computed)."""
        s = self.spec
        rows = []
        for name in reference.matching_designs(s.family, s.quantile, s.fixed, s.n, s.alpha):
            d = reference.DESIGNS[name]
            for label, values in d["rows"].items():
                for g, v in zip(d["grid"], values):
                    if any(abs(g - x) < 1e-12 for x in s.grid):
                        rows.append({"design": name, "test": label, "parameter": g,
                                     "reject_freq": v, "computed": False})
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for c in self.cells:
            r = c.row()
            r["reject_freq"] = f"{r['reject_freq']:.6f}"
            r["mc_se"] = f"{r['mc_se']:.6f}"
            w.writerow(r)
        return buf.getvalue()

    def to_json(self) -> str:
        spec = asdict(self.spec)
        spec["grid"] = list(spec["grid"])
        spec["methods"] = list(spec["methods"])
        doc = {
            "schema_version": 1,
            "kind": self.kind,
            "spec": spec,
            "rows": [c.row() for c in self.cells],
            "reference": self.reference_rows(),
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def curves_csv(self, method) -> str:
        lines = ["parameter,power"]
        lines += [f"{g!r},{p:.6f}" for g, p in self.curve(method)]
        return "\n".join(lines) + "\n"

    def write(self, prefix):
        """Write ``<prefix>.csv``, ``<prefix>.json`` and one ``<prefix>.<method>.curve.csv`` per method."""
        paths = [f"{prefix}.csv", f"{prefix}.json"]
        with open(paths[0], "w") as fh:
            fh.write(self.to_csv())
        with open(paths[1], "w") as fh:
            fh.write(self.to_json())
        for m in self.spec.methods:
            p = f"{prefix}.{m}.curve.csv"
            with open(p, "w") as fh:
                fh.write(self.curves_csv(m))
            paths.append(p)
        return paths


def _one_replicate(spec: StudySpec, gi, model, a_fixed, r):
    """Rejection flags (or ``None`` for an excluded replicate) for every method."""
    x = model.sample(spec.n, RngStream(spec.seed, gi, r, DATA))
    if a_fixed is None:
        a = x[max(math.ceil(spec.n * spec.quantile) - 1, 0)]
    else:
        a = a_fixed
    out = []
    for m in spec.methods:
        engine, kind, code = METHODS[m]
        stat = StatisticSpec(kind, spec.p if kind == INTEGRAL else 1.0)
        try:
            res = run_test(x, a, spec.bootstrap_config(m), stat, RngStream(spec.seed, gi, r, code))
            out.append(res.reject)
        except (DegenerateIntervalError, SampleError, ValueError) as exc:
            log.debug("replicate %d excluded for %s: %s", r, m, exc)
            out.append(None)
    return out


def run_power_study(spec: StudySpec, threads=None, progress=None, kind="power") -> PowerTable:
    """Rejection frequency of every method at every grid point."""
    threads = threads or default_threads()
    cells = []
    for gi, value in enumerate(spec.grid):
        t0 = time.perf_counter()
        model = spec.model(value)
        a_fixed = float(model.quantile(spec.quantile)) if spec.interval_rule == "fixed" else None
        reps = range(spec.replicates)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                flags = list(pool.map(lambda r: _one_replicate(spec, gi, model, a_fixed, r), reps))
        else:
            flags = [_one_replicate(spec, gi, model, a_fixed, r) for r in reps]
        elapsed = time.perf_counter() - t0
        for k, m in enumerate(spec.methods):
            col = [f[k] for f in flags]
            cell = PowerCell(
                method=m, parameter=value, n=spec.n, R=spec.replicates, B=spec.B,
                alpha=spec.alpha, interval_q=spec.quantile,
                rejections=sum(1 for v in col if v), excluded=sum(1 for v in col if v is None),
                runtime=elapsed,
            )
            cells.append(cell)
        if progress is not None:
            summary = ", ".join(f"{m}={cells[-len(spec.methods) + k].reject_freq:.3f}"
                                for k, m in enumerate(spec.methods))
            progress(f"{spec.grid_param}={value:g}: {summary} ({elapsed:.1f}s)")
    return PowerTable(spec, cells, kind)


def is_null_design(spec: StudySpec, value) -> bool:
    params = dict(spec.fixed)
    params[spec.grid_param] = value
    if spec.family == "d":
        return params["d"] >= 0
    if spec.family == "bump":
        return params.get("beta", 0.0) == 0.0 and params.get("gamma", 0.0) >= 0
    return True


def run_null_level_study(spec: StudySpec, threads=None, progress=None) -> PowerTable:
    """Same machinery as :func:`run_power_study`, restricted to null-hypothesis designs."""
    bad = [g for g in spec.grid if not is_null_design(spec, g)]
    if bad:
        raise ValueError(f"grid values outside the null hypothesis: {bad}")
    return run_power_study(spec, threads=threads, progress=progress, kind="size")


@dataclass
class CouplingReport:
    violations: int
    gaps: np.ndarray
    replicates: int
    excluded: int
    p: float

    @property
    def min_gap(self):
        return float(np.min(self.gaps)) if self.gaps.size else math.nan


def run_coupling_experiment(model: HazardModel, interval, n, R, seed=DEFAULT_SEED, p=1.0,
                            tol=1e-12) -> CouplingReport:
    """Check ``T_n(Y) >= T_n(X)`` for coupled samples ``X = H^{-1}(E)``, ``Y = H_ab^{-1}(E)``.

    A violation is a gap below ``-tol``; the tolerance absorbs rounding in
    otherwise identical samples (e.g. a linear ``H``, where ``X = Y``).
    """
    iv = as_interval(interval)
    lin = LinearizedModel(model, iv.a, iv.b)
    e = RngStream(seed, 0, 0, DATA).exponentials((R, n))
    xs = np.sort(np.asarray(model.inverse_cumhaz(e)), axis=1)
    ys = np.sort(np.asarray(lin.inverse_cumhaz(e)), axis=1)
    tx = t_n_batch(xs, iv, p)
    ty = t_n_batch(ys, iv, p)
    ok = np.isfinite(tx) & np.isfinite(ty)
    gaps = (ty - tx)[ok]
    return CouplingReport(int(np.sum(gaps < -tol)), gaps, R, int(np.sum(~ok)), float(p))


def study_from_mapping(cfg: dict, **overrides) -> StudySpec:
    return replace(StudySpec(**cfg), **overrides) if overrides else StudySpec(**cfg)
