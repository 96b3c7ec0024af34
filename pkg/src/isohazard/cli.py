"""Command-line interface: ``test``, ``simulate`` and ``family``.

Exit codes: 0 = not rejected (or success), 1 = rejected, 2 = operational error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import sys
from dataclasses import fields
from importlib import resources
from pathlib import Path

import numpy as np

from .bootstrap import EXPONENTIAL, NAIVE, SMOOTHED, BootstrapConfig, run_test
from .families import BumpFamily, DFamily, d_family_stationary_interval
from .rng import DEFAULT_SEED
from .simulation import StudySpec, run_null_level_study, run_power_study
from .statistics import INTEGRAL, SUP, StatisticSpec

log = logging.getLogger("isohazard")

SCHEMA_VERSION = 1
FULL_B = 2000
DESK_B = 500
TIE_EPS = 1e-9

ENGINES = {"smoothed": SMOOTHED, "naive": NAIVE, "durot": EXPONENTIAL}
STATS = {"integral": INTEGRAL, "sup": SUP}


class UsageError(Exception):
    """Operational error reported with exit code 2."""


# ---------------------------------------------------------------- data input

def read_sample(path) -> np.ndarray:
    """One observation per line; blank lines and ``#`` comments are ignored."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    vals = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            vals.append(float(line))
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not a number: {line!r}") from None
    x = np.asarray(vals, dtype=float)
    if x.size < 2:
        raise UsageError("need at least 2 observations")
    if not np.all(np.isfinite(x)):
        raise UsageError("observations must be finite")
    if np.any(x <= 0):
        raise UsageError("observations must be strictly positive")
    return x


def break_ties(x, eps=TIE_EPS):
    """Sort and separate exact ties by adding ``i * eps * max(x)`` to the i-th repeat."""
    x = np.sort(np.asarray(x, dtype=float))
    rank = np.zeros(x.size)
    for i in range(1, x.size):
        rank[i] = rank[i - 1] + 1 if x[i] == x[i - 1] else 0
    nties = int(np.count_nonzero(rank))
    if nties:
        log.warning("perturbed %d tied observation(s) by multiples of %.3g", nties, eps * x[-1])
        x = np.sort(x + rank * eps * x[-1])
    return x, nties


# ---------------------------------------------------------------- test

def _interval_end(args, x):
    if args.quantile is not None:
        if args.a is not None or args.b is not None:
            raise UsageError("give either --quantile or --a/--b, not both")
        q = args.quantile
        if not 0 < q < 1:
            raise UsageError("--quantile must lie in (0, 1)")
        # empirical quantile: smallest order statistic with F_n >= q
        return float(x[max(math.ceil(q * x.size - 1e-9) - 1, 0)])
    if args.b is None:
        raise UsageError("an interval is required: --b (with optional --a = 0) or --quantile")
    if args.a not in (None, 0.0):
        raise UsageError("calibrated tests are defined on intervals [0, b]; --a must be 0")
    if not args.b > 0:
        raise UsageError("--b must be positive")
    return float(args.b)


def cmd_test(args) -> int:
    x = read_sample(args.data)
    x, nties = break_ties(x)
    b = _interval_end(args, x)
    B = args.B if args.B is not None else (DESK_B if args.desk else FULL_B)
    kind = STATS[args.statistic] if args.statistic else (SUP if args.method == "durot" else INTEGRAL)
    try:
        cfg = BootstrapConfig(
            B=B, alpha=args.alpha, method=ENGINES[args.method], seed=args.seed,
            bandwidth_constant=args.bandwidth_constant, penalty_constant=args.penalty_constant,
            reflect=args.reflect,
        )
        out = run_test(x, b, cfg, StatisticSpec(kind, args.p))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc = {"schema_version": SCHEMA_VERSION, **out.to_dict(include_values=args.values)}
    doc["diagnostics"]["perturbed_ties"] = nties
    json.dump(doc, sys.stdout, indent=2, sort_keys=True, default=_json_default)
    sys.stdout.write("\n")
    return 1 if out.reject else 0


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not serializable: {type(o)}")


# ---------------------------------------------------------------- simulate

_FAMILY_PARAMS = ("d", "beta", "gamma", "mu", "sigma", "rate")
_SPEC_FIELDS = {f.name for f in fields(StudySpec)} - {"fixed"}
_EXTRA_KEYS = {"output", "kind", "profile"}
CONFIG_KEYS = frozenset(_SPEC_FIELDS | set(_FAMILY_PARAMS) | _EXTRA_KEYS)


def _floats(text):
    text = text.strip()
    if ":" in text:
        # start:stop:step, inclusive of stop
        start, stop, step = (float(t) for t in text.split(":"))
        k = int(round((stop - start) / step))
        return tuple(round(start + i * step, 12) for i in range(k + 1))
    return tuple(float(t) for t in text.replace(",", " ").split())


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text):
    """Parse a flat ``key = value`` study file into ``(StudySpec kwargs, extras)``."""
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string("[study]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"malformed config: {exc}") from exc
    raw = dict(cp["study"])
    unknown = sorted(set(raw) - CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    kw, fixed, extra = {}, {}, {}
    try:
        for k, v in raw.items():
            if k in _EXTRA_KEYS:
                extra[k] = v.strip()
            elif k == "grid":
                kw[k] = _floats(v)
            elif k == "methods":
                kw[k] = tuple(t for t in v.replace(",", " ").split())
            elif k in ("n", "replicates", "B", "seed"):
                kw[k] = int(v)
            elif k == "reflect":
                kw[k] = _bool(v)
            elif k in ("family", "grid_param", "interval_rule"):
                kw[k] = v.strip()
            elif k in _FAMILY_PARAMS:
                fixed[k] = float(v)
            else:
                kw[k] = float(v)
    except ValueError as exc:
        raise UsageError(f"bad config value: {exc}") from exc
    if "methods" in kw and not kw["methods"]:
        raise UsageError("the method list is empty")
    kw["fixed"] = fixed
    return kw, extra


def _config_text(ref):
    p = Path(ref)
    if p.exists():
        return p.read_text(), p.stem
    name = ref if ref.endswith(".cfg") else ref + ".cfg"
    try:
        return resources.files("isohazard").joinpath("configs", name).read_text(), Path(name).stem
    except (FileNotFoundError, OSError):
        raise UsageError(f"no such config file or bundled config: {ref}") from None


def cmd_simulate(args) -> int:
    text, stem = _config_text(args.config)
    kw, extra = parse_config(text)
    profile = "full" if args.full else extra.get("profile", "desk")
    if profile not in ("desk", "full"):
        raise UsageError("profile must be 'desk' or 'full'")
    if profile == "full":
        kw["replicates"] = kw["B"] = FULL_B
    for key in ("replicates", "B", "seed"):
        if getattr(args, key) is not None:
            kw[key] = getattr(args, key)
    try:
        spec = StudySpec(**kw)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    kind = extra.get("kind", "power")
    runner = run_null_level_study if kind == "size" else run_power_study
    try:
        table = runner(spec, threads=args.threads, progress=lambda s: print(s, flush=True))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    prefix = args.output or extra.get("output") or stem
    for path in table.write(prefix):
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------- family

def _g(v):
    return f"{float(v):.6g}"


def cmd_family(args) -> int:
    if args.family == "d":
        if args.d is None:
            raise UsageError("family d needs --d")
        model = DFamily(args.d)
    else:
        try:
            model = BumpFamily(args.beta, args.gamma, args.mu, args.sigma)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    lines = []
    if args.stationary:
        if args.family != "d":
            raise UsageError("--stationary applies to family d only")
        iv = d_family_stationary_interval(args.d)
        lines.append("none" if iv is None else f"{_g(iv[0])},{_g(iv[1])}")
    if args.quantile is not None:
        lines.append(_g(model.quantile(args.quantile)))
    for flag, fn in (("hazard_at", model.hazard), ("cumhaz_at", model.cumhaz), ("cdf_at", model.cdf)):
        v = getattr(args, flag)
        if v is not None:
            lines.append(_g(fn(v)))
    if not lines:
        raise UsageError("nothing to query: give --quantile, --stationary, --hazard-at, --cumhaz-at or --cdf-at")
    print("\n".join(lines))
    return 0


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="isohazard", description=__doc__.splitlines()[0])
    p.add_argument("--self-check", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("-v", "--verbose", action="store_true", help="log debug messages to stderr")
    sub = p.add_subparsers(dest="command")

    t = sub.add_parser("test", help="test for a nondecreasing hazard on [0, b]")
    t.add_argument("data", help="text file, one observation per line")
    t.add_argument("--a", type=float, help="left end of the interval (must be 0)")
    t.add_argument("--b", type=float, help="right end of the interval")
    t.add_argument("--quantile", type=float, help="take b as this empirical quantile")
    t.add_argument("--method", choices=sorted(ENGINES), default="smoothed")
    t.add_argument("--statistic", choices=sorted(STATS),
                   help="default: integral, or sup for --method durot")
    t.add_argument("--p", type=float, default=1.0, help="power of the integrand (inf allowed)")
    t.add_argument("--B", type=int, help=f"bootstrap size (default {FULL_B}, {DESK_B} with --desk)")
    t.add_argument("--desk", action="store_true", help="desk-scale bootstrap size")
    t.add_argument("--alpha", type=float, default=0.1)
    t.add_argument("--seed", type=int, default=DEFAULT_SEED)
    t.add_argument("--bandwidth-constant", type=float, default=1.0)
    t.add_argument("--penalty-constant", type=float, default=2.0)
    t.add_argument("--reflect", action="store_true", help="reflect the kernel estimate at 0")
    t.add_argument("--values", action="store_true", help="include bootstrap values in the output")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", help="run a power or size study from a config file")
    s.add_argument("config", help="path to a key = value file, or the name of a bundled config")
    s.add_argument("--output", help="output prefix (default: config name)")
    s.add_argument("--threads", type=int, help="worker threads (default from ISOHAZARD_THREADS)")
    s.add_argument("--full", action="store_true", help="full profile: R = B = 2000")
    s.add_argument("--replicates", type=int)
    s.add_argument("--B", type=int)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("family", help="query the simulation families")
    f.add_argument("family", choices=["d", "bump"])
    f.add_argument("--d", type=float)
    f.add_argument("--beta", type=float, default=0.0)
    f.add_argument("--gamma", type=float, default=0.0)
    f.add_argument("--mu", type=float, default=1.0)
    f.add_argument("--sigma", type=float, default=0.1)
    f.add_argument("--quantile", type=float)
    f.add_argument("--stationary", action="store_true")
    f.add_argument("--hazard-at", type=float)
    f.add_argument("--cumhaz-at", type=float)
    f.add_argument("--cdf-at", type=float)
    f.set_defaults(func=cmd_family)
    return p


def self_check() -> int:
    from . import oracles

    results = oracles.run_fixtures()
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: got {r.got!r}, expected {r.expected!r} (tol {r.tol:g})")
    return 0 if all(r.ok for r in results) else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="isohazard: %(levelname)s: %(message)s", stream=sys.stderr)
    if args.self_check:
        return self_check()
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"isohazard: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
