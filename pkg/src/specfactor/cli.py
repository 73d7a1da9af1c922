"""Command-line interface.

Subcommands: estimate, surface, model-density, synth, scenario, window,
mp-check. Scalar results go to stdout as JSON, tables as CSV/TSV. Exit codes:
0 success, 2 usage error, 3 data error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import dataio
from .errors import DataError, NumericalError, SpecfactorError
from .estimator import EstimatorConfig, estimate
from .product_law import ModelDensityParams, model_density
from .residuals import residual_esd
from .spectra import BinningPolicy, js_divergence, mp_density_on_grid
from .synthetic import ScenarioConfig, SyntheticConfig, generate_factor_data, generate_scenario
from .windows import WindowConfig, sliding_estimates

_CONFIG_KEYS = {
    # estimator / binning
    "p_max", "phi_grid", "refine", "epsilon", "bins", "support_lo", "support_hi",
    # window
    "width", "step",
    # synth
    "n", "t", "p", "gamma", "alpha", "beta", "j", "seed",
    # scenario
    "base_level", "events", "snr", "ar_coeff",
}


def _parse_phi_grid(spec: str) -> tuple[float, ...]:
    try:
        lo, hi, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise ValueError(f"--phi-grid expects LO:HI:STEP, got {spec!r}") from None
    if step <= 0 or hi < lo:
        raise ValueError(f"bad phi grid range {spec!r}")
    count = int(round((hi - lo) / step))
    return tuple(round(lo + i * step, 10) for i in range(count + 1))


def _parse_events(spec: str):
    events = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        bits = part.split(":")
        if len(bits) != 3:
            raise ValueError(f"event must be ROW:START:LEVEL, got {part!r}")
        events.append((int(bits[0]), int(bits[1]), float(bits[2])))
    return tuple(events)


def _merged(args, key: str, cast, default=None):
    """Flag value if given, else config-file value, else default."""
    val = getattr(args, key, None)
    if val is not None:
        return val
    fileval = args._fileconf.get(key)
    if fileval is not None:
        return cast(fileval)
    return default


def _required(args, key: str, cast):
    val = _merged(args, key, cast)
    if val is None:
        raise ValueError(f"missing required value {key!r} (pass --{key.replace('_', '-')} or set it in --config)")
    return val


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _estimator_config(args) -> EstimatorConfig:
    bins = _merged(args, "bins", int, 100)
    lo = _merged(args, "support_lo", float)
    hi = _merged(args, "support_hi", float)
    binning = BinningPolicy(bins, lo, hi) if lo is not None and hi is not None else bins
    grid = _merged(args, "phi_grid", _parse_phi_grid)
    refine = _merged(args, "refine", _bool, True)
    if getattr(args, "no_refine", False):
        refine = False
    return EstimatorConfig(
        p_max=_merged(args, "p_max", int),
        phi_grid=grid,
        refine=refine,
        binning=binning,
        epsilon=_merged(args, "epsilon", float),
    )


def _write_or_stdout(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _surface_csv(surface: dict) -> str:
    lines = ["p,phi,divergence"]
    for (p, phi), d in sorted(surface.items()):
        lines.append(f"{p},{phi:.17g},{d:.17g}")
    return "\n".join(lines) + "\n"


def _cmd_estimate(args) -> int:
    R = dataio.read_matrix_csv(args.matrix)
    res = estimate(R, _estimator_config(args))
    if args.surface:
        _write_or_stdout(args.surface, _surface_csv(res.surface))
    print(json.dumps({
        "p_hat": res.p_hat,
        "phi_hat": res.phi_hat,
        "d_min": res.d_min,
        "n": R.shape[0],
        "t": R.shape[1],
    }))
    return 0


def _cmd_surface(args) -> int:
    R = dataio.read_matrix_csv(args.matrix)
    res = estimate(R, _estimator_config(args))
    _write_or_stdout(args.output, _surface_csv(res.surface))
    return 0


def _cmd_model_density(args) -> int:
    grid = None
    bins = _merged(args, "bins", int, 100)
    hi = _merged(args, "support_hi", float)
    lo = _merged(args, "support_lo", float, 0.0)
    if hi is not None:
        grid = BinningPolicy(bins, lo, hi)
    elif bins != 100:
        from .product_law import support_edges

        grid = BinningPolicy(bins, 0.0, 1.1 * support_edges(args.phi)[1])
    rho = model_density(ModelDensityParams(args.phi, epsilon=_merged(args, "epsilon", float), grid=grid))
    _write_or_stdout(args.output, rho.to_tsv())
    return 0


def _cmd_synth(args) -> int:
    cfg = SyntheticConfig(
        n=_required(args, "n", int),
        t=_required(args, "t", int),
        p=_required(args, "p", int),
        gamma=_required(args, "gamma", float),
        alpha=_merged(args, "alpha", float, 0.0),
        beta=_merged(args, "beta", float, 0.0),
        j=_merged(args, "j", int, 0),
        seed=_merged(args, "seed", int, 0),
    )
    dataio.write_matrix_csv(args.output, generate_factor_data(cfg))
    return 0


def _cmd_scenario(args) -> int:
    base = _merged(args, "base_level", float, 20.0)
    cfg = ScenarioConfig(
        n=_required(args, "n", int),
        t=_required(args, "t", int),
        base_level=base,
        events=_parse_events(_merged(args, "events", str, "") or ""),
        snr=_merged(args, "snr", float, 1000.0),
        ar_coeff=_merged(args, "ar_coeff", float, 0.5),
        seed=_merged(args, "seed", int, 0),
    )
    dataio.write_matrix_csv(args.output, generate_scenario(cfg))
    return 0


def _cmd_window(args) -> int:
    R = dataio.read_matrix_csv(args.matrix)
    cfg = WindowConfig(
        width=_required(args, "width", int),
        step=_merged(args, "step", int, 1),
        estimator=_estimator_config(args),
    )
    series = sliding_estimates(R, cfg, threads=args.threads)
    _write_or_stdout(args.output, series.to_csv())
    return 0


def _cmd_mp_check(args) -> int:
    R = dataio.read_matrix_csv(args.matrix)
    n, t = R.shape
    if n > t:
        raise DataError(f"got N={n} > T={t}; estimation needs N <= T")
    c = n / t
    bins = _merged(args, "bins", int, 100)
    spectrum_hi = 1.1 * max(float(np.max(np.linalg.eigvalsh(np.cov(R, bias=True)))), (1 + c**0.5) ** 2)
    policy = BinningPolicy(bins, 0.0, spectrum_hi)
    emp = residual_esd(R, args.p, policy, clip=True)
    js = js_divergence(emp, mp_density_on_grid(c, 1.0, policy))
    print(json.dumps({"js": js, "c": c, "p": args.p, "n": n, "t": t}))
    return 0


def _add_estimator_flags(sub) -> None:
    sub.add_argument("--config", help="flat key=value config file; flags override it")
    sub.add_argument("--p-max", dest="p_max", type=int)
    sub.add_argument("--phi-grid", dest="phi_grid", type=_parse_phi_grid, metavar="LO:HI:STEP")
    sub.add_argument("--no-refine", dest="no_refine", action="store_true")
    sub.add_argument("--bins", type=int)
    sub.add_argument("--support-lo", dest="support_lo", type=float)
    sub.add_argument("--support-hi", dest="support_hi", type=float)
    sub.add_argument("--epsilon", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specfactor",
        description="Factor-count and shape estimation by residual spectrum matching.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("SPECFACTOR_THREADS", "1")),
        help="worker threads for window sweeps (env: SPECFACTOR_THREADS)",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("estimate", help="estimate (p, phi) from a matrix CSV")
    sp.add_argument("matrix")
    _add_estimator_flags(sp)
    sp.add_argument("--surface", help="also write the (p, phi, divergence) CSV here")
    sp.set_defaults(func=_cmd_estimate)

    sp = subs.add_parser("surface", help="write the full divergence surface as CSV")
    sp.add_argument("matrix")
    _add_estimator_flags(sp)
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=_cmd_surface)

    sp = subs.add_parser("model-density", help="dump the model law as midpoint/mass TSV")
    sp.add_argument("--phi", type=float, required=True)
    sp.add_argument("--config")
    sp.add_argument("--bins", type=int)
    sp.add_argument("--support-lo", dest="support_lo", type=float)
    sp.add_argument("--support-hi", dest="support_hi", type=float)
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=_cmd_model_density)

    sp = subs.add_parser("synth", help="generate factor-model data")
    sp.add_argument("--config")
    for flag, typ in (("--n", int), ("--t", int), ("--p", int), ("--gamma", float),
                      ("--alpha", float), ("--beta", float), ("--j", int), ("--seed", int)):
        sp.add_argument(flag, type=typ)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=_cmd_synth)

    sp = subs.add_parser("scenario", help="generate a step-change scenario")
    sp.add_argument("--config")
    sp.add_argument("--n", type=int)
    sp.add_argument("--t", type=int)
    sp.add_argument("--base-level", dest="base_level", type=float)
    sp.add_argument("--events", type=str, help="ROW:START:LEVEL[,ROW:START:LEVEL...]")
    sp.add_argument("--snr", type=float)
    sp.add_argument("--ar-coeff", dest="ar_coeff", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=_cmd_scenario)

    sp = subs.add_parser("window", help="sliding-window estimates as CSV")
    sp.add_argument("matrix")
    _add_estimator_flags(sp)
    sp.add_argument("--width", type=int)
    sp.add_argument("--step", type=int)
    # accepted here as well so the flag works after the subcommand; SUPPRESS
    # keeps the top-level/env value when it is not repeated
    sp.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=_cmd_window)

    sp = subs.add_parser("mp-check", help="JS divergence of a residual ESD against Marchenko-Pastur")
    sp.add_argument("matrix")
    sp.add_argument("--config")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--bins", type=int)
    sp.set_defaults(func=_cmd_mp_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if getattr(args, "config", None):
        try:
            args._fileconf = dataio.read_run_config(args.config, _CONFIG_KEYS)
        except (OSError, DataError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3 if isinstance(exc, DataError) else 2
    else:
        args._fileconf = {}
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except SpecfactorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
