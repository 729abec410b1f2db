"""Command-line surface: fit bounds, dump curve/envelope tables, compute
per-epoch protection levels, and run synthetic experiments.

Exit codes: 0 ok, 2 input error, 3 infeasible fit, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np
from scipy.special import ndtri

from . import baselines, empirical, nsu_overbound, position_domain, simulate
from .distributions import Gaussian, from_config
from .errors import InfeasibleFitError, InputDataError, NumericFailure
from .su_overbound import SuOverbound, fit_su_overbound


def _write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputDataError(f"cannot open {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputDataError(f"{path}: invalid JSON: {exc}") from None


def load_bound_record(path):
    """Rebuild a bound object (with cdf/quantile) from a record file."""
    rec = _load_json(path)
    kind = rec.get("type")
    if kind == "cauchy_gaussian_su":
        return SuOverbound.from_record(rec), rec
    if kind == "single_gaussian":
        return Gaussian(float(rec.get("center_shift", 0.0)), float(rec["sigma_o"])), rec
    if kind in ("cauchy_gaussian_nsu", "paired_gaussian"):
        return nsu_overbound.paired_overbound_from_record(rec), rec
    if kind == "two_step":
        params = baselines.TwoStepParams(
            b_f=float(rec["b_f"]),
            sigma_f=float(rec["sigma_f"]),
            b_su_left=float(rec.get("b_su_left", -rec["b_f"])),
            b_su_right=float(rec.get("b_su_right", rec["b_f"])),
            sigma_left=float(rec.get("sigma_left", rec["sigma_f"])),
            sigma_right=float(rec.get("sigma_right", rec["sigma_f"])),
        )
        return baselines.two_step_as_paired(params), rec
    if kind == "navden":
        params = baselines.NavdenParams(**{
            k: rec["params"][k] for k in (
                "delta", "x_tilde_max", "x_tilde_min", "b_tilde", "c_tilde",
                "k_tr", "k_max", "k_min", "k_bias",
            )
        })
        return baselines.navden_as_paired(params, float(rec["q_scale"])), rec
    raise InputDataError(f"{path}: unknown bound record type {kind!r}")


def _convolvable(bound):
    """The object to push through convolution: paired families use the right bound."""
    if isinstance(bound, nsu_overbound.PairedOverbound):
        return bound.right
    return bound


# ---------------------------------------------------------------------------
# subcommands

def cmd_fit(args) -> int:
    samples = empirical.load_samples(args.samples, column=args.column)
    ecdf = empirical.build_ecdf(samples)
    target = empirical.FitTarget.from_ecdf(ecdf)
    bias_tol = args.bias_tol if args.bias_tol is not None else 1e-6

    if args.method == "cauchy_gaussian":
        if args.mode == "su":
            bound, report = fit_su_overbound(target, bias_tol_factor=bias_tol)
            record = bound.record()
        else:
            bound, report = nsu_overbound.fit_nsu_overbound(target, seed=args.seed)
            record = bound.record()
    elif args.method == "single_gaussian":
        from .su_overbound import fit_single_gaussian

        sigma = fit_single_gaussian(target, bias_tol_factor=bias_tol)
        record = {"type": "single_gaussian", "sigma_o": sigma, "center_shift": target.center}
        report = dict(record)
    elif args.method == "two_step":
        params, report = baselines.fit_two_step(target)
        record = params.record()
    elif args.method == "navden":
        if not args.navden_params:
            raise InputDataError(
                "method 'navden' needs --navden-params with fields "
                "delta, x_tilde_max, x_tilde_min, b_tilde, c_tilde, k_tr, k_max, k_min, k_bias"
            )
        params = baselines.load_navden_params(args.navden_params)
        q = baselines.fit_navden_scale(params, target)
        record = {"type": "navden", "params": params.record(), "q_scale": q}
        report = {"q_scale": q}
    else:
        raise InputDataError(f"unknown method {args.method!r}")

    _write_json(args.out, record)
    report_path = args.out + ".report.json"
    _write_json(report_path, {"method": args.method, "mode": args.mode,
                              "n_samples": int(ecdf.n), "bias": ecdf.bias,
                              "report": _plain(report)})
    print(f"wrote {args.out} and {report_path}")
    return 0


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "__dict__") and not isinstance(obj, (int, float, str, bool)):
        return str(obj)
    return obj


def cmd_curves(args) -> int:
    bound, rec = load_bound_record(args.bound)
    xs = np.linspace(args.x_min, args.x_max, args.n)
    if isinstance(bound, nsu_overbound.PairedOverbound):
        cdf = np.asarray(bound.analog_cdf(xs))
        try:
            pdf = np.asarray(bound.analog_pdf(xs))
        except (NotImplementedError, AttributeError):
            pdf = np.full_like(xs, float("nan"))
    else:
        cdf = np.asarray(bound.cdf(xs))
        pdf = np.asarray(bound.pdf(xs))
    with np.errstate(divide="ignore"):
        qscale = ndtri(np.clip(cdf, 0.0, 1.0))
    folded = np.minimum(cdf, 1.0 - cdf)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "cdf", "pdf", "quantile_scale_cdf", "folded_cdf"])
        for row in zip(xs, cdf, pdf, qscale, folded):
            w.writerow([repr(float(v)) for v in row])
    print(f"wrote {args.out}")
    return 0


def cmd_vpl(args) -> int:
    sky = simulate.SkyModel.from_csv(args.geometry)
    bounds = {}
    for path in args.bound:
        b, rec = load_bound_record(path)
        bounds[rec.get("type", path)] = _convolvable(b)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch_id", "method", "vpl_m"])
        for e in range(sky.n_epochs):
            geom = simulate.build_geometry(sky, e)
            for name, b in bounds.items():
                v = position_domain.vpl(
                    position_domain.convolve_vertical(b, geom.s_row3, args.dt), args.p_hmi
                )
                w.writerow([e, name, repr(float(v))])
    print(f"wrote {args.out}")
    return 0


def cmd_experiment(args) -> int:
    cfg = _load_json(args.config) if args.config else {}

    def pick(flag, key, default):
        return flag if flag is not None else cfg.get(key, default)

    n_epochs = int(pick(args.n_epochs, "n_epochs", 100))
    n_sats = int(pick(args.n_sats, "n_sats", 16))
    p_hmi = float(pick(args.p_hmi, "p_hmi", 1e-9))
    dt = float(pick(args.dt, "dt", 0.01))
    seed = int(pick(args.seed, "seed", 0))
    n_fit = int(pick(args.n_fit, "n_fit", 100_000))
    methods = args.methods.split(",") if args.methods else cfg.get(
        "methods", ["single_gaussian", "cauchy_gaussian_su"]
    )
    if "error_model" not in cfg:
        raise InputDataError("experiment config needs an 'error_model' distribution entry")
    error_model = from_config(cfg["error_model"])
    geometry_path = pick(args.geometry, "geometry", None)
    sky = (
        simulate.SkyModel.from_csv(geometry_path)
        if geometry_path
        else simulate.SkyModel.synthetic(n_epochs, n_sats)
    )
    navden_params = None
    nav_path = pick(args.navden_params, "navden_params", None)
    if nav_path:
        navden_params = baselines.load_navden_params(nav_path)

    results, summary = simulate.run_experiment(
        sky, error_model, methods, p_hmi=p_hmi, dt=dt, seed=seed,
        n_fit=n_fit, navden_params=navden_params,
    )
    simulate.results_to_csv(results, methods, args.out)
    _write_json(args.out + ".summary.json", _plain(summary))
    print(f"wrote {args.out} and {args.out}.summary.json")
    return 0


def cmd_navden_table(args) -> int:
    params = baselines.load_navden_params(args.params)
    rows = baselines.navden_table(params)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "l_tilde", "l_m", "g_tilde"])
        for r in rows:
            w.writerow([r["k"], repr(float(r["l_tilde"])), repr(float(r["l_m"])), repr(float(r["g_tilde"]))])
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cgbound", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit an overbound to an error-sample CSV")
    f.add_argument("--samples", required=True)
    f.add_argument("--column", default="error_m")
    f.add_argument("--mode", choices=["su", "nsu"], default="su")
    f.add_argument("--method", choices=["cauchy_gaussian", "single_gaussian", "two_step", "navden"],
                   default="cauchy_gaussian")
    f.add_argument("--navden-params")
    f.add_argument("--bias-tol", type=float, default=None,
                   help="bias tolerance as a fraction of the sample std (su mode)")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_fit)

    c = sub.add_parser("curves", help="dump cdf/pdf/quantile-scale/folded curves of a bound")
    c.add_argument("--bound", required=True)
    c.add_argument("--x-min", type=float, required=True)
    c.add_argument("--x-max", type=float, required=True)
    c.add_argument("--n", type=int, default=1001)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_curves)

    v = sub.add_parser("vpl", help="per-epoch vertical protection levels for bound records")
    v.add_argument("--bound", action="append", required=True)
    v.add_argument("--geometry", required=True)
    v.add_argument("--dt", type=float, default=0.01)
    v.add_argument("--p-hmi", type=float, default=1e-9)
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_vpl)

    e = sub.add_parser("experiment", help="synthetic DGNSS experiment with per-epoch VPL comparison")
    e.add_argument("--config", help="JSON config; flags override")
    e.add_argument("--methods")
    e.add_argument("--n-epochs", type=int)
    e.add_argument("--n-sats", type=int)
    e.add_argument("--p-hmi", type=float)
    e.add_argument("--dt", type=float)
    e.add_argument("--seed", type=int)
    e.add_argument("--n-fit", type=int)
    e.add_argument("--geometry")
    e.add_argument("--navden-params")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_experiment)

    n = sub.add_parser("navden-table", help="dump the discrete envelope table for given parameters")
    n.add_argument("--params", required=True)
    n.add_argument("--out", required=True)
    n.set_defaults(func=cmd_navden_table)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputDataError as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return 2
    except InfeasibleFitError as exc:
        print(f"error: infeasible: {exc}", file=sys.stderr)
        return 3
    except NumericFailure as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
