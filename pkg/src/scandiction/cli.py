"""Command-line entry point: gen | corrupt | run | bounds | figures | universal | audit | oracle.

Exit codes: 0 success, 1 usage or input error, 2 audit failure.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import bounds as B
from .channels import Channel, corrupt
from .core import ScandictionError, read_field, write_field
from .estimators import FILTER, PREDICTOR, ar_covariance
from .harness import (AUDITS, FIGURE_NUMBERS, ConfigError, ExperimentConfig, figure_data, manifest,
                      monte_carlo_loss, theorem_audit, trial_seeds, parallel_map)
from .oracle import (JointModel, adaptive_scan_value, exhaustive_best_order,
                     exhaustive_optimal_filter_loss, output_entropy)
from .sources import gaussian_field, iid_field, markov_field
from .universal import DEFAULT_EXPERTS, ExpertSet, universal_scandict

EXIT_OK, EXIT_USAGE, EXIT_AUDIT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    """12 significant digits for floats, plain text otherwise."""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    return str(x)


def emit(record: dict, out=None):
    out = out or sys.stdout
    for k, v in record.items():
        out.write(f"{k}: {fmt(v)}\n")


def emit_manifest(config: dict, seed, argv, started):
    sys.stdout.write("# manifest\n")
    emit(manifest(config, seed, " ".join(argv), started))


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def parse_params(text: str | None) -> dict:
    out = {}
    if not text:
        return out
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise UsageError(f"parameter {part!r} must look like key=value")
        k, v = part.split("=", 1)
        out[k.strip()] = float(v)
    return out


def read_config(path) -> dict:
    """``key = value`` lines (``#`` comments allowed), no section header needed."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string("[config]\n" + Path(path).read_text())
    return dict(cp["config"])


# -- subcommands ------------------------------------------------------------

def cmd_gen(a, argv, started):
    if a.source == "markov":
        f = markov_field(a.width, a.height, a.pi, a.seed)
    elif a.source == "iid":
        f = iid_field(a.width, a.height, a.p, a.seed)
    else:
        f = gaussian_field(a.width, a.height, ar_covariance(a.width, a.height, a.rho, a.sigma_x2), a.seed)
    write_field(f, a.out)
    emit({"out": a.out, "width": f.width, "height": f.height, "alphabet": f.alphabet})
    emit_manifest(vars_of(a), a.seed, argv, started)
    return EXIT_OK


def cmd_corrupt(a, argv, started):
    ch = Channel.bsc(a.delta) if a.channel == "bsc" else Channel.awgn(a.noise_variance)
    clean = read_field(a.inp)
    noisy = corrupt(ch, clean, a.seed)
    write_field(noisy, a.out)
    emit({"out": a.out, **ch.describe()})
    emit_manifest(vars_of(a), a.seed, argv, started)
    return EXIT_OK


RUN_KEYS = ("source", "pi", "p", "channel", "delta", "sigma_x2", "sigma_n2", "rho", "width", "height",
            "scan", "estimator", "mode", "loss", "trials", "seed", "jobs")


def cmd_run(a, argv, started):
    values = read_config(a.config) if a.config else {}
    for k in RUN_KEYS:
        v = getattr(a, k)
        if v is not None:
            values[k] = v
    if "scan" not in values:
        raise UsageError("run needs --scan (or scan in the config file)")
    if "estimator" not in values:
        raise UsageError("run needs --estimator (or estimator in the config file)")
    values.setdefault("jobs", os.cpu_count() or 1)
    cfg = ExperimentConfig.from_mapping(values)
    res = monte_carlo_loss(cfg)
    emit({"scan": cfg.scan, "estimator": cfg.estimator, "mode": cfg.mode, "loss": cfg.loss,
          "trials": cfg.trials, "mean_normalized_loss": res.mean, "half_width": res.half_width})
    if a.profile:
        write_csv(a.profile, ["step", "mean_loss"], [[i, v] for i, v in enumerate(res.profile)])
        emit({"profile": a.profile})
    emit_manifest(cfg.to_dict(), cfg.seed, argv, started)
    return EXIT_OK


def _bound_reports(which: str, p: dict) -> list[B.BoundReport]:
    R = B.BoundReport
    if which == "zeta":
        delta = p.get("delta", 0.25)
        env = B.zeta_binary_envelope(delta)
        out = []
        if "d" in p:
            out += [R("zeta", B.zeta_binary(p["d"], delta), {"delta": delta, "d": p["d"]}, "h_b(delta*d) or 1, bits"),
                    R("zeta_bar", float(env(p["d"])), {"delta": delta, "d": p["d"]}, "upper concave envelope")]
        if "rate" in p:
            out.append(R("filtering_lower_bound", B.filtering_lower_bound(p["rate"], env),
                         {"delta": delta, "rate_bits": p["rate"]}, "inverse envelope"))
        if "pi" in p:
            out.append(R("filtering_lower_bound", B.hmm_filtering_lower_bound(p["pi"], delta),
                         {"delta": delta, "pi": p["pi"]}, "inverse envelope at h_b(pi*delta)"))
        if not out:
            out.append(R("zeta_bar_at_delta", float(env(delta)), {"delta": delta}, "upper concave envelope"))
        return out
    if which == "eps-delta":
        delta = p.get("delta", 0.1)
        fit = B.epsilon_delta(delta)
        prm = {"delta": delta}
        return [R("epsilon_delta", fit.epsilon, prm, "min_ab max_p |a h_b(p) + b - f_delta(p)|"),
                R("a_star", fit.a, prm, "minimiser"), R("b_star", fit.b, prm, "minimiser"),
                R("binary_filter_excess_bound", 2 * fit.epsilon, prm, "2 epsilon_delta")]
    if which == "gauss-excess":
        sx, sn = p.get("sigma_x2", 1.0), p.get("sigma_n2", 1.0)
        prm = {"sigma_x2": sx, "sigma_n2": sn}
        snr, peak = B.gaussian_excess_peak()
        return [R("gaussian_filter_excess", B.gaussian_filter_excess_bound(sx, sn), prm,
                  "sigma_n2 (ln(1+snr) - snr/(snr+1))"),
                R("symbol_by_symbol", B.symbol_by_symbol_bound(sx, sn), prm, "sigma_n2 sigma_x2/(sigma_x2+sigma_n2)"),
                R("gaussian_scandiction_excess", B.gaussian_scandiction_excess_bound(sx, sn), prm,
                  "sigma_n2 (snr - ln(1+snr))"),
                R("peak_ratio", peak, {"snr_at_peak": snr}, "max_snr f(snr)/snr")]
    if which == "fstar":
        sx, sn = p.get("sigma_x2", 1.0), p.get("sigma_n2", 1.0)
        prm = {"sigma_x2": sx, "sigma_n2": sn}
        info, mmse = B.binary_awgn_immse(sx / sn)
        return [R("mutual_information_nats", info, prm, "binary input, Gauss-Hermite"),
                R("mmse", mmse, prm, "binary input, Gauss-Hermite"),
                R("fstar", B.fstar_binary_awgn(sx, sn), prm, "2 sigma_n2 I - sigma_x2 mmse"),
                R("symbol_by_symbol", sx * mmse, prm, "sigma_x2 mmse")]
    if which == "scand":
        out = []
        if "u_y" in p and "delta" in p:
            out.append(R("noisy_scandictability", B.noisy_scandictability(p["u_y"], Channel.bsc(p["delta"])),
                         {"u_y": p["u_y"], "delta": p["delta"]}, "(U_Y - delta)/(1 - 2 delta)"))
        if "u_y" in p and "sigma_n2" in p:
            out.append(R("noisy_scandictability", B.noisy_scandictability(p["u_y"], Channel.awgn(p["sigma_n2"])),
                         {"u_y": p["u_y"], "sigma_n2": p["sigma_n2"]}, "U_Y - sigma_n2"))
        if "rate_bits" in p:
            out.append(R("clean_prediction_lower_bound", B.clean_prediction_lower_bound(p["rate_bits"], "hamming"),
                         {"rate_bits": p["rate_bits"]}, "h_b^-1(rate)"))
        if "rate_nats" in p:
            out.append(R("clean_prediction_lower_bound", B.clean_prediction_lower_bound(p["rate_nats"], "squared"),
                         {"rate_nats": p["rate_nats"]}, "exp(2 h)/(2 pi e)"))
        if "delta" in p:
            out.append(R("noisy_prediction_excess_bsc", B.noisy_prediction_excess_bound_bsc(p["delta"]),
                         {"delta": p["delta"]}, "2 * 0.08/(1 - 2 delta)"))
        if not out:
            raise UsageError("scand needs some of u_y, delta, sigma_n2, rate_bits, rate_nats")
        return out
    if which == "regions":
        pi = p.get("pi", 0.1)
        f, d = B.singlet_regions(pi)
        return [R("f_pi", f, {"pi": pi}, "0.5 (1 - sqrt(max(1 - 4 pi, 0)))"),
                R("d_pi", d, {"pi": pi}, "0.5 (1 - sqrt(max(1 - 4 (pi/(1-pi))^2, 0)))")]
    if which == "hplus":
        sx, sn = p.get("sigma_x2", 1.0), p.get("sigma_n2", 1.0)
        h = p["h_plus"] if "h_plus" in p else float("-inf")
        return [R("hplus_excess", B.hplus_excess_bound(h, sx, sn), {"h_plus": h, "sigma_x2": sx, "sigma_n2": sn},
                  "sigma_n2 sigma_x2/(sigma_x2+sigma_n2) - exp(2 H+)/(2 pi e)")]
    raise UsageError(f"unknown bound {which!r}")


BOUND_CHOICES = ("zeta", "eps-delta", "gauss-excess", "fstar", "scand", "regions", "hplus")


def cmd_bounds(a, argv, started):
    params = parse_params(a.params)
    for r in _bound_reports(a.which, params):
        line = " ".join(f"{k}={fmt(v)}" for k, v in r.parameters.items())
        sys.stdout.write(f"{r.name}: {fmt(r.value)}  [{line}]  {r.formula}\n")
    emit_manifest({"which": a.which, **params}, None, argv, started)
    return EXIT_OK


def cmd_figures(a, argv, started):
    outdir = Path(a.out)
    outdir.mkdir(parents=True, exist_ok=True)
    figs = sorted(FIGURE_NUMBERS) if a.fig == "all" else [int(a.fig)]
    for n in figs:
        name = FIGURE_NUMBERS[n]
        header, rows = figure_data(name, delta=a.delta, symbols=a.symbols, step=a.step, seed=a.seed,
                                   jobs=a.jobs or os.cpu_count() or 1)
        path = outdir / f"fig{n}_{name}.csv"
        write_csv(path, header, rows)
        emit({f"fig{n}": str(path), f"fig{n}_rows": len(rows)})
    cfg = {"fig": a.fig, "delta": a.delta, "symbols": a.symbols, "step": a.step, "seed": a.seed}
    (outdir / "manifest.json").write_text(json.dumps(manifest(cfg, a.seed, " ".join(argv), None),
                                                     indent=2, sort_keys=True) + "\n")
    emit_manifest(cfg, a.seed, argv, started)
    return EXIT_OK


def _universal_trial(args):
    specs, n, m, eta, pi, delta, seed, t = args
    ex = ExpertSet.from_specs(specs, delta)
    src, ch = trial_seeds(seed, t)
    x = markov_field(n, n, pi, src)
    y = corrupt(Channel.bsc(delta), x, ch)
    r = universal_scandict(y, ex, delta, m=m, eta=eta, seed=src ^ ch, clean_for_scoring=x)
    return [t, r.algorithm_loss, float(r.expert_losses.min()), r.regret, r.bound]


def cmd_universal(a, argv, started):
    specs = list(DEFAULT_EXPERTS)
    if a.experts:
        specs = json.loads(Path(a.experts).read_text())
        if isinstance(specs, dict):
            specs = specs["experts"]
    eta = None if a.eta == "auto" else float(a.eta)
    ExpertSet.from_specs(specs, a.delta)
    rows = parallel_map(_universal_trial, [(tuple(specs), a.n, a.m, eta, a.pi, a.delta, a.seed, t)
                                           for t in range(a.trials)], a.jobs or os.cpu_count() or 1)
    header = ["trial", "algorithm_loss", "best_expert_loss", "regret", "bound"]
    if a.out:
        write_csv(a.out, header, rows)
    regrets = [r[3] for r in rows]
    emit({"experts": ",".join(specs), "trials": a.trials, "n": a.n, "m": a.m,
          "mean_regret": float(np.mean(regrets)), "max_regret": float(np.max(regrets)),
          "bound": rows[0][4], "violations": sum(r > rows[0][4] for r in regrets)})
    emit_manifest({"experts": specs, "n": a.n, "m": a.m, "eta": a.eta, "pi": a.pi, "delta": a.delta,
                   "trials": a.trials}, a.seed, argv, started)
    return EXIT_OK


def cmd_audit(a, argv, started):
    names = list(AUDITS) if a.which == "all" else [a.which]
    ok = True
    for name in names:
        kwargs = {"seed": a.seed}
        if name == "regret":
            kwargs["jobs"] = a.jobs or os.cpu_count() or 1
        rep = theorem_audit(name, **kwargs)
        sys.stdout.write(f"audit {name}: {'pass' if rep.passed else 'FAIL'}\n")
        sys.stdout.write("  check | value | limit | margin | status\n")
        for row in rep.rows():
            sys.stdout.write("  " + " | ".join(fmt(v) for v in row) + "\n")
        for k, v in rep.metadata.items():
            sys.stdout.write(f"  {k}: {fmt(v)}\n")
        ok = ok and rep.passed
    emit_manifest({"which": a.which}, a.seed, argv, started)
    return EXIT_OK if ok else EXIT_AUDIT


def cmd_oracle(a, argv, started):
    model = (JointModel.markov(a.width, a.height, a.pi, a.delta) if a.source == "markov"
             else JointModel.iid(a.width, a.height, a.p, a.delta))
    mode = PREDICTOR if a.mode in ("predict", PREDICTOR) else FILTER
    rec = {"sites": model.site_count, "mode": mode, "output_entropy_bits": output_entropy(model)}
    if a.which == "filter-loss":
        order = [(r, c) for r in range(a.height) for c in range(a.width)]
        rec["raster_loss"] = exhaustive_optimal_filter_loss(model, order, mode)
    elif a.which == "best-order":
        order, val = exhaustive_best_order(model, mode)
        rec["best_order"] = " ".join(f"{r},{c}" for r, c in order)
        rec["best_loss"] = val
    else:
        rec["data_dependent_loss"] = adaptive_scan_value(model, mode)
        rec["best_fixed_order_loss"] = exhaustive_best_order(model, mode)[1]
    emit(rec)
    emit_manifest(vars_of(a), None, argv, started)
    return EXIT_OK


def vars_of(a) -> dict:
    return {k: v for k, v in vars(a).items() if k not in ("func", "subparser")}


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="scandict", description="Scanning, filtering and prediction of noisy 2-D fields.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("gen", help="generate a clean field")
    g.add_argument("--source", choices=("markov", "iid", "gauss-ar"), default="markov")
    g.add_argument("--width", type=int, default=64)
    g.add_argument("--height", type=int, default=64)
    g.add_argument("--pi", type=float, default=0.1, help="Markov transition probability")
    g.add_argument("--p", type=float, default=0.5, help="i.i.d. P(X=1)")
    g.add_argument("--rho", type=float, default=0.6, help="AR correlation per unit offset")
    g.add_argument("--sigma-x2", type=float, default=1.0, help="field variance (not std-dev)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("corrupt", help="pass a field through a BSC or AWGN channel")
    c.add_argument("--channel", choices=("bsc", "awgn"), required=True)
    c.add_argument("--delta", type=float, default=0.1, help="BSC crossover probability")
    c.add_argument("--noise-variance", type=float, default=1.0, help="AWGN variance (not std-dev)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--in", dest="inp", required=True)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_corrupt)

    r = sub.add_parser("run", help="Monte Carlo loss of a scan and estimator",
                       description="Flags override the config file, which overrides defaults. "
                                   "Losses are per site; variances are variances, not std-devs.")
    r.add_argument("--config", help="key = value file with any of the options below")
    r.add_argument("--scan", help="raster|snake|hilbert|checker|greedy|random:SEED|ote:K")
    r.add_argument("--estimator", help="singlet|hmm-forward|window:K|gauss-opt")
    r.add_argument("--mode", choices=("filter", "predict", "predictor"))
    r.add_argument("--loss", choices=("hamming", "squared"))
    r.add_argument("--source", choices=("markov", "iid", "gauss-ar"))
    r.add_argument("--channel", choices=("bsc", "awgn"))
    for name in ("pi", "p", "delta", "sigma_x2", "sigma_n2", "rho"):
        r.add_argument("--" + name.replace("_", "-"), dest=name, type=float)
    for name in ("width", "height", "trials", "seed", "jobs"):
        r.add_argument("--" + name, dest=name, type=int)
    r.add_argument("--profile", help="write the mean per-step loss profile to this CSV")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bounds", help="evaluate bounds (entropies: bits for binary, nats for Gaussian)")
    b.add_argument("--which", choices=BOUND_CHOICES, required=True)
    b.add_argument("--params", help="comma-separated k=v, e.g. delta=0.25 or sigma_x2=1,sigma_n2=1")
    b.set_defaults(func=cmd_bounds)

    f = sub.add_parser("figures", help="write figure data as CSV")
    f.add_argument("--fig", choices=[str(i) for i in FIGURE_NUMBERS] + ["all"], required=True)
    f.add_argument("--out", default="figures")
    f.add_argument("--delta", type=float, default=0.25, help="crossover for the zeta figure")
    f.add_argument("--symbols", type=int, default=10 ** 6, help="Monte Carlo symbols per (pi, delta) cell")
    f.add_argument("--step", type=float, default=0.01, help="(pi, delta) grid step")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--jobs", type=int, default=0, help="worker processes (0 = all cores)")
    f.set_defaults(func=cmd_figures)

    u = sub.add_parser("universal", help="exponential-weighting universal scandiction trials")
    u.add_argument("--experts", help="JSON list of SCAN/PREDICTOR specs, e.g. [\"raster/last\"]")
    u.add_argument("--m", type=int, default=4, help="block side")
    u.add_argument("--n", type=int, default=32, help="field side")
    u.add_argument("--eta", default="auto")
    u.add_argument("--pi", type=float, default=0.1)
    u.add_argument("--delta", type=float, default=0.1)
    u.add_argument("--trials", type=int, default=100)
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("--jobs", type=int, default=0)
    u.add_argument("--out", help="per-trial CSV")
    u.set_defaults(func=cmd_universal)

    au = sub.add_parser("audit", help="check an inequality or identity numerically (exit 2 on failure)")
    au.add_argument("--which", choices=list(AUDITS) + ["all"], required=True)
    au.add_argument("--seed", type=int, default=0)
    au.add_argument("--jobs", type=int, default=0)
    au.set_defaults(func=cmd_audit)

    o = sub.add_parser("oracle", help="exact enumeration on tiny binary fields (test reproduction)")
    o.add_argument("--which", choices=("filter-loss", "best-order", "adaptive"), required=True)
    o.add_argument("--source", choices=("markov", "iid"), default="markov")
    o.add_argument("--width", type=int, default=3)
    o.add_argument("--height", type=int, default=1)
    o.add_argument("--pi", type=float, default=0.1)
    o.add_argument("--p", type=float, default=0.5)
    o.add_argument("--delta", type=float, default=0.1)
    o.add_argument("--mode", choices=("filter", "predict", "predictor"), default="filter")
    o.set_defaults(func=cmd_oracle)
    for name, sp in sub.choices.items():
        sp.set_defaults(subparser=sp)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.time()
    try:
        return args.func(args, argv, started)
    except (UsageError, ConfigError, ScandictionError, ValueError, FileNotFoundError) as exc:
        args.subparser.print_usage(sys.stderr)
        sys.stderr.write(f"scandict {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
