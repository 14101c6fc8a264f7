"""Command-line interface.

Exit status: 0 success (an absent threshold is a success), 1 usage error,
2 infeasible input, 3 a verification check failed.

Option values come from, in increasing priority: built-in defaults, a
``--config`` file of ``key = value`` lines, and command-line flags.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from contextlib import contextmanager
from typing import Optional

from . import capacity as cap
from . import simulate as sim
from . import sweep as sw
from . import threshold as th
from ._json import round_floats

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pairs(text: str) -> list[tuple[float, float]]:
    """Parse ``"b:eta,b:eta"``."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        b, _, eta = item.partition(":")
        if not eta:
            raise ValueError(f"expected b:eta, got {item!r}")
        out.append((float(b), float(eta)))
    if not out:
        raise ValueError("empty list")
    return out


def _benchmark(text: str) -> th.Benchmark:
    try:
        return th.Benchmark.parse(text)
    except ValueError:
        raise ValueError(f"unknown benchmark {text!r} (use chom, chet, sqz or fock)") from None


# name -> (type, help)
OPTIONS = {
    "nbar": (float, "mean photon number per bandwidth per second"),
    "vne": (float, "squeezed-quadrature variance of each source (shot-noise units)"),
    "b": (float, "excess noise on the anti-squeezed quadrature"),
    "eta": (float, "detection efficiency including propagation loss"),
    "benchmark": (_benchmark, "benchmark: chom, chet, sqz or fock"),
    "trials": (int, "Monte Carlo trials"),
    "seed": (int, "RNG seed"),
    "scheme": (sim.Scheme, "coherent-homodyne, coherent-heterodyne or dense-coding"),
    "scenarios": (_pairs, "comma-separated b:eta pairs"),
    "curves": (_pairs, "comma-separated b:eta pairs"),
    "lo": (float, "grid start"),
    "hi": (float, "grid end"),
    "points": (int, "grid points"),
    "spacing": (str, "linear or log"),
    "workers": (int, "worker threads"),
    "signal_scale": (float, "multiply Alice's signal variance (calibration fault injection)"),
    "format": (str, "csv or json"),
    "out": (str, "output path (default stdout)"),
}

COMMANDS = {
    "capacity": (["nbar", "vne", "b", "eta"],
                 dict(vne=1.0, b=0.0, eta=1.0, format="json"),
                 "all capacities at one operating point"),
    "optimal": (["nbar", "b"], dict(b=0.0, format="json"),
                "optimal squeezing and dense-coding capacity"),
    "threshold": (["nbar", "b", "eta", "benchmark"],
                  dict(b=0.0, eta=1.0, benchmark=th.Benchmark.SQUEEZED_HOMODYNE, format="json"),
                  "largest squeezed variance that still beats a benchmark"),
    "crossover": (["benchmark", "b", "eta"],
                  dict(b=0.0, eta=1.0, format="json"),
                  "photon number above which dense coding beats a benchmark"),
    "sweep-fig2": (["nbar", "scenarios", "lo", "hi", "points", "spacing", "workers"],
                   dict(nbar=5.0, scenarios=list(sw.FIG2_SCENARIOS), lo=0.02, hi=1.0,
                        points=200, spacing="linear", workers=1, format="csv"),
                   "dense-coding capacity against squeezing"),
    "sweep-fig3": (["benchmark", "curves", "lo", "hi", "points", "spacing", "workers"],
                   dict(benchmark=th.Benchmark.SQUEEZED_HOMODYNE, curves=list(sw.FIG3_CURVES),
                        lo=0.1, hi=1e4, points=200, spacing="log", workers=1, format="csv"),
                   "threshold squeezing against photon number"),
    "simulate": (["scheme", "nbar", "vne", "b", "eta", "trials", "seed", "workers", "signal_scale"],
                 dict(scheme=sim.Scheme.DENSE_CODING, vne=1.0, b=0.0, eta=1.0, trials=1_000_000,
                      seed=0, workers=None, signal_scale=1.0, format="json"),
                 "Monte Carlo run with the three-step verification"),
}
REQUIRED = {"capacity": ["nbar"], "optimal": ["nbar"], "threshold": ["nbar"],
            "crossover": ["benchmark"], "simulate": ["nbar"]}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cvdense", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs.required = True
    for name, (opts, _, help_) in COMMANDS.items():
        p = subs.add_parser(name, help=help_, description=help_)
        for opt in opts:
            _, h = OPTIONS[opt]
            p.add_argument("--" + opt.replace("_", "-"), dest=opt, default=None, help=h)
        p.add_argument("--format", dest="format", default=None, choices=["csv", "json"])
        if name == "simulate":
            p.add_argument("--json", dest="format", action="store_const", const="json",
                           help="same as --format json")
        p.add_argument("--out", dest="out", default=None, help=OPTIONS["out"][1])
        p.add_argument("--config", dest="config", default=None, help="key = value file")
    return parser


def _read_config(path: str) -> dict:
    cp = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_string("[cvdense]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    return {k.replace("-", "_"): v for k, v in cp["cvdense"].items()}


def resolve(command: str, ns: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags into typed option values."""
    opts, defaults, _ = COMMANDS[command]
    values = dict(defaults)
    raw = {}
    if ns.config:
        cfg = _read_config(ns.config)
        # one file may serve several commands; only keys no command knows are errors
        unknown = set(cfg) - set(OPTIONS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        raw.update({k: v for k, v in cfg.items() if k in set(opts) | {"format", "out"}})
    raw.update({k: v for k, v in vars(ns).items()
                if k in set(opts) | {"format", "out"} and v is not None})
    for key, text in raw.items():
        conv = OPTIONS[key][0]
        try:
            values[key] = conv(text) if isinstance(text, str) else text
        except ValueError as exc:
            raise UsageError(f"bad value for {key}: {exc}") from None
    missing = [k for k in REQUIRED.get(command, []) if values.get(k) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m for m in missing))
    if values.get("format") not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {values.get('format')!r}")
    return values


@contextmanager
def _output(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _emit_point(values: dict, record: dict) -> None:
    with _output(values.get("out")) as fh:
        if values["format"] == "json":
            fh.write(json.dumps(round_floats(record), indent=2) + "\n")
        else:
            rec = {k: v for k, v in round_floats(record).items() if not isinstance(v, (dict, list))}
            fh.write(",".join(rec) + "\n")
            fh.write(",".join("" if v is None else str(v) for v in rec.values()) + "\n")


def _emit_rows(values: dict, rows) -> None:
    with _output(values.get("out")) as fh:
        if values["format"] == "json":
            fh.write(sw.to_json(rows) + "\n")
        else:
            sw.write_csv(rows, fh)


def cmd_capacity(v: dict) -> int:
    try:
        ch = cap.DenseCodingChannel(v["nbar"], v["vne"], v["b"], v["eta"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = cap.capacity_report(ch)
    _emit_point(v, {
        "n_bar": ch.n_bar, "v_ne": ch.v_ne, "b": ch.b, "eta": ch.eta,
        "feasible": rep.feasible,
        "C_c": rep.coherent_homodyne, "C_ch": rep.coherent_heterodyne,
        "C_sh": rep.squeezed_homodyne, "C_Fock": rep.fock, "C_dc": rep.dense_coding,
        "C_dc_opt": rep.dense_coding_optimal, "v_ne_opt": rep.v_ne_opt,
        "signal_budget": rep.signal_budget, "budget": rep.budget,
    })
    return EXIT_OK


def cmd_optimal(v: dict) -> int:
    try:
        c, v_opt = cap.dense_coding_impure_optimal(v["nbar"], v["b"])
    except cap.InfeasibleChannelError as exc:
        print(f"cvdense: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit_point(v, {
        "n_bar": v["nbar"], "b": v["b"], "v_ne_opt": v_opt, "C_dc_opt": c,
        "squeezing_percent": cap.squeezing_percent(v_opt),
        "squeezing_db": cap.squeezing_db(v_opt),
    })
    return EXIT_OK


def cmd_threshold(v: dict) -> int:
    try:
        r = th.v_max(v["nbar"], v["b"], v["eta"], v["benchmark"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit_point(v, {
        "benchmark": r.benchmark.value, "n_bar": r.n_bar, "b": r.b, "eta": r.eta,
        "v_max": r.v_max, "at_edge": r.at_edge, "v_peak": r.v_peak,
        "iterations": r.iterations, "residual": r.residual if r.found else None,
        "squeezing_percent": cap.squeezing_percent(r.v_max) if r.found else None,
    })
    return EXIT_OK


def cmd_crossover(v: dict) -> int:
    bench = v["benchmark"]
    if not (v["b"] >= 0 and 0 < v["eta"] <= 1):
        raise UsageError("need b >= 0 and 0 < eta <= 1")
    n = th.crossover_photon_number(bench, v["b"], v["eta"])
    peak = th.peak_snr(n, v["b"], v["eta"]) if n else None
    _emit_point(v, {
        "benchmark": bench.value, "b": v["b"], "eta": v["eta"], "n_bar": n,
        "v_ne_peak": peak[0] if peak else None,
        "v_ne_opt": cap.optimal_squeezing(n) if n is not None else None,
    })
    return EXIT_OK


def _grid(v: dict, axis: str) -> list:
    try:
        return list(sw.SweepSpec(axis, v["lo"], v["hi"], v["points"], v["spacing"]).grid())
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_sweep_fig2(v: dict) -> int:
    rows = sw.sweep_fig2(v["nbar"], v["scenarios"], _grid(v, "v_ne"), max(1, v["workers"]))
    _emit_rows(v, rows)
    return EXIT_OK


def cmd_sweep_fig3(v: dict) -> int:
    rows = sw.sweep_fig3(v["benchmark"], v["curves"], _grid(v, "n_bar"), max(1, v["workers"]))
    _emit_rows(v, rows)
    return EXIT_OK


def cmd_simulate(v: dict) -> int:
    try:
        ch = cap.DenseCodingChannel(v["nbar"], v["vne"], v["b"], v["eta"])
        cfg = sim.SimConfig(v["scheme"], ch, v["trials"], v["seed"], v["signal_scale"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        r = sim.run(cfg, workers=v["workers"])
    except cap.InfeasibleChannelError as exc:
        print(f"cvdense: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    report = sim.verify_channel(r)
    with _output(v.get("out")) as fh:
        if v["format"] == "json":
            fh.write(sim.result_json(r, report) + "\n")
        else:
            rec = round_floats(r.to_dict())
            for c in report.checks:
                rec[f"check_{c.name}"] = "pass" if c.passed else "fail"
            fh.write(",".join(rec) + "\n")
            fh.write(",".join(str(x) for x in rec.values()) + "\n")
    return EXIT_OK if report.passed else EXIT_VERIFY


HANDLERS = {
    "capacity": cmd_capacity,
    "optimal": cmd_optimal,
    "threshold": cmd_threshold,
    "crossover": cmd_crossover,
    "sweep-fig2": cmd_sweep_fig2,
    "sweep-fig3": cmd_sweep_fig3,
    "simulate": cmd_simulate,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        values = resolve(ns.command, ns)
        return HANDLERS[ns.command](values)
    except UsageError as exc:
        print(f"cvdense {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
