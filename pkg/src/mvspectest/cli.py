"""Command-line front end.

    mvspectest test      --data y.csv --model lstar2_normal --B 999
    mvspectest pit       --data y.csv --model iid_normal_full --theta-file theta.json
    mvspectest simulate  --dgp B1 --T 100 --seed 7 -o y.csv
    mvspectest mc        --dgp A1 --alpha 0.9 --null h0a --reps 200 --B 99

Settings resolve as: flags > environment (MVSPECTEST_SEED, MVSPECTEST_WORKERS)
> ``--config`` JSON file > defaults. The config file is a flat JSON object
whose keys are the RunConfig field names; the ``config`` record of a test
report has the same shape and can be passed back to reproduce a run.

Exit codes: 0 success, 1 usage or input error, 2 fatal estimation failure.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .bootstrap import BootstrapConfig, run_bootstrap
from .core import CsvFormatError, read_csv, write_csv
from .models import KINDS, EstimationError, InitPolicy, ModelFamily, Params, estimate, pit_sequence, simulate
from .montecarlo import DGP_IDS, NULLS, DgpSpec, curve_csv, data_stream, dgp_simulate, run_experiment
from .stats import d1_stats

EXIT_OK, EXIT_USAGE, EXIT_ESTIMATION = 0, 1, 2
ENV_SEED = "MVSPECTEST_SEED"
ENV_WORKERS = "MVSPECTEST_WORKERS"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = None
    model: str = "iid_normal_full"
    dof: float = None
    data_path: str = None
    theta_file: str = None
    order: list = None
    B: int = 999
    seed: int = 0
    k_max: int = 2
    levels: list = (0.10, 0.05, 0.01)
    statistics: list = None
    max_redraws: int = 5
    burn_in: int = 50
    output_path: str = None
    report_path: str = None
    workers: int = None
    dgp: str = None
    alpha: float = None
    T: int = 100
    null: str = "h0b"
    reps: int = 200
    alphas: list = None

    def validate(self):
        if self.command not in ("test", "pit", "simulate", "mc"):
            raise UsageError(f"unknown command {self.command!r}")
        if self.model not in KINDS:
            raise UsageError(f"unknown model {self.model!r}; choose from {', '.join(KINDS)}")
        if self.command in ("test", "pit") and not self.data_path:
            raise UsageError(f"{self.command} needs --data")
        if self.command == "mc" and not self.dgp:
            raise UsageError("mc needs --dgp")
        if self.command == "simulate" and not (self.dgp or self.theta_file):
            raise UsageError("simulate needs --dgp, or --model with --theta-file")
        if self.dgp is not None and self.dgp not in DGP_IDS:
            raise UsageError(f"unknown DGP {self.dgp!r}")
        if self.null not in NULLS and self.null not in KINDS:
            raise UsageError(f"unknown null {self.null!r}")
        for name in ("B", "reps", "T", "k_max"):
            if int(getattr(self, name)) < 1:
                raise UsageError(f"{name} must be >= 1")
        if self.workers is not None and int(self.workers) < 1:
            raise UsageError("workers must be >= 1")
        if not all(0 < float(a) < 1 for a in self.levels):
            raise UsageError("levels must lie in (0, 1)")


def _csv_list(cast):
    def parse(text):
        try:
            return [cast(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"cannot parse list {text!r}") from None
    return parse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="mvspectest", description="Specification tests for multivariate time series "
                "via the dynamic Rosenblatt transform.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="flat JSON file of RunConfig fields")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int, help="process budget (default: available cores)")
        sp.add_argument("-o", "--output", dest="output_path", help="output file (default: stdout)")

    def model_args(sp):
        sp.add_argument("--model", choices=KINDS)
        sp.add_argument("--dof", type=float, help="fix the t degrees of freedom")
        sp.add_argument("--order", type=_csv_list(int), help="1-based stacking order, e.g. 2,1")

    t = sub.add_parser("test", help="estimate, transform, bootstrap p-values")
    common(t)
    model_args(t)
    t.add_argument("--data", dest="data_path")
    t.add_argument("--B", type=int)
    t.add_argument("--k-max", dest="k_max", type=int)
    t.add_argument("--levels", type=_csv_list(float))
    t.add_argument("--stats", dest="statistics", type=_csv_list(str))
    t.add_argument("--max-redraws", dest="max_redraws", type=int)
    t.add_argument("--burn-in", dest="burn_in", type=int)
    t.add_argument("--report", dest="report_path", help="newline-delimited JSON report")

    pt = sub.add_parser("pit", help="write the PIT sequence as one-column CSV")
    common(pt)
    model_args(pt)
    pt.add_argument("--data", dest="data_path")
    pt.add_argument("--theta-file", dest="theta_file", help="flat JSON parameters; estimated if omitted")

    s = sub.add_parser("simulate", help="simulate a design or a parametrized model")
    common(s)
    model_args(s)
    s.add_argument("--dgp", choices=DGP_IDS)
    s.add_argument("--alpha", type=float)
    s.add_argument("--T", type=int)
    s.add_argument("--theta-file", dest="theta_file")
    s.add_argument("--burn-in", dest="burn_in", type=int)

    m = sub.add_parser("mc", help="Monte Carlo rejection rates for a design")
    common(m)
    m.add_argument("--dgp", choices=DGP_IDS)
    m.add_argument("--alpha", type=float)
    m.add_argument("--alphas", type=_csv_list(float), help="alpha grid; emits a plot-ready curve CSV")
    m.add_argument("--null", choices=sorted(NULLS) + list(KINDS))
    m.add_argument("--T", type=int)
    m.add_argument("--reps", type=int)
    m.add_argument("--B", type=int)
    m.add_argument("--levels", type=_csv_list(float))
    m.add_argument("--order", type=_csv_list(int))
    return p


def resolve_config(args, environ=None):
    """Merge defaults, config file, environment and flags (in increasing priority)."""
    environ = os.environ if environ is None else environ
    cfg = asdict(RunConfig())
    names = {f.name for f in fields(RunConfig)}
    ns = vars(args)
    if ns.get("config"):
        try:
            with open(ns["config"], encoding="utf-8") as fh:
                filecfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        filecfg.pop("record", None)
        unknown = set(filecfg) - names
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(filecfg)
    for key, var, cast in (("seed", ENV_SEED, int), ("workers", ENV_WORKERS, int)):
        if environ.get(var):
            try:
                cfg[key] = cast(environ[var])
            except ValueError:
                raise UsageError(f"{var} must be an integer") from None
    for key, value in ns.items():
        if key in names and value is not None:
            cfg[key] = value
    cfg["command"] = ns["command"]
    if cfg["workers"] is None:
        cfg["workers"] = os.cpu_count() or 1
    rc = RunConfig(**cfg)
    rc.levels = list(rc.levels)
    rc.validate()
    return rc


def _family(rc, d=2):
    try:
        return ModelFamily(rc.model, d, rc.dof)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _theta_dim(rc):
    """Dimension implied by the number of sigma entries in the theta file."""
    with open(rc.theta_file, encoding="utf-8") as fh:
        raw = json.load(fh)
    raw = raw.get("params", raw)
    k = sum(1 for key in raw if key.startswith("sigma"))
    d = int(round((np.sqrt(8 * k + 1) - 1) / 2))
    if d < 1 or d * (d + 1) // 2 != k:
        raise UsageError("theta file does not contain a full set of sigma entries")
    return d


def _load_data(rc):
    values, _ = read_csv(rc.data_path)
    return values


def _load_theta(rc, family):
    try:
        with open(rc.theta_file, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read theta file: {exc}") from None
    try:
        return Params.from_dict(family, raw.get("params", raw))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(rc, text):
    if rc.output_path:
        with open(rc.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _bootstrap_config(rc):
    return BootstrapConfig(B=rc.B, seed=rc.seed, max_redraws=rc.max_redraws,
                           alpha_levels=tuple(rc.levels),
                           statistics=tuple(rc.statistics) if rc.statistics else None,
                           k_max=rc.k_max, order=tuple(rc.order) if rc.order else None,
                           burn_in=rc.burn_in, workers=rc.workers)


def report_records(rc, result):
    """Newline-delimited JSON records describing a test run."""
    cfg = {"record": "config", **asdict(rc)}
    fit = result.fit
    yield cfg
    yield {"record": "fit", "family": fit.family.kind, "d": fit.family.d,
           "params": fit.params.to_dict(), "loglik": fit.loglik,
           "converged": fit.converged, "iterations": fit.iterations}
    for name in result.names:
        yield {"record": "statistic", "name": name, "value": result.observed[name],
               "p_value": result.p_values[name]}
    yield {"record": "summary", "order": list(rc.order) if rc.order else list(range(1, fit.family.d + 1)),
           "B": rc.B, "B_effective": result.B, "n_failures": result.n_failures,
           "redraws": result.redraw_log["total_redraws"], "wall_time_s": round(result.wall_time, 3)}


def format_result_table(result):
    lines = [f"{'statistic':<12}{'value':>14}{'p-value':>10}"]
    for name in result.names:
        lines.append(f"{name:<12}{result.observed[name]:>14.6g}{result.p_values[name]:>10.4f}")
    return "\n".join(lines)


def cmd_test(rc):
    data = _load_data(rc)
    family = _family(rc, data.shape[1])
    result = run_bootstrap(family, data, _bootstrap_config(rc))
    records = list(report_records(rc, result))
    text = "".join(json.dumps(r) + "\n" for r in records)
    if rc.report_path:
        with open(rc.report_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    if rc.output_path:
        _emit(rc, text)
    else:
        print(f"model {family.kind}, T={data.shape[0]}, order {records[-1]['order']}, "
              f"B={result.B} ({result.n_failures} failed)")
        print("parameters: " + ", ".join(f"{k}={v:.4g}" for k, v in result.fit.params.to_dict().items()))
        print(format_result_table(result))
    return EXIT_OK


def cmd_pit(rc):
    data = _load_data(rc)
    family = _family(rc, data.shape[1])
    params = _load_theta(rc, family) if rc.theta_file else estimate(family, data).params
    u = pit_sequence(family, params, data, rc.order)
    _emit(rc, write_csv(None, u, header=["u"]))
    n = u.size
    cvm, ks = d1_stats(u)
    print(f"n={n} mean={u.mean():.4f} (expected 0.5 +/- {3 / np.sqrt(12 * n):.4f}) "
          f"var={u.var():.4f} (expected {1 / 12:.4f}) D1_KS={ks:.4f} D1_CvM={cvm:.4f}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(rc):
    if rc.dgp:
        y = dgp_simulate(DgpSpec(rc.dgp, rc.alpha, rc.T), data_stream(rc.seed, 0))
        header = ["y1", "y2"]
    else:
        family = _family(rc, _theta_dim(rc))
        params = _load_theta(rc, family)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(rc.seed)))
        y = simulate(family, params, rc.T, rng, InitPolicy(burn_in=rc.burn_in))
        header = [f"y{i + 1}" for i in range(family.d)]
    _emit(rc, write_csv(None, y, header=header))
    return EXIT_OK


def cmd_mc(rc):
    cfg = _bootstrap_config(rc)
    null = rc.null
    if null in KINDS:
        null = ModelFamily(null, 2, rc.dof)
    if rc.alphas:
        results = [run_experiment(DgpSpec(rc.dgp, a, rc.T), null, rc.reps, cfg) for a in rc.alphas]
        for r in results:
            print(f"alpha={r.alpha:g}")
            print(r.format_table())
        _emit(rc, curve_csv(results))
        return EXIT_OK
    result = run_experiment(DgpSpec(rc.dgp, rc.alpha, rc.T), null, rc.reps, cfg)
    print(f"{result.dgp} vs {result.null}: T={result.T}, reps={result.reps}, B={result.B}, "
          f"seed={result.seed}, {result.wall_time:.0f}s", file=sys.stderr)
    print(result.format_table(), file=sys.stderr if not rc.output_path else sys.stdout)
    _emit(rc, result.to_csv())
    return EXIT_OK


COMMANDS = {"test": cmd_test, "pit": cmd_pit, "simulate": cmd_simulate, "mc": cmd_mc}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rc = resolve_config(args)
        return COMMANDS[rc.command](rc)
    except (UsageError, CsvFormatError, ValueError, OSError) as exc:
        print(f"mvspectest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EstimationError as exc:
        print(f"mvspectest: estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION


if __name__ == "__main__":
    sys.exit(main())
