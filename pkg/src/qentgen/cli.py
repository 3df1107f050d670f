"""Command-line front end.

Exit codes: 0 DoesNotGenerate, 3 Generates, 4 Boundary, 1 usage or input
error, 2 internal fault. Commands that only emit data (scan-t0, dephase,
markov-limit) exit 0 on success. Reports go to stdout; log lines go to
stderr.
"""
import argparse
import csv
import json
import logging
import sys
import traceback

import numpy as np

from .baths import DeltaFamily, WienerFieldModel, delta_family_value, fit_three_term
from .config import ConfigError, load_config
from .criterion import OptimizerOptions, Regime, Verdict, decide, scan_t0
from .dynamics import (
    DephasingModel,
    dephasing_exact,
    dephasing_mc_series,
    dephasing_rk4_series,
)
from .oracle import Grid, Hybrid, Random, certify
from .qlin import ValidationError

log = logging.getLogger("qentgen")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAULT = 2
EXIT_CODES = {
    Verdict.DOES_NOT_GENERATE: 0,
    Verdict.GENERATES: 3,
    Verdict.BOUNDARY: 4,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _num(x):
    return repr(float(x))


def _writer(out):
    return csv.writer(out, lineterminator="\n")


def _float_list(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    return vals


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _t0_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected start:stop:steps")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    if steps < 1 or start < 0 or stop < start:
        raise argparse.ArgumentTypeError("need 0 <= start <= stop and steps >= 1")
    return np.linspace(start, stop, steps) if steps > 1 else np.array([start])


def _optimizer(args):
    return OptimizerOptions(starts=args.starts, seed=args.seed, grid=args.grid)


# -- commands ------------------------------------------------------------------

def cmd_check(args, out):
    cfg = load_config(args.config)
    rep = decide(cfg.model, args.regime, _optimizer(args), t0=args.t0)
    d = rep.to_dict()
    if args.csv:
        w = _writer(out)
        w.writerow(list(d))
        w.writerow([json.dumps(v) if isinstance(v, list) else v for v in d.values()])
    else:
        out.write(json.dumps(d) + "\n")
    if not rep.converged:
        log.warning("optimizer did not converge within max_iter; value is the best found")
    return EXIT_CODES[rep.verdict]


def cmd_oracle(args, out):
    cfg = load_config(args.config)
    if args.samples is not None:
        if args.samples < 1:
            raise ValidationError(f"--samples must be >= 1, got {args.samples}")
        if args.seed is None:
            raise ValidationError("random sampling needs an explicit --seed")
        sampling = Random(args.samples, args.seed)
    elif args.grid_n is not None:
        if args.grid_n < 1:
            raise ValidationError(f"--grid-n must be >= 1, got {args.grid_n}")
        sampling = Grid(args.grid_n)
    else:
        sampling = Hybrid()
    rep = certify(cfg.model, args.regime, dt=args.dt, sampling=sampling, t0=args.t0)
    out.write(json.dumps(rep.to_dict()) + "\n")
    return EXIT_CODES[rep.verdict]


def cmd_scan_t0(args, out):
    cfg = load_config(args.config)
    if not isinstance(cfg.model, WienerFieldModel):
        raise ValidationError(f"scan-t0 needs a wiener config, got {cfg.variant!r}")
    w = _writer(out)
    w.writerow(["t0", "value", "verdict"])
    for t0, rep in scan_t0(cfg.model, args.t0, _optimizer(args)):
        w.writerow([_num(t0), _num(rep.value), rep.verdict.value])
    return EXIT_OK


def cmd_dephase(args, out):
    if not args.epsilon:
        raise ValidationError("--epsilon list is empty")
    if any(not e > 0 for e in args.epsilon):
        raise ValidationError("epsilon values must be > 0")
    if not args.t > 0:
        raise ValidationError(f"--t must be > 0, got {args.t}")
    if args.mc is not None and args.seed is None:
        raise ValidationError("--mc needs an explicit --seed")
    if args.mc is not None and args.mc < 100:
        raise ValidationError(f"--mc needs at least 100 trajectories, got {args.mc}")
    times = np.linspace(0.0, args.t, args.steps + 1)
    rho0 = np.full((2, 2), 0.5, dtype=complex)
    w = _writer(out)
    head = ["epsilon", "t", "exact", "rk4", "abs_dev"]
    if args.mc is not None:
        head += ["mc", "mc_stderr"]
    w.writerow(head)
    for eps in args.epsilon:
        model = DephasingModel(epsilon=eps, strength=args.strength)
        rk4 = dephasing_rk4_series(model, rho0, times)[:, 0, 1].real / 0.5
        exact = [dephasing_exact(model, rho0, t)[0, 1].real / 0.5 for t in times]
        if args.mc is not None:
            _, mc, err = dephasing_mc_series(model, args.t, args.steps, args.mc, args.seed)
        for i, t in enumerate(times):
            row = [_num(eps), _num(t), _num(exact[i]), _num(rk4[i]), _num(abs(exact[i] - rk4[i]))]
            if args.mc is not None:
                row += [_num(mc[i].real), _num(err[i])]
            w.writerow(row)
        log.info("epsilon=%g: small-time coefficient %.12g", eps, model.smalltime_coefficient())
    return EXIT_OK


def cmd_markov_limit(args, out):
    cfg = load_config(args.config)
    if not isinstance(cfg.model, DeltaFamily):
        raise ValidationError(f"markov-limit needs a delta_family config, got {cfg.variant!r}")
    if not args.eps:
        raise ValidationError("--eps list is empty")
    if any(not e > 0 for e in args.eps):
        raise ValidationError("eps values must be > 0")
    opts = _optimizer(args)
    w = _writer(out)
    w.writerow(["epsilon", "d_eps_at_0", "criterion_value"])
    d0 = []
    for e in args.eps:
        fam = cfg.model.with_epsilon(e)
        d0.append(float(delta_family_value(fam, 0.0)))
        w.writerow([_num(e), _num(d0[-1]), _num(decide(fam, opts=opts).value)])
    if len(set(args.eps)) >= 3:
        (a0, b0, c0), res = fit_three_term(args.eps, d0)
        log.info("fit eps*a0 + b0 + c0/eps: a0=%.12g b0=%.12g c0=%.12g residual=%.3g",
                 a0, b0, c0, res)
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    common.add_argument("--threads", type=_positive_int, default=1,
                        help="worker cap (evaluation is vectorized in one process)")
    p = _Parser(prog="entgen", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def regime(sp):
        sp.add_argument("--regime", type=Regime.parse, default=None,
                        help="Markovian or NonMarkovian (default: from the config)")
        sp.add_argument("--t0", type=float, default=0.0, help="initial time for correlation models")

    def optimizer(sp):
        sp.add_argument("--starts", type=_positive_int, default=64)
        sp.add_argument("--grid", action="store_true", help="add an exhaustive angle grid")
        sp.add_argument("--seed", type=int, default=0, help="seed of the start-point sequence")

    c = sub.add_parser("check", parents=[common], help="decide the criterion for a config")
    c.add_argument("config")
    regime(c)
    optimizer(c)
    fmt = c.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report (default)")
    fmt.add_argument("--csv", action="store_true", help="one-row CSV report")
    c.set_defaults(func=cmd_check)

    o = sub.add_parser("oracle", parents=[common], help="brute-force partial-transpose certification")
    o.add_argument("config")
    regime(o)
    o.add_argument("--dt", type=float, default=None)
    o.add_argument("--samples", type=int, default=None, help="random product states (needs --seed)")
    o.add_argument("--grid-n", type=int, default=None, help="plain grid with N nodes per angle")
    o.add_argument("--seed", type=int, default=None)
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("scan-t0", parents=[common], help="criterion along a grid of initial times")
    s.add_argument("config")
    s.add_argument("--t0", type=_t0_range, required=True, metavar="START:STOP:STEPS")
    optimizer(s)
    s.set_defaults(func=cmd_scan_t0)

    d = sub.add_parser("dephase", parents=[common], help="OU dephasing: closed form, RK4 and Monte Carlo")
    d.add_argument("--epsilon", type=_float_list, required=True)
    d.add_argument("--t", type=float, required=True, help="final time")
    d.add_argument("--steps", type=_positive_int, default=100, help="output intervals")
    d.add_argument("--strength", type=float, default=1.0)
    d.add_argument("--mc", type=int, default=None, metavar="N_TRAJ")
    d.add_argument("--seed", type=int, default=None)
    d.set_defaults(func=cmd_dephase)

    m = sub.add_parser("markov-limit", parents=[common], help="epsilon sweep of a delta family")
    m.add_argument("config")
    m.add_argument("--eps", type=_float_list, required=True)
    optimizer(m)
    m.set_defaults(func=cmd_markov_limit)
    return p


def _setup_logging(verbose):
    # a handler of our own, so -v works even when the host already configured logging
    for h in [h for h in log.handlers if getattr(h, "_entgen", False)]:
        log.removeHandler(h)
    h = logging.StreamHandler(sys.stderr)
    h.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    h._entgen = True
    log.addHandler(h)
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"entgen: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return int(e.code or 0)
    _setup_logging(args.verbose)
    try:
        return args.func(args, out)
    except (ConfigError, ValidationError) as e:
        print(f"entgen: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        traceback.print_exc(file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
