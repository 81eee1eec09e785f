"""Command line interface.

Subcommands::

    lowred measure       polynomial JSON -> measurement CSV
    lowred recover       measurement CSV -> polynomial JSON with diagnostics
    lowred sweep         sweep config JSON (and/or flags) -> sweep CSV
    lowred bounds        BoundReport JSON
    lowred search-worst  polynomial JSON

Exit status is 0 on success, 1 on invalid input and 2 on numerical failure.
"""

import argparse
import json
import logging
import sys

from . import _numeric as nx
from .bounds import VARIANTS, admissible_noise, error_bound
from .errors import NumericalError, ValidationError
from .harness import POLY_SOURCES, SweepConfig, run_sweep, search_worst, sweep_csv
from .measurement import NOISE_MODELS, MeasurementVector, measure
from .polyspace import Polynomial
from .recovery import recover

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1 instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _levels(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid level list {text!r}") from None


def _read(path):
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_measure(args):
    with nx.precision(args.dps):
        p = Polynomial.from_json(_read(args.input))
        if args.dps:
            p = p.to_mp()
        _write(measure(p).to_csv(), args.out)


def cmd_recover(args):
    with nx.precision(args.dps):
        m = MeasurementVector.from_csv(_read(args.input), mp=bool(args.dps))
        res = recover(m, args.method, args.grid_size, args.noise_level)
        _write(json.dumps(res.to_dict(), indent=2) + "\n", args.out)


def cmd_sweep(args):
    data = json.loads(_read(args.config)) if args.config else {}
    if not isinstance(data, dict):
        raise ValidationError("sweep config must be a JSON object")
    overrides = {
        "d": args.d, "seed": args.seed, "method": args.method, "grid_size": args.grid_size,
        "noise_model": args.noise_model, "noise_levels": args.levels,
        "trials_per_level": args.trials, "alpha": args.alpha, "variant": args.variant,
        "poly_source": args.poly_source, "poly_path": args.poly_path, "dps": args.dps,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.relative:
        data["relative_levels"] = True
    for key in ("d", "noise_levels"):
        if key not in data:
            raise ValidationError(f"sweep needs {key!r} (config file or flag)")
    rows = run_sweep(SweepConfig.from_dict(data))
    _write(sweep_csv(rows), args.out)


def cmd_bounds(args):
    eps = args.eps
    if eps is None:
        eps = admissible_noise(args.d, args.alpha, args.norm, args.variant)
    rep = error_bound(args.d, args.alpha, eps, args.norm, args.variant,
                      c_tilde_term=args.c_tilde_term, strict=False)
    _write(rep.to_json(indent=2) + "\n", args.out)


def cmd_search_worst(args):
    p = search_worst(args.d, args.iters, args.seed, batch=args.batch, grid_size=args.grid_size)
    _write(p.to_json(indent=2) + "\n", args.out)


def build_parser():
    parser = _Parser(prog="lowred", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", metavar="PATH", help="output file (default stdout)")

    p = sub.add_parser("measure", help="circle measurements of a polynomial")
    p.add_argument("--input", metavar="PATH", help="polynomial JSON (default stdin)")
    p.add_argument("--dps", type=int, help="evaluate with mpmath at this many digits")
    common(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("recover", help="recover a polynomial from measurements")
    p.add_argument("--input", metavar="PATH", help="measurement CSV (default stdin)")
    p.add_argument("--method", choices=["phaseprop", "kernel"], default="phaseprop")
    p.add_argument("--grid-size", type=int)
    p.add_argument("--noise-level", type=float,
                   help="declared noise bound; refuse if the sample floor is too small")
    p.add_argument("--dps", type=int, help="parse and recover with mpmath at this many digits")
    common(p)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("sweep", help="noise sweep; flags override the config file")
    p.add_argument("--config", metavar="PATH", help="SweepConfig JSON")
    p.add_argument("--d", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--method", choices=["phaseprop", "kernel"])
    p.add_argument("--grid-size", type=int)
    p.add_argument("--noise-model", choices=NOISE_MODELS)
    p.add_argument("--levels", type=_levels, metavar="a,b,c")
    p.add_argument("--relative", action="store_true",
                   help="levels are multiples of the admissible noise")
    p.add_argument("--trials", type=int, metavar="N")
    p.add_argument("--alpha", type=float)
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--poly-source", choices=POLY_SOURCES)
    p.add_argument("--poly-path", metavar="PATH")
    p.add_argument("--dps", type=int, help="mpmath digits (0 forces doubles)")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", help="constants and error bound as JSON")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--variant", choices=VARIANTS, default="lemma")
    p.add_argument("--eps", type=float, help="noise level (default: the admissible noise)")
    p.add_argument("--norm", type=float, default=1.0, help="||p|| (default 1)")
    p.add_argument("--c-tilde-term", choices=["d", "sqrt_d"], default="d")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("search-worst", help="random walk towards a small max-min value")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--grid-size", type=int)
    common(p)
    p.set_defaults(func=cmd_search_worst)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"lowred: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except json.JSONDecodeError as exc:
        print(f"lowred: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"lowred: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
