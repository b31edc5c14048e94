"""Command-line interface.

    pnglab dist table --which f0 --out f0.csv
    pnglab dist mean --which h --w-plus 1 --w-minus -1 --xmax 20
    pnglab sim png --t 10 --alpha-plus 0.5 --samples 1000 --seed 7 --out -
    pnglab exact png --t 4 --alpha-plus 0.5 --alpha-minus 0.5 --l-max 30 --out -
    pnglab compare --model png --regime png_tw --t 100 --samples 4000 --seed 1 --target fgue

Exit status: 0 success, 2 invalid input, 3 outside a numerical envelope.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import tempfile

from . import __version__
from . import exact as _exact
from . import transition as _transition

log = logging.getLogger("pnglab")

EXIT_OK, EXIT_INVALID, EXIT_ENVELOPE = 0, 2, 3

WHICH = {
    "fgue": "GUE",
    "fgoe": "GOE",
    "fgoe2": "GOE_SQUARED",
    "fgse": "GSE",
    "f0": "F0",
    "g": "G",
    "h": "H",
    "normal": "NORMAL",
    "normal2": "NORMAL_SQUARED",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# output helpers


def _write_text(path: str, text: str) -> None:
    """``-`` means stdout; files are replaced atomically."""
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".pnglab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _manifest(args, params: dict) -> None:
    rec = {
        "version": __version__,
        "command": " ".join(c for c in (args.command, getattr(args, "what", None)) if c),
        "seed": getattr(args, "seed", None),
        "params": params,
    }
    print(json.dumps(rec, sort_keys=True), file=sys.stderr)


def _params(args, *names) -> dict:
    return {n: getattr(args, n) for n in names if getattr(args, n, None) is not None}


# ---------------------------------------------------------------------------
# commands


def _painleve_table(args):
    from .painleve2 import DEFAULT_DOMAIN, default_table

    lo = DEFAULT_DOMAIN[0] if args.xmin is None else args.xmin
    hi = DEFAULT_DOMAIN[1] if args.xmax is None else args.xmax
    step = DEFAULT_DOMAIN[2] if args.step is None else args.step
    return default_table(lo, hi, step)


def _dist_params(kind: str, args) -> tuple:
    if kind == "G":
        if args.w is None:
            raise ValueError("--which g needs --w")
        return (args.w,)
    if kind == "H":
        if args.w_plus is None or args.w_minus is None:
            raise ValueError("--which h needs --w-plus and --w-minus")
        return (args.w_plus, args.w_minus)
    return ()


def cmd_dist(args) -> int:
    from .distributions import cdf_table

    _manifest(args, _params(args, "which", "w", "w_plus", "w_minus", "xmin", "xmax", "step"))
    if args.which == "painleve":
        if args.what != "table":
            raise ValueError("--which painleve only supports 'dist table'")
        buf = io.StringIO()
        _painleve_table(args).to_csv(buf)
        _write_text(args.out, buf.getvalue())
        return EXIT_OK
    kind = WHICH[args.which]
    params = _dist_params(kind, args)
    dt = cdf_table(_painleve_table(args), kind, params)
    if args.what == "table":
        _write_text(args.out, dt.csv_text(with_pdf=args.pdf))
    else:
        _write_text(args.out, dt.to_json() + "\n")
    return EXIT_OK


def cmd_sim(args) -> int:
    from . import sampler

    if args.what == "tasep":
        _manifest(args, _params(args, "q", "alpha_plus", "alpha_minus", "steps", "window", "update_rule", "index"))
        traj = []
        sampler.tasep_run(
            (args.q, args.alpha_plus, args.alpha_minus),
            args.steps,
            args.window,
            args.update_rule,
            args.seed,
            args.index,
            trajectory=traj,
        )
        buf = io.StringIO()
        buf.write("time,occupied\n")
        for t, bits in traj:
            buf.write(f"{t},{bits}\n")
        _write_text(args.out, buf.getvalue())
        return EXIT_OK
    if args.samples < 1:
        raise ValueError("--samples must be positive")
    if args.what == "png":
        if args.t is None:
            raise ValueError("sim png needs --t")
        _manifest(args, _params(args, "t", "alpha_plus", "alpha_minus", "samples"))
        vals = [
            sampler.longest_weak_chain(sampler.sample_png_config(args.t, args.alpha_plus, args.alpha_minus, args.seed, i))
            for i in range(args.samples)
        ]
    else:
        if args.n is None or args.q is None:
            raise ValueError("sim lpp needs --n and --q")
        _manifest(args, _params(args, "n", "q", "alpha_plus", "alpha_minus", "samples", "corner"))
        vals = [
            sampler.lpp_last_passage(
                sampler.sample_lpp(args.n, args.q, args.alpha_plus, args.alpha_minus, args.seed, i), args.corner
            )
            for i in range(args.samples)
        ]
    buf = io.StringIO()
    sampler.write_samples_csv(buf, vals)
    _write_text(args.out, buf.getvalue())
    return EXIT_OK


def cmd_exact(args) -> int:
    if args.l_max is None or args.l_max < 0:
        raise ValueError("--l-max must be given and non-negative")
    if args.what == "png":
        if args.t is None:
            raise ValueError("exact png needs --t")
        _manifest(args, _params(args, "t", "alpha_plus", "alpha_minus", "l_max"))
        res = _exact.png_cdf_exact(args.t, args.alpha_plus, args.alpha_minus, args.l_max)
    else:
        if args.n is None or args.q is None:
            raise ValueError("exact lpp needs --n and --q")
        _manifest(args, _params(args, "n", "q", "alpha_plus", "alpha_minus", "l_max"))
        res = _exact.lpp_cdf_exact(args.n, args.q, args.alpha_plus, args.alpha_minus, args.l_max)
    buf = io.StringIO()
    res.to_csv(buf)
    _write_text(args.out, buf.getvalue())
    if args.manifest:
        _write_text(args.manifest, res.manifest() + "\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    from .distributions import cdf_table
    from .harness import ScalingSpec, compare_report

    names = ("t", "n", "q", "alpha_plus", "alpha_minus", "w_plus", "w_minus")
    sp = _params(args, *names)
    spec = ScalingSpec.make(args.regime.upper(), **sp)
    kind = WHICH[args.target]
    tw = tuple(args.target_w or ())
    if kind in ("G", "H") and len(tw) != (1 if kind == "G" else 2):
        raise ValueError(f"--target {args.target} needs {1 if kind == 'G' else 2} --target-w value(s)")
    _manifest(args, dict(sp, model=args.model, regime=args.regime, samples=args.samples, target=args.target))
    target = cdf_table(_painleve_table(args), kind, tw)
    rep = compare_report(args.model.upper(), spec, args.samples, args.seed, target, threads=args.threads)
    _write_text(args.out, rep.to_json() + "\n")
    if args.csv:
        _write_text(args.csv, rep.to_csv())
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(p):
    p.add_argument("--config", help="key = value file; explicit flags win")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default PNGLAB_THREADS or CPU count)")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--log-level", default="WARNING")


def _grid_flags(p):
    p.add_argument("--xmin", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--step", type=float)


def _source_flags(p):
    p.add_argument("--alpha-plus", type=float, default=0.0)
    p.add_argument("--alpha-minus", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pnglab", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"pnglab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("dist", help="limiting distribution tables and moments")
    d.add_argument("what", choices=["table", "mean"])
    d.add_argument("--which", required=True, choices=sorted(WHICH) + ["painleve"])
    d.add_argument("--w", type=float)
    d.add_argument("--w-plus", type=float)
    d.add_argument("--w-minus", type=float)
    d.add_argument("--pdf", action="store_true", help="add a density column")
    _grid_flags(d)
    _common(d)
    d.set_defaults(func=cmd_dist)

    s = sub.add_parser("sim", help="Monte Carlo samples")
    s.add_argument("what", choices=["png", "lpp", "tasep"])
    s.add_argument("--t", type=float)
    s.add_argument("--n", type=int)
    s.add_argument("--q", type=float)
    _source_flags(s)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--corner", action="store_true", help="LPP: add the corner weight g(a+ a-)")
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--window", type=int, default=200)
    s.add_argument("--update-rule", default="sequential_right_to_left", choices=["parallel", "sequential_right_to_left"])
    s.add_argument("--index", type=int, default=0)
    _common(s)
    s.set_defaults(func=cmd_sim)

    e = sub.add_parser("exact", help="exact finite-size distribution functions")
    e.add_argument("what", choices=["png", "lpp"])
    e.add_argument("--t", type=float)
    e.add_argument("--n", type=int)
    e.add_argument("--q", type=float)
    _source_flags(e)
    e.add_argument("--l-max", type=int)
    e.add_argument("--manifest", help="also write the JSON run manifest here")
    _common(e)
    e.set_defaults(func=cmd_exact)

    c = sub.add_parser("compare", help="Monte Carlo against a limit law")
    c.add_argument("--model", required=True, choices=["png", "lpp", "PNG", "LPP"])
    c.add_argument("--regime", required=True, type=str.lower,
                   choices=["png_tw", "png_gauss", "lpp_tw", "lpp_gauss", "critical_png", "critical_lpp"])
    c.add_argument("--t", type=float)
    c.add_argument("--n", type=int)
    c.add_argument("--q", type=float)
    c.add_argument("--alpha-plus", type=float)
    c.add_argument("--alpha-minus", type=float)
    c.add_argument("--w-plus", type=float)
    c.add_argument("--w-minus", type=float)
    c.add_argument("--samples", type=int, default=4000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--target", required=True, choices=sorted(WHICH))
    c.add_argument("--target-w", type=float, action="append", help="w for g, or w+ then w- for h")
    c.add_argument("--csv", help="write the scaled samples here")
    _grid_flags(c)
    _common(c)
    c.set_defaults(func=cmd_compare)
    return ap


def _read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise _UsageError(f"{path}:{n}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _apply_config(parser, argv, args):
    """Re-parse with config values as defaults so that flags still win."""
    cfg = _read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for k, v in cfg.items():
        if k not in known or k in ("config", "what", "help"):
            raise _UsageError(f"unknown config key {k!r}")
        act = known[k]
        if act.const is True:  # store_true flags
            defaults[k] = v.lower() in ("1", "true", "yes", "on")
        elif act.type is not None:
            defaults[k] = act.type(v)
        else:
            defaults[k] = v
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = _apply_config(parser, argv, args)
        logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING))
        if args.threads is not None and args.threads < 1:
            raise ValueError("--threads must be at least 1")
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        return EXIT_INVALID
    except (_exact.EnvelopeError, _transition.EnvelopeError, _exact.PrecisionExhausted) as exc:
        print(f"pnglab: envelope: {exc}", file=sys.stderr)
        return EXIT_ENVELOPE
    except (ValueError, OSError) as exc:
        print(f"pnglab: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
