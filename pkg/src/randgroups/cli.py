"""Command line: ``randgroups sample|certify|sweep|bipartite``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .bipartite import ExperimentSpec, frequency_experiment
from .fileformat import FormatError, ValidationError, encode, read_presentation
from .harness import ConfigError, SweepConfig, certify, read_config, run_sweep
from .presentation import ModelParams, parse_density
from .sampler import SamplerError, sample

log = logging.getLogger("randgroups")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_sample(args) -> int:
    try:
        d = parse_density(args.d)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"bad density {args.d!r}: {e}") from None
    params = ModelParams(args.model, args.n, args.k, d, args.seed)
    P = sample(params, positive_base=args.positive_base)
    _write(encode(P), args.output)
    log.info("sampled %d relators", len(P))
    return EXIT_OK


def cmd_certify(args) -> int:
    P = read_presentation(args.file)
    out = certify(P, witnesses=not args.no_witnesses, lam=parse_density(args.lam))
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = SweepConfig.parse(Path(args.config).read_text(encoding="utf-8"))
    if args.workers is not None:
        config = replace(config, workers=args.workers)
    if args.output in (None, "-"):
        sys.stdout.write(run_sweep(config))
    else:
        run_sweep(config, args.output, resume=args.resume)
    return EXIT_OK


BIPARTITE_SCHEMA = {"family": "str", "sizes": "ints", "trials": "int", "seed": "int",
                    "eps": "frac", "m": "int", "d": "frac"}


def cmd_bipartite(args) -> int:
    kw = read_config(Path(args.spec).read_text(encoding="utf-8"), BIPARTITE_SCHEMA,
                     ("family", "sizes", "trials"))
    try:
        spec = ExperimentSpec(**kw)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    res = frequency_experiment(spec)
    _write(res.rows_csv(), args.output)
    if args.summary:
        _write(res.summary_csv(), args.summary)
    elif args.output not in (None, "-"):
        sys.stdout.write(res.summary_csv())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="randgroups", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", help="draw a random presentation")
    s.add_argument("--model", choices=["standard", "positive"], default="standard")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--d", required=True, help="density as p/q or a decimal string")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--positive-base", choices=["n", "2n-1"], default="n")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sample)

    c = sub.add_parser("certify", help="analyze a presentation file, print JSON")
    c.add_argument("file")
    c.add_argument("--no-witnesses", action="store_true")
    c.add_argument("--lambda", dest="lam", default="1/6")
    c.set_defaults(func=cmd_certify)

    w = sub.add_parser("sweep", help="run a config file, write CSV")
    w.add_argument("config")
    w.add_argument("-o", "--output")
    w.add_argument("--workers", type=int)
    w.add_argument("--resume", action="store_true")
    w.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bipartite", help="random bipartite connectivity experiment")
    b.add_argument("spec")
    b.add_argument("-o", "--output")
    b.add_argument("--summary")
    b.set_defaults(func=cmd_bipartite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"randgroups: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, ValidationError, ConfigError, SamplerError, ValueError, OSError) as e:
        print(f"randgroups: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
