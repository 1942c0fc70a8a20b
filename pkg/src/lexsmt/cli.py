"""Command line entry point: `smt <stage> --config FILE`."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline, synth
from .corpus import CorpusError
from .lexicon import LexiconParseError

COMMANDS = pipeline.STAGES + ("matrix",)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smt", description="Phrase-based SMT experiment pipeline")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=f"run the {name} stage" if name != "matrix" else "run every experiment")
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--experiment", action="append", default=None,
                        help="experiment name; repeat for several (default: all)")
        sp.add_argument("--stage-overrides", nargs="*", default=[], metavar="SECTION.KEY=VALUE")
        if name in ("translate", "evaluate"):
            sp.add_argument("--weights", choices=("tuned", "untuned"), default=None,
                            help="default: tuned when the experiment has tuning on")
        if name == "matrix":
            sp.add_argument("--report", type=Path, default=None,
                            help="result table path (default: <output_dir>/matrix.txt)")
        sp.add_argument("-v", "--verbose", action="store_true")

    sp = sub.add_parser("synth", help="write a synthetic corpus, resources and ladder config")
    sp.add_argument("directory", type=Path)
    sp.add_argument("--vocab-size", type=int, default=200)
    sp.add_argument("--word-order", choices=synth.WORD_ORDERS, default="monotone")
    sp.add_argument("--inflection-rate", type=float, default=0.0)
    sp.add_argument("--oov-fraction", type=float, default=0.0)
    sp.add_argument("--noise", type=float, default=0.0)
    sp.add_argument("--train", type=int, default=2000)
    sp.add_argument("--dev", type=int, default=100)
    sp.add_argument("--test", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-v", "--verbose", action="store_true")
    return p


def _select(configs, names):
    if not names:
        return configs
    by_name = {c.name: c for c in configs}
    missing = [n for n in names if n not in by_name]
    if missing:
        raise pipeline.ConfigError(f"no experiment named {', '.join(missing)}; have {', '.join(by_name)}")
    return [by_name[n] for n in names]


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            spec = synth.SynthSpec(
                vocab_size=args.vocab_size, word_order=args.word_order,
                inflection_rate=args.inflection_rate, oov_fraction=args.oov_fraction, seed=args.seed,
            )
            path = pipeline.write_synthetic_setup(args.directory, spec, args.train, args.dev, args.test, args.noise)
            print(path)
            return 0
        configs = _select(pipeline.load_configs(args.config, args.stage_overrides), args.experiment)
        if args.command == "matrix":
            report = args.report or configs[0].workdir.parent / "matrix.txt"
            rows = pipeline.run_matrix(configs, report)
            sys.stdout.write(report.read_text(encoding="utf-8"))
            failed = [r for r in rows if r.error]
            for r in failed[::2]:
                print(f"smt: experiment {r.system} failed: {r.error}", file=sys.stderr)
            return 1 if failed else 0
        status = 0
        for cfg in configs:
            try:
                outputs = pipeline.run_stage(args.command, cfg, getattr(args, "weights", None))
            except (pipeline.MissingArtifact, CorpusError, LexiconParseError, ValueError, OSError) as exc:
                print(f"smt: {cfg.name}: {args.command}: {exc}", file=sys.stderr)
                status = 1
                continue
            for path in outputs:
                print(path)
            if args.command == "evaluate":
                sys.stdout.write(outputs[0].read_text(encoding="utf-8"))
        return status
    except (pipeline.ConfigError, OSError, ValueError) as exc:
        print(f"smt: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
