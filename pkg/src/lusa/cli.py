"""Command-line surface: lusa extract | populate | suitability | demo."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .pipeline import (
    PipelineConfig,
    PipelineConfigError,
    cmd_demo,
    cmd_extract,
    cmd_populate,
    cmd_suitability,
)


def _parse_weights(text: str) -> list[float]:
    try:
        return [float(w) for w in text.split(",") if w.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad weights list: {text!r}")


def _load_config(args) -> PipelineConfig:
    if args.config:
        config = PipelineConfig.from_json(Path(args.config))
        if args.out:
            config.output_dir = Path(args.out)
        return config
    if not args.out:
        raise PipelineConfigError("either --config or --out is required")
    return PipelineConfig.bundled(Path(args.out))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lusa",
        description="Extract land-use suitability criteria from regulation "
                    "text and build raster suitability maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    extract = sub.add_parser("extract", help="annotate a document corpus")
    extract.add_argument("--config", help="pipeline config JSON")
    extract.add_argument("--out", help="output directory (bundled fixtures)")
    extract.add_argument("--jobs", type=int, default=1,
                         help="parallel document workers")

    populate = sub.add_parser("populate",
                              help="populate the ontology from extraction output")
    populate.add_argument("--config", help="pipeline config JSON")
    populate.add_argument("--out", help="output directory (bundled fixtures)")

    suit = sub.add_parser("suitability", help="run a raster suitability scenario")
    suit.add_argument("scenario", help="scenario config JSON")
    suit.add_argument("--out", required=True, help="output directory")
    suit.add_argument("--weights", type=_parse_weights,
                      help="comma-separated factor weight overrides")

    demo = sub.add_parser("demo", help="run the full bundled pipeline")
    demo.add_argument("--out", required=True, help="output directory")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "extract":
            return cmd_extract(_load_config(args), jobs=args.jobs)
        if args.command == "populate":
            return cmd_populate(_load_config(args))
        if args.command == "suitability":
            return cmd_suitability(Path(args.scenario), Path(args.out),
                                   weights=args.weights)
        if args.command == "demo":
            return cmd_demo(Path(args.out))
    except PipelineConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
