"""Command-line entry point: ``bottypes <subcommand>``.

Exit codes: 0 success, 1 usage error, 2 input error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .corpus import IngestionError
from .pipeline import Pipeline, PipelineConfig, StageError, fixture_config

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_STAGE = 0, 1, 2, 3

log = logging.getLogger("bottypes")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2, which here means bad input
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise UsageError(f"--set expects key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def _config(args: argparse.Namespace) -> PipelineConfig:
    if args.config and args.fixture:
        raise UsageError("use either --config or --fixture, not both")
    if args.fixture:
        cfg = fixture_config()
    elif args.config:
        cfg = PipelineConfig.load(args.config)
    else:
        cfg = PipelineConfig()
    changes = dict(_parse_override(s) for s in args.set or [])
    if args.out:
        changes["output_dir"] = args.out
    if args.seed is not None:
        changes["seed"] = args.seed
    if changes:
        try:
            d = cfg.to_dict()
            unknown = sorted(set(changes) - set(d))
            if unknown:
                raise UsageError(f"unknown config keys: {unknown}")
            d.update(changes)
            cfg = PipelineConfig.from_dict(d)
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
    return cfg


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON pipeline config")
    p.add_argument("--fixture", action="store_true", help="use the bundled 200-user demo corpus")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--seed", type=int, help="random seed (overrides seed)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key; VALUE is parsed as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bottypes", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    stage_help = {
        "ingest": "read the tweet stream and user profiles",
        "geotag": "resolve user locations to US / China / RestOfWorld / Unknown",
        "botscore": "import or compute bot probabilities and apply the threshold",
        "classify": "find news bots among the bots",
        "graph": "build and prune the all-communication network",
        "cluster": "Louvain clusters, bridging bots and final bot types",
        "centrality": "betweenness, eigenvector and total-degree centrality",
        "topics": "term frequencies per region and user type",
        "bend": "BEND maneuver scores per user and group",
        "report": "proportion and centrality summary tables",
    }
    for name, text in stage_help.items():
        p = sub.add_parser(name, help=text)
        _add_config_args(p)

    p = sub.add_parser("run", help="the full pipeline")
    _add_config_args(p)
    p.add_argument("--from", dest="start", choices=Pipeline.STAGES, help="resume from this stage using persisted outputs")
    p.add_argument("--skip", action="append", choices=Pipeline.STAGES, default=[], help="skip a stage")

    p = sub.add_parser("write-config", help="print a config (defaults, or --fixture) as JSON")
    _add_config_args(p)

    p = sub.add_parser("train-headline-model", help="fit the headline classifier")
    p.add_argument("--headlines", help="one headline per line (default: bundled)")
    p.add_argument("--non-headlines", help="one non-news text per line (default: bundled)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--model", required=True, help="output JSON model path")

    p = sub.add_parser("train-bot-model", help="fit the baseline bot forest")
    p.add_argument("--labels", help="CSV of account features plus a label column (default: synthetic set)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=10)
    p.add_argument("--model", required=True, help="output JSON model path")
    return parser


def _read_labeled(path: str):
    from .botdetect import FEATURE_NAMES, AccountFeatures

    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    out = []
    for i, r in enumerate(rows, start=2):
        try:
            vals = {}
            for name in FEATURE_NAMES:
                if name == "has_default_profile_image":
                    vals[name] = r[name].strip().lower() in ("1", "true", "yes")
                elif name == "description_length":
                    vals[name] = int(r[name])
                else:
                    vals[name] = float(r[name])
            out.append((AccountFeatures(**vals), r["label"]))
        except (KeyError, ValueError) as exc:
            raise IngestionError(f"{path}:{i}: bad row ({exc})") from exc
    return out


def _train_headline(args) -> int:
    from .newsbot import default_training_paths, load_training_texts, train_headline_model

    h_default, n_default = default_training_paths()
    heads = load_training_texts(args.headlines or h_default)
    other = load_training_texts(args.non_headlines or n_default)
    try:
        model = train_headline_model(heads, other, seed=args.seed, alpha=args.alpha)
    except ValueError as exc:
        raise IngestionError(str(exc)) from exc
    model.save(args.model)
    print(f"held-out accuracy {model.heldout_accuracy:.4f}; model written to {args.model}")
    return EXIT_OK


def _train_bot(args) -> int:
    from .botdetect import train_baseline
    from .synth import labeled_account_features

    labeled = _read_labeled(args.labels) if args.labels else labeled_account_features(seed=args.seed)
    try:
        model = train_baseline(labeled, seed=args.seed, n_trees=args.n_trees, max_depth=args.max_depth)
    except ValueError as exc:
        raise IngestionError(str(exc)) from exc
    model.save(args.model)
    print(f"trained on {len(labeled)} accounts; model written to {args.model}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "train-headline-model":
            return _train_headline(args)
        if args.command == "train-bot-model":
            return _train_bot(args)
        cfg = _config(args)
        if args.command == "write-config":
            sys.stdout.write(cfg.to_json())
            return EXIT_OK
        pipe = Pipeline(cfg)
        if args.command == "run":
            stages = list(Pipeline.STAGES)
            if args.start:
                stages = stages[stages.index(args.start):]
            manifest = pipe.run(stages, skip=tuple(args.skip))
            print(f"completed {len(manifest.stages)} stages into {pipe.out}")
            if "report" in manifest.stages:
                print((pipe.out / "report" / "proportions.txt").read_text(encoding="utf-8"), end="")
        else:
            pipe.out.mkdir(parents=True, exist_ok=True)
            pipe.run_stage(args.command)
            print(f"{args.command} done; outputs under {pipe.out}")
        return EXIT_OK
    except UsageError as exc:
        print(f"bottypes: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        print(f"bottypes: {exc}", file=sys.stderr)
        return EXIT_INPUT if exc.input_error else EXIT_STAGE
    except IngestionError as exc:
        print(f"bottypes: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"bottypes: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
