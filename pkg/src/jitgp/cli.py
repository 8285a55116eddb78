"""Command-line entry point.

Subcommands mirror the pipeline stages; each runs the chain up to and
including the named stage, reusing cached stages whose inputs are unchanged.
Exit codes: 0 ok, 1 configuration/usage, 2 bad input data, 3 unexpected.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError, JitgpError
from .pipeline import STAGE_ORDER, load_config, run_pipeline

ENV_SEED = "JITGP_SEED"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="jitgp", description="defect prediction from developer graphs")
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name, brief in [
        ("ingest", "parse the change source into the canonical table"),
        ("label", "attach defect labels (runs through ingest)"),
        ("graph", "build the contribution graph and its projection"),
        ("features", "extract per-change feature rows"),
        ("train", "split, scale, resample, and fit classifiers"),
        ("evaluate", "score the held-out rows and write report.json"),
        ("run", "full pipeline plus plot data"),
    ]:
        p = sub.add_parser(name, help=brief, description=brief)
        p.add_argument("--config", required=True, help="key=value config file")
        p.add_argument("--out-dir", help="override out_dir from the config")
        p.add_argument("--setting", type=int, choices=(1, 2), help="feature setting")
        p.add_argument(
            "--classifier", help="logreg, rf, gbdt, or all (overrides the config)"
        )
        p.add_argument("--seed", type=int, help="master seed (overrides config and env)")
        p.add_argument("--no-grid", action="store_true", help="skip hyperparameter search")
    return parser


def _overrides(args) -> dict:
    out = {}
    if args.out_dir is not None:
        out["out_dir"] = args.out_dir
    if args.setting is not None:
        out["setting"] = args.setting
    if args.classifier is not None:
        out["classifier"] = args.classifier
    if args.no_grid:
        out["grid"] = False
    env_seed = os.environ.get(ENV_SEED)
    if env_seed is not None:
        try:
            out["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(f"{ENV_SEED} must be an integer, got {env_seed!r}") from None
    if args.seed is not None:
        out["seed"] = args.seed
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise ConfigError("a subcommand is required; see jitgp --help")
        cfg = load_config(args.config, _overrides(args))
        result = run_pipeline(cfg, upto=args.command)
    except JitgpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - map anything unexpected to 3
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 3

    for stage in STAGE_ORDER:
        if stage in result.stages:
            note = "cached" if result.stages[stage]["cached"] else "ran"
            print(f"{stage}: {note}")
    if result.report is not None:
        print(f"wrote {result.report_path}")
        for kind in sorted(result.report["classifiers"]):
            m = result.report["classifiers"][kind]["metrics"]
            print(
                f"{kind}: precision={m['precision']:.4f} recall={m['recall']:.4f} "
                f"f1={m['f1']:.4f} mcc={m['mcc']:.4f} auc_pr={m['auc_pr']:.4f}"
            )
    for path in result.plot_paths:
        print(f"plot data: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
