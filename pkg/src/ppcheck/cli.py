"""Command-line entry point: ``ppcheck <subcommand> ...``.

Exit status is 0 whenever the requested work completed, whatever verdicts
were reached; 1 for operational errors (unreadable input, missing models,
bad flags) and 2 for argument errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import jsonio
from .corpus import VERDICTS, generate_corpus, write_decision_table
from .cr_checker import CR_TASKS, default_lexicon
from .detector import DETECTOR_THRESHOLD, MAX_ACTIONS
from .errors import PpcheckError
from .app_package import parse_package
from .pipeline import ModelSet, PipelineConfig, run_batch, run_pipeline
from .psi_mapping import load_mapping
from .requirements import TR6_TIMEOUT
from .training import DETECTOR_TASK, train_models

log = logging.getLogger("ppcheck")


def _add_analysis_flags(p):
    p.add_argument("--mapping", type=Path, help="permission/library mapping file (default: bundled)")
    p.add_argument("--models", type=Path, help="trained model-set directory")
    p.add_argument("--oracle", action="store_true",
                   help="use the rule-based classifiers instead of trained models")
    p.add_argument("--report-out", type=Path, help="write the JSON report here instead of stdout")
    p.add_argument("--ma", type=int, default=MAX_ACTIONS, help="exploration action budget")
    p.add_argument("--tr6-timeout", type=int, default=TR6_TIMEOUT,
                   help="seconds the policy page must survive")
    p.add_argument("--threshold", type=float, default=None,
                   help=f"detector threshold (default: the model's own, {DETECTOR_THRESHOLD})")
    p.add_argument("--seed", type=int, default=0,
                   help="recorded in the report; the simulation itself is deterministic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppcheck",
                                     description="Privacy-policy compliance checks for app packages.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the pipeline on one package directory")
    p.add_argument("package", type=Path)
    _add_analysis_flags(p)

    p = sub.add_parser("batch", help="run the pipeline on every package in a directory")
    p.add_argument("corpus", type=Path)
    _add_analysis_flags(p)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("train", help="train the detector and content-task models")
    p.add_argument("--task", action="append", choices=(DETECTOR_TASK,) + CR_TASKS,
                   help="train only this task (repeatable; default: all)")
    p.add_argument("--corpus", type=Path,
                   help="JSON file {\"texts\": [...], \"labels\": [...]} replacing the bundled "
                        "corpus (requires exactly one --task)")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("gen-corpus", help="generate labelled synthetic packages")
    p.add_argument("--spec", help="verdict counts, e.g. 'Clean=5,Fail_TR6=3' or a JSON file")
    p.add_argument("--decision-table", action="store_true",
                   help="write the 32 technical-requirement decision-table packages instead")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("validate-mapping", help="check a mapping file and print a summary")
    p.add_argument("path", type=Path, nargs="?")
    return parser


def _config(args) -> PipelineConfig:
    if args.ma < 0:
        raise PpcheckError("--ma must be non-negative")
    if args.tr6_timeout < 0:
        raise PpcheckError("--tr6-timeout must be non-negative")
    return PipelineConfig(max_actions=args.ma, tr6_timeout=args.tr6_timeout,
                          detector_threshold=args.threshold)


def _models(args) -> ModelSet:
    if args.oracle:
        return ModelSet.oracle()
    if args.models is None:
        raise PpcheckError("no models: pass --models DIR or --oracle")
    return ModelSet.load(args.models)


def _emit(doc, path):
    text = jsonio.dumps(doc)
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def parse_spec(raw: str) -> dict:
    """``Clean=5,Fail_TR6=3``, a JSON object, or a path to a JSON file."""
    if raw is None:
        return {v: 20 for v in VERDICTS}
    path = Path(raw)
    if path.is_file():
        return dict(jsonio.load(path))
    raw = raw.strip()
    if raw.startswith("{"):
        return dict(jsonio.loads_strict(raw))
    spec = {}
    for item in filter(None, (s.strip() for s in raw.split(","))):
        name, _, count = item.partition("=")
        if name not in VERDICTS or not count.strip().isdigit():
            raise PpcheckError(f"bad spec entry {item!r}")
        spec[name] = int(count)
    return spec


def cmd_analyze(args):
    store = load_mapping(args.mapping)
    report = run_pipeline(parse_package(args.package), store, _models(args), _config(args))
    doc = report.to_document()
    doc["config"]["seed"] = args.seed
    _emit(doc, args.report_out)
    log.info("%s: %s", report.app_id, report.verdict)


def cmd_batch(args):
    if not args.corpus.is_dir():
        raise PpcheckError(f"not a directory: {args.corpus}")
    store = load_mapping(args.mapping)
    doc = run_batch(args.corpus, store, _models(args), _config(args), jobs=max(1, args.jobs))
    doc["seed"] = args.seed
    _emit(doc, args.report_out)
    log.info("analyzed %d packages, %d errors", doc["analyzed"], len(doc["errors"]))


def cmd_train(args):
    corpora = None
    if args.corpus is not None:
        if not args.task or len(args.task) != 1:
            raise PpcheckError("--corpus needs exactly one --task")
        doc = jsonio.load(args.corpus)
        corpora = {args.task[0]: (doc["texts"], doc["labels"])}
    manifest = train_models(args.out, seed=args.seed, tasks=args.task, corpora=corpora,
                            lexicon=default_lexicon())
    for task, entry in sorted(manifest["tasks"].items()):
        log.info("%s: held-out accuracy %.3f", task, entry["held_out"]["accuracy"])


def cmd_gen_corpus(args):
    if args.decision_table:
        write_decision_table(args.out)
        return
    try:
        generate_corpus(parse_spec(args.spec), args.seed, args.out)
    except ValueError as exc:
        raise PpcheckError(str(exc)) from None


def cmd_validate_mapping(args):
    store = load_mapping(args.path)
    summary = {"permissions": len(store.permission_names), "libraries": len(store.library_names),
               "psi_kinds": len(store.all_psi()),
               "apis": sum(len(store.apis_for([p], [])) for p in store.permission_names)
               + sum(len(store.apis_for([], [lib])) for lib in store.library_names)}
    sys.stdout.write(jsonio.dumps(summary))


COMMANDS = {"analyze": cmd_analyze, "batch": cmd_batch, "train": cmd_train,
            "gen-corpus": cmd_gen_corpus, "validate-mapping": cmd_validate_mapping}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        COMMANDS[args.command](args)
    except (PpcheckError, OSError, KeyError) as exc:
        print(f"ppcheck: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
