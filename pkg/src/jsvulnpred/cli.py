"""Command-line pipeline: extract, mine, label, assemble, train, evaluate, compare."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from typing import Sequence

import numpy as np

from . import config as cfg
from .dataset import (
    Dataset,
    JoinReport,
    SplitSpec,
    concat,
    dataset_csv,
    join,
    label_from_fix,
    labels_csv,
    load_fixes,
    read_dataset,
    read_external_dataset,
)
from .dataset.split import split_indices
from .dataset.table import read_feature_table, read_label_table
from .errors import ConfigError, DataError, JsVulnError, RepositoryError
from .evaluation import build_contingency, confusion, grid_search, ir_measures, mcnemar
from .evaluation.search import fit_resampled, split_config
from .evaluation.report import (
    MCNEMAR_COLUMNS,
    RESULT_COLUMNS,
    config_label,
    mcnemar_csv,
    mcnemar_row,
    result_row,
    results_csv,
    text_table,
)
from .history import MinerConfig, mine, process_csv
from .history.state import PROCESS_COLUMNS
from .learners import ALGORITHMS, HyperGrid, learner_class
from .sources import load_directory, load_revision
from .static import STATIC_COLUMNS, StaticConfig, compute_static, static_csv

log = logging.getLogger("jsvulnpred")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CONFIG = 4
EXIT_DATA = 5
EXIT_GIT = 6

PREDICTION_COLUMNS = ["project", "path", "name", "start_line", "end_line", "truth", "prediction", "score"]


class UsageError(Exception):
    pass


def write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def write_run_config(output: str, command: str, args: dict, config: dict) -> None:
    """Record the resolved configuration next to an output file."""
    stem = os.path.splitext(output)[0] if not os.path.isdir(output) else os.path.join(output, "run")
    record = {"command": command, "arguments": args, "config": config}
    write_text(stem + ".run.json", json.dumps(record, indent=2, sort_keys=True) + "\n")


def _static_config(config: dict) -> StaticConfig:
    return StaticConfig.from_mapping(config["static"])


def _excludes(config: dict) -> tuple[str, ...]:
    return tuple(config["history"]["excludes"])


# -- subcommands -------------------------------------------------------------


def cmd_extract_static(args, config) -> int:
    if args.rev:
        files, diags = load_revision(args.source, args.rev, _excludes(config))
    else:
        if not os.path.isdir(args.source):
            raise FileNotFoundError(f"no such directory: {args.source}")
        files, diags = load_directory(args.source, _excludes(config))
    for d in diags:
        log.warning(d)
    rows = compute_static(files, _static_config(config))
    write_text(args.output, static_csv(rows))
    if args.functions_json:
        from .inventory import dump_functions

        write_text(args.functions_json, dump_functions(files) + "\n")
    write_run_config(args.output, "extract-static", vars_of(args), config)
    print(f"{len(rows)} functions in {len(files)} files -> {args.output}")
    return EXIT_OK


def cmd_mine_history(args, config) -> int:
    h = config["history"]
    miner_cfg = MinerConfig(float(h["similarity"]), int(h["min_tokens"]), tuple(h["excludes"]))
    result = mine(args.repo, args.until, miner_cfg)
    for d in result.diagnostics:
        log.warning(d)
    write_text(args.output, process_csv(result.rows))
    write_run_config(args.output, "mine-history", vars_of(args), config)
    print(f"{len(result.rows)} functions over {result.commits} commits -> {args.output}")
    return EXIT_OK


def cmd_label(args, config) -> int:
    fixes = load_fixes(args.fixes)
    results = []
    for fix in fixes:
        res = label_from_fix(fix, repo=args.repo, excludes=_excludes(config))
        for d in res.diagnostics:
            log.warning(d)
        results.append(res)
    write_text(args.output, labels_csv(results))
    write_run_config(args.output, "label", vars_of(args), config)
    vulnerable = sum(len(r.vulnerable) for r in results)
    total = sum(len(r.labels) for r in results)
    empty = sum(r.empty for r in results)
    print(f"{vulnerable} of {total} functions labeled vulnerable ({empty} empty patches) -> {args.output}")
    return EXIT_OK


def cmd_assemble(args, config) -> int:
    if not (len(args.static) == len(args.process) == len(args.labels)) or not args.static:
        raise UsageError("give --static, --process and --labels the same number of times")
    report = JoinReport()
    parts = []
    for s, p, lab in zip(args.static, args.process, args.labels):
        static = read_feature_table(read_text(s), STATIC_COLUMNS, s)
        process = read_feature_table(read_text(p), PROCESS_COLUMNS, p)
        labels, projects = read_label_table(read_text(lab), lab)
        parts.append(join(static, process, labels, projects, report))
    ds = concat(parts)
    write_text(args.output, dataset_csv(ds))
    report_path = os.path.splitext(args.output)[0] + ".join.txt"
    write_text(report_path, "\n".join(report.lines()) + "\n")
    write_run_config(args.output, "assemble", vars_of(args), config)
    dropped = len(report.static_only) + len(report.process_only) + len(report.unlabeled)
    print(f"{len(ds)} samples ({ds.positives} vulnerable), {dropped} unmatched rows -> {args.output}")
    return EXIT_OK


def load_any_dataset(args) -> Dataset:
    text = read_text(args.data)
    if args.mapping or args.external:
        mapping = cfg.read_structured(args.mapping) if args.mapping else {}
        return read_external_dataset(text, mapping, args.data)
    return read_dataset(text, args.data)


def feature_subset(ds: Dataset, which: str) -> Dataset:
    if which == "all":
        return ds
    cols = [c for c in ds.columns if c in (STATIC_COLUMNS if which == "static" else PROCESS_COLUMNS)]
    if not cols:
        raise DataError(f"dataset has no {which} feature columns")
    return ds.select(cols)


def write_predictions(path: str, ds: Dataset, pred, scores) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PREDICTION_COLUMNS)
    for i, key in enumerate(ds.keys):
        score = "" if scores is None else repr(round(float(scores[i]), 10))
        writer.writerow(
            [key.project, key.path, key.name, key.start_line, key.end_line, int(ds.y[i]), int(pred[i]), score]
        )
    write_text(path, buf.getvalue())


def cmd_train(args, config) -> int:
    algo = learner_class(args.algo).name
    ds = feature_subset(load_any_dataset(args), args.features)
    seed = int(config["seed"])
    sp = config["split"]
    spec = SplitSpec(float(sp["train"]), float(sp["dev"]), float(sp["test"]), int(sp["k"]), seed)
    if args.grid:
        grid = HyperGrid.from_mapping(algo, cfg.read_structured(args.grid) or {})
    else:
        grid = HyperGrid.default(algo)
    rs = config["resample"]
    if "resample_mode" not in grid.grid and rs["mode"] != "none":
        grid = HyperGrid(algo, {**grid.grid, "resample_mode": [rs["mode"]], "resample_ratio": [rs["ratio"]]})
    search = config["search"]
    objective = args.objective or search["objective"]
    results = grid_search(
        algo, grid, ds, spec, objective=objective, mode=args.mode or search["mode"],
        semantics=rs["semantics"], workers=int(search["workers"]),
    )
    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    for r in results:
        if r.error is None:
            rows.append(result_row(config_label(algo, r.config), r.cm, r.metrics))
        else:
            rows.append([config_label(algo, r.config)] + [""] * 8)
    write_text(os.path.join(args.out_dir, "grid_results.csv"), results_csv(rows))
    errors = [r for r in results if r.error is not None]
    if errors:
        write_text(
            os.path.join(args.out_dir, "grid_errors.txt"),
            "".join(f"{r.config_key}\t{r.error}\n" for r in errors),
        )
    best = next((r for r in results if r.error is None), None)
    if best is None:
        raise DataError(f"every grid configuration failed; first error: {results[0].error}")

    params, plan = split_config(best.config, rs["semantics"])
    tr, dv, te = split_indices(ds.y, spec)
    model = fit_resampled(
        algo, params, plan, ds.X[tr], ds.y[tr], seed, dev=(ds.X[dv], ds.y[dv]), columns=list(ds.columns)
    )
    model.info = {"config": best.config, "objective": objective, "features": args.features}
    write_text(os.path.join(args.out_dir, "model.json"), model.to_json() + "\n")
    test = ds.subset(te)
    pred = model.predict(test.X, test.columns)
    write_predictions(os.path.join(args.out_dir, "predictions.csv"), test, pred, model.scores(test.X))
    cm = confusion(test.y, pred)
    m = ir_measures(cm)
    write_text(
        os.path.join(args.out_dir, "test_results.csv"),
        results_csv([result_row(config_label(algo, best.config), cm, m)]),
    )
    write_run_config(args.out_dir, "train", vars_of(args), config)
    print(
        f"{algo} test: accuracy {m.percent('accuracy')} precision {m.percent('precision')} "
        f"recall {m.percent('recall')} F {m.percent('f_measure')} "
        f"(TP {cm.TP} TN {cm.TN} FP {cm.FP} FN {cm.FN}) best {json.dumps(best.config, sort_keys=True)}"
    )
    return EXIT_OK


def read_predictions(path: str) -> tuple[list[tuple], np.ndarray | None, np.ndarray | None]:
    """Keys plus truth and prediction columns (either may be absent)."""
    reader = csv.DictReader(io.StringIO(read_text(path)))
    header = reader.fieldnames or []
    truth_col = "truth" if "truth" in header else ("label" if "label" in header else None)
    pred_col = "prediction" if "prediction" in header else None
    keys, truth, pred = [], [], []
    for n, row in enumerate(reader, 2):
        keys.append(tuple(row.get(c, "") for c in ("project", "path", "name", "start_line", "end_line")))
        try:
            if truth_col:
                truth.append(int(row[truth_col]))
            if pred_col:
                pred.append(int(row[pred_col]))
        except ValueError:
            raise DataError(f"{path}:{n}: labels must be integers") from None
    return (
        keys,
        np.array(truth, dtype=int) if truth_col else None,
        np.array(pred, dtype=int) if pred_col else None,
    )


def cmd_evaluate(args, config) -> int:
    rows = []
    for path in args.predictions:
        _, truth, pred = read_predictions(path)
        if truth is None or pred is None:
            raise DataError(f"{path}: needs truth and prediction columns")
        cm = confusion(truth, pred)
        rows.append(result_row(path, cm, ir_measures(cm)))
    text = results_csv(rows)
    if args.output:
        write_text(args.output, text)
        write_run_config(args.output, "evaluate", vars_of(args), config)
    sys.stdout.write(text_table(RESULT_COLUMNS, rows))
    return EXIT_OK


def cmd_mcnemar(args, config) -> int:
    keys_a, truth_a, pred_a = read_predictions(args.a)
    keys_b, _, pred_b = read_predictions(args.b)
    if pred_a is None or pred_b is None:
        raise DataError("both prediction files need a prediction column")
    if args.truth:
        keys_t, truth, _ = read_predictions(args.truth)
    else:
        keys_t, truth = keys_a, truth_a
    if truth is None:
        raise DataError("no truth column found")
    if not (keys_a == keys_b == keys_t):
        raise DataError("prediction files do not cover the same samples in the same order")
    alpha = float(args.alpha if args.alpha is not None else config["mcnemar"]["alpha"])
    exact = bool(args.exact or config["mcnemar"]["exact"])
    table = build_contingency(truth, pred_a, pred_b)
    res = mcnemar(table, alpha, exact=exact)
    name = args.name or f"{os.path.basename(args.a)} vs {os.path.basename(args.b)}"
    row = mcnemar_row(name, res)
    if args.output:
        write_text(args.output, mcnemar_csv([row]))
        write_run_config(args.output, "mcnemar", vars_of(args), config)
    print(f"contingency {table.ct}")
    sys.stdout.write(text_table(MCNEMAR_COLUMNS, [row]))
    return EXIT_OK


def cmd_report(args, config) -> int:
    header, rows = None, []
    for path in args.results:
        reader = csv.reader(io.StringIO(read_text(path)))
        head = next(reader, None)
        if head is None:
            raise DataError(f"{path}: empty file")
        if header is None:
            header = head
        elif head != header:
            raise DataError(f"{path}: columns differ from {args.results[0]}")
        rows.extend(reader)
    if header == RESULT_COLUMNS and args.sort:
        def f_key(r):
            return -float(r[8]) if r[8] not in ("", "n/a") else float("inf")

        rows.sort(key=f_key)
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows([header] + rows)
    if args.output:
        write_text(args.output, buf.getvalue())
        write_text(os.path.splitext(args.output)[0] + ".txt", text_table(header, rows))
        write_run_config(args.output, "report", vars_of(args), config)
    sys.stdout.write(text_table(header, rows))
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def vars_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: usage error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="jsvulnpred", description=__doc__)
    p.add_argument("--config", help=f"YAML/JSON config (default ${cfg.ENV_CONFIG_DIR}/{cfg.CONFIG_FILE})")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("extract-static", help="static metrics for every function")
    s.add_argument("source", help="source directory, or a repository with --rev")
    s.add_argument("--rev", help="read files from this git revision instead of the work tree")
    s.add_argument("-o", "--output", default="static.csv")
    s.add_argument("--functions-json", help="also dump the function inventory here")
    s.set_defaults(func=cmd_extract_static)

    s = sub.add_parser("mine-history", help="process metrics from the first-parent history")
    s.add_argument("repo")
    s.add_argument("--until", help="last commit to process (default HEAD)")
    s.add_argument("-o", "--output", default="process.csv")
    s.set_defaults(func=cmd_mine_history)

    s = sub.add_parser("label", help="label pre-fix functions from fix commits")
    s.add_argument("repo")
    s.add_argument("--fixes", required=True, help="CSV or JSON fix records")
    s.add_argument("-o", "--output", default="labels.csv")
    s.set_defaults(func=cmd_label)

    s = sub.add_parser("assemble", help="join static, process and label tables")
    s.add_argument("--static", action="append", default=[], required=True)
    s.add_argument("--process", action="append", default=[], required=True)
    s.add_argument("--labels", action="append", default=[], required=True)
    s.add_argument("-o", "--output", default="dataset.csv")
    s.set_defaults(func=cmd_assemble)

    s = sub.add_parser("train", help="grid search, fit the best model and score the test split")
    s.add_argument("--algo", required=True, choices=ALGORITHMS)
    s.add_argument("--grid", help="YAML/JSON grid file (default: built-in grid)")
    s.add_argument("--data", required=True, help="dataset CSV")
    s.add_argument("--external", action="store_true", help="dataset is a third-party CSV")
    s.add_argument("--mapping", help="column mapping for a third-party CSV")
    s.add_argument("--features", choices=("all", "static", "process"), default="all")
    s.add_argument("--objective", choices=("f_measure", "precision"))
    s.add_argument("--mode", choices=("dev", "cv"))
    s.add_argument("--out-dir", default="run")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("evaluate", help="IR measures of prediction files")
    s.add_argument("predictions", nargs="+")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("mcnemar", help="compare two prediction files")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--truth", help="file with a truth or label column (default: from --a)")
    s.add_argument("--alpha", type=float)
    s.add_argument("--exact", action="store_true", help="exact binomial test")
    s.add_argument("--name")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_mcnemar)

    s = sub.add_parser("report", help="merge result CSVs into one table")
    s.add_argument("results", nargs="+")
    s.add_argument("--sort", action="store_true", help="order rows by F-measure")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR,
        format="%(levelname)s %(message)s",
    )
    try:
        config = cfg.load_config(args.config)
        if args.seed is not None:
            config["seed"] = args.seed
        return args.func(args, config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RepositoryError as exc:
        print(f"git error: {exc}", file=sys.stderr)
        return EXIT_GIT
    except (DataError, JsVulnError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
