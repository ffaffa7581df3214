from __future__ import annotations

import argparse
import json
import logging
from pathlib import Path
from typing import Any, Sequence

import tabutune
from tabutune.config import config as global_config
from tabutune.dataset import (
    encode_categoricals, knn_impute, load_csv, load_schema, random_sample,
    synth_generate, triage_schema, write_csv, write_schema,
)
from tabutune.experiment import (
    Algorithm, ExperimentConfig, emit_report, load_records, load_selection,
    prepare, run_cell, run_matrix, save_records, sensitivity_analysis,
)
from tabutune.experiment.report import sensitivity_table
from tabutune.experiment.runner import SELECTION_FILE
from tabutune.feature_selection import SelectionMethod
from tabutune.utils import derive_seed

logger = logging.getLogger(__name__)


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.INFO
    if verbose or global_config.debug:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING

    logging.basicConfig(level=level, format=global_config.log_format, datefmt=global_config.log_datefmt)


def experiment_config(args: argparse.Namespace, **overrides: Any) -> ExperimentConfig:
    """
    Config file (or defaults), then data options from the command line,
    then the environment seed and finally --seed.
    """
    if getattr(args, "config", None):
        config = ExperimentConfig.load(args.config)
    else:
        config = ExperimentConfig().with_env_seed()

    update: dict[str, Any] = {}
    if getattr(args, "input", None):
        update["data_path"] = args.input
    if getattr(args, "schema", None):
        update["schema_path"] = args.schema
    if getattr(args, "out", None):
        update["output_dir"] = args.out
    update.update(overrides)
    if args.seed is not None:
        update["seed"] = args.seed

    if update:
        config = ExperimentConfig.model_validate({**config.model_dump(), **update})
    return config


def cmd_synth(args: argparse.Namespace) -> None:
    seed = args.seed if args.seed is not None else 0
    dataset = synth_generate(args.rows, admit_fraction=args.admit_frac, seed=seed)
    schema = triage_schema()
    write_csv(dataset, args.out, schema)
    if args.schema_out:
        write_schema(schema, args.schema_out)


def cmd_prep(args: argparse.Namespace) -> None:
    schema = load_schema(args.schema) if args.schema else triage_schema()
    dataset = load_csv(args.input, schema)
    dataset = knn_impute(encode_categoricals(dataset), args.impute_k)
    if args.sample:
        seed = args.seed if args.seed is not None else 0
        dataset = random_sample(dataset, args.sample, derive_seed(seed, "sample"))
    write_csv(dataset, args.out, schema)


def _group_names(text: str) -> list[SelectionMethod]:
    if text == "all":
        return list(SelectionMethod)
    return [SelectionMethod(name.strip()) for name in text.split(",")]


def cmd_select(args: argparse.Namespace) -> None:
    config = experiment_config(args)
    data = prepare(config)
    wanted = _group_names(args.groups)
    groups = {method: result for method, result in data.groups.items() if method in wanted}
    for method in wanted:
        if method not in groups:
            raise ValueError(data.selection_errors.get(method, f"group {method.value} not available"))

    tabutune.save({method.value: result for method, result in groups.items()}, args.selection_out)


def _single_cell(args: argparse.Namespace, algorithm: Algorithm, **overrides: Any) -> None:
    group = SelectionMethod(args.group)
    config = experiment_config(args, algorithms=[algorithm], groups=[group], **overrides)

    data = prepare(config, with_selection=args.selection is None and group != SelectionMethod.all)
    if args.selection is not None:
        data.groups.update(load_selection(args.selection))

    record = run_cell(config, data, group, algorithm)
    save_records([record], config.output_dir)
    emit_report([record], config.output_dir, groups=data.groups)
    print(json.dumps({"auc": record.auc, "best_params": record.best_params}, indent=4))


def cmd_tune(args: argparse.Namespace) -> None:
    algorithm = Algorithm(f"t_{args.algo}")
    config = experiment_config(args)
    tabu = config.tabu.model_copy(update={"max_iterations": args.iters})
    _single_cell(args, algorithm, tabu=tabu)


def cmd_grid(args: argparse.Namespace) -> None:
    _single_cell(args, Algorithm(args.algo), grid_budget=args.budget)


def _matrix_config(args: argparse.Namespace) -> ExperimentConfig:
    config = experiment_config(args)
    if args.smoke:
        keep = ("data_path", "schema_path", "label_column", "seed", "parallelism", "output_dir", "algorithms", "groups")
        config = ExperimentConfig.smoke(**{name: getattr(config, name) for name in keep})
    return config


def cmd_matrix(args: argparse.Namespace) -> None:
    config = _matrix_config(args)
    data = prepare(config)
    records = run_matrix(config, data)
    emit_report(records, config.output_dir, groups=data.groups, ods=args.ods)


def cmd_sensitivity(args: argparse.Namespace) -> None:
    sizes = [int(size) for size in args.sizes.split(",") if size.strip()]
    config = _matrix_config(args)
    if config.data_path is None and sizes:
        # the generator has to cover the largest sample
        synth = config.synth.model_copy(update={"rows": max(config.synth.rows, *sizes)})
        config = config.model_copy(update={"synth": synth})

    records = None
    if (config.output_path / "records.json").exists():
        records = load_records(config.output_dir)

    points = sensitivity_analysis(config, sizes, records)
    config.output_path.mkdir(parents=True, exist_ok=True)
    sensitivity_table(points).save_csv(config.output_path / "sensitivity.csv")
    for point in points:
        print(f"{point.size}\t{point.auc:.4f}")


def cmd_report(args: argparse.Namespace) -> None:
    directory = Path(args.dir)
    records = load_records(directory)
    groups = None
    if (directory / SELECTION_FILE).exists():
        groups = load_selection(directory / SELECTION_FILE)
    emit_report(records, directory, groups=groups, ods=args.ods)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tabutune", description="Tabu search tuned admission classifiers")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    parser.add_argument("--seed", type=int, default=None, help="master seed, overrides config and environment")
    commands = parser.add_subparsers(dest="command", required=True)

    # --seed is also accepted after the subcommand
    seed_option = argparse.ArgumentParser(add_help=False)
    seed_option.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed, overrides config and environment")

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        return commands.add_parser(name, help=help_text, parents=[seed_option])

    synth = command("synth", "generate a synthetic triage dataset")
    synth.add_argument("--rows", type=int, default=5000)
    synth.add_argument("--admit-frac", type=float, default=0.2)
    synth.add_argument("--out", required=True)
    synth.add_argument("--schema-out", default=None)
    synth.set_defaults(func=cmd_synth)

    prep = command("prep", "encode, impute and sample a dataset")
    prep.add_argument("--in", dest="input", required=True)
    prep.add_argument("--schema", default=None)
    prep.add_argument("--impute-k", type=int, default=4)
    prep.add_argument("--sample", type=int, default=None)
    prep.add_argument("--out", required=True)
    prep.set_defaults(func=cmd_prep)

    def data_options(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--config", default=None, help="experiment config json")
        sub.add_argument("--in", dest="input", default=None, help="csv data, synthetic data if omitted")
        sub.add_argument("--schema", default=None)

    select = command("select", "compute feature groups")
    data_options(select)
    select.add_argument("--groups", default="all", help="comma separated group names or 'all'")
    select.add_argument("--out", dest="selection_out", default=SELECTION_FILE)
    select.set_defaults(func=cmd_select)

    for name, help_text in (("tune", "tabu search one cell"), ("grid", "grid search one cell")):
        sub = command(name, help_text)
        data_options(sub)
        sub.add_argument("--algo", choices=["gbt", "adab", "mlp"], required=True)
        sub.add_argument("--group", default="all", choices=[method.value for method in SelectionMethod])
        sub.add_argument("--selection", default=None, help="selection json written by 'select'")
        sub.add_argument("--out", default=None, help="output directory")
        if name == "tune":
            sub.add_argument("--iters", type=int, default=300)
            sub.set_defaults(func=cmd_tune)
        else:
            sub.add_argument("--budget", type=int, default=None)
            sub.set_defaults(func=cmd_grid)

    matrix = command("matrix", "run the group x algorithm matrix")
    matrix.add_argument("--config", default=None)
    matrix.add_argument("--smoke", action="store_true", help="small synthetic profile")
    matrix.add_argument("--ods", action="store_true", help="also write report.ods")
    matrix.set_defaults(func=cmd_matrix)

    sensitivity = command("sensitivity", "best cell at several sample sizes")
    sensitivity.add_argument("--config", default=None)
    sensitivity.add_argument("--sizes", default="1000,5000,20000")
    sensitivity.add_argument("--smoke", action="store_true")
    sensitivity.set_defaults(func=cmd_sensitivity)

    report = command("report", "render the report from saved records")
    report.add_argument("--dir", required=True)
    report.add_argument("--ods", action="store_true")
    report.set_defaults(func=cmd_report)

    return parser


def main(argv: Sequence[str] | None=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        global_config.update_from_env("tabutune")
    except ValueError as e:
        parser.error(str(e))
    configure_logging(args.verbose, args.quiet)

    try:
        args.func(args)
    except (ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1

    return 0
