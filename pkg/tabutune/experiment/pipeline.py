from __future__ import annotations

import logging

from tabutune.dataset import (
    Dataset, Scaling, encode_categoricals, knn_impute, load_csv, load_schema,
    normalize_minmax, random_sample, stratified_split, synth_generate, triage_schema,
)
from tabutune.experiment.config import ExperimentConfig
from tabutune.feature_selection import (
    SelectionError, SelectionMethod, SelectionResult,
    all_features, build_method_groups, voting_group,
)
from tabutune.learners import Learner
from tabutune.utils import derive_seed

logger = logging.getLogger(__name__)


class Route:
    """
    The four splits one learner family sees: the training split, its
    tuning partition (fit / objective) and the reporting test split.
    """
    def __init__(self, train: Dataset, tune_train: Dataset, tune_test: Dataset, test: Dataset):
        self.train = train
        self.tune_train = tune_train
        self.tune_test = tune_test
        self.test = test

    def __repr__(self) -> str:
        return f"<Route train={self.train.n} tune={self.tune_train.n}/{self.tune_test.n} test={self.test.n}>"

    def scaled(self, scaling: Scaling) -> Route:
        return Route(
            scaling.apply(self.train),
            scaling.apply(self.tune_train),
            scaling.apply(self.tune_test),
            scaling.apply(self.test),
        )


class PreparedData:
    def __init__(self, raw: Route, scaled: Route, scaling: Scaling, groups: dict[SelectionMethod, SelectionResult], selection_errors: dict[SelectionMethod, str] | None=None):
        self.raw = raw
        self.scaled = scaled
        self.scaling = scaling
        self.groups = groups
        self.selection_errors = selection_errors or {}

    @property
    def feature_names(self) -> list[str]:
        return self.raw.train.feature_names

    def route(self, learner: Learner) -> Route:
        """
        Tree learners train on raw values, the MLP on min-max scaled ones.
        """
        return self.scaled if learner.needs_normalization else self.raw


def load_source(config: ExperimentConfig) -> Dataset:
    """
    The encoded full table, imputed unless imputation waits for the split.
    """
    if config.data_path is not None:
        schema = load_schema(config.schema_path) if config.schema_path is not None else triage_schema()
        dataset = load_csv(config.data_path, schema, config.label_column)
        logger.info(f"loaded {dataset.n} rows from {config.data_path}")
    else:
        synth = config.synth
        dataset = synth_generate(synth.rows, synth.profile, synth.admit_fraction, synth.seed)
        logger.info(f"generated {dataset.n} synthetic rows (admit fraction {synth.admit_fraction})")

    dataset = encode_categoricals(dataset)
    if config.impute_before_split:
        dataset = knn_impute(dataset, config.impute_k)

    return dataset


def split(config: ExperimentConfig, source: Dataset, sample_size: int | None=None) -> Route:
    sample = random_sample(source, sample_size or config.sample_size, derive_seed(config.seed, "sample"))
    train, test = stratified_split(sample, config.test_fraction, derive_seed(config.seed, "split"))

    if not config.impute_before_split:
        train = knn_impute(train, config.impute_k)
        test = knn_impute(test, config.impute_k)

    if config.single_split:
        return Route(train, train, test, test)

    tune_train, tune_test = stratified_split(train, config.tuning_fraction, derive_seed(config.seed, "tuning"))
    return Route(train, tune_train, tune_test, test)


def select_groups(config: ExperimentConfig, raw: Dataset, scaled: Dataset) -> tuple[dict[SelectionMethod, SelectionResult], dict[SelectionMethod, str]]:
    """
    The nine groups computed on the training split. A failed vote is
    recorded instead of aborting the other groups.
    """
    seed = derive_seed(config.seed, "selection")
    groups = build_method_groups(raw, scaled, config.selection, seed, config.parallelism)
    errors: dict[SelectionMethod, str] = {}

    try:
        groups[SelectionMethod.voting] = voting_group(list(groups.values()), config.selection.min_votes)
    except SelectionError as e:
        logger.error(f"voting group unavailable: {e}")
        errors[SelectionMethod.voting] = str(e)

    groups[SelectionMethod.all] = all_features(raw)

    for method, result in groups.items():
        logger.info(f"group {method.value}: {', '.join(result.selected_names)}")

    return groups, errors


def prepare(config: ExperimentConfig, source: Dataset | None=None, sample_size: int | None=None, with_selection: bool=True) -> PreparedData:
    if source is None:
        source = load_source(config)

    raw = split(config, source, sample_size)
    _, scaling = normalize_minmax(raw.train, include_categorical=True)
    scaled = raw.scaled(scaling)

    if with_selection:
        groups, errors = select_groups(config, raw.train, scaled.train)
    else:
        groups, errors = {SelectionMethod.all: all_features(raw.train)}, {}

    return PreparedData(raw, scaled, scaling, groups, errors)
