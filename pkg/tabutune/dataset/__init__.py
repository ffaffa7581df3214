from tabutune.dataset.schema import Dataset, FeatureKind, FeatureSchema, MissingProfile, SchemaError
from tabutune.dataset.io import LabelError, ParseError, SchemaFile, load_csv, load_schema, write_csv, write_schema
from tabutune.dataset.preprocessing import (
    ImputeError, Scaling, SizeError, StratificationError,
    encode_categoricals, knn_impute, normalize_minmax, random_sample,
    stratified_split, stratified_split_indices,
)
from tabutune.dataset.synth import synth_generate, triage_features, triage_missing_profile, triage_schema

__all__ = [
    "Dataset", "FeatureKind", "FeatureSchema", "MissingProfile", "SchemaError",
    "LabelError", "ParseError", "SchemaFile", "load_csv", "load_schema", "write_csv", "write_schema",
    "ImputeError", "Scaling", "SizeError", "StratificationError",
    "encode_categoricals", "knn_impute", "normalize_minmax", "random_sample",
    "stratified_split", "stratified_split_indices",
    "synth_generate", "triage_features", "triage_missing_profile", "triage_schema",
]
