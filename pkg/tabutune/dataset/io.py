from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
import pandas

from tabutune.dataset.schema import Dataset, FeatureKind, FeatureSchema, SchemaError
from tabutune.utils.dataclass import BaseModel, Field

logger = logging.getLogger(__name__)

MISSING_SENTINELS = ("", "NA")


class ParseError(ValueError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"could not parse value '{value}' in row {row}, column '{column}'")


class LabelError(ValueError):
    pass


class SchemaFile(BaseModel):
    """
    Schema declaration document: the feature list, the label column and how
    label text maps onto {0, 1}.
    """
    label_column: str = "disposition"
    features: list[FeatureSchema]
    label_values: dict[str, int] = Field(default_factory=lambda: {
        "0": 0, "1": 1,
        "admitted": 0, "discharged": 1,
    })

    def get_label(self, text: str, row: int) -> int:
        key = text.strip()
        for candidate in (key, key.lower()):
            if candidate in self.label_values:
                return self.label_values[candidate]
        raise LabelError(f"unknown label value '{text}' in row {row}, column '{self.label_column}'")

    def label_text(self, label: int) -> str:
        for text, value in self.label_values.items():
            if value == label and not text.isdigit():
                return text
        return str(label)


def load_schema(path: str | Path) -> SchemaFile:
    with open(path) as infile:
        data = json.load(infile)

    return SchemaFile.model_validate(data)


def write_schema(schema: SchemaFile, path: str | Path) -> None:
    with open(path, "w") as outfile:
        outfile.write(schema.model_dump_json(indent=4))


def _is_missing(cell: str) -> bool:
    return cell.strip() in MISSING_SENTINELS


def load_csv(path: str | Path, schema: list[FeatureSchema] | SchemaFile, label_column: str | None=None) -> Dataset:
    """
    Read a comma-separated, utf-8 file with a header row.
    Numeric cells become floats, categorical cells stay text until
    encode_categoricals; empty and `NA` cells are missing.
    """
    if isinstance(schema, SchemaFile):
        schema_file = schema
        if label_column is not None:
            schema_file = schema_file.model_copy(update={"label_column": label_column})
    else:
        schema_file = SchemaFile(features=list(schema), label_column=label_column or "disposition")

    frame = pandas.read_csv(path, dtype=str, keep_default_na=False, na_filter=False, encoding="utf-8")

    required = [feature.name for feature in schema_file.features] + [schema_file.label_column]
    missing_columns = [name for name in required if name not in frame.columns]
    if missing_columns:
        raise SchemaError(f"{path}: header lacks columns {missing_columns}")

    features: list[FeatureSchema] = []
    rows = np.empty((len(frame), len(schema_file.features)), dtype=object)

    for column_no, feature in enumerate(schema_file.features):
        cells = frame[feature.name].tolist()

        if feature.is_categorical:
            categories = list(feature.categories or [])
            for row_no, cell in enumerate(cells):
                if _is_missing(cell):
                    rows[row_no, column_no] = None
                    continue
                text = cell.strip()
                if text not in categories:
                    categories.append(text)
                rows[row_no, column_no] = text

            features.append(feature.with_categories(categories))
        else:
            for row_no, cell in enumerate(cells):
                if _is_missing(cell):
                    rows[row_no, column_no] = np.nan
                    continue
                try:
                    rows[row_no, column_no] = float(cell)
                except ValueError as e:
                    # +2: header line and 1-based numbering
                    raise ParseError(row_no + 2, feature.name, cell) from e

            features.append(feature)

    labels = np.array([
        schema_file.get_label(cell, row_no + 2) for row_no, cell in enumerate(frame[schema_file.label_column].tolist())
    ], dtype=np.int64)

    if not any(feature.is_categorical for feature in features):
        rows = rows.astype(np.float64)

    logger.info(f"loaded {len(frame)} rows, {len(features)} features from {path}")

    return Dataset(features=features, rows=rows, labels=labels)


def _format_cell(value: Any, feature: FeatureSchema) -> str:
    if value is None:
        return "NA"
    if isinstance(value, str):
        return value
    if np.isnan(value):
        return "NA"
    if feature.is_categorical:
        code = int(value)
        if feature.categories is not None and 0 <= code < len(feature.categories):
            return feature.categories[code]
        return str(code)
    return repr(float(value))


def write_csv(dataset: Dataset, path: str | Path, schema: SchemaFile | None=None) -> None:
    """
    Same dialect as load_csv reads: categorical codes are written back as
    their category text, missing cells as `NA`.
    """
    if schema is None:
        schema = SchemaFile(features=list(dataset.features))

    columns: dict[str, list[str]] = {}
    for column_no, feature in enumerate(dataset.features):
        columns[feature.name] = [_format_cell(value, feature) for value in dataset.rows[:, column_no]]
    columns[schema.label_column] = [schema.label_text(int(label)) for label in dataset.labels]

    pandas.DataFrame(columns).to_csv(path, index=False, lineterminator="\n")
    logger.info(f"wrote {dataset.n} rows to {path}")


__all__ = [
    "FeatureKind", "ParseError", "LabelError", "SchemaFile",
    "load_schema", "write_schema", "load_csv", "write_csv",
]
