from __future__ import annotations

import logging

import numpy as np

from tabutune.dataset.io import SchemaFile
from tabutune.dataset.schema import Dataset, FeatureKind, FeatureSchema, MissingProfile

logger = logging.getLogger(__name__)

LABEL_COLUMN = "disposition"

# name, admitted (mean, std), discharged (mean, std), clip range, decimals
NUMERIC_FEATURES: list[tuple[str, tuple[float, float], tuple[float, float], tuple[float, float], int]] = [
    ("bmi", (29., 6.), (27., 5.), (12., 70.), 1),
    ("age_years", (62., 17.), (42., 18.), (0., 105.), 0),
    ("diastolic_blood_pressure", (80., 13.), (78., 11.), (30., 140.), 0),
    ("temperature_fahrenheit", (99.2, 1.0), (98.5, 0.7), (93., 106.), 1),
    ("respiratory_rate", (21., 3.5), (17.5, 2.5), (6., 50.), 0),
    ("pulse_rate", (96., 15.), (84., 13.), (30., 200.), 0),
    ("systolic_blood_pressure", (132., 22.), (124., 17.), (60., 240.), 0),
    ("o2_saturation", (93.5, 2.6), (97., 1.6), (60., 100.), 0),
]

# name, categories, admitted weights (None = uniform), discharged weights
CATEGORICAL_FEATURES: list[tuple[str, list[str], list[float] | None, list[float] | None]] = [
    ("patient_sex", ["F", "M"], [0.48, 0.52], [0.54, 0.46]),
    ("ed_location_id", ["ED-1", "ED-2", "ED-3"], None, None),
    ("arrival_hour", [str(hour) for hour in range(24)], None, None),
    ("zip_code", [f"Z{index:03d}" for index in range(40)], None, None),
    ("patient_ethnicity", ["white", "black", "hispanic", "asian", "other"], None, None),
    ("smoking_status", ["never", "former", "current", "unknown"], [0.35, 0.30, 0.25, 0.10], [0.50, 0.20, 0.20, 0.10]),
    ("month_of_year", [str(month) for month in range(1, 13)], None, None),
    ("day_of_week", [str(day) for day in range(7)], None, None),
    ("chief_complaint", [f"CC{index:02d}" for index in range(30)], None, None),
]

FEATURE_ORDER = [
    "patient_sex", "ed_location_id", "arrival_hour", "zip_code", "patient_ethnicity",
    "smoking_status", "month_of_year", "day_of_week", "chief_complaint",
    "bmi", "age_years", "diastolic_blood_pressure", "temperature_fahrenheit",
    "respiratory_rate", "pulse_rate", "systolic_blood_pressure", "o2_saturation",
]

DEFAULT_ADMIT_FRACTION = 0.2


def triage_features() -> list[FeatureSchema]:
    """
    The 17 triage features with their kinds and category lists.
    """
    categorical = {name: categories for name, categories, _, _ in CATEGORICAL_FEATURES}
    features = []
    for name in FEATURE_ORDER:
        if name in categorical:
            features.append(FeatureSchema(name=name, kind=FeatureKind.categorical, categories=categorical[name]))
        else:
            features.append(FeatureSchema(name=name, kind=FeatureKind.numeric))
    return features


def triage_schema() -> SchemaFile:
    return SchemaFile(features=triage_features(), label_column=LABEL_COLUMN)


def triage_missing_profile() -> MissingProfile:
    """
    Missing fractions of the hospital extract the generator imitates.
    """
    return MissingProfile(fractions={
        "respiratory_rate": 0.272,
        "o2_saturation": 0.269,
        "bmi": 0.257,
        "systolic_blood_pressure": 0.257,
        "diastolic_blood_pressure": 0.257,
        "pulse_rate": 0.257,
        "temperature_fahrenheit": 0.257,
        "zip_code": 1065 / 453664,
    })


def _complaint_weights(admitted: bool) -> np.ndarray:
    # the first complaints lean towards admission, the last ones towards discharge
    weights = np.linspace(2., 0.5, 30) if admitted else np.linspace(0.7, 1.5, 30)
    return weights / weights.sum()


def synth_generate(n: int, profile: MissingProfile | None=None, admit_fraction: float=DEFAULT_ADMIT_FRACTION, seed: int=0) -> Dataset:
    """
    Draw n triage records. Admitted patients (label 0) get shifted vitals so
    the classes overlap but stay learnable; missing cells are injected per
    the profile.
    """
    if n < 1:
        raise ValueError(f"n must be positive: {n}")
    if not 0 < admit_fraction < 1:
        raise ValueError(f"admit_fraction must be in (0, 1): {admit_fraction}")
    if profile is None:
        profile = triage_missing_profile()

    rng = np.random.default_rng(seed)

    n_admitted = int(round(n * admit_fraction))
    labels = np.ones(n, dtype=np.int64)
    labels[:n_admitted] = 0
    labels = rng.permutation(labels)
    admitted = labels == 0

    columns: dict[str, np.ndarray] = {}

    for name, (admit_mean, admit_std), (discharge_mean, discharge_std), (low, high), decimals in NUMERIC_FEATURES:
        means = np.where(admitted, admit_mean, discharge_mean)
        stds = np.where(admitted, admit_std, discharge_std)
        values = np.clip(rng.normal(means, stds), low, high)
        columns[name] = np.round(values, decimals)

    for name, categories, admit_weights, discharge_weights in CATEGORICAL_FEATURES:
        if name == "chief_complaint":
            p_admit = _complaint_weights(True)
            p_discharge = _complaint_weights(False)
        else:
            uniform = np.full(len(categories), 1 / len(categories))
            p_admit = np.asarray(admit_weights) if admit_weights is not None else uniform
            p_discharge = np.asarray(discharge_weights) if discharge_weights is not None else uniform

        codes = np.where(
            admitted,
            rng.choice(len(categories), size=n, p=p_admit),
            rng.choice(len(categories), size=n, p=p_discharge),
        )
        columns[name] = codes.astype(np.float64)

    features = triage_features()
    rows = np.column_stack([columns[feature.name] for feature in features])

    for column_no, feature in enumerate(features):
        fraction = profile.get(feature.name)
        if fraction > 0:
            rows[rng.random(n) < fraction, column_no] = np.nan

    logger.info(f"generated {n} synthetic records ({n_admitted} admitted)")

    return Dataset(features=features, rows=rows, labels=labels)
