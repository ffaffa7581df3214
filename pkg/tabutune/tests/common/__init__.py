import os
import sys
import tempfile
import unittest
from typing import Sequence

import numpy as np

try:
    import tabutune
except ImportError:
    def stepup(path: str | os.PathLike, num: int) -> str | os.PathLike:
        if num == 0:
            return path
        else:
            return stepup(os.path.dirname(path), num-1)

    sys.path.append(str(stepup(__file__, 3)))
    import tabutune

from tabutune.dataset import Dataset, FeatureKind, FeatureSchema, encode_categoricals, knn_impute, synth_generate

import_dir = os.path.dirname(os.path.abspath(__file__))
test_dir = os.path.dirname(import_dir)


def make_dataset(rows: Sequence[Sequence[float | None]] | np.ndarray, labels: Sequence[int] | np.ndarray, names: list[str] | None=None, categorical: Sequence[int]=()) -> Dataset:
    rows = np.asarray(rows, dtype=np.float64)
    if names is None:
        names = [f"x{index}" for index in range(rows.shape[1])]
    features = []
    for index, name in enumerate(names):
        if index in categorical:
            n_codes = int(np.nanmax(rows[:, index])) + 1
            features.append(FeatureSchema(name=name, kind=FeatureKind.categorical, categories=[str(code) for code in range(n_codes)]))
        else:
            features.append(FeatureSchema(name=name))
    return Dataset(features=features, rows=rows, labels=labels)


def planted_dataset(n: int=500, n_noise: int=8, seed: int=0, positive_fraction: float=0.5) -> Dataset:
    """
    Two informative columns ("signal_0", "signal_1") followed by pure noise.
    """
    rng = np.random.default_rng(seed)
    labels = (rng.random(n) < positive_fraction).astype(np.int64)
    shift = np.where(labels == 1, 1.5, -1.5)
    signal = np.column_stack([shift + rng.normal(0, 1, n), 0.8 * shift + rng.normal(0, 1, n)])
    noise = rng.normal(0, 1, size=(n, n_noise))
    names = ["signal_0", "signal_1"] + [f"noise_{index}" for index in range(n_noise)]
    return make_dataset(np.hstack([signal, noise]), labels, names)


def small_triage(n: int=400, seed: int=0) -> Dataset:
    """
    Encoded and imputed synthetic triage sample.
    """
    return knn_impute(encode_categoricals(synth_generate(n, seed=seed)), 4)


class TabutuneTestCase(unittest.TestCase):
    def setUp(self) -> None:
        self._tempdir = tempfile.TemporaryDirectory()
        self.tempdir = self._tempdir.name

    def tearDown(self) -> None:
        self._tempdir.cleanup()

    def tempfile(self, name: str) -> str:
        return os.path.join(self.tempdir, name)

    def assertArrayAlmostEqual(self, first: np.ndarray | Sequence[float], second: np.ndarray | Sequence[float], places: int=7) -> None:
        np.testing.assert_array_almost_equal(np.asarray(first, dtype=np.float64), np.asarray(second, dtype=np.float64), decimal=places)

    def assertDatasetEqual(self, first: Dataset, second: Dataset) -> None:
        self.assertEqual(first.feature_names, second.feature_names)
        self.assertTrue(first == second, msg=f"datasets differ: {first.rows.shape} / {second.rows.shape}")
