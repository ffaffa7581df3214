import unittest

import numpy as np

from tabutune.tests.common import TabutuneTestCase, make_dataset
from tabutune.resampling import ResampleError, SmoteConfig, smote


def imbalanced(n_majority: int=30, n_minority: int=10, seed: int=0):
    rng = np.random.default_rng(seed)
    numeric = np.concatenate([rng.normal(0, 1, n_majority), rng.normal(5, 1, n_minority)])
    codes = np.concatenate([rng.integers(0, 2, n_majority), rng.integers(2, 4, n_minority)])
    labels = np.array([0] * n_majority + [1] * n_minority)
    return make_dataset(np.column_stack([numeric, codes]), labels, ["value", "code"], categorical=[1])


class TestSmote(TabutuneTestCase):
    def test_balances_classes(self) -> None:
        dataset = imbalanced()
        resampled = smote(dataset, SmoteConfig(k_neighbors=3, seed=1))
        self.assertEqual(resampled.class_counts, (30, 30))
        self.assertEqual(resampled.n, 60)

    def test_target_ratio(self) -> None:
        resampled = smote(imbalanced(), SmoteConfig(k_neighbors=3, target_ratio=0.5))
        self.assertEqual(resampled.class_counts, (30, 15))

    def test_original_rows_first(self) -> None:
        dataset = imbalanced()
        resampled = smote(dataset, SmoteConfig(k_neighbors=3))
        self.assertTrue(np.array_equal(resampled.rows[:dataset.n], dataset.rows))
        self.assertEqual(resampled.labels[:dataset.n].tolist(), dataset.labels.tolist())

    def test_synthetic_rows_inside_minority(self) -> None:
        dataset = imbalanced()
        minority = dataset.rows[dataset.labels == 1]
        synthetic = smote(dataset, SmoteConfig(k_neighbors=3)).rows[dataset.n:]

        self.assertTrue(np.all(synthetic[:, 0] >= minority[:, 0].min()))
        self.assertTrue(np.all(synthetic[:, 0] <= minority[:, 0].max()))
        # categorical values are copied, never interpolated
        self.assertTrue(set(synthetic[:, 1].tolist()) <= set(minority[:, 1].tolist()))

    def test_already_balanced(self) -> None:
        dataset = imbalanced(n_majority=10, n_minority=10)
        self.assertIs(smote(dataset), dataset)

    def test_too_few_minority_rows(self) -> None:
        with self.assertRaises(ResampleError):
            smote(imbalanced(n_minority=3), SmoteConfig(k_neighbors=5))

    def test_missing_values(self) -> None:
        dataset = make_dataset([[1.], [None], [3.], [4.]], [0, 0, 0, 1])
        with self.assertRaises(ResampleError):
            smote(dataset)

    def test_deterministic(self) -> None:
        config = SmoteConfig(k_neighbors=3, seed=7)
        self.assertDatasetEqual(smote(imbalanced(), config), smote(imbalanced(), config))

    def test_minority_is_class_zero(self) -> None:
        dataset = imbalanced()
        flipped = dataset.with_rows(dataset.rows, labels=1 - dataset.labels)
        self.assertEqual(smote(flipped, SmoteConfig(k_neighbors=3)).class_counts, (30, 30))


if __name__ == '__main__':
    unittest.main(verbosity=2)
