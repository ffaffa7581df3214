import unittest

import numpy as np

from tabutune.tests.common import TabutuneTestCase, make_dataset
from tabutune.dataset import (
    Dataset, FeatureKind, FeatureSchema, ImputeError, LabelError, ParseError, SchemaError, SchemaFile,
    SizeError, StratificationError, encode_categoricals, knn_impute, load_csv, normalize_minmax,
    random_sample, stratified_split, synth_generate, triage_schema, write_csv,
)


class TestLoadCsv(TabutuneTestCase):
    schema = SchemaFile(features=[
        FeatureSchema(name="pulse"),
        FeatureSchema(name="sex", kind=FeatureKind.categorical, categories=["F", "M"]),
    ])

    def write(self, text: str) -> str:
        path = self.tempfile("data.csv")
        with open(path, "w") as outfile:
            outfile.write(text)
        return path

    def test_parse(self) -> None:
        path = self.write("pulse,sex,disposition\n80,M,admitted\nNA,F,discharged\n72.5,,1\n")
        dataset = load_csv(path, self.schema)

        self.assertEqual(dataset.n, 3)
        self.assertFalse(dataset.is_encoded)
        self.assertEqual(dataset.labels.tolist(), [0, 1, 1])
        self.assertEqual(dataset.rows[0, 1], "M")
        self.assertIsNone(dataset.rows[2, 1])
        self.assertTrue(np.isnan(dataset.rows[1, 0]))

        encoded = encode_categoricals(dataset)
        self.assertTrue(encoded.is_encoded)
        self.assertEqual(encoded.rows[0, 1], 1.)
        self.assertEqual(encoded.rows[1, 1], 0.)
        self.assertTrue(np.isnan(encoded.rows[2, 1]))

    def test_parse_error_names_row_and_column(self) -> None:
        path = self.write("pulse,sex,disposition\n80,M,0\nfast,F,1\n")
        with self.assertRaises(ParseError) as context:
            load_csv(path, self.schema)
        self.assertEqual(context.exception.row, 3)
        self.assertEqual(context.exception.column, "pulse")

    def test_unknown_label(self) -> None:
        path = self.write("pulse,sex,disposition\n80,M,maybe\n")
        with self.assertRaises(LabelError):
            load_csv(path, self.schema)

    def test_missing_column(self) -> None:
        path = self.write("pulse,disposition\n80,0\n")
        with self.assertRaises(SchemaError):
            load_csv(path, self.schema)

    def test_unseen_category_appended(self) -> None:
        path = self.write("pulse,sex,disposition\n80,X,0\n")
        encoded = encode_categoricals(load_csv(path, self.schema))
        self.assertEqual(encoded.features[1].categories, ["F", "M", "X"])
        self.assertEqual(encoded.rows[0, 1], 2.)

    def test_write_and_read_back(self) -> None:
        dataset = synth_generate(50, seed=3)
        path = self.tempfile("synth.csv")
        write_csv(dataset, path, triage_schema())
        loaded = encode_categoricals(load_csv(path, triage_schema()))
        self.assertDatasetEqual(dataset, loaded)


class TestDataset(TabutuneTestCase):
    def test_arity_mismatch(self) -> None:
        with self.assertRaises(ValueError):
            Dataset(features=[FeatureSchema(name="a")], rows=np.zeros((2, 2)), labels=[0, 1])

    def test_labels_binary(self) -> None:
        with self.assertRaises(ValueError):
            Dataset(features=[FeatureSchema(name="a")], rows=np.zeros((2, 1)), labels=[0, 2])

    def test_select_features(self) -> None:
        dataset = make_dataset([[1, 2, 3], [4, 5, 6]], [0, 1])
        selected = dataset.select_features([2, 0])
        self.assertEqual(selected.feature_names, ["x2", "x0"])
        self.assertEqual(selected.rows.tolist(), [[3., 1.], [6., 4.]])

    def test_read_only(self) -> None:
        dataset = make_dataset([[1, 2]], [1])
        with self.assertRaises(ValueError):
            dataset.rows[0, 0] = 5.


class TestImpute(TabutuneTestCase):
    def test_nearest_donors(self) -> None:
        dataset = make_dataset([[1, 10], [2, None], [3, 30], [10, 100]], [0, 1, 0, 1])
        imputed = knn_impute(dataset, k=2)
        self.assertAlmostEqual(imputed.rows[1, 1], 20.)
        self.assertFalse(imputed.has_missing)

    def test_present_cells_untouched(self) -> None:
        dataset = synth_generate(200, seed=1)
        imputed = knn_impute(dataset, k=4)
        present = ~dataset.missing_mask
        self.assertTrue(np.array_equal(imputed.rows[present], dataset.rows[present]))
        self.assertFalse(imputed.has_missing)

    def test_single_nearest_row(self) -> None:
        dataset = make_dataset([[1, 1, None], [1, 1, 8], [9, 9, 2]], [0, 1, 0])
        imputed = knn_impute(dataset, k=1)
        self.assertAlmostEqual(imputed.rows[0, 2], 8.)

    def test_all_other_rows_give_column_mean(self) -> None:
        dataset = make_dataset([[1, None], [2, 4], [3, 6], [4, 11]], [0, 1, 0, 1])
        imputed = knn_impute(dataset, k=3)
        self.assertAlmostEqual(imputed.rows[0, 1], 7.)

    def test_distance_ignores_categorical_codes(self) -> None:
        dataset = make_dataset([[None, 1, 0], [8, 1, 30], [2, 2, 0]], [0, 1, 0], categorical=(2,))
        imputed = knn_impute(dataset, k=1)
        self.assertAlmostEqual(imputed.rows[0, 0], 8.)

    def test_categorical_fill_is_a_code(self) -> None:
        dataset = make_dataset([[1, 1], [2, None], [3, 1], [50, 0]], [0, 1, 0, 1], categorical=(1,))
        imputed = knn_impute(dataset, k=3)
        self.assertEqual(imputed.rows[1, 1], 1.)

        imputed = knn_impute(encode_categoricals(synth_generate(400, seed=0)), 4)
        for index, feature in enumerate(imputed.features):
            if not feature.is_categorical:
                continue
            column = imputed.rows[:, index]
            self.assertTrue(np.array_equal(column, np.rint(column)), msg=feature.name)
            self.assertTrue(((column >= 0) & (column < len(feature.categories))).all(), msg=feature.name)

    def test_column_entirely_missing(self) -> None:
        dataset = make_dataset([[1, None], [2, None]], [0, 1])
        with self.assertRaises(ImputeError):
            knn_impute(dataset)


class TestNormalize(TabutuneTestCase):
    def test_minmax_on_fit_rows(self) -> None:
        dataset = make_dataset([[0, 5], [10, 5], [20, 5]], [0, 1, 0])
        scaled, scaling = normalize_minmax(dataset, fit_rows=[0, 1])
        self.assertArrayAlmostEqual(scaled.rows[:, 0], [0., 1., 2.])
        self.assertArrayAlmostEqual(scaled.rows[:, 1], [0., 0., 0.])
        self.assertEqual(scaling.ranges[0], (0., 10.))

    def test_categorical_kept_unless_requested(self) -> None:
        dataset = make_dataset([[0, 2], [4, 0]], [0, 1], categorical=[1])
        scaled, _ = normalize_minmax(dataset)
        self.assertEqual(scaled.rows[:, 1].tolist(), [2., 0.])
        scaled, _ = normalize_minmax(dataset, include_categorical=True)
        self.assertEqual(scaled.rows[:, 1].tolist(), [1., 0.])


class TestSampling(TabutuneTestCase):
    def setUp(self) -> None:
        super().setUp()
        labels = np.array([1] * 20 + [0] * 80)
        self.dataset = make_dataset(np.arange(100, dtype=float).reshape(-1, 1), labels)

    def test_random_sample(self) -> None:
        sample = random_sample(self.dataset, 10, seed=4)
        self.assertEqual(sample.n, 10)
        self.assertTrue(np.all(np.diff(sample.rows[:, 0]) > 0))
        self.assertDatasetEqual(sample, random_sample(self.dataset, 10, seed=4))

    def test_random_sample_too_large(self) -> None:
        with self.assertRaises(SizeError):
            random_sample(self.dataset, 101, seed=0)

    def test_stratified_split(self) -> None:
        train, test = stratified_split(self.dataset, 0.3, seed=2)
        self.assertEqual(test.class_counts, (24, 6))
        self.assertEqual(train.class_counts, (56, 14))
        self.assertEqual(len(set(train.rows[:, 0]) & set(test.rows[:, 0])), 0)

    def test_stratified_split_single_member(self) -> None:
        dataset = make_dataset([[0], [1], [2]], [0, 0, 1])
        with self.assertRaises(StratificationError):
            stratified_split(dataset, 0.3, seed=0)


class TestSynth(TabutuneTestCase):
    def test_shape_and_balance(self) -> None:
        dataset = synth_generate(500, admit_fraction=0.2, seed=0)
        self.assertEqual(dataset.n_features, 17)
        self.assertEqual(dataset.class_counts, (100, 400))
        self.assertTrue(dataset.has_missing)

    def test_deterministic(self) -> None:
        self.assertDatasetEqual(synth_generate(100, seed=5), synth_generate(100, seed=5))


if __name__ == '__main__':
    unittest.main(verbosity=2)
