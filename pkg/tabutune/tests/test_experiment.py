import json
import os
import tempfile
import unittest
from pathlib import Path

from tabutune.tests.common import TabutuneTestCase
from tabutune.dataset import SizeError
from tabutune.experiment import (
    Algorithm, ExperimentConfig, SynthConfig, auc_spread, best_record, emit_report, load_records,
    load_selection, prepare, read_trace, run_matrix, sensitivity_analysis, tuned_vs_grid,
)
from tabutune.experiment.report import importance_table, summary
from tabutune.feature_selection import SelectionConfig, SelectionMethod
from tabutune.tuning import TsConfig

ALGORITHMS = [Algorithm.t_gbt, Algorithm.gbt, Algorithm.t_mlp]
GROUPS = [SelectionMethod.chi_skb, SelectionMethod.all]


def small_config(output_dir: str, **overrides) -> ExperimentConfig:
    values = {
        "synth": SynthConfig(rows=300),
        "sample_size": 300,
        "tabu": TsConfig(max_iterations=2, neighborhood_size=3),
        "grid_budget": 4,
        "selection": SelectionConfig(rf_trees=3, rfe_step=3),
        "algorithms": ALGORITHMS,
        "groups": GROUPS,
        "output_dir": output_dir,
        "seed": 11,
    }
    values.update(overrides)
    return ExperimentConfig.smoke(**values)


class TestMatrix(TabutuneTestCase):
    @classmethod
    def setUpClass(cls) -> None:
        cls._output = tempfile.TemporaryDirectory()
        cls.output_dir = cls._output.name
        cls.config = small_config(cls.output_dir)
        cls.data = prepare(cls.config)
        cls.records = run_matrix(cls.config, cls.data)

    @classmethod
    def tearDownClass(cls) -> None:
        cls._output.cleanup()

    def test_cardinality(self) -> None:
        self.assertEqual(len(self.records), len(GROUPS) * len(ALGORITHMS))
        names = {record.name for record in self.records}
        self.assertEqual(len(names), len(self.records))
        self.assertFalse(any(record.failed for record in self.records))

    def test_records_complete(self) -> None:
        for record in self.records:
            self.assertIsNotNone(record.metrics)
            self.assertTrue(0 <= record.auc <= 1)
            self.assertEqual(set(record.split_counts), set(record.features))
            if record.algorithm.tuned:
                self.assertEqual(record.evaluations, 1 + 2 * 3)
                self.assertTrue(record.convergence)
            else:
                self.assertEqual(record.convergence, [])

    def test_all_group_uses_every_feature(self) -> None:
        record = next(record for record in self.records if record.group == SelectionMethod.all)
        self.assertEqual(record.features, self.data.feature_names)

    def test_traces(self) -> None:
        for record in self.records:
            self.assertTrue(os.path.isfile(record.trace_path))
            trace = read_trace(record.trace_path)
            self.assertEqual(len(trace), record.evaluations)
            self.assertTrue(any(
                entry.accepted and entry.params == record.best_params and entry.objective == record.best_objective
                for entry in trace
            ))
            with open(Path(record.trace_path).with_suffix(".summary.json")) as infile:
                summary_data = json.load(infile)
            self.assertEqual(summary_data["best_auc"], record.best_objective)
            self.assertEqual(summary_data["evaluations"], record.evaluations)

    def test_saved_records(self) -> None:
        restored = load_records(self.output_dir)
        self.assertEqual([record.name for record in restored], [record.name for record in self.records])
        self.assertEqual([record.auc for record in restored], [record.auc for record in self.records])

        groups = load_selection(Path(self.output_dir) / "selection.json")
        self.assertEqual(groups[SelectionMethod.all].selected, self.data.groups[SelectionMethod.all].selected)

    def test_deterministic(self) -> None:
        with tempfile.TemporaryDirectory() as other:
            again = run_matrix(small_config(other))
            self.assertEqual([record.best_params for record in again], [record.best_params for record in self.records])

            first_report, second_report = self.tempfile("first"), os.path.join(other, "report")
            emit_report(self.records, first_report)
            emit_report(again, second_report)
            self.assertEqual(
                Path(first_report, "metrics.csv").read_bytes(),
                Path(second_report, "metrics.csv").read_bytes()
            )

            first_traces = sorted(Path(self.output_dir, "traces").glob("*.jsonl"))
            second_traces = sorted(Path(other, "traces").glob("*.jsonl"))
            self.assertEqual([path.name for path in first_traces], [path.name for path in second_traces])
            self.assertEqual(len(first_traces), len(self.records))
            for first, second in zip(first_traces, second_traces):
                self.assertEqual(first.read_bytes(), second.read_bytes(), msg=first.name)

    def test_report(self) -> None:
        report_dir = self.tempfile("report")
        tables = emit_report(self.records, report_dir, groups=self.data.groups)
        names = [table.name for table in tables]

        for name in ("metrics", "auc", "params_t_gbt", "params_gbt", "params_t_mlp", "selection", "convergence", "feature_importance"):
            self.assertIn(name, names)
            self.assertTrue(os.path.isfile(os.path.join(report_dir, f"{name}.csv")))
        self.assertNotIn("params_adab", names)

        metrics = tables[names.index("metrics")]
        self.assertEqual(metrics.num_rows, len(self.records) + 1)

        with open(os.path.join(report_dir, "summary.json")) as infile:
            data = json.load(infile)
        self.assertEqual(data["cells"], len(self.records))
        self.assertEqual(data["failed"], [])
        self.assertEqual(data["best"]["algorithm"], best_record(self.records).algorithm.value)
        self.assertTrue(os.path.isfile(os.path.join(report_dir, "report.md")))
        self.assertTrue(os.path.isfile(os.path.join(report_dir, "selection_summary.json")))

    def test_tuned_vs_grid(self) -> None:
        comparison = tuned_vs_grid(self.records)
        self.assertEqual(list(comparison), ["T-GBT"])
        tuned = sorted(record.auc for record in self.records if record.algorithm == Algorithm.t_gbt)
        grid = sorted(record.auc for record in self.records if record.algorithm == Algorithm.gbt)
        self.assertEqual(comparison["T-GBT"]["cells"], len(GROUPS))
        self.assertAlmostEqual(comparison["T-GBT"]["tuned_median"], sum(tuned) / len(tuned))
        self.assertAlmostEqual(comparison["T-GBT"]["grid_median"], sum(grid) / len(grid))

    def test_importance_ranking(self) -> None:
        record = next(record for record in self.records if record.algorithm == Algorithm.t_gbt)
        table = importance_table(record)
        counts = [table[row_no, 1] for row_no in range(1, table.num_rows)]
        self.assertEqual(counts, sorted(counts, reverse=True))

    def test_sensitivity(self) -> None:
        self.assertEqual(sensitivity_analysis(self.config, [], self.records), [])

        points = sensitivity_analysis(self.config, [200, 300], self.records)
        best = best_record(self.records)
        self.assertEqual([point.size for point in points], [200, 300])
        self.assertTrue(all(point.algorithm == best.algorithm for point in points))

        with self.assertRaises(SizeError):
            sensitivity_analysis(self.config, [10000], self.records)


class TestSmokeStudy(TabutuneTestCase):
    """
    The smoke profile on a 1000-row sample, tree learners only.
    """
    @classmethod
    def setUpClass(cls) -> None:
        cls._output = tempfile.TemporaryDirectory()
        cls.config = ExperimentConfig.smoke(
            synth=SynthConfig(rows=2000),
            sample_size=1000,
            tabu=TsConfig(max_iterations=5, neighborhood_size=4),
            grid_budget=20,
            algorithms=[Algorithm.t_gbt, Algorithm.gbt, Algorithm.t_adab, Algorithm.adab],
            groups=[SelectionMethod.all, SelectionMethod.chi_skb],
            output_dir=cls._output.name,
            seed=3,
        )
        cls.records = run_matrix(cls.config)
        cls.sensitivity = sensitivity_analysis(cls.config, [1000, 2000], cls.records)

    @classmethod
    def tearDownClass(cls) -> None:
        cls._output.cleanup()

    def test_all_cells_complete(self) -> None:
        self.assertEqual(len(self.records), 8)
        self.assertFalse(any(record.failed for record in self.records))

    def test_best_auc(self) -> None:
        self.assertGreaterEqual(best_record(self.records).auc, 0.90)

    def test_report_comparison(self) -> None:
        report_dir = self.tempfile("report")
        emit_report(self.records, report_dir, sensitivity=self.sensitivity)
        with open(os.path.join(report_dir, "summary.json")) as infile:
            data = json.load(infile)
        self.assertEqual(set(data["tuned_vs_grid"]), {"T-GBT", "T-ADAB"})
        for comparison in data["tuned_vs_grid"].values():
            self.assertEqual(comparison["cells"], 2)
        self.assertAlmostEqual(data["sensitivity_spread"], auc_spread(self.sensitivity))

    def test_sensitivity_spread(self) -> None:
        self.assertEqual([point.size for point in self.sensitivity], [1000, 2000])
        self.assertLess(auc_spread(self.sensitivity), 0.05)


@unittest.skipUnless(os.environ.get("TABUTUNE_FULL_STUDY"), "full-scale study, set TABUTUNE_FULL_STUDY=1")
class TestFullStudy(TabutuneTestCase):
    """
    All 54 cells on 5000 synthetic rows with 300 tabu iterations.
    """
    def test_study(self) -> None:
        config = ExperimentConfig(output_dir=self.tempdir)
        records = run_matrix(config)
        self.assertEqual(len(records), len(Algorithm) * len(SelectionMethod))

        for label, comparison in tuned_vs_grid(records).items():
            if label in ("T-GBT", "T-ADAB"):
                self.assertGreaterEqual(comparison["tuned_median"], comparison["grid_median"], msg=label)
        self.assertGreaterEqual(best_record(records).auc, 0.90)

        larger = config.model_copy(update={"synth": SynthConfig(rows=20000)})
        points = sensitivity_analysis(larger, [1000, 5000, 20000], records)
        self.assertLess(auc_spread(points), 0.05)


class TestFailures(TabutuneTestCase):
    def test_failed_cell_is_recorded(self) -> None:
        config = small_config(self.tempdir, algorithms=[Algorithm.gbt], groups=[SelectionMethod.voting, SelectionMethod.all])
        data = prepare(config)
        data.groups.pop(SelectionMethod.voting, None)
        data.selection_errors[SelectionMethod.voting] = "not enough votes"

        records = run_matrix(config, data)
        self.assertEqual(len(records), 2)
        failed = [record for record in records if record.failed]
        self.assertEqual([record.group for record in failed], [SelectionMethod.voting])
        self.assertIn("not enough votes", failed[0].error)
        self.assertEqual(summary(records)["failed"], ["gbt_voting"])

    def test_empty_report(self) -> None:
        with self.assertRaises(ValueError):
            emit_report([], self.tempdir)

    def test_no_successful_record(self) -> None:
        with self.assertRaises(ValueError):
            best_record([])


class TestConfig(TabutuneTestCase):
    def test_budget(self) -> None:
        config = ExperimentConfig(tabu=TsConfig(max_iterations=5, neighborhood_size=4))
        self.assertEqual(config.budget, 20)
        self.assertEqual(ExperimentConfig(grid_budget=7).budget, 7)

    def test_env_seed(self) -> None:
        os.environ["TABUTUNE_SEED"] = "42"
        try:
            self.assertEqual(ExperimentConfig().with_env_seed().seed, 42)
            os.environ["TABUTUNE_SEED"] = "x"
            with self.assertRaises(ValueError):
                ExperimentConfig().with_env_seed()
        finally:
            del os.environ["TABUTUNE_SEED"]

    def test_write_read(self) -> None:
        config = small_config(self.tempdir)
        path = self.tempfile("config.json")
        config.write(path)
        restored = ExperimentConfig.read(path)
        self.assertEqual(restored.algorithms, ALGORITHMS)
        self.assertEqual(restored.tabu.neighborhood_size, 3)

    def test_algorithm_names(self) -> None:
        self.assertEqual(Algorithm.t_gbt.label, "T-GBT")
        self.assertEqual(Algorithm.t_mlp.learner_name, "mlp")
        self.assertFalse(Algorithm.adab.tuned)


if __name__ == '__main__':
    unittest.main(verbosity=2)
