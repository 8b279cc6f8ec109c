import json
import math
import os
import tempfile
import unittest

import numpy as np
from pydantic import ValidationError

import test_components  # noqa: F401

import settings
from harness import AggregateResult, ExperimentConfig, OutputNotWritable, Table, TrialResult, emit, mean_std, read_csv, read_json
from harness.aggregate import CONVERGENCE_COLUMNS, convergence_table
from harness.emit import format_value
from solvers import ConvergenceRecord, ConvergenceTrace, schedule_convex


def synthetic_result(trial: int, dists: list[float], samples_per_record: int = 10) -> TrialResult:
    # T = 2, sample bound 256
    schedule = schedule_convex(1.0, 0.25, 0.5, 1.0, 1.0)
    trace = ConvergenceTrace(trial)
    for i, dist in enumerate(dists):
        trace.records.append(ConvergenceRecord(trial, i, 0, i * samples_per_record, dist, 0.5, 1.0))
    return TrialResult(trial, schedule, trace)


class TestExperimentConfig(unittest.TestCase):
    def test_default_model_follows_the_problem(self):
        self.assertEqual(ExperimentConfig().model, "proxlinear")
        self.assertEqual(ExperimentConfig(problem="logistic").model, "proxgradient")
        self.assertEqual(ExperimentConfig(model="clipped").model, "clipped")

    def test_rejections(self):
        invalid = [
            {"problem": "phase", "model": "proxgradient"},
            {"problem": "logistic", "model": "proxlinear"},
            {"algorithm": "rda"},
            {"p_fail": 0.5},
            {"gamma": 2.0},
            {"delta_prime": 1.0},
            {"p_min": 3, "p_max": 2},
            {"problem": "logistic", "d": 4, "sparsity": 5},
            {"idx_images": "images.idx"},
            {"radius": 1.0},
            {"trials": 0},
            {"stepsize": 0.1},
        ]
        for fields in invalid:
            with self.subTest(fields=fields):
                self.assertRaises(ValidationError, ExperimentConfig, **fields)

    def test_frozen(self):
        config = ExperimentConfig()
        with self.assertRaises(ValidationError):
            config.d = 5

    def test_overrides(self):
        config = ExperimentConfig(d=10, trials=3).with_overrides(trials=5, seed=None)

        self.assertEqual((config.d, config.trials, config.seed), (10, 5, 0))

    def test_from_file(self):
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "config.json")
            with open(path, "w") as f:
                json.dump({"problem": "blind", "d": 6, "d2": 4, "eps": 1e-3}, f)
            config = ExperimentConfig.from_file(path, d=7, eps=None)

        self.assertEqual(config.problem, "blind")
        self.assertEqual(config.dimensions, (7, 4))
        self.assertEqual(config.eps, 1e-3)

    def test_pool_size(self):
        factor = settings.FINITE_SAMPLE_FACTOR
        self.assertEqual(ExperimentConfig(d=10).pool_size, factor * 10)
        self.assertEqual(ExperimentConfig(problem="blind", d=3, d2=4).pool_size, factor * 7)
        self.assertEqual(ExperimentConfig(d=10, m_samples=17).pool_size, 17)
        self.assertEqual(ExperimentConfig(d=10).dimensions, (10, 10))

    def test_noise_scale(self):
        self.assertEqual(ExperimentConfig(noise_variance=4.0).noise_scale, 2.0)


class TestEmit(unittest.TestCase):
    def setUp(self):
        self.folder = tempfile.TemporaryDirectory()
        self.table = Table(
            ("name", "value", "note"),
            [{"name": "a", "value": 0.1, "note": None}, {"name": "b", "value": math.nan, "note": True}],
            {"T": 3, "alpha0": 1.0 / 3.0, "config": {"digits": (0, 1)}},
        )

    def tearDown(self):
        self.folder.cleanup()

    def test_format_value(self):
        self.assertEqual(format_value(0.1), "0.10000000000000001")
        self.assertEqual(format_value(None), "")
        self.assertEqual(format_value(False), "false")
        self.assertEqual(format_value(7), "7")

    def test_csv(self):
        path = emit(self.table, "csv", os.path.join(self.folder.name, "nested", "out.csv"))
        header, rows = read_csv(path)

        self.assertEqual(header["T"], "3")
        self.assertEqual(float(header["alpha0"]), 1.0 / 3.0)
        self.assertEqual(json.loads(header["config"]), {"digits": [0, 1]})
        self.assertEqual(list(rows[0]), ["name", "value", "note"])
        self.assertEqual(float(rows[0]["value"]), 0.1)
        self.assertEqual(rows[0]["note"], "")
        self.assertTrue(math.isnan(float(rows[1]["value"])))
        self.assertEqual(rows[1]["note"], "true")

    def test_json(self):
        path = emit(self.table, "json", os.path.join(self.folder.name, "out.json"))
        document = read_json(path)

        self.assertEqual(document["columns"], ["name", "value", "note"])
        self.assertEqual(document["header"]["config"], {"digits": [0, 1]})
        self.assertEqual(document["records"][0], {"name": "a", "value": 0.1, "note": None})
        self.assertIsNone(document["records"][1]["value"])

    def test_csv_and_json_carry_the_same_doubles(self):
        values = [1.0 / 3.0, 2.0**-40 * math.pi, 1e-300, -123456.789, *np.random.default_rng(0).normal(size=50).tolist()]
        table = Table(("value",), [{"value": v} for v in values])
        _, rows = read_csv(emit(table, "csv", os.path.join(self.folder.name, "floats.csv")))
        records = read_json(emit(table, "json", os.path.join(self.folder.name, "floats.json")))["records"]

        self.assertEqual([float(row["value"]) for row in rows], values)
        self.assertEqual([record["value"] for record in records], values)

    def test_errors(self):
        blocker = os.path.join(self.folder.name, "file")
        with open(blocker, "w") as f:
            f.write("")

        self.assertRaises(OutputNotWritable, emit, self.table, "csv", os.path.join(blocker, "out.csv"))
        self.assertRaises(ValueError, emit, self.table, "xml", os.path.join(self.folder.name, "out.xml"))
        self.assertRaises(FileNotFoundError, read_json, os.path.join(self.folder.name, "missing.json"))


class TestAggregate(unittest.TestCase):
    def test_mean_std(self):
        self.assertEqual(mean_std([1.0, 2.0, 3.0]), (2.0, 1.0))
        mean, std = mean_std([4.0])
        self.assertEqual(mean, 4.0)
        self.assertTrue(math.isnan(std))
        self.assertTrue(all(math.isnan(v) for v in mean_std([])))

    def test_from_trials(self):
        results = [synthetic_result(0, [1.0, 0.1, 0.01]), synthetic_result(1, [1.0, 0.01, 0.0001, 0.00001])]
        aggregate = AggregateResult.from_trials(results, target=0.01)

        self.assertEqual(aggregate.trials, 2)
        self.assertEqual(len(aggregate.checkpoints), 3)
        self.assertAlmostEqual(aggregate.checkpoints[1].mean_log_dist, -1.5)
        self.assertAlmostEqual(aggregate.checkpoints[2].mean_log_dist, -3.0)
        self.assertEqual(aggregate.samples_to_target, [20.0, 10.0])
        self.assertEqual(aggregate.final_dist, [0.01, 0.00001])
        self.assertEqual(aggregate.successes(0.001), 1)

    def test_samples_to_target_is_capped(self):
        aggregate = AggregateResult.from_trials([synthetic_result(0, [1.0, 0.5, 0.4], samples_per_record=1000)], 0.01)
        # never reached: min(sample bound 256, 2000 consumed)
        self.assertEqual(aggregate.samples_to_target, [256.0])

    def test_zero_distance_is_floored(self):
        aggregate = AggregateResult.from_trials([synthetic_result(0, [1.0, 0.0])], 0.01)
        self.assertAlmostEqual(aggregate.checkpoints[1].mean_log_dist, -300.0)

    def test_convergence_table(self):
        config = ExperimentConfig(trials=2)
        results = [synthetic_result(0, [1.0, 0.1]), synthetic_result(1, [1.0, 0.2])]
        table = convergence_table(config, results)

        self.assertEqual(table.columns, CONVERGENCE_COLUMNS)
        reference = [row for row in table.rows if row["trial"] == "reference"]
        self.assertEqual([row["dist"] for row in reference], [1.0, 0.5, 0.25])
        self.assertEqual(len(table) - len(reference), 4)
        self.assertEqual(table.header["T"], 2)
        self.assertNotIn("out", table.header["config"])
