"""
Tests del laboratorio: configuración de experimentos, corridas, reportes,
evaluación de checkpoints y barridos.
"""

import json
from pathlib import Path

import pandas as pd
import pytest

from p2p_pricing.lab import (
    ExperimentConfig,
    apply_overrides,
    run_evaluate,
    run_sweep_battery,
    run_sweep_ratio,
    run_sweep_weights,
    run_train,
    write_reports,
)
from p2p_pricing.lab.lab_sweeps import BATTERY_COLUMNS, RATIO_COLUMNS, WEIGHT_COLUMNS, WEIGHT_GRID
from p2p_pricing.schemas import ConfigurationError, ProfileDataError, ReportError

CONFIGS_DIR = Path(__file__).resolve().parent.parent / "configs"


# === CONFIGURACIÓN ===

class TestExperimentConfig:
    def test_defaults_are_baseline(self):
        config = ExperimentConfig()
        assert config.env.weights.alpha == 0.3 and config.env.weights.beta == 0.3
        assert config.env.battery.capacity_kwh == 30.0
        assert config.dataset.customer_count == 10
        assert config.dataset.prosumer_count == 5
        assert config.env.grid.size == config.agent.net.output_size == 25

    def test_baseline_file(self):
        config = ExperimentConfig.from_json_file(CONFIGS_DIR / "baseline.json")
        assert config.seeds == [0, 1, 2]
        assert config.env.battery.p_bc_max == pytest.approx(1.5)
        assert config.agent.total_steps == 100000

    def test_unknown_key_is_named(self):
        with pytest.raises(ConfigurationError) as info:
            ExperimentConfig.from_tree({"env": {"weights": {"alpa": 0.5}}})
        assert "alpa" in str(info.value)

    def test_unknown_override_is_named(self):
        with pytest.raises(ConfigurationError) as info:
            ExperimentConfig.from_tree({}, ["env.weights.alpa=0.5"])
        assert "env.weights.alpa" in str(info.value)

    def test_overrides_parse_json_values(self):
        config = ExperimentConfig.from_tree({}, [
            "env.weights.alpha=0.5",
            "agent.target_rule=double",
            "agent.net.hidden_sizes=[16]",
            "dataset.source=bundled",
        ])
        assert config.env.weights.alpha == 0.5
        assert config.agent.target_rule == "double"
        assert config.agent.net.hidden_sizes == [16]
        assert config.dataset.source == "bundled"

    def test_override_without_equals(self):
        with pytest.raises(ConfigurationError):
            apply_overrides({}, ["env.weights.alpha"])

    def test_invalid_weights(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_tree({"env": {"weights": {"alpha": 0.7, "beta": 0.7}}})

    def test_network_must_match_grid(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_tree({"agent": {"net": {"output_size": 9}}})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError) as info:
            ExperimentConfig.from_json_file(tmp_path / "missing.json")
        assert "missing.json" in str(info.value)

    def test_json_round_trip(self, tiny_config):
        again = ExperimentConfig.from_tree(json.loads(tiny_config.model_dump_json()))
        assert again == tiny_config


# === CORRIDAS ===

class TestRunTrain:
    def test_writes_artifacts(self, tiny_config, tmp_path):
        summary = run_train(tiny_config, out_dir=tmp_path)
        for name in ("steps.csv", "episodes.csv", "reward_curve.csv", "loss_curve.csv",
                     "summary.json", "checkpoint.qnet", "config.json", "prosumer_profile.csv"):
            assert (tmp_path / name).exists(), name
        document = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        for field in ("avg_consumer_profit", "avg_prosumer_profit", "avg_sp_profit", "total_reward_last_year"):
            assert document[field] == pytest.approx(getattr(summary, field))
        assert summary.steps == 120
        assert summary.window == 48
        assert sum(summary.action_histogram) == 48

    def test_step_table_columns(self, tiny_config, tmp_path):
        run_train(tiny_config, out_dir=tmp_path)
        header = (tmp_path / "steps.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header.split(",") == [
            "step", "episode", "epsilon", "action", "reward", "loss",
            "psi", "phi_consumers_total", "phi_prosumers_total", "rho",
        ]
        profile = pd.read_csv(tmp_path / "prosumer_profile.csv")
        assert list(profile.columns) == ["hour", "demand", "generation", "net"]

    def test_summary_consistency(self, tiny_config, tmp_path):
        summary = run_train(tiny_config, out_dir=tmp_path)
        weighted = (
            summary.sp_weight * -summary.avg_sp_profit
            + summary.alpha * summary.consumer_count * -summary.avg_consumer_profit
            + summary.beta * summary.prosumer_count * -summary.avg_prosumer_profit
        )
        assert weighted == pytest.approx(summary.mean_operation_cost, abs=1e-9)
        assert summary.avg_reward == pytest.approx(-summary.mean_operation_cost, abs=1e-12)

    def test_same_seed_identical_tables(self, tiny_config, tmp_path):
        run_train(tiny_config, out_dir=tmp_path / "a")
        run_train(tiny_config, out_dir=tmp_path / "b")
        for name in ("steps.csv", "loss_curve.csv", "episodes.csv", "checkpoint.qnet"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_rerun_same_dir(self, tiny_config, tmp_path):
        run_train(tiny_config, out_dir=tmp_path)
        first = (tmp_path / "reward_curve.csv").read_bytes()
        run_train(tiny_config, out_dir=tmp_path)
        assert (tmp_path / "reward_curve.csv").read_bytes() == first

    def test_default_output_layout(self, tiny_config, tmp_path):
        config = tiny_config.model_copy(update={"output_dir": str(tmp_path)})
        run_train(config, seed=3)
        assert (tmp_path / "tiny" / "seed_3" / "summary.json").exists()

    def test_missing_data_names_path(self, tiny_config, tmp_path):
        missing = tmp_path / "no_such.csv"
        config = ExperimentConfig.from_tree(
            json.loads(tiny_config.model_dump_json()), [f"dataset.source={missing}"]
        )
        with pytest.raises(ProfileDataError) as info:
            run_train(config, out_dir=tmp_path / "out")
        assert str(missing) in str(info.value)

    def test_short_profiles_rejected(self, tiny_config, tmp_path):
        config = ExperimentConfig.from_tree(
            json.loads(tiny_config.model_dump_json()), ["env.episode_length=100"]
        )
        with pytest.raises(ConfigurationError):
            run_train(config, write=False)


class TestWriteReports:
    def test_unwritable_directory(self, tmp_path):
        blocker = tmp_path / "file.txt"
        blocker.write_text("x")
        with pytest.raises(ReportError) as info:
            write_reports(blocker / "sub", tables={"t": pd.DataFrame({"a": [1]})})
        assert "file.txt" in str(info.value)

    def test_tables_and_summaries(self, tiny_config, tmp_path):
        summary = run_train(tiny_config, write=False)
        written = write_reports(tmp_path, summaries=[summary, summary], tables={"demo": pd.DataFrame({"x": [0.1]})})
        assert (tmp_path / "summaries.json").exists()
        assert (tmp_path / "demo.csv").read_text().splitlines() == ["x", "0.1"]
        assert len(written) == 2


class TestRunEvaluate:
    def test_greedy_evaluation(self, tiny_config, tmp_path):
        run_train(tiny_config, out_dir=tmp_path)
        summary = run_evaluate(tiny_config, tmp_path / "checkpoint.qnet", tmp_path / "eval")
        assert summary.final_epsilon == 0.0
        assert summary.steps == 48
        for name in ("evaluation_steps.csv", "trajectory.csv", "evaluation_summary.json"):
            assert (tmp_path / "eval" / name).exists()

    def test_greedy_year_matches_checkpoint_rollout(self, tiny_config, tmp_path):
        trained = run_train(tiny_config, out_dir=tmp_path)
        evaluated = run_evaluate(tiny_config, tmp_path / "checkpoint.qnet", tmp_path / "eval")
        assert trained.greedy_reward_year is not None
        assert evaluated.greedy_reward_year == pytest.approx(trained.greedy_reward_year, abs=1e-9)
        assert evaluated.greedy_reward_year == pytest.approx(evaluated.total_reward_last_year, abs=1e-9)

    def test_missing_checkpoint(self, tiny_config, tmp_path):
        with pytest.raises(ConfigurationError):
            run_evaluate(tiny_config, tmp_path / "nope.qnet")


# === BARRIDOS ===

class TestSweeps:
    def test_default_weight_grid(self):
        assert len(WEIGHT_GRID) == 10
        assert (0.3, 0.3) in WEIGHT_GRID

    def test_weights_table(self, tiny_config, tmp_path):
        result = run_sweep_weights(tiny_config, [(0.3, 0.3), (0.6, 0.2)], [0, 1], tmp_path)
        assert list(result.table.columns) == WEIGHT_COLUMNS
        assert len(result.table) == 2
        assert len(result.summaries) == 4
        assert result.table["sp_weight"].tolist() == pytest.approx([0.4, 0.2])
        assert (tmp_path / "sweep_weights.csv").exists()
        assert (tmp_path / "summaries.json").exists()

    def test_invalid_pair_rejected_before_runs(self, tiny_config, tmp_path):
        with pytest.raises(ConfigurationError):
            run_sweep_weights(tiny_config, [(0.3, 0.3), (0.7, 0.7)], [0], tmp_path)
        assert not (tmp_path / "sweep_weights.csv").exists()

    def test_battery_table(self, tiny_config):
        result = run_sweep_battery(tiny_config, [10.0, 30.0], [0])
        assert list(result.table.columns) == BATTERY_COLUMNS
        assert result.table["p_max"].tolist() == pytest.approx([0.5, 1.5])
        assert all(s.alpha == 0.2 and s.beta == 0.2 for s in result.summaries)
        greedy = [s.greedy_reward_year for s in result.summaries]
        assert result.table["total_reward_last_year"].tolist() == pytest.approx(greedy)

    @pytest.mark.parametrize("capacities", [[0.0], [10.0, -5.0]])
    def test_battery_rejects_non_positive(self, tiny_config, capacities):
        with pytest.raises(ConfigurationError):
            run_sweep_battery(tiny_config, capacities, [0])

    def test_ratio_table(self, tiny_config):
        config = ExperimentConfig.from_tree(
            json.loads(tiny_config.model_dump_json()), ["dataset.customer_count=10"]
        )
        result = run_sweep_ratio(config, [0.5, 0.7], [0])
        assert list(result.table.columns) == RATIO_COLUMNS
        assert result.table["prosumer_count"].tolist() == [5, 3]
        assert result.table["consumer_count"].tolist() == [5, 7]

    def test_ratio_range_check(self, tiny_config):
        with pytest.raises(ConfigurationError):
            run_sweep_ratio(tiny_config, [0.5, 1.2], [0])

    def test_workers_do_not_change_results(self, tiny_config):
        sequential = run_sweep_battery(tiny_config, [10.0, 20.0], [0, 1], workers=1)
        parallel = run_sweep_battery(tiny_config, [10.0, 20.0], [0, 1], workers=2)
        pd.testing.assert_frame_equal(sequential.table, parallel.table)

    def test_rerun_reproduces_table(self, tiny_config):
        first = run_sweep_ratio(tiny_config, [0.5], [0])
        second = run_sweep_ratio(tiny_config, [0.5], [0])
        pd.testing.assert_frame_equal(first.table, second.table)
