"""
Tests de perfiles horarios: lectura CSV, escalado, asignación de clientes y
generación sintética.
"""

import numpy as np
import pandas as pd
import pytest

from p2p_pricing.profiles import (
    BUNDLED_PATH,
    DatasetConfig,
    ProfileSeries,
    assign_customers,
    export_prosumer_series,
    load_csv,
    load_dataset,
    load_sources,
    scale_profiles,
    synth_profiles,
    write_csv,
)
from p2p_pricing.schemas import CustomerKind, ProfileDataError


def _write(path, rows, header="load_kwh,pv_kwh"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
    return path


# === LECTURA ===

class TestLoadCsv:
    def test_bundled_year(self):
        series = load_csv(BUNDLED_PATH)
        assert series.length == 8760
        assert np.all(series.load >= 0) and np.all(series.pv >= 0)

    def test_missing_file_names_path(self, tmp_path):
        missing = tmp_path / "nope.csv"
        with pytest.raises(ProfileDataError) as info:
            load_csv(missing)
        assert str(missing) in str(info.value)

    def test_missing_column(self, tmp_path):
        path = _write(tmp_path / "p.csv", ["1.0"], header="load_kwh")
        with pytest.raises(ProfileDataError) as info:
            load_csv(path)
        assert info.value.column == "pv_kwh"
        assert "pv_kwh" in str(info.value)

    def test_negative_cell_cites_row(self, tmp_path):
        rows = ["1.0,0.0"] * 50
        rows[41] = "-3,0.0"
        path = _write(tmp_path / "p.csv", rows)
        with pytest.raises(ProfileDataError) as info:
            load_csv(path)
        assert info.value.row == 42
        assert info.value.column == "load_kwh"

    def test_non_numeric_cell(self, tmp_path):
        path = _write(tmp_path / "p.csv", ["1.0,0.0", "1.0,abc"])
        with pytest.raises(ProfileDataError) as info:
            load_csv(path)
        assert info.value.row == 2
        assert info.value.column == "pv_kwh"

    def test_write_then_read(self, tmp_path):
        series = synth_profiles(48, seed=2)
        loaded = load_csv(write_csv(series, tmp_path / "s.csv"))
        assert loaded.length == 48
        assert np.allclose(loaded.load, series.load)


# === ESCALADO ===

class TestScaleProfiles:
    def test_ratio(self):
        series = ProfileSeries(load=np.array([3000.0, 5000.0]), pv=np.array([0.0, 100.0]))
        scaled = scale_profiles(series, 1.5)
        assert scaled.load == pytest.approx(series.load * 0.000375)
        assert scaled.pv == pytest.approx(series.pv * 0.000375)

    def test_identity_at_target(self):
        series = ProfileSeries(load=np.array([1.0, 2.0]), pv=np.array([0.5, 0.0]))
        assert scale_profiles(series, 1.5).load == pytest.approx(series.load)

    def test_constant(self):
        series = ProfileSeries(load=np.full(4, 2.0), pv=np.zeros(4))
        assert scale_profiles(series, 1.0).load == pytest.approx(np.ones(4))

    def test_all_zero_load(self):
        with pytest.raises(ProfileDataError):
            scale_profiles(ProfileSeries(load=np.zeros(3), pv=np.ones(3)), 1.5)


# === CLIENTES ===

class TestAssignCustomers:
    def test_equal_split(self):
        customers = assign_customers(synth_profiles(48, 0), DatasetConfig())
        kinds = [c.kind for c in customers]
        assert len(customers) == 10
        assert kinds.count(CustomerKind.PROSUMER) == 5
        assert kinds.count(CustomerKind.CONSUMER) == 5

    @pytest.mark.parametrize("fraction,prosumers", [(0.7, 7), (0.3, 3), (0.0, 0), (1.0, 10), (0.25, 3)])
    def test_fraction_rule(self, fraction, prosumers):
        cfg = DatasetConfig(prosumer_fraction=fraction)
        assert cfg.prosumer_count == prosumers

    def test_zero_jitter_shares_series(self):
        customers = assign_customers(synth_profiles(48, 0), DatasetConfig(jitter=0.0))
        for customer in customers[1:]:
            assert np.array_equal(customer.demand, customers[0].demand)

    def test_same_seed_same_profiles(self):
        a = assign_customers(synth_profiles(48, 0), DatasetConfig(seed=5))
        b = assign_customers(synth_profiles(48, 0), DatasetConfig(seed=5))
        assert all(np.array_equal(x.demand, y.demand) and np.array_equal(x.generation, y.generation) for x, y in zip(a, b))

    def test_consumers_do_not_generate(self):
        customers = assign_customers(synth_profiles(48, 0), DatasetConfig())
        assert all(not c.generation.any() for c in customers if c.kind == CustomerKind.CONSUMER)

    def test_multiple_sources_round_robin(self, tmp_path):
        first = write_csv(ProfileSeries(load=np.full(24, 1.0), pv=np.zeros(24)), tmp_path / "a.csv")
        second = write_csv(ProfileSeries(load=np.full(24, 4.0), pv=np.full(24, 2.0)), tmp_path / "b.csv")
        cfg = DatasetConfig(customer_count=4, jitter=0.0, target_mean_load=1.5)
        customers = load_sources([first, second], cfg)
        assert customers[0].demand == pytest.approx(np.full(24, 1.5))
        assert customers[1].generation == pytest.approx(np.full(24, 0.75))
        assert customers[3].generation.sum() == 0.0

    def test_sources_of_different_length(self, tmp_path):
        first = write_csv(ProfileSeries(load=np.ones(24), pv=np.zeros(24)), tmp_path / "a.csv")
        second = write_csv(ProfileSeries(load=np.ones(48), pv=np.zeros(48)), tmp_path / "b.csv")
        with pytest.raises(ProfileDataError):
            load_sources([first, second], DatasetConfig())

    def test_load_dataset_sources(self):
        synthetic = load_dataset(DatasetConfig(synthetic_length=48))
        bundled = load_dataset(DatasetConfig(source="bundled"))
        assert synthetic[0].length == 48
        assert bundled[0].length == 8760
        assert np.mean([c.demand.mean() for c in bundled]) == pytest.approx(1.5, rel=0.25)


# === SINTÉTICOS ===

class TestSynthProfiles:
    def test_no_pv_at_midnight(self):
        series = synth_profiles(8760, seed=1)
        assert np.all(series.pv[::24] == 0.0)

    def test_length(self):
        assert synth_profiles(48, seed=1).length == 48

    def test_deterministic(self):
        a, b = synth_profiles(96, seed=9), synth_profiles(96, seed=9)
        assert np.array_equal(a.load, b.load) and np.array_equal(a.pv, b.pv)

    def test_non_negative_finite(self):
        series = synth_profiles(8760, seed=3)
        for values in (series.load, series.pv):
            assert np.all(np.isfinite(values)) and np.all(values >= 0)


class TestExportProsumerSeries:
    def test_first_prosumer_day(self):
        customers = assign_customers(synth_profiles(72, 0), DatasetConfig())
        frame = export_prosumer_series(customers, hours=48)
        assert isinstance(frame, pd.DataFrame)
        assert list(frame.columns) == ["hour", "demand", "generation", "net"]
        assert len(frame) == 48
        assert frame["net"].to_numpy() == pytest.approx(frame["generation"] - frame["demand"])

    def test_no_prosumers(self):
        customers = assign_customers(synth_profiles(48, 0), DatasetConfig(prosumer_fraction=0.0))
        assert export_prosumer_series(customers).empty
