"""Loss models: Friis oracles, horizon model, clutter, tables."""

import math
import statistics
from dataclasses import replace

import numpy as np
import pytest

import specpredict as sp
from specpredict import ClutterEnvironment, LinkGeometry
from specpredict.errors import (
    DistanceOutOfRangeError,
    EnvironmentUnsupportedError,
    FrequencyOutOfRangeError,
    NonMonotoneDistancesError,
    TableParseError,
)

Z95 = statistics.NormalDist().inv_cdf(0.95)  # 1.6448536269514715


def geom(**kwargs):
    defaults = dict(distance_km=1.0, h_tx_m=10.0, h_rx_m=10.0, freq_mhz=1000.0)
    defaults.update(kwargs)
    return LinkGeometry(**defaults)


class TestGeometryValidation:
    @pytest.mark.parametrize(
        "field,value",
        [
            ("distance_km", 0.0),
            ("distance_km", -1.0),
            ("h_tx_m", 0.5),
            ("h_rx_m", 0.0),
            ("time_pct", 0.0),
            ("time_pct", 100.0),
            ("loc_pct", -5.0),
            ("loc_pct", 100.0),
        ],
    )
    def test_rejects_out_of_range_fields(self, field, value):
        with pytest.raises(ValueError):
            geom(**{field: value})

    def test_frequency_checked_at_evaluation_not_construction(self):
        g = geom(freq_mhz=-10.0)  # constructs fine
        with pytest.raises(ValueError):
            sp.free_space_loss(g)


class TestFreeSpace:
    def test_friis_reference_point(self):
        assert sp.free_space_loss(geom()) == pytest.approx(92.45, abs=1e-12)

    def test_friis_two_km(self):
        expected = 92.45 + 20 * math.log10(2)  # 98.47059991327963
        assert sp.free_space_loss(geom(distance_km=2.0)) == pytest.approx(expected, abs=1e-12)

    def test_doubling_distance_adds_six_db(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            d = float(rng.uniform(0.05, 400.0))
            f = float(rng.uniform(100.0, 20000.0))
            g1, g2 = geom(distance_km=d, freq_mhz=f), geom(distance_km=2 * d, freq_mhz=f)
            delta = sp.free_space_loss(g2) - sp.free_space_loss(g1)
            assert delta == pytest.approx(6.020599913279624, abs=1e-9)

    def test_slant_distance_from_height_difference(self):
        # 100 m height offset over 1 km ground: slant = hypot(1, 0.1) km
        g = geom(h_tx_m=120.0, h_rx_m=20.0)
        expected = 20 * math.log10(math.hypot(1.0, 0.1)) + 20 * math.log10(1000.0) + 32.45
        assert sp.free_space_loss(g) == pytest.approx(expected, abs=1e-12)
        assert sp.free_space_loss(g) > sp.free_space_loss(geom())

    def test_equal_heights_use_ground_distance(self):
        assert sp.free_space_loss(geom(h_tx_m=77.0, h_rx_m=77.0)) == pytest.approx(
            92.45, abs=1e-12
        )

    def test_strictly_monotone_in_distance_and_frequency(self):
        rng = np.random.default_rng(6)
        for _ in range(300):
            d = float(rng.uniform(0.05, 500.0))
            f = float(rng.uniform(50.0, 30000.0))
            h1 = float(rng.uniform(1, 300))
            h2 = float(rng.uniform(1, 300))
            base = geom(distance_km=d, freq_mhz=f, h_tx_m=h1, h_rx_m=h2)
            assert sp.free_space_loss(replace(base, distance_km=d * 1.01)) > sp.free_space_loss(base)
            assert sp.free_space_loss(replace(base, freq_mhz=f * 1.01)) > sp.free_space_loss(base)


class TestSmoothEarth:
    def test_reduces_to_free_space_in_los_at_median_time(self):
        model = sp.SmoothEarthLoss()
        # horizon for 10 m / 10 m is ~26 km; stay well inside
        for d in (0.5, 2.0, 10.0, 12.9):
            g = geom(distance_km=d, time_pct=50.0)
            assert model.loss_db(g) == pytest.approx(sp.free_space_loss(g), abs=0.01)

    def test_beyond_horizon_slope(self):
        model = sp.SmoothEarthLoss(beyond_horizon_db_per_km=0.5)
        g = geom(distance_km=200.0, time_pct=50.0)
        horizon = model.horizon_km(g)
        expected = sp.free_space_loss(g) + 0.5 * (200.0 - horizon)
        assert model.loss_db(g) == pytest.approx(expected, abs=1e-9)

    def test_time_percentage_lowers_loss_monotonically(self):
        model = sp.SmoothEarthLoss()
        g = geom(distance_km=300.0)
        losses = [model.loss_db(replace(g, time_pct=q)) for q in (5, 25, 50, 75, 95)]
        assert all(a >= b for a, b in zip(losses, losses[1:]))

    def test_never_better_than_free_space(self):
        model = sp.SmoothEarthLoss()
        rng = np.random.default_rng(7)
        for _ in range(500):
            g = geom(
                distance_km=float(rng.uniform(0.1, 1000.0)),
                freq_mhz=float(rng.uniform(125.0, 15500.0)),
                h_tx_m=float(rng.uniform(1, 500)),
                h_rx_m=float(rng.uniform(1, 50)),
                time_pct=float(rng.uniform(1, 99)),
            )
            assert model.loss_db(g) >= sp.free_space_loss(g) - 1e-12

    def test_strictly_monotone_in_distance(self):
        model = sp.SmoothEarthLoss()
        rng = np.random.default_rng(8)
        for _ in range(300):
            d = float(rng.uniform(0.1, 900.0))
            g = geom(
                distance_km=d,
                h_tx_m=float(rng.uniform(1, 200)),
                h_rx_m=float(rng.uniform(1, 200)),
                time_pct=float(rng.uniform(1, 99)),
            )
            assert model.loss_db(replace(g, distance_km=d * 1.02)) > model.loss_db(g)

    def test_frequency_validity_window(self):
        model = sp.SmoothEarthLoss()
        with pytest.raises(FrequencyOutOfRangeError):
            model.loss_db(geom(freq_mhz=124.9))
        with pytest.raises(FrequencyOutOfRangeError):
            model.loss_db(geom(freq_mhz=15500.1))
        model.loss_db(geom(freq_mhz=125.0))
        model.loss_db(geom(freq_mhz=15500.0))

    def test_distance_validity_window(self):
        model = sp.SmoothEarthLoss()
        with pytest.raises(DistanceOutOfRangeError):
            model.loss_db(geom(distance_km=1000.5))
        model.loss_db(geom(distance_km=1000.0))


class TestClutter:
    def test_none_is_zero(self):
        assert sp.NoClutter().loss_db(geom(clutter_env=ClutterEnvironment.URBAN)) == 0.0

    def test_median_location_returns_configured_median(self):
        model = sp.StatisticalClutter()
        assert model.loss_db(geom(clutter_env=ClutterEnvironment.URBAN, loc_pct=50.0)) == pytest.approx(20.0, abs=1e-12)
        assert model.loss_db(geom(clutter_env=ClutterEnvironment.SUBURBAN, loc_pct=50.0)) == pytest.approx(12.0, abs=1e-12)

    def test_ninety_five_percentile_offset(self):
        model = sp.StatisticalClutter()
        g50 = geom(clutter_env=ClutterEnvironment.URBAN, loc_pct=50.0)
        g95 = geom(clutter_env=ClutterEnvironment.URBAN, loc_pct=95.0)
        diff = model.loss_db(g95) - model.loss_db(g50)
        assert diff == pytest.approx(1.645 * 6.0, abs=0.01)
        assert diff == pytest.approx(6.0 * Z95, abs=1e-12)

    def test_monotone_in_location_percentage(self):
        model = sp.StatisticalClutter()
        rng = np.random.default_rng(9)
        for env in (ClutterEnvironment.URBAN, ClutterEnvironment.SUBURBAN):
            pcts = np.sort(rng.uniform(0.5, 99.5, size=50))
            losses = [model.loss_db(geom(clutter_env=env, loc_pct=float(p))) for p in pcts]
            assert all(a <= b + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_never_negative(self):
        model = sp.StatisticalClutter(suburban_median_db=1.0, sigma_db=6.0)
        loss = model.loss_db(geom(clutter_env=ClutterEnvironment.SUBURBAN, loc_pct=0.1))
        assert loss == 0.0

    def test_open_environment_unsupported(self):
        with pytest.raises(EnvironmentUnsupportedError):
            sp.StatisticalClutter().loss_db(geom(clutter_env=ClutterEnvironment.OPEN))

    def test_frequency_validity_window(self):
        model = sp.StatisticalClutter()
        with pytest.raises(FrequencyOutOfRangeError):
            model.loss_db(geom(freq_mhz=499.0, clutter_env=ClutterEnvironment.URBAN))
        with pytest.raises(FrequencyOutOfRangeError):
            model.loss_db(geom(freq_mhz=67001.0, clutter_env=ClutterEnvironment.URBAN))


class TestTables:
    def make_table(self, tmp_path, text, name="loss.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    def test_minimal_table_and_midpoint(self, tmp_path):
        path = self.make_table(tmp_path, "distance_km,loss_db\n1.0,100.0\n3.0,120.0\n")
        table = sp.load_loss_table(path)
        assert table.distances_km.size == 2
        assert table.interpolate(2.0) == pytest.approx(110.0, abs=1e-12)
        assert table.interpolate(1.0) == 100.0
        assert table.interpolate(3.0) == 120.0

    def test_crlf_accepted(self, tmp_path):
        path = self.make_table(tmp_path, "distance_km,loss_db\r\n1.0,100.0\r\n3.0,120.0\r\n")
        assert sp.load_loss_table(path).interpolate(2.0) == pytest.approx(110.0)

    def test_extrapolation_refused(self, tmp_path):
        path = self.make_table(tmp_path, "distance_km,loss_db\n1.0,100.0\n3.0,120.0\n")
        table = sp.load_loss_table(path)
        with pytest.raises(DistanceOutOfRangeError):
            table.interpolate(0.999)
        with pytest.raises(DistanceOutOfRangeError):
            table.interpolate(3.001)

    def test_non_monotone_rejected(self, tmp_path):
        path = self.make_table(tmp_path, "distance_km,loss_db\n3.0,120.0\n1.0,100.0\n")
        with pytest.raises(NonMonotoneDistancesError):
            sp.load_loss_table(path)

    def test_header_only_rejected(self, tmp_path):
        path = self.make_table(tmp_path, "distance_km,loss_db\n")
        with pytest.raises(TableParseError):
            sp.load_loss_table(path)

    def test_bad_header_reports_line(self, tmp_path):
        path = self.make_table(tmp_path, "km,db\n1.0,100.0\n")
        with pytest.raises(TableParseError, match="line 1"):
            sp.load_loss_table(path)

    def test_bad_row_reports_line(self, tmp_path):
        path = self.make_table(tmp_path, "distance_km,loss_db\n1.0,100.0\n2.0,oops\n")
        with pytest.raises(TableParseError, match="line 3"):
            sp.load_loss_table(path)

    def test_wrong_column_count_reports_line(self, tmp_path):
        path = self.make_table(tmp_path, "distance_km,loss_db\n1.0,100.0,7\n")
        with pytest.raises(TableParseError, match="line 2"):
            sp.load_loss_table(path)

    def test_non_finite_and_negative_rejected(self, tmp_path):
        with pytest.raises(TableParseError, match="line 2"):
            sp.load_loss_table(self.make_table(tmp_path, "distance_km,loss_db\n1.0,nan\n2.0,3.0\n"))
        with pytest.raises(TableParseError, match="line 3"):
            sp.load_loss_table(
                self.make_table(tmp_path, "distance_km,loss_db\n1.0,3.0\n2.0,-1.0\n", name="neg.csv")
            )

    def test_missing_file_is_parse_error(self, tmp_path):
        with pytest.raises(TableParseError):
            sp.load_loss_table(tmp_path / "absent.csv")

    def test_single_row_rejected(self, tmp_path):
        path = self.make_table(tmp_path, "distance_km,loss_db\n1.0,100.0\n")
        with pytest.raises(TableParseError):
            sp.load_loss_table(path)

    def test_table_models_interpolate(self, tmp_path):
        path = self.make_table(tmp_path, "distance_km,loss_db\n1.0,100.0\n3.0,120.0\n")
        table = sp.load_loss_table(path)
        model = sp.PropagationModel(basic=sp.TableLoss(table), clutter=sp.TableClutter(table))
        result = sp.total_loss(model, geom(distance_km=2.0))
        assert result.l_basic_db == pytest.approx(110.0)
        assert result.l_clutter_db == pytest.approx(110.0)
        assert result.l_total_db == pytest.approx(220.0)


class TestComposition:
    def test_friis_with_no_clutter(self):
        model = sp.PropagationModel(sp.FreeSpaceLoss())
        result = sp.total_loss(model, geom())
        assert result.l_basic_db == pytest.approx(92.45, abs=1e-12)
        assert result.l_clutter_db == 0.0
        assert result.l_total_db == pytest.approx(92.45, abs=1e-12)

    def test_total_is_exact_sum(self):
        result = sp.PathLossResult(l_basic_db=100.0, l_clutter_db=20.0)
        assert result.l_total_db == 120.0

    def test_additivity_property(self):
        rng = np.random.default_rng(10)
        models = [
            sp.PropagationModel(sp.FreeSpaceLoss()),
            sp.PropagationModel(sp.FreeSpaceLoss(), sp.StatisticalClutter()),
            sp.PropagationModel(sp.SmoothEarthLoss(), sp.StatisticalClutter()),
        ]
        for _ in range(200):
            g = geom(
                distance_km=float(rng.uniform(0.1, 900)),
                freq_mhz=float(rng.uniform(500, 15500)),
                clutter_env=ClutterEnvironment.URBAN,
                time_pct=float(rng.uniform(1, 99)),
                loc_pct=float(rng.uniform(1, 99)),
            )
            for model in models:
                result = sp.total_loss(model, g)
                assert result.l_total_db == result.l_basic_db + result.l_clutter_db

    def test_purity(self, basic_geometry):
        model = sp.PropagationModel(sp.SmoothEarthLoss(), sp.NoClutter())
        assert sp.total_loss(model, basic_geometry) == sp.total_loss(model, basic_geometry)

    def test_component_errors_propagate(self):
        model = sp.PropagationModel(sp.SmoothEarthLoss())
        with pytest.raises(FrequencyOutOfRangeError):
            sp.total_loss(model, geom(freq_mhz=100.0))

    def test_negative_components_rejected(self):
        with pytest.raises(ValueError):
            sp.PathLossResult(l_basic_db=-1.0, l_clutter_db=0.0)
        with pytest.raises(ValueError):
            sp.PathLossResult(l_basic_db=10.0, l_clutter_db=float("inf"))
