import json
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmest import asv, harness
from cmest.channel import (
    NetworkConfig,
    PerSensorPower,
    RayleighFading,
    TotalPower,
)
from cmest.errors import ConfigError
from cmest.harness import (
    CSV_HEADER,
    ExperimentSpec,
    Sweep,
    TrialAccumulator,
    check_against_analytic,
    result_to_csv,
    result_to_json,
    run_af_compare,
    run_cauchy_robustness,
    run_experiment,
    run_fading_compare,
    run_heterogeneous_consistency,
    run_kind,
    spec_from_dict,
    spec_to_dict,
    write_tracks,
)
from cmest.noise import (
    BoundedScales,
    Cauchy,
    Gaussian,
    HeterogeneousScaled,
    Uniform,
)


def _network(**kw):
    defaults = dict(
        n_sensors=200,
        theta=2.0,
        theta_range=12.0,
        omega=0.5,
        power=TotalPower(10.0),
        channel_noise_variance=1.0,
        noise=Gaussian(1.0),
    )
    defaults.update(kw)
    return NetworkConfig(**defaults)


def _spec(**kw):
    defaults = dict(
        kind="asv-vs-omega",
        network=_network(),
        sweep=Sweep("omega", (0.3, 0.5)),
        trials=6000,
        seed=4242,
    )
    defaults.update(kw)
    return ExperimentSpec(**defaults)


class TestTrialAccumulator:
    def test_matches_numpy(self, rng):
        xs = rng.standard_normal(1000) * 3.0 + 1.0
        acc = TrialAccumulator()
        for x in xs[:100]:
            acc.add(float(x))
        acc.add_batch(xs[100:])
        assert acc.n == 1000
        assert acc.mean == pytest.approx(xs.mean(), rel=1e-12)
        assert acc.variance == pytest.approx(xs.var(ddof=1), rel=1e-12)
        assert acc.mean_square == pytest.approx(np.mean(xs ** 2), rel=1e-12)

    def test_small_counts(self):
        acc = TrialAccumulator()
        assert math.isnan(acc.variance)
        acc.add(3.0)
        assert acc.mean == 3.0
        assert math.isnan(acc.variance)

    @given(
        st.lists(
            st.floats(min_value=-1e3, max_value=1e3),
            min_size=2,
            max_size=60,
        ),
        st.integers(min_value=0, max_value=60),
    )
    @settings(max_examples=200)
    def test_merge_matches_single_pass(self, xs, cut):
        cut = min(cut, len(xs))
        left = TrialAccumulator()
        left.add_batch(np.asarray(xs[:cut]))
        right = TrialAccumulator()
        right.add_batch(np.asarray(xs[cut:]))
        left.merge(right)
        whole = TrialAccumulator()
        whole.add_batch(np.asarray(xs))
        assert left.n == whole.n
        assert left.mean == pytest.approx(whole.mean, rel=1e-10, abs=1e-10)
        assert left.m2 == pytest.approx(whole.m2, rel=1e-10, abs=1e-7)

    def test_merge_order_stability(self, rng):
        chunks = [rng.standard_normal(97) for _ in range(7)]
        a = TrialAccumulator()
        for c in chunks:
            part = TrialAccumulator()
            part.add_batch(c)
            a.merge(part)
        b = TrialAccumulator()
        b.add_batch(np.concatenate(chunks))
        assert a.variance == pytest.approx(b.variance, rel=1e-10)


class TestDeterminism:
    def test_thread_count_does_not_change_results(self):
        spec = _spec(trials=10_000)
        r1 = run_experiment(spec, threads=1)
        r4 = run_experiment(spec, threads=4)
        assert r1.records == r4.records
        assert result_to_csv(r1) == result_to_csv(r4)
        assert result_to_json(r1) == result_to_json(r4)

    def test_repeat_runs_are_byte_identical(self, tmp_path):
        spec = _spec(trials=3000)
        paths = []
        for tag in ("a", "b"):
            tracks = run_kind(spec, threads=2)
            paths.extend(write_tracks(tracks, tmp_path / f"{tag}.csv", "csv"))
            write_tracks(tracks, tmp_path / f"{tag}.json", "json")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_different_seeds_differ(self):
        a = run_experiment(_spec(seed=1), threads=1)
        b = run_experiment(_spec(seed=2), threads=1)
        assert a.records != b.records


class TestRunExperiment:
    def test_matches_analytic_at_reference_point(self):
        # total power 10, L = 500: the asymptotic regime is well entered
        spec = _spec(
            network=_network(n_sensors=500),
            sweep=Sweep("omega", (2.0 * math.pi / 12.0,)),
            trials=30_000,
        )
        rec = run_experiment(spec).records[0]
        assert rec.analytic_asv == pytest.approx(1.252478, rel=1e-5)
        assert rec.normalized_variance == pytest.approx(rec.analytic_asv, rel=0.05)

    def test_noiseless_network_has_negligible_variance(self):
        spec = _spec(
            network=_network(
                noise=Gaussian(1e-12), channel_noise_variance=0.0, n_sensors=100
            ),
            sweep=Sweep("omega", (0.5,)),
            trials=2000,
        )
        rec = run_experiment(spec).records[0]
        assert rec.normalized_variance < 1e-6

    def test_per_sensor_mode_reports_zero_snr_asymptote(self):
        spec = _spec(
            network=_network(power=PerSensorPower(1.0)),
            sweep=Sweep("omega", (0.4,)),
            trials=1000,
        )
        rec = run_experiment(spec).records[0]
        assert rec.analytic_asv == pytest.approx(
            asv.asv_gaussian(1.0, 0.0, 0.4), rel=1e-12
        )

    def test_kind_and_sweep_must_agree(self):
        with pytest.raises(ConfigError):
            run_experiment(_spec(kind="var-vs-L"))

    def test_invalid_sweep_value_propagates_config_error(self):
        spec = _spec(sweep=Sweep("omega", (0.3, 100.0)))  # beyond 2*pi/theta_range
        with pytest.raises(ConfigError):
            run_experiment(spec)

    def test_standard_errors_are_honest(self):
        # across seeds, the analytic value should sit inside +-3 SE nearly
        # always; the tolerance matches a ~99.7% interval with slack
        spec_base = _spec(
            network=_network(n_sensors=500),
            sweep=Sweep("omega", (0.5,)),
            trials=800,
        )
        hits = 0
        for seed in range(100):
            rec = run_experiment(replace(spec_base, seed=seed)).records[0]
            if abs(rec.normalized_variance - rec.analytic_asv) <= 3.0 * rec.std_error:
                hits += 1
        assert hits >= 99


class TestFadingCompare:
    def test_ratio_tracks_penalty(self):
        spec = _spec(
            kind="fading-compare",
            network=_network(n_sensors=500, fading=RayleighFading()),
            sweep=Sweep("n_sensors", (500.0,)),
            trials=20_000,
        )
        tracks = run_fading_compare(spec)
        ratio = tracks["faded"].metadata["measured_ratio_by_point"][0]
        assert ratio == pytest.approx(4.0 / math.pi, rel=0.1)
        assert tracks["faded"].metadata["fading_penalty"] == pytest.approx(4 / math.pi)
        assert tracks["faded"].records[0].analytic_asv == pytest.approx(
            tracks["unfaded"].records[0].analytic_asv * 4.0 / math.pi, rel=1e-12
        )

    def test_requires_fading_model(self):
        with pytest.raises(ConfigError):
            run_fading_compare(_spec(kind="fading-compare",
                                     sweep=Sweep("n_sensors", (100.0,))))


class TestAfCompare:
    def test_crossover_in_theta(self):
        # the phase scheme wins near the top of the range, AF wins near zero
        spec = _spec(
            kind="af-compare",
            network=_network(n_sensors=500, omega=2.0 * math.pi / 12.0),
            sweep=Sweep("theta", (0.25, 11.5)),
            trials=20_000,
        )
        tracks = run_af_compare(spec)
        cm = tracks["cm"].records
        af = tracks["af"].records
        assert af[0].normalized_variance < cm[0].normalized_variance
        assert cm[1].normalized_variance < af[1].normalized_variance
        # AF analytic value depends on theta
        assert af[0].analytic_asv == pytest.approx(asv.asv_af(0.25, 1.0, 0.1))
        assert af[1].analytic_asv == pytest.approx(asv.asv_af(11.5, 1.0, 0.1))

    def test_flatness_metadata_on_size_sweep(self):
        spec = _spec(
            kind="af-compare",
            sweep=Sweep("n_sensors", (50.0, 100.0, 200.0, 500.0)),
            trials=5000,
        )
        tracks = run_af_compare(spec)
        reg = tracks["af"].metadata["flatness_regression"]
        assert abs(reg["slope"]) <= 4.0 * reg["stderr"]

    def test_infinite_variance_needs_explicit_nominal(self):
        spec = _spec(
            kind="af-compare",
            network=_network(noise=Cauchy(1.0)),
            sweep=Sweep("theta", (2.0,)),
        )
        with pytest.raises(ConfigError):
            run_af_compare(spec)


@pytest.fixture(scope="module")
def robustness_tracks():
    spec = _spec(
        kind="cauchy-robustness",
        network=_network(noise=Cauchy(1.0), omega=2.0 * math.pi / 12.0),
        sweep=Sweep("n_sensors", (100.0, 1000.0, 10000.0)),
        trials=400,
        af_nominal_variance=1.0,
    )
    return run_cauchy_robustness(spec)


class TestCauchyRobustness:

    def test_track_layout(self, robustness_tracks):
        tracks = robustness_tracks
        assert set(tracks) == {"cm-batch", "af-batch", "cm-trace", "af-trace"}
        for t in tracks.values():
            assert len(t.records) == 3
        assert tracks["cm-trace"].records[0].n_trials == 1

    def test_cm_median_shrinks_af_does_not(self, robustness_tracks):
        cm_med = robustness_tracks["cm-batch"].metadata["median_abs_error_by_point"]
        af_med = robustness_tracks["af-batch"].metadata["median_abs_error_by_point"]
        assert cm_med[0] > cm_med[1] > cm_med[2]
        assert af_med[2] > 0.25 * af_med[0]  # stuck at the sensing-noise scale

    def test_ks_metadata(self, robustness_tracks):
        ks = robustness_tracks["af-batch"].metadata["ks_af_smallest_vs_largest"]
        assert ks["pvalue"] > 0.01

    def test_seed_replay(self):
        spec = _spec(
            kind="cauchy-robustness",
            network=_network(noise=Cauchy(1.0)),
            sweep=Sweep("n_sensors", (100.0, 1000.0)),
            trials=50,
            af_nominal_variance=1.0,
        )
        a = run_cauchy_robustness(spec)
        b = run_cauchy_robustness(spec)
        for key in a:
            # NaN-tolerant comparison: replayed files must be byte-identical
            assert result_to_csv(a[key]) == result_to_csv(b[key])
            assert result_to_json(a[key]) == result_to_json(b[key])


class TestHeterogeneousConsistency:
    def test_tracks_and_mse(self):
        noise = HeterogeneousScaled(Gaussian(1.0), BoundedScales(1.0))
        spec = _spec(
            kind="heterogeneous-consistency",
            network=_network(noise=noise, power=PerSensorPower(1.0)),
            sweep=Sweep("n_sensors", (100.0, 1000.0)),
            trials=300,
        )
        tracks = run_heterogeneous_consistency(spec)
        assert set(tracks) == {"bounded", "linear-growth"}
        bounded = tracks["bounded"].metadata["mse_by_point"]
        linear = tracks["linear-growth"].metadata["mse_by_point"]
        assert bounded[1] < bounded[0] < 0.05
        assert linear[1] > 10.0 * bounded[1]  # the stalled track stays high

    def test_requires_heterogeneous_noise(self):
        spec = _spec(
            kind="heterogeneous-consistency",
            sweep=Sweep("n_sensors", (100.0,)),
        )
        with pytest.raises(ConfigError):
            run_heterogeneous_consistency(spec)


class TestSerialization:
    def test_csv_schema(self):
        result = run_experiment(_spec(trials=100))
        text = result_to_csv(result)
        lines = text.strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert CSV_HEADER == (
            "sweep_value,n_trials,normalized_variance,std_error,analytic_asv,bias"
        )
        assert len(lines) == 1 + 2
        first = lines[1].split(",")
        assert len(first) == 6
        assert float(first[0]) == 0.3
        assert int(first[1]) == 100

    def test_json_round_trip(self):
        result = run_experiment(_spec(trials=100))
        payload = json.loads(result_to_json(result))
        assert payload["metadata"]["seed"] == 4242
        assert payload["metadata"]["version"]
        assert len(payload["records"]) == 2
        assert set(payload["records"][0]) == {
            "sweep_value",
            "n_trials",
            "normalized_variance",
            "std_error",
            "analytic_asv",
            "bias",
        }
        # spec echo reconstructs the exact spec
        rebuilt = spec_from_dict(payload["metadata"]["spec"])
        assert rebuilt == _spec(trials=100)

    def test_non_finite_maps_to_null_in_json(self):
        spec = _spec(
            kind="cauchy-robustness",
            network=_network(noise=Cauchy(1.0)),
            sweep=Sweep("n_sensors", (100.0,)),
            trials=20,
            af_nominal_variance=1.0,
        )
        tracks = run_cauchy_robustness(spec)
        payload = json.loads(result_to_json(tracks["af-trace"]))
        assert payload["records"][0]["normalized_variance"] is None

    def test_track_file_naming(self, tmp_path):
        spec = _spec(
            kind="fading-compare",
            network=_network(fading=RayleighFading()),
            sweep=Sweep("n_sensors", (100.0,)),
            trials=200,
        )
        tracks = run_fading_compare(spec)
        paths = write_tracks(tracks, tmp_path / "out.csv", "csv")
        names = sorted(p.name for p in paths)
        assert names == ["out.faded.csv", "out.unfaded.csv"]

    def test_spec_dict_round_trip_all_models(self):
        for noise in [
            Gaussian(1.5),
            Cauchy(0.5),
            Uniform(2.0),
            HeterogeneousScaled(Gaussian(1.0), BoundedScales(2.0)),
        ]:
            spec = _spec(network=_network(noise=noise))
            assert spec_from_dict(spec_to_dict(spec)) == spec

    def test_unknown_keys_rejected(self):
        d = spec_to_dict(_spec())
        d["network"]["bogus"] = 1
        with pytest.raises(ConfigError):
            spec_from_dict(d)

    def test_wall_time_not_serialized(self):
        result = run_experiment(_spec(trials=100))
        assert result.wall_time_s > 0.0
        assert "wall_time" not in result_to_json(result)


class TestCheck:
    def test_detects_mismatch(self):
        result = run_experiment(_spec(network=_network(n_sensors=500), trials=5000))
        assert check_against_analytic(result, tolerance=0.2) == []
        failures = check_against_analytic(result, tolerance=1e-9)
        assert failures and {"sweep_value", "relative_deviation"} <= set(failures[0])
