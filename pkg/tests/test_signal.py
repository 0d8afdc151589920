import numpy as np
import pytest

from codel.datasets import synthetic_heartbeat, synthetic_pulse_train
from codel.errors import InsufficientDataError, ParameterError
from codel.signal import (
    RrSeries,
    Signal,
    butterworth_lowpass,
    detect_r_peaks,
    hampel_filter,
    rr_from_peaks,
    signal_to_rr,
    standardize,
)


def _steady_amplitude(samples, fs, skip_s=2.0):
    """Peak amplitude of a sinusoid after the filter transient has passed."""
    tail = samples[int(skip_s * fs):]
    return np.sqrt(2.0) * np.sqrt(np.mean(tail ** 2))


class TestSignalTypes:
    def test_signal_rejects_empty_and_nonfinite(self):
        with pytest.raises(ParameterError):
            Signal(np.array([]), 100.0)
        with pytest.raises(ParameterError):
            Signal(np.array([1.0, np.nan]), 100.0)
        with pytest.raises(ParameterError):
            Signal(np.ones(5), 0.0)

    def test_rr_series_rejects_nonpositive_intervals(self):
        with pytest.raises(ParameterError):
            RrSeries(np.array([800.0, 0.0, 900.0]))
        with pytest.raises(ParameterError):
            RrSeries(np.array([800.0, -5.0]))

    def test_rr_series_duration(self):
        rr = RrSeries(np.array([500.0, 1500.0]))
        assert rr.duration_ms == 2000.0
        assert len(rr) == 2


class TestStandardize:
    def test_three_point_example(self):
        out = standardize(Signal(np.array([1.0, 2.0, 3.0]), 10.0))
        np.testing.assert_allclose(
            out.samples, [-1.22474487, 0.0, 1.22474487], atol=1e-8
        )

    def test_constant_maps_to_zeros(self):
        out = standardize(Signal(np.full(7, 5.0), 10.0))
        np.testing.assert_array_equal(out.samples, np.zeros(7))

    def test_zero_mean_unit_std(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.normal(rng.uniform(-5, 5), rng.uniform(0.1, 10), 200)
            out = standardize(Signal(x, 100.0))
            assert abs(np.mean(out.samples)) < 1e-9
            assert abs(np.std(out.samples) - 1.0) < 1e-9
            assert out.fs == 100.0

    def test_idempotent(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            sig = Signal(rng.normal(3.0, 2.0, 150), 50.0)
            once = standardize(sig)
            twice = standardize(once)
            np.testing.assert_allclose(twice.samples, once.samples, atol=1e-9)


class TestHampelFilter:
    def test_isolated_spike_replaced(self):
        sig = Signal(np.array([1.0, 1, 1, 100, 1, 1, 1]), 6.0)
        out = hampel_filter(sig, half_window=3, n_sigmas=3.0)
        np.testing.assert_array_equal(out.samples, np.ones(7))

    def test_constant_unchanged(self):
        sig = Signal(np.full(20, 4.2), 10.0)
        out = hampel_filter(sig, half_window=5)
        np.testing.assert_array_equal(out.samples, sig.samples)

    def test_length_one_unchanged(self):
        out = hampel_filter(Signal(np.array([3.0]), 10.0), half_window=2)
        np.testing.assert_array_equal(out.samples, [3.0])

    def test_sample_equal_to_window_median_never_changes(self):
        rng = np.random.default_rng(2)
        x = rng.normal(0, 1, 300)
        hw = 5
        out = hampel_filter(Signal(x, 100.0), half_window=hw)
        for i in range(x.size):
            window = x[max(0, i - hw): min(x.size, i + hw + 1)]
            if x[i] == np.median(window):
                assert out.samples[i] == x[i]

    def test_parameter_validation(self):
        sig = Signal(np.ones(10), 10.0)
        with pytest.raises(ParameterError):
            hampel_filter(sig, half_window=0)
        with pytest.raises(ParameterError):
            hampel_filter(sig, half_window=3, n_sigmas=0.0)


class TestButterworthLowpass:
    def test_dc_passthrough(self):
        """A constant converges back to its value once the transient settles."""
        sig = Signal(np.full(600, 2.5), 100.0)
        out = butterworth_lowpass(sig, 25.0)
        np.testing.assert_allclose(out.samples[300:], 2.5, atol=1e-6)

    def test_cutoff_attenuation_is_3db(self):
        fs = 100.0
        t = np.arange(int(10 * fs)) / fs
        sig = Signal(np.sin(2 * np.pi * 25.0 * t), fs)
        out = butterworth_lowpass(sig, 25.0, order=4)
        ratio = _steady_amplitude(out.samples, fs)
        assert abs(ratio - 10 ** (-3.01 / 20)) < 0.01

    def test_nyquist_annihilated(self):
        fs = 100.0
        t = np.arange(int(10 * fs)) / fs
        sig = Signal(np.sin(2 * np.pi * 50.0 * t), fs)
        out = butterworth_lowpass(sig, 25.0, order=4)
        assert _steady_amplitude(out.samples, fs) < 1e-6

    def test_linearity(self):
        rng = np.random.default_rng(3)
        x = rng.normal(0, 1, 500)
        y = rng.normal(0, 1, 500)
        a, b = 2.5, -1.25
        fs = 100.0
        combined = butterworth_lowpass(Signal(a * x + b * y, fs), 20.0)
        separate = (
            a * butterworth_lowpass(Signal(x, fs), 20.0).samples
            + b * butterworth_lowpass(Signal(y, fs), 20.0).samples
        )
        np.testing.assert_allclose(combined.samples, separate, atol=1e-9)

    def test_parameter_validation(self):
        sig = Signal(np.ones(100), 100.0)
        with pytest.raises(ParameterError):
            butterworth_lowpass(sig, 50.0)  # at Nyquist
        with pytest.raises(ParameterError):
            butterworth_lowpass(sig, 60.0)
        with pytest.raises(ParameterError):
            butterworth_lowpass(sig, 25.0, order=3)


class TestDetectRPeaks:
    def test_impulse_train_recovered_exactly(self):
        sig, _ = synthetic_pulse_train(duration_s=10.0, fs=100.0,
                                       pulse_width_s=0.005)
        peaks = detect_r_peaks(sig)
        np.testing.assert_array_equal(peaks, np.arange(100, 1000, 100))

    def test_all_zeros_gives_empty(self):
        peaks = detect_r_peaks(Signal(np.zeros(500), 100.0))
        assert peaks.size == 0

    def test_noisy_beats_recovered_within_two_samples(self):
        """Every known beat is found within +/-2 samples under noise.

        Noise at a tenth of the template peak (20 dB peak SNR). The
        order-2 filter is used here: its group delay at these settings
        is about one sample, which is what leaves room for the +/-2
        localization budget.
        """
        for seed in range(5):
            sig, true_peaks = synthetic_pulse_train(
                duration_s=30.0, fs=100.0, pulse_width_s=0.03,
                noise_std=0.1, seed=seed,
            )
            filtered = butterworth_lowpass(standardize(sig), 25.0, order=2)
            peaks = detect_r_peaks(filtered)
            for truth in true_peaks:
                assert np.min(np.abs(peaks - truth)) <= 2

    def test_strictly_increasing_with_refractory_gap(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            sig = Signal(rng.normal(0, 1, 2000), 100.0)
            peaks = detect_r_peaks(sig)
            if peaks.size > 1:
                gaps = np.diff(peaks)
                assert np.all(gaps > 0)
                assert np.all(gaps >= 0.3 * 100.0)


class TestRrFromPeaks:
    def test_uniform_spacing(self):
        rr = rr_from_peaks(np.array([100, 200, 300]), 100.0)
        np.testing.assert_array_equal(rr.intervals, [1000.0, 1000.0])

    def test_mixed_spacing(self):
        rr = rr_from_peaks(np.array([0, 50, 150]), 100.0)
        np.testing.assert_array_equal(rr.intervals, [500.0, 1000.0])

    def test_too_few_peaks(self):
        with pytest.raises(InsufficientDataError):
            rr_from_peaks(np.array([100, 200]), 100.0)

    def test_non_increasing_peaks(self):
        with pytest.raises(ParameterError):
            rr_from_peaks(np.array([100, 100, 200]), 100.0)

    def test_length_and_positivity(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            peaks = np.cumsum(rng.integers(30, 200, size=rng.integers(3, 40)))
            rr = rr_from_peaks(peaks, 100.0)
            assert len(rr) == peaks.size - 1
            assert np.all(rr.intervals > 0)


class TestFullChain:
    def test_heartbeat_intervals_recovered(self):
        """The complete cleaning chain gets the beat rate right.

        Individual peak positions may shift a sample or two, so the
        check is on the mean interval, not sample-exact indices.
        """
        intervals = np.full(40, 999.0)
        sig, _ = synthetic_heartbeat(intervals, fs=100.0, noise_std=0.01)
        rr = signal_to_rr(sig)
        assert len(rr) >= 35
        assert abs(np.mean(rr.intervals) - 999.0) < 30.0

    def test_deterministic(self):
        sig, _ = synthetic_heartbeat(np.full(20, 950.0), fs=100.0,
                                     noise_std=0.01, seed=9)
        first = signal_to_rr(sig)
        second = signal_to_rr(sig)
        np.testing.assert_array_equal(first.intervals, second.intervals)
