"""Analytic response curves, numeric transfer extraction, and curve tools."""
import json
import math

import numpy as np
import pytest

from socaccel import (
    AmplitudeTooLargeError,
    Displace,
    Evolve,
    ParameterError,
    PulseSequence,
    Readout,
    ResolutionError,
    ResponseCurve,
    RotateY,
    Sinusoid,
    TrapConfig,
    derive_modes,
    find_peaks,
    find_zeros,
    h_perp,
    main_lobe_fwhm,
    numeric_response,
    numeric_response_curve,
    preset_cp,
    preset_up,
    response_cp,
    response_up,
    run_sequence,
)

MASS = 1.44316e-25  # Rb-87, kg
WT = 2 * math.pi * 1000.0


def config_from(omega_tilde: float, epsilon: float) -> TrapConfig:
    w0 = 2.0 * omega_tilde * math.sqrt(epsilon) / (1.0 + epsilon)
    wc = 2.0 * omega_tilde * (epsilon - 1.0) / (1.0 + epsilon)
    return TrapConfig(MASS, w0, wc)


CFG = config_from(WT, 4.0)
MODES = derive_modes(CFG)
L = MODES.l_osc
WM, WP = MODES.omega_minus, MODES.omega_plus
R0 = 2.0 * L
T5 = 5 * math.pi / WT  # omega_minus * t = 2 pi, omega_plus * t = 8 pi
M_OVER_H = 1.0 / (WT * L**2)
GRID = np.linspace(0.0, 3.0 * WP, 4096)


class TestResponseUp:
    def test_dc_value_finite_and_nonzero(self):
        # away from windows where the lever arm integrates to zero
        curve = response_up(MODES, R0, 2.5 * math.pi / WT, grid=np.array([0.0, WT]))
        v = curve.values[0]
        assert np.isfinite(v) and abs(v) > 1e-2

    def test_matches_lever_arm_quadrature(self):
        up = response_up(MODES, R0, T5, grid=GRID)
        tt = np.linspace(0.0, T5, 20001)
        hh = h_perp(MODES, tt)
        peak = np.abs(up.values).max()
        for idx in range(0, GRID.shape[0], 409):
            w = GRID[idx]
            pred = 4.0 * R0 * M_OVER_H * np.trapezoid(hh * np.exp(-1j * w * tt), tt)
            assert abs(up.values[idx] - pred) < 1e-6 * peak, f"omega = {w:.1f}"

    def test_mode_frequency_magnitudes(self):
        # the window sinc hits its removable-singularity value there, leaving
        # |F0(w-)| = (m/hbar) r0 t w+/wt and |F0(w+)| = (m/hbar) r0 t w-/wt
        at_wm = response_up(MODES, R0, T5, grid=np.array([0.0, WM])).values[1]
        at_wp = response_up(MODES, R0, T5, grid=np.array([0.0, WP])).values[1]
        assert abs(abs(at_wm) - M_OVER_H * R0 * T5 * WP / WT) < 1e-12 * abs(at_wm)
        assert abs(abs(at_wp) - M_OVER_H * R0 * T5 * WM / WT) < 1e-12 * abs(at_wp)

    def test_linear_in_r0(self):
        one = response_up(MODES, R0, T5, grid=GRID)
        two = response_up(MODES, 2.0 * R0, T5, grid=GRID)
        assert np.array_equal(two.values, 2.0 * one.values), "doubling r0 must double the curve"

    def test_peak_ratio_tracks_mode_ratio(self):
        # windowed peak heights near omega_-/omega_+ approach epsilon once the
        # window resolves the slow mode (omega_- t >> pi); the sidelobes of
        # the tall slow-mode peak exceed the fast-mode peak, so the fast peak
        # is found in its own frequency window
        eps = 22.0
        modes = derive_modes(config_from(WT, eps))
        wm, wp = modes.omega_minus, modes.omega_plus
        ratios = []
        for mult in (20, 80):
            t = mult * math.pi / WT
            curve = response_up(modes, R0, t, grid=np.linspace(0.0, 1.3 * wp, 65536))
            peaks = find_peaks(curve)
            pm = max(h for w, h in peaks if abs(w - wm) < 2 * math.pi / t)
            pp = max(h for w, h in peaks if abs(w - wp) < 2 * math.pi / t)
            ratios.append(pm / pp)
        assert abs(ratios[1] - eps) < 0.05 * eps, f"resolved ratio {ratios[1]}"
        assert abs(ratios[1] - eps) < abs(ratios[0] - eps), "ratio should approach eps as t grows"

    def test_fwhm_scales_inverse_t(self):
        grids = np.linspace(0.0, 3.0 * WP, 16384)
        f1 = main_lobe_fwhm(response_up(MODES, R0, T5, grid=grids))
        f2 = main_lobe_fwhm(response_up(MODES, R0, 2 * T5, grid=grids))
        assert abs(f2 / f1 - 0.5) < 0.05 * 0.5, f"t-doubling gave fwhm ratio {f2 / f1}"

    def test_time_validation(self):
        with pytest.raises(ParameterError):
            response_up(MODES, R0, 0.0)
        with pytest.raises(ParameterError):
            response_up(MODES, 0.0, T5)


class TestResponseCp:
    def test_vanishes_at_dc(self):
        cp = response_cp(MODES, R0, T5, grid=GRID)
        assert cp.values[0] == 0.0

    def test_vanishes_at_mode_frequencies(self):
        # omega_pm * t are multiples of pi here, so sin(omega t) kills both
        peak = np.abs(response_cp(MODES, R0, T5, grid=GRID).values).max()
        at_wm = response_cp(MODES, R0, T5, grid=np.array([0.0, WM])).values[1]
        at_wp = response_cp(MODES, R0, T5, grid=np.array([0.0, WP])).values[1]
        assert abs(at_wm) < 1e-12 * peak
        assert abs(at_wp) < 1e-12 * peak

    def test_composition_from_single_window(self):
        up = response_up(MODES, R0, T5, grid=GRID)
        cp = response_cp(MODES, R0, T5, grid=GRID)
        w = GRID
        expected = (
            2j * np.sin(w * T5)
            * (up.values * np.exp(1j * w * T5) + np.conj(up.values) * np.exp(-1j * w * T5))
            * np.exp(-2j * w * T5)
        )
        assert np.max(np.abs(cp.values - expected)) < 1e-12 * np.abs(cp.values).max()

    def test_zeros_bracket_mode_frequencies(self):
        cp = response_cp(MODES, R0, T5, grid=GRID)
        zeros = find_zeros(cp)
        half_step = cp.spacing / 2.0
        for target in (0.0, WM, WP):
            best = min(zeros, key=lambda z: abs(z - target))
            assert abs(best - target) <= half_step, f"zero near {target:.1f} at {best:.1f}"

    def test_sensitivity_lobes_hug_mode_frequencies(self):
        cp = response_cp(MODES, R0, T5, grid=GRID)
        peaks = find_peaks(cp)
        lobe_band = (2 * math.pi / T5) / 8.0
        for target in (WM, WP):
            nearest = min((w for w, _ in peaks), key=lambda w: abs(w - target))
            assert abs(nearest - target) < 0.5 * (2 * math.pi / T5), f"lobe far from {target:.1f}"
        fwhm = main_lobe_fwhm(cp)
        assert 0.5 < fwhm / lobe_band < 2.0, f"lobe width {fwhm} vs band {lobe_band}"


class TestNumericResponse:
    peak_up = np.abs(response_up(MODES, R0, T5, grid=GRID).values).max()
    peak_cp = np.abs(response_cp(MODES, R0, T5, grid=GRID).values).max()

    def test_up_matches_analytic_at_fast_mode(self):
        got = numeric_response(CFG, preset_up((R0, 0.0), T5), WP, 0.02 / self.peak_up)
        want = response_up(MODES, R0, T5, grid=np.array([0.0, WP])).values[1]
        assert abs(got - want) < 1e-3 * abs(want)

    def test_cp_matches_analytic_subset(self):
        seq = preset_cp((R0, 0.0), T5, modes=MODES)
        cp = response_cp(MODES, R0, T5, grid=GRID)
        for idx in (409, 1227, 2045, 3272):
            got = numeric_response(CFG, seq, float(GRID[idx]), 0.02 / self.peak_cp)
            assert abs(got - cp.values[idx]) < 1e-3 * self.peak_cp, f"omega = {GRID[idx]:.1f}"

    def test_cp_dc_rejection(self):
        got = numeric_response(CFG, preset_cp((R0, 0.0), T5, modes=MODES), 0.0, 0.02 / self.peak_cp)
        assert abs(got) < 1e-3 * self.peak_cp

    def test_reconstructs_time_domain_signal(self):
        # conjugate symmetry F0(-w) = F0(w)* folds the two spectral lines of a
        # real cosine drive into a real phase prediction
        omega = 0.7 * WT
        amp = 1e-4 * L * WT**2
        f0 = response_up(MODES, R0, T5, grid=np.array([0.0, omega])).values[1]
        for phi in (0.0, 0.9):
            drive = Sinusoid(amplitude=(0.0, amp), omega=omega, phase=phi)
            rec = run_sequence(CFG, None, preset_up((R0, 0.0), T5), drive)
            term = amp * np.exp(-1j * phi) * f0 / 4.0
            pred = float((term + np.conj(term)).real)
            assert abs(rec.phase - pred) < 1e-3 * abs(pred), f"phi = {phi}"

    def test_rejects_nonlinear_amplitude(self):
        with pytest.raises(AmplitudeTooLargeError):
            numeric_response(CFG, preset_up((R0, 0.0), T5), WM, 0.5 / self.peak_up)

    def test_parameter_validation(self):
        seq = preset_up((R0, 0.0), T5)
        with pytest.raises(ParameterError):
            numeric_response(CFG, seq, WM, 0.0)
        with pytest.raises(ParameterError):
            numeric_response(CFG, seq, -1.0, 0.02 / self.peak_up)
        with pytest.raises(ParameterError):
            numeric_response(CFG, seq, WM, 0.02 / self.peak_up, phases=[0.0])

    def test_requires_probe_direction(self):
        no_displace = PulseSequence(steps=(RotateY(math.pi / 2), Evolve(T5), Readout("z")))
        with pytest.raises(ParameterError):
            numeric_response(CFG, no_displace, WM, 1e-3)
        zero_shift = PulseSequence(
            steps=(RotateY(math.pi / 2), Displace((0.0, 0.0)), Evolve(T5), Readout("z")),
        )
        with pytest.raises(ParameterError):
            numeric_response(CFG, zero_shift, WM, 1e-3)

    def test_curve_metadata(self):
        sub = GRID[::409][1:]
        nc = numeric_response_curve(CFG, preset_up((R0, 0.0), T5), sub, 0.02 / self.peak_up)
        assert nc.kind == "numeric-up"
        assert nc.t == T5 and nc.r0 == R0
        cp_seq = preset_cp((R0, 0.0), T5, modes=MODES)
        nc_cp = numeric_response_curve(CFG, cp_seq, sub[:3], 0.02 / self.peak_cp)
        assert nc_cp.kind == "numeric-cp"
        assert abs(nc_cp.t - T5) < 1e-15, "cp metadata t is the quarter window"


class TestCurveTools:
    def test_single_arch_gives_single_peak(self):
        omega = np.linspace(100.0, 200.0, 201)
        values = np.sin(math.pi * (omega - 100.0) / 100.0)
        curve = ResponseCurve(omega=omega, values=values)
        peaks = find_peaks(curve)
        assert len(peaks) == 1
        assert abs(peaks[0][0] - 150.0) < 0.5 * curve.spacing
        assert abs(peaks[0][1] - 1.0) < 1e-3

    def test_zero_curve_rejected(self):
        curve = ResponseCurve(omega=np.linspace(0, 1, 8), values=np.zeros(8))
        with pytest.raises(ParameterError):
            find_zeros(curve)
        with pytest.raises(ParameterError):
            main_lobe_fwhm(curve)

    def test_coarse_grid_raises_resolution_error(self):
        cp = response_cp(MODES, R0, T5, grid=np.linspace(0.0, 3.0 * WP, 64))
        with pytest.raises(ResolutionError):
            find_zeros(cp)
        with pytest.raises(ResolutionError):
            find_peaks(cp)


class TestResponseCurveType:
    def test_grid_validation(self):
        with pytest.raises(ParameterError):
            ResponseCurve(omega=np.array([1.0]), values=np.array([1.0]))
        with pytest.raises(ParameterError):
            ResponseCurve(omega=np.array([0.0, 2.0, 1.0]), values=np.ones(3))
        with pytest.raises(ParameterError):
            ResponseCurve(omega=np.array([0.0, 1.0, 3.0]), values=np.ones(3))
        with pytest.raises(ParameterError):
            ResponseCurve(omega=np.array([0.0, 1.0]), values=np.array([1.0, math.nan]))
        with pytest.raises(ParameterError):
            ResponseCurve(omega=np.array([0.0, 1.0]), values=np.ones(3))

    def test_csv_round_trip(self, tmp_path):
        curve = response_cp(MODES, R0, T5, grid=GRID[:64])
        path = tmp_path / "curve.csv"
        curve.to_csv(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (64, 4)
        assert np.allclose(data[:, 0], curve.omega, rtol=0, atol=0)
        got = data[:, 1] + 1j * data[:, 2]
        assert np.array_equal(got, curve.values), "%.17g format must round trip"
        assert np.allclose(data[:, 3], np.abs(curve.values) ** 2, rtol=1e-15, atol=0)

    def test_json_round_trip(self, tmp_path):
        curve = response_up(MODES, R0, T5, grid=GRID[:16])
        path = tmp_path / "curve.json"
        curve.to_json(path)
        loaded = json.loads(path.read_text())
        assert loaded["kind"] == "up"
        assert loaded["r0_m"] == R0 and loaded["t_s"] == T5
        assert np.array_equal(np.array(loaded["re"]) + 1j * np.array(loaded["im"]), curve.values)
