"""
Tests for the univariate Fourier spectra and the degrees-of-freedom count
"""
import numpy as np
import pytest

from src.encodings import CircuitSpec, EncodingKind
from src.errors import ConfigError, ContractViolation, UnsupportedEncodingError
from src.fourier import (
    FourierConfig, centred_coefficients, dft_coefficients, dof_report, grid_periodic_scaling,
    input_grid, reconstruct_series, sample_spectrum, saturation_layer, univariate_outputs,
)


class TestDft:

    def test_constant_series(self):
        coeffs = dft_coefficients(np.full(21, 3.0))
        assert coeffs[0] == pytest.approx(3.0)
        np.testing.assert_allclose(coeffs[1:], 0, atol=1e-12)

    def test_single_cosine(self):
        k = np.arange(21)
        coeffs = dft_coefficients(np.cos(2 * np.pi * k / 21))
        assert coeffs[1] == pytest.approx(0.5)
        np.testing.assert_allclose(np.delete(coeffs, 1), 0, atol=1e-12)

    def test_too_short(self):
        with pytest.raises(ContractViolation):
            dft_coefficients([1.0])

    def test_not_one_dimensional(self):
        with pytest.raises(ContractViolation):
            dft_coefficients(np.zeros((3, 3)))

    @pytest.mark.parametrize("n", [21, 20, 7])
    def test_reconstruction(self, rng, n):
        series = rng.normal(size=n)
        rebuilt = reconstruct_series(centred_coefficients(series), n)
        assert np.max(np.abs(rebuilt - series)) < 1e-9

    def test_even_series_has_real_centred_coefficients(self):
        t = input_grid(21)
        coeffs = centred_coefficients(np.cos(1.3 * t) ** 2 + 0.2 * np.cos(0.4 * t))
        assert np.max(np.abs(coeffs.imag)) < 1e-12


class TestGrid:

    def test_grid(self):
        grid = input_grid()
        assert len(grid) == 21
        assert grid[0] == -1.0 and grid[-1] == 1.0
        assert grid[10] == pytest.approx(0.0)

    def test_periodic_scaling(self):
        assert grid_periodic_scaling(21) == pytest.approx(20 * np.pi / 21)

    def test_config_checks_grid(self):
        with pytest.raises(ConfigError):
            FourierConfig(grid_points=15, n_coeffs=10)


class TestSpectrum:

    def test_amplitude_unsupported(self):
        with pytest.raises(UnsupportedEncodingError):
            sample_spectrum(CircuitSpec(EncodingKind.AMPLITUDE), n_weight_draws=2)

    def test_shapes(self):
        spectrum = sample_spectrum(CircuitSpec(EncodingKind.ANGLE_X), n_weight_draws=3)
        assert spectrum.coefficients().shape == (3, 4, 11)
        assert len(spectrum.summary()) == 4 * 11

    def test_outputs_match_samples(self):
        spec = CircuitSpec(EncodingKind.ANGLE_X, layers=2)
        spectrum = sample_spectrum(spec, n_weight_draws=2, seed=4)
        outputs = univariate_outputs(spec, spectrum.samples[1].weights, spectrum.input_grid)
        np.testing.assert_allclose(outputs, spectrum.outputs[1])

    def test_reconstructs_circuit_outputs(self):
        spec = CircuitSpec(EncodingKind.HIGHER_ORDER, layers=2)
        spectrum = sample_spectrum(spec, n_weight_draws=1)
        row = spectrum.outputs[0][2]
        full = centred_coefficients(row)
        assert np.max(np.abs(reconstruct_series(full, 21) - row)) < 1e-9

    def test_deterministic(self):
        spec = CircuitSpec(EncodingKind.ANGLE_Y)
        a = sample_spectrum(spec, n_weight_draws=3, seed=9).coefficients()
        b = sample_spectrum(spec, n_weight_draws=3, seed=9, jobs=2).coefficients()
        np.testing.assert_array_equal(a, b)

    def test_angle_y_single_layer(self):
        # With the grid-periodic scaling the outputs are even polynomials in
        # cos(f t) of degree <= 4: real coefficients, at most four ranks
        spec = CircuitSpec(EncodingKind.ANGLE_Y, scaling=grid_periodic_scaling(21))
        spectrum = sample_spectrum(spec, n_weight_draws=100)
        assert spectrum.max_abs_imag() < 1e-6
        assert np.all(spectrum.nonnull_ranks() <= 4)

    def test_angle_x_single_layer_ranks(self):
        spec = CircuitSpec(EncodingKind.ANGLE_X, scaling=grid_periodic_scaling(21))
        spectrum = sample_spectrum(spec, n_weight_draws=20)
        magnitudes = np.abs(spectrum.coefficients())[:, :, 5:]
        assert np.max(magnitudes) < 1e-6

    def test_csv_dump(self, tmp_path):
        spectrum = sample_spectrum(CircuitSpec(EncodingKind.ANGLE_X), n_weight_draws=2)
        path = tmp_path / "dump.csv"
        spectrum.write_csv(str(path), header=["kind: fourier"])
        lines = path.read_text().splitlines()
        assert lines[0] == "# kind: fourier"
        assert lines[1] == "draw,qubit,rank,re,im"
        assert len(lines) == 2 + 2 * 4 * 11


class TestDof:

    @pytest.mark.parametrize("encoding,layers,n_params,nu", [
        (EncodingKind.ANGLE_X, 1, 510, 81),
        (EncodingKind.ANGLE_X, 2, 765, 625),
        (EncodingKind.ANGLE_X, 3, 1020, 2401),
        (EncodingKind.HIGHER_ORDER, 1, 131070, 2401),
        (EncodingKind.HIGHER_ORDER, 3, 262140, 130321),
        (EncodingKind.HIGHER_ORDER, 4, 327675, 390625),
    ])
    def test_counts(self, encoding, layers, n_params, nu):
        report = dof_report(CircuitSpec(encoding, layers=layers))
        assert report.n_params == n_params
        assert report.nu == nu
        assert report.saturated == (n_params >= nu)

    def test_saturation_layer(self):
        assert saturation_layer(EncodingKind.ANGLE_X) == 2
        assert saturation_layer(EncodingKind.ANGLE_Y) == 2
        assert saturation_layer(EncodingKind.HIGHER_ORDER) == 3

    def test_amplitude_has_no_local_dimension(self):
        with pytest.raises(UnsupportedEncodingError):
            dof_report(CircuitSpec(EncodingKind.AMPLITUDE))
