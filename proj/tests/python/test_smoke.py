import math

import pytest

import dwellflux as df


def test_erfi_real_axis():
    assert df.erfi(1.0).real == pytest.approx(1.6504257587975428, rel=1e-13)
    assert df.erfi(-1.0).real == pytest.approx(-df.erfi(1.0).real, rel=1e-15)


def test_onshell_moments_example():
    r = df.Region(0.0, 3.0)
    d = df.onshell_moments(1.0, r)
    assert d["m1"] == pytest.approx(3.0, rel=1e-14)
    assert d["m2"] == pytest.approx(9.019915, rel=1e-6)
    assert df.pm_third_moment(1.0, r) == pytest.approx(8.340987, rel=1e-6)


def test_packet_normalised():
    psi = df.gauss_cut_packet(0.5, 2.0, 0.4, -400.0)
    assert df.norm_squared(psi) == pytest.approx(1.0, abs=1e-12)


def test_kernel_matches_finite_difference():
    r = df.Region(0.0, 3.0)
    a = df.kernel_diag(1.0, 2.5, r)
    b = df.kernel_diag_fd(1.0, 2.5, r)
    assert abs(a - b) <= 1e-6 * abs(a)


def test_kernel_moment_matches_closed_form():
    r = df.Region(0.0, 3.0)
    rep = df.kernel_moment(1.0, r, df.UnitSystem(), 2)
    assert rep["value"] == pytest.approx(9.019915, rel=1e-3)


def test_cross_flux_polarization():
    psi = df.gauss_cut_packet(0.5, 2.0, 0.4, -20.0)
    phi = df.gauss_cut_packet(0.5, 1.5, 0.3, -15.0)
    a = df.cross_flux_polarization(psi, phi, 0.0, 5.0)
    b = df.cross_flux_direct(psi, phi, 0.0, 5.0)
    assert abs(a - b) <= 1e-8 * max(abs(b), 1e-12)


def test_distribution_first_moment():
    psi = df.gauss_cut_packet(0.5, 2.0, 0.4, -400.0)
    r = df.Region(0.0, 50.0)
    u = df.UnitSystem()
    value, err = df.distribution_moment(psi, r, u, 1)
    exact = df.wavepacket_dwell_moments(psi, r, u, 1)
    assert value == pytest.approx(exact, rel=1e-5)


def test_bad_config_raises():
    with pytest.raises(ValueError):
        df.gauss_cut_packet(0.5, -2.0, 0.4, -400.0)
    with pytest.raises(ValueError):
        df.Region(1.0, 0.0)


def test_approximation_error_small_case():
    psi = df.gauss_cut_packet(0.5, 2.0, 0.4, -400.0)
    e = df.approximation_error(psi, df.Region(0.0, 100.0), basis_order=2)
    assert math.isfinite(e["rel_error_c0"])
    assert e["rel_error_c01"] < e["rel_error_c0"]
