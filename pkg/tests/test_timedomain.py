import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gradedchain import AliasingError, ChainSpec, ZeroModeError
from gradedchain.chain import dispersion
from gradedchain.oracle import integrate_equations_of_motion
from gradedchain.timedomain import (
    FFTConfig,
    InitialConditions,
    causality_ratio,
    evolve,
    evolve_velocity,
    fit_modal_coefficients,
    greens_time_domain,
    quadratic_form_energy,
    total_energy,
)


def _random_ic(n, seed):
    rng = np.random.default_rng(seed)
    return InitialConditions(rng.standard_normal(n), rng.standard_normal(n))


def test_initial_conditions_validation():
    with pytest.raises(ValueError):
        InitialConditions(np.zeros(3), np.zeros(4))
    with pytest.raises(ValueError):
        InitialConditions([np.nan, 0.0], [0.0, 0.0])


def test_length_mismatch():
    with pytest.raises(ValueError, match="length"):
        fit_modal_coefficients(ChainSpec(4, 2.0), InitialConditions(np.zeros(3), np.zeros(3)))


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 24), xi=st.floats(0.3, 3.0), seed=st.integers(0, 2**16))
def test_round_trip_at_zero(n, xi, seed):
    spec = ChainSpec(n, xi)
    ic = _random_ic(n, seed)
    coeffs = fit_modal_coefficients(spec, ic)
    # y = xi**p u spans xi**(n-1); roundoff in the transform scales with it
    atol = 1e-13 * max(xi, 1.0 / xi) ** (n - 1) * max(np.abs(ic.u0).max(), np.abs(ic.v0).max())
    np.testing.assert_allclose(evolve(spec, coeffs, 0.0), ic.u0, rtol=0, atol=atol)
    np.testing.assert_allclose(evolve_velocity(spec, coeffs, 0.0), ic.v0, rtol=0, atol=atol)


def test_round_trip_reference_case():
    spec = ChainSpec(8, 2.0)
    ic = _random_ic(8, 5)
    coeffs = fit_modal_coefficients(spec, ic)
    assert np.max(np.abs(evolve(spec, coeffs, 0.0) - ic.u0)) < 1e-10


def test_single_mode_standing_wave():
    spec = ChainSpec(8, 2.0)
    res = dispersion(spec)
    m = 3
    p = np.arange(8)
    y = np.cos(res.wavenumbers[m] * p)
    ic = InitialConditions(y * 2.0 ** (-p.astype(float)), np.zeros(8))
    coeffs = fit_modal_coefficients(spec, ic)
    np.testing.assert_allclose(coeffs.a, coeffs.b, atol=1e-14)
    t = np.linspace(0, 10, 7)
    expected = np.cos(res.frequencies[m] * t)[:, None] * ic.u0[None, :]
    np.testing.assert_allclose(evolve(spec, coeffs, t), expected, atol=1e-12)


def test_uniform_translation():
    spec = ChainSpec(6, 1.0)
    ic = InitialConditions(np.full(6, 0.4), np.full(6, -0.25))
    coeffs = fit_modal_coefficients(spec, ic)
    t = np.array([0.0, 1.0, 7.5])
    expected = (0.4 - 0.25 * t)[:, None] * np.ones(6)
    np.testing.assert_allclose(evolve(spec, coeffs, t), expected, atol=1e-13)


def test_zero_mode_strict():
    with pytest.raises(ZeroModeError):
        fit_modal_coefficients(ChainSpec(6, 1.0), _random_ic(6, 0), strict=True)
    fit_modal_coefficients(ChainSpec(6, 2.0), _random_ic(6, 0), strict=True)


@pytest.mark.parametrize("xi", [0.5, 2.0, 3.0])
def test_scaling_relation(xi):
    n = 8
    spec = ChainSpec(n, xi)
    coeffs = fit_modal_coefficients(spec, _random_ic(n, 4))
    t = np.linspace(0, 5, 11)
    base = evolve(spec, coeffs, t)
    shifted = evolve(spec, coeffs, t, p=np.arange(n) + n)
    np.testing.assert_allclose(shifted, xi ** (-n) * base, atol=1e-12 * np.abs(base).max())


def test_matches_ode_integrator():
    spec = ChainSpec(8, 2.0)
    ic = _random_ic(8, 11)
    slowest = dispersion(spec).frequencies.min()
    times = np.linspace(0.0, 10 * 2 * math.pi / slowest, 200)
    modal = evolve(spec, fit_modal_coefficients(spec, ic), times)
    ode = integrate_equations_of_motion(spec, ic.u0, ic.v0, times)
    assert np.max(np.abs(modal - ode)) < 1e-6 * np.max(np.abs(ode))


@pytest.mark.parametrize("n, xi", [(8, 2.0), (16, 1.0), (12, 0.4)])
def test_energy_conserved(n, xi):
    spec = ChainSpec(n, xi, m0=1.7)
    coeffs = fit_modal_coefficients(spec, _random_ic(n, n))
    w = dispersion(spec).frequencies
    slowest = w[w > 0].min()
    t = np.linspace(0.0, 100 * 2 * math.pi / slowest, 400)
    u, v = evolve(spec, coeffs, t), evolve_velocity(spec, coeffs, t)
    e = np.array([total_energy(spec, a, b) for a, b in zip(u, v)])
    assert np.max(np.abs(e - e[0])) / e[0] < 1e-9


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 20), xi=st.floats(0.3, 3.0), seed=st.integers(0, 2**16))
def test_energy_forms_agree(n, xi, seed):
    spec = ChainSpec(n, xi)
    ic = _random_ic(n, seed)
    assert quadratic_form_energy(spec, ic.u0, ic.v0) == pytest.approx(
        total_energy(spec, ic.u0, ic.v0), rel=1e-10)


def test_fft_config_checks():
    spec = ChainSpec(8, 2.0)
    with pytest.raises(AliasingError):
        FFTConfig(window=1.0).resolve(spec)
    with pytest.raises(ValueError):
        FFTConfig(omega_max_factor=2.0).resolve(spec)
    eps, window, wmax = FFTConfig().resolve(spec)
    assert eps == pytest.approx(0.015)
    assert window == pytest.approx(50 / eps)
    assert wmax == pytest.approx(12.0)


@pytest.mark.parametrize("xi, d", [(2.0, 0), (2.0, 2), (1.0, 0), (0.5, 1)])
def test_causality(xi, d):
    sig = greens_time_domain(ChainSpec(64, xi), 0, d)
    assert causality_ratio(sig) < 1e-3


@pytest.mark.parametrize("xi, d", [(2.0, 0), (2.0, 3), (1.0, 0), (0.5, 1)])
def test_matches_large_ring_modal_sum(xi, d):
    spec = ChainSpec(4096, xi)
    sig = greens_time_domain(spec, 0, d)
    eps = spec.debye / 100
    res = dispersion(spec)
    w, k = res.frequencies, res.wavenumbers
    sel = (sig.times > 0) & (sig.times < 300)
    t = sig.times[sel][::9]
    safe = np.where(w == 0, 1.0, w)
    kern = np.where(w[None, :] == 0, t[:, None], np.sin(w[None, :] * t[:, None]) / safe[None, :])
    ref = (kern * np.cos(k * d)[None, :]).mean(axis=1) * np.exp(-eps * t)
    got = sig.values[sel][::9]
    assert np.max(np.abs(got - ref)) < 1e-4 * np.max(np.abs(ref))


def test_homogeneous_spectrum_confined_to_band():
    spec = ChainSpec(64, 1.0)
    sig = greens_time_domain(spec, 0, 1)
    pos = sig.times >= 0
    values = sig.values[pos]
    dt = sig.times[1] - sig.times[0]
    spectrum = np.abs(np.fft.rfft(values))
    freqs = 2 * math.pi * np.fft.rfftfreq(values.size, dt)
    outside = freqs > 2.0 * 1.3
    assert spectrum[outside].max() < 0.05 * spectrum.max()
