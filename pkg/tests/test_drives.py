from dataclasses import dataclass, replace

import numpy as np
import pytest

from stacool import drives as dr
from stacool.drives import DriveModel, DrivePair, reconstruct_drives
from stacool.dynamics.moments import SystemParams
from stacool.errors import ConfigError, IntegrationError
from stacool.harness.runner import reconstruct
from stacool.harness.scenarios import standard_scenario
from stacool.protocols import Family, ProtocolParams
from stacool.schedule import CouplingSchedule

from conftest import STA_WIDTHS

pytestmark = pytest.mark.filterwarnings("ignore::stacool.harness.config.PolicyWarning")


@dataclass(frozen=True)
class ConstantPump:
    """Constant G2, nothing else; enough of the schedule interface for drives."""

    G: float
    protocol: object = None

    def J(self, t):
        return np.zeros(np.shape(t))

    def G2(self, t):
        return np.full(np.shape(t), self.G)

    def G1(self, t):
        return np.zeros(np.shape(t), dtype=complex)

    def dG2(self, t):
        return np.zeros(np.shape(t))

    def dG1(self, t):
        return np.zeros(np.shape(t), dtype=complex)


def sta_schedule(family):
    return CouplingSchedule(ProtocolParams.create(family, T=STA_WIDTHS[family]))


def test_undriven_beta_stays_zero():
    _, beta = dr.beta_trajectory(None, SystemParams(), (0.0, 50.0), grid_points=51)
    assert np.all(beta == 0)


def test_zero_couplings_and_losses_need_no_drive():
    sys = SystemParams(kappa1=0.0, kappa2=0.0)
    pair = reconstruct_drives(None, sys, (0.0, 10.0), grid_points=11)
    assert np.all(pair.Omega1 == 0) and np.all(pair.Omega2 == 0)


def test_constant_pump_beta_closed_form():
    # beta' = -i w beta - i g A with beta(0) = 0 gives
    # beta = -(g A / w) (1 - exp(-i w t)), oscillating about -g A / w
    sys = SystemParams(g2=6e-5, gamma_m=0.0, omega_m=1.0)
    G = 0.1
    A = (G / sys.g2) ** 2
    ts = np.linspace(0, 40 * np.pi, 801)
    _, beta = dr.beta_trajectory(ConstantPump(G), sys, (0.0, ts[-1]), t_eval=ts, rtol=1e-12, atol=1e-12)
    want = -(sys.g2 * A / sys.omega_m) * (1 - np.exp(-1j * sys.omega_m * ts))
    assert np.max(np.abs(beta - want)) <= 1e-8 * np.max(np.abs(want))
    # twenty full periods, so the sample mean is the cycle average
    assert beta[:-1].real.mean() == pytest.approx(-sys.g2 * A / sys.omega_m, rel=1e-9)


def test_constant_pump_drive_closed_form():
    # with constant alpha2 the drive cancels detuning, loss and the
    # mechanical frequency pull
    sys = SystemParams(g2=6e-5, gamma_m=0.0, kappa2=0.02)
    G = 0.1
    a2 = G / sys.g2
    ts = np.linspace(0, 30, 61)
    pair = reconstruct_drives(ConstantPump(G), sys, (0.0, 30.0), t_eval=ts, rtol=1e-12, atol=1e-12)
    _, beta = dr.beta_trajectory(ConstantPump(G), sys, (0.0, 30.0), t_eval=ts, rtol=1e-12, atol=1e-12)
    want = (sys.Delta2 + 2 * sys.g2 * beta.real - 0.5j * sys.kappa2) * a2
    np.testing.assert_allclose(pair.Omega2, want, rtol=1e-12)
    np.testing.assert_allclose(pair.Omega1, 0.0, atol=0)


@pytest.mark.parametrize("family", list(Family), ids=lambda f: f.value)
@pytest.mark.parametrize("dissipative", [False, True], ids=["closed", "lossy"])
def test_round_trip_shortcut(family, dissipative):
    cfg = standard_scenario(family, "sta", dissipative=dissipative)
    err = dr.round_trip_error(cfg.schedule(), cfg.system)
    assert err["G1"] <= 1e-5 and err["G2"] <= 1e-5


@pytest.mark.slow
@pytest.mark.parametrize("family", list(Family), ids=lambda f: f.value)
@pytest.mark.parametrize("dissipative", [False, True], ids=["closed", "lossy"])
def test_round_trip_adiabatic(family, dissipative):
    cfg = standard_scenario(family, "stirap", dissipative=dissipative)
    err = dr.round_trip_error(cfg.schedule(), replace(cfg.system, g1=0.0))
    assert err["G2"] <= 1e-5
    assert err["G1"] == 0.0


def test_round_trip_keeps_a1_dark_without_shortcut():
    # g1 > 0 with the shortcut off: Omega1 must cancel the hopping into a1
    sched = sta_schedule(Family.VITANOV)
    sys = SystemParams(kappa1=0.02, kappa2=0.02)
    err = dr.round_trip_error(sched, sys)
    assert err["G1"] <= 1e-9 and err["G2"] <= 1e-5


@pytest.mark.parametrize("family", list(Family), ids=lambda f: f.value)
def test_analytic_and_numeric_derivatives_agree(family):
    sched = sta_schedule(family)
    sys = SystemParams(sta_enabled=True)
    ts = np.linspace(sched.t_start, sched.t_end, 301)
    a = DriveModel(sched, sys, "analytic").alpha_dot(ts)
    n = DriveModel(sched, sys, "numeric").alpha_dot(ts)
    for x, y in zip(a, n):
        assert np.max(np.abs(x - y)) <= 1e-8 * np.max(np.abs(x))


def test_drives_scale_inversely_with_single_photon_couplings():
    # alpha ~ 1/g and g * beta is g-independent, so every term of Omega
    # goes as 1/g when both couplings are scaled together
    sched = sta_schedule(Family.GAUSSIAN)
    base = SystemParams(sta_enabled=True, kappa1=0.02, kappa2=0.02)
    twice = replace(base, g1=2 * base.g1, g2=2 * base.g2)
    a = reconstruct_drives(sched, base, grid_points=401, rtol=1e-12, atol=1e-12)
    b = reconstruct_drives(sched, twice, grid_points=401, rtol=1e-12, atol=1e-12)
    for x, y in ((a.Omega1, b.Omega1), (a.Omega2, b.Omega2)):
        assert np.max(np.abs(2 * y - x)) <= 1e-9 * np.max(np.abs(x))


@pytest.mark.parametrize("family", list(Family), ids=lambda f: f.value)
def test_dissipative_shortcut_drives_are_smooth_and_bounded(family):
    pair = reconstruct(standard_scenario(family, "sta", dissipative=True))
    for om in (pair.Omega1, pair.Omega2):
        peak = np.max(np.abs(om))
        assert peak < dr.MAX_DRIVE
        # no grid-scale wiggle: second differences far below the amplitude
        assert np.max(np.abs(np.diff(om, 2))) <= 1e-3 * peak


def test_adiabatic_reconstruction_skips_omega1():
    cfg = standard_scenario("vitanov", "stirap", dissipative=True)
    pair = reconstruct(cfg, t_eval=np.linspace(0, 100, 11))
    assert pair.Omega1 is None and pair.Omega2.shape == (11,)


@pytest.mark.parametrize("family", list(Family), ids=lambda f: f.value)
def test_mechanical_shift_small_against_detuning(family):
    # measured values sit between 0.02 and 0.035; the steady pull alone is
    # 2 g2^2 (G2max/g2)^2 / w = 2 G2max^2 / w = 0.02
    cfg = standard_scenario(family, "sta", dissipative=True)
    assert dr.self_consistency(cfg.schedule(), cfg.system) < 0.05


def test_inconsistent_couplings_rejected():
    sched = sta_schedule(Family.GAUSSIAN)
    with pytest.raises(ConfigError) as exc:
        DriveModel(sched, SystemParams(g1=0.0, g2=0.0, sta_enabled=True))
    assert len(exc.value.violations) == 2
    with pytest.raises(ConfigError):
        reconstruct_drives(sched, SystemParams(g2=0.0))
    DriveModel(None, SystemParams(g1=0.0, g2=0.0))


def test_drive_pair_guards():
    t = np.zeros(2)
    with pytest.raises(IntegrationError):
        DrivePair(t, None, np.array([0.0, np.nan]))
    with pytest.raises(IntegrationError):
        DrivePair(t, np.array([0.0, 2e6]), np.zeros(2))
    assert DrivePair(t, None, np.zeros(2)).Omega1 is None


def test_unknown_derivative_mode():
    with pytest.raises(ValueError):
        DriveModel(None, SystemParams(), "spline")
