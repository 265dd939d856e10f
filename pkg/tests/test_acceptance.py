"""Acceptance gate: every reproduction criterion at its stated tolerance.

Each criterion prints exactly one pass/fail line (bypassing pytest capture)
and is asserted, so the suite both reports and enforces the gate.  Known
shortfalls against the reference error values are documented in the project
decisions ledger; those tests are expected to fail rather than being
loosened.
"""

import sys
import time

import numpy as np
import pytest

from jcstrack import experiments as ex
from jcstrack import scenario as sc
from jcstrack import signalmodel as sm
from jcstrack import subspace as sub
from jcstrack import tracking as tk


_terminal = None


@pytest.fixture(scope="module", autouse=True)
def _capture_terminal(request):
    # the terminal reporter writes past pytest's fd-level capture, so the
    # per-criterion lines show up even for passing tests
    global _terminal
    _terminal = request.config.pluginmanager.get_plugin("terminalreporter")


def _report(num, checks):
    """checks: list of (ok, description); prints one line for the criterion."""
    ok = all(c[0] for c in checks)
    failed = "; ".join(d for o, d in checks if not o)
    detail = "all checks passed" if ok else f"failed: {failed}"
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}"
    if _terminal is not None:
        _terminal.write_line("\n" + line)
    else:  # pragma: no cover
        print(line, file=sys.__stderr__, flush=True)
    assert ok, f"criterion {num}: {detail}"


def _within(val, ref, frac):
    return abs(val - ref) <= frac * abs(ref)


@pytest.fixture(scope="module")
def cfg():
    return sc.ScenarioConfig()


@pytest.fixture(scope="module")
def fig3(cfg):
    start = time.perf_counter()
    rs = ex.run_fig3(cfg, trials=100, seed=0, accel_sigmas=(0.0, 40.0))
    return rs, time.perf_counter() - start


@pytest.fixture(scope="module")
def table3(cfg):
    return ex.run_table3(cfg, trials=100, seed=0)


def test_criterion_1_path_snrs(cfg):
    snr = ex.run_table2(cfg).metadata["snr_db"]
    _report(1, [
        (abs(snr["AP1-HMD"] - 36.0) <= 0.5,
         f"AP-HMD {snr['AP1-HMD']:.2f} dB not within 36 +/- 0.5"),
        (abs(snr["AP1-RIS2-HMD"] - 28.0) <= 0.5,
         f"AP1-RIS2-HMD {snr['AP1-RIS2-HMD']:.2f} dB not within 28 +/- 0.5"),
        (34.5 <= snr["AP1-RIS1-HMD"] <= 36.5,
         f"AP1-RIS1-HMD {snr['AP1-RIS1-HMD']:.2f} dB outside [34.5, 36.5]"),
    ])


def test_criterion_2_velocity_rmse_vs_observation_time(fig3):
    rs, wall = fig3
    quiet = rs.get("sigma_a=0").y
    moving = rs.get("sigma_a=40").y
    checks = [
        (_within(quiet[0], 0.0180, 0.30),
         f"T=1ms sigma_a=0: {quiet[0]:.4g} m/s vs 0.0180 +/- 30%"),
        (_within(quiet[6], 3.4e-4, 0.30),
         f"T=51.8ms sigma_a=0: {quiet[6]:.4g} m/s vs 3.4e-4 +/- 30%"),
        (_within(moving[4], 9.8e-3, 0.30),
         f"T=13.9ms sigma_a=40: {moving[4]:.4g} m/s vs 9.8e-3 +/- 30%"),
        (bool(np.all(np.diff(quiet) <= 0)),
         "sigma_a=0 curve not monotone non-increasing in T"),
        (wall < 300.0, f"runtime {wall:.0f}s exceeds 5 min"),
    ]
    _report(2, checks)


def test_criterion_3_per_path_speed_rmse(table3):
    t = table3.metadata["speed_rmse_mm_s"]
    ap_lo, ris2_lo = t["P1"]["AP1-HMD"], t["P1"]["AP1-RIS2-HMD"]
    ap_hi, ris2_hi = t["P2"]["AP1-HMD"], t["P2"]["AP1-RIS2-HMD"]
    checks = [
        (_within(ap_lo, 3.0, 0.30), f"AP low {ap_lo:.3g} vs 3 mm/s +/- 30%"),
        (_within(ris2_lo, 4.4, 0.30), f"RIS2 low {ris2_lo:.3g} vs 4.4 mm/s +/- 30%"),
        (_within(ap_hi, 9.8, 0.30), f"AP high {ap_hi:.3g} vs 9.8 mm/s +/- 30%"),
        (_within(ris2_hi, 10.9, 0.30), f"RIS2 high {ris2_hi:.3g} vs 10.9 mm/s +/- 30%"),
        (ris2_lo > ap_lo and ris2_hi > ap_hi, "RIS2 > AP ordering violated"),
    ]
    _report(3, checks)


def test_criterion_4_aoa_error_floor(cfg):
    rs = ex.run_sigma0(cfg, trials=500, seed=0, snr_db=36.0)
    sigma0 = rs.metadata["sigma0_deg"]
    _report(4, [
        (abs(sigma0 - 0.44) <= 0.10,
         f"sigma0 {sigma0:.4f} deg outside 0.44 +/- 0.10"),
        (rs.metadata["trials"] >= 500, "fewer than 500 trials"),
    ])


def test_criterion_5_position_crossover(cfg):
    checks = []
    for profile, lo, hi in (("P2", 0.4, 0.8), ("P1", 0.15, 0.40)):
        rs = ex.run_fig4(cfg, trials=1000, seed=0, profile=profile)
        xo = rs.metadata["crossover_closed_s"]
        checks.append((xo is not None and lo <= xo <= hi,
                       f"{profile} crossover {xo} s outside [{lo}, {hi}]"))
        for method in ("jcs", "imu"):
            closed = rs.get(f"{method}-closed").y
            mc = rs.get(f"{method}-mc").y
            dev = float(np.max(np.abs(mc - closed) / closed))
            checks.append((dev <= 0.05,
                           f"{profile} {method} closed-vs-MC deviation "
                           f"{dev:.3f} exceeds 5%"))
    _report(5, checks)


def test_criterion_6_angle_error_bounds(cfg):
    rs = ex.run_fig5(cfg)
    recal = rs.get("recalibrated").y
    gyro = rs.get("gyro-only")
    s0 = rs.metadata["sigma_0_deg"]
    bound = rs.metadata["bound_deg"]
    slope = np.polyfit(np.log10(gyro.x), np.log10(gyro.y), 1)[0]
    _report(6, [
        (bool(np.all((recal >= s0 - 1e-12) & (recal <= bound + 1e-12))),
         "recalibrated curve leaves [sigma_0, bound]"),
        (abs(slope - 0.5) <= 0.02,
         f"gyro-only log-log slope {slope:.4f} not 0.5 +/- 0.02"),
    ])


def test_criterion_7_estimator_properties():
    checks = []
    # noiseless single-tone frequency recovery
    worst = 0.0
    for freq in (0.0, 0.004002769, -0.21, 0.37):
        x = np.exp(-2j * np.pi * freq * np.arange(417))
        worst = max(worst, abs(sub.estimate_frequency(x) - freq))
    checks.append((worst < 1e-5,
                   f"frequency error {worst:.2e} exceeds 1e-5 cycles/packet"))
    # noiseless 2D AoA recovery
    worst = 0.0
    for theta, phi in ((60.0, 0.0), (30.0, 45.0), (75.0, -120.0)):
        a = sm.steering_vector_2d(theta, phi, 4, 4)
        th, ph = sub.estimate_aoa_2d(a, 4, 4)
        d_phi = (ph - phi + 180.0) % 360.0 - 180.0
        worst = max(worst, abs(th - theta), abs(d_phi))
    checks.append((worst < 0.05, f"AoA error {worst:.2e} deg exceeds 0.05"))
    # noise subspace orthogonal to the true steering vector
    r = sub.covariance_from_sliding_window(
        np.exp(-2j * np.pi * 0.1234 * np.arange(417)), 208)
    ns = sub.noise_subspace(r, 1)
    a = sm.steering_vector_frequency(0.1234, 208)
    resid = float(np.linalg.norm(ns.matrix.conj().T @ a))
    checks.append((resid < 1e-7, f"||Un^H a|| = {resid:.2e} exceeds 1e-7"))
    # codebook round trip
    rng = np.random.default_rng(0)
    cb = sm.BeamCodebook.dft(16)
    h = rng.normal(size=16) + 1j * rng.normal(size=16)
    err = float(np.max(np.abs(
        sm.invert_codebook(sm.apply_codebook(h, cb), cb) - h)))
    checks.append((err < 1e-10, f"codebook round trip error {err:.2e}"))
    _report(7, checks)


def test_criterion_8_deterministic_outputs(cfg, tmp_path):
    checks = []
    for name, runner in (
        ("sigma0", lambda: ex.run_sigma0(cfg, trials=100, seed=7)),
        ("fig4", lambda: ex.run_fig4(cfg, trials=50, seed=7)),
        ("fig3", lambda: ex.run_fig3(cfg, trials=5, seed=7,
                                     accel_sigmas=(0.0,))),
    ):
        first, _ = runner().write(tmp_path / f"{name}_a")
        second, _ = runner().write(tmp_path / f"{name}_b")
        checks.append((first.read_bytes() == second.read_bytes(),
                       f"{name} rerun not byte-identical"))
    _report(8, checks)
