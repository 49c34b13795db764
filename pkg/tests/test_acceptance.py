"""End-to-end acceptance checks, one criterion per test.

Each test records a PASS/FAIL line (printed by conftest at the end of the
session) and asserts at the stated tolerance.

Criterion 6 is expected to fail and is left failing on purpose: at the
reference operating point (g = 5 Omega_0, tau = 1/Omega_0, t0 = 2 tau,
kappa = gamma = 0.005 g, width divisor 2) the drives are an order of
magnitude too fast for adiabatic following, so the state exits the dark
state, populates the excited levels (max P_ea ~ 0.83) and decays instead of
transferring. The full numbers are in the assertion message. The transfer
machinery itself is validated independently: slowing the pulses to
tau = 10/Omega_0 without loss reaches the target with fidelity 0.998
(test_observables), and the balanced-split criterion 7 passes at its
scan-selected operating point.
"""

import time
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from stirapsim.basis import BasisState
from stirapsim.config import build_config, load_config_file, scan_spec_from_dict
from stirapsim.darkstate import nullity_residual
from stirapsim.hamiltonian import SystemParams, check_invariance
from stirapsim.observables import metrics_rows, time_averaged_pe
from stirapsim.propagator import convergence_order, propagate, rk4_integrate
from stirapsim.pulses import preset_stirap, random_schedule, zero_schedule
from stirapsim.runner import run_scan_spec, run_simulate
from stirapsim.scan import schedule_for

SCAN_SPEC_PATH = Path(__file__).resolve().parent.parent / "configs" / "fstirap_window_scan.json"

# both reference-parameter runs are reused across criteria; the cache keeps
# the first computation's wall time for the runtime checks
_RUNS: dict = {}


def default_run(scenario: str):
    if scenario not in _RUNS:
        start = time.perf_counter()
        result = run_simulate(build_config({"scenario": scenario}))
        _RUNS[scenario] = (result, time.perf_counter() - start)
    return _RUNS[scenario]


def ground_state():
    v = np.zeros(8, dtype=complex)
    v[0] = 1.0
    return v


def test_criterion_01_dark_state_nullity(acceptance_record):
    start = time.perf_counter()
    rng = np.random.default_rng(11)
    worst = 0.0
    draws = 0
    for seed in range(40):
        schedule = random_schedule(seed)
        for t in rng.uniform(-4.0, 6.0, size=25):
            rep = nullity_residual(float(t), schedule)
            assert rep["defined"]
            worst = max(worst, rep["residual"])
            draws += 1
    elapsed = time.perf_counter() - start
    ok = draws >= 1000 and worst <= 1e-12 and elapsed < 5.0
    acceptance_record(
        1, ok, f"max relative nullity residual {worst:.3e} over {draws} draws ({elapsed:.2f}s)"
    )
    assert draws >= 1000
    assert worst <= 1e-12
    assert elapsed < 5.0


def test_criterion_02_subspace_invariance(acceptance_record, idx1):
    start = time.perf_counter()
    params = SystemParams()
    lo, hi = params.resolved_window()
    times = np.linspace(lo * params.tau, hi * params.tau, 101)
    worst = 0.0
    for scenario in ("stirap", "fstirap"):
        leak, h_norm = check_invariance(idx1, schedule_for(params, scenario), times)
        worst = max(worst, leak / h_norm)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 5.0
    acceptance_record(
        2, ok, f"max out-of-subspace leakage {worst:.3e} of the matrix norm ({elapsed:.2f}s)"
    )
    assert worst <= 1e-12
    assert elapsed < 5.0


def test_criterion_03_lossless_norm_conservation(acceptance_record):
    start = time.perf_counter()
    result = run_simulate(build_config({"params": {"kappa": 0.0, "gamma": 0.0}}))
    drift = max(abs(r.norm - 1.0) for r in result.rows)
    elapsed = time.perf_counter() - start
    ok = drift <= 1e-8 and elapsed < 30.0
    acceptance_record(3, ok, f"max |norm-1| = {drift:.3e} at default step ({elapsed:.1f}s)")
    assert drift <= 1e-8
    assert elapsed < 30.0


def test_criterion_04_analytic_decay_oracle(acceptance_record, idx1):
    params = SystemParams(t_start=0.0, t_end=4.0, step=1e-3)
    psi0 = idx1.unit_vector(BasisState("e_0", "g_0", 0, 0))
    traj = propagate(psi0, zero_schedule(), params, idx1)
    samples = np.linspace(0, len(traj.times) - 1, 10).astype(int)
    worst = max(
        abs(traj.norms[k] / np.exp(-2.0 * params.gamma * traj.times[k]) - 1.0)
        for k in samples
    )
    ok = worst <= 1e-6
    acceptance_record(
        4, ok, f"excited-state decay vs exp(-2*gamma*t): max rel err {worst:.3e} at 10 times"
    )
    assert worst <= 1e-6


def test_criterion_05_lr_population_symmetry(acceptance_record):
    worst = 0.0
    for scenario in ("stirap", "fstirap"):
        rows = default_run(scenario)[0].rows
        worst = max(worst, max(abs(r.p[4] - r.p[7]) for r in rows))
    ok = worst <= 1e-6
    acceptance_record(5, ok, f"max |P5-P8| = {worst:.3e} over both scenarios")
    assert worst <= 1e-6


def test_criterion_06_sequential_transfer_plateau(acceptance_record):
    result, elapsed = default_run("stirap")
    final = result.rows[-1]
    p1, p5, p8 = final.p[0], final.p[4], final.p[7]
    max_pp = max(r.p_p for r in result.rows)
    max_pea = max(r.p_ea for r in result.rows)
    ok = (
        0.45 <= p5 <= 0.50
        and 0.45 <= p8 <= 0.50
        and p1 <= 0.05
        and max_pp <= 0.1
        and max_pea <= 0.1
        and elapsed < 60.0
    )
    acceptance_record(
        6,
        ok,
        f"final P5={p5:.6f} P8={p8:.6f} (target [0.45,0.50]) P1={p1:.6f} "
        f"maxPp={max_pp:.4f} maxPea={max_pea:.4f} ({elapsed:.1f}s)",
    )
    assert ok, (
        "plateau not reached at the reference operating point: "
        f"final P5={p5:.6f} and P8={p8:.6f} (need [0.45, 0.50]), P1={p1:.6f} "
        f"(need <= 0.05), max Pp={max_pp:.4f} (need <= 0.1), max Pea={max_pea:.4f} "
        "(need <= 0.1). tau = 1/Omega_0 is too fast for adiabatic following at "
        "g = 5 Omega_0: the state leaves the dark state, puts ~0.83 of the "
        "population through the excited levels and loses it to decay. No width "
        "divisor in [0.5, 32] lifts final P5 above 0.43 either (best 0.430 at "
        "divisor 8, which then breaks the max-Pea bound at 0.125). The same "
        "protocol at tau = 10/Omega_0 without loss reaches the target at "
        "fidelity 0.998, so the failure is the operating point, not the solver."
    )


def test_criterion_07_balanced_split_at_scanned_end_time(acceptance_record):
    start = time.perf_counter()
    spec, objective = scan_spec_from_dict(load_config_file(str(SCAN_SPEC_PATH)))
    scan_result = run_scan_spec(spec, objective=objective)
    n_failed = sum(1 for row in scan_result.table if row["error"])
    best = scan_result.best

    config = build_config(
        {
            "scenario": "fstirap",
            "params": {
                "kappa": "0.005g",
                "gamma": "0.005g",
                "step": 0.0008,
                "t_start": -6.0,
                "tau": best["tau"],
                "t_end": best["t_end"],
            },
        }
    )
    final = run_simulate(config).rows[-1]
    p1, p5, p8 = final.p[0], final.p[4], final.p[7]
    dev = max(abs(p1 - 1 / 3), abs(p5 - 1 / 3), abs(p8 - 1 / 3))
    elapsed = time.perf_counter() - start
    ok = n_failed == 0 and dev <= 0.05 and elapsed < 300.0
    acceptance_record(
        7,
        ok,
        f"tau={best['tau']:g}, t_end={best['t_end']:g} tau: P1={p1:.5f} P5={p5:.5f} "
        f"P8={p8:.5f}, max dev from 1/3 = {dev:.4f} "
        f"({spec.n_points}-point scan + verification in {elapsed:.1f}s)",
    )
    assert n_failed == 0
    assert dev <= 0.05
    assert elapsed < 300.0


def test_criterion_08_adiabaticity_trend(acceptance_record, idx1):
    means = []
    for tau in (1.0, 2.0, 4.0):
        params = SystemParams(tau=tau, kappa=0.0, gamma=0.0, step=0.00125)
        schedule = preset_stirap(params)
        traj = propagate(ground_state(), schedule, params, idx1, restrict_to_s=True)
        rows, _ = metrics_rows(traj, schedule)
        means.append(time_averaged_pe(rows))
    ok = means[0] > means[1] > means[2]
    acceptance_record(
        8,
        ok,
        "mean Pe at tau=1,2,4: " + " > ".join(f"{m:.4f}" for m in means),
    )
    assert means[0] > means[1] > means[2]


def test_criterion_09_integrator_order_and_oracle(acceptance_record, idx1):
    h = np.array([[1.0, 0.7], [0.7, -0.5]], dtype=complex)
    psi0 = np.array([1.0, 0.0], dtype=complex)
    _, states, _, _ = rk4_integrate(lambda t, psi: h @ psi, psi0, 0.0, 3.0, 0.001)
    oracle_err = float(np.linalg.norm(states[-1] - expm(-1j * h * 3.0) @ psi0))

    params = SystemParams(step=0.007)
    report = convergence_order(
        ground_state(), preset_stirap(params), params, idx1, restrict_to_s=True
    )
    ok = oracle_err <= 1e-10 and report.order is not None and report.order >= 3.5
    acceptance_record(
        9,
        ok,
        f"matrix-exponential oracle err {oracle_err:.2e}, "
        f"step-halving order {report.order:.3f}",
    )
    assert oracle_err <= 1e-10
    assert report.order is not None and report.order >= 3.5


def test_criterion_10_truncation_independence(acceptance_record, idx1, idx2):
    positions = [idx2.encode(s) for s in idx1.states]
    worst = 0.0
    for scenario in ("stirap", "fstirap"):
        finals = {}
        for idx in (idx1, idx2):
            params = SystemParams(step=0.004, n_max=idx.n_max)
            schedule = schedule_for(params, scenario)
            traj = propagate(idx.initial_state(), schedule, params, idx)
            finals[idx.n_max] = traj.final_state
        embedded = np.zeros(idx2.dim, dtype=complex)
        embedded[positions] = finals[1]
        worst = max(worst, float(np.linalg.norm(finals[2] - embedded)))
    ok = worst <= 1e-10
    acceptance_record(
        10, ok, f"one- vs two-photon truncation: max final-state distance {worst:.2e}"
    )
    assert worst <= 1e-10
