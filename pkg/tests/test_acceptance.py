"""Acceptance criteria, one test each, in order.

Every test records a PASS/FAIL line that the terminal summary prints at the
end of the run (see ``conftest.py``).  The performance test also checks the
wall time of the whole module.
"""

import time

import numpy as np

import conftest
import oracles
from qdensecoding import linalg
from qdensecoding.coding import Protocol, coded_information_closed, info_measures
from qdensecoding.dynamics import SystemParams, amplitudes_excited, amplitudes_ground, channel_state
from qdensecoding.experiments import FIGURES, figure_preset, run_preset, sweep_curves, trend_check

SUITE_START = time.perf_counter()
PERFECT = Protocol.perfect()
FIELDS = ("i_cod_closed", "i_bob_holevo", "s_coded", "d_message_avg", "d_aggregate")


def record(name: str, ok: bool, detail: str) -> None:
    conftest.ACCEPTANCE_RESULTS.append((name, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


def max_dev(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))


def test_01_normalisation():
    rng = np.random.default_rng(1)
    deltas = rng.uniform(0, 5, 1000)
    ns = rng.integers(0, 11, 1000)
    taus = rng.uniform(0, 20, 1000)
    start = time.perf_counter()
    worst = 0.0
    for n in range(11):
        sel = ns == n
        for amps in (amplitudes_excited(deltas[sel], n, taus[sel]),
                     amplitudes_ground(deltas[sel], n, taus[sel])):
            a, c = amps.weights
            worst = max(worst, max_dev(a + c, 1.0))
    elapsed = time.perf_counter() - start
    record("1 normalisation", worst <= 1e-12 and elapsed < 0.1,
           f"max |norm-1| = {worst:.2e} (tol 1e-12), {elapsed:.3f} s (limit 0.1 s)")


def test_02_capacity_point():
    ch = channel_state(SystemParams(n=2, delta_raw=0.0, kappa=2.5), np.pi / (4 * np.sqrt(3)))
    m = info_measures(ch, PERFECT)
    ok = abs(m.i_cod_closed - 1) <= 1e-9 and abs(m.i_bob_holevo - 2) <= 1e-9
    record("2 capacity point", ok,
           f"I_cod = {m.i_cod_closed:.12f}, I_Bob = {m.i_bob_holevo:.12f} (tol 1e-9)")


def test_03_start_baseline():
    worst_cod = worst_bob = 0.0
    for fig in FIGURES:
        for spec in figure_preset(fig):
            for _, params, _ in spec.curves():
                m = info_measures(channel_state(params, 0.0), PERFECT)
                worst_cod = max(worst_cod, abs(m.i_cod_closed))
                worst_bob = max(worst_bob, abs(m.i_bob_holevo - 1))
    record("3 tau=0 baseline", worst_cod <= 1e-12 and worst_bob <= 1e-9,
           f"max |I_cod| = {worst_cod:.2e} (tol 1e-12), max |I_Bob-1| = {worst_bob:.2e} (tol 1e-9)")


def test_04_perfect_identity():
    (spec,) = figure_preset("fig1")
    worst = 0.0
    for curve in sweep_curves(spec):
        a, c = amplitudes_excited(curve.params.delta, curve.params.n, curve.tau).weights
        expected = 1 + np.array([oracles.h(x, y) for x, y in zip(a, c)])
        worst = max(worst, max_dev(curve.series("i_bob_holevo"), expected))
    record("4 chi = 1 + H", worst <= 1e-9, f"max deviation {worst:.2e} over 3x2000 points (tol 1e-9)")


def test_05_bitflip_limit():
    (spec,) = figure_preset("fig5")
    worst = 0.0
    for _, params, _ in spec.curves():
        ch = channel_state(params, spec.tau)
        a = info_measures(ch, Protocol.bit_flip(1.0))
        b = info_measures(ch, PERFECT)
        for f in FIELDS:
            worst = max(worst, max_dev(getattr(a, f), getattr(b, f)))
    record("5 q=1 limit", worst <= 1e-12, f"max deviation {worst:.2e} over all measures (tol 1e-12)")


def test_06_phaseflip_closed_form():
    rng = np.random.default_rng(6)
    phase = Protocol.phase_flip()
    a = rng.uniform(0, 1, 100)
    got = coded_information_closed(phase, a, 1 - a)
    expected = [linalg.shannon_entropy([0.75 * x, 0.75 * (1 - x), 0.25]) for x in a]
    worst = max_dev(got, expected)
    at_one = coded_information_closed(phase, 1.0, 0.0)
    ok = worst <= 1e-12 and abs(at_one - 0.811278) <= 1e-6
    record("6 phase-flip closed form", ok,
           f"max deviation {worst:.2e} (tol 1e-12); a=1 gives {at_one:.7f} (0.811278 +- 1e-6)")


def test_07_disturbance():
    (spec,) = figure_preset("fig5")
    start = info_measures(channel_state(spec.base, 0.0), Protocol.phase_flip())
    worst = 0.0
    for _, params, proto in spec.curves():
        m = info_measures(channel_state(params, spec.tau), proto)
        worst = max(worst, max_dev(m.d_message_avg, 0.225))
    ok = abs(start.d_message_avg - 0.25) <= 1e-12 and worst <= 1e-9
    record("7 disturbance values", ok,
           f"phase flip tau=0: {start.d_message_avg:.15f} (0.25 +- 1e-12); "
           f"bitflip q=0.1 max |d-0.225| = {worst:.2e} (tol 1e-9)")


def test_08_trends():
    wanted = {
        "fig1": ("icod_oscillations_nonincreasing_in_delta", "ibob_max_nondecreasing_in_delta"),
        "fig2": ("icod_oscillations_nondecreasing_in_n",),
        "fig4": ("excited_icod_max_ge_ground",),
        "fig9": tuple(f"{q}_type1_max_below_type2_{s}_sweep"
                      for q in ("d_message_avg", "d_aggregate") for s in ("delta", "n")),
    }
    failures, checked = [], 0
    for fig, names in wanted.items():
        claims = {c.name: c for c in trend_check(fig).claims}
        for name in names:
            checked += 1
            if not claims[name].passed:
                failures.append(f"{fig} {name} ({claims[name].detail})")
    record("8 trend suite", not failures,
           f"{checked - len(failures)}/{checked} claims hold" + ("; failed: " + "; ".join(failures) if failures else ""))


def test_09_eigensolver_oracle():
    rng = np.random.default_rng(9)
    mats = np.stack([oracles.random_hermitian(rng, scale=2.0) for _ in range(100)])
    values = linalg.hermitian_eigenvalues(mats)
    eig_dev = max(max_dev(v, oracles.quartic_eigenvalues(m)) for m, v in zip(mats, values))
    tr_dev = max_dev(values.sum(axis=1), np.trace(mats, axis1=1, axis2=2).real)
    sq_dev = max_dev((values**2).sum(axis=1), np.einsum("kij,kji->k", mats, mats).real)
    ok = max(eig_dev, tr_dev, sq_dev) <= 1e-9
    record("9 eigensolver oracle", ok,
           f"eigenvalues {eig_dev:.2e}, trace {tr_dev:.2e}, trace of square {sq_dev:.2e} (tol 1e-9)")


def test_10_performance():
    run_preset("fig1", steps=20)  # warm-up
    start = time.perf_counter()
    records = run_preset("fig1")
    fig1 = time.perf_counter() - start
    assert len(records) == 3 * 2000
    suite = time.perf_counter() - SUITE_START
    record("10 performance", fig1 < 1.0 and suite < 30.0,
           f"fig1 preset {fig1:.3f} s (limit 1 s); acceptance module {suite:.2f} s (limit 30 s)")

