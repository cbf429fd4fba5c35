"""Acceptance suite: one test per release criterion, each printing its verdict.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion with the measured deviation and its pinned tolerance.
"""
import time

import numpy as np
import pytest

from wexpand.cavity import CavityParams, phase_pair, reflection_coupled, reflection_uncoupled
from wexpand.gates import (
    HolonomicParams,
    NoiseParams,
    hadamard,
    holonomic_gate,
    hwp_gate,
    phase_aligned_deviation,
    t_prime,
)
from wexpand.noise import (
    fidelity_combined,
    fidelity_controlled_phase,
    fidelity_hadamard,
    fidelity_t_prime,
    simulate_noisy_fidelity,
)
from wexpand.statevec import (
    QubitPermutation,
    StateVector,
    apply_1q,
    apply_2q,
    basis_state,
    fidelity_pure,
    partial_trace,
    permute,
)
from wexpand.wcircuit import (
    EXPANSION_MATRIX,
    DoublingPlan,
    build_w_state,
    create_epr,
    double_w,
    expand_by_one,
    standard_expansion_circuit,
)

S2 = 1.0 / np.sqrt(2.0)
THETA_MAX = np.pi / 60.0


def report(num, passed, detail):
    print(f"criterion {num:2d}: {'PASS' if passed else 'FAIL'} — {detail}")
    assert passed, detail


def vec(entries, n):
    v = np.zeros(1 << n, dtype=complex)
    for idx, amp in entries.items():
        v[idx] = amp
    return v


def test_criterion_01_matrix_anchor():
    circuit = standard_expansion_circuit()
    circuit.matrix()  # warm caches before timing
    best = np.inf
    for _ in range(5):
        t0 = time.perf_counter()
        m = circuit.matrix()
        dev = float(np.max(np.abs(m - EXPANSION_MATRIX)))
        best = min(best, time.perf_counter() - t0)
    report(
        1,
        dev < 1e-12 and best < 1e-3,
        f"composed 12-gate matrix dev {dev:.2e} (tol 1e-12), best compose-and-compare {best * 1e3:.3f} ms (< 1 ms)",
    )


def test_criterion_02_stepwise_anchor():
    states = standard_expansion_circuit().stepwise_states(basis_state("100"))
    checkpoints = {
        2: vec({4: S2, 6: S2}, 3),
        5: vec({4: S2, 2: S2}, 3),
        8: vec({4: S2, 3: S2}, 3),
        11: vec({4: S2, 1: S2}, 3),
    }
    dev = max(float(np.max(np.abs(states[k].amplitudes - v))) for k, v in checkpoints.items())
    report(2, dev < 1e-12, f"four intermediate states dev {dev:.2e} (tol 1e-12)")


def test_criterion_03_epr_bell():
    epr = create_epr()
    bell = StateVector(vec({1: S2, 2: S2}, 2))
    fid_dev = abs(1.0 - fidelity_pure(epr, bell))
    out3 = standard_expansion_circuit().apply(basis_state("100"), 0, 1, 2)
    anc_dev = float(
        np.max(np.abs(partial_trace(out3, {1}).entries - np.array([[1, 0], [0, 0]])))
    )
    report(
        3,
        fid_dev < 1e-12 and anc_dev < 1e-12,
        f"Bell fidelity dev {fid_dev:.2e}, ancilla dev {anc_dev:.2e} (tol 1e-12)",
    )


def test_criterion_04_growth_strategy():
    three = expand_by_one(build_w_state(2), 0)
    dev3 = float(np.max(np.abs(three.amplitudes - vec({4: 0.5, 2: 0.5, 1: S2}, 3))))
    four = expand_by_one(three, 2)
    dev4 = float(
        np.max(np.abs(four.amplitudes - vec({8: 0.5, 4: 0.5, 2: 0.5, 1: 0.5}, 4)))
    )
    report(
        4,
        dev3 < 1e-12 and dev4 < 1e-12,
        f"weighted 3-qubit dev {dev3:.2e}, |W_4> dev {dev4:.2e} (tol 1e-12)",
    )


def test_criterion_05_doubling_all_strategies():
    t0 = time.perf_counter()
    worst = 0.0
    for n in (1, 2, 3, 4):
        for mode in ("block", "sequential"):
            for schedule in ("serial", "parallel"):
                _, rep = double_w(DoublingPlan(n, mode, schedule))
                worst = max(worst, abs(1.0 - rep.fidelity))
    elapsed = time.perf_counter() - t0
    report(
        5,
        worst < 1e-10 and elapsed < 5.0,
        f"n=1..4 x 4 strategies, worst fidelity dev {worst:.2e} (tol 1e-10), {elapsed:.2f}s (< 5s)",
    )


def test_criterion_06_fidelity_formulas():
    at_zero = max(
        abs(1.0 - fidelity_hadamard(0.0)),
        abs(1.0 - fidelity_t_prime(0.0)),
        abs(1.0 - fidelity_controlled_phase(0.0)),
        abs(1.0 - fidelity_combined(0.0, 0.0, 0.0)),
    )
    f_comb = fidelity_combined(THETA_MAX, THETA_MAX, THETA_MAX)
    rng = np.random.default_rng(2024)
    sim_dev = 0.0
    for _ in range(50):
        a, b, g = (float(x) for x in rng.uniform(0.0, THETA_MAX, size=3))
        n = int(rng.integers(1, 4))
        sim_dev = max(
            sim_dev, abs(fidelity_combined(a, b, g) - simulate_noisy_fidelity(n, NoiseParams(a, b, g)))
        )
    red_dev = 0.0
    for t in rng.uniform(0.0, THETA_MAX, size=25):
        t = float(t)
        red_dev = max(
            red_dev,
            abs(fidelity_combined(t, 0, 0) - fidelity_hadamard(t)),
            abs(fidelity_combined(0, t, 0) - fidelity_t_prime(t)),
            abs(fidelity_combined(0, 0, t) - fidelity_controlled_phase(t)),
        )
    ok = at_zero < 1e-12 and f_comb > 0.97 and sim_dev < 1e-9 and red_dev < 1e-12
    report(
        6,
        ok,
        f"zero-point dev {at_zero:.1e}, combined({THETA_MAX:.4f})={f_comb:.4f} (> 0.97), "
        f"sim agreement {sim_dev:.2e} (tol 1e-9), reductions {red_dev:.2e} (tol 1e-12)",
    )


def test_criterion_07_size_independence():
    p = NoiseParams(0.025, 0.018, 0.033)
    values = [simulate_noisy_fidelity(n, p) for n in (1, 2, 3, 4)]
    spread = max(values) - min(values)
    report(7, spread < 1e-9, f"fidelity spread over n=1..4 is {spread:.2e} (tol 1e-9)")


def test_criterion_08_cavity():
    r0_res = reflection_uncoupled(CavityParams.resonant(1.0))
    exact_minus_one = r0_res == -1.0
    kappa, gd = 1.7, 0.4
    grid_dev = 0.0
    for g in np.linspace(0.0, 25.0, 1000):
        r = reflection_coupled(CavityParams(0, 0, 0, float(g), kappa, gd))
        grid_dev = max(grid_dev, abs(r - (4 * g * g - kappa * gd) / (4 * g * g + kappa * gd)))
    pp = phase_pair(CavityParams.resonant(5.0))
    phase_dev = max(abs(pp.phi), abs(pp.phi_0 - np.pi))
    mod_dev = 0.0
    for d in np.linspace(-80.0, 80.0, 10_000):
        mod_dev = max(
            mod_dev,
            abs(abs(reflection_uncoupled(CavityParams(-float(d), 0, 0, 1, 1, 1))) - 1.0),
        )
    ok = exact_minus_one and grid_dev < 1e-14 and phase_dev < 1e-15 and mod_dev < 1e-12
    report(
        8,
        ok,
        f"r_0 = -1 exact: {exact_minus_one}, resonant grid dev {grid_dev:.2e}, "
        f"phase pair dev {phase_dev:.2e}, |r_0| grid dev {mod_dev:.2e} (tol 1e-12)",
    )


def test_criterion_09_physical_gate_realizations():
    dev = max(
        phase_aligned_deviation(hadamard().matrix, holonomic_gate(HolonomicParams(np.pi / 4)).matrix),
        phase_aligned_deviation(t_prime().matrix, holonomic_gate(HolonomicParams(np.pi / 8)).matrix),
        float(np.max(np.abs(hwp_gate(np.pi / 8).matrix - hadamard().matrix))),
        float(np.max(np.abs(hwp_gate(np.pi / 16).matrix - t_prime().matrix))),
    )
    report(9, dev < 1e-12, f"holonomic/HWP vs Hadamard and T' rays, dev {dev:.2e} (tol 1e-12)")


def test_criterion_10_property_suites_run_fast():
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)

    # Unitarity: norm preserved over a long random gate sequence.
    v = rng.standard_normal(1 << 10) + 1j * rng.standard_normal(1 << 10)
    state = StateVector(v / np.linalg.norm(v))
    cp = lambda g: np.diag([1.0, 1.0, 1.0, -np.exp(-1j * g)]).astype(complex)
    rot = lambda t: np.array([[np.cos(t), np.sin(t)], [np.sin(t), -np.cos(t)]], dtype=complex)
    for k in range(1000):
        if k % 3 == 2:
            a, b = rng.choice(10, size=2, replace=False)
            state = apply_2q(state, cp(float(rng.uniform(0, np.pi))), int(a), int(b))
        else:
            state = apply_1q(state, rot(float(rng.uniform(0, np.pi))), int(rng.integers(10)))
    norm_dev = abs(np.linalg.norm(state.amplitudes) - 1.0)

    # Trace preservation of partial traces on random states.
    trace_dev = 0.0
    for _ in range(20):
        w = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        s = StateVector(w / np.linalg.norm(w))
        keep = sorted(rng.choice(5, size=int(rng.integers(1, 5)), replace=False))
        trace_dev = max(trace_dev, abs(np.trace(partial_trace(s, keep).entries) - 1.0))

    # Weight-one support closure under repeated expansion.
    s = build_w_state(3)
    for _ in range(3):
        s = expand_by_one(s, int(rng.integers(s.num_qubits)))
    weight_ok = all(
        bin(i).count("1") == 1 for i, a in enumerate(s.amplitudes) if abs(a) > 1e-10
    )

    # Permutation involution on random states.
    perm_dev = 0.0
    for _ in range(20):
        perm = QubitPermutation(tuple(rng.permutation(6)))
        w = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        s6 = StateVector(w / np.linalg.norm(w))
        back = permute(permute(s6, perm), perm.inverse())
        perm_dev = max(perm_dev, float(np.max(np.abs(back.amplitudes - s6.amplitudes))))

    elapsed = time.perf_counter() - t0
    ok = norm_dev < 1e-12 and trace_dev < 1e-12 and weight_ok and perm_dev < 1e-14 and elapsed < 60.0
    report(
        10,
        ok,
        f"norm drift {norm_dev:.2e}, trace dev {trace_dev:.2e}, weight-one closure {weight_ok}, "
        f"involution dev {perm_dev:.2e}, property suite {elapsed:.2f}s (< 60s)",
    )
