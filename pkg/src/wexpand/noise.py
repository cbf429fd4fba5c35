"""Gate-imperfection fidelity analysis for the doubling protocol.

Closed-form fidelities of |W_n> -> |W_2n> under shared coherent gate errors
(Hadamard angle ``alpha``, T' angle ``beta``, controlled-phase ``gamma``),
an end-to-end noisy simulation of the same quantity, and sweep generation.

Fidelity definition.  Two candidates are implemented and were calibrated
against the closed forms:

* ``post-selected-overlap``: |<W_2n, anc-ideal | psi_final>|^2, the squared
  overlap of the full final state with the target joined to all ancillas in
  their ideal |0> state;
* ``reduced-density``: <W_2n| tr_anc(rho_final) |W_2n>.

The post-selected overlap reproduces the closed forms exactly and is
independent of n (each round acts as the exact identity on the n-1 terms
whose control qubit is |0>, even with imperfect gates, so the overlap
amplitude is the same single-triple quantity for every n).  The reduced-
density variant adds the ancilla-excited branches, whose weight decays like
1/n.  The calibrated default is therefore ``post-selected-overlap``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import IDEAL, NoiseParams
from .statevec import StateVector, permute, tensor, zero_state
from .wcircuit import (
    BLOCK_MODE_MAX_N,
    apply_O,
    build_w_state,
    interleave_permutation,
)

POST_SELECTED_OVERLAP = "post-selected-overlap"
REDUCED_DENSITY = "reduced-density"
# Selected by calibration against the closed forms (see module docstring).
CALIBRATED_DEFINITION = POST_SELECTED_OVERLAP

_S8 = np.sin(np.pi / 8.0)
_C8 = np.cos(np.pi / 8.0)


@dataclass(frozen=True)
class FidelityRecord:
    """One sweep point: the four closed forms plus the simulated value."""

    theta: float
    f_h: float
    f_tp: float
    f_cp: float
    f_combined: float
    f_simulated: float
    n: int


def fidelity_hadamard(alpha: float) -> float:
    """Doubling fidelity when only the Hadamards carry an angle error."""
    return float(abs(0.5 + 0.5 * np.cos(2.0 * alpha) ** 3) ** 2)


def fidelity_t_prime(beta: float) -> float:
    """Doubling fidelity when only the T' gates carry an angle error."""
    x = (np.pi + 8.0 * beta) / 4.0
    return float(abs((np.cos(x) + np.sin(x)) / np.sqrt(2.0)) ** 2)


def fidelity_controlled_phase(gamma: float) -> float:
    """Doubling fidelity when only the controlled-phase gates are off."""
    amp = 0.5 * np.exp(-2j * gamma) * np.cos(gamma / 2.0) ** 4 + (
        _C8**2 - np.exp(-1j * gamma) * _S8**2
    ) / np.sqrt(2.0)
    return float(abs(amp) ** 2)


def fidelity_combined(alpha: float, beta: float, gamma: float) -> float:
    """Doubling fidelity with all three imperfections acting together."""
    eg = np.exp(1j * gamma)
    x = (np.pi + 8.0 * beta) / 4.0
    amp = np.exp(-4j * gamma) * (1.0 + eg) ** 4 * np.cos(2.0 * alpha) ** 3 * np.cos(x) / (
        16.0 * np.sqrt(2.0)
    ) + np.exp(-1j * gamma) * (-1.0 + eg + (1.0 + eg) * np.sin(x)) / (2.0 * np.sqrt(2.0))
    return float(abs(amp) ** 2)


_CLOSED_FORMS = {
    "h": lambda p: fidelity_hadamard(p.alpha),
    "tp": lambda p: fidelity_t_prime(p.beta),
    "cp": lambda p: fidelity_controlled_phase(p.gamma),
    "combined": lambda p: fidelity_combined(p.alpha, p.beta, p.gamma),
}


def fidelity_closed_form(which: str, params: NoiseParams) -> float:
    """Evaluate one of the closed forms: 'h', 'tp', 'cp' or 'combined'."""
    try:
        return _CLOSED_FORMS[which.lower()](params)
    except KeyError:
        raise ValueError(
            f"unknown closed form {which!r}; expected one of {sorted(_CLOSED_FORMS)}"
        ) from None


def _noisy_final_register(n: int, params: NoiseParams) -> StateVector:
    """Full 3n-qubit state after all n noisy expansion rounds, ancillas kept."""
    reg = tensor(build_w_state(n), zero_state(2 * n))
    reg = permute(reg, interleave_permutation(n))
    for i in range(n):
        reg = apply_O(reg, 3 * i, 3 * i + 1, 3 * i + 2, params)
    return reg


def simulate_noisy_fidelity(
    n: int, params: NoiseParams, definition: str = CALIBRATED_DEFINITION
) -> float:
    """End-to-end noisy doubling fidelity against |W_2n>.

    Runs the full doubling register with every gate replaced by its
    imperfect variant and evaluates the requested fidelity definition.
    """
    if not 1 <= n <= BLOCK_MODE_MAX_N:
        raise ValueError(f"n must be in 1..{BLOCK_MODE_MAX_N}, got {n}")
    reg = _noisy_final_register(n, params)
    target = build_w_state(2 * n).amplitudes

    # Group the 3n axes as all logical qubits first, all ancillas last.  The
    # target is invariant under qubit reordering, so the interleaved logical
    # order needs no fixup.
    logical = [q for i in range(n) for q in (3 * i, 3 * i + 2)]
    ancillas = [3 * i + 1 for i in range(n)]
    m = reg.tensor_view().transpose(logical + ancillas).reshape(1 << (2 * n), -1)

    if definition == POST_SELECTED_OVERLAP:
        return float(abs(np.vdot(target, m[:, 0])) ** 2)
    if definition == REDUCED_DENSITY:
        return float(np.sum(np.abs(target.conj() @ m) ** 2))
    raise ValueError(
        f"unknown fidelity definition {definition!r}; expected "
        f"{POST_SELECTED_OVERLAP!r} or {REDUCED_DENSITY!r}"
    )


def sweep(theta_max: float, steps: int, n: int = 2) -> list[FidelityRecord]:
    """Evaluate all fidelity series on the shared grid theta_k = k*theta_max/(steps-1).

    The three single-imperfection series each set the other two angles to
    zero; the combined series (closed-form and simulated) drives all three
    with the same theta.
    """
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    records = []
    for theta in np.linspace(0.0, theta_max, steps):
        theta = float(theta)
        joint = NoiseParams(theta, theta, theta)
        records.append(
            FidelityRecord(
                theta=theta,
                f_h=fidelity_hadamard(theta),
                f_tp=fidelity_t_prime(theta),
                f_cp=fidelity_controlled_phase(theta),
                f_combined=fidelity_combined(theta, theta, theta),
                f_simulated=simulate_noisy_fidelity(n, joint),
                n=n,
            )
        )
    return records


__all__ = [
    "CALIBRATED_DEFINITION",
    "FidelityRecord",
    "IDEAL",
    "NoiseParams",
    "POST_SELECTED_OVERLAP",
    "REDUCED_DENSITY",
    "fidelity_closed_form",
    "fidelity_combined",
    "fidelity_controlled_phase",
    "fidelity_hadamard",
    "fidelity_t_prime",
    "simulate_noisy_fidelity",
    "sweep",
]
