"""Reference amplitude amplification with an uncomputed oracle.

The start state is produced by U_r = U_f^-1 . Ry(f) . U_f . H, the reflection
about it is U_r R0 U_r^-1 and the good-state flip is XZX on the ancilla, so
every iteration costs four oracle queries.
"""
from __future__ import annotations

import math
import time

import numpy as np

from ampprep.oracle import (
    OracleTable, QueryLedger, angles, apply_uf, decoded_values, target_state,
)
from ampprep.report import IterationRecord, RunReport
from ampprep.simcore import (
    GateSpec, RegisterLayout, StateVector, apply_gate, apply_value_conditioned,
    fidelity_mod_phase, hadamard_register, new_basis_state, reflect_zero,
    register_amplitudes, ZERO_PROBABILITY,
)


def baseline_layout(table: OracleTable, extra_ancilla: bool = False) -> RegisterLayout:
    return RegisterLayout(table.index_width, table.value_width, 2 if extra_ancilla else 1)


def ry_completion(phi) -> np.ndarray:
    """[[sin, cos], [cos, -sin]]: |0> -> sin|0> + cos|1>, |1> -> cos|0> - sin|1>."""
    s, c = np.sin(phi), np.cos(phi)
    return np.stack([np.stack([s, c], -1), np.stack([c, -s], -1)], -2).astype(np.complex128)


def conditioned_ry(state: StateVector, table: OracleTable) -> StateVector:
    """Rotate the ancilla by the angle decoded from the value register."""
    phis = np.pi * decoded_values(table.value_width) / (2 * table.max_abs)
    return apply_value_conditioned(state, "value", "ancilla", ry_completion(phis))


def _extra_gate(layout: RegisterLayout, angle: float, inverse: bool = False) -> GateSpec:
    return GateSpec("Ry", layout.positions["extra"][0], angle=-angle if inverse else angle)


def apply_u_r(state, table, ledger, extra_angle=None):
    state = hadamard_register(state, "index")
    if extra_angle is not None:
        state = apply_gate(state, _extra_gate(state.layout, extra_angle))
    state = apply_uf(state, table, "forward", ledger)
    state = conditioned_ry(state, table)
    return apply_uf(state, table, "inverse", ledger)


def apply_u_r_inverse(state, table, ledger, extra_angle=None):
    # the conditioned rotation is its own inverse
    state = apply_uf(state, table, "forward", ledger)
    state = conditioned_ry(state, table)
    state = apply_uf(state, table, "inverse", ledger)
    if extra_angle is not None:
        state = apply_gate(state, _extra_gate(state.layout, extra_angle, inverse=True))
    return hadamard_register(state, "index")


def prepare_s(table: OracleTable, ledger: QueryLedger, extra_angle=None) -> StateVector:
    layout = baseline_layout(table, extra_ancilla=extra_angle is not None)
    return apply_u_r(new_basis_state(layout), table, ledger, extra_angle)


def u_omega_xzx(state: StateVector) -> StateVector:
    anc = state.layout.positions["ancilla"][0]
    for kind in ("X", "Z", "X"):
        state = apply_gate(state, GateSpec(kind, anc))
    return state


def u_omega(state: StateVector) -> StateVector:
    if state.layout.widths["extra"]:
        return reflect_zero(state, ("ancilla", "extra"))
    return u_omega_xzx(state)


def u_s(state, table, ledger, extra_angle=None):
    state = apply_u_r_inverse(state, table, ledger, extra_angle)
    state = reflect_zero(state, ("index", "value", "ancilla", "extra", "phase"))
    return apply_u_r(state, table, ledger, extra_angle)


def iterate(state, table, ledger, extra_angle=None):
    return u_s(u_omega(state), table, ledger, extra_angle)


def omega_states(layout: RegisterLayout, table: OracleTable, extra_weight: float = 1.0):
    """Normalized good state and its complement inside the reachable plane.

    ``extra_weight`` is the |0> amplitude of the extra ancilla (Prakash's
    exact variant); the good branch needs both ancillas at zero. Returns
    (omega, omega_perp), with omega_perp None when the complement is empty.
    """
    phis = angles(table).phis
    s, c = np.sin(phis), np.cos(phis)
    good = np.zeros(layout.shape, dtype=np.complex128)
    bad = np.zeros(layout.shape, dtype=np.complex128)
    good[:, 0, 0, 0, 0] = s
    if layout.widths["extra"]:
        rest = math.sqrt(max(0.0, 1 - extra_weight**2))
        bad[:, 0, 0, 1, 0] = s * rest
        bad[:, 0, 1, 0, 0] = c * extra_weight
        bad[:, 0, 1, 1, 0] = c * rest
    else:
        bad[:, 0, 1, 0, 0] = c
    omega = StateVector.from_tensor(layout, good / np.linalg.norm(good))
    nb = np.linalg.norm(bad)
    perp = StateVector.from_tensor(layout, bad / nb) if nb > 1e-12 else None
    return omega, perp


def iterations_auto(theta: float) -> int:
    """k maximizing sin^2((2k+1) theta); ties go to the smaller k."""
    x = math.pi / (4 * theta) - 0.5
    best_k, best_p = 0, -1.0
    for k in sorted({max(0, math.floor(x)), max(0, math.ceil(x))}):
        p = math.sin((2 * k + 1) * theta) ** 2
        if p > best_p + 1e-12:
            best_k, best_p = k, p
    return best_k


def good_outcomes(layout: RegisterLayout) -> dict[str, int]:
    out = {"value": 0, "ancilla": 0}
    if layout.widths["extra"]:
        out["extra"] = 0
    return out


def measure(state: StateVector, omega: StateVector, table: OracleTable):
    """(success probability, |<omega|psi>|, fidelity, post-selected index state)."""
    outcomes = good_outcomes(state.layout)
    amps = register_amplitudes(state, "index", outcomes)
    p = float(np.vdot(amps, amps).real)
    overlap = float(abs(np.vdot(omega.amplitudes, state.amplitudes)))
    if p < ZERO_PROBABILITY:
        return p, overlap, float("nan"), None
    out = amps / math.sqrt(p)
    return p, overlap, fidelity_mod_phase(out, target_state(table)), out


def _run_pipeline(table, k, method, extra_angle=None, extra_weight=1.0, extras=None):
    start = time.perf_counter()
    ledger = QueryLedger()
    state = prepare_s(table, ledger, extra_angle)
    omega, _ = omega_states(state.layout, table, extra_weight)
    records = []
    output = None
    for j in range(k + 1):
        if j:
            state = iterate(state, table, ledger, extra_angle)
        p, overlap, fid, output = measure(state, omega, table)
        records.append(IterationRecord(j, ledger.total, p, overlap, fid))
    if k:
        per_iter = records[1].queries_cumulative - records[0].queries_cumulative
    else:
        probe = QueryLedger()
        iterate(state, table, probe, extra_angle)
        per_iter = probe.total
    report = RunReport(
        method=method, n=table.index_width, m=table.value_width, q=0,
        iterations=k, total_queries=ledger.total, queries_per_iteration=per_iter,
        records=records, wall_ms=(time.perf_counter() - start) * 1e3,
        extras={"theta": angles(table).theta, **(extras or {})},
    )
    return report, output


def run_baseline(table: OracleTable, k="auto"):
    """Prepare, amplify k times, post-select value=0 and ancilla=0.

    Returns (report, post-selected index amplitudes); the amplitudes are
    None when post-selection is impossible, which is recorded in the report
    rather than raised.
    """
    theta = angles(table).theta
    if k == "auto":
        k = iterations_auto(theta)
    report, output = _run_pipeline(table, int(k), "baseline")
    report.extras["postselection_failed"] = output is None
    return report, output

