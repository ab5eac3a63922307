"""O(N) simulation of the amplification pipelines.

Between oracle sandwiches the value and phase registers are |0>, so the
state is sum_i |i>|0>(a_i|0> + b_i|1>) and can be stored as an (N, 2) array.
Each sandwich acts on every row as a fixed 2x2 matrix, which lets large
tables run without the dense engine. Prakash's exact variant carries a
second ancilla and uses (N, 4) rows ordered (ancilla, extra) = 00, 01, 10, 11.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ampprep.baseline import iterations_auto
from ampprep.errors import PostselectionError
from ampprep.fastprep import FastMethod, choose_theta_bar, solve_scale
from ampprep.oracle import (
    AngleProfile, OracleTable, QueryLedger, angles, grover_angle, phase_codes,
    target_amplitudes,
)
from ampprep.report import IterationRecord, RunReport
from ampprep.simcore import ZERO_PROBABILITY, fidelity_mod_phase


@dataclass
class ReducedState:
    amps: np.ndarray

    @property
    def size(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "ReducedState":
        return ReducedState(self.amps.copy())

    def embed(self, layout):
        """Dense StateVector holding this state (value/phase registers at 0)."""
        from ampprep.simcore import StateVector

        t = np.zeros(layout.shape, dtype=np.complex128)
        if self.amps.shape[1] == 2:
            t[:, 0, :, 0, 0] = self.amps
        else:
            t[:, 0, :, :, 0] = self.amps.reshape(self.size, 2, 2)
        return StateVector.from_tensor(layout, t)


def reduced_prepare_s(size: int) -> ReducedState:
    if size < 1:
        raise ValueError("need at least one index")
    return ReducedState(np.full((size, 2), 1 / math.sqrt(2 * size), dtype=np.complex128))


def sandwich_phases(profile: AngleProfile, scale: float = 1.0, q: int | None = None) -> np.ndarray:
    """Per-index ancilla phase g_i = scale * 2 phi_i, on the q-bit grid if given."""
    if q is None:
        return 2 * scale * profile.phis
    return 2 * np.pi * phase_codes(profile.phis, scale, q) / (1 << q)


def reduced_u_omega(state: ReducedState, profile: AngleProfile, scale: float = 1.0,
                    q: int | None = None) -> ReducedState:
    g = sandwich_phases(profile, scale, q)
    a, b = state.amps[:, 0], state.amps[:, 1]
    return ReducedState(np.stack([np.exp(1j * g) * b, np.exp(-1j * g) * a], axis=1))


def _reflect_about(state: ReducedState, s: np.ndarray) -> ReducedState:
    return ReducedState(state.amps - 2 * np.vdot(s, state.amps) * s)


def reduced_u_s(state: ReducedState) -> ReducedState:
    s = np.full(state.amps.shape, 1 / math.sqrt(state.amps.size))
    return _reflect_about(state, s)


def reduced_finalize(state: ReducedState, profile: AngleProfile, scale: float = 1.0,
                     q: int | None = None):
    """(probability, index amplitudes) after half-angle phases, H, ancilla=1."""
    g = sandwich_phases(profile, scale / 2, q)
    a = np.exp(-1j * g) * state.amps[:, 0]
    b = np.exp(1j * g) * state.amps[:, 1]
    out = (a - b) / math.sqrt(2)
    p = float(np.vdot(out, out).real)
    if p < ZERO_PROBABILITY:
        raise PostselectionError(f"finalize post-selection probability {p:.3e}")
    return p, out / math.sqrt(p)


def reduced_omega(profile: AngleProfile) -> np.ndarray:
    e = np.exp(1j * profile.phis)
    s = np.sin(profile.phis)
    w = np.stack([s * e, -s * e.conj()], axis=1)
    return w / np.linalg.norm(w)


def _charge(ledger: QueryLedger, route: str) -> None:
    ledger.record("forward")
    if route == "rz":
        ledger.record("inverse")


def _charge_baseline_iteration(ledger: QueryLedger) -> None:
    # U_r^-1 and U_r each hold one forward and one inverse query
    for _ in range(2):
        _charge(ledger, "rz")


def _fidelity(out, target):
    return float("nan") if out is None else fidelity_mod_phase(out, target)


def _reduced_fast(table, route, q, k, scale, label):
    start = time.perf_counter()
    base = angles(table)
    scaled = AngleProfile(scale * base.phis, grover_angle(scale * base.phis))
    omega = reduced_omega(scaled)
    target = target_amplitudes(table, scale)
    state = reduced_prepare_s(table.size)
    ledger = QueryLedger()
    records = []
    probe = QueryLedger()
    _charge(probe, route)
    per_iter = probe.total
    for j in range(k + 1):
        if j:
            before = ledger.total
            _charge(ledger, route)
            state = reduced_u_s(reduced_u_omega(state, base, scale, q))
            per_iter = ledger.total - before
        try:
            p, out = reduced_finalize(state, base, scale, q)
        except PostselectionError:
            p, out = 0.0, None
        probe = QueryLedger()
        _charge(probe, route)
        overlap = float(abs(np.vdot(omega, state.amps)))
        records.append(IterationRecord(j, ledger.total + probe.total, p, overlap,
                                       _fidelity(out, target)))
    _charge(ledger, route)
    try:
        _, output = reduced_finalize(state, base, scale, q)
    except PostselectionError:
        output = None
    report = RunReport(
        method=label, n=table.index_width, m=table.value_width, q=q or 0,
        iterations=k, total_queries=ledger.total, queries_per_iteration=per_iter,
        records=records, wall_ms=(time.perf_counter() - start) * 1e3,
        extras={"theta": base.theta, "scale": scale,
                "fidelity_original": _fidelity(output, target_amplitudes(table)),
                "postselection_failed": output is None},
    )
    return report, output


def reduced_run(table: OracleTable, method: FastMethod | None = None, k="auto"):
    """Structured counterpart of ``fastprep.run_fast``.

    The kickback route is emulated by quantizing each phase to the q-bit
    grid; the phase register itself is never materialized.
    """
    method = method or FastMethod()
    if method.exactness == "prakash":
        return reduced_run_baseline(table, exact=True)
    q = method.phase_width(table) or None
    profile = angles(table)
    if method.exactness == "scaled":
        theta_bar, k_bar = choose_theta_bar(profile.theta)
        scale, steps = solve_scale(profile.phis, theta_bar)
        report, out = _reduced_fast(table, method.route, q, k_bar, scale, method.label)
        report.extras.update({
            "theta_bar": theta_bar,
            "theta_scaled": grover_angle(scale * profile.phis),
            "bisection_steps": steps,
            "fidelity_scaled": report.fidelity,
        })
        return report, out
    if k == "auto":
        k = iterations_auto(profile.theta)
    return _reduced_fast(table, method.route, q, int(k), 1.0, method.label)


def reduced_run_baseline(table: OracleTable, k="auto", exact: bool = False):
    """Closed-form baseline: |s> rows (sin phi, cos phi)/sqrt(N), flip column 0."""
    start = time.perf_counter()
    profile = angles(table)
    s, c = np.sin(profile.phis), np.cos(profile.phis)
    extras = {"theta": profile.theta}
    if exact:
        theta_bar, k = choose_theta_bar(profile.theta)
        weight = math.sqrt(min(1.0, math.sin(theta_bar) ** 2 / math.sin(profile.theta) ** 2))
        rest = math.sqrt(max(0.0, 1 - weight**2))
        rows = np.stack([s * weight, s * rest, c * weight, c * rest], axis=1)
        extras.update({"theta_bar": theta_bar, "extra_weight": weight})
    elif k == "auto":
        k = iterations_auto(profile.theta)
    if not exact:
        rows = np.stack([s, c], axis=1)
    start_state = rows.astype(np.complex128) / math.sqrt(table.size)
    omega = np.zeros_like(start_state)
    omega[:, 0] = s / np.linalg.norm(s)
    target = target_amplitudes(table)

    ledger = QueryLedger()
    ledger.record("forward")
    ledger.record("inverse")
    state = ReducedState(start_state.copy())
    records = []
    output = None
    probe = QueryLedger()
    _charge_baseline_iteration(probe)
    per_iter = probe.total
    for j in range(int(k) + 1):
        if j:
            before = ledger.total
            _charge_baseline_iteration(ledger)
            flipped = state.amps.copy()
            flipped[:, 0] *= -1
            state = _reflect_about(ReducedState(flipped), start_state)
            per_iter = ledger.total - before
        good = state.amps[:, 0]
        p = float(np.vdot(good, good).real)
        output = good / math.sqrt(p) if p >= ZERO_PROBABILITY else None
        records.append(IterationRecord(
            j, ledger.total, p, float(abs(np.vdot(omega, state.amps))), _fidelity(output, target)
        ))
    report = RunReport(
        method="baseline+prakash" if exact else "baseline",
        n=table.index_width, m=table.value_width, q=0, iterations=int(k),
        total_queries=ledger.total, queries_per_iteration=per_iter, records=records,
        wall_ms=(time.perf_counter() - start) * 1e3, extras=extras,
    )
    return report, output
