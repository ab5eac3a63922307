"""Phase-encoded amplitude amplification.

The good-state reflection is an oracle sandwich that writes a per-index
phase diag(exp(-i beta_i), exp(+i beta_i)) onto the ancilla, beta_i = 2 phi_i,
followed by X. The reflection about the start state needs no oracle at all.

Two routes realize the sandwich:

* ``rz``: U_f, value-conditioned Rz, U_f^-1 (two queries).
* ``kickback``: one scaled query adding an integer phase code into a q-qubit
  register held in a Fourier state, with the transform direction chosen by
  the ancilla (one query, phases quantized to 2 pi / 2^q).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ampprep import baseline
from ampprep.errors import ConfigurationError, ContractViolation, PostselectionError
from ampprep.oracle import (
    OracleTable, QueryLedger, angles, apply_uf, apply_uf_scaled, decoded_values,
    grover_angle, target_amplitudes,
)
from ampprep.report import IterationRecord, RunReport
from ampprep.simcore import (
    H, X, RegisterLayout, StateVector, apply_register_1q, apply_value_conditioned,
    fidelity_mod_phase, hadamard_register, new_basis_state, postselect_many,
    qft_register, reflect_zero, register_amplitudes, rz,
)

ROUTES = ("rz", "kickback")
EXACTNESS = ("none", "prakash", "scaled")
REALIZATIONS = ("qft-direction", "add-subtract")
HYGIENE_TOL = 1e-12


@dataclass(frozen=True)
class FastMethod:
    route: str = "rz"
    exactness: str = "none"
    q: int | None = None
    realization: str = "qft-direction"

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ConfigurationError(f"route must be one of {ROUTES}, got {self.route!r}")
        if self.exactness not in EXACTNESS:
            raise ConfigurationError(f"exactness must be one of {EXACTNESS}")
        if self.realization not in REALIZATIONS:
            raise ConfigurationError(f"realization must be one of {REALIZATIONS}")
        if self.route == "kickback" and self.q is not None and self.q < 1:
            raise ConfigurationError("kickback route needs q >= 1")

    def phase_width(self, table: OracleTable) -> int:
        if self.route != "kickback":
            return 0
        return self.q if self.q is not None else table.value_width + 4

    @property
    def label(self) -> str:
        name = f"fast-{self.route}"
        return name if self.exactness == "none" else f"{name}+{self.exactness}"


def fast_layout(table: OracleTable, route: str = "rz", q: int | None = None) -> RegisterLayout:
    """rz keeps a value register; kickback replaces it with the phase register."""
    if route == "rz":
        return RegisterLayout(table.index_width, table.value_width, 1)
    q = table.value_width + 4 if q is None else q
    if q < 1:
        raise ConfigurationError("kickback route needs q >= 1")
    return RegisterLayout(table.index_width, 0, 1, phase_width=q)


@dataclass
class OmegaPair:
    omega: StateVector
    omega_perp: StateVector | None


def omega_pair(layout: RegisterLayout, table: OracleTable, scale: float = 1.0) -> OmegaPair:
    """Good state and complement with the index-dependent ancilla phases."""
    phis = angles(table, scale).phis
    e = np.exp(1j * phis)
    good = np.zeros(layout.shape, dtype=np.complex128)
    bad = np.zeros(layout.shape, dtype=np.complex128)
    good[:, 0, 0, 0, 0] = np.sin(phis) * e
    good[:, 0, 1, 0, 0] = -np.sin(phis) * e.conj()
    bad[:, 0, 0, 0, 0] = np.cos(phis) * e
    bad[:, 0, 1, 0, 0] = np.cos(phis) * e.conj()
    omega = StateVector.from_tensor(layout, good / np.linalg.norm(good))
    nb = np.linalg.norm(bad)
    perp = StateVector.from_tensor(layout, bad / nb) if nb > 1e-12 else None
    return OmegaPair(omega, perp)


def prepare_s_fast(layout: RegisterLayout) -> StateVector:
    state = hadamard_register(new_basis_state(layout), "index")
    return hadamard_register(state, "ancilla")


def _require_zero(state: StateVector, register: str) -> None:
    if not state.layout.width(register):
        return
    p0 = float(state.register_probabilities(register)[0])
    if p0 < 1 - HYGIENE_TOL:
        raise ContractViolation(
            f"{register} register must be |0> outside the oracle sandwich (P0={p0:.3e})"
        )


def _rz_sandwich(state, table, ledger, scale):
    _require_zero(state, "value")
    state = apply_uf(state, table, "forward", ledger)
    betas = scale * np.pi * decoded_values(table.value_width) / table.max_abs
    mats = np.stack([rz(2 * b) for b in betas])
    state = apply_value_conditioned(state, "value", "ancilla", mats)
    return apply_uf(state, table, "inverse", ledger)


def _kickback_sandwich(state, table, ledger, scale, realization="qft-direction"):
    q = state.layout.phase_width
    if q < 1:
        raise ConfigurationError("kickback route needs a phase register (q >= 1)")
    _require_zero(state, "phase")
    state = apply_register_1q(state, "phase", X)
    if realization == "qft-direction":
        state = qft_register(state, "phase", "forward", {"ancilla": 1})
        state = qft_register(state, "phase", "inverse", {"ancilla": 0})
        state = apply_uf_scaled(state, table, scale, q, "forward", ledger)
        state = qft_register(state, "phase", "inverse", {"ancilla": 1})
        state = qft_register(state, "phase", "forward", {"ancilla": 0})
    else:
        state = qft_register(state, "phase", "forward")
        state = apply_uf_scaled(state, table, scale, q, "forward", ledger,
                                sign_control="ancilla")
        state = qft_register(state, "phase", "inverse")
    return apply_register_1q(state, "phase", X)


def phase_sandwich(state, table, ledger, route, scale=1.0, realization="qft-direction"):
    """Ancilla phase diag(exp(-i g_i), exp(+i g_i)) with g_i = scale * 2 phi_i."""
    if route == "rz":
        return _rz_sandwich(state, table, ledger, scale)
    if route == "kickback":
        return _kickback_sandwich(state, table, ledger, scale, realization)
    raise ConfigurationError(f"unknown route {route!r}")


def u_omega_rz(state: StateVector, table: OracleTable, ledger: QueryLedger,
               scale: float = 1.0) -> StateVector:
    state = _rz_sandwich(state, table, ledger, scale)
    return apply_register_1q(state, "ancilla", X)


def u_omega_kickback(state: StateVector, table: OracleTable, ledger: QueryLedger,
                     q: int | None = None, scale: float = 1.0,
                     realization: str = "qft-direction") -> StateVector:
    if q is not None and q != state.layout.phase_width:
        raise ConfigurationError(f"state has a {state.layout.phase_width}-qubit phase register, not {q}")
    state = _kickback_sandwich(state, table, ledger, scale, realization)
    return apply_register_1q(state, "ancilla", X)


def u_omega_fast(state, table, ledger, route, scale=1.0, realization="qft-direction"):
    state = phase_sandwich(state, table, ledger, route, scale, realization)
    return apply_register_1q(state, "ancilla", X)


def u_s_fast(state: StateVector) -> StateVector:
    for reg in ("index", "ancilla"):
        state = hadamard_register(state, reg)
    state = reflect_zero(state, ("index", "ancilla"))
    for reg in ("index", "ancilla"):
        state = hadamard_register(state, reg)
    return state


def finalize(state, table, ledger, route, scale=1.0, realization="qft-direction"):
    """Disentangle the ancilla and post-select the analog-encoded index state.

    The half-angle sandwich maps each good branch to |0> - |1> and each
    complement branch to |0> + |1>; H then sends them to |1> and |0>.
    Returns (probability, index amplitudes).
    """
    state = phase_sandwich(state, table, ledger, route, scale / 2, realization)
    state = apply_register_1q(state, "ancilla", H)
    outcomes = {"value": 0, "ancilla": 1, "phase": 0}
    prob, collapsed = postselect_many(state, outcomes)
    return prob, register_amplitudes(collapsed, "index", outcomes)


def choose_theta_bar(theta: float) -> tuple[float, int]:
    """Largest angle <= theta with (2k+1) * angle = pi/2 exactly."""
    if not 0 < theta <= math.pi / 2 + 1e-15:
        raise ConfigurationError(f"theta must lie in (0, pi/2], got {theta}")
    d = math.ceil(math.pi / (2 * theta) - 1e-9)
    if d % 2 == 0:
        d += 1
    return math.pi / (2 * d), (d - 1) // 2


def solve_scale(phis: np.ndarray, theta_target: float, tol: float = 1e-12,
                max_steps: int = 200) -> tuple[float, int]:
    """Bisect c in (0, 1] so that the Grover angle of c * phi hits the target.

    Returns (c, steps). Monotone because |c phi_i| stays within [0, pi/2].
    """
    if abs(grover_angle(phis) - theta_target) <= tol:
        return 1.0, 0
    lo, hi = 0.0, 1.0
    for step in range(1, max_steps + 1):
        mid = 0.5 * (lo + hi)
        err = grover_angle(mid * phis) - theta_target
        if abs(err) <= tol:
            return mid, step
        if err < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), max_steps


def _index_fidelity(output, table, scale):
    if output is None:
        return float("nan")
    return fidelity_mod_phase(output, target_amplitudes(table, scale))


def _run_fast_core(table, route, q, k, scale, method_label, realization="qft-direction"):
    start = time.perf_counter()
    layout = fast_layout(table, route, q)
    ledger = QueryLedger()
    omega = omega_pair(layout, table, scale).omega
    state = prepare_s_fast(layout)
    records = []
    per_iter = None
    for j in range(k + 1):
        if j:
            before = ledger.total
            state = u_s_fast(u_omega_fast(state, table, ledger, route, scale, realization))
            per_iter = ledger.total - before if per_iter is None else per_iter
        probe = QueryLedger()
        try:
            p, out = finalize(state, table, probe, route, scale, realization)
        except PostselectionError:
            p, out = 0.0, None
        overlap = float(abs(np.vdot(omega.amplitudes, state.amplitudes)))
        records.append(IterationRecord(
            j, ledger.total + probe.total, p, overlap, _index_fidelity(out, table, scale)
        ))
    try:
        _, output = finalize(state, table, ledger, route, scale, realization)
    except PostselectionError:
        output = None
    if per_iter is None:
        probe = QueryLedger()
        u_omega_fast(state, table, probe, route, scale, realization)
        per_iter = probe.total
    report = RunReport(
        method=method_label, n=table.index_width, m=table.value_width,
        q=layout.phase_width, iterations=k, total_queries=ledger.total,
        queries_per_iteration=per_iter, records=records,
        wall_ms=(time.perf_counter() - start) * 1e3,
        extras={"theta": angles(table).theta, "scale": scale,
                "fidelity_original": _index_fidelity(output, table, 1.0),
                "postselection_failed": output is None},
    )
    return report, output


def run_fast(table: OracleTable, method: FastMethod | None = None, k="auto"):
    """Prepare |s>, run k rounds of U_s U_omega, finalize.

    Returns (report, index amplitudes). Exact variants ignore ``k`` and use
    the iteration count that makes the final success probability one.
    """
    method = method or FastMethod()
    if method.exactness == "scaled":
        return run_exact_scaled(table, method.route, method.q, method.realization)
    if method.exactness == "prakash":
        return run_exact_prakash(table)
    if k == "auto":
        k = baseline.iterations_auto(angles(table).theta)
    q = method.phase_width(table) or None
    return _run_fast_core(table, method.route, q, int(k), 1.0, method.label, method.realization)


def run_exact_prakash(table: OracleTable):
    """Reference pipeline with an extra ancilla that shrinks the good weight."""
    theta = angles(table).theta
    theta_bar, k_bar = choose_theta_bar(theta)
    ratio = min(1.0, math.sin(theta_bar) ** 2 / math.sin(theta) ** 2)
    weight = math.sqrt(ratio)
    extra_angle = 2 * math.acos(weight)
    report, output = baseline._run_pipeline(
        table, k_bar, "baseline+prakash", extra_angle=extra_angle, extra_weight=weight,
        extras={"theta_bar": theta_bar, "extra_weight": weight},
    )
    return report, output


def run_exact_scaled(table: OracleTable, route: str = "rz", q: int | None = None,
                     realization: str = "qft-direction", compare_literal: bool = True):
    """Fast pipeline with all phases scaled so the Grover angle becomes exact.

    The record ``fidelity`` column is measured against the scaled target
    (amplitudes proportional to sin(c phi_i)); the fidelity against the
    original target is kept in ``extras``. With ``compare_literal`` the run is
    repeated with c = theta_bar / theta and its outcome reported alongside.
    """
    profile = angles(table)
    theta_bar, k_bar = choose_theta_bar(profile.theta)
    scale, steps = solve_scale(profile.phis, theta_bar)
    if route == "kickback" and q is None:
        q = table.value_width + 4
    label = f"fast-{route}+scaled"
    report, output = _run_fast_core(table, route, q, k_bar, scale, label, realization)
    report.extras.update({
        "theta_bar": theta_bar,
        "theta_scaled": grover_angle(scale * profile.phis),
        "bisection_steps": steps,
        "fidelity_scaled": report.fidelity,
    })
    if compare_literal:
        literal = theta_bar / profile.theta
        lit_report, _ = _run_fast_core(table, route, q, k_bar, literal, label, realization)
        report.extras.update({
            "literal_scale": literal,
            "literal_theta": grover_angle(literal * profile.phis),
            "literal_p_success": lit_report.p_success,
            "literal_fidelity_original": lit_report.extras["fidelity_original"],
        })
    return report, output
