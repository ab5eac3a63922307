"""Dense statevector engine over a fixed set of named registers.

Qubit 0 is the least significant bit of the basis index. Registers are
contiguous; the index register holds the most significant bits and the
phase register the least significant, so a C-order reshape of the amplitude
array gives one tensor axis per register in the order ``REGISTER_ORDER``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ampprep.errors import ConfigurationError, PostselectionError

REGISTER_ORDER = ("index", "value", "ancilla", "extra", "phase")
DEFAULT_WIDTH_CAP = 26
UNITARY_TOL = 1e-12
ZERO_PROBABILITY = 1e-15


@dataclass(frozen=True)
class RegisterLayout:
    index_width: int
    value_width: int = 0
    ancilla_count: int = 1
    phase_width: int = 0
    max_width: int = DEFAULT_WIDTH_CAP

    def __post_init__(self):
        for name in ("index_width", "value_width", "phase_width"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be non-negative")
        if self.ancilla_count not in (0, 1, 2):
            raise ConfigurationError("ancilla_count must be 0, 1 or 2")
        if self.total_width > self.max_width:
            raise ConfigurationError(
                f"layout needs {self.total_width} qubits, cap is {self.max_width}"
            )

    @property
    def widths(self) -> dict[str, int]:
        return {
            "index": self.index_width,
            "value": self.value_width,
            "ancilla": 1 if self.ancilla_count >= 1 else 0,
            "extra": 1 if self.ancilla_count == 2 else 0,
            "phase": self.phase_width,
        }

    @property
    def total_width(self) -> int:
        return self.index_width + self.value_width + self.ancilla_count + self.phase_width

    @property
    def dim(self) -> int:
        return 1 << self.total_width

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(1 << w for w in self.widths.values())

    @property
    def positions(self) -> dict[str, tuple[int, ...]]:
        """Qubit positions of every register, least significant first."""
        out = {}
        offset = 0
        for name in reversed(REGISTER_ORDER):
            w = self.widths[name]
            out[name] = tuple(range(offset, offset + w))
            offset += w
        return {name: out[name] for name in REGISTER_ORDER}

    def axis(self, register: str) -> int:
        if register not in REGISTER_ORDER:
            raise ConfigurationError(f"unknown register {register!r}")
        return REGISTER_ORDER.index(register)

    def width(self, register: str) -> int:
        self.axis(register)
        return self.widths[register]

    def basis_index(self, **values: int) -> int:
        """Flat basis index for the given per-register contents (others zero)."""
        idx = 0
        for name, v in values.items():
            w = self.width(name)
            if not 0 <= v < (1 << w):
                raise ConfigurationError(f"value {v} does not fit register {name!r}")
            idx |= v << self.positions[name][0] if w else 0
        return idx


@dataclass
class StateVector:
    layout: RegisterLayout
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.layout.dim,):
            raise ConfigurationError(
                f"expected {self.layout.dim} amplitudes, got {self.amplitudes.shape}"
            )

    @classmethod
    def from_tensor(cls, layout: RegisterLayout, tensor: np.ndarray) -> "StateVector":
        return cls(layout, np.asarray(tensor, dtype=np.complex128).reshape(layout.dim))

    def tensor(self) -> np.ndarray:
        """View of the amplitudes with one axis per register."""
        return self.amplitudes.reshape(self.layout.shape)

    def copy(self) -> "StateVector":
        return StateVector(self.layout, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def distance(self, other: "StateVector") -> float:
        _check_same_layout(self, other)
        return float(np.linalg.norm(self.amplitudes - other.amplitudes))

    def register_probabilities(self, register: str) -> np.ndarray:
        t = np.abs(self.tensor()) ** 2
        ax = self.layout.axis(register)
        other = tuple(i for i in range(t.ndim) if i != ax)
        return t.sum(axis=other)


def _check_same_layout(a: StateVector, b: StateVector) -> None:
    if a.layout.widths != b.layout.widths:
        raise ConfigurationError("states have different register layouts")


# --- gates -----------------------------------------------------------------

H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def ry(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz(angle: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


@dataclass(frozen=True)
class GateSpec:
    """A single-qubit gate with optional (qubit, required_bit) controls.

    ``kind`` is one of "H", "X", "Z", "Ry", "Rz" or "custom"; rotations take
    ``angle`` in radians and custom gates take ``matrix``.
    """

    kind: str
    target: int
    controls: tuple[tuple[int, int], ...] = ()
    angle: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    def unitary(self) -> np.ndarray:
        if self.kind == "H":
            return H
        if self.kind == "X":
            return X
        if self.kind == "Z":
            return Z
        if self.kind in ("Ry", "Rz"):
            if self.angle is None:
                raise ConfigurationError(f"{self.kind} needs an angle")
            return ry(self.angle) if self.kind == "Ry" else rz(self.angle)
        if self.kind == "custom":
            u = np.asarray(self.matrix, dtype=np.complex128)
            if u.shape != (2, 2) or not np.allclose(
                u.conj().T @ u, np.eye(2), atol=UNITARY_TOL, rtol=0
            ):
                raise ConfigurationError("custom gate matrix is not a 2x2 unitary")
            return u
        raise ConfigurationError(f"unknown gate kind {self.kind!r}")


def _apply_1q_inplace(bits: np.ndarray, axis: int, u: np.ndarray, index=None) -> None:
    """Apply ``u`` along ``axis`` of a [2]*W tensor, restricted by ``index``."""
    view = bits if index is None else bits[index]
    moved = np.moveaxis(view, axis, 0)
    a0 = moved[0].copy()
    a1 = moved[1].copy()
    moved[0] = u[0, 0] * a0 + u[0, 1] * a1
    moved[1] = u[1, 0] * a0 + u[1, 1] * a1


def apply_gate(state: StateVector, gate: GateSpec) -> StateVector:
    width = state.layout.total_width
    qubits = [gate.target] + [c for c, _ in gate.controls]
    if any(not 0 <= q < width for q in qubits):
        raise ConfigurationError("gate acts on a qubit outside the layout")
    if len(set(qubits)) != len(qubits):
        raise ConfigurationError("gate target and controls must be distinct")
    u = gate.unitary()

    out = state.amplitudes.copy()
    bits = out.reshape([2] * width)
    index = [slice(None)] * width
    for q, bit in gate.controls:
        index[width - 1 - q] = int(bit)
    # integer indexing drops control axes, shifting the target axis left
    t_axis = width - 1 - gate.target
    t_axis -= sum(1 for q, _ in gate.controls if width - 1 - q < t_axis)
    _apply_1q_inplace(bits, t_axis, u, tuple(index) if gate.controls else None)
    return StateVector(state.layout, out)


def apply_register_1q(state: StateVector, register: str, u: np.ndarray) -> StateVector:
    """Apply the same single-qubit unitary to every qubit of a register."""
    width = state.layout.total_width
    out = state.amplitudes.copy()
    if width == 0:
        return StateVector(state.layout, out)
    bits = out.reshape([2] * width)
    for q in state.layout.positions[register]:
        _apply_1q_inplace(bits, width - 1 - q, u)
    return StateVector(state.layout, out)


def _control_index(layout: RegisterLayout, controls: Mapping[str, int] | None) -> tuple:
    index = [slice(None)] * len(REGISTER_ORDER)
    for name, v in (controls or {}).items():
        if not 0 <= v < (1 << layout.width(name)):
            raise ConfigurationError(f"control value {v} out of range for {name!r}")
        # keep the axis so later axis numbers stay valid
        index[layout.axis(name)] = slice(v, v + 1)
    return tuple(index)


# --- register-level operations --------------------------------------------

def new_basis_state(layout: RegisterLayout, bitstring: int = 0) -> StateVector:
    if not 0 <= bitstring < layout.dim:
        raise ConfigurationError(
            f"basis index {bitstring} out of range for {layout.total_width} qubits"
        )
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[bitstring] = 1.0
    return StateVector(layout, amps)


def hadamard_register(state: StateVector, register: str) -> StateVector:
    state.layout.axis(register)
    return apply_register_1q(state, register, H)


def qft_register(
    state: StateVector,
    register: str,
    direction: str = "forward",
    controls: Mapping[str, int] | None = None,
) -> StateVector:
    """Dense QFT on one register.

    Forward maps |j> to M^{-1/2} sum_k exp(+2 pi i jk/M)|k>, so the all-ones
    input picks up phases exp(-2 pi i k/M). ``controls`` restricts the
    transform to the slice where the named registers hold the given values.
    """
    if direction not in ("forward", "inverse"):
        raise ConfigurationError(f"direction must be forward or inverse, got {direction!r}")
    layout = state.layout
    ax = layout.axis(register)
    out = state.amplitudes.copy()
    t = out.reshape(layout.shape)
    idx = _control_index(layout, controls)
    transform = np.fft.ifft if direction == "forward" else np.fft.fft
    t[idx] = transform(t[idx], axis=ax, norm="ortho")
    return StateVector(layout, out)


def reflect_zero(state: StateVector, registers: Iterable[str]) -> StateVector:
    """I - 2|0><0| on the named registers (identity elsewhere)."""
    layout = state.layout
    out = state.amplitudes.copy()
    t = out.reshape(layout.shape)
    t[_control_index(layout, {r: 0 for r in registers})] *= -1
    return StateVector(layout, out)


def apply_value_conditioned(
    state: StateVector,
    control: str,
    target: str,
    matrices: np.ndarray,
) -> StateVector:
    """Apply ``matrices[v]`` (2x2) to the single-qubit ``target`` register on
    every branch where the ``control`` register holds ``v``."""
    layout = state.layout
    if layout.width(target) != 1:
        raise ConfigurationError(f"target register {target!r} must be one qubit")
    matrices = np.asarray(matrices, dtype=np.complex128)
    if matrices.shape != (1 << layout.width(control), 2, 2):
        raise ConfigurationError("need one 2x2 matrix per control-register value")
    t = np.moveaxis(state.tensor(), (layout.axis(control), layout.axis(target)), (0, 1))
    out = np.einsum("vab,vb...->va...", matrices, t)
    out = np.moveaxis(out, (0, 1), (layout.axis(control), layout.axis(target)))
    return StateVector.from_tensor(layout, out)


def postselect_many(
    state: StateVector, outcomes: Mapping[str, int]
) -> tuple[float, StateVector]:
    layout = state.layout
    idx = _control_index(layout, outcomes)
    t = state.tensor()
    kept = np.zeros_like(t)
    kept[idx] = t[idx]
    prob = float(np.vdot(kept, kept).real)
    if prob < ZERO_PROBABILITY:
        raise PostselectionError(
            f"post-selection on {dict(outcomes)} has probability {prob:.3e}"
        )
    return prob, StateVector.from_tensor(layout, kept / np.sqrt(prob))


def postselect(state: StateVector, register: str, outcome: int) -> tuple[float, StateVector]:
    return postselect_many(state, {register: outcome})


def register_amplitudes(
    state: StateVector, register: str, fixed: Mapping[str, int] | None = None
) -> np.ndarray:
    """Amplitudes along ``register`` with every other register pinned.

    Registers not listed in ``fixed`` are pinned to zero.
    """
    layout = state.layout
    pins = {r: 0 for r in REGISTER_ORDER if r != register}
    pins.update(fixed or {})
    idx = tuple(
        slice(None) if r == register else pins[r] for r in REGISTER_ORDER
    )
    return state.tensor()[idx].copy()


def fidelity_mod_phase(a: StateVector | np.ndarray, b: StateVector | np.ndarray) -> float:
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        _check_same_layout(a, b)
    va = a.amplitudes if isinstance(a, StateVector) else np.asarray(a)
    vb = b.amplitudes if isinstance(b, StateVector) else np.asarray(b)
    if va.shape != vb.shape:
        raise ConfigurationError("fidelity needs vectors of equal dimension")
    return float(min(1.0, abs(np.vdot(va, vb)) ** 2))


def subspace_residual(state: StateVector, basis: Sequence[StateVector]) -> float:
    """Norm of the part of ``state`` outside span(basis)."""
    for b in basis:
        _check_same_layout(state, b)
    if not basis:
        return state.norm()
    mat = np.stack([b.amplitudes for b in basis])
    gram = mat.conj() @ mat.T
    if not np.allclose(gram, np.eye(len(basis)), atol=1e-10, rtol=0):
        raise ConfigurationError("subspace basis is not orthonormal")
    coeffs = mat.conj() @ state.amplitudes
    return float(np.linalg.norm(state.amplitudes - coeffs @ mat))
