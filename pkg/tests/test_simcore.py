import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ampprep.errors import ConfigurationError, PostselectionError
from ampprep.simcore import (
    GateSpec, RegisterLayout, StateVector, apply_gate, fidelity_mod_phase,
    hadamard_register, new_basis_state, postselect, qft_register, reflect_zero,
    subspace_residual,
)
from conftest import random_state

S2 = 1 / np.sqrt(2)


def one_register(width, name="index"):
    """Layout with a single populated register."""
    kw = {"index": dict(index_width=width, ancilla_count=0),
          "value": dict(index_width=0, value_width=width, ancilla_count=0)}[name]
    return RegisterLayout(**kw)


def test_basis_state_definition():
    s = new_basis_state(RegisterLayout(1, 1, 1), 0)
    assert s.amplitudes[0] == 1 and np.count_nonzero(s.amplitudes) == 1
    s = new_basis_state(RegisterLayout(2, 0, 0), 3)
    assert s.amplitudes[3] == 1


def test_basis_state_out_of_range():
    with pytest.raises(ConfigurationError):
        new_basis_state(RegisterLayout(1, 2, 1), 2**4)


def test_width_cap():
    with pytest.raises(ConfigurationError):
        RegisterLayout(20, 6, 1)
    assert RegisterLayout(20, 6, 1, max_width=27).total_width == 27


def test_positions_partition_qubits():
    layout = RegisterLayout(3, 2, 2, phase_width=4)
    pos = [p for qs in layout.positions.values() for p in qs]
    assert sorted(pos) == list(range(layout.total_width))
    assert layout.positions["phase"] == (0, 1, 2, 3)
    assert layout.positions["index"] == (8, 9, 10)


def test_basis_index_matches_tensor_axes():
    layout = RegisterLayout(2, 2, 1, phase_width=1)
    s = new_basis_state(layout, layout.basis_index(index=2, value=1, ancilla=1))
    assert s.tensor()[2, 1, 1, 0, 0] == 1


def test_hadamard_on_zero():
    s = apply_gate(new_basis_state(one_register(1)), GateSpec("H", 0))
    np.testing.assert_allclose(s.amplitudes, [S2, S2], atol=1e-15)


@pytest.mark.parametrize("bit, sign", [(0, -1), (1, 1)])
def test_xzx_flips_only_zero(bit, sign):
    s = new_basis_state(one_register(1), bit)
    for kind in "XZX":
        s = apply_gate(s, GateSpec(kind, 0))
    assert s.amplitudes[bit] == pytest.approx(sign)


def test_rz_convention():
    lam = 0.7
    s = apply_gate(new_basis_state(one_register(1)), GateSpec("Rz", 0, angle=lam))
    assert s.amplitudes[0] == pytest.approx(np.exp(-0.5j * lam))


def test_ry_convention():
    s = apply_gate(new_basis_state(one_register(1)), GateSpec("Ry", 0, angle=np.pi / 3))
    np.testing.assert_allclose(s.amplitudes, [np.cos(np.pi / 6), np.sin(np.pi / 6)])


def test_custom_gate_must_be_unitary():
    with pytest.raises(ConfigurationError):
        apply_gate(new_basis_state(one_register(1)),
                   GateSpec("custom", 0, matrix=np.array([[1, 1], [0, 1]])))


def test_gate_qubits_validated():
    s = new_basis_state(one_register(2))
    with pytest.raises(ConfigurationError):
        apply_gate(s, GateSpec("X", 2))
    with pytest.raises(ConfigurationError):
        apply_gate(s, GateSpec("X", 0, controls=((0, 1),)))


def _kron_operator(width, target, controls, u):
    """Full controlled-U matrix built entry by entry (little-endian qubits)."""
    dim = 1 << width
    op = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        if all((col >> q) & 1 == b for q, b in controls):
            t = (col >> target) & 1
            for out_bit in (0, 1):
                row = (col & ~(1 << target)) | (out_bit << target)
                op[row, col] += u[out_bit, t]
        else:
            op[col, col] = 1
    return op


@given(st.integers(2, 5), st.data())
def test_controlled_gate_matches_explicit_matrix(width, data):
    target = data.draw(st.integers(0, width - 1))
    others = [q for q in range(width) if q != target]
    ctrl_qubits = data.draw(st.lists(st.sampled_from(others), unique=True, max_size=2))
    controls = tuple((q, data.draw(st.integers(0, 1))) for q in ctrl_qubits)
    angle = data.draw(st.floats(-np.pi, np.pi))
    gate = GateSpec("Ry", target, controls, angle=angle)
    rng = np.random.default_rng(width)
    psi = random_state(rng, 1 << width)
    layout = one_register(width)
    got = apply_gate(StateVector(layout, psi), gate).amplitudes
    want = _kron_operator(width, target, controls, gate.unitary()) @ psi
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_hadamard_register_examples():
    s = hadamard_register(new_basis_state(one_register(2)), "index")
    np.testing.assert_allclose(s.amplitudes, 0.5, atol=1e-15)
    s = hadamard_register(new_basis_state(one_register(3)), "index")
    np.testing.assert_allclose(s.amplitudes, 1 / np.sqrt(8), atol=1e-15)


def test_hadamard_register_involution(rng):
    layout = RegisterLayout(3, 2, 1)
    s = StateVector(layout, random_state(rng, layout.dim))
    twice = hadamard_register(hadamard_register(s, "index"), "index")
    assert twice.distance(s) <= 1e-12


def test_qft_one_qubit_on_one():
    s = qft_register(new_basis_state(one_register(1, "value"), 1), "value")
    np.testing.assert_allclose(s.amplitudes, [S2, -S2], atol=1e-15)


def test_qft_two_qubits_on_all_ones():
    s = qft_register(new_basis_state(one_register(2, "value"), 3), "value")
    np.testing.assert_allclose(s.amplitudes, 0.5 * np.array([1, -1j, -1, 1j]), atol=1e-15)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_qft_equals_dft_matrix(m):
    size = 1 << m
    j, k = np.meshgrid(np.arange(size), np.arange(size), indexing="xy")
    dft = np.exp(2j * np.pi * j * k / size) / np.sqrt(size)
    layout = one_register(m, "value")
    cols = np.stack([qft_register(new_basis_state(layout, c), "value").amplitudes
                     for c in range(size)], axis=1)
    assert np.max(np.abs(cols - dft)) <= 1e-12
    inv = np.stack([qft_register(new_basis_state(layout, c), "value", "inverse").amplitudes
                    for c in range(size)], axis=1)
    assert np.max(np.abs(inv - dft.conj().T)) <= 1e-12


def test_qft_roundtrip_and_controls(rng):
    layout = RegisterLayout(1, 0, 1, phase_width=4)
    s = StateVector(layout, random_state(rng, layout.dim))
    back = qft_register(qft_register(s, "phase"), "phase", "inverse")
    assert back.distance(s) <= 1e-12
    only1 = qft_register(s, "phase", controls={"ancilla": 1})
    np.testing.assert_array_equal(only1.tensor()[:, :, 0], s.tensor()[:, :, 0])
    assert not np.allclose(only1.tensor()[:, :, 1], s.tensor()[:, :, 1])


def test_reflect_zero_examples():
    layout = one_register(1)
    assert reflect_zero(new_basis_state(layout, 0), ["index"]).amplitudes[0] == -1
    assert reflect_zero(new_basis_state(layout, 1), ["index"]).amplitudes[1] == 1
    s = StateVector(one_register(2), np.full(4, 0.5))
    np.testing.assert_allclose(reflect_zero(s, ["index"]).amplitudes, [-0.5, 0.5, 0.5, 0.5])


def test_reflect_zero_involution(rng):
    layout = RegisterLayout(2, 2, 1)
    s = StateVector(layout, random_state(rng, layout.dim))
    regs = ["index", "ancilla"]
    assert reflect_zero(reflect_zero(s, regs), regs).distance(s) <= 1e-12


def test_postselect_bell():
    layout = RegisterLayout(1, 1, 0)
    s = StateVector(layout, np.array([S2, 0, 0, S2]))
    p, c = postselect(s, "value", 0)
    assert p == pytest.approx(0.5)
    np.testing.assert_allclose(c.amplitudes, [1, 0, 0, 0], atol=1e-15)


def test_postselect_plus_ancilla():
    layout = RegisterLayout(2, 0, 1)
    s = hadamard_register(hadamard_register(new_basis_state(layout), "index"), "ancilla")
    assert postselect(s, "ancilla", 0)[0] == pytest.approx(0.5)


def test_postselect_zero_probability():
    with pytest.raises(PostselectionError):
        postselect(new_basis_state(RegisterLayout(1, 1, 1)), "ancilla", 1)


def test_postselect_probabilities_sum_to_one(rng):
    layout = RegisterLayout(2, 3, 1)
    s = StateVector(layout, random_state(rng, layout.dim))
    total = sum(postselect(s, "value", v)[0] for v in range(8))
    assert abs(total - 1) <= 1e-12


def test_fidelity_examples(rng):
    layout = RegisterLayout(2, 1, 1)
    psi = StateVector(layout, random_state(rng, layout.dim))
    assert fidelity_mod_phase(psi, psi) == pytest.approx(1)
    rotated = StateVector(layout, np.exp(1.3j) * psi.amplitudes)
    assert fidelity_mod_phase(psi, rotated) == pytest.approx(1)
    one = one_register(1)
    assert fidelity_mod_phase(new_basis_state(one, 0), new_basis_state(one, 1)) == 0


@given(st.integers(0, 2**32 - 1), st.floats(-10, 10))
def test_fidelity_symmetric_and_phase_invariant(seed, gamma):
    rng = np.random.default_rng(seed)
    layout = RegisterLayout(3, 0, 1)
    a = StateVector(layout, random_state(rng, layout.dim))
    b = StateVector(layout, random_state(rng, layout.dim))
    f = fidelity_mod_phase(a, b)
    assert abs(f - fidelity_mod_phase(b, a)) <= 1e-12
    b2 = StateVector(layout, np.exp(1j * gamma) * b.amplitudes)
    assert abs(f - fidelity_mod_phase(a, b2)) <= 1e-12


def test_fidelity_layout_mismatch():
    with pytest.raises(ConfigurationError):
        fidelity_mod_phase(new_basis_state(RegisterLayout(1, 0, 1)),
                           new_basis_state(RegisterLayout(0, 1, 1)))


def test_subspace_residual_cases():
    layout = one_register(2)
    b0, b1 = new_basis_state(layout, 0), new_basis_state(layout, 1)
    assert subspace_residual(b0, [b0, b1]) == 0
    assert subspace_residual(new_basis_state(layout, 3), [b0, b1]) == pytest.approx(1)
    with pytest.raises(ConfigurationError):
        subspace_residual(b0, [b0, b0])


@given(st.integers(0, 2**32 - 1))
def test_norm_preserved_by_gate_sequences(seed):
    rng = np.random.default_rng(seed)
    layout = RegisterLayout(2, 2, 1, phase_width=2)
    s = StateVector(layout, random_state(rng, layout.dim))
    for _ in range(6):
        op = rng.integers(4)
        if op == 0:
            s = apply_gate(s, GateSpec("Ry", int(rng.integers(7)), angle=float(rng.normal())))
        elif op == 1:
            s = hadamard_register(s, "value")
        elif op == 2:
            s = qft_register(s, "phase", "forward", {"ancilla": int(rng.integers(2))})
        else:
            s = reflect_zero(s, ["index", "ancilla"])
        assert abs(s.norm() - 1) <= 1e-12
