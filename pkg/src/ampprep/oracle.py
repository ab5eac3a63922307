"""Oracle tables, derived angles, the addition oracle and its query ledger."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ampprep.errors import ConfigurationError
from ampprep.simcore import StateVector


@dataclass(frozen=True)
class OracleTable:
    """Signed m-bit function table f: [0, 2**n) -> values."""

    index_width: int
    value_width: int
    values: tuple[int, ...]

    @property
    def size(self) -> int:
        return 1 << self.index_width

    @property
    def max_abs(self) -> int:
        return max(abs(v) for v in self.values)

    @property
    def limit(self) -> int:
        return (1 << (self.value_width - 1)) - 1 if self.value_width >= 1 else 0

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int64)

    def to_json(self) -> dict:
        return {"n": self.index_width, "m": self.value_width, "values": list(self.values)}


def make_table(n: int, m: int, values) -> OracleTable:
    values = tuple(int(v) for v in values)
    if n < 0 or m < 1:
        raise ConfigurationError(f"need n >= 0 and m >= 1, got n={n}, m={m}")
    if len(values) != 1 << n:
        raise ConfigurationError(f"expected {1 << n} values for n={n}, got {len(values)}")
    limit = (1 << (m - 1)) - 1
    bad = [v for v in values if abs(v) > limit]
    if bad:
        raise ConfigurationError(
            f"values {bad[:4]} exceed the signed {m}-bit range +-{limit}"
        )
    if not any(values):
        raise ConfigurationError("all-zero oracle table has no defined Grover angle")
    return OracleTable(n, m, values)


@dataclass(frozen=True)
class AngleProfile:
    phis: np.ndarray
    theta: float

    @property
    def size(self) -> int:
        return len(self.phis)


def angles(table: OracleTable, scale: float = 1.0) -> AngleProfile:
    """phi_i = scale * pi f_i / (2 max|f|) and the Grover angle they induce."""
    phis = scale * np.pi * table.as_array() / (2 * table.max_abs)
    return AngleProfile(phis, grover_angle(phis))


def grover_angle(phis: np.ndarray) -> float:
    p = float(np.mean(np.sin(phis) ** 2))
    return math.asin(math.sqrt(min(1.0, p)))


def decoded_values(m: int) -> np.ndarray:
    """Two's-complement reading of every m-bit register content."""
    v = np.arange(1 << m, dtype=np.int64)
    return np.where(v >= 1 << (m - 1), v - (1 << m), v) if m else v


def target_amplitudes(table: OracleTable, scale: float = 1.0) -> np.ndarray:
    """Normalized signed vector proportional to sin(scale * phi_i)."""
    s = np.sin(angles(table, scale).phis)
    return s / np.linalg.norm(s)


def target_state(table: OracleTable) -> np.ndarray:
    return target_amplitudes(table)


def arcsin_encode(alphas, m: int) -> OracleTable:
    """Integer table whose sin(phi_i) reproduces ``alphas`` up to scale."""
    alphas = np.asarray(alphas, dtype=float)
    n = int(round(math.log2(len(alphas)))) if len(alphas) else -1
    if n < 0 or 1 << n != len(alphas):
        raise ConfigurationError("number of amplitudes must be a power of two")
    peak = np.max(np.abs(alphas))
    if peak == 0:
        raise ConfigurationError("cannot encode the zero vector")
    if m < 2:
        raise ConfigurationError("arcsin encoding needs m >= 2")
    code_max = (1 << (m - 1)) - 1
    ratio = np.clip(alphas / peak, -1.0, 1.0)
    f = np.floor(2 * code_max / np.pi * np.arcsin(ratio) + 0.5).astype(np.int64)
    return make_table(n, m, f.tolist())


# --- queries ---------------------------------------------------------------

@dataclass
class QueryLedger:
    forward_count: int = 0
    inverse_count: int = 0

    @property
    def total(self) -> int:
        return self.forward_count + self.inverse_count

    def record(self, direction: str) -> None:
        if direction == "forward":
            self.forward_count += 1
        elif direction == "inverse":
            self.inverse_count += 1
        else:
            raise ConfigurationError(f"unknown query direction {direction!r}")


def _add_per_index(
    state: StateVector, target: str, shifts: np.ndarray, controls_sign: str | None = None
) -> StateVector:
    """|x>|y> -> |x>|y + shifts[x] mod 2^w> on the ``target`` register.

    With ``controls_sign`` naming a one-qubit register, the shift is added
    when that register is 1 and subtracted when it is 0.
    """
    layout = state.layout
    w = layout.width(target)
    size = 1 << w
    t = np.moveaxis(state.tensor(), (layout.axis("index"), layout.axis(target)), (0, 1))
    ys = np.arange(size)
    out = np.empty_like(t)
    if controls_sign is None:
        new_y = (ys[None, :] + shifts[:, None]) % size
        out[np.arange(len(shifts))[:, None], new_y] = t
    else:
        # control axis index shifts after moving index/target to the front
        c_axis = layout.axis(controls_sign)
        moved_axes = [a for a in range(len(layout.shape))
                      if a not in (layout.axis("index"), layout.axis(target))]
        ca = 2 + moved_axes.index(c_axis)
        for bit, sign in ((0, -1), (1, 1)):
            sl = [slice(None)] * t.ndim
            sl[ca] = bit
            sl = tuple(sl)
            src = t[sl]
            dst = np.empty_like(src)
            new_y = (ys[None, :] + sign * shifts[:, None]) % size
            dst[np.arange(len(shifts))[:, None], new_y] = src
            out[sl] = dst
    out = np.moveaxis(out, (0, 1), (layout.axis("index"), layout.axis(target)))
    return StateVector.from_tensor(layout, out)


def apply_uf(
    state: StateVector,
    table: OracleTable,
    direction: str,
    ledger: QueryLedger,
    target: str = "value",
) -> StateVector:
    """One oracle query: add (forward) or subtract (inverse) f(x) modulo 2^m."""
    layout = state.layout
    if layout.width(target) != table.value_width:
        raise ConfigurationError(
            f"register {target!r} has width {layout.width(target)}, oracle needs {table.value_width}"
        )
    if layout.index_width != table.index_width:
        raise ConfigurationError("index register width does not match the oracle table")
    sign = {"forward": 1, "inverse": -1}.get(direction)
    if sign is None:
        raise ConfigurationError(f"unknown query direction {direction!r}")
    out = _add_per_index(state, target, sign * table.as_array())
    ledger.record(direction)
    return out


def phase_codes(phis: np.ndarray, scale: float, q: int) -> np.ndarray:
    """Integer codes g with 2 pi g / 2^q ~ scale * 2 phi, reduced mod 2^q."""
    raw = np.floor(scale * np.asarray(phis) * (1 << q) / np.pi + 0.5).astype(np.int64)
    return raw % (1 << q)


def apply_uf_scaled(
    state: StateVector,
    table: OracleTable,
    scale: float,
    q: int,
    direction: str,
    ledger: QueryLedger,
    target: str = "phase",
    sign_control: str | None = None,
) -> StateVector:
    """One oracle query adding the q-bit phase code of scale * 2 phi_i.

    ``sign_control`` selects the controlled add/subtract form: add when the
    named one-qubit register is 1, subtract when it is 0 (still one query).
    """
    if scale <= 0:
        raise ConfigurationError(f"scale must be positive, got {scale}")
    if q < 1:
        raise ConfigurationError("phase register needs at least one qubit")
    if state.layout.width(target) != q:
        raise ConfigurationError(f"register {target!r} must have width {q}")
    sign = {"forward": 1, "inverse": -1}.get(direction)
    if sign is None:
        raise ConfigurationError(f"unknown query direction {direction!r}")
    codes = phase_codes(angles(table).phis, scale, q)
    out = _add_per_index(state, target, sign * codes, controls_sign=sign_control)
    ledger.record(direction)
    return out


# --- table files -----------------------------------------------------------

def min_signed_width(values) -> int:
    peak = max(abs(int(v)) for v in values)
    return max(2, peak.bit_length() + 1)


def load_table(path: str | Path, m: int | None = None) -> OracleTable:
    """Read a table from JSON ({"n", "m", "values"}) or one integer per line.

    For the plain-text form ``m`` defaults to the narrowest signed width that
    holds every value.
    """
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        try:
            return make_table(int(data["n"]), int(data["m"]), data["values"])
        except KeyError as exc:
            raise ConfigurationError(f"oracle JSON missing key {exc}") from None
    try:
        values = [int(line) for line in text.splitlines() if line.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"bad oracle text file: {exc}") from None
    count = len(values)
    if count == 0 or count & (count - 1):
        raise ConfigurationError(f"{count} values is not a power of two")
    return make_table(count.bit_length() - 1, m or min_signed_width(values), values)


def save_table(table: OracleTable, path: str | Path) -> None:
    Path(path).write_text(json.dumps(table.to_json()) + "\n")
