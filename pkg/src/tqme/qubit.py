"""Statevector simulation of the qubit version of the protocol.

Two 2n-qubit registers are each prepared in sum_i |i>|i> / sqrt(2^n); W acts on
the first n qubits of the top register and V on the first n of the bottom one.
A destructive SWAP test (CNOT top_i -> bottom_i, then H on top_i) is measured
and each shot is classified by the parity of ``top AND bottom``.

Basis ordering: qubit 0 is the least significant bit of the amplitude index.
An n-qubit matrix acting on ``qubits = (q0, ..., q_{n-1})`` uses the same
little-endian convention (q0 is its least significant bit). Bit strings in
histograms are printed most-significant qubit first.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import CircuitError, DimensionError, MitigationError, ResourceGuardError, ValidationError
from .linalg import GENERATED_TOL, as_rng, check_unitary
from .sampling import FidelityEstimate, estimate_from_counts

MAX_MODULE_QUBITS = 6

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
# two-qubit matrix on (control, target), control as least significant bit
_CNOT = np.eye(4, dtype=complex)[[0, 3, 2, 1]]


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


class Shot(enum.Enum):
    BUNCHING = "bunching"
    ANTIBUNCHING = "antibunching"


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple
    angle: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    def unitary(self) -> np.ndarray:
        if self.name == "h":
            return _H
        if self.name == "cnot":
            return _CNOT
        if self.name == "rx":
            return rx(self.angle)
        if self.name == "ry":
            return ry(self.angle)
        if self.name == "unitary":
            return self.matrix
        raise CircuitError(f"unknown gate {self.name!r}")

    def to_json(self) -> dict:
        out = {"gate": self.name, "qubits": list(self.qubits)}
        if self.angle is not None:
            out["angle"] = self.angle
        if self.matrix is not None:
            out["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]
        return out


@dataclass
class Circuit:
    n_qubits: int
    gates: list = field(default_factory=list)

    def _add(self, gate: Gate) -> "Circuit":
        if len(set(gate.qubits)) != len(gate.qubits):
            raise CircuitError(f"repeated qubit in {gate.name} {gate.qubits}")
        for q in gate.qubits:
            if not 0 <= q < self.n_qubits:
                raise CircuitError(f"qubit {q} out of range for {self.n_qubits} qubits")
        if gate.angle is not None and not np.isfinite(gate.angle):
            raise CircuitError("rotation angle must be finite")
        self.gates.append(gate)
        return self

    def h(self, q):
        return self._add(Gate("h", (q,)))

    def cnot(self, control, target):
        return self._add(Gate("cnot", (control, target)))

    def rx(self, q, theta):
        return self._add(Gate("rx", (q,), float(theta)))

    def ry(self, q, theta):
        return self._add(Gate("ry", (q,), float(theta)))

    def unitary(self, qubits, matrix, tol: float = GENERATED_TOL):
        qubits = tuple(qubits)
        matrix = check_unitary(matrix, tol)
        if matrix.shape[0] != 2 ** len(qubits):
            raise CircuitError(f"{matrix.shape[0]}x{matrix.shape[0]} matrix on {len(qubits)} qubits")
        return self._add(Gate("unitary", qubits, matrix=matrix))

    def to_json(self) -> dict:
        return {"n_qubits": self.n_qubits, "gates": [g.to_json() for g in self.gates]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def zero_state(n_qubits: int) -> np.ndarray:
    state = np.zeros(2**n_qubits, dtype=complex)
    state[0] = 1.0
    return state


def apply_gate(state: np.ndarray, matrix: np.ndarray, qubits, n_qubits: int) -> np.ndarray:
    k = len(qubits)
    psi = state.reshape((2,) * n_qubits)
    # tensor axis of qubit q is n-1-q; gate tensor axes run most significant first
    targets = [n_qubits - 1 - q for q in reversed(qubits)]
    g = matrix.reshape((2,) * (2 * k))
    psi = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), targets))
    psi = np.moveaxis(psi, list(range(k)), targets)
    return psi.reshape(-1)


def run_circuit(circuit: Circuit, state: np.ndarray | None = None) -> np.ndarray:
    if state is None:
        state = zero_state(circuit.n_qubits)
    state = np.asarray(state, dtype=complex)
    if state.size != 2**circuit.n_qubits:
        raise CircuitError(f"state has {state.size} amplitudes, circuit needs {2 ** circuit.n_qubits}")
    for gate in circuit.gates:
        state = apply_gate(state, gate.unitary(), gate.qubits, circuit.n_qubits)
    return state


def _guard(n):
    if n < 1:
        raise DimensionError("n must be >= 1")
    if n > MAX_MODULE_QUBITS:
        raise ResourceGuardError(
            f"n = {n} needs 2^{4 * n} amplitudes; limit is n <= {MAX_MODULE_QUBITS}")


def _entangle(circuit: Circuit, register):
    n = len(register) // 2
    for k in range(n):
        circuit.h(register[k])
        circuit.cnot(register[k], register[n + k])


def prepare_max_entangled(n: int) -> np.ndarray:
    """(1/sqrt(2^n)) sum_i |i>|i> on 2n qubits (first register = qubits 0..n-1)."""
    _guard(n)
    c = Circuit(2 * n)
    _entangle(c, list(range(2 * n)))
    return run_circuit(c)


def default_layout(n: int) -> tuple[list, list]:
    return list(range(2 * n)), list(range(2 * n, 4 * n))


def tqme_qubit_circuit(n: int, w, v, layout=None, tol: float = GENERATED_TOL) -> Circuit:
    """Full 4n-qubit circuit: preparation, modules, destructive SWAP test.

    ``layout`` optionally maps the logical (top, bottom) registers to physical
    qubit lists; the measured statistics do not depend on it.
    """
    _guard(n)
    w = check_unitary(w, tol)
    v = check_unitary(v, tol)
    if w.shape != (2**n, 2**n) or v.shape != (2**n, 2**n):
        raise CircuitError(f"modules must be {2 ** n}x{2 ** n}, got {w.shape} and {v.shape}")
    top, bottom = layout if layout is not None else default_layout(n)
    c = Circuit(4 * n)
    _entangle(c, top)
    _entangle(c, bottom)
    c.unitary(top[:n], w, tol)
    c.unitary(bottom[:n], v, tol)
    for t, b in zip(top, bottom):
        c.cnot(t, b)
        c.h(t)
    return c


@dataclass(frozen=True)
class ShotRecord:
    bits_top: str
    bits_bottom: str


def classify_shot(record: ShotRecord) -> Shot:
    if len(record.bits_top) != len(record.bits_bottom):
        raise ValidationError("bit strings differ in length")
    ones = sum(a == "1" and b == "1" for a, b in zip(record.bits_top, record.bits_bottom))
    return Shot.BUNCHING if ones % 2 == 0 else Shot.ANTIBUNCHING


def _register_bits(indices: np.ndarray, register) -> np.ndarray:
    out = np.zeros_like(indices)
    for pos, q in enumerate(register):
        out |= ((indices >> q) & 1) << pos
    return out


def bunching_mask(n: int, layout=None) -> np.ndarray:
    """Boolean mask over all 2^(4n) outcomes: True where AND-parity is even."""
    top, bottom = layout if layout is not None else default_layout(n)
    idx = np.arange(2 ** (4 * n), dtype=np.int64)
    both = _register_bits(idx, top) & _register_bits(idx, bottom)
    return (np.bitwise_count(both) & 1) == 0


def shot_record(index: int, n: int, layout=None) -> ShotRecord:
    top, bottom = layout if layout is not None else default_layout(n)
    idx = np.array([index], dtype=np.int64)
    width = 2 * n
    t = int(_register_bits(idx, top)[0])
    b = int(_register_bits(idx, bottom)[0])
    return ShotRecord(format(t, f"0{width}b"), format(b, f"0{width}b"))


def outcome_probabilities(n: int, w, v, layout=None, tol: float = GENERATED_TOL) -> np.ndarray:
    state = run_circuit(tqme_qubit_circuit(n, w, v, layout, tol))
    return np.abs(state) ** 2


def exact_bunching(n: int, w, v, layout=None, tol: float = GENERATED_TOL) -> float:
    probs = outcome_probabilities(n, w, v, layout, tol)
    return float(probs[bunching_mask(n, layout)].sum())


@dataclass(frozen=True)
class ConfusionModel:
    """Independent per-qubit readout flips: p01 = P(read 1 | 0), p10 = P(read 0 | 1)."""

    p01: tuple
    p10: tuple

    def __post_init__(self):
        if len(self.p01) != len(self.p10):
            raise ValidationError("p01 and p10 must cover the same qubits")
        for p in (*self.p01, *self.p10):
            if not 0.0 <= p < 0.5:
                raise ValidationError(f"readout error {p} outside [0, 0.5)")

    @classmethod
    def uniform(cls, n_qubits: int, p01: float, p10: float) -> "ConfusionModel":
        return cls((p01,) * n_qubits, (p10,) * n_qubits)

    @property
    def n_qubits(self) -> int:
        return len(self.p01)

    def matrix(self, q: int) -> np.ndarray:
        """Columns are true values, rows measured values."""
        a, b = self.p01[q], self.p10[q]
        return np.array([[1 - a, b], [a, 1 - b]])

    def apply_exact(self, probs) -> np.ndarray:
        """Push a true distribution through the readout channel."""
        return _per_qubit(np.asarray(probs, dtype=float), [self.matrix(q) for q in range(self.n_qubits)])


def _per_qubit(vec: np.ndarray, mats) -> np.ndarray:
    n = len(mats)
    t = vec.reshape((2,) * n)
    for q, m in enumerate(mats):
        axis = n - 1 - q
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)


def apply_readout_noise(indices: np.ndarray, model: ConfusionModel, rng) -> np.ndarray:
    gen = as_rng(rng)
    out = indices.copy()
    for q in range(model.n_qubits):
        bit = (out >> q) & 1
        p_flip = np.where(bit == 1, model.p10[q], model.p01[q])
        flip = gen.random(out.size) < p_flip
        out ^= flip.astype(out.dtype) << q
    return out


def histogram_to_dict(counts: np.ndarray, n_qubits: int) -> dict:
    return {format(i, f"0{n_qubits}b"): (int(c) if float(c).is_integer() else float(c))
            for i, c in enumerate(counts) if c}


def histogram_from_dict(counts: dict, n_qubits: int) -> np.ndarray:
    vec = np.zeros(2**n_qubits)
    for key, c in counts.items():
        if len(key) != n_qubits:
            raise ValidationError(f"bit string {key!r} is not {n_qubits} bits")
        vec[int(key, 2)] += c
    return vec


def unfold_readout(counts, model: ConfusionModel):
    """Invert the tensor-product confusion matrix, clip negatives, restore the total.

    Accepts a dense histogram array or a ``{bitstring: count}`` dict and
    returns the same kind.
    """
    as_dict = isinstance(counts, dict)
    vec = histogram_from_dict(counts, model.n_qubits) if as_dict else np.asarray(counts, dtype=float)
    if vec.size != 2**model.n_qubits:
        raise ValidationError(f"histogram has {vec.size} bins, model covers {model.n_qubits} qubits")
    if np.any(vec < 0):
        raise ValidationError("counts must be non-negative")
    total = vec.sum()
    inverses = []
    for q in range(model.n_qubits):
        m = model.matrix(q)
        if abs(np.linalg.det(m)) < 1e-12:
            raise MitigationError(f"confusion matrix of qubit {q} is singular")
        inverses.append(np.linalg.inv(m))
    out = np.clip(_per_qubit(vec, inverses), 0.0, None)
    if out.sum() > 0:
        out *= total / out.sum()
    return histogram_to_dict(out, model.n_qubits) if as_dict else out


def sample_outcomes(probs: np.ndarray, shots: int, rng) -> np.ndarray:
    p = probs / probs.sum()
    return as_rng(rng).choice(p.size, size=shots, p=p)


def run_protocol(n: int, w, v, shots: int, rng, noise: ConfusionModel | None = None,
                 mitigate: bool = False, confidence: float = 0.95, seed: int | None = None,
                 tol: float = GENERATED_TOL) -> FidelityEstimate:
    """Sampled protocol run; returns the gate-fidelity estimate for d = 2^n."""
    if shots < 1:
        raise ValidationError("shots must be >= 1")
    counts = sample_histogram(n, w, v, shots, rng, noise, tol)
    if mitigate:
        if noise is None:
            raise ValidationError("mitigation requested without a confusion model")
        counts = unfold_readout(counts, noise)
    n_bunch = float(counts[bunching_mask(n)].sum())
    return estimate_from_counts(n_bunch, float(counts.sum()), 2**n, confidence, seed)


def sample_histogram(n: int, w, v, shots: int, rng, noise: ConfusionModel | None = None,
                     tol: float = GENERATED_TOL) -> np.ndarray:
    probs = outcome_probabilities(n, w, v, tol=tol)
    gen = as_rng(rng)
    idx = sample_outcomes(probs, shots, gen)
    if noise is not None:
        if noise.n_qubits != 4 * n:
            raise ValidationError(f"confusion model covers {noise.n_qubits} qubits, circuit has {4 * n}")
        idx = apply_readout_noise(idx, noise, gen)
    return np.bincount(idx, minlength=probs.size).astype(float)
