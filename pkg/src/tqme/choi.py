"""Choi-like single-photon encoding of module unitaries and the closed-form
fidelity chain overlap -> Choi fidelity -> bunching probability -> gate fidelity.

A d x d unitary ``U`` is carried by one photon over d paths and d time bins:
the amplitude on ``|j>_path |i>_time`` is ``U[j, i] / sqrt(d)``, i.e. time bin
``i`` holds column ``i`` of the matrix. Flat index is ``j * d + i``.

Note the normalization is ``1/sqrt(d)``. A ``1/d`` prefactor would give a
state of norm ``1/sqrt(d)`` since the squared entries of a unitary sum to d.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, RangeError
from .linalg import GENERATED_TOL, check_unitary, inner_product

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class ChoiState:
    d: int
    amplitudes: np.ndarray

    def amplitude(self, path: int, time: int) -> complex:
        return complex(self.amplitudes[path * self.d + time])


@dataclass(frozen=True)
class FidelityReport:
    overlap: complex
    f_choi: float
    p_bunch: float
    f_gate: float
    d: int

    @property
    def p_antibunch(self) -> float:
        return 1.0 - self.p_bunch

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "overlap": [self.overlap.real, self.overlap.imag],
            "f_choi": self.f_choi,
            "p_bunch": self.p_bunch,
            "p_antibunch": self.p_antibunch,
            "f_gate": self.f_gate,
        }


def encode_choi(u, tol: float = GENERATED_TOL) -> ChoiState:
    u = check_unitary(u, tol)
    d = u.shape[0]
    return ChoiState(d, u.ravel() / np.sqrt(d))


def _pair(w, v, tol):
    w = check_unitary(w, tol)
    v = check_unitary(v, tol)
    if w.shape != v.shape:
        raise DimensionError(f"module dimensions differ: {w.shape[0]} vs {v.shape[0]}")
    return w, v


def choi_overlap(w, v, tol: float = GENERATED_TOL) -> complex:
    """<chi_W|chi_V> = Tr(W^dag V) / d."""
    w, v = _pair(w, v, tol)
    return complex(np.vdot(w, v) / w.shape[0])


def bunching_from_choi_fidelity(f_choi: float) -> float:
    return (1.0 + f_choi) / 2.0


def gate_fidelity(f_choi: float, d: int) -> float:
    """Average gate fidelity from the Choi-state fidelity."""
    return (d * f_choi + 1.0) / (d + 1.0)


def fidelity_from_bunching(p: float, d: int) -> float:
    if not 0.0 <= p <= 1.0:
        raise RangeError(f"bunching probability {p} outside [0, 1]")
    if d < 1:
        raise RangeError("d must be >= 1")
    return (d * (2.0 * p - 1.0) + 1.0) / (d + 1.0)


def fidelity_chain(w, v, tol: float = GENERATED_TOL) -> FidelityReport:
    alpha = choi_overlap(w, v, tol)
    d = np.shape(w)[0]
    # clipping only matters for rounded table data, where |alpha| may exceed 1 by ~1e-4
    f = min(abs(alpha) ** 2, 1.0)
    return FidelityReport(
        overlap=alpha,
        f_choi=f,
        p_bunch=bunching_from_choi_fidelity(f),
        f_gate=gate_fidelity(f, d),
        d=d,
    )


def choi_fidelity_via_states(w, v, tol: float = GENERATED_TOL) -> float:
    """Same quantity as ``fidelity_chain(...).f_choi`` but through the encoded states."""
    a = encode_choi(w, tol)
    b = encode_choi(v, tol)
    if a.d != b.d:
        raise DimensionError(f"module dimensions differ: {a.d} vs {b.d}")
    return abs(inner_product(a.amplitudes, b.amplitudes)) ** 2


def phase_family_a(theta: float) -> np.ndarray:
    """(1/sqrt2) [[1, -e^{i theta}], [1, e^{i theta}]]; equals the Hadamard at theta = pi."""
    e = np.exp(1j * theta)
    return np.array([[1, -e], [1, e]], dtype=complex) / np.sqrt(2)


def phase_family_column(w, theta: float, column: int = 1, tol: float = GENERATED_TOL) -> np.ndarray:
    """Multiply one column of ``w`` by ``e^{i theta}``."""
    w = check_unitary(w, tol)
    if not 0 <= column < w.shape[0]:
        raise DimensionError(f"column {column} out of range for d={w.shape[0]}")
    v = w.copy()
    v[:, column] *= np.exp(1j * theta)
    return v
