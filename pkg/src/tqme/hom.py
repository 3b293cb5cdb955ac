"""Two-photon interference over the path/time-bin beamsplitter network.

Optical modes are labelled (rail, path, time) with flat index
``rail * d**2 + path * d + time``; rail A carries photon a (module W), rail B
photon b (module V). A two-photon state is a symmetric matrix ``M`` with

    |Psi> = sum_jk M[j, k] c_j^dag c_k^dag |0>

so a linear-optical network ``T`` (c_j^dag -> sum_l T[l, j] c_l^dag) acts as
``M -> T M T^T``. Normalization is ``sum_{j<k} |2 M_jk|^2 + sum_j 2 |M_jj|^2 = 1``,
which equals ``2 * ||M||_F^2`` for symmetric M.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .choi import ChoiState, encode_choi
from .errors import DimensionError, ValidationError
from .linalg import GENERATED_TOL

RAIL_A, RAIL_B = 0, 1

BS_SYMMETRIC = np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2)
BS_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_CONVENTIONS = {"symmetric": BS_SYMMETRIC, "hadamard": BS_HADAMARD}


class Outcome(enum.Enum):
    BUNCHING = "bunching"
    ANTIBUNCHING = "antibunching"


class ModeIndex(NamedTuple):
    rail: int
    path: int
    time: int

    def flat(self, d: int) -> int:
        return self.rail * d * d + self.path * d + self.time

    @classmethod
    def from_flat(cls, index: int, d: int) -> "ModeIndex":
        rail, rest = divmod(index, d * d)
        path, time = divmod(rest, d)
        return cls(rail, path, time)


def beamsplitter(convention: str = "symmetric") -> np.ndarray:
    try:
        return _CONVENTIONS[convention]
    except KeyError:
        raise ValidationError(f"unknown beamsplitter convention {convention!r}") from None


def build_hom_network(d: int, convention: str = "symmetric") -> np.ndarray:
    """50:50 beamsplitter between (A, p, t) and (B, p, t) for every path/time pair."""
    if d < 1:
        raise DimensionError("d must be >= 1")
    return np.kron(beamsplitter(convention), np.eye(d * d))


@dataclass(frozen=True)
class TwoPhotonState:
    m: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.m.shape[0]

    def norm_squared(self) -> float:
        return float(2.0 * np.sum(np.abs(self.m) ** 2))


def two_photon_state(m, check: bool = True) -> TwoPhotonState:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"two-photon coefficient matrix must be square, got {m.shape}")
    if not np.array_equal(m, m.T):
        raise ValidationError("two-photon coefficient matrix must be symmetric")
    state = TwoPhotonState(m)
    if check and abs(state.norm_squared() - 1.0) > 1e-10:
        raise ValidationError(f"two-photon state not normalized (norm^2 = {state.norm_squared():.12g})")
    return state


def photon_pair(a, b) -> TwoPhotonState:
    """One photon in mode vector ``a`` and one in ``b`` (renormalized)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError(f"mode vectors differ in shape: {a.shape} vs {b.shape}")
    m = (np.outer(a, b) + np.outer(b, a)) / 2
    m = (m + m.T) / 2  # bitwise symmetry; the two outer products round differently
    state = TwoPhotonState(m)
    return two_photon_state(m / np.sqrt(state.norm_squared()))


def fock_state(n_modes: int, amplitudes: dict) -> TwoPhotonState:
    """Build a state from Fock-basis amplitudes.

    Keys are mode pairs ``(j, k)``: ``j != k`` means ``|1_j 1_k>``, ``j == k``
    means ``|2_j>``. Amplitudes are taken as given (not renormalized).
    """
    m = np.zeros((n_modes, n_modes), dtype=complex)
    for (j, k), amp in amplitudes.items():
        if j == k:
            m[j, j] += amp / np.sqrt(2)
        else:
            m[j, k] += amp / 2
            m[k, j] += amp / 2
    return two_photon_state(m)


def embed(chi: ChoiState, rail: int) -> np.ndarray:
    d2 = chi.d * chi.d
    v = np.zeros(2 * d2, dtype=complex)
    v[rail * d2:(rail + 1) * d2] = chi.amplitudes
    return v


def product_input(chi_a: ChoiState, chi_b: ChoiState) -> TwoPhotonState:
    if chi_a.d != chi_b.d:
        raise DimensionError(f"Choi states differ in dimension: {chi_a.d} vs {chi_b.d}")
    return photon_pair(embed(chi_a, RAIL_A), embed(chi_b, RAIL_B))


def evolve(t, state: TwoPhotonState) -> TwoPhotonState:
    t = np.asarray(t, dtype=complex)
    if t.shape != (state.n_modes, state.n_modes):
        raise DimensionError(f"network acts on {t.shape[0]} modes, state has {state.n_modes}")
    m = t @ state.m @ t.T
    return TwoPhotonState((m + m.T) / 2)


class OutcomeDistribution:
    """Detection probabilities keyed by unordered mode pairs ``j <= k``.

    Stored as a dense upper-triangular matrix; ``probs[j, j]`` is the
    probability that both photons land in mode ``j``.
    """

    def __init__(self, probs, d: int):
        self.probs = np.asarray(probs, dtype=float)
        self.d = d
        self._rows, self._cols = np.triu_indices(self.probs.shape[0])

    @property
    def n_modes(self) -> int:
        return self.probs.shape[0]

    def probability(self, j: int, k: int) -> float:
        j, k = min(j, k), max(j, k)
        return float(self.probs[j, k])

    def total(self) -> float:
        return float(self.probs.sum())

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        return self._rows, self._cols

    def flat_probabilities(self) -> np.ndarray:
        return self.probs[self._rows, self._cols]

    def bunching_mask(self) -> np.ndarray:
        d2 = self.d * self.d
        return (self._rows // d2) == (self._cols // d2)

    def bunching_mass(self) -> float:
        return float(self.flat_probabilities()[self.bunching_mask()].sum())

    def items(self):
        for j, k, p in zip(self._rows, self._cols, self.flat_probabilities()):
            if p > 0:
                yield (ModeIndex.from_flat(int(j), self.d), ModeIndex.from_flat(int(k), self.d)), float(p)


def outcome_distribution(state: TwoPhotonState, d: int | None = None) -> OutcomeDistribution:
    """Ideal photon-number-resolving detection in every mode."""
    if abs(state.norm_squared() - 1.0) > 1e-9:
        raise ValidationError(f"state not normalized (norm^2 = {state.norm_squared():.12g})")
    if d is None:
        d = int(round(np.sqrt(state.n_modes / 2)))
        if 2 * d * d != state.n_modes:
            raise DimensionError(f"{state.n_modes} modes is not a 2*d^2 network")
    p = np.triu(4.0 * np.abs(state.m) ** 2, k=1)
    p[np.diag_indices_from(p)] = 2.0 * np.abs(np.diagonal(state.m)) ** 2
    return OutcomeDistribution(p, d)


def classify(j: ModeIndex, k: ModeIndex) -> Outcome:
    """Same rail is bunching; time bins are not resolved by the detectors."""
    return Outcome.BUNCHING if j.rail == k.rail else Outcome.ANTIBUNCHING


def detector_label(mode: ModeIndex, d: int) -> str:
    """D1..D(2d): rail A paths first, then rail B."""
    return f"D{mode.rail * d + mode.path + 1}"


def bunching_probability(w, v, convention: str = "symmetric", tol: float = GENERATED_TOL) -> float:
    """Event-level bunching probability for modules ``w`` (photon a) and ``v`` (photon b)."""
    dist = hom_distribution(w, v, convention, tol)
    return dist.bunching_mass()


def hom_distribution(w, v, convention: str = "symmetric", tol: float = GENERATED_TOL) -> OutcomeDistribution:
    chi_w = encode_choi(w, tol)
    chi_v = encode_choi(v, tol)
    state = product_input(chi_w, chi_v)
    out = evolve(build_hom_network(chi_w.d, convention), state)
    return outcome_distribution(out, chi_w.d)
