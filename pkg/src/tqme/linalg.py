"""Numerical substrate: unitarity checks, Haar sampling, overlaps, seeded streams
and the shared unitary JSON format.

Matrices and states are plain ``complex128`` numpy arrays. A state vector is
indexed row-major, so a matrix flattened with ``ravel()`` is already laid out
as ``row * ncols + col``.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
from scipy.linalg import polar

from .errors import DimensionError, ValidationError

# 4-decimal transcriptions of published matrices are only unitary to ~1e-4
GENERATED_TOL = 1e-10
TABLE_TOL = 5e-3


class RandomStream:
    """Seeded, splittable random stream.

    ``child(label)`` derives an independent stream from a stable text label,
    so the set of draws a component sees depends only on the root seed and
    the label, never on how work is scheduled.
    """

    def __init__(self, seed: int, _key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self._key = tuple(_key)
        ss = np.random.SeedSequence(entropy=self.seed & (2**64 - 1), spawn_key=self._key)
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def child(self, label) -> "RandomStream":
        digest = hashlib.sha256(str(label).encode()).digest()
        return RandomStream(self.seed, self._key + (int.from_bytes(digest[:4], "little"),))

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, key={self._key})"


def as_rng(rng) -> np.random.Generator:
    """Accept a RandomStream, a numpy Generator or an int seed."""
    if isinstance(rng, RandomStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    return RandomStream(rng).generator


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    return m


def unitarity_error(m) -> float:
    """Max-norm of ``M^dagger M - I``."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix is not square: {m.shape}")
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def is_unitary(m, tol: float = GENERATED_TOL) -> bool:
    return unitarity_error(m) <= tol


def check_unitary(m, tol: float = GENERATED_TOL) -> np.ndarray:
    m = as_matrix(m)
    err = unitarity_error(m)
    if err > tol:
        raise ValidationError(f"matrix is not unitary: |U^dag U - I|_max = {err:.3g} > {tol:g}")
    return m


def project_unitary(m) -> np.ndarray:
    """Nearest unitary in Frobenius norm (unitary factor of the polar decomposition)."""
    u, _ = polar(as_matrix(m))
    return u


def haar_random_unitary(d: int, rng, size: int | None = None) -> np.ndarray:
    """Haar-distributed ``d x d`` unitary (or a stack of ``size`` of them).

    QR of a complex Ginibre matrix, with the columns of Q rephased by the
    phases of diag(R) so that the decomposition is unique.
    """
    if d < 1:
        raise DimensionError("dimension must be >= 1")
    gen = as_rng(rng)
    shape = (d, d) if size is None else (size, d, d)
    z = (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[..., None, :]


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


def check_state(v, tol: float = 1e-10) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"state must be a non-empty vector, got shape {v.shape}")
    if abs(np.vdot(v, v).real - 1.0) > tol:
        raise ValidationError("state is not normalized")
    return v


def inner_product(psi, phi) -> complex:
    """<psi|phi>, conjugate-linear in ``psi``."""
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    if psi.shape != phi.shape:
        raise DimensionError(f"dimension mismatch: {psi.shape} vs {phi.shape}")
    return complex(np.vdot(psi, phi))


# -- unitary JSON format: {"dim": d, "matrix": [[[re, im], ...], ...]} --

def unitary_to_json(u) -> dict:
    u = as_matrix(u)
    return {
        "dim": int(u.shape[0]),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in u],
    }


def unitary_from_json(obj, tol: float = GENERATED_TOL, project: bool = False) -> np.ndarray:
    try:
        d = int(obj["dim"])
        raw = np.asarray(obj["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed unitary JSON: {exc}") from exc
    if raw.shape != (d, d, 2):
        raise ValidationError(f"matrix shape {raw.shape[:-1]} does not match dim {d}")
    u = as_matrix(raw[..., 0] + 1j * raw[..., 1])
    if project:
        return project_unitary(u)
    return check_unitary(u, tol)


def load_unitary(path, tol: float = GENERATED_TOL, project: bool = False) -> np.ndarray:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from exc
    return unitary_from_json(obj, tol=tol, project=project)


def save_unitary(path, u) -> None:
    Path(path).write_text(json.dumps(unitary_to_json(u)) + "\n")
