"""Programmable module slots as MZI phase settings, and the bundled 21-pair dataset.

A slot is modelled as

    U = e^{i phi_global} D(phi_out) B D(theta) B D(phi_in),
    B = (1/sqrt2) [[1, i], [i, 1]],   D(x) = diag(1, e^{ix})

which covers U(2). Writing s = sin(theta/2), c = cos(theta/2) and
K = e^{i phi_global} * i e^{i theta / 2}:

    U = K [[-s,                c e^{i phi_in}],
           [c e^{i phi_out},   s e^{i (phi_in + phi_out)}]]
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .choi import fidelity_chain
from .errors import DatasetError, ValidationError
from .hom import BS_SYMMETRIC
from .linalg import TABLE_TOL, check_unitary, load_unitary, unitary_from_json

TWO_PI = 2 * np.pi
PAIR_COUNT = 21
DATA_ENV = "TQME_DATA_DIR"


def _wrap(x: float) -> float:
    x = float(np.mod(x, TWO_PI))
    return 0.0 if x >= TWO_PI else x


@dataclass(frozen=True)
class MziSettings:
    phi_in: float = 0.0
    theta: float = 0.0
    phi_out: float = 0.0
    phi_global: float = 0.0

    def reduced(self) -> "MziSettings":
        return MziSettings(_wrap(self.phi_in), _wrap(self.theta), _wrap(self.phi_out), _wrap(self.phi_global))


def _phase(x):
    return np.diag([1.0, np.exp(1j * x)])


def unitary_from_mzi(s: MziSettings) -> np.ndarray:
    b = BS_SYMMETRIC
    return np.exp(1j * s.phi_global) * _phase(s.phi_out) @ b @ _phase(s.theta) @ b @ _phase(s.phi_in)


def mzi_from_unitary(u, tol: float = 1e-8) -> MziSettings:
    u = check_unitary(u, tol)
    if u.shape != (2, 2):
        raise ValidationError(f"MZI decomposition needs a 2x2 unitary, got {u.shape}")
    s = min(abs(u[0, 0]), 1.0)
    c = np.sqrt(max(0.0, 1.0 - s * s))
    theta = 2.0 * np.arcsin(s)
    if s > 1e-14:
        k = -u[0, 0] / s
        phi_in = np.angle(u[0, 1] / k) if c > 1e-14 else 0.0
    else:
        # cross state (theta = 0): only phi_in + arg K is fixed, so pin phi_in
        phi_in = 0.0
        k = u[0, 1] / c
    if c >= s:
        phi_out = np.angle(u[1, 0] / k)
    else:
        phi_out = np.angle(u[1, 1] / k) - phi_in
    phi_global = np.angle(k) - np.pi / 2 - theta / 2
    return MziSettings(phi_in, theta, phi_out, phi_global).reduced()


def roundtrip_fidelity(u) -> float:
    """|Tr(U^dag U')|^2 / 4 after decomposing and rebuilding ``u``."""
    v = unitary_from_mzi(mzi_from_unitary(u))
    return abs(np.vdot(u, v)) ** 2 / 4


@dataclass(frozen=True)
class ModulePairRecord:
    index: int
    w: np.ndarray
    v: np.ndarray


def data_dir() -> Path:
    override = os.environ.get(DATA_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("tqme") / "data"))


def default_pair_table() -> Path:
    return data_dir() / "pairs21.json"


def standard_module(project: bool = False) -> np.ndarray:
    """Printed 4-digit standard module; ``project`` snaps it to the nearest unitary."""
    return load_unitary(data_dir() / "standard_w.json", tol=TABLE_TOL, project=project)


def load_pair_table(path=None, project: bool = False) -> list[ModulePairRecord]:
    path = Path(path) if path is not None else default_pair_table()
    try:
        rows = json.loads(path.read_text())
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(rows, list) or len(rows) != PAIR_COUNT:
        n = len(rows) if isinstance(rows, list) else "non-list"
        raise DatasetError(f"expected {PAIR_COUNT} records, found {n}")
    records = []
    for pos, row in enumerate(rows, start=1):
        try:
            index = int(row["index"])
            w = unitary_from_json(row["W"], tol=TABLE_TOL, project=project)
            v = unitary_from_json(row["V"], tol=TABLE_TOL, project=project)
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetError(str(exc), row=pos) from exc
        if w.shape != (2, 2) or v.shape != (2, 2):
            raise DatasetError("matrices must be 2x2", row=pos)
        if index != pos:
            raise DatasetError(f"index {index} out of sequence", row=pos)
        records.append(ModulePairRecord(index, w, v))
    return records


def pair_fidelities(records) -> list:
    return [fidelity_chain(r.w, r.v, tol=TABLE_TOL) for r in records]
