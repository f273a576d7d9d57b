"""Pauli operators, Sorensen-Molmer effective Hamiltonians and trap helpers.

Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of the
basis index and the leftmost character of a ket label such as ``"001"``.
Dynamics run with hbar = 1 in units where the coupling g = 1; the SI constant
only appears in :func:`lamb_dicke`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, SameQubit, ZeroDetuning
from .linalg import kron

MAX_QUBITS = 6
HBAR_SI = 1.0545718e-34  # J s

SIGMA = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PulseParameters:
    rabi_frequency: float
    lamb_dicke: float
    detuning: float

    def __post_init__(self):
        if self.rabi_frequency <= 0:
            raise ValueError("rabi_frequency must be positive")
        if self.lamb_dicke < 0:
            raise ValueError("lamb_dicke must be nonnegative")
        if self.lamb_dicke >= 1:
            warnings.warn("lamb_dicke >= 1 is outside the Lamb-Dicke regime", stacklevel=3)
        if self.detuning == 0:
            raise ZeroDetuning("detuning must be nonzero")


@dataclass(frozen=True)
class TrapParameters:
    ion_count: int
    ion_mass: float
    trap_frequency: float
    drive_wavelength: float
    beam_angle: float = 0.0

    def __post_init__(self):
        if self.ion_count < 1:
            raise ValueError("ion_count must be a positive integer")
        for name in ("ion_mass", "trap_frequency", "drive_wavelength"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def _check_qubits(n_qubits: int, *indices: int) -> None:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise IndexOutOfRange(f"n_qubits={n_qubits} outside 1..{MAX_QUBITS}")
    for k in indices:
        if not 0 <= k < n_qubits:
            raise IndexOutOfRange(f"qubit {k} outside 0..{n_qubits - 1}")


def pauli(axis: str, qubit_index: int, n_qubits: int) -> np.ndarray:
    """Single-qubit Pauli ``axis`` acting on ``qubit_index``, identity elsewhere."""
    try:
        s = SIGMA[axis.lower()]
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None
    _check_qubits(n_qubits, qubit_index)
    return kron(*(s if k == qubit_index else SIGMA["i"] for k in range(n_qubits)))


def collective_sz(n_qubits: int) -> np.ndarray:
    """S_z = sum_k sigma_z^k; diagonal entry = (#zeros - #ones) of the ket."""
    _check_qubits(n_qubits)
    diag = [n_qubits - 2 * bin(b).count("1") for b in range(2**n_qubits)]
    return np.diag(np.array(diag, dtype=complex))


def excitation_number(n_qubits: int) -> np.ndarray:
    """Number of qubits in |1>, as a diagonal operator."""
    _check_qubits(n_qubits)
    return np.diag(np.array([bin(b).count("1") for b in range(2**n_qubits)], dtype=complex))


def _pair(axis_i: str, axis_j: str, i: int, j: int, g: float, n_qubits: int) -> np.ndarray:
    _check_qubits(n_qubits, i, j)
    if i == j:
        raise SameQubit(f"pair interaction needs two distinct qubits, got ({i}, {j})")
    return g * (pauli(axis_i, i, n_qubits) @ pauli(axis_j, j, n_qubits))


def h_xx(i: int, j: int, g: float, n_qubits: int) -> np.ndarray:
    """g sigma_x^i sigma_x^j (one Sorensen-Molmer phase setting)."""
    return _pair("x", "x", i, j, g, n_qubits)


def h_yy(i: int, j: int, g: float, n_qubits: int) -> np.ndarray:
    """g sigma_y^i sigma_y^j (laser phases shifted by pi/2)."""
    return _pair("y", "y", i, j, g, n_qubits)


def h_xy(i: int, j: int, g: float, n_qubits: int) -> np.ndarray:
    """Anisotropic exchange g (sigma_x^i sigma_x^j + sigma_y^i sigma_y^j).

    Annihilates |00> and |11> on the pair and maps |01> <-> |10> with weight 2g.
    """
    return h_xx(i, j, g, n_qubits) + h_yy(i, j, g, n_qubits)


def lamb_dicke(trap: TrapParameters) -> float:
    """eta = sqrt(hbar / (2 N M omega)) * cos(theta) / lambda.

    The wavelength enters as 1/lambda, not 2 pi/lambda; see README.
    """
    eta = (
        math.sqrt(HBAR_SI / (2 * trap.ion_count * trap.ion_mass * trap.trap_frequency))
        / trap.drive_wavelength
        * math.cos(trap.beam_angle)
    )
    if not 0 <= abs(eta) < 1:
        warnings.warn(f"Lamb-Dicke parameter {eta:.3g} outside [0, 1)", stacklevel=2)
    return eta


def coupling_strength(p: PulseParameters) -> float:
    """g = eta^2 Omega^2 / Delta (signed: red detuning flips the Hamiltonian)."""
    if p.detuning == 0:
        raise ZeroDetuning("detuning must be nonzero")
    return p.lamb_dicke**2 * p.rabi_frequency**2 / p.detuning
