"""Decoherence-free code spaces for collective dephasing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, UnknownCode
from .hamiltonians import collective_sz
from .linalg import as_matrix, dagger, expm_hermitian, ket, max_abs

LEAKAGE_FLOOR = -1e-10

# basis order follows the listing order used throughout the docs
_STANDARD = {
    "C_I": ("001", "010", "100"),
    "C_II": ("110", "101", "011"),
    "PAIR_DFS": ("01", "10"),
    "QUBIT_IN_C_I": ("001", "010"),
}

# names accepted on the command line
CLI_NAMES = {"CI": "C_I", "CII": "C_II", "PAIR": "PAIR_DFS", "QUBIT_CI": "QUBIT_IN_C_I"}


@dataclass(frozen=True)
class CodeSpace:
    basis_kets: tuple[str, ...]
    name: str = ""
    projector: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kets = tuple(self.basis_kets)
        if not kets:
            raise ValueError("a code needs at least one basis ket")
        n = len(kets[0])
        if any(len(k) != n for k in kets):
            raise ValueError("basis kets must share one length")
        if len(set(kets)) != len(kets):
            raise ValueError("basis kets must be distinct")
        object.__setattr__(self, "basis_kets", kets)
        p = sum(ket(k) @ dagger(ket(k)) for k in kets)
        p.setflags(write=False)
        object.__setattr__(self, "projector", p)

    @property
    def n_qubits(self) -> int:
        return len(self.basis_kets[0])

    @property
    def dim(self) -> int:
        return len(self.basis_kets)

    @property
    def isometry(self) -> np.ndarray:
        """Columns are the code basis kets, in code order."""
        return np.hstack([ket(k) for k in self.basis_kets])

    def sz_eigenvalues(self) -> list[int]:
        return [self.n_qubits - 2 * k.count("1") for k in self.basis_kets]

    def is_dfs(self) -> bool:
        """True when every basis ket shares one collective S_z eigenvalue."""
        return len(set(self.sz_eigenvalues())) == 1

    def embed(self, rho_code) -> np.ndarray:
        """Lift a k x k matrix on the code to the full register."""
        v = self.isometry
        return v @ as_matrix(rho_code) @ dagger(v)


def standard_code(name: str) -> CodeSpace:
    """Return C_I, C_II, PAIR_DFS or QUBIT_IN_C_I (CLI aliases accepted)."""
    key = CLI_NAMES.get(name, name)
    if key not in _STANDARD:
        raise UnknownCode(name)
    return CodeSpace(_STANDARD[key], name=key)


def _check_dim(a: np.ndarray, code: CodeSpace) -> None:
    d = 2**code.n_qubits
    if a.shape != (d, d):
        raise DimensionMismatch(f"operator shape {a.shape} does not match {code.n_qubits}-qubit code")


def leakage(rho, code: CodeSpace) -> float:
    """Population outside the code, 1 - tr(P rho), clamped to [0, 1]."""
    rho = as_matrix(rho)
    _check_dim(rho, code)
    out = 1.0 - float(np.real(np.trace(code.projector @ rho)))
    if out < LEAKAGE_FLOOR:
        raise ValueError(f"leakage {out:.3e} is negative beyond roundoff")
    return min(max(out, 0.0), 1.0)


def project_operator(h, code: CodeSpace) -> np.ndarray:
    """Matrix elements <b_r|H|b_s> over the code basis."""
    h = as_matrix(h)
    _check_dim(h, code)
    v = code.isometry
    return dagger(v) @ h @ v


def dephasing_invariance_check(code: CodeSpace, phi: float) -> float:
    """Worst change of any code-basis density matrix under exp(-i phi S_z).

    Basis kets and all pairwise coherences |b_r><b_s| are checked, so a
    relative phase between code words shows up even though populations alone
    would not move.
    """
    u = expm_hermitian(collective_sz(code.n_qubits), phi)
    kets = [ket(k) for k in code.basis_kets]
    worst = 0.0
    for a in range(len(kets)):
        for b in range(a, len(kets)):
            psi = (kets[a] + kets[b]) / np.linalg.norm(kets[a] + kets[b])
            rho = psi @ dagger(psi)
            worst = max(worst, max_abs(u @ rho @ dagger(u) - rho))
    return worst
