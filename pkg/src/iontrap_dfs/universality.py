"""Lie closure of projected exchange generators on qutrit codes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CodeSpace, project_operator
from .errors import ClosureDidNotConverge, CodeDimensionUnsupported, EmptyGenerators
from .hamiltonians import h_xy
from .linalg import as_matrix, commutator, dagger

RANK_TOL = 1e-9
MAX_ROUNDS = 20


@dataclass(frozen=True)
class LieClosureReport:
    generator_count: int
    closure_dimension: int
    iterations: int
    basis: tuple[np.ndarray, ...]

    @property
    def full_dimension(self) -> int:
        k = self.basis[0].shape[0] if self.basis else 0
        return k * k - 1

    @property
    def is_full_su(self) -> bool:
        return self.closure_dimension == self.full_dimension


def _inner(a: np.ndarray, b: np.ndarray) -> float:
    # Re tr(A^dag B): a real inner product on anti-Hermitian matrices
    return float(np.real(np.vdot(a, b)))


def _adjoin(candidate: np.ndarray, basis: list[np.ndarray]) -> bool:
    """Orthonormalize ``candidate`` against ``basis``; append if independent."""
    # basis elements have unit norm, so a raw norm this small is roundoff
    norm = np.sqrt(_inner(candidate, candidate))
    if norm <= RANK_TOL:
        return False
    x = candidate / norm
    # two passes of modified Gram-Schmidt keep orthogonality at 1e-15
    for _ in range(2):
        for b in basis:
            x = x - _inner(b, x) * b
    r = np.sqrt(_inner(x, x))
    if r <= RANK_TOL:
        return False
    basis.append(x / r)
    return True


def lie_closure(generators) -> LieClosureReport:
    """Dimension of the real Lie algebra generated by i*H for Hermitian H.

    Generators lose their trace part and are scaled to unit trace norm first.
    Commutators of all basis pairs are adjoined round by round, in
    lexicographic order, until a round adds nothing.
    """
    gens = [as_matrix(h) for h in generators]
    if not gens:
        raise EmptyGenerators("no generators given")
    k = gens[0].shape[0]
    basis: list[np.ndarray] = []
    for h in gens:
        a = 1j * h
        a = 0.5 * (a - dagger(a))
        a = a - np.trace(a) / k * np.eye(k)
        tn = np.sum(np.linalg.svd(a, compute_uv=False))
        if tn > 0:
            _adjoin(a / tn, basis)

    checked = 0  # basis[:checked] already commuted with each other
    rounds = 0
    while True:
        if rounds >= MAX_ROUNDS:
            raise ClosureDidNotConverge(f"no closure after {MAX_ROUNDS} rounds")
        rounds += 1
        size = len(basis)
        added = False
        for a in range(size):
            for b in range(max(a + 1, checked), size):
                added |= _adjoin(commutator(basis[a], basis[b]), basis)
        checked = size
        if len(basis) > k * k - 1:
            raise ClosureDidNotConverge(f"span reached {len(basis)} > dim su({k}); rank test failed")
        if not added:
            break
    return LieClosureReport(len(gens), len(basis), rounds, tuple(basis))


def check_encoded_universality(code: CodeSpace, pairs, g: float = 1.0) -> LieClosureReport:
    """Closure of the exchange terms on ``pairs`` projected onto a qutrit code."""
    if code.dim != 3:
        raise CodeDimensionUnsupported(f"code has dimension {code.dim}, need 3")
    pairs = [tuple(p) for p in pairs]
    if not pairs:
        raise EmptyGenerators("no qubit pairs given")
    gens = [project_operator(h_xy(i, j, g, code.n_qubits), code) for i, j in pairs]
    return lie_closure(gens)
