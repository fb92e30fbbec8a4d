"""Dense state-vector simulation for a handful of qubits.

States are complex numpy vectors of length ``2**n``. Qubit 0 is the leftmost
tensor factor (most significant bit of the basis index). Basis value 0 reads
as C and 1 as D when a qubit belongs to a player.

Single-qubit strategies follow the two-parameter family::

    U(theta, phi) = [[ e^{i phi} cos(theta/2),  sin(theta/2)           ],
                     [ -sin(theta/2),           e^{-i phi} cos(theta/2) ]]

so that C = U(0, 0) = I, D = U(pi, 0) = [[0, 1], [-1, 0]] and
Q = U(0, pi/2) = diag(i, -i).
"""
from __future__ import annotations

from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

MAX_QUBITS = 8
NORM_TOL = 1e-9

PAULI_Y = np.array([[0, -1j], [1j, 0]])


class EWLStrategy(NamedTuple):
    theta: float
    phi: float = 0.0

    def validate(self, tol: float = 1e-12) -> "EWLStrategy":
        if not -tol <= self.theta <= np.pi + tol:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if not -tol <= self.phi <= np.pi / 2 + tol:
            raise ValueError(f"phi={self.phi} outside [0, pi/2]")
        return self


class SU2Strategy(NamedTuple):
    """Three-angle strategy covering all of SU(2); ``alpha = 0`` gives ``EWLStrategy``."""

    theta: float
    phi: float = 0.0
    alpha: float = 0.0

    def validate(self, tol: float = 1e-12) -> "SU2Strategy":
        if not -tol <= self.theta <= np.pi + tol:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        for name in ("phi", "alpha"):
            v = getattr(self, name)
            if not -np.pi - tol <= v <= np.pi + tol:
                raise ValueError(f"{name}={v} outside [-pi, pi]")
        return self


COOPERATE = EWLStrategy(0.0, 0.0)
DEFECT = EWLStrategy(np.pi, 0.0)
QUANTUM = EWLStrategy(0.0, np.pi / 2)


def su2_unitary(theta: float, phi: float = 0.0, alpha: float = 0.0) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([
        [np.exp(1j * phi) * c, np.exp(1j * alpha) * s],
        [-np.exp(-1j * alpha) * s, np.exp(-1j * phi) * c],
    ])


def strategy_unitary(s) -> np.ndarray:
    """2x2 unitary of an ``EWLStrategy`` or ``SU2Strategy`` (range-checked)."""
    if isinstance(s, SU2Strategy):
        return su2_unitary(*s.validate())
    s = EWLStrategy(*s).validate()
    return su2_unitary(s.theta, s.phi)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats)


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count {n} outside 1..{MAX_QUBITS}")


def entangler_generator(n: int) -> np.ndarray:
    """Hermitian involution G with J(gamma) = exp(i gamma G / 2).

    G = (-1)^(n//2) Y^{(x)n}. For even n this is exactly D^{(x)n}; for odd n,
    D^{(x)n} is anti-Hermitian and G = -i D^{(x)n}. Either way G commutes with
    every tensor product of C and D.
    """
    _check_n(n)
    return (-1) ** (n // 2) * kron_all([PAULI_Y] * n)


def entangler(gamma: float, n: int) -> np.ndarray:
    """Closed form cos(gamma/2) I + i sin(gamma/2) G, valid because G @ G = I."""
    if not -1e-12 <= gamma <= np.pi / 2 + 1e-12:
        raise ValueError(f"gamma={gamma} outside [0, pi/2]")
    if n < 2:
        raise ValueError("the entangler acts on at least 2 qubits")
    g = entangler_generator(n)
    return np.cos(gamma / 2) * np.eye(2 ** n) + 1j * np.sin(gamma / 2) * g


def basis_state(bits: Sequence[int] | str) -> np.ndarray:
    bits = [int(b) for b in bits]
    _check_n(len(bits))
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int("".join(map(str, bits)), 2)] = 1.0
    return psi


def n_qubits(psi: np.ndarray) -> int:
    n = int(psi.size).bit_length() - 1
    if psi.ndim != 1 or psi.size != 2 ** n:
        raise ValueError(f"state length {psi.size} is not a power of two")
    _check_n(n)
    return n


def is_unitary(u: np.ndarray, tol: float = NORM_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) <= tol)


def is_normalized(psi: np.ndarray, tol: float = NORM_TOL) -> bool:
    return abs(np.vdot(psi, psi).real - 1.0) <= tol


def apply(u: np.ndarray, psi: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Apply a ``2^k x 2^k`` operator to the listed qubits of ``psi``."""
    n = n_qubits(psi)
    targets = list(targets)
    k = len(targets)
    if len(set(targets)) != k:
        raise ValueError(f"repeated target qubits {targets}")
    if any(not 0 <= t < n for t in targets):
        raise ValueError(f"targets {targets} out of range for {n} qubits")
    u = np.asarray(u)
    if u.shape != (2 ** k, 2 ** k):
        raise ValueError(f"operator shape {u.shape} does not act on {k} qubit(s)")
    tensor = psi.reshape((2,) * n)
    op = u.reshape((2,) * (2 * k))
    out = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), targets))
    # tensordot puts the acted-on axes first
    out = np.moveaxis(out, list(range(k)), targets)
    return out.reshape(-1)


def outcome_distribution(psi: np.ndarray, tol: float = NORM_TOL) -> np.ndarray:
    """Computational-basis probabilities |amplitude|^2."""
    n_qubits(psi)
    if not is_normalized(psi, tol):
        raise ValueError(f"state is not normalized (norm^2 = {np.vdot(psi, psi).real:.12g})")
    return np.abs(psi) ** 2


def basis_labels(n: int, zero: str = "C", one: str = "D") -> list[str]:
    return ["".join(one if c == "1" else zero for c in format(b, f"0{n}b")) for b in range(2 ** n)]


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """True if ``a = e^{i t} b`` for some global phase ``t``."""
    overlap = np.vdot(b, a)
    if abs(overlap) < tol:
        return bool(np.linalg.norm(a) < tol and np.linalg.norm(b) < tol)
    phase = overlap / abs(overlap)
    return bool(np.linalg.norm(a - phase * b) <= tol)
