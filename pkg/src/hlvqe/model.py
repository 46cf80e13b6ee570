"""Two-level pairing model in the collective quasi-spin basis.

Conventions
-----------
N fermions on two N-fold degenerate levels split by ``epsilon``, with a
monopole pair-scattering interaction of strength ``coupling`` (V).  In
collective quasi-spin form

    H = epsilon * Jz - (V/2) * (J+^2 + J-^2),

and the ground state lives in the J = N/2 block.  Basis states are labeled
by the excitation order n (np-nh configurations),

    |n> = |J = N/2, M = n - N/2>,   n = 0 .. N,

so matrix indices equal n directly.  The dimensionless interaction ratio is
vbar = (N-1) * V / epsilon; the symmetric phase ends at vbar = 1.

The rotated-frame Hamiltonian H(beta) = U(beta)^dag H U(beta), with
U(beta) = exp(-i beta Jy) acting on the quasi-spins, connects n with
n' = n, n +- 1, n +- 2 only.  Its matrix elements are evaluated from closed
forms in (n, beta) rather than by numerically rotating operators, which
avoids cancellation; the rotated-operator construction is kept to the test
suite as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigError, NumericalError

__all__ = [
    "ModelParams",
    "BasisLabel",
    "quasi_spin_element",
    "build_full_hamiltonian",
    "build_effective_hamiltonian",
    "build_effective_hamiltonian_dbeta",
    "exact_ground_state",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical definition of one model instance."""

    n_particles: int
    epsilon: float
    coupling: float

    def __post_init__(self):
        if self.n_particles < 2:
            raise ConfigError(f"n_particles must be >= 2, got {self.n_particles}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")

    @property
    def vbar(self) -> float:
        return (self.n_particles - 1) * self.coupling / self.epsilon

    @classmethod
    def from_vbar(cls, n_particles: int, epsilon: float, vbar: float) -> "ModelParams":
        return cls(n_particles, epsilon, vbar * epsilon / (n_particles - 1))

    @classmethod
    def create(cls, n_particles: int, epsilon: float, coupling: float | None = None,
               vbar: float | None = None) -> "ModelParams":
        """Build from either V or vbar; if both are given they must agree to 1e-12."""
        if coupling is None and vbar is None:
            raise ConfigError("one of coupling (V) or vbar is required")
        if coupling is not None and vbar is not None:
            if abs(vbar * epsilon - (n_particles - 1) * coupling) > 1e-12 * max(
                    1.0, abs(vbar * epsilon)):
                raise ConfigError(
                    f"inconsistent coupling={coupling} and vbar={vbar} for N={n_particles}")
        if coupling is None:
            return cls.from_vbar(n_particles, epsilon, vbar)
        return cls(n_particles, epsilon, coupling)


@dataclass(frozen=True)
class BasisLabel:
    """Excitation-order label n of a quasi-spin basis state, with J = N/2, M = n - J."""

    n: int
    n_particles: int

    def __post_init__(self):
        if not 0 <= self.n <= self.n_particles:
            raise ConfigError(f"n must lie in [0, {self.n_particles}], got {self.n}")

    @property
    def j(self) -> float:
        return self.n_particles / 2

    @property
    def m(self) -> float:
        return self.n - self.n_particles / 2


_QS_KINDS = ("Jz", "J+", "J-", "Jz2", "J+2", "J-2", "{Jz,J+}", "{Jz,J-}", "{J+,J-}")


def quasi_spin_element(j: float, kind: str, n_row: int, n_col: int) -> float:
    """Closed-form matrix element <n_row| O |n_col> in the |J, M = n - J> ladder.

    ``kind`` is one of Jz, J+, J-, Jz2, J+2, J-2, {Jz,J+}, {Jz,J-}, {J+,J-}.
    Returns 0 when the selection rule on n_row - n_col is violated.
    """
    dim = int(round(2 * j))
    if abs(2 * j - dim) > 1e-12 or j < 0:
        raise ConfigError(f"j must be a non-negative half-integer, got {j}")
    if not (0 <= n_row <= dim and 0 <= n_col <= dim):
        raise ConfigError(f"labels must lie in [0, {dim}], got {n_row}, {n_col}")
    if kind not in _QS_KINDS:
        raise ConfigError(f"unknown operator kind {kind!r}")

    m = n_col - j
    jj = j * (j + 1)

    def cp(mm):  # |J+|: <m+1| J+ |m>
        return math.sqrt(jj - mm * (mm + 1))

    def cm(mm):  # <m-1| J- |m>
        return math.sqrt(jj - mm * (mm - 1))

    dn = n_row - n_col
    if kind == "Jz":
        return m if dn == 0 else 0.0
    if kind == "Jz2":
        return m * m if dn == 0 else 0.0
    if kind == "J+":
        return cp(m) if dn == 1 else 0.0
    if kind == "J-":
        return cm(m) if dn == -1 else 0.0
    if kind == "J+2":
        return cp(m) * cp(m + 1) if dn == 2 else 0.0
    if kind == "J-2":
        return cm(m) * cm(m - 1) if dn == -2 else 0.0
    if kind == "{Jz,J+}":
        return (2 * m + 1) * cp(m) if dn == 1 else 0.0
    if kind == "{Jz,J-}":
        return (2 * m - 1) * cm(m) if dn == -1 else 0.0
    # {J+,J-}
    return 2 * jj - 2 * m * m if dn == 0 else 0.0


def build_full_hamiltonian(params: ModelParams) -> np.ndarray:
    """(N+1) x (N+1) matrix of H in the J = N/2 block; couples only |n' - n| in {0, 2}."""
    return build_effective_hamiltonian(params, 0.0, params.n_particles + 1)


def build_effective_hamiltonian(params: ModelParams, beta: float, cutoff: int) -> np.ndarray:
    """Cutoff x cutoff matrix of H(beta) over the rotated states |n, beta>, n < cutoff.

    Five-band structure: diagonal, |dn| = 1 (vanishing at beta = 0) and |dn| = 2.
    At beta = 0 this is the upper-left block of the full Hamiltonian.
    """
    N = params.n_particles
    if not 1 <= cutoff <= N + 1:
        raise ConfigError(f"cutoff must lie in [1, {N + 1}], got {cutoff}")
    eps, V = params.epsilon, params.coupling
    s, c = math.sin(beta), math.cos(beta)

    H = np.zeros((cutoff, cutoff))
    n = np.arange(cutoff)
    H[n, n] = eps * c * (n - N / 2) - (V / 4) * s * s * (N * N + 6 * n * n - 6 * n * N - N)
    for k in range(cutoff - 1):
        val = 0.5 * math.sqrt((N - k) * (k + 1)) * s * (eps - V * c * (N - 2 * k - 1))
        H[k + 1, k] = H[k, k + 1] = val
    for k in range(cutoff - 2):
        val = -(V / 4) * (1 + c * c) * math.sqrt((N - k) * (k + 1)) \
            * math.sqrt((N - k - 1) * (k + 2))
        H[k + 2, k] = H[k, k + 2] = val
    return H


def build_effective_hamiltonian_dbeta(params: ModelParams, beta: float, cutoff: int) -> np.ndarray:
    """Entrywise analytic d/dbeta of build_effective_hamiltonian."""
    N = params.n_particles
    if not 1 <= cutoff <= N + 1:
        raise ConfigError(f"cutoff must lie in [1, {N + 1}], got {cutoff}")
    eps, V = params.epsilon, params.coupling
    s, c = math.sin(beta), math.cos(beta)
    s2, c2 = math.sin(2 * beta), math.cos(2 * beta)

    D = np.zeros((cutoff, cutoff))
    n = np.arange(cutoff)
    D[n, n] = -eps * s * (n - N / 2) - (V / 4) * s2 * (N * N + 6 * n * n - 6 * n * N - N)
    for k in range(cutoff - 1):
        val = 0.5 * math.sqrt((N - k) * (k + 1)) * (eps * c - V * c2 * (N - 2 * k - 1))
        D[k + 1, k] = D[k, k + 1] = val
    for k in range(cutoff - 2):
        val = (V / 4) * s2 * math.sqrt((N - k) * (k + 1)) * math.sqrt((N - k - 1) * (k + 2))
        D[k + 2, k] = D[k, k + 2] = val
    return D


def rayleigh_quotient(H: np.ndarray, v: np.ndarray) -> float:
    """v^T H v / v^T v with compensated (exact) summation of the products."""
    Hv = H @ v
    num = math.fsum((v * Hv).tolist())
    den = math.fsum((v * v).tolist())
    return num / den


def exact_ground_state(params: ModelParams) -> tuple[float, np.ndarray]:
    """Lowest even-parity eigenpair of the full Hamiltonian.

    The lowest even- and odd-parity states become near-degenerate at large N
    in the broken phase; the even-parity member is selected by comparing the
    even- and odd-component norms of each candidate in ascending energy order.
    The returned vector is unit-norm with its n = 0 component >= 0, and has
    odd-n components that vanish to machine precision (parity selection).
    """
    H = build_full_hamiltonian(params)
    try:
        w, v = scipy.linalg.eigh(H)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigensolver failed for N={params.n_particles}") from exc
    if not np.all(np.isfinite(w)):
        raise NumericalError(f"eigensolver returned non-finite values for N={params.n_particles}")

    for i in range(len(w)):
        vec = v[:, i]
        if np.linalg.norm(vec[0::2]) > np.linalg.norm(vec[1::2]):
            amps = vec.copy()
            nz = np.nonzero(np.abs(amps) > 1e-12)[0]
            if amps[nz[0]] < 0:
                amps = -amps
            energy = rayleigh_quotient(H, amps)
            return energy, amps
    raise NumericalError("no even-parity eigenvector found")  # pragma: no cover
