"""POVMs and measurement sets: displaced on-off photodetection, symmetric
families under loss, subspace projection, and the Bloch picture for qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock import PSD_TOL, coherent_ket, psd_residual
from .loss import apply_dual

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class Povm:
    """An ordered list of Hermitian PSD operators summing to the identity."""

    elements: tuple

    def __post_init__(self):
        els = tuple(np.asarray(E, dtype=complex) for E in self.elements)
        if not els:
            raise ValueError("a POVM needs at least one element")
        d = els[0].shape[0]
        for E in els:
            if E.shape != (d, d):
                raise ValueError("POVM elements must share one square shape")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def outcomes(self) -> int:
        return len(self.elements)

    def validation_residuals(self) -> tuple[float, float]:
        """(worst PSD residual, max-norm distance of the element sum from I)."""
        psd = max(psd_residual(E) for E in self.elements)
        total = sum(self.elements)
        return psd, float(np.abs(total - np.eye(self.dim)).max())

    def validate(self, psd_tol: float = PSD_TOL, sum_tol: float = PSD_TOL) -> "Povm":
        psd, ssum = self.validation_residuals()
        if psd > psd_tol:
            raise ValueError(f"PSD residual {psd:.3e} exceeds {psd_tol:.1e}")
        if ssum > sum_tol:
            raise ValueError(f"element sum deviates from identity by {ssum:.3e}")
        return self


@dataclass(frozen=True)
class MeasurementSet:
    """Measurements sharing one Hilbert-space dimension."""

    povms: tuple

    def __post_init__(self):
        povms = tuple(self.povms)
        if not povms:
            raise ValueError("a measurement set needs at least one POVM")
        d = povms[0].dim
        if any(p.dim != d for p in povms):
            raise ValueError("all POVMs must share one dimension")
        object.__setattr__(self, "povms", povms)

    @property
    def dim(self) -> int:
        return self.povms[0].dim

    def __len__(self) -> int:
        return len(self.povms)

    def __iter__(self):
        return iter(self.povms)


@dataclass(frozen=True)
class FamilyParams:
    """Parameters of the symmetric displaced on-off family.

    ``count`` measurements with displacements mu_k = r exp(2 pi i (k-1)/count),
    each sent through a loss channel of transmissivity ``tau`` and truncated
    at ``d`` photon-number levels.
    """

    count: int
    r: float
    tau: float
    d: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.r < 0:
            raise ValueError("r must be >= 0")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        if self.d < 2:
            raise ValueError("d must be >= 2")

    def displacements(self) -> list[complex]:
        return [
            self.r * np.exp(2j * math.pi * k / self.count) for k in range(self.count)
        ]


def coherent_projector(mu: complex, d: int) -> np.ndarray:
    ket = coherent_ket(mu, d)
    return np.outer(ket, ket.conj())


def displaced_onoff(mu: complex, d: int) -> Povm:
    """Two-outcome displaced on-off detection {|mu><mu|, I - |mu><mu|}.

    The complement is formed inside the truncated space, so the pair sums to
    the d-dimensional identity exactly at every cutoff.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    P = coherent_projector(mu, d)
    return Povm((P, np.eye(d, dtype=complex) - P))


def lossy_povm(povm: Povm, tau: float) -> Povm:
    """Image of a POVM under the dual loss channel (exact under truncation)."""
    return Povm(tuple(apply_dual(tau, E) for E in povm.elements))


def symmetric_family(params: FamilyParams) -> MeasurementSet:
    """The symmetric displaced on-off family after loss.

    tau = 1 returns the noiseless family; the dual channel is then the
    identity map exactly.
    """
    povms = []
    for mu in params.displacements():
        povms.append(lossy_povm(displaced_onoff(mu, params.d), params.tau))
    return MeasurementSet(tuple(povms))


def project_povm(povm: Povm, d_sub: int) -> Povm:
    """Leading d_sub x d_sub block of every element.

    Principal blocks of PSD matrices are PSD and the element sums equal the
    subspace identity, so the result is a valid POVM on the subspace.
    """
    if d_sub > povm.dim:
        raise ValueError("subspace dimension exceeds the POVM dimension")
    return Povm(tuple(E[:d_sub, :d_sub] for E in povm.elements))


def project_set(mset: MeasurementSet, d_sub: int) -> MeasurementSet:
    return MeasurementSet(tuple(project_povm(p, d_sub) for p in mset))


@dataclass(frozen=True)
class BlochParams:
    """Bias gamma and Bloch vector m of a two-outcome qubit measurement,
    referring to the first element A = [(1 + gamma) I + m . sigma] / 2."""

    gamma: float
    m: np.ndarray = field(repr=False)

    def reconstruct(self) -> np.ndarray:
        A = (1.0 + self.gamma) * np.eye(2, dtype=complex)
        for mi, s in zip(self.m, PAULI):
            A = A + mi * s
        return A / 2.0


def bloch_params(povm: Povm) -> BlochParams:
    """Extract (gamma, m) from a two-outcome qubit POVM, Pauli order (x, y, z)."""
    if povm.dim != 2:
        raise ValueError("Bloch extraction requires dimension 2")
    if povm.outcomes != 2:
        raise ValueError("Bloch extraction requires exactly two outcomes")
    A = povm.elements[0]
    gamma = float(np.trace(A).real) - 1.0
    m = np.array([np.trace(A @ s).real for s in PAULI])
    return BlochParams(gamma, m)


def random_two_outcome_povm(dim: int, rng: np.random.Generator) -> Povm:
    """Haar-random rank-1 projector mixed with the maximally mixed effect.

    A = w P + (1 - w) I/dim with w uniform on [0, 1] and P a Haar-random
    rank-1 projector; the complement I - A is the second element.
    """
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    P = np.outer(v, v.conj())
    w = rng.uniform()
    A = w * P + (1.0 - w) * np.eye(dim) / dim
    return Povm((A, np.eye(dim, dtype=complex) - A))


def random_measurement_set(dim: int, n: int, rng: np.random.Generator) -> MeasurementSet:
    return MeasurementSet(tuple(random_two_outcome_povm(dim, rng) for _ in range(n)))
