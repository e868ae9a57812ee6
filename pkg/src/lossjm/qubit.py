"""Closed-form compatibility test for pairs of two-outcome qubit measurements.

With each measurement written as A_+/- = [(1 +/- gamma) I +/- m . sigma] / 2,
the pair is incompatible if and only if

    Test = (1 - F_1^2 - F_2^2) (1 - (gamma_1/F_1)^2 - (gamma_2/F_2)^2)
           - (m_1 . m_2 - gamma_1 gamma_2)^2  >  0,

where F_i = [sqrt((1 + gamma_i)^2 - |m_i|^2) + sqrt((1 - gamma_i)^2 - |m_i|^2)] / 2.
This is the standard criterion for biased pairs and serves as the independent
oracle for the joint-measurability solver on qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .loss import dual_coherent_projector
from .measurements import BlochParams, Povm, bloch_params

DEGENERATE_F_TOL = 1e-12


class DegenerateMeasurementError(ValueError):
    """Raised when some F_i vanishes: both elements of a measurement are
    singular and the closed-form criterion does not apply; defer to the
    solver for such pairs."""


@dataclass(frozen=True)
class PairTestReport:
    gamma1: float
    gamma2: float
    m1: np.ndarray = field(repr=False)
    m2: np.ndarray = field(repr=False)
    F1: float
    F2: float
    test_value: float
    incompatible: bool

    def as_dict(self) -> dict:
        return {
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "m1": list(self.m1),
            "m2": list(self.m2),
            "F1": self.F1,
            "F2": self.F2,
            "test_value": self.test_value,
            "incompatible": self.incompatible,
        }


def _fuzziness(b: BlochParams) -> float:
    mm = float(b.m @ b.m)
    lo = (1.0 - b.gamma) ** 2 - mm
    hi = (1.0 + b.gamma) ** 2 - mm
    if min(lo, hi) < -1e-10:
        raise ValueError("Bloch parameters violate POVM positivity")
    return 0.5 * (math.sqrt(max(hi, 0.0)) + math.sqrt(max(lo, 0.0)))


def pair_test(a: Povm, b: Povm) -> PairTestReport:
    """Evaluate the pair criterion; incompatible iff test_value > 0."""
    pa, pb = bloch_params(a), bloch_params(b)
    F1, F2 = _fuzziness(pa), _fuzziness(pb)
    if F1 < DEGENERATE_F_TOL or F2 < DEGENERATE_F_TOL:
        raise DegenerateMeasurementError(
            "measurement with vanishing fuzziness: criterion undefined"
        )
    cross = float(pa.m @ pb.m) - pa.gamma * pb.gamma
    test = (1.0 - F1**2 - F2**2) * (
        1.0 - (pa.gamma / F1) ** 2 - (pb.gamma / F2) ** 2
    ) - cross**2
    return PairTestReport(
        gamma1=pa.gamma,
        gamma2=pb.gamma,
        m1=pa.m,
        m2=pb.m,
        F1=F1,
        F2=F2,
        test_value=test,
        incompatible=test > 0,
    )


def lossy_displaced_pair(r: float, tau: float) -> tuple[Povm, Povm]:
    """The mu = +r / -r displaced on-off pair after loss, on the qubit block.

    Truncation commutes with the dual loss channel, so the leading 2x2 block
    computed directly equals the projection of any higher-cutoff computation.
    """
    povms = []
    for mu in (r, -r):
        A = dual_coherent_projector(tau, mu, 2)
        povms.append(Povm((A, np.eye(2, dtype=complex) - A)))
    return povms[0], povms[1]


def leading_order_check(r: float, tau: float) -> tuple[float, float]:
    """(evaluated Test, small-r prediction 16 tau (2 tau - 1) r^2) for the
    lossy displaced pair.

    The remainder is O(r^4): halving r shrinks the deviation roughly 4x,
    which the tests verify by Richardson-style scaling.
    """
    a, b = lossy_displaced_pair(r, tau)
    report = pair_test(a, b)
    predicted = 16.0 * tau * (2.0 * tau - 1.0) * r**2
    return report.test_value, predicted
