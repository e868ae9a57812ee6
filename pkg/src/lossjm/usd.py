"""Unambiguous discrimination of symmetric coherent states.

For the n states {|r e^{2 pi i t / n}>} the optimal no-error identification
probability is

    P_D(n, r) = min_t sum_j e^{2 pi i j t / n} exp(r^2 (e^{2 pi i j / n} - 1)),

and the split-and-detect strategy (balanced n-arm network followed by
displaced on-off detection on every arm) achieves

    P_LON(n, r) = prod_{k=1}^{n-1} (1 - exp(-(r^2/n) |e^{2 pi i k / n} - 1|^2)).

Both probabilities vanish like r^{2(n-1)} as r -> 0, with coefficients
n^2/n! and n^2/n^{n-1}.  After a loss channel the split-and-detect success
picks up a factor tau^{n-1} in that limit, which beats the no-loss optimum
whenever n! > tau^{1-n}; a threshold n exists for every positive tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

IMAG_RESIDUE_TOL = 1e-9


def _check_n(n: int) -> int:
    if n < 2:
        raise ValueError("need at least two states")
    return int(n)


def p_d(n: int, r: float, method: str = "series") -> float:
    """Optimal unambiguous-discrimination probability for n symmetric states.

    The default "series" evaluation resums each term of the min over t into
    a series with positive terms,

        S_t = n e^{-r^2} sum_{m >= 0, m = -t (mod n)} r^{2m} / m!,

    which is exact and free of the catastrophic cancellation that hits the
    direct alternating sum for small r (relative accuracy is lost there
    below r ~ 1e-3 once n >= 4).  ``method="direct"`` evaluates the quoted
    alternating sum with compensated summation and asserts that the
    imaginary parts cancel; it is kept as an independent route for
    cross-checks.  Values are clamped to [0, 1]; the raw expression can
    exceed 1 for large r, outside its regime of validity.
    """
    n = _check_n(n)
    if r < 0:
        raise ValueError("amplitude must be non-negative")
    if method == "series":
        vals = [_p_d_series_term(n, r, t) for t in range(1, n + 1)]
    elif method == "direct":
        vals = [_p_d_direct_term(n, r, t) for t in range(1, n + 1)]
    else:
        raise ValueError(f"unknown method {method!r}")
    return min(1.0, max(0.0, min(vals)))


def _p_d_series_term(n: int, r: float, t: int) -> float:
    r2 = r * r
    m = (n - t) % n
    total = 0.0
    term = r2**m / math.factorial(m) if m else 1.0
    while True:
        total += term
        new_m = m + n
        # r^{2(m+n)} / (m+n)!  from  r^{2m} / m!
        for i in range(m + 1, new_m + 1):
            term *= r2 / i
        m = new_m
        if term < 1e-40 * max(total, 1e-300) or m > 4000:
            break
    return n * math.exp(-r2) * total


def _p_d_direct_term(n: int, r: float, t: int) -> float:
    re_parts, im_parts = [], []
    for j in range(1, n + 1):
        z = np.exp(2j * math.pi * j * t / n) * np.exp(
            r * r * (np.exp(2j * math.pi * j / n) - 1.0)
        )
        re_parts.append(z.real)
        im_parts.append(z.imag)
    imag = math.fsum(im_parts)
    if abs(imag) > IMAG_RESIDUE_TOL:
        raise ArithmeticError(
            f"imaginary residue {imag:.3e} exceeds {IMAG_RESIDUE_TOL:.1e}"
        )
    return math.fsum(re_parts)


def p_d_approx(n: int, r: float) -> float:
    """Small-r form n^2 r^{2(n-1)} / n! of the optimal probability."""
    n = _check_n(n)
    return n * n * r ** (2 * (n - 1)) / math.factorial(n)


def root_distance_product(n: int) -> float:
    """prod_{k=1}^{n-1} |e^{2 pi i k / n} - 1|^2, equal to n^2."""
    n = _check_n(n)
    return float(
        np.prod([2.0 - 2.0 * math.cos(2.0 * math.pi * k / n) for k in range(1, n)])
    )


def p_lon(n: int, r: float) -> float:
    """Split-and-detect success probability over a balanced n-arm network."""
    n = _check_n(n)
    r2n = r * r / n
    out = 1.0
    for k in range(1, n):
        out *= -math.expm1(-r2n * (2.0 - 2.0 * math.cos(2.0 * math.pi * k / n)))
    return out


def p_lon_approx(n: int, r: float) -> float:
    """Small-r form n^2 r^{2(n-1)} / n^{n-1} of the split-and-detect probability."""
    n = _check_n(n)
    return n * n * r ** (2 * (n - 1)) / n ** (n - 1)


def lossy_usd_success(n: int, r: float, tau_b: float) -> float:
    """Split-and-detect success after a loss channel of transmissivity tau_b.

    prod_{k=1}^{n-1} (1 - exp(-tau_b r^2 |e^{2 pi i k/n} - 1|^2)); for small r
    this approaches n^2 r^{2(n-1)} tau_b^{n-1}.
    """
    n = _check_n(n)
    if not 0.0 < tau_b <= 1.0:
        raise ValueError("transmissivity must lie in (0, 1]")
    out = 1.0
    for k in range(1, n):
        out *= -math.expm1(-tau_b * r * r * (2.0 - 2.0 * math.cos(2.0 * math.pi * k / n)))
    return out


def beats_no_loss_optimum(n: int, tau: float) -> bool:
    """Exact test of n! > tau^{1-n}, i.e. n! tau^{n-1} > 1, in rational arithmetic."""
    n = _check_n(n)
    if tau <= 0:
        raise ValueError("transmissivity must be positive")
    t = Fraction(tau)  # floats convert exactly
    return math.factorial(n) * t ** (n - 1) > 1


def result4_threshold(tau: float) -> int:
    """Smallest n >= 2 with n! > tau^{1-n}, by exact comparison.

    Exists for every tau > 0 since n! grows faster than any geometric
    sequence; comparisons use exact rationals so boundary cases like
    2! > 2 at tau = 1/2 are decided without floating-point error.
    """
    if tau <= 0:
        raise ValueError("transmissivity must be positive")
    n = 2
    while not beats_no_loss_optimum(n, tau):
        n += 1
    return n


@dataclass(frozen=True)
class UsdReport:
    n: int
    r: float
    tau: float
    p_d: float
    p_lon: float
    p_d_approx: float
    p_lon_approx: float
    lossy_success: float
    threshold_n: int
    beats_optimum: bool

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "tau": self.tau,
            "p_d": self.p_d,
            "p_lon": self.p_lon,
            "p_d_approx": self.p_d_approx,
            "p_lon_approx": self.p_lon_approx,
            "lossy_success": self.lossy_success,
            "threshold_n": self.threshold_n,
            "beats_optimum": self.beats_optimum,
        }


def usd_report(n: int, r: float, tau: float) -> UsdReport:
    report = UsdReport(
        n=n,
        r=r,
        tau=tau,
        p_d=p_d(n, r),
        p_lon=p_lon(n, r),
        p_d_approx=p_d_approx(n, r),
        p_lon_approx=p_lon_approx(n, r),
        lossy_success=lossy_usd_success(n, r, tau),
        threshold_n=result4_threshold(tau),
        beats_optimum=beats_no_loss_optimum(n, tau),
    )
    if report.p_lon > report.p_d + 1e-12:
        raise AssertionError("split-and-detect exceeded the optimal bound")
    return report
