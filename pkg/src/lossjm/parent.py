"""Constructive joint measurability through a linear-optical network.

Splitting the signal over n output arms with transmissivities tau_k
(sum <= 1; any deficit leaks into one extra arm) and measuring M^j on arm j
realizes the parent POVM

    G_(a_1,...,a_n) = <vac| U^dag (M^1_{a_1} x ... x M^n_{a_n}) U |vac>,

where U is the network's Fock-space unitary and the compression is over the
ancilla arms prepared in vacuum.  Its j-th marginal equals the dual-loss
image of M^j at transmissivity tau_j, exactly: the network conserves photon
number, so the truncated computation reproduces the untruncated matrix
elements.  An extra loss channel of transmissivity eta in front of the
network turns the marginals into dual-loss images at eta * tau_j.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .compat import ParentPovm
from .fock import complete_unitary
from .loss import apply_dual
from .measurements import MeasurementSet

# d ** modes above this would allocate beyond desk scale.
MAX_GRID = 1 << 17


def _signal_columns(transfer: np.ndarray, d: int) -> np.ndarray:
    """Columns U |i, 0, ..., 0> of the network unitary, shape (d**m, d).

    Column i is (b_1^dag)^i |vac> / sqrt(i!) with b_1^dag the transformed
    creation operator of the signal arm, built by recursion; every column
    lives in a complete photon-number sector, so no truncation error enters.
    """
    m = transfer.shape[0]
    dim = d**m
    shape = (d,) * m
    root = np.sqrt(np.arange(1, d))
    V = np.zeros((dim, d), dtype=complex)
    V[0, 0] = 1.0
    for i in range(1, d):
        col = V[:, i - 1].reshape(shape)
        new = np.zeros(shape, dtype=complex)
        for k in range(m):
            src = [slice(None)] * m
            dst = [slice(None)] * m
            src[k] = slice(0, d - 1)
            dst[k] = slice(1, d)
            bshape = [1] * m
            bshape[k] = d - 1
            new[tuple(dst)] += transfer[0, k] * root.reshape(bshape) * col[tuple(src)]
        V[:, i] = new.ravel() / math.sqrt(i)
    return V


def _apply_tensor(ops: list[np.ndarray], V: np.ndarray, d: int) -> np.ndarray:
    """(op_1 x ... x op_m) V without forming the d**m square operator."""
    m = len(ops)
    W = V.reshape((d,) * m + (V.shape[1],))
    for j, op in enumerate(ops):
        if op is None:
            continue
        W = np.moveaxis(np.tensordot(op, W, axes=([1], [j])), 0, j)
    return W.reshape(V.shape)


def lon_parent(mset: MeasurementSet, taus, eta: float = 1.0) -> ParentPovm:
    """Parent POVM for the dual-loss images {E*_{eta tau_j}(M^j)}.

    ``taus`` lists one transmissivity per measurement with sum at most 1;
    a strict deficit adds one unmeasured arm.  ``eta`` < 1 post-composes
    every parent element with the dual loss channel at eta.

    Raises ValueError when sum(taus) exceeds 1: no quantum channel has all
    the required loss channels as its single-arm marginals.
    """
    taus = [float(t) for t in taus]
    n = len(mset)
    if len(taus) != n:
        raise ValueError("need exactly one transmissivity per measurement")
    if any(t < 0 for t in taus):
        raise ValueError("transmissivities must be non-negative")
    total = sum(taus)
    if total > 1.0 + 1e-12:
        raise ValueError(
            f"sum of transmissivities {total:.6f} exceeds 1; "
            "no channel has these loss channels as marginals"
        )
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")

    d = mset.dim
    transfer = complete_unitary(np.sqrt(taus))
    m = transfer.shape[0]
    if d**m > MAX_GRID:
        raise ValueError(
            f"multimode grid {d}^{m} exceeds the desk-scale limit {MAX_GRID}"
        )
    V = _signal_columns(transfer, d)

    outs = tuple(p.outcomes for p in mset)
    blocks = np.empty((int(np.prod(outs)), d, d), dtype=complex)
    for flat, t in enumerate(itertools.product(*[range(o) for o in outs])):
        ops = [mset.povms[j].elements[t[j]] for j in range(n)]
        ops += [None] * (m - n)  # unmeasured deficit arm: identity
        W = _apply_tensor(ops, V, d)
        el = V.conj().T @ W
        el = (el + el.conj().T) / 2
        if eta < 1.0:
            el = apply_dual(eta, el)
        blocks[flat] = el
    return ParentPovm(outs, blocks)


def verify_marginal_identity(mset: MeasurementSet, taus, eta: float = 1.0) -> float:
    """Worst-case gap between the parent marginals and the dual-loss images.

    Returns max over measurements j and outcomes a of
    || marginal_j(parent)_a - E*_{eta tau_j}(M^j_a) ||_max, which is zero up
    to rounding because both sides are exact under truncation.
    """
    parent = lon_parent(mset, taus, eta)
    taus = [float(t) for t in taus]
    worst = 0.0
    for j, p in enumerate(mset):
        marg = parent.marginal(j)
        for a, E in enumerate(p.elements):
            expect = apply_dual(eta * taus[j], E)
            worst = max(worst, float(np.abs(marg.elements[a] - expect).max()))
    return worst
