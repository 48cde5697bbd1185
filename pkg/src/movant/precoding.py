"""Zero-forcing precoding and the sum-rate objective."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficient

RANK_TOL = 1e-10


@dataclass(frozen=True)
class RateReport:
    snr: np.ndarray        # per-user post-precoding SNR, linear
    rates: np.ndarray      # log2(1 + snr), bits/s/Hz
    sum_rate: float


def zf_precoder(H) -> np.ndarray:
    """Column-normalised zero-forcing precoder ``W`` (N x K) for channel ``H`` (K x N).

    Raises
    ------
    RankDeficient
        If the smallest singular value of ``H`` is below ``1e-10`` times the
        largest, e.g. when two elements coincide.
    """
    H = np.asarray(H, dtype=complex)
    K, N = H.shape
    if K > N:
        raise RankDeficient(f"{K} users but only {N} antennas")
    s = np.linalg.svd(H, compute_uv=False)
    if s[0] == 0 or s[-1] < RANK_TOL * s[0]:
        raise RankDeficient(f"channel condition {s[0] / max(s[-1], 1e-300):.3g} exceeds limit")
    Hh = H.conj().T
    W = Hh @ np.linalg.inv(H @ Hh)
    return W / np.linalg.norm(W, axis=0, keepdims=True)


def sum_rate(H, transmit_snr: float) -> RateReport:
    """ZF sum rate with the transmit power split equally over users.

    ``transmit_snr`` is total transmit power over noise power (linear).
    """
    H = np.asarray(H, dtype=complex)
    K = H.shape[0]
    W = zf_precoder(H)
    g = np.abs(np.einsum("kn,nk->k", H, W)) ** 2
    snr = transmit_snr / K * g
    rates = np.log2(1.0 + snr)
    return RateReport(snr, rates, float(rates.sum()))


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)
