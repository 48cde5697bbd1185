import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from movant.errors import RankDeficient
from movant.precoding import db_to_linear, sum_rate, zf_precoder


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def textbook_rate(H, snr):
    # pseudo-inverse ZF, columns normalised, equal power
    W = np.linalg.pinv(H)
    W = W / np.linalg.norm(W, axis=0)
    K = H.shape[0]
    sinr = snr / K * np.abs(np.diag(H @ W)) ** 2
    return np.sum(np.log2(1 + sinr))


def test_identity():
    assert np.allclose(zf_precoder(np.eye(2)), np.eye(2))
    r = sum_rate(np.eye(2), 2.0)
    assert r.sum_rate == pytest.approx(2.0)
    assert np.allclose(r.snr, [1, 1])


def test_single_user_unit():
    assert sum_rate(np.array([[1.0 + 0j]]), 1.0).sum_rate == pytest.approx(1.0)


def test_orthogonal_rows():
    c = 3.0
    Q, _ = np.linalg.qr(crandn(np.random.default_rng(1), 4, 4))
    H = c * Q[:2].conj()
    W = zf_precoder(H)
    assert np.allclose(W, H.conj().T / c)
    assert np.allclose(np.diag(H @ W), c)


def test_against_textbook_formula():
    rng = np.random.default_rng(7)
    for _ in range(50):
        H = crandn(rng, 4, 6)
        snr = 10 ** rng.uniform(-1, 2)
        r = sum_rate(H, snr)
        assert r.sum_rate == pytest.approx(textbook_rate(H, snr), rel=1e-10)
        assert np.allclose(r.rates, np.log2(1 + r.snr))
        assert r.sum_rate == pytest.approx(r.rates.sum())


def test_leakage_bound():
    rng = np.random.default_rng(0)
    for _ in range(200):
        H = crandn(rng, 4, 4)
        G = H @ zf_precoder(H)
        off = np.abs(G - np.diag(np.diag(G))).max()
        assert off <= 1e-9 * np.linalg.norm(H)


def test_rank_deficiency():
    H = np.ones((2, 2), complex)
    with pytest.raises(RankDeficient):
        zf_precoder(H)
    with pytest.raises(RankDeficient):
        zf_precoder(np.ones((3, 2)))
    with pytest.raises(RankDeficient):
        sum_rate(np.zeros((2, 2)), 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 10))
def test_scale_and_permutation(seed, c):
    rng = np.random.default_rng(seed)
    H = crandn(rng, 3, 4)
    base = sum_rate(H, 5.0)
    scaled = sum_rate(c * H, 5.0)
    assert np.allclose(scaled.snr, c * c * base.snr)
    perm = rng.permutation(3)
    p = sum_rate(H[perm], 5.0)
    assert np.allclose(p.rates, base.rates[perm])
    assert p.sum_rate == pytest.approx(base.sum_rate)


def test_monotone_in_snr():
    H = crandn(np.random.default_rng(2), 4, 4)
    rates = [sum_rate(H, s).sum_rate for s in db_to_linear(np.arange(-20, 31))]
    assert np.all(np.diff(rates) > 0)


def test_db_to_linear():
    assert db_to_linear(10) == pytest.approx(10.0)
    assert np.allclose(db_to_linear([0, -10]), [1, 0.1])
