import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_unitary(n, rng):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def random_complex(n, rng, m=None):
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)


def jordan_block(n, lam=0.0):
    j = np.diag(np.full(n - 1, 1.0 + 0.0j), 1) if n > 1 else np.zeros((1, 1), dtype=complex)
    return j + lam * np.eye(n, dtype=complex)


def block_diag(*blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    at = 0
    for b in blocks:
        m = b.shape[0]
        out[at : at + m, at : at + m] = b
        at += m
    return out
