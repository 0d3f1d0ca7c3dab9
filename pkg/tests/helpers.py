import numpy as np


def rand_unitary(N, rng, real=False):
    Z = rng.normal(size=(N, N))
    if not real:
        Z = Z + 1j * rng.normal(size=(N, N))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def rand_pd(N, kappa, rng, real=False, top=1.0):
    """Random PD matrix with spectrum exactly spanning [top/kappa, top]."""
    Q = rand_unitary(N, rng, real)
    w = rng.uniform(1 / kappa, 1, N)
    w[0] = 1 / kappa
    if N > 1:
        w[-1] = 1.0
    M = (Q * (top * w)) @ Q.conj().T
    return (M + M.conj().T) / 2


def rand_state(N, rng, kappa=None):
    """Full-rank density matrix; with ``kappa`` its smallest eigenvalue is >= 1/kappa."""
    Q = rand_unitary(N, rng)
    if kappa is None:
        w = rng.dirichlet(np.ones(N)) + 1e-3
    else:
        # eigenvalues 1/kappa + slack, summing to one
        w = 1 / kappa + rng.dirichlet(np.ones(N)) * (1 - N / kappa)
    w = w / w.sum()
    M = (Q * w) @ Q.conj().T
    return (M + M.conj().T) / 2


def commuting_family(N, rng, kA=4.0, kC=4.0, b_scale=0.3):
    """(A, B, C) in a shared real eigenbasis, so A^{-1}B is Hermitian."""
    Q = rand_unitary(N, rng, real=True)
    a = rng.uniform(1 / kA, 1, N)
    a[0] = 1 / kA
    c = rng.uniform(1 / kC, 1, N)
    b = rng.uniform(-b_scale, b_scale, N)
    mk = lambda w: (Q * w) @ Q.T
    return mk(a), mk(b), mk(c)
