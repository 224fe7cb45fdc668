#!/usr/bin/env python3
"""Monte-Carlo oracle for the separation-quality thresholds used in the
acceptance tests.

Implements SOBI twice (Jacobi joint diagonalization and the Schur route)
independently of the Rust code, runs the 4-source AR(1) recovery scenario
over many seeds, and reports the observed amari-index / matched-correlation
distributions so the test thresholds are frozen from evidence rather than
guessed.

Run from the repo root:  python3 scripts/mc_recovery_oracle.py
"""

import numpy as np
from scipy.linalg import schur
from scipy.signal import lfilter


def gen_ar1(phis, T, seed, burn=256):
    rng = np.random.default_rng(seed)
    S = np.empty((len(phis), T))
    for i, phi in enumerate(phis):
        e = rng.standard_normal(T + burn)
        x = lfilter([1.0], [1.0, -phi], e)[burn:]
        S[i] = (x - x.mean()) / x.std()
    return S


def sample_cov(Xc, tau):
    T = Xc.shape[1]
    return Xc[:, tau:] @ Xc[:, : T - tau].T / (T - tau)


def whiten(R0, n):
    lam, H = np.linalg.eigh(R0)
    idx = np.argsort(lam)[::-1]
    lam, H = lam[idx], H[:, idx]
    m = len(lam)
    sigma2 = lam[n:].mean() if n < m else 0.0
    W = ((lam[:n] - sigma2) ** -0.5)[:, None] * H[:, :n].T
    return W, sigma2


def jacobi_joint_diag(Ms, tol, max_sweeps=100):
    Ms = [M.copy() for M in Ms]
    n = Ms[0].shape[0]
    U = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                g11 = g22 = g12 = 0.0
                for M in Ms:
                    x = M[p, p] - M[q, q]
                    y = 2.0 * M[p, q]
                    g11 += x * x
                    g22 += y * y
                    g12 += x * y
                theta = 0.25 * np.arctan2(2.0 * g12, g11 - g22)
                c, s = np.cos(theta), np.sin(theta)
                if abs(s) < tol:
                    continue
                rotated = True
                for M in Ms:
                    rp = c * M[p, :] + s * M[q, :]
                    rq = -s * M[p, :] + c * M[q, :]
                    M[p, :], M[q, :] = rp, rq
                    cp = c * M[:, p] + s * M[:, q]
                    cq = -s * M[:, p] + c * M[:, q]
                    M[:, p], M[:, q] = cp, cq
                up = c * U[:, p] + s * U[:, q]
                uq = -s * U[:, p] + c * U[:, q]
                U[:, p], U[:, q] = up, uq
        if not rotated:
            break
    return U


def schur_unmix(M1):
    B, Q = schur(M1, output="real")
    n = B.shape[0]
    V = np.zeros((n, n))
    for i in range(n):
        v = np.zeros(n)
        v[i] = 1.0
        for j in range(i - 1, -1, -1):
            v[j] = -(B[j, j + 1 : i + 1] @ v[j + 1 : i + 1]) / (B[j, j] - B[i, i])
        V[:, i] = v / np.linalg.norm(v)
    Vq, r = np.linalg.qr(V)
    Vq = Vq * np.sign(np.diag(r))
    return Q @ Vq


def amari_index(G):
    n = G.shape[0]
    A = np.abs(G)
    rows = (A.sum(axis=1) / A.max(axis=1) - 1.0).sum()
    cols = (A.sum(axis=0) / A.max(axis=0) - 1.0).sum()
    return (rows + cols) / (2.0 * n * (n - 1))


def matched_corr(S, Shat):
    n = S.shape[0]
    C = np.abs(np.corrcoef(Shat, S)[:n, n:])
    pairs = []
    rows, cols = set(range(n)), set(range(n))
    work = C.copy()
    for _ in range(n):
        i, j = np.unravel_index(np.argmax(work), work.shape)
        pairs.append(C[i, j])
        work[i, :] = -1.0
        work[:, j] = -1.0
    return np.array(pairs)


def run_recovery(seed, phis=(0.5, 0.7, 0.8, 0.9), T=50000, sigma=0.01, L=100):
    n = len(phis)
    S = gen_ar1(phis, T, seed)
    rng = np.random.default_rng(seed + 10_000)
    A, _ = np.linalg.qr(rng.standard_normal((n, n)))
    X = A @ S + sigma * rng.standard_normal((n, T))
    Xc = X - X.mean(axis=1, keepdims=True)
    R0 = sample_cov(Xc, 0)
    W, _ = whiten(R0, n)
    G = W @ Xc
    Ms = []
    for tau in range(1, L + 1):
        C = sample_cov(G, tau)
        Ms.append(0.5 * (C + C.T))
    out = {}
    for name, U in (
        ("givens", jacobi_joint_diag(Ms, 1e-8 / np.sqrt(n))),
        ("schur", schur_unmix(Ms[0])),
    ):
        gain = U.T @ W @ A
        Shat = U.T @ (W @ Xc)
        out[name] = (amari_index(gain), matched_corr(S, Shat).min())
    return out


def main():
    print("== criterion: 4xAR1 recovery, T=50000, sigma=0.01, 20 seeds ==")
    stats = {"givens": [], "schur": []}
    for seed in range(20):
        res = run_recovery(seed)
        for k, v in res.items():
            stats[k].append(v)
        print(
            f"seed {seed:2d}  givens amari={res['givens'][0]:.4f} "
            f"min|r|={res['givens'][1]:.4f}   schur amari={res['schur'][0]:.4f} "
            f"min|r|={res['schur'][1]:.4f}"
        )
    for k, v in stats.items():
        am = np.array([x[0] for x in v])
        cr = np.array([x[1] for x in v])
        ok = np.sum((am < 0.05) & (cr > 0.99))
        print(
            f"{k}: amari max={am.max():.4f} med={np.median(am):.4f}  "
            f"min|r| min={cr.min():.4f}  pass(amari<0.05 & |r|>0.99): {ok}/20"
        )

    print("\n== AR1 phi=0.9 lag-1 sample autocovariance, T=50000, 50 seeds ==")
    devs = []
    for seed in range(50):
        s = gen_ar1([0.9], 50000, seed)[0]
        r1 = np.dot(s[1:], s[:-1]) / (len(s) - 1)
        devs.append(abs(r1 - 0.9))
    devs = np.array(devs)
    print(f"|rho1 - 0.9|: max={devs.max():.5f} mean={devs.mean():.5f} (threshold 0.02)")

    print("\n== matched correlation of independent noise, n=4, T=10000, 30 seeds ==")
    means = []
    for seed in range(30):
        rng = np.random.default_rng(seed)
        S = rng.standard_normal((4, 10000))
        Z = rng.standard_normal((4, 10000))
        means.append(matched_corr(S, Z).mean())
    means = np.array(means)
    print(f"mean|r|: max={means.max():.5f} (threshold 0.05)")

    print("\n== sinusoid 5Hz vs 11Hz @160Hz, T=4096, lag-0 cross-correlation ==")
    t = np.arange(4096)
    a = np.sin(2 * np.pi * 5 * t / 160.0 + 0.3)
    b = np.sin(2 * np.pi * 11 * t / 160.0 + 1.1)
    a = (a - a.mean()) / a.std()
    b = (b - b.mean()) / b.std()
    print(f"|r| = {abs(np.dot(a, b) / 4096):.6f} (threshold 0.02)")


if __name__ == "__main__":
    main()
