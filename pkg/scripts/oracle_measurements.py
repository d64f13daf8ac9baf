"""Stand-alone Monte Carlo oracle for the finite-n quantities frozen into the tests.

Deliberately does not import ``hdajscc``: codebooks, typical-angle selection,
decoding and reconstruction are rewritten here from the closed forms so the
numbers are an independent reference for the package.

    python scripts/oracle_measurements.py [--quick]
"""

import argparse

import numpy as np


def sphere(rng, M, n, r2):
    g = rng.standard_normal((M, n))
    return g * np.sqrt(n * r2) / np.linalg.norm(g, axis=1, keepdims=True)


def typical_angle(rng, S, cb, target, eps, batch=64):
    unit = cb / np.linalg.norm(cb[0])
    idx = np.full(len(S), -1)
    for lo in range(0, len(S), batch):
        blk = S[lo : lo + batch]
        cos = (blk / np.linalg.norm(blk, axis=1, keepdims=True)) @ unit.T
        for r, row in enumerate(np.abs(cos - target) <= eps):
            c = np.flatnonzero(row)
            if c.size:
                idx[lo + r] = rng.choice(c)
    return idx


def quantizer_failure(n, rho, eps, T, seed=11):
    rng = np.random.default_rng(seed)
    M = int(round(2 ** (n * rho)))
    r2 = 1 - 2 ** (-2 * rho)
    cb = sphere(rng, M, n, r2)
    S = rng.standard_normal((T, n))
    idx = typical_angle(rng, S, cb, np.sqrt(r2), eps)
    return (idx < 0).mean()


def decode_success(n, M, snr, T, books=20, seed=5):
    """Averaged over ``books`` independent codebooks, ``T`` draws each."""
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(books):
        cb = sphere(rng, M, n, 0.5)
        Y = cb[7] + rng.normal(0, np.sqrt(0.5 / snr), (T, n))
        hits += (np.argmax(Y @ cb.T, axis=1) == 7).sum()
    return hits / (books * T)


def scheme(n, rho, eps, delta, T, seed=3):
    """Genie and full distortion, power, failures at sigma2 = P = N = 1."""
    rng = np.random.default_rng(seed)
    a = np.sqrt((2 ** (-2 * rho) * 2 - 1) / 2 ** (-2 * rho))
    b = np.sqrt(2) - a
    D = 2 ** (-2 * rho)
    g = a * a * D / (a * a * D + 1)
    r2 = (1 - D) * (1 - delta) ** 2
    M = int(np.ceil(2 ** (n * rho) - 1e-9))
    cb = sphere(rng, M, n, r2)
    S = rng.standard_normal((T, n))
    idx = typical_angle(rng, S, cb, np.sqrt(r2), eps)
    U = np.where(idx[:, None] < 0, 0.0, cb[np.maximum(idx, 0)])
    X = a * S + b * U
    Z = rng.standard_normal((T, n))
    Y = X + Z
    Uh = cb[np.argmax(Y @ cb.T, axis=1)]
    rec = lambda u: u + (g / a) * (Y - (a + b) * u)
    ok = idx >= 0
    return dict(
        fail=(~ok).mean(),
        power=((X**2).sum(1) / n).mean(),
        genie=(((S - rec(U)) ** 2).sum(1) / n).mean(),
        full=(((S - rec(Uh)) ** 2).sum(1) / n).mean(),
        quant=(((S - U) ** 2).sum(1) / n)[ok].mean(),
        su=((S * U).sum(1) / n).mean(),
        zu=((Z * Uh).sum(1) / n).mean(),
    )


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    T = 2000 if ap.parse_args().quick else 10000

    print("typical-angle failure rate, rho=0.5, target=sqrt(0.5), eps=0.05")
    for n in (32, 36):
        print(f"  n={n}: {quantizer_failure(n, 0.5, 0.05, 2000):.4f}")

    print("P(decode u_7 | y = u_7 + noise), M=16, SNR=1, 20 codebooks")
    for n in (8, 16, 32):
        print(f"  n={n}: {decode_success(n, 16, 1.0, 2000):.4f}")

    print("scheme at sigma2=P=N=1, rho=0.25, delta=0.05")
    for eps_scale in (0.5, 4.0):
        for n in (16, 32, 48):
            r = scheme(n, 0.25, eps_scale / np.sqrt(n), 0.05, T)
            print(f"  eps={eps_scale}/sqrt(n) n={n}: " + " ".join(f"{k}={v:.4f}" for k, v in r.items()))


if __name__ == "__main__":
    main()
