"""Synthetic manifold samplers, noise generators, and the mSNR diagnostic."""

import math
from dataclasses import dataclass

import numpy as np

from .numerics import as_matrix, random_orthogonal


@dataclass
class ManifoldSpec:
    kind: str  # "m1" (Fourier circle) | "m3" (Klein bottle)
    p: int
    n: int
    seed: int


@dataclass
class NoiseSpec:
    kind: str  # "gaussian" | "separable"
    alpha: float
    seed: int


@dataclass
class SyntheticDataset:
    clean: np.ndarray    # p x n
    noisy: np.ndarray    # clean + noise / p^alpha
    noise: np.ndarray    # the scaled noise actually added
    latent: np.ndarray   # per-column intrinsic parameters
    msnr_db: float
    manifold: ManifoldSpec
    noise_spec: NoiseSpec


def sample_m1(p, n, seed):
    """Circle embedded via a decaying Fourier frame in the first 2*ceil(2p/5) axes."""
    if p < 5:
        raise ValueError(f"p must be >= 5, got {p}")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    J = math.ceil(2 * p / 5)
    S = np.zeros((p, n))
    for k in range(1, J + 1):
        S[2 * k - 2] = np.sin(k * theta) / (2 * k - 1)
        S[2 * k - 1] = np.cos(k * theta) / (2 * k)
    return S, theta


def sample_klein(p, n, seed):
    """Klein bottle embedded in the first four axes."""
    if p < 4:
        raise ValueError(f"p must be >= 4, got {p}")
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 2.0 * np.pi, size=n)
    s = rng.uniform(0.0, 2.0 * np.pi, size=n)
    S = np.zeros((p, n))
    S[0] = (2.0 * np.cos(t) + 1.0) * np.cos(s)
    S[1] = (2.0 * np.cos(t) + 1.0) * np.sin(s)
    S[2] = 2.0 * np.sin(t) * np.cos(s / 2.0)
    S[3] = 2.0 * np.sin(t) * np.sin(s / 2.0)
    return S, np.column_stack([t, s])


def gaussian_noise(p, n, seed):
    """i.i.d. standard-normal noise matrix."""
    rng = np.random.default_rng(seed)
    return rng.standard_normal((p, n))


_EIG_FLOOR = 0.05
_T5_SD = math.sqrt(5.0 / 3.0)


def _symmetric_gaussian(p, rng):
    """Symmetric matrix with i.i.d. N(0, 1/p) entries (upper triangle mirrored)."""
    G = rng.normal(0.0, 1.0 / math.sqrt(p), size=(p, p))
    return np.triu(G) + np.triu(G, k=1).T


def separable_noise(p, n, seed, with_row_cov=False):
    """Separable-covariance noise A^(1/2) Z B^(1/2).

    A has a three-level base spectrum (1, 1/4, 1/2) perturbed by scaled Wigner
    eigenvalues; B mixes uniform and Student-t6 eigenvalues; Z has Student-t5
    entries scaled to unit standard deviation. Eigenvalues at or below 0.05
    are resampled to keep both factors safely positive definite.

    Returns (noise, A eigenvalues, B eigenvalues); with_row_cov=True appends
    the full p x p row-covariance factor A for diagnostics.
    """
    if p < 3 or n < 2:
        raise ValueError(f"need p >= 3 and n >= 2, got p={p}, n={n}")
    ss = np.random.SeedSequence(seed).spawn(4)
    rng_a, rng_b, rng_z = (np.random.default_rng(s) for s in ss[:3])

    wig = np.sort(np.linalg.eigvalsh(_symmetric_gaussian(p, rng_a)))[::-1]
    third = p // 3
    base = np.empty(p)
    base[:third] = 1.0
    base[third : 2 * third] = 0.25
    base[2 * third :] = 0.5
    a_eigs = base + wig / 32.0
    for _ in range(100):
        bad = a_eigs <= _EIG_FLOOR
        if not bad.any():
            break
        a_eigs[bad] = base[bad] + rng_a.normal(0.0, 1.0, size=bad.sum()) / 32.0
    else:
        raise ValueError("could not obtain positive eigenvalues for A")

    half = n // 2
    b_eigs = np.empty(n)
    b_eigs[:half] = rng_b.uniform(0.0, 1.0, size=half) / 4.0 + 1.0 / 6.0
    b_eigs[half:] = rng_b.standard_t(6, size=n - half) / 8.0 + 1.0
    for _ in range(100):
        bad = b_eigs <= _EIG_FLOOR
        if not bad.any():
            break
        b_eigs[bad] = rng_b.standard_t(6, size=bad.sum()) / 8.0 + 1.0
    else:
        raise ValueError("could not obtain positive eigenvalues for B")

    ss_q, ss_qb = ss[3].spawn(2)
    Q = random_orthogonal(p, np.random.default_rng(ss_q))
    Qb = random_orthogonal(n, np.random.default_rng(ss_qb))
    Z = rng_z.standard_t(5, size=(p, n)) / _T5_SD

    # A^(1/2) Z = Q diag(sqrt(a)) Q^T Z, likewise on the right with B
    left = Q @ (np.sqrt(a_eigs)[:, None] * (Q.T @ Z))
    Xi = ((left @ Qb) * np.sqrt(b_eigs)[None, :]) @ Qb.T
    if with_row_cov:
        return Xi, a_eigs, b_eigs, Q @ (a_eigs[:, None] * Q.T)
    return Xi, a_eigs, b_eigs


def msnr(S, Xi):
    """Manifold SNR in dB: trace ratio of the empirical column covariances."""
    S = as_matrix(S, "S")
    Xi = as_matrix(Xi, "noise")
    if S.shape != Xi.shape:
        raise ValueError(f"shape mismatch: {S.shape} vs {Xi.shape}")
    tr_s = float(np.sum(np.var(S, axis=1, ddof=1)))
    tr_x = float(np.sum(np.var(Xi, axis=1, ddof=1)))
    if tr_x <= 0:
        raise ValueError("noise covariance trace is zero")
    return 10.0 * math.log10(tr_s / tr_x)


def make_dataset(mspec, nspec):
    """Generate a clean manifold sample plus scaled noise per the two specs."""
    if mspec.kind == "m1":
        clean, latent = sample_m1(mspec.p, mspec.n, mspec.seed)
    elif mspec.kind == "m3":
        clean, latent = sample_klein(mspec.p, mspec.n, mspec.seed)
    else:
        raise ValueError(f"unknown manifold kind {mspec.kind!r}")

    if nspec.kind == "gaussian":
        raw = gaussian_noise(mspec.p, mspec.n, nspec.seed)
    elif nspec.kind == "separable":
        raw, _, _ = separable_noise(mspec.p, mspec.n, nspec.seed)
    else:
        raise ValueError(f"unknown noise kind {nspec.kind!r}")
    if nspec.alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {nspec.alpha}")

    noise = raw / mspec.p ** nspec.alpha
    return SyntheticDataset(
        clean=clean,
        noisy=clean + noise,
        noise=noise,
        latent=latent,
        msnr_db=msnr(clean, noise),
        manifold=mspec,
        noise_spec=nspec,
    )
