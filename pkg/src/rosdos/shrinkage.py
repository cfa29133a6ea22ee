"""Data-driven optimal singular-value shrinkage for separable-covariance noise.

Estimates the noise bulk edge and effective rank from the observed spectrum
alone, imputes the leading noise eigenvalues, plugs them into empirical
Stieltjes-transform quantities, and nonlinearly shrinks the kept singular
values to produce the denoised low-rank matrix.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .numerics import as_matrix, round_half_up, svd

# 1 / (2^(2/3) - 1), the spread coefficient of the bulk-edge extrapolation
_EDGE_COEF = 1.0 / (2.0 ** (2.0 / 3.0) - 1.0)


class ShrinkageError(ValueError):
    """Invalid input to a shrinkage operation."""


class DegenerateShrinkageError(ShrinkageError):
    """A component sits too close to the noise bulk to be shrunk reliably."""

    def __init__(self, component, detail=""):
        self.component = component
        msg = f"degenerate shrinkage for component {component}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


@dataclass
class StieltjesEstimates:
    m1: float
    m2: float
    m1p: float
    m2p: float
    T: float
    Tp: float


@dataclass
class ShrinkageOutput:
    spectrum: np.ndarray        # noisy eigenvalues of X X^T (after orientation)
    bulk_edge: float
    rank_threshold: float
    effective_rank: int
    imputed: np.ndarray
    shrunk: np.ndarray          # one value per kept component
    kept: np.ndarray            # indices (0-based) of kept components
    denoised: np.ndarray        # p x n, original orientation
    aspect: float               # beta = min(p,n)/max(p,n)
    transposed: bool
    warnings: list = field(default_factory=list)


def estimate_bulk_edge(spectrum, n):
    """Extrapolate the right edge of the noise bulk from order statistics."""
    lam = np.asarray(spectrum, dtype=float)
    m = round_half_up(n ** 0.25)
    if lam.size <= 2 * m + 1:
        raise ShrinkageError(
            f"spectrum length {lam.size} too short; need more than {2 * m + 1}"
        )
    return float(lam[m] + _EDGE_COEF * (lam[m] - lam[2 * m]))


def estimate_effective_rank(spectrum, bulk_edge, n):
    """Count eigenvalues above the bulk edge plus the n^(-1/3) safety margin."""
    lam = np.asarray(spectrum, dtype=float)
    threshold = bulk_edge + n ** (-1.0 / 3.0)
    return int(np.sum(lam > threshold))


def impute_noise_eigs(spectrum, k):
    """Impute the k leading noise eigenvalues hidden under the signal spikes.

    Interpolates between the bulk-edge extrapolation (j=1) and the observed
    (k+1)-th eigenvalue (j -> k) using the same 2/3-exponent profile.
    """
    lam = np.asarray(spectrum, dtype=float)
    if k < 1:
        raise ShrinkageError(f"k must be >= 1, got {k}")
    if lam.size < 2 * k + 1:
        raise ShrinkageError(
            f"spectrum length {lam.size} too short for k={k}; need >= {2 * k + 1}"
        )
    j = np.arange(1, k + 1, dtype=float)
    profile = (1.0 - ((j - 1.0) / k) ** (2.0 / 3.0)) * _EDGE_COEF
    return lam[k] + profile * (lam[k] - lam[2 * k])


def stieltjes_estimates(spectrum, imputed, i, beta):
    """Empirical Stieltjes-transform quantities at the i-th (0-based) spike.

    The first len(imputed) noisy eigenvalues are replaced by the imputed noise
    eigenvalues; the remainder of the spectrum enters as observed.
    """
    lam = np.asarray(spectrum, dtype=float)
    imp = np.asarray(imputed, dtype=float)
    k = imp.size
    p = lam.size
    li = lam[i]
    if li <= 0:
        raise DegenerateShrinkageError(i, "nonpositive eigenvalue")
    tail = lam[k:]
    if np.any(imp >= li) or np.any(tail >= li):
        raise DegenerateShrinkageError(
            i, "eigenvalue not separated from the imputed bulk"
        )
    m1 = (np.sum(1.0 / (imp - li)) + np.sum(1.0 / (tail - li))) / p
    m2 = beta * m1 - (1.0 - beta) / li
    m1p = (np.sum(1.0 / (imp - li) ** 2) + np.sum(1.0 / (tail - li) ** 2)) / p
    m2p = (1.0 - beta) / li ** 2 + beta * m1p
    T = li * m1 * m2
    Tp = m1 * m2 + li * m1p * m2 + li * m1 * m2p
    if T <= 0 or Tp >= 0:
        raise DegenerateShrinkageError(i, f"T={T:.3g}, Tp={Tp:.3g}")
    return StieltjesEstimates(m1=m1, m2=m2, m1p=m1p, m2p=m2p, T=T, Tp=Tp)


def shrink_singular_value(lam_i, est):
    """Optimally shrunk singular value for an outlier eigenvalue lam_i."""
    phi2 = 1.0 / est.T
    a1 = est.m1 / (phi2 * est.Tp)
    a2 = est.m2 / (phi2 * est.Tp)
    prod = a1 * a2
    if prod <= 0:
        raise DegenerateShrinkageError(-1, f"a1*a2={prod:.3g}")
    d = np.sqrt(phi2) * np.sqrt(prod)
    if not np.isfinite(d) or d <= 0:
        raise DegenerateShrinkageError(-1, f"d={d!r}")
    return float(d)


def eoptshrink(X, k=10, center=False):
    """Denoise X by nonlinear shrinkage of its singular values.

    k is the noise-eigenvalue imputation count; it is raised automatically to
    effective_rank + 5 when the detected rank reaches it. With center=True the
    mean column is removed before shrinkage and added back afterwards.
    """
    X = as_matrix(X, "X")
    p, n = X.shape
    mean_col = None
    if center:
        mean_col = X.mean(axis=1, keepdims=True)
        X = X - mean_col

    transposed = p > n
    Xw = X.T if transposed else X
    pw, nw = Xw.shape

    m_edge = round_half_up(nw ** 0.25)
    if pw <= 2 * max(k, m_edge) + 1:
        raise ShrinkageError(
            f"matrix too small: min(p,n)={pw} must exceed "
            f"{2 * max(k, m_edge) + 1} for k={k}, n={nw}"
        )

    factors = svd(Xw)
    spectrum = factors.singular ** 2
    beta = pw / nw
    notes = []

    edge = estimate_bulk_edge(spectrum, nw)
    threshold = edge + nw ** (-1.0 / 3.0)
    r = estimate_effective_rank(spectrum, edge, nw)

    if r >= k:
        k_new = r + 5
        if spectrum.size >= 2 * k_new + 1:
            notes.append(f"imputation count raised from {k} to {k_new}")
            k = k_new
        else:
            raise ShrinkageError(
                f"effective rank {r} >= k={k} and the spectrum is too short "
                f"to raise k to {k_new}"
            )

    kept = []
    shrunk = []
    imputed = np.array([])
    if r > 0:
        imputed = impute_noise_eigs(spectrum, k)
        for i in range(r):
            try:
                est = stieltjes_estimates(spectrum, imputed, i, beta)
                d = shrink_singular_value(spectrum[i], est)
            except DegenerateShrinkageError as exc:
                notes.append(f"component {i} dropped: {exc}")
                continue
            kept.append(i)
            shrunk.append(d)
    else:
        notes.append("effective rank 0: denoised matrix is zero")

    kept = np.asarray(kept, dtype=int)
    shrunk = np.asarray(shrunk, dtype=float)
    if kept.size:
        denoised = (factors.left[:, kept] * shrunk) @ factors.right[:, kept].T
    else:
        denoised = np.zeros_like(Xw)
    if transposed:
        denoised = denoised.T
    if mean_col is not None:
        denoised = denoised + mean_col

    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    return ShrinkageOutput(
        spectrum=spectrum,
        bulk_edge=edge,
        rank_threshold=threshold,
        effective_rank=r,
        imputed=imputed,
        shrunk=shrunk,
        kept=kept,
        denoised=denoised,
        aspect=beta,
        transposed=transposed,
        warnings=notes,
    )
