"""Per-point error metrics, the TSVD baseline, and experiment reports."""

from dataclasses import dataclass, field, asdict

import numpy as np

from .numerics import as_matrix, svd


def nrmse(S, S_tilde):
    """Per-column normalized recovery error ||s~_i - s_i|| / ||s_i||."""
    S = as_matrix(S, "S")
    S_tilde = as_matrix(S_tilde, "S_tilde")
    if S.shape != S_tilde.shape:
        raise ValueError(f"shape mismatch: {S.shape} vs {S_tilde.shape}")
    norms = np.linalg.norm(S, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ValueError(f"clean column {zero[0]} has zero norm")
    return np.linalg.norm(S_tilde - S, axis=0) / norms


def baseline_tsvd(X, r):
    """Keep the top-r singular triplets unmodified."""
    X = as_matrix(X, "X")
    q = min(X.shape)
    if not 0 <= r <= q:
        raise ValueError(f"rank must be in [0, {q}], got {r}")
    if r == 0:
        return np.zeros_like(X)
    f = svd(X)
    return (f.left[:, :r] * f.singular[:r]) @ f.right[:, :r].T


@dataclass
class ExperimentReport:
    nrmse: list
    nrmse_median: float
    nrmse_mean: float
    noise_ratio_median: float | None
    msnr_db: float | None
    wallclock_seconds: float
    config_echo: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def summarize(S, S_tilde, noise=None, timing=0.0, config=None):
    """Aggregate per-point NRMSE and noise statistics into a report."""
    errors = nrmse(S, S_tilde)
    ratio = None
    snr = None
    if noise is not None:
        noise = as_matrix(noise, "noise")
        if noise.shape != as_matrix(S).shape:
            raise ValueError("noise shape must match clean shape")
        ratio = float(
            np.median(np.linalg.norm(noise, axis=0) / np.linalg.norm(S, axis=0))
        )
        from .synth import msnr

        snr = msnr(S, noise)
    return ExperimentReport(
        nrmse=[float(e) for e in errors],
        nrmse_median=float(np.median(errors)),
        nrmse_mean=float(np.mean(errors)),
        noise_ratio_median=ratio,
        msnr_db=snr,
        wallclock_seconds=float(timing),
        config_echo=dict(config) if config else {},
    )
