"""The three-step manifold denoiser: global metric, local shrinkage metric,
and k-NN entrywise-median recovery."""

import time
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from . import diffusion, shrinkage
from .numerics import as_matrix, entrywise_median, pairwise_sq_dist

MODE_ROSELAND = "roseland"
MODE_GLOBAL_SHRINK = "global-shrink"
MODE_SHRINK_ONLY = "shrink-only"
_MODES = (MODE_ROSELAND, MODE_GLOBAL_SHRINK, MODE_SHRINK_ONLY)


@dataclass
class PipelineConfig:
    global_mode: str = MODE_ROSELAND
    h: object = "auto"          # bandwidth, positive float or "auto"
    gamma: float = 0.5          # landmark count exponent, m = round(n^gamma)
    q_prime: int = 10           # embedding dimension (clipped to valid range)
    t: float = 1                # diffusion time
    K: int = 100                # global neighborhood size
    k_local: int = 20           # recovery neighbor count (self included)
    k_imp: int = 10             # shrinkage imputation count
    seed: int = 0

    def validate(self, n):
        if self.global_mode not in _MODES:
            raise ValueError(
                f"global_mode must be one of {_MODES}, got {self.global_mode!r}"
            )
        if not 1 <= self.k_local < self.K < n:
            raise ValueError(
                f"need 1 <= k ({self.k_local}) < K ({self.K}) < n ({n})"
            )
        if self.q_prime < 1:
            raise ValueError(f"q_prime must be >= 1, got {self.q_prime}")
        if self.k_imp < 1:
            raise ValueError(f"k_imp must be >= 1, got {self.k_imp}")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma}")
        if self.h != "auto" and not (np.isreal(self.h) and self.h > 0):
            raise ValueError(f"h must be positive or 'auto', got {self.h!r}")

    def to_dict(self):
        return asdict(self)


@dataclass
class GlobalMetric:
    kind: str                   # "diffusion" | "euclidean-denoised"
    coords: np.ndarray          # n x q points whose Euclidean metric is d_global
    shrink: object = None       # ShrinkageOutput when built from eoptshrink

    def distance(self, i, j):
        return float(np.linalg.norm(self.coords[i] - self.coords[j]))

    def neighborhoods(self, K, block=512):
        """K nearest neighbor indices (excluding self) for every point."""
        n = self.coords.shape[0]
        P = self.coords.T
        out = np.empty((n, K), dtype=int)
        for start in range(0, n, block):
            stop = min(start + block, n)
            D = pairwise_sq_dist(P[:, start:stop], P)
            order = np.argsort(D, axis=1, kind="stable")
            for r, i in enumerate(range(start, stop)):
                row = order[r]
                out[i] = row[row != i][:K]
        return out


@dataclass
class Diagnostics:
    global_mode: str
    global_effective_rank: int | None
    local_ranks: list
    fallbacks: int
    timings: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def global_metric(X, cfg):
    """Step 1: a noise-robust global similarity metric over the samples."""
    X = as_matrix(X, "X")
    n = X.shape[1]
    cfg.validate(n)
    if cfg.global_mode == MODE_ROSELAND:
        landmarks = diffusion.select_landmarks(X, cfg.gamma, cfg.seed)
        h = cfg.h if cfg.h != "auto" else diffusion.auto_bandwidth(X, landmarks)
        q = min(cfg.q_prime, min(n, landmarks.size) - 1)
        emb = diffusion.roseland_embed(X, landmarks, h, q, cfg.t)
        return GlobalMetric(kind="diffusion", coords=emb.coords)
    out = shrinkage.eoptshrink(X, k=cfg.k_imp)
    return GlobalMetric(
        kind="euclidean-denoised", coords=out.denoised.T, shrink=out
    )


def local_denoise(X, i, cfg, metric=None, neighbors=None):
    """Step 2: shrink the K+1 local patch around point i and return its
    neighborhood (self first) with the local denoised distances."""
    X = as_matrix(X, "X")
    cfg.validate(X.shape[1])
    if neighbors is None:
        if metric is None:
            metric = global_metric(X, cfg)
        neighbors = metric.neighborhoods(cfg.K)[i]
    patch = np.concatenate([[i], np.asarray(neighbors, dtype=int)])
    Xi = X[:, patch]
    dists, _, _ = _local_distances(Xi, cfg)
    return patch, dists


def _local_distances(Xi, cfg):
    """Denoised distances from column 0 of a local patch; falls back to raw
    Euclidean distances when the local shrinkage degenerates."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            out = shrinkage.eoptshrink(Xi, k=cfg.k_imp)
        Sh = out.denoised
        d = np.linalg.norm(Sh - Sh[:, :1], axis=0)
        return d, out.effective_rank, False
    except shrinkage.ShrinkageError:
        d = np.linalg.norm(Xi - Xi[:, :1], axis=0)
        return d, -1, True


def recover_point(Xi, local_dists, k_local):
    """Step 3: entrywise median of the k_local locally-nearest noisy columns."""
    Xi = as_matrix(Xi, "Xi")
    d = np.asarray(local_dists, dtype=float)
    if d.size != Xi.shape[1]:
        raise ValueError("local_dists length must match the patch width")
    if not 1 <= k_local <= Xi.shape[1]:
        raise ValueError(
            f"k_local must be in [1, {Xi.shape[1]}], got {k_local}"
        )
    sel = np.argsort(d, kind="stable")[:k_local]
    return entrywise_median(Xi[:, sel])


def rosdos(X, cfg):
    """Run the full denoiser and return (denoised matrix, diagnostics)."""
    X = as_matrix(X, "X")
    p, n = X.shape
    cfg.validate(n)
    timings = {}

    t0 = time.perf_counter()
    metric = global_metric(X, cfg)
    global_out = metric.shrink
    timings["global_metric"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    hoods = metric.neighborhoods(cfg.K)
    timings["neighborhoods"] = time.perf_counter() - t0

    skip_local = cfg.global_mode == MODE_SHRINK_ONLY
    local_ranks = []
    fallbacks = 0
    recovered = np.empty_like(X)
    t0 = time.perf_counter()
    for i in range(n):
        patch = np.concatenate([[i], hoods[i]])
        Xi = X[:, patch]
        if skip_local:
            diffs = metric.coords[patch] - metric.coords[i]
            dists = np.linalg.norm(diffs, axis=1)
        else:
            dists, rank, fell_back = _local_distances(Xi, cfg)
            local_ranks.append(rank)
            fallbacks += fell_back
        recovered[:, i] = recover_point(Xi, dists, cfg.k_local)
    timings["recovery"] = time.perf_counter() - t0

    diag = Diagnostics(
        global_mode=cfg.global_mode,
        global_effective_rank=(
            global_out.effective_rank if global_out is not None else None
        ),
        local_ranks=local_ranks,
        fallbacks=fallbacks,
        timings=timings,
        warnings=list(global_out.warnings) if global_out is not None else [],
    )
    return recovered, diag
