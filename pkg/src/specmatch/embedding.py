"""Commute-time and hypersphere embeddings, dimension selection, distances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import SpecmatchError
from .spectral import Spectrum


class InsufficientSpectrumError(SpecmatchError):
    """The spectrum holds fewer non-null pairs than the requested dimension."""


class ZeroNormColumnError(SpecmatchError):
    """A vertex embeds at the origin and cannot be projected to the sphere."""

    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"vertex {vertex} has zero-norm embedding coordinates")


@dataclass(frozen=True)
class Embedding:
    """K x n coordinates of the graph vertices in spectral space."""

    coords: np.ndarray            # K x n, columns are vertices
    kind: str                     # raw_laplacian | commute_time | hypersphere
    eigenvalues: np.ndarray       # the K source non-null eigenvalues

    @property
    def K(self) -> int:
        return self.coords.shape[0]

    @property
    def n(self) -> int:
        return self.coords.shape[1]


def commute_time_embedding(spectrum: Spectrum, K: int) -> Embedding:
    """Coordinates scaled by inverse square-root eigenvalues.

    Row k of the result is lambda_{k+1}^{-1/2} u_{k+1}^T, skipping the
    null pair. Euclidean distances in this space are commute-time
    distances up to the graph-volume factor.
    """
    if spectrum.source_kind != "combinatorial":
        raise ValueError("commute-time embedding requires a combinatorial spectrum")
    avail = spectrum.n_pairs - 1
    if K > avail:
        raise InsufficientSpectrumError(
            f"requested K={K} but spectrum has {avail} non-null pairs"
        )
    lam = spectrum.eigenvalues[1:K + 1]
    U = spectrum.eigenvectors[:, 1:K + 1]
    coords = (U / np.sqrt(lam)).T
    return Embedding(coords=coords, kind="commute_time", eigenvalues=lam.copy())


def raw_embedding(spectrum: Spectrum, K: int) -> Embedding:
    """Unscaled eigenvector coordinates (rows = non-null eigenvectors)."""
    avail = spectrum.n_pairs - 1
    if K > avail:
        raise InsufficientSpectrumError(
            f"requested K={K} but spectrum has {avail} non-null pairs"
        )
    lam = spectrum.eigenvalues[1:K + 1]
    coords = spectrum.eigenvectors[:, 1:K + 1].T.copy()
    return Embedding(coords=coords, kind="raw_laplacian", eigenvalues=lam.copy())


def commute_time_distance(
    spectrum: Spectrum, i: int, j: int, volume: float, K: int | None = None
) -> float:
    """Commute-time distance between vertices i and j.

    Uses the K leading non-null pairs (all available pairs when K is
    None). With the full spectrum this is exact; truncation gives the
    approximation registration actually works with.
    """
    if i == j:
        return 0.0
    avail = spectrum.n_pairs - 1
    K = avail if K is None else K
    emb = commute_time_embedding(spectrum, K)
    diff = emb.coords[:, i] - emb.coords[:, j]
    return float(np.sqrt(volume * float(diff @ diff)))


class DimensionSelection(NamedTuple):
    K: int
    theta_min: float
    reached: bool


def theta_min(eigenvalues, K: int, n: int) -> float:
    """Lower bound on the captured-variance ratio from K leading pairs.

    ``eigenvalues`` are the ascending non-null values; the bound uses
    only the K smallest of them plus the vertex count n.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if K < 1 or K > lam.size:
        raise ValueError(f"K={K} out of range for {lam.size} eigenvalues")
    inv = 1.0 / lam
    num = inv[:K].sum()
    den = inv[:K - 1].sum() + (n - K) * inv[K - 1]
    return float(num / den)


def theta_scree(eigenvalues, K: int) -> float:
    """Exact captured-variance ratio; needs the full non-null spectrum."""
    lam = np.asarray(eigenvalues, dtype=float)
    inv = 1.0 / lam
    return float(inv[:K].sum() / inv.sum())


def select_dimension(
    eigenvalues, n: int, theta_target: float = 0.95
) -> DimensionSelection:
    """Smallest K whose captured-variance lower bound reaches the target.

    Returns the number of available pairs with ``reached=False`` when no
    K attains the target.
    """
    if not 0.0 < theta_target < 1.0:
        raise ValueError(f"theta_target must be in (0,1), got {theta_target}")
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0:
        raise ValueError("need at least one non-null eigenvalue")
    for K in range(1, lam.size + 1):
        t = theta_min(lam, K, n)
        if t >= theta_target:
            return DimensionSelection(K=K, theta_min=t, reached=True)
    return DimensionSelection(K=lam.size, theta_min=theta_min(lam, lam.size, n),
                              reached=False)


def normalize_hypersphere(emb: Embedding) -> Embedding:
    """Scale every column to unit norm, placing vertices on the K-sphere."""
    norms = np.linalg.norm(emb.coords, axis=0)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroNormColumnError(int(zero[0]))
    return Embedding(
        coords=emb.coords / norms,
        kind="hypersphere",
        eigenvalues=emb.eigenvalues.copy(),
    )


def embedding_stats(emb: Embedding) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean vector and (1/n) X X^T covariance of the columns."""
    mean = emb.coords.mean(axis=1)
    cov = (emb.coords @ emb.coords.T) / emb.n
    return mean, cov


def dump_embedding(emb: Embedding, path) -> None:
    """Text dump: K rows of n coordinates, 17 significant digits."""
    with open(path, "w") as fh:
        for row in emb.coords:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")
