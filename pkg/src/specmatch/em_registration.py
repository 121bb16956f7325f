"""EM point registration in the spectral embedding space.

The first shape's embedded points act as Gaussian cluster centers under
an unknown orthogonal transformation; the second shape's points are the
data. An extra uniform component over the unit ball absorbs outliers.
The algorithm alternates posterior assignment with a closed-form
orthogonal update until the likelihood stalls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import gammaln, logsumexp

from .errors import SpecmatchError

SIGMA_FLOOR = 1e-12


class LikelihoodError(SpecmatchError):
    """The likelihood became non-finite (variance underflow)."""


def unit_ball_volume(K: int) -> float:
    return float(np.exp((K / 2.0) * np.log(np.pi) - gammaln(K / 2.0 + 1.0)))


@dataclass(frozen=True)
class GmmParams:
    """Mixture parameters: orthogonal alignment, isotropic variance, priors."""

    R: np.ndarray            # K x K orthogonal
    sigma: float             # isotropic variance
    pi_in: float             # shared per-cluster prior
    pi_out: float            # outlier prior; n * pi_in + pi_out = 1
    uniform_const: float     # the constant multiplying sigma^{K/2} in the posterior

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        object.__setattr__(self, "R", R)
        K = R.shape[0]
        if np.linalg.norm(R.T @ R - np.eye(K)) > 1e-8:
            raise ValueError("R is not orthogonal")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @property
    def K(self) -> int:
        return self.R.shape[0]


def make_params(R: np.ndarray, sigma: float, n: int, pi_out: float = 0.01) -> GmmParams:
    """Build mixture parameters with the uniform component supported on the
    unit ball (the hypersphere-normalized coordinates live inside it)."""
    if not 0.0 <= pi_out < 1.0:
        raise ValueError(f"pi_out must be in [0, 1), got {pi_out}")
    R = np.asarray(R, dtype=float)
    K = R.shape[0]
    pi_in = (1.0 - pi_out) / n
    if pi_out == 0.0:
        uniform_const = 0.0
    else:
        density = 1.0 / unit_ball_volume(K)
        uniform_const = (pi_out / pi_in) * (2.0 * np.pi) ** (K / 2.0) * density
    return GmmParams(
        R=R,
        sigma=max(sigma, SIGMA_FLOOR),
        pi_in=pi_in,
        pi_out=pi_out,
        uniform_const=uniform_const,
    )


def _sq_distances(X: np.ndarray, X_data: np.ndarray, R: np.ndarray) -> np.ndarray:
    """m x n squared distances between data points and transformed centers."""
    return cdist(X_data.T, (R @ X).T, metric="sqeuclidean")


def e_step(X: np.ndarray, X_data: np.ndarray, params: GmmParams) -> np.ndarray:
    """Row-stochastic m x (n+1) posterior; the last column is the outlier class.

    Rows are computed with a max-shift before exponentiation, so very
    small variances do not underflow.
    """
    D2 = _sq_distances(X, X_data, params.R)
    E = -D2 / (2.0 * params.sigma)
    if params.uniform_const > 0.0:
        log_u = np.log(params.uniform_const) + (params.K / 2.0) * np.log(params.sigma)
    else:
        log_u = -np.inf
    shift = np.maximum(E.max(axis=1), log_u if np.isfinite(log_u) else -np.inf)
    num = np.exp(E - shift[:, None])
    out = np.exp(log_u - shift) if np.isfinite(log_u) else np.zeros(E.shape[0])
    denom = num.sum(axis=1) + out
    posterior = np.empty((E.shape[0], E.shape[1] + 1))
    posterior[:, :-1] = num / denom[:, None]
    posterior[:, -1] = out / denom
    return posterior


def m_step(
    X: np.ndarray, X_data: np.ndarray, posterior: np.ndarray
) -> tuple[np.ndarray, float, bool]:
    """Closed-form orthogonal alignment and variance update.

    Returns (R, sigma, degenerate). R is the orthogonal polar factor of
    the posterior-weighted cross-covariance; reflections are allowed.
    ``degenerate`` is set when the cross-covariance is rank deficient,
    in which case the factorization completes the rotation
    deterministically on the null space.
    """
    alpha = np.asarray(posterior, dtype=float)
    if alpha.shape[1] == X.shape[1] + 1:
        alpha = alpha[:, :-1]
    cross = X_data @ alpha @ X.T
    A, svals, Bt = np.linalg.svd(cross)
    R = A @ Bt
    degenerate = bool(svals.size and svals[-1] <= 1e-12 * max(svals[0], 1e-300))

    D2 = _sq_distances(X, X_data, R)
    total = alpha.sum()
    if total <= 0:
        raise ValueError("posterior carries no inlier mass")
    sigma = float((alpha * D2).sum() / (X.shape[0] * total))
    return R, max(sigma, SIGMA_FLOOR), degenerate


def log_likelihood(X: np.ndarray, X_data: np.ndarray, params: GmmParams) -> float:
    """Observed-data log-likelihood of the mixture (the EM objective)."""
    K = params.K
    D2 = _sq_distances(X, X_data, params.R)
    log_gauss = (
        np.log(params.pi_in)
        - (K / 2.0) * np.log(2.0 * np.pi * params.sigma)
        - D2 / (2.0 * params.sigma)
    )
    if params.pi_out > 0.0:
        log_out = np.log(params.pi_out) + np.log(1.0 / unit_ball_volume(K))
        terms = np.concatenate(
            [log_gauss, np.full((D2.shape[0], 1), log_out)], axis=1
        )
    else:
        terms = log_gauss
    return float(logsumexp(terms, axis=1).sum())


def expected_complete_log_likelihood(
    X: np.ndarray, X_data: np.ndarray, params: GmmParams, posterior: np.ndarray
) -> float:
    """Posterior-weighted fit term the M-step maximizes over (R, sigma)."""
    alpha = posterior[:, :-1] if posterior.shape[1] == X.shape[1] + 1 else posterior
    D2 = _sq_distances(X, X_data, params.R)
    K = params.K
    return float(-0.5 * (alpha * (D2 / params.sigma + K * np.log(params.sigma))).sum())


@dataclass(frozen=True)
class EmOptions:
    tol: float = 1e-6
    max_iter: int = 100
    pi_out: float = 0.01
    sigma0: float | None = None
    map_threshold: float = 0.5


@dataclass(frozen=True)
class Correspondence:
    """Soft and hard assignments from the second shape onto the first."""

    posterior: np.ndarray                 # m x (n+1), row-stochastic
    map_matches: list = field(default_factory=list)   # (j, i) accepted pairs
    unmatched: list = field(default_factory=list)     # j indices left out
    iterations: int = 0
    log_likelihood: float = float("-inf")
    log_likelihood_trace: np.ndarray = None
    expected_log_likelihood: float = float("-inf")
    params: GmmParams = None
    degenerate: bool = False


def initial_sigma(X: np.ndarray, X_data: np.ndarray, R0: np.ndarray) -> float:
    """Mean over data points of the squared distance to the nearest center."""
    D2 = _sq_distances(X, X_data, R0)
    return float(D2.min(axis=1).mean())


def em_register(
    X: np.ndarray,
    X_data: np.ndarray,
    R0: np.ndarray,
    opts: EmOptions = EmOptions(),
) -> Correspondence:
    """Register the data point set onto the cluster set starting from R0.

    X is K x n (cluster centers), X_data is K x m. R0 is typically the
    signed permutation produced by the eigenbasis alignment. Iterates
    until the relative log-likelihood change drops below ``opts.tol`` or
    ``opts.max_iter`` is hit, then accepts the assignments whose
    posterior strictly exceeds the MAP threshold.
    """
    X = np.asarray(X, dtype=float)
    X_data = np.asarray(X_data, dtype=float)
    K, n = X.shape
    if X_data.shape[0] != K:
        raise ValueError("embeddings must share the same dimension K")
    R0 = np.asarray(R0, dtype=float)

    sigma = opts.sigma0 if opts.sigma0 is not None else initial_sigma(X, X_data, R0)
    params = make_params(R0, max(sigma, SIGMA_FLOOR), n, pi_out=opts.pi_out)

    trace = []
    posterior = None
    degenerate = False
    prev_ll = -np.inf
    iterations = 0
    for iterations in range(1, opts.max_iter + 1):
        posterior = e_step(X, X_data, params)
        ll = log_likelihood(X, X_data, params)
        if not np.isfinite(ll):
            raise LikelihoodError(f"non-finite log-likelihood at iteration {iterations}")
        trace.append(ll)
        R, sigma, degenerate = m_step(X, X_data, posterior)
        params = make_params(R, sigma, n, pi_out=opts.pi_out)
        if np.isfinite(prev_ll):
            denom = max(abs(prev_ll), 1e-30)
            if abs(ll - prev_ll) / denom < opts.tol:
                break
        prev_ll = ll

    posterior = e_step(X, X_data, params)
    best = posterior[:, :-1].max(axis=1, initial=-np.inf)
    winners = posterior[:, :-1].argmax(axis=1) if n else np.zeros(0, dtype=int)
    map_matches = [
        (int(j), int(winners[j]))
        for j in range(X_data.shape[1])
        if best[j] > opts.map_threshold
    ]
    matched = {j for j, _ in map_matches}
    unmatched = [j for j in range(X_data.shape[1]) if j not in matched]
    final_ll = log_likelihood(X, X_data, params)
    return Correspondence(
        posterior=posterior,
        map_matches=map_matches,
        unmatched=unmatched,
        iterations=iterations,
        log_likelihood=final_ll,
        log_likelihood_trace=np.array(trace + [final_ll]),
        expected_log_likelihood=expected_complete_log_likelihood(
            X, X_data, params, posterior
        ),
        params=params,
        degenerate=degenerate,
    )


def write_correspondence_tsv(corr: Correspondence, path) -> None:
    """`j<TAB>i<TAB>posterior` per accepted match; unmatched rows use i = -1."""
    post = corr.posterior
    matched = dict(corr.map_matches)
    with open(path, "w") as fh:
        for j in range(post.shape[0]):
            if j in matched:
                i = matched[j]
                fh.write(f"{j}\t{i}\t{post[j, i]:.17g}\n")
            else:
                fh.write(f"{j}\t-1\t{post[j, -1]:.17g}\n")
