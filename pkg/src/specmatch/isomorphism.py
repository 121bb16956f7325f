"""Small-scale spectral graph isomorphism: exact sign enumeration, the
eigendecomposition matching heuristic, and eigenvalue-gap bounds."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError
from .matutil import PermutationMatrix, frobenius_norm, hungarian

EXACT_SIZE_LIMIT = 12


@dataclass(frozen=True)
class IsoResult:
    """Outcome of a spectral matching attempt between two adjacency matrices."""

    permutation: PermutationMatrix
    signs: np.ndarray            # diagonal +-1 vector applied to eigenvectors
    residual: float              # ||A_A - P A_B P^T||_F
    exact: bool
    degenerate: bool = False     # spectrum had near-equal adjacent eigenvalues


def _checked_eigh(A, gap_tol: float, strict: bool):
    vals, vecs = np.linalg.eigh(A)
    gaps = np.diff(vals)
    degenerate = bool(gaps.size and gaps.min() <= gap_tol)
    if degenerate and strict:
        raise DegenerateSpectrumError(
            f"adjacent eigenvalue gap {gaps.min():.3e} below {gap_tol:.3e}"
        )
    return vals, vecs, degenerate


def _conjugation_residual(A_A, A_B, perm: PermutationMatrix) -> float:
    P = perm.to_matrix()
    return frobenius_norm(A_A - P @ A_B @ P.T)


def exact_spectral_isomorphism(A_A, A_B, gap_tol: float = 1e-8) -> IsoResult | None:
    """Exact isomorphism by enumerating the 2^n eigenvector sign choices.

    Each sign matrix S yields a candidate U_B S U_A^T; candidates whose
    entries round to a valid permutation are verified against the
    conjugation identity. Returns None when the spectra differ or no
    sign choice produces a permutation.
    """
    A_A = np.asarray(A_A, dtype=float)
    A_B = np.asarray(A_B, dtype=float)
    n = A_A.shape[0]
    if A_A.shape != A_B.shape or A_A.shape != (n, n):
        raise ValueError("inputs must be square matrices of equal size")
    if n > EXACT_SIZE_LIMIT:
        raise ValueError(f"exact enumeration limited to n <= {EXACT_SIZE_LIMIT}")

    vals_a, U_A, _ = _checked_eigh(A_A, gap_tol, strict=True)
    vals_b, U_B, _ = _checked_eigh(A_B, gap_tol, strict=True)
    scale = max(1.0, np.abs(vals_a).max())
    if np.abs(vals_a - vals_b).max() > 1e-6 * scale:
        return None  # different spectra: no isomorphism possible

    norm_a = frobenius_norm(A_A)
    for signs in itertools.product((1.0, -1.0), repeat=n):
        s = np.array(signs)
        cand = (U_A * s) @ U_B.T
        rounded = np.rint(cand)
        if np.abs(cand - rounded).max() > 1e-6:
            continue
        if not np.all((rounded == 0.0) | (rounded == 1.0)):
            continue
        if not (np.all(rounded.sum(axis=0) == 1) and np.all(rounded.sum(axis=1) == 1)):
            continue
        perm = PermutationMatrix(np.argmax(rounded, axis=1))
        residual = _conjugation_residual(A_A, A_B, perm)
        if residual <= 1e-8 * max(norm_a, 1.0):
            return IsoResult(
                permutation=perm, signs=s, residual=residual, exact=True
            )
    return None


def umeyama_match(A_A, A_B, gap_tol: float = 1e-8, refine: bool = False) -> IsoResult:
    """Relaxed spectral matching via absolute-eigenvector assignment.

    Builds the entrywise absolute eigenvector matrices (ascending
    eigenvalue order), maximizes the trace of their product over
    permutations with the assignment solver, then recovers per-column
    signs. Near-degenerate spectra are flagged but still processed.
    """
    A_A = np.asarray(A_A, dtype=float)
    A_B = np.asarray(A_B, dtype=float)
    n = A_A.shape[0]
    if A_A.shape != A_B.shape or A_A.shape != (n, n):
        raise ValueError("inputs must be square matrices of equal size")

    _, U_A, deg_a = _checked_eigh(A_A, gap_tol, strict=False)
    _, U_B, deg_b = _checked_eigh(A_B, gap_tol, strict=False)
    degenerate = deg_a or deg_b
    if degenerate:
        warnings.warn(
            "near-degenerate spectrum: matching heuristic may be unreliable",
            RuntimeWarning,
            stacklevel=2,
        )

    score = np.abs(U_A) @ np.abs(U_B).T
    perm = hungarian(score, sense="max")
    PU_B = perm.apply_to_rows(U_B)  # rows of U_B put in A's order
    signs = np.sign(np.einsum("ij,ij->j", U_A, PU_B))
    signs[signs == 0] = 1.0

    if refine:
        perm = _transposition_descent(A_A, A_B, perm)
        PU_B = perm.apply_to_rows(U_B)
        signs = np.sign(np.einsum("ij,ij->j", U_A, PU_B))
        signs[signs == 0] = 1.0

    residual = _conjugation_residual(A_A, A_B, perm)
    exact = residual <= 1e-8 * max(frobenius_norm(A_A), 1.0)
    return IsoResult(
        permutation=perm,
        signs=signs,
        residual=residual,
        exact=exact,
        degenerate=degenerate,
    )


def _transposition_descent(
    A_A, A_B, perm: PermutationMatrix, max_moves: int = 1000
) -> PermutationMatrix:
    """Greedy pairwise-transposition descent on the conjugation residual."""
    mapping = perm.mapping.copy()
    n = mapping.size
    best = _conjugation_residual(A_A, A_B, PermutationMatrix(mapping))
    moves = 0
    improved = True
    while improved and moves < max_moves:
        improved = False
        for i in range(n):
            for j in range(i + 1, n):
                mapping[i], mapping[j] = mapping[j], mapping[i]
                r = _conjugation_residual(A_A, A_B, PermutationMatrix(mapping))
                if r < best - 1e-15:
                    best = r
                    moves += 1
                    improved = True
                    if moves >= max_moves:
                        break
                else:
                    mapping[i], mapping[j] = mapping[j], mapping[i]
            if moves >= max_moves:
                break
    return PermutationMatrix(mapping)


def hoffman_wielandt_gap(A_A, A_B) -> tuple[float, float]:
    """(sum of squared sorted-eigenvalue differences, squared Frobenius distance).

    The first component never exceeds the second; the gap between them
    measures how far the two matrices are from being aligned by an
    orthogonal conjugation.
    """
    A_A = np.asarray(A_A, dtype=float)
    A_B = np.asarray(A_B, dtype=float)
    if A_A.shape != A_B.shape:
        raise ValueError("inputs must have equal shape")
    alpha = np.sort(np.linalg.eigvalsh(A_A))
    beta = np.sort(np.linalg.eigvalsh(A_B))
    lower = float(np.sum((alpha - beta) ** 2))
    dist = float(frobenius_norm(A_A - A_B) ** 2)
    return lower, dist
