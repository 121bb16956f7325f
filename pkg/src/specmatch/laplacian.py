"""The three graph Laplacian variants and conversions between them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components as _csgraph_components

from .errors import DisconnectedGraphError, ZeroDegreeError
from .mesh_graph import Graph

KINDS = ("combinatorial", "normalized", "random_walk")


@dataclass(frozen=True)
class LaplacianMatrix:
    """A sparse Laplacian together with the degrees needed for conversions."""

    kind: str
    matrix: sparse.csr_matrix
    degrees: np.ndarray

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown Laplacian kind {self.kind!r}")
        object.__setattr__(self, "matrix", sparse.csr_matrix(self.matrix))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def assemble(graph: Graph, kind: str = "combinatorial") -> LaplacianMatrix:
    """Assemble a Laplacian of the requested kind from a connected graph.

    combinatorial: D - W;  normalized: D^{-1/2} (D - W) D^{-1/2};
    random_walk: D^{-1} (D - W).
    """
    n_comp, _ = _csgraph_components(graph.adjacency, directed=False)
    if n_comp != 1:
        raise DisconnectedGraphError(n_comp)
    d = graph.degrees
    if kind in ("normalized", "random_walk"):
        zero = np.flatnonzero(d == 0)
        if zero.size:
            raise ZeroDegreeError(int(zero[0]))
    comb = sparse.diags(d) - graph.adjacency
    if kind == "combinatorial":
        mat = comb
    elif kind == "normalized":
        inv_sqrt = sparse.diags(1.0 / np.sqrt(d))
        mat = inv_sqrt @ comb @ inv_sqrt
    elif kind == "random_walk":
        mat = sparse.diags(1.0 / d) @ comb
    else:
        raise ValueError(f"unknown Laplacian kind {kind!r}")
    return LaplacianMatrix(kind=kind, matrix=sparse.csr_matrix(mat), degrees=d.copy())


def convert(lap: LaplacianMatrix, target_kind: str) -> LaplacianMatrix:
    """Convert between Laplacian kinds using the degree rescalings."""
    if target_kind not in KINDS:
        raise ValueError(f"unknown Laplacian kind {target_kind!r}")
    d = lap.degrees
    if (d <= 0).any():
        raise ZeroDegreeError(int(np.flatnonzero(d <= 0)[0]))
    sq = sparse.diags(np.sqrt(d))
    inv_sq = sparse.diags(1.0 / np.sqrt(d))
    dd = sparse.diags(d)
    inv_d = sparse.diags(1.0 / d)

    # first to combinatorial, then to the target
    if lap.kind == "combinatorial":
        comb = lap.matrix
    elif lap.kind == "normalized":
        comb = sq @ lap.matrix @ sq
    else:  # random_walk
        comb = dd @ lap.matrix

    if target_kind == "combinatorial":
        mat = comb
    elif target_kind == "normalized":
        mat = inv_sq @ comb @ inv_sq
    else:
        mat = inv_d @ comb
    return LaplacianMatrix(kind=target_kind, matrix=sparse.csr_matrix(mat), degrees=d.copy())


def dump_triplets(matrix, path) -> None:
    """Write a sparse matrix as `row col value` lines, 17 significant digits."""
    coo = sparse.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        for k in order:
            fh.write(f"{coo.row[k]} {coo.col[k]} {coo.data[k]:.17g}\n")


def load_triplets(path, shape=None) -> sparse.csr_matrix:
    """Read a `row col value` triplet file back into a sparse matrix."""
    rows, cols, vals = [], [], []
    with open(path) as fh:
        for line in fh:
            tok = line.split()
            if not tok:
                continue
            rows.append(int(tok[0]))
            cols.append(int(tok[1]))
            vals.append(float(tok[2]))
    if shape is None:
        size = max(max(rows, default=-1), max(cols, default=-1)) + 1
        shape = (size, size)
    return sparse.csr_matrix((vals, (rows, cols)), shape=shape)
