"""SimRank similarity on the concept graph and the per-concept neighbor
weights derived from it.

The similarity recurrence is iterated Jacobi-style from the identity:

    s(a, a) = 1
    s(a, b) = decay / (|N(a)| |N(b)|) * sum_{u in N(a)} sum_{v in N(b)} s(u, v)

with s(a, b) = 0 whenever a != b and either node has no neighbors.  In
matrix form one sweep is ``S <- decay * P S P^T`` (P the row-normalized
adjacency) followed by resetting the diagonal to 1, so a sweep costs two
matrix products.  Below ``dense_threshold`` nodes the iteration runs on a
dense array; above it on scipy sparse matrices, which materializes
exactly the co-reachable pairs.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from amrec.errors import ValidationError
from amrec.graph import ConceptGraph, NeighborSets, RelationMatrix

logger = logging.getLogger(__name__)

DEFAULT_DECAY = 0.8
DEFAULT_MAX_ITER = 10
DEFAULT_TOL = 1e-4
DEFAULT_DENSE_THRESHOLD = 5000


class SimRankScores:
    """Converged pairwise similarities over a ConceptGraph's nodes."""

    def __init__(self, node_ids, matrix, decay, iterations_run, residuals):
        self.node_ids = tuple(node_ids)
        self.node_index = {cid: i for i, cid in enumerate(node_ids)}
        self._matrix = matrix
        self.decay = decay
        self.iterations_run = iterations_run
        self.residuals = list(residuals)
        self.max_residual = self.residuals[-1] if self.residuals else 0.0

    @property
    def is_dense(self) -> bool:
        return isinstance(self._matrix, np.ndarray)

    def score(self, a: int, b: int) -> float:
        return float(self._matrix[a, b])

    def score_by_id(self, id_a: str, id_b: str) -> float:
        return self.score(self.node_index[id_a], self.node_index[id_b])

    def dense(self) -> np.ndarray:
        if self.is_dense:
            return self._matrix
        return self._matrix.toarray()


def _normalized_adjacency(graph: ConceptGraph, dense: bool):
    n = graph.node_count
    degrees = graph.degrees().astype(np.float64)
    if dense:
        p = np.zeros((n, n))
        for a, nbrs in enumerate(graph.adjacency):
            if len(nbrs):
                p[a, nbrs] = 1.0 / degrees[a]
        return p
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = []
    data = []
    for a, nbrs in enumerate(graph.adjacency):
        indptr[a + 1] = indptr[a] + len(nbrs)
        indices.append(nbrs)
        if len(nbrs):
            data.append(np.full(len(nbrs), 1.0 / degrees[a]))
    indices = np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64)
    data = np.concatenate(data) if data else np.zeros(0)
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def compute_simrank(graph: ConceptGraph, decay: float = DEFAULT_DECAY,
                    max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL,
                    dense_threshold: int = DEFAULT_DENSE_THRESHOLD) -> SimRankScores:
    """Iterate the similarity recurrence to a fixed point.

    Stops when the max absolute per-pair change drops to ``tol`` or after
    ``max_iter`` sweeps, whichever comes first.
    """
    if graph.node_count == 0:
        raise ValidationError("cannot compute similarities on an empty graph")
    if not 0.0 < decay < 1.0:
        raise ValidationError(f"decay must be in (0, 1), got {decay}")
    if max_iter < 1:
        raise ValidationError(f"max_iter must be >= 1, got {max_iter}")
    if tol <= 0.0:
        raise ValidationError(f"tol must be positive, got {tol}")

    dense = graph.node_count <= dense_threshold
    p = _normalized_adjacency(graph, dense)
    n = graph.node_count
    residuals: list[float] = []
    iterations = 0

    if dense:
        scores = np.eye(n)
        for _ in range(max_iter):
            updated = decay * (p @ scores @ p.T)
            np.fill_diagonal(updated, 1.0)
            residual = float(np.max(np.abs(updated - scores))) if n else 0.0
            scores = updated
            residuals.append(residual)
            iterations += 1
            if residual <= tol:
                break
        scores = 0.5 * (scores + scores.T)
    else:
        scores = sp.identity(n, format="csr")
        p_t = p.T.tocsr()
        for _ in range(max_iter):
            updated = decay * (p @ scores @ p_t)
            updated.setdiag(1.0)
            updated = updated.tocsr()
            diff = (updated - scores)
            residual = float(np.max(np.abs(diff.data))) if diff.nnz else 0.0
            scores = updated
            residuals.append(residual)
            iterations += 1
            if residual <= tol:
                break
        scores = (scores + scores.T) * 0.5
        scores = scores.tocsr()

    logger.info("similarity iteration: %d sweep(s), final residual %.3g",
                iterations, residuals[-1])
    return SimRankScores(graph.node_ids, scores, decay, iterations, residuals)


@dataclass
class NeighborWeights:
    """CSR-layout normalized weights over each concept's neighbor set."""

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray

    @property
    def rows(self) -> int:
        return len(self.indptr) - 1

    def items(self, i: int):
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.weights[lo:hi].tolist()))

    def to_csr(self) -> sp.csr_matrix:
        n = self.rows
        return sp.csr_matrix((self.weights, self.indices, self.indptr), shape=(n, n))

    @staticmethod
    def empty(rows: int) -> "NeighborWeights":
        return NeighborWeights(np.zeros(rows + 1, dtype=np.int64),
                               np.zeros(0, dtype=np.int64), np.zeros(0))


@dataclass
class SimRankWeights:
    """Normalized relation-strength weights for both concept kinds."""

    task: NeighborWeights
    method: NeighborWeights


def _weights_for_side(scores: SimRankScores, neighbor_sets: list[set[int]],
                      ids: tuple[str, ...]) -> NeighborWeights:
    indptr = np.zeros(len(neighbor_sets) + 1, dtype=np.int64)
    indices: list[int] = []
    weights: list[float] = []
    for i, nbrs in enumerate(neighbor_sets):
        ordered = sorted(nbrs)
        indptr[i + 1] = indptr[i] + len(ordered)
        if not ordered:
            continue
        node_i = scores.node_index.get(ids[i])
        if node_i is None:
            raise ValidationError(f"concept {ids[i]!r} missing from similarity scores")
        raw = np.zeros(len(ordered))
        for pos, k in enumerate(ordered):
            node_k = scores.node_index.get(ids[k])
            if node_k is None:
                raise ValidationError(f"concept {ids[k]!r} missing from similarity scores")
            raw[pos] = scores.score(node_i, node_k)
        total = raw.sum()
        if total > 0.0:
            raw /= total
        else:
            # A declared relation never vanishes just because similarity is 0.
            raw[:] = 1.0 / len(ordered)
        indices.extend(ordered)
        weights.extend(raw.tolist())
    return NeighborWeights(indptr, np.array(indices, dtype=np.int64), np.array(weights))


def derive_weights(scores: SimRankScores, neighbors: NeighborSets,
                   matrix: RelationMatrix) -> SimRankWeights:
    """Normalize each concept's neighbor similarities to sum to 1.

    Concepts whose neighbor similarities are all zero fall back to uniform
    weights over their declared neighbors.
    """
    return SimRankWeights(
        task=_weights_for_side(scores, neighbors.task_neighbors, matrix.task_ids),
        method=_weights_for_side(scores, neighbors.method_neighbors, matrix.method_ids),
    )


def write_weights(weights: SimRankWeights, matrix: RelationMatrix, path) -> None:
    """Dump as ``concept_id<TAB>neighbor_id<TAB>weight`` lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for side, ids in ((weights.task, matrix.task_ids), (weights.method, matrix.method_ids)):
            for i in range(side.rows):
                for k, w in side.items(i):
                    fh.write(f"{ids[i]}\t{ids[k]}\t{w:.17g}\n")
