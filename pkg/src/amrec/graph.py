"""Training-side structures: the binary Task-Method matrix, same-kind
neighbor sets, and the undirected concept graph used for similarity.

Index maps cover every concept that appears in any training relation
(including concepts seen only through same-kind relations, which get a
row/column with no observed cells).  Index assignment is lexicographic by
concept id, so construction is invariant under input permutation.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from amrec.corpus import METHOD_METHOD, TASK_METHOD, TASK_TASK, RelationRecord
from amrec.errors import ValidationError


class RelationMatrix:
    """Sparse binary m x n matrix of observed Task-Method pairs."""

    def __init__(self, task_ids: list[str], method_ids: list[str],
                 pairs: set[tuple[str, str]]):
        self.task_ids = tuple(task_ids)
        self.method_ids = tuple(method_ids)
        self.task_index = {cid: i for i, cid in enumerate(task_ids)}
        self.method_index = {cid: j for j, cid in enumerate(method_ids)}
        ordered = sorted(pairs)
        rows = np.fromiter((self.task_index[t] for t, _ in ordered), dtype=np.int64,
                           count=len(ordered))
        cols = np.fromiter((self.method_index[m] for _, m in ordered), dtype=np.int64,
                           count=len(ordered))
        data = np.ones(len(pairs), dtype=np.float64)
        shape = (len(task_ids), len(method_ids))
        self.csr = sp.csr_matrix((data, (rows, cols)), shape=shape)
        self.csr_t = self.csr.T.tocsr()

    @property
    def m(self) -> int:
        return len(self.task_ids)

    @property
    def n(self) -> int:
        return len(self.method_ids)

    @property
    def nnz(self) -> int:
        return self.csr.nnz

    def observed_methods(self, task_index: int) -> np.ndarray:
        """Column indices observed for a task row (sorted)."""
        return self.csr.indices[self.csr.indptr[task_index]:self.csr.indptr[task_index + 1]]

    def observed_tasks(self, method_index: int) -> np.ndarray:
        return self.csr_t.indices[self.csr_t.indptr[method_index]:self.csr_t.indptr[method_index + 1]]


@dataclass
class NeighborSets:
    """Per-concept same-kind neighbor index sets, symmetrized."""

    task_neighbors: list[set[int]]
    method_neighbors: list[set[int]]
    dropped_records: int = 0


class ConceptGraph:
    """Undirected simple graph over all training concepts.

    The node set always covers every training concept; ``edge_kinds``
    selects which relation kinds contribute edges (all three by default),
    which is how the bipartite-only similarity substrate is produced.
    """

    def __init__(self, node_ids: list[str], edges: set[tuple[int, int]]):
        self.node_ids = tuple(node_ids)
        self.node_index = {cid: i for i, cid in enumerate(node_ids)}
        self.edge_count = len(edges)
        adjacency: list[list[int]] = [[] for _ in node_ids]
        for a, b in edges:
            adjacency[a].append(b)
            adjacency[b].append(a)
        self.adjacency = [np.array(sorted(nbrs), dtype=np.int64) for nbrs in adjacency]

    @property
    def node_count(self) -> int:
        return len(self.node_ids)

    def degrees(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.int64)

    def dump_edges(self, path) -> None:
        """Debug dump: one ``id<TAB>id`` line per undirected edge."""
        lines = []
        for a, nbrs in enumerate(self.adjacency):
            for b in nbrs:
                if a < b:
                    lines.append(f"{self.node_ids[a]}\t{self.node_ids[b]}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))


def _train_concepts(train: list[RelationRecord]):
    tasks: set[str] = set()
    methods: set[str] = set()
    for rec in train:
        if rec.rel_kind == TASK_METHOD:
            tasks.add(rec.src)
            methods.add(rec.dst)
        elif rec.rel_kind == TASK_TASK:
            tasks.update(rec.pair)
        else:
            methods.update(rec.pair)
    return sorted(tasks), sorted(methods)


def build_matrix(train: list[RelationRecord]) -> RelationMatrix:
    """Build the binary relation matrix from canonical training records."""
    task_ids, method_ids = _train_concepts(train)
    pairs = {rec.pair for rec in train if rec.rel_kind == TASK_METHOD}
    if not pairs:
        raise ValidationError("no training interactions: the train split has no Task-Method pairs")
    return RelationMatrix(task_ids, method_ids, pairs)


def build_neighbor_sets(train: list[RelationRecord], matrix: RelationMatrix) -> NeighborSets:
    """Populate same-kind neighbor sets from TaskTask/MethodMethod records.

    Records touching concepts outside the matrix index maps are dropped
    and counted.
    """
    task_neighbors: list[set[int]] = [set() for _ in range(matrix.m)]
    method_neighbors: list[set[int]] = [set() for _ in range(matrix.n)]
    dropped = 0
    for rec in train:
        if rec.rel_kind == TASK_TASK:
            index, sets = matrix.task_index, task_neighbors
        elif rec.rel_kind == METHOD_METHOD:
            index, sets = matrix.method_index, method_neighbors
        else:
            continue
        a = index.get(rec.src)
        b = index.get(rec.dst)
        if a is None or b is None:
            dropped += 1
            continue
        sets[a].add(b)
        sets[b].add(a)
    return NeighborSets(task_neighbors, method_neighbors, dropped)


def build_concept_graph(train: list[RelationRecord],
                        edge_kinds: tuple[str, ...] = (TASK_METHOD, TASK_TASK, METHOD_METHOD),
                        ) -> ConceptGraph:
    """Undirected simple graph over training concepts (similarity substrate)."""
    task_ids, method_ids = _train_concepts(train)
    node_ids = sorted(task_ids + method_ids)
    node_index = {cid: i for i, cid in enumerate(node_ids)}
    edges: set[tuple[int, int]] = set()
    for rec in train:
        if rec.rel_kind not in edge_kinds:
            continue
        a, b = node_index[rec.src], node_index[rec.dst]
        edges.add((min(a, b), max(a, b)))
    return ConceptGraph(node_ids, edges)
