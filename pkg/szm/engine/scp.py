"""
File containing the size-change kernel: size-change matrices, their composition, the call graph
decorating circular proofs and the well-foundedness check of the size-change principle.

A matrix relates the ordinal parameters of a source sequent (rows) to the arguments with which
a target sequent is used (columns). Entries are SCEntry values stored in small numpy arrays.
"""
import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from szm.syntax.ordinals import Ordinal, PosCtx, is_resolved, ord_leq, ord_less

logger = logging.getLogger(__name__)

# Composed edges examined before the check gives up on a call graph.
SATURATION_LIMIT = 50000


class SCEntry(IntEnum):
    UNKNOWN = 0
    LEQ = 1
    LESS = 2


_SYMBOLS = {SCEntry.UNKNOWN: "?", SCEntry.LEQ: "=", SCEntry.LESS: "<"}


def sc_matrix(rows) -> np.ndarray:
    """
    Builds a matrix from nested sequences of entries. An empty sequence gives a 0x0 matrix.
    """
    matrix = np.array(rows, dtype=np.int8)
    if matrix.ndim != 2:
        matrix = matrix.reshape((len(rows), 0))
    return matrix


def identity(arity: int) -> np.ndarray:
    matrix = np.zeros((arity, arity), dtype=np.int8)
    np.fill_diagonal(matrix, SCEntry.LEQ)
    return matrix


def compose(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """
    Composes the matrix of an edge a -> b with the matrix of an edge b -> c.

    Parameters
    ----------
    m1 : np.ndarray
        Matrix of shape (a, b).
    m2 : np.ndarray
        Matrix of shape (b, c).

    Returns
    -------
    np.ndarray
        Matrix of shape (a, c) whose entry (i, k) is the best entry, over the intermediate
        parameters j, of the combination of m1[i, j] and m2[j, k]. The combination is Unknown
        if one side is Unknown, Less if one side is Less, and Leq otherwise.
    """
    assert m1.shape[1] == m2.shape[0], (
        f"Cannot compose size-change matrices of shapes {m1.shape} and {m2.shape}")
    a, b = m1.shape
    c = m2.shape[1]
    if b == 0:
        return np.zeros((a, c), dtype=np.int8)
    left = m1[:, :, np.newaxis]
    right = m2[np.newaxis, :, :]
    combined = np.where((left == SCEntry.UNKNOWN) | (right == SCEntry.UNKNOWN), SCEntry.UNKNOWN,
                        np.maximum(left, right))
    return combined.max(axis=1).astype(np.int8)


def is_idempotent(m: np.ndarray) -> bool:
    return m.shape[0] == m.shape[1] and np.array_equal(compose(m, m), m)


def has_strict_diagonal(m: np.ndarray) -> bool:
    return bool(np.any(np.diagonal(m) == SCEntry.LESS))


def format_matrix(m: np.ndarray) -> str:
    """
    Debug form of a matrix: one line per row, entries printed as <, = or ?.
    """
    if m.size == 0:
        return f"[{m.shape[0]}x{m.shape[1]}]"
    return "\n".join(" ".join(_SYMBOLS[SCEntry(int(e))] for e in row) for row in m)


def _entry(gamma: PosCtx, src: Ordinal, dst: Ordinal, resolve) -> SCEntry:
    if resolve is not None:
        src, dst = resolve(src), resolve(dst)
    if not (is_resolved(src) and is_resolved(dst)):
        return SCEntry.UNKNOWN
    if ord_less(gamma, dst, src):
        return SCEntry.LESS
    if ord_leq(gamma, dst, src):
        return SCEntry.LEQ
    return SCEntry.UNKNOWN


def edge_matrix(gamma: PosCtx,
                args_src: Sequence[Ordinal],
                args_dst: Sequence[Ordinal],
                resolve=None) -> np.ndarray:
    """
    Matrix of the edge between the sequent whose parameters are args_src and a use of another
    sequent with the arguments args_dst. Entry (i, j) is Less if args_dst[j] < args_src[i],
    Leq if args_dst[j] <= args_src[i] and Unknown otherwise, including when an argument still
    contains an unset unification variable.
    """
    matrix = np.zeros((len(args_src), len(args_dst)), dtype=np.int8)
    for i, src in enumerate(args_src):
        for j, dst in enumerate(args_dst):
            matrix[i, j] = _entry(gamma, src, dst, resolve)
    return matrix


@dataclass
class Edge:
    src: int
    dst: int
    matrix: np.ndarray


@dataclass
class Verdict:
    accepted: bool
    node: Optional[int] = None
    matrix: Optional[np.ndarray] = None

    def __bool__(self) -> bool:
        return self.accepted


class CallGraph:
    """
    Nodes are induction hypotheses identified by integers, with their arity. Edges carry the
    size-change matrix of a use of the target hypothesis inside the proof of the source.
    """

    def __init__(self) -> None:
        self.arities: Dict[int, int] = {}
        self.edges: List[Edge] = []

    def add_node(self, node: int, arity: int) -> None:
        self.arities[node] = arity

    def remove_node(self, node: int) -> None:
        del self.arities[node]

    def add_edge(self, src: int, dst: int, matrix: np.ndarray) -> Edge:
        assert matrix.shape == (self.arities[src], self.arities[dst]), (
            f"Matrix of shape {matrix.shape} does not fit the edge {src} -> {dst}")
        edge = Edge(src, dst, matrix)
        self.edges.append(edge)
        return edge

    def remove_edge(self, edge: Edge) -> None:
        for i in range(len(self.edges) - 1, -1, -1):
            if self.edges[i] is edge:
                del self.edges[i]
                return

    def copy(self) -> "CallGraph":
        graph = CallGraph()
        graph.arities = dict(self.arities)
        graph.edges = list(self.edges)
        return graph

    def __len__(self) -> int:
        return len(self.arities)


def _components(graph: CallGraph) -> Dict[int, int]:
    nodes = list(graph.arities)
    index = {node: i for i, node in enumerate(nodes)}
    rows = [index[e.src] for e in graph.edges]
    cols = [index[e.dst] for e in graph.edges]
    adjacency = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes)))
    _, labels = connected_components(adjacency, directed=True, connection="strong")
    return {node: int(labels[index[node]]) for node in nodes}


def _key(src: int, dst: int, m: np.ndarray) -> Tuple:
    return (src, dst, m.shape, m.tobytes())


def saturate(graph: CallGraph, limit: int = SATURATION_LIMIT) -> Optional[List[Edge]]:
    """
    Closes the edges that lie inside a strongly connected component under composition. The
    result contains every path matrix between nodes of a same component, or is None when more
    than limit edges are examined.
    """
    if not graph.edges:
        return []
    component = _components(graph)
    seen: Dict[Tuple, Edge] = {}
    by_src: Dict[int, List[Edge]] = {}
    by_dst: Dict[int, List[Edge]] = {}
    worklist = [e for e in graph.edges if component[e.src] == component[e.dst]]
    examined = 0
    while worklist:
        examined += 1
        if examined > limit:
            return None
        edge = worklist.pop()
        key = _key(edge.src, edge.dst, edge.matrix)
        if key in seen:
            continue
        seen[key] = edge
        by_src.setdefault(edge.src, []).append(edge)
        by_dst.setdefault(edge.dst, []).append(edge)
        for after in list(by_src.get(edge.dst, ())):
            worklist.append(Edge(edge.src, after.dst, compose(edge.matrix, after.matrix)))
        for before in list(by_dst.get(edge.src, ())):
            worklist.append(Edge(before.src, edge.dst, compose(before.matrix, edge.matrix)))
    return list(seen.values())


def check_well_founded(graph: CallGraph) -> Verdict:
    """
    Applies the size-change principle to a call graph.

    Parameters
    ----------
    graph : CallGraph
        Graph of the induction hypotheses of a circular proof.

    Returns
    -------
    Verdict
        Accepted when every idempotent loop of the saturated graph has a strictly decreasing
        diagonal entry. Otherwise the verdict names one offending node and its loop matrix,
        or neither when the saturation is cut off.
    """
    edges = saturate(graph)
    if edges is None:
        logger.warning("Call graph of %d hypotheses and %d edges saturated past %d edges",
                       len(graph), len(graph.edges), SATURATION_LIMIT)
        return Verdict(False)
    for edge in edges:
        if edge.src != edge.dst:
            continue
        if is_idempotent(edge.matrix) and not has_strict_diagonal(edge.matrix):
            logger.debug("Loop on hypothesis %d is not decreasing:\n%s", edge.src,
                         format_matrix(edge.matrix))
            return Verdict(False, edge.src, edge.matrix)
    return Verdict(True)
