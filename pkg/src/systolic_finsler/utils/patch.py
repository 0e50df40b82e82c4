"""Finite pieces of the periodic grid graph as scipy CSR matrices."""

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.sparse import csr_matrix

from systolic_finsler.types import IntVector

GAUSS_NODES = (0.5 - 0.5 / math.sqrt(3), 0.5 + 0.5 / math.sqrt(3))
TERMINAL_SHIFT = 1.0


def edge_weight_table(
    gauge: Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]],
    resolution: int,
    offsets: list[IntVector],
) -> NDArray[np.float64]:
    """
    Weights ``W[k, I, J]`` of the edge from node ``(I, J) / resolution`` along ``offsets[k]``.

    The weight is the length of the straight segment by 2-point Gauss
    quadrature. By periodicity one table over the ``resolution²`` torus nodes
    serves every patch.
    """
    h = 1.0 / resolution
    ticks = np.arange(resolution) * h
    xs, ys = np.meshgrid(ticks, ticks, indexing="ij")
    nodes = np.stack((xs, ys), axis=-1)
    table = np.empty((len(offsets), resolution, resolution))
    for k, (p, q) in enumerate(offsets):
        step = np.array([p * h, q * h])
        vectors = np.broadcast_to(step, nodes.shape)
        total = sum(gauge(nodes + s * step, vectors) for s in GAUSS_NODES)
        table[k] = 0.5 * total
    return table


@dataclass(frozen=True)
class GridPatch:
    """Nodes ``(I, J)`` with ``i0 <= I < i0 + nx`` and ``j0 <= J < j0 + ny``."""

    i0: int
    j0: int
    nx: int
    ny: int
    matrix: csr_matrix

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def node(self, index: tuple[int, int]) -> int:
        i, j = index[0] - self.i0, index[1] - self.j0
        if not (0 <= i < self.nx and 0 <= j < self.ny):
            msg = f"node {index} lies outside the patch"
            raise IndexError(msg)
        return i * self.ny + j

    def index(self, node: int) -> IntVector:
        i, j = divmod(node, self.ny)
        return (i + self.i0, j + self.j0)

    def on_border(self, node: int) -> bool:
        if node >= self.size:
            return False
        i, j = divmod(node, self.ny)
        return i in (0, self.nx - 1) or j in (0, self.ny - 1)

    def trace(self, predecessors: NDArray[np.int32], target: int) -> list[int]:
        """Patch nodes on the shortest path ending at ``target``, last node first."""
        path = []
        node = target
        while 0 <= node < self.size:
            path.append(node)
            node = int(predecessors[node])
        return path

    def path_touches_border(self, predecessors: NDArray[np.int32], target: int) -> bool:
        return any(self.on_border(node) for node in self.trace(predecessors, target))

    def with_terminals(self, sources: list[int], out_costs: NDArray[np.float64], targets: list[int], in_costs: NDArray[np.float64]) -> csr_matrix:
        """
        The patch plus a virtual source ``size`` and a virtual target ``size + 1``.

        Edges run from the source to ``sources`` and from ``targets`` to the
        target. Every terminal edge carries one extra unit so none has zero
        weight; a source-to-target path uses exactly two of them.
        """
        n = self.size
        coo = self.matrix.tocoo()
        rows = np.concatenate((coo.row, np.full(len(sources), n), np.asarray(targets, dtype=np.int64)))
        cols = np.concatenate((coo.col, np.asarray(sources, dtype=np.int64), np.full(len(targets), n + 1)))
        data = np.concatenate((coo.data, np.asarray(out_costs) + TERMINAL_SHIFT, np.asarray(in_costs) + TERMINAL_SHIFT))
        return csr_matrix((data, (rows, cols)), shape=(n + 2, n + 2))


def build_patch(table: NDArray[np.float64], offsets: list[IntVector], lo: IntVector, hi: IntVector) -> GridPatch:
    """Directed grid graph on the index box ``[lo, hi]`` using weights from ``table``."""
    resolution = table.shape[1]
    nx, ny = hi[0] - lo[0] + 1, hi[1] - lo[1] + 1
    li, lj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    rows, cols, data = [], [], []
    for k, (p, q) in enumerate(offsets):
        valid = (li + p >= 0) & (li + p < nx) & (lj + q >= 0) & (lj + q < ny)
        si, sj = li[valid], lj[valid]
        rows.append(si * ny + sj)
        cols.append((si + p) * ny + (sj + q))
        data.append(table[k, (si + lo[0]) % resolution, (sj + lo[1]) % resolution])
    matrix = csr_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(nx * ny, nx * ny))
    return GridPatch(lo[0], lo[1], nx, ny, matrix)


def build_torus(table: NDArray[np.float64], offsets: list[IntVector]) -> csr_matrix:
    """Directed grid graph on the quotient torus with wrap-around edges."""
    resolution = table.shape[1]
    li, lj = np.meshgrid(np.arange(resolution), np.arange(resolution), indexing="ij")
    rows, cols, data = [], [], []
    for k, (p, q) in enumerate(offsets):
        rows.append((li * resolution + lj).ravel())
        cols.append((((li + p) % resolution) * resolution + (lj + q) % resolution).ravel())
        data.append(table[k].ravel())
    n = resolution * resolution
    row, col, weight = np.concatenate(rows), np.concatenate(cols), np.concatenate(data)
    # long offsets wrap onto short ones on coarse grids; keep the lightest parallel edge
    order = np.lexsort((weight, col, row))
    row, col, weight = row[order], col[order], weight[order]
    first = np.ones(len(row), dtype=bool)
    first[1:] = (row[1:] != row[:-1]) | (col[1:] != col[:-1])
    return csr_matrix((weight[first], (row[first], col[first])), shape=(n, n))
