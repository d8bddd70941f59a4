"""Numpy implementations of the compiled kernels in ``_kernels.pyx``."""
import numpy as np

IMPLEMENTATION = "python"


def rgs_labelings(n: int, max_blocks: int) -> np.ndarray:
    if n < 1 or max_blocks < 1:
        return np.zeros((0, max(n, 0)), dtype=np.int8)
    rows = np.zeros((1, 1), dtype=np.int8)
    tops = np.zeros(1, dtype=np.int64)
    for _ in range(1, n):
        choices = np.minimum(tops + 2, max_blocks)
        rep = np.repeat(np.arange(len(rows)), choices)
        starts = np.cumsum(choices) - choices
        vals = np.arange(len(rep)) - np.repeat(starts, choices)
        rows = np.concatenate([rows[rep], vals[:, None].astype(np.int8)], axis=1)
        tops = np.maximum(tops[rep], vals)
    return rows


def pattern_matrix(labels: np.ndarray, node_idx: np.ndarray, lut: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels)
    node_idx = np.asarray(node_idx)
    S, X = labels.shape[0], node_idx.shape[0]
    n = node_idx.shape[1]
    mask = np.zeros((S, X), dtype=np.int64)
    gathered = labels[:, node_idx]  # S x X x n
    bit = 0
    for i in range(n):
        for j in range(i + 1, n):
            mask |= (gathered[:, :, i] == gathered[:, :, j]).astype(np.int64) << bit
            bit += 1
    return np.asarray(lut)[mask].astype(np.int32)


def dd_adjacent_pairs(zero_sets: np.ndarray, pos: np.ndarray, neg: np.ndarray, min_common: int) -> np.ndarray:
    Z = np.asarray(zero_sets, dtype=np.uint64)
    if Z.ndim == 1:
        Z = Z[:, None]
    out = []
    if len(pos) == 0 or len(neg) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    neg = np.asarray(neg, dtype=np.int64)
    for p in np.asarray(pos, dtype=np.int64):
        inter = Z[p] & Z[neg]
        counts = _popcount_rows(inter)
        for qi in np.nonzero(counts >= min_common)[0]:
            q = neg[qi]
            it = inter[qi]
            contained = np.all((Z & it) == it, axis=1)
            contained[p] = False
            contained[q] = False
            if not contained.any():
                out.append((int(p), int(q)))
    if not out:
        return np.zeros((0, 2), dtype=np.int64)
    return np.array(out, dtype=np.int64)


def _popcount_rows(a: np.ndarray) -> np.ndarray:
    return np.unpackbits(np.ascontiguousarray(a).view(np.uint8), axis=1).sum(axis=1)
