"""Double description method for pointed polyhedral cones ``{y : G y >= 0, E y = 0}``."""
from __future__ import annotations

import numpy as np

from eqbell import kernels
from eqbell.config import caps
from eqbell.geometry.linalg import as_int_matrix, canonical_sign, nullspace_of, primitive, row_basis


class LinealityError(ValueError):
    """The cone contains a line (e.g. an unbounded polyhedron or a non-full-dimensional point set)."""


def _bitsets(n_rays: int, words: int) -> np.ndarray:
    return np.zeros((n_rays, words), dtype=np.uint64)


def _set_bit(Z: np.ndarray, rows, bit: int):
    Z[rows, bit // 64] |= np.uint64(1) << np.uint64(bit % 64)


def _primitive_rows(R: np.ndarray) -> np.ndarray:
    if len(R) == 0:
        return R
    g = np.gcd.reduce(R, axis=1)
    g[g == 0] = 1
    return R // g[:, None]


def extreme_rays(G, E=None, order=None):
    """Extreme rays of ``{y : G y >= 0, E y = 0}``.

    Returns ``(rays, tight)``: rays as primitive integer rows (object dtype) and
    for each ray the sorted tuple of row indices of G it satisfies with equality.
    ``order`` is the insertion order of the rows of G (default: as given).
    """
    G = as_int_matrix(G)
    dim = G.shape[1]
    if E is not None and len(E):
        basis = nullspace_of(E)
    else:
        basis = np.array([[int(i == j) for j in range(dim)] for i in range(dim)], dtype=object).reshape(dim, dim)
    if basis.shape[0] == 0:
        return np.zeros((0, dim), dtype=object), []
    Gz = G.dot(basis.T)
    d = Gz.shape[1]
    m = Gz.shape[0]
    order = list(range(m)) if order is None else list(order)
    ordered = Gz[order]
    init_local, _ = row_basis(ordered)
    if len(init_local) < d:
        raise LinealityError(f"cone has a lineality space of dimension {d - len(init_local)}")
    init = [order[i] for i in init_local]

    # simplicial start: ray j is tight on every initial row but the j-th
    K = Gz[init]
    rays = []
    for j in range(d):
        sub = np.delete(K, j, axis=0)
        ns = nullspace_of(sub) if len(sub) else np.ones((1, d), dtype=object)
        r = ns[0]
        if K[j].dot(r) < 0:
            r = -r
        rays.append(r)
    R = np.array(rays, dtype=object).reshape(d, d)
    words = max(1, (m + 63) // 64)
    Z = _bitsets(d, words)
    for j in range(d):
        for t, row in enumerate(init):
            if t != j:
                _set_bit(Z, [j], row)
    done = set(init)
    work = 0
    for row in order:
        if row in done:
            continue
        done.add(row)
        s = R.dot(Gz[row])
        pos = np.nonzero(s > 0)[0]
        neg = np.nonzero(s < 0)[0]
        zer = np.nonzero(s == 0)[0]
        if len(neg) == 0:
            _set_bit(Z, zer, row)
            continue
        work += len(pos) * len(neg)
        caps.check("max_dd_work", work)
        pairs = kernels.dd_adjacent_pairs(Z, pos.astype(np.int64), neg.astype(np.int64), d - 2)
        keep = np.concatenate([pos, zer])
        newR = R[keep]
        newZ = Z[keep].copy()
        _set_bit(newZ, np.arange(len(pos), len(keep)), row)
        if len(pairs):
            p, q = pairs[:, 0], pairs[:, 1]
            sp = s[p][:, None]
            sq = s[q][:, None]
            made = _primitive_rows(sp * R[q] - sq * R[p])
            mz = Z[p] & Z[q]
            _set_bit(mz, np.arange(len(pairs)), row)
            newR = np.vstack([newR, made])
            newZ = np.vstack([newZ, mz])
        caps.check("max_dd_rays", len(newR))
        R, Z = newR, newZ
    full = R.dot(basis)
    full = np.array([canonical_sign_ray(r) for r in full], dtype=object).reshape(len(full), dim)
    tight = [tuple(int(i) for i in np.nonzero(G.dot(r) == 0)[0]) for r in full]
    return full, tight


def canonical_sign_ray(r) -> np.ndarray:
    """Rays keep their orientation; only the common factor is removed."""
    return primitive(r)


__all__ = ["LinealityError", "extreme_rays", "canonical_sign"]
