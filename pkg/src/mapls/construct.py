"""Construction heuristics: trivial, greedy, max-regret and ROM.

Greedy and max-regret scan the grid of vectors compatible with the current
partial assignment in lexicographic order, in bounded numpy blocks so that
even n^s in the hundreds of millions stays tractable. Ties are always broken
toward the lexicographically smallest vector, which keeps every heuristic
deterministic.
"""

from __future__ import annotations

from itertools import product as iter_product

import numpy as np

from .ap2 import solve_ap2
from .core import Assignment, Instance, ProductWeights

BLOCK_ROWS = 500_000


def trivial(inst: Instance) -> Assignment:
    """Diagonal assignment: every permutation is the identity."""
    return Assignment.identity(inst.s, inst.n)


def _iter_grid_blocks(sets: list[np.ndarray], limit: int = BLOCK_ROWS):
    """Yield (B, s) coordinate blocks of the cartesian product of `sets`,
    in lexicographic order (dim 0 most significant)."""
    s = len(sets)
    sizes = [len(x) for x in sets]
    split = s
    suffix = 1
    while split > 0 and suffix * sizes[split - 1] <= limit:
        split -= 1
        suffix *= sizes[split]
    tail = sets[split:]
    if tail:
        mesh = np.meshgrid(*tail, indexing="ij")
        tail_coords = np.stack([m.ravel() for m in mesh], axis=1).astype(np.int64)
    else:
        tail_coords = np.zeros((1, 0), dtype=np.int64)
    rows = len(tail_coords)
    block = np.empty((rows, s), dtype=np.int64)
    block[:, split:] = tail_coords
    for prefix in iter_product(*sets[:split]):
        for j, v in enumerate(prefix):
            block[:, j] = v
        yield block


def _min_compatible_vector(inst: Instance, sets: list[np.ndarray], floor: float):
    """Lexicographically-first minimum-weight vector in the compatible grid,
    stopping early as soon as the instance-wide weight floor is attained."""
    best_w = np.inf
    best = None
    for block in _iter_grid_blocks(sets):
        w = inst.weight_batch(block)
        k = int(np.argmin(w))
        if w[k] < best_w:
            best_w = float(w[k])
            best = block[k].copy()
            if best_w <= floor:
                break
    return best, best_w


def greedy(inst: Instance) -> Assignment:
    """n rounds, each committing the cheapest vector compatible with the
    partial assignment."""
    s, n = inst.s, inst.n
    model = inst.weights
    remaining = [np.arange(n, dtype=np.int64) for _ in range(s)]
    chosen = np.empty((n, s), dtype=np.int64)
    floor = inst.min_weight_floor()
    for t in range(n):
        if isinstance(model, ProductWeights):
            # the compatible minimum factors per dimension; exact shortcut
            vec = np.empty(s, dtype=np.int64)
            for j in range(s):
                vals = model.factors[j][remaining[j]]
                vec[j] = remaining[j][int(np.argmin(vals))]
        else:
            vec, _ = _min_compatible_vector(inst, remaining, floor)
        chosen[t] = vec
        for j in range(s):
            remaining[j] = remaining[j][remaining[j] != vec[j]]
    return _vectors_to_assignment(chosen)


def _vectors_to_assignment(vectors: np.ndarray) -> Assignment:
    order = np.argsort(vectors[:, 0])
    return Assignment(vectors[order].T)


def _merge_best_two(b1, b2, c1, c2):
    """Per-element two smallest values of the union of (b1, b2) and (c1, c2)."""
    m1 = np.minimum(b1, c1)
    m2 = np.minimum(np.maximum(b1, c1), np.minimum(b2, c2))
    return m1, m2


def max_regret(inst: Instance) -> Assignment:
    """n rounds; each scores every (dimension, unused value) slot by the gap
    between its best and second-best compatible vectors and commits the best
    vector of the widest-gap slot."""
    s, n = inst.s, inst.n
    remaining = [np.arange(n, dtype=np.int64) for _ in range(s)]
    chosen = np.empty((n, s), dtype=np.int64)
    for t in range(n):
        m = len(remaining[0])
        if m == 1:
            chosen[t] = [r[0] for r in remaining]
        else:
            chosen[t] = _max_regret_round(inst, remaining)
        for j in range(s):
            remaining[j] = remaining[j][remaining[j] != chosen[t][j]]
    return _vectors_to_assignment(chosen)


def _max_regret_round(inst: Instance, sets: list[np.ndarray]) -> np.ndarray:
    s, n = inst.s, inst.n
    best1 = np.full((s, n), np.inf)
    best2 = np.full((s, n), np.inf)
    for block in _iter_grid_blocks(sets):
        w = inst.weight_batch(block)
        for j in range(s):
            cols = block[:, j]
            b1 = np.full(n, np.inf)
            np.minimum.at(b1, cols, w)
            at_min = w == b1[cols]
            cnt = np.zeros(n, dtype=np.int64)
            np.add.at(cnt, cols[at_min], 1)
            b2 = np.where(cnt >= 2, b1, np.inf)
            above = w > b1[cols]
            np.minimum.at(b2, cols[above], w[above])
            best1[j], best2[j] = _merge_best_two(best1[j], best2[j], b1, b2)

    pick_j, pick_v, pick_regret = 0, int(sets[0][0]), -np.inf
    for j in range(s):
        for v in sets[j]:
            regret = best2[j, v] - best1[j, v]
            if regret > pick_regret:
                pick_j, pick_v, pick_regret = j, int(v), regret

    slot_sets = list(sets)
    slot_sets[pick_j] = np.asarray([pick_v], dtype=np.int64)
    vec, _ = _min_compatible_vector(inst, slot_sets, -np.inf)
    return vec


def rom(inst: Instance) -> Assignment:
    """Recursive aggregate matching: at each level, pair the chain built so
    far with the next dimension's values by solving a 2-AP over summed
    weights of all completions."""
    s, n = inst.s, inst.n
    perms = np.empty((s, n), dtype=np.int64)
    perms[0] = np.arange(n)
    for level in range(s - 1):
        agg = _rom_aggregate(inst, perms, level)
        sigma, _ = solve_ap2(agg)
        perms[level + 1] = sigma
    return Assignment(perms)


def _rom_aggregate(inst: Instance, perms: np.ndarray, level: int) -> np.ndarray:
    """agg[r, v]: total weight of vectors bound to row r through dimensions
    0..level, with dimension level+1 at value v and later dimensions free."""
    s, n = inst.s, inst.n
    free_dims = s - level - 2
    free = n**free_dims
    if free_dims:
        mesh = np.meshgrid(*[np.arange(n)] * free_dims, indexing="ij")
        free_coords = np.stack([m.ravel() for m in mesh], axis=1).astype(np.int64)
    else:
        free_coords = np.zeros((1, 0), dtype=np.int64)

    agg = np.empty((n, n), dtype=np.float64)
    rows_per_chunk = max(1, BLOCK_ROWS // (n * free))
    cell = np.empty((n * free, s), dtype=np.int64)
    cell[:, level + 1] = np.repeat(np.arange(n), free)
    cell[:, level + 2 :] = np.tile(free_coords, (n, 1))
    for start in range(0, n, rows_per_chunk):
        rows = range(start, min(n, start + rows_per_chunk))
        blocks = []
        for r in rows:
            for m in range(level + 1):
                cell[:, m] = perms[m, r]
            blocks.append(cell.copy())
        w = inst.weight_batch(np.concatenate(blocks))
        agg[list(rows)] = w.reshape(len(blocks), n, free).sum(axis=2)
    return agg
