"""Neighborhood-based improvement heuristics.

Three families:

* dimensionwise (``dv_search``): re-permute a subset of dimensions jointly,
  the optimal re-permutation found exactly by one 2-AP solve per subset;
* vectorwise (``k_opt``, ``v_opt``): recombine coordinates inside a small
  set of vectors, exhaustively for k-opt, along a variable-depth chain for
  v-opt;
* ``combined``: alternate a dimensionwise and a vectorwise search until the
  assignment is a local optimum of both.

``enumerate_neighborhood`` is the exact (guarded, small-scale) enumeration
oracle used to certify local optimality and cross-check the closed-form
neighborhood cardinalities in analysis.py.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product as iter_product

import numpy as np

from .ap2 import solve_ap2
from .core import (
    Assignment,
    Instance,
    apply_dimension_permutation,
    assignment_weight,
    row_weights,
    swap_weight_matrix,
)

EPS = 1e-9
_BATCH_ROWS = 1_200_000

DV_VARIANTS = ("1dv", "2dv", "sdv")
VECTORWISE = ("2opt", "3opt", "vopt")


@dataclass
class DimensionSubsetFamily:
    """Ordered dimension subsets swept by a dimensionwise heuristic."""

    variant: str
    s: int
    sets: list[tuple[int, ...]]

    def __len__(self):
        return len(self.sets)


def build_family(variant: str, s: int) -> DimensionSubsetFamily:
    """Subset family for a DV variant, in sweep order.

    1dv: the s singletons. 2dv: singletons then pairs, except that for s=3
    pairs collapse onto singleton complements and are dropped, and for s=4
    only the three pairs avoiding dimension 1 survive complementation. sdv:
    all sizes up to floor(s/2); for even s only the size-s/2 subsets
    avoiding dimension 1 (one of each complement pair).
    """
    if s < 3:
        raise ValueError("s must be >= 3")
    if variant not in DV_VARIANTS:
        raise ValueError(f"unknown DV variant {variant!r}")
    singles = [(j,) for j in range(s)]
    if variant == "1dv":
        sets = singles
    elif variant == "2dv":
        if s == 3:
            sets = singles
        elif s == 4:
            sets = singles + [(1, 2), (1, 3), (2, 3)]
        else:
            sets = singles + list(combinations(range(s), 2))
    else:
        sets = []
        for size in range(1, s // 2 + 1):
            if s % 2 == 0 and size == s // 2:
                sets.extend(combinations(range(1, s), size))
            else:
                sets.extend(combinations(range(s), size))
    return DimensionSubsetFamily(variant, s, sets)


@dataclass
class LocalSearchReport:
    """Outcome of one local search run."""

    result: Assignment
    initial_weight: float
    final_weight: float
    passes: int
    ap2_calls: int
    candidate_evals: int
    elapsed: float
    touched_rows: frozenset | None = None


def _report(result, w0, w1, passes, ap2, evals, t0, touched=None) -> LocalSearchReport:
    return LocalSearchReport(
        result, float(w0), float(w1), passes, ap2, evals,
        time.perf_counter() - t0, touched,
    )


def dv_search(inst: Instance, a: Assignment, family: DimensionSubsetFamily) -> LocalSearchReport:
    """Sweep the subset family, applying each strictly improving 2-AP
    relabeling, until a full pass leaves the assignment unchanged."""
    t0 = time.perf_counter()
    a = a.copy()
    w0 = w = assignment_weight(inst, a)
    passes = ap2_calls = evals = 0
    improved = True
    while improved:
        improved = False
        passes += 1
        for dims in family.sets:
            m = swap_weight_matrix(inst, a, dims)
            evals += m.size
            sigma, cost = solve_ap2(m)
            ap2_calls += 1
            if cost < w - EPS:
                a = apply_dimension_permutation(a, dims, sigma)
                w = cost
                improved = True
    return _report(a, w0, w, passes, ap2_calls, evals, t0)


# -- k-opt ------------------------------------------------------------------


@lru_cache(maxsize=16)
def _pair_dim_subsets(s: int) -> tuple[tuple[int, ...], ...]:
    # nonempty subsets of dims 1..s-1 ordered like the lexicographic
    # enumeration of (rho_2, ..., rho_s) swap/identity tuples
    out = []
    for code in range(1, 2 ** (s - 1)):
        out.append(tuple(d for d in range(1, s) if code & (1 << (s - 1 - d))))
    return tuple(out)


@lru_cache(maxsize=16)
def _triple_recombinations(s: int) -> np.ndarray:
    # (R, s-1, 3): for recombination r, the dim-j coords of the three rows
    # become old_coords[table[r, j-1]]
    perms3 = list(permutations(range(3)))
    tuples = list(iter_product(range(6), repeat=s - 1))
    table = np.empty((len(tuples), s - 1, 3), dtype=np.int64)
    for r, tup in enumerate(tuples):
        for j, p in enumerate(tup):
            table[r, j] = perms3[p]
    return table


@lru_cache(maxsize=8)
def _all_triples(n: int) -> np.ndarray:
    i, j, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    mask = (i < j) & (j < k)
    return np.stack([i[mask], j[mask], k[mask]], axis=1).astype(np.int64)


def k_opt(
    inst: Instance,
    a: Assignment,
    k: int,
    dirty: frozenset | None = None,
) -> LocalSearchReport:
    """Exhaustive recombination of every k-subset of vectors, k in {2, 3}.

    Sweeps until a pass commits nothing. Two skip rules: subsets whose
    vectors all sit at the instance weight floor, and subsets whose vectors
    are all unchanged since their last examination (`dirty` seeds the first
    sweep with the externally-changed rows; None means examine everything).
    """
    if k not in (2, 3):
        raise ValueError("k must be 2 or 3")
    if k > inst.n:
        raise ValueError(f"k = {k} exceeds n = {inst.n}")
    t0 = time.perf_counter()
    a = a.copy()
    w_rows = row_weights(inst, a)
    w0 = float(w_rows.sum())
    floor = inst.min_weight_floor()
    examine = np.arange(inst.n) if dirty is None else np.fromiter(sorted(dirty), dtype=np.int64)
    passes = evals = 0
    touched: set[int] = set()
    sweep = _sweep_2opt if k == 2 else _sweep_3opt
    while True:
        passes += 1
        changed, n_evals = sweep(inst, a, w_rows, examine, floor)
        evals += n_evals
        if not changed:
            break
        touched |= changed
        examine = np.fromiter(sorted(changed), dtype=np.int64)
    return _report(a, w0, float(w_rows.sum()), passes, 0, evals, t0, frozenset(touched))


def _sweep_2opt(inst, a, w_rows, examine, floor):
    n, s = inst.n, inst.s
    subsets = _pair_dim_subsets(s)
    changed: set[int] = set()
    evals = 0
    if len(examine) == 0:
        return changed, evals

    deltas = np.empty((len(subsets), n, n))
    for d_idx, dims in enumerate(subsets):
        m = swap_weight_matrix(inst, a, dims)
        evals += m.size
        deltas[d_idx] = m + m.T - w_rows[:, None] - w_rows[None, :]
    best = deltas.min(axis=0)

    cand = best < -EPS
    cand &= np.triu(np.ones((n, n), dtype=bool), 1)
    in_examine = np.zeros(n, dtype=bool)
    in_examine[examine] = True
    cand &= in_examine[:, None] | in_examine[None, :]
    settled = w_rows <= floor + EPS
    cand &= ~(settled[:, None] & settled[None, :])

    for i, j in np.argwhere(cand):
        i, j = int(i), int(j)
        # re-verify against the current assignment; earlier commits in this
        # sweep may have touched either row
        u = a.perms[:, i]
        v = a.perms[:, j]
        coords = np.empty((len(subsets), 2, s), dtype=np.int64)
        coords[:, 0] = u
        coords[:, 1] = v
        for d_idx, dims in enumerate(subsets):
            for d in dims:
                coords[d_idx, 0, d] = v[d]
                coords[d_idx, 1, d] = u[d]
        w = inst.weight_batch(coords.reshape(-1, s)).reshape(-1, 2)
        evals += w.size
        totals = w.sum(axis=1)
        r = int(np.argmin(totals))
        gain = totals[r] - (w_rows[i] + w_rows[j])
        if gain < -EPS:
            a.perms[:, i] = coords[r, 0]
            a.perms[:, j] = coords[r, 1]
            w_rows[i], w_rows[j] = w[r, 0], w[r, 1]
            changed.update((i, j))
    return changed, evals


def _sweep_3opt(inst, a, w_rows, examine, floor):
    n, s = inst.n, inst.s
    table = _triple_recombinations(s)
    big_r = len(table)
    changed: set[int] = set()
    evals = 0
    if len(examine) == 0:
        return changed, evals

    triples = _all_triples(n)
    in_examine = np.zeros(n, dtype=bool)
    in_examine[examine] = True
    keep = in_examine[triples].any(axis=1)
    settled = w_rows <= floor + EPS
    keep &= ~settled[triples].all(axis=1)
    triples = triples[keep]

    chunk = max(1, _BATCH_ROWS // (big_r * 3))
    for start in range(0, len(triples), chunk):
        block = triples[start : start + chunk]
        cur = w_rows[block].sum(axis=1)
        totals = _triple_totals(inst, a, block, table)
        evals += len(block) * big_r * 3
        r_best = totals.argmin(axis=1)
        gain = totals[np.arange(len(block)), r_best] - cur
        for t in np.flatnonzero(gain < -EPS):
            rows = block[t]
            # re-verify on the live assignment
            totals_t = _triple_totals(inst, a, rows[None, :], table)[0]
            evals += big_r * 3
            r = int(np.argmin(totals_t))
            if totals_t[r] < w_rows[rows].sum() - EPS:
                old = a.perms[1:, rows].copy()
                for j in range(1, s):
                    a.perms[j, rows] = old[j - 1][table[r, j - 1]]
                w_rows[rows] = inst.weight_batch(a.perms[:, rows].T)
                changed.update(int(x) for x in rows)
    return changed, evals


def _triple_totals(inst, a, triples, table) -> np.ndarray:
    """(len(triples), R) recombination weights for each triple of rows."""
    c, big_r = len(triples), len(table)
    s = inst.s
    coords = np.empty((c, big_r, 3, s), dtype=np.int64)
    coords[..., 0] = triples[:, None, :]
    for j in range(1, s):
        ecoords = a.perms[j][triples]  # (c, 3)
        coords[..., j] = ecoords[:, table[:, j - 1, :]]
    w = inst.weight_batch(coords.reshape(-1, s)).reshape(c, big_r, 3)
    return w.sum(axis=2)


# -- v-opt ------------------------------------------------------------------


@lru_cache(maxsize=32)
def _swap_masks(s: int, max_size: int) -> np.ndarray:
    """(U, s) boolean masks of dimension subsets with |D| <= max_size,
    ordered by size then lexicographically; row 0 is the empty set."""
    subsets = [()]
    for size in range(1, max_size + 1):
        subsets.extend(combinations(range(s), size))
    masks = np.zeros((len(subsets), s), dtype=bool)
    for idx, dims in enumerate(subsets):
        for d in dims:
            masks[idx, d] = True
    return masks


def v_opt(inst: Instance, a: Assignment, variant: str = "improved") -> LocalSearchReport:
    """Variable-depth interchange: from each starting vector, grow a chain of
    minimum-weight swaps while the accumulated gain stays positive, keeping
    the best assignment seen; repeat until a full run improves nothing."""
    if variant not in ("natural", "improved"):
        raise ValueError(f"unknown v-opt variant {variant!r}")
    if inst.n < 2:
        raise ValueError("v-opt needs n >= 2")
    t0 = time.perf_counter()
    s, n = inst.s, inst.n
    masks = _swap_masks(s, 1 if variant == "natural" else s // 2)
    a = a.copy()
    w_rows = row_weights(inst, a)
    total = float(w_rows.sum())
    w0 = total
    evals = 0
    passes = 0

    run_improved = True
    while run_improved:
        passes += 1
        run_start = total
        for c0 in range(n):
            best_perms = a.perms.copy()
            best_rows = w_rows.copy()
            best_total = total
            avail = np.ones(n, dtype=bool)
            avail[c0] = False
            c_row = c0
            gain = 0.0
            while avail.any():
                c_vec = a.perms[:, c_row]
                rows = np.flatnonzero(avail)
                m_coords = a.perms[:, rows].T  # (t, s)
                cand = np.where(masks[None, :, :], m_coords[:, None, :], c_vec[None, None, :])
                w = inst.weight_batch(cand.reshape(-1, s)).reshape(len(rows), -1)
                evals += w.size
                per_row = w.min(axis=1)
                mi = int(np.argmin(per_row))
                di = int(np.argmin(w[mi]))
                m_row = int(rows[mi])
                v = cand[mi, di]
                w_v = float(w[mi, di])

                gain += float(w_rows[c_row]) - w_v
                if gain <= EPS:
                    break
                m_vec = a.perms[:, m_row]
                v_bar = np.where(v == c_vec, m_vec, c_vec)
                avail[m_row] = False
                w_vbar = float(inst.weight_batch(v_bar[None, :])[0])
                evals += 1
                total += w_v + w_vbar - float(w_rows[c_row]) - float(w_rows[m_row])
                a.perms[:, v[0]] = v
                a.perms[:, v_bar[0]] = v_bar
                w_rows[v[0]] = w_v
                w_rows[v_bar[0]] = w_vbar
                c_row = int(v_bar[0])
                if total < best_total - EPS:
                    best_perms = a.perms.copy()
                    best_rows = w_rows.copy()
                    best_total = total
            # keep the best assignment seen along the chain
            a.perms[:] = best_perms
            w_rows[:] = best_rows
            total = best_total
        run_improved = total < run_start - EPS
    return _report(a, w0, total, passes, 0, evals, t0)


# -- combined ---------------------------------------------------------------


def combined(
    inst: Instance,
    a: Assignment,
    family: DimensionSubsetFamily,
    vectorwise: str,
    v_variant: str = "improved",
) -> LocalSearchReport:
    """Alternate dimensionwise and vectorwise phases until neither improves.

    The pair (sdv, 2opt) is rejected: the 2-opt neighborhood is contained in
    the sdv one, so the combination adds nothing.
    """
    if vectorwise not in VECTORWISE:
        raise ValueError(f"unknown vectorwise heuristic {vectorwise!r}")
    if family.variant == "sdv" and vectorwise == "2opt":
        raise ValueError("the combination sdv+2opt is rejected (no added neighborhood)")
    t0 = time.perf_counter()
    r = dv_search(inst, a, family)
    a, w = r.result, r.final_weight
    w0 = r.initial_weight
    passes, ap2_calls, evals = r.passes, r.ap2_calls, r.candidate_evals
    dv_changed: frozenset | None = None  # None: vectorwise never ran yet
    while True:
        x = w
        if vectorwise == "vopt":
            rv = v_opt(inst, a, v_variant)
        else:
            rv = k_opt(inst, a, 2 if vectorwise == "2opt" else 3, dirty=dv_changed)
        a, w = rv.result, rv.final_weight
        passes += rv.passes
        evals += rv.candidate_evals
        if w >= x - EPS:
            break
        x = w
        before = a.perms.copy()
        rd = dv_search(inst, a, family)
        a, w = rd.result, rd.final_weight
        passes += rd.passes
        ap2_calls += rd.ap2_calls
        evals += rd.candidate_evals
        dv_changed = frozenset(np.flatnonzero((before != a.perms).any(axis=0)))
        if w >= x - EPS:
            break
    return _report(a, w0, w, passes, ap2_calls, evals, t0)


# -- neighborhood enumeration oracle ----------------------------------------


def enumerate_neighborhood(inst: Instance, a: Assignment, kind: str) -> set[Assignment]:
    """Exact neighborhood as a de-duplicated set of assignments (including
    the center). `kind` is one of 1dv/2dv/sdv/2opt/3opt or a 'dv+opt' union
    like 'sdv+3opt'. Guarded to n <= 5 and s <= 4."""
    if inst.n > 5 or inst.s > 4:
        raise ValueError("enumeration guard exceeded (needs n <= 5 and s <= 4)")
    out: set[Assignment] = set()
    for part in kind.split("+"):
        part = part.strip()
        if part in DV_VARIANTS:
            out |= _enum_dv(inst, a, part)
        elif part in ("2opt", "3opt"):
            out |= _enum_kopt(inst, a, 2 if part == "2opt" else 3)
        else:
            raise ValueError(f"unknown neighborhood kind {part!r}")
    return out


def _enum_dv(inst, a, variant):
    family = build_family(variant, inst.s)
    out = {a.copy()}
    for dims in family.sets:
        for rho in permutations(range(inst.n)):
            out.add(apply_dimension_permutation(a, dims, np.asarray(rho)))
    return out


def _enum_kopt(inst, a, k):
    s, n = inst.s, inst.n
    out = {a.copy()}
    # size-k subsets cover all smaller recombinations; for n < k fall back
    # to the largest available subset size
    k = min(k, n)
    for rows in combinations(range(n), k):
        rows = np.asarray(rows)
        coords = a.perms[:, rows]
        for tup in iter_product(permutations(range(k)), repeat=s - 1):
            b = a.copy()
            for j in range(1, s):
                b.perms[j, rows] = coords[j][np.asarray(tup[j - 1])]
            out.add(b)
    return out


# -- wiring -----------------------------------------------------------------

LS_NAMES = (
    "none",
    "1dv", "2dv", "sdv",
    "2opt", "3opt", "vopt",
    "1dv+2opt", "2dv+2opt",
    "1dv+3opt", "2dv+3opt", "sdv+3opt",
    "1dv+vopt", "2dv+vopt", "sdv+vopt",
)


def make_local_search(name: str, s: int, v_variant: str = "improved"):
    """Callable (inst, assignment) -> LocalSearchReport for a CLI-style name."""
    name = name.lower()
    if name not in LS_NAMES:
        raise ValueError(f"unknown local search {name!r} (choose from {', '.join(LS_NAMES)})")
    if name == "none":
        def run_none(inst, a):
            t0 = time.perf_counter()
            w = assignment_weight(inst, a)
            return _report(a.copy(), w, w, 0, 0, 0, t0)
        return run_none
    if name in DV_VARIANTS:
        family = build_family(name, s)
        return lambda inst, a: dv_search(inst, a, family)
    if name in ("2opt", "3opt"):
        k = 2 if name == "2opt" else 3
        return lambda inst, a: k_opt(inst, a, k)
    if name == "vopt":
        return lambda inst, a: v_opt(inst, a, v_variant)
    dv_name, vw = name.split("+")
    family = build_family(dv_name, s)
    return lambda inst, a: combined(inst, a, family, vw, v_variant)
