"""Core domain types for the axial multidimensional assignment problem.

An instance couples a dimension count s, a side length n and a weight model
assigning a non-negative weight to every vector of the grid {0..n-1}^s.
An assignment picks n pairwise-disjoint vectors, held in permutation form
with the first permutation frozen to the identity.

Coordinates are 0-based everywhere in code; the text file formats speak
1-based (see files.py).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .rng import mix64, mix64_array


class Family(str, Enum):
    RANDOM = "random"
    PLANTED = "planted"
    CLIQUE = "clique"
    GEOMETRIC = "geometric"
    PRODUCT = "product"
    SQUAREROOT = "squareroot"
    EXPLICIT = "explicit"


def _round_half_up(x: np.ndarray) -> np.ndarray:
    # nearest integer, .5 up; ties cannot occur for the sqrt/distance sums
    # produced by the generated families, so the direction is cosmetic
    return np.floor(x + 0.5)


class WeightModel:
    """Weight function over the vector grid. Immutable after construction."""

    def batch(self, inst: "Instance", coords: np.ndarray) -> np.ndarray:
        """Weights of an (m, s) int array of vectors, as float64 (m,)."""
        raise NotImplementedError

    def min_weight_floor(self, inst: "Instance") -> float:
        """A lower bound on every vector weight; exact minimum not required."""
        raise NotImplementedError


class LazyRandom(WeightModel):
    """Uniform integer weights in [a, b-1], computed on demand.

    weight(e) = a + mix64(mix64(seed) + rank(e)) mod (b - a), with rank the
    lexicographic index of e (dimension 0 most significant). Nothing is
    materialized, so 8-dimensional grids cost no memory. The seed is mixed
    before keying: combining a raw seed with the rank (by xor or addition)
    leaves instances of nearby seeds related by a small rank-space shift,
    i.e. near-identical weight landscapes.
    """

    def __init__(self, a: int, b: int):
        if not a < b:
            raise ValueError(f"LazyRandom requires a < b, got a={a} b={b}")
        if a < 0:
            raise ValueError("weights must be non-negative, need a >= 0")
        self.a = int(a)
        self.b = int(b)

    def _lazy_values(self, inst: "Instance", coords: np.ndarray) -> np.ndarray:
        strides = (inst.n ** np.arange(inst.s - 1, -1, -1, dtype=np.uint64)).astype(np.uint64)
        with np.errstate(over="ignore"):
            rank = coords.astype(np.uint64) @ strides
            z = mix64_array(np.uint64(mix64(inst.seed)) + rank)
        return (z % np.uint64(self.b - self.a)).astype(np.float64) + self.a

    def batch(self, inst, coords):
        return self._lazy_values(inst, coords)

    def min_weight_floor(self, inst):
        return float(self.a)


class Planted(LazyRandom):
    """LazyRandom overridden to value a on the n vectors of a planted
    assignment, which is therefore an optimal solution of weight a*n."""

    def __init__(self, a: int, b: int, planted: "Assignment"):
        super().__init__(a, b)
        self.planted = planted

    def batch(self, inst, coords):
        w = self._lazy_values(inst, coords)
        rows = coords[:, 0]
        hit = np.ones(len(coords), dtype=bool)
        for j in range(1, inst.s):
            hit &= coords[:, j] == self.planted.perms[j][rows]
        w[hit] = self.a
        return w


class ExplicitTensor(WeightModel):
    """Dense weight tensor, flat in lexicographic order (dim 0 most significant)."""

    def __init__(self, s: int, n: int, values: Sequence[float]):
        vals = np.asarray(values, dtype=np.float64).ravel()
        if len(vals) != n**s:
            raise ValueError(f"need n^s = {n**s} values, got {len(vals)}")
        if not np.isfinite(vals).all():
            raise ValueError("weights must be finite")
        if (vals < 0).any():
            raise ValueError("weights must be non-negative")
        self.values = vals
        self._min = float(vals.min()) if len(vals) else 0.0

    def batch(self, inst, coords):
        strides = inst.n ** np.arange(inst.s - 1, -1, -1, dtype=np.int64)
        return self.values[coords @ strides]

    def min_weight_floor(self, inst):
        return self._min


class CliqueSum(WeightModel):
    """Decomposable weights: sum of pairwise distances over all dimension pairs."""

    def __init__(self, s: int, mats: dict[tuple[int, int], np.ndarray]):
        self.mats = {k: np.asarray(v, dtype=np.float64) for k, v in sorted(mats.items())}
        expected = set(combinations(range(s), 2))
        if set(self.mats) != expected:
            raise ValueError("need one matrix per dimension pair i < j")

    def _pair_sum(self, coords: np.ndarray) -> np.ndarray:
        acc = np.zeros(len(coords), dtype=np.float64)
        for (i, j), d in self.mats.items():
            acc += d[coords[:, i], coords[:, j]]
        return acc

    def batch(self, inst, coords):
        return self._pair_sum(coords)

    def min_weight_floor(self, inst):
        return float(sum(d.min() for d in self.mats.values()))


class SquareRootSquares(CliqueSum):
    """Decomposable weights: sqrt of the sum of squared pairwise distances,
    rounded to the nearest integer."""

    def batch(self, inst, coords):
        acc = np.zeros(len(coords), dtype=np.float64)
        for (i, j), d in self.mats.items():
            acc += d[coords[:, i], coords[:, j]] ** 2
        return _round_half_up(np.sqrt(acc))

    def min_weight_floor(self, inst):
        return float(_round_half_up(np.sqrt(sum(d.min() ** 2 for d in self.mats.values()))))


class GeometricPoints(WeightModel):
    """Clique-style sum of planar Euclidean distances between per-dimension
    points; the vector weight is rounded to the nearest integer. Points are
    stored and distances derived on demand."""

    def __init__(self, points: Sequence[np.ndarray]):
        self.points = [np.asarray(p, dtype=np.float64) for p in points]
        for p in self.points:
            if p.ndim != 2 or p.shape[1] != 2:
                raise ValueError("each dimension needs an (n, 2) point array")
        self._floor: float | None = None

    def batch(self, inst, coords):
        acc = np.zeros(len(coords), dtype=np.float64)
        for i, j in combinations(range(inst.s), 2):
            pi = self.points[i][coords[:, i]]
            pj = self.points[j][coords[:, j]]
            acc += np.hypot(pi[:, 0] - pj[:, 0], pi[:, 1] - pj[:, 1])
        return _round_half_up(acc)

    def min_weight_floor(self, inst):
        if self._floor is None:
            total = 0.0
            for i, j in combinations(range(inst.s), 2):
                pi, pj = self.points[i], self.points[j]
                dx = pi[:, None, 0] - pj[None, :, 0]
                dy = pi[:, None, 1] - pj[None, :, 1]
                total += float(np.hypot(dx, dy).min())
            self._floor = float(_round_half_up(np.asarray(total)))
        return self._floor


class ProductWeights(WeightModel):
    """Decomposable weights: product of one positive factor per dimension."""

    def __init__(self, factors: Sequence[np.ndarray]):
        self.factors = [np.asarray(f, dtype=np.float64) for f in factors]
        for f in self.factors:
            if (f <= 0).any():
                raise ValueError("product factors must be positive")

    def batch(self, inst, coords):
        acc = self.factors[0][coords[:, 0]].copy()
        for j in range(1, inst.s):
            acc *= self.factors[j][coords[:, j]]
        return acc

    def min_weight_floor(self, inst):
        out = 1.0
        for f in self.factors:
            out *= float(f.min())
        return out


@dataclass(frozen=True)
class Instance:
    """One problem instance: s >= 3 dimensions, side length n, weight model."""

    s: int
    n: int
    family: Family
    seed: int
    weights: WeightModel = field(repr=False)

    def __post_init__(self):
        if self.s < 3:
            raise ValueError(f"s must be >= 3, got {self.s}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")

    def weight(self, e: Sequence[int]) -> float:
        """Weight of a single vector; validates coordinate ranges."""
        coords = np.asarray(e, dtype=np.int64)
        if coords.shape != (self.s,):
            raise ValueError(f"vector must have {self.s} coordinates")
        if (coords < 0).any() or (coords >= self.n).any():
            raise ValueError(f"coordinate out of range in {tuple(coords)}")
        return float(self.weights.batch(self, coords[None, :])[0])

    def weight_batch(self, coords: np.ndarray) -> np.ndarray:
        """Weights of an (m, s) coordinate array; no range validation."""
        return self.weights.batch(self, np.asarray(coords, dtype=np.int64))

    def min_weight_floor(self) -> float:
        return self.weights.min_weight_floor(self)


class Assignment:
    """Full feasible assignment in permutation form.

    perms is an (s, n) int64 array; row j holds the dimension-j coordinates
    of the n vectors, row 0 is frozen to the identity, so the vector in row
    i is perms[:, i].
    """

    __slots__ = ("perms",)

    def __init__(self, perms: np.ndarray):
        self.perms = np.asarray(perms, dtype=np.int64)

    @classmethod
    def identity(cls, s: int, n: int) -> "Assignment":
        return cls(np.tile(np.arange(n, dtype=np.int64), (s, 1)))

    @classmethod
    def from_perm_rows(cls, rows: Iterable[Sequence[int]]) -> "Assignment":
        return cls(np.asarray(list(rows), dtype=np.int64))

    @property
    def s(self) -> int:
        return self.perms.shape[0]

    @property
    def n(self) -> int:
        return self.perms.shape[1]

    def vectors(self) -> np.ndarray:
        """(n, s) array with one vector per row."""
        return self.perms.T.copy()

    def vector(self, i: int) -> np.ndarray:
        return self.perms[:, i].copy()

    def copy(self) -> "Assignment":
        return Assignment(self.perms.copy())

    def is_valid(self) -> bool:
        n = self.n
        if not (self.perms[0] == np.arange(n)).all():
            return False
        return all((np.sort(row) == np.arange(n)).all() for row in self.perms)

    def validate(self) -> None:
        if not self.is_valid():
            raise ValueError("not a valid assignment (rows must be permutations, row 0 identity)")

    def key(self) -> bytes:
        return self.perms[1:].tobytes()

    def __eq__(self, other):
        return isinstance(other, Assignment) and np.array_equal(self.perms, other.perms)

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Assignment(s={self.s}, n={self.n})"


def weight(inst: Instance, e: Sequence[int]) -> float:
    """Weight of one vector (0-based coordinates)."""
    return inst.weight(e)


def assignment_weight(inst: Instance, a: Assignment) -> float:
    """Total weight of an assignment's n vectors."""
    return float(inst.weight_batch(a.perms.T).sum())


def row_weights(inst: Instance, a: Assignment) -> np.ndarray:
    """Per-vector weights of an assignment, indexed by row."""
    return inst.weight_batch(a.perms.T)


def swap_vectors(u: Sequence[int], v: Sequence[int], dims: Iterable[int]) -> np.ndarray:
    """Vector equal to v on the given dimensions and to u elsewhere."""
    out = np.asarray(u, dtype=np.int64).copy()
    vv = np.asarray(v, dtype=np.int64)
    for j in dims:
        out[j] = vv[j]
    return out


def _validate_perm(rho: np.ndarray, n: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.int64)
    if rho.shape != (n,) or not (np.sort(rho) == np.arange(n)).all():
        raise ValueError("rho is not a permutation of 0..n-1")
    return rho


def apply_dimension_permutation(a: Assignment, dims: Iterable[int], rho: np.ndarray) -> Assignment:
    """Re-permute the listed dimensions jointly by rho.

    The result's vector set is { swap(A^i, A^rho(i), dims) : i }, renormalized
    so that row 0 stays the identity permutation.
    """
    rho = _validate_perm(rho, a.n)
    perms = a.perms.copy()
    dims = set(dims)
    for j in dims:
        perms[j] = perms[j][rho]
    if 0 in dims:
        inv = np.empty(a.n, dtype=np.int64)
        inv[perms[0]] = np.arange(a.n)
        perms = perms[:, inv]
    return Assignment(perms)


def swap_weight_matrix(inst: Instance, a: Assignment, dims: Iterable[int]) -> np.ndarray:
    """(n, n) matrix M with M[i, j] = weight(swap(A^i, A^j, dims))."""
    n, s = inst.n, inst.s
    dims = set(dims)
    coords = np.empty((s, n, n), dtype=np.int64)
    for j in range(s):
        if j in dims:
            coords[j] = a.perms[j][None, :]
        else:
            coords[j] = a.perms[j][:, None]
    flat = coords.reshape(s, n * n).T
    return inst.weight_batch(flat).reshape(n, n)
