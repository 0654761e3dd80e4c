"""Count-based datasets: seeded sampling, exact-frequency construction, queries."""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidArgumentError, InvalidAssignmentError, InvalidInputError, NonRealizableError
from .jpd import JointTable, VariableSpec, check_variables, config_of

#: Largest deviation of m * P(c) from an integer accepted by exact_dataset.
REALIZABLE_TOL = 1e-9


class Dataset:
    """Complete-case data stored as per-configuration counts.

    ``counts`` is indexed with the same last-variable-fastest convention as
    :class:`~pi_forge.jpd.JointTable`; the order of individual cases is not
    represented.
    """

    __slots__ = ("vars", "counts")

    def __init__(self, variables: Sequence[VariableSpec], counts: Iterable[int]):
        variables = check_variables(variables)
        arr = np.asarray(counts)
        if arr.dtype.kind == "f":
            if not np.all(arr == np.round(arr)):
                raise InvalidInputError("counts must be integers")
        arr = arr.astype(np.int64).reshape(-1)
        size = math.prod(v.cardinality for v in variables)
        if arr.size != size:
            raise InvalidInputError(f"expected {size} counts, got {arr.size}")
        if np.any(arr < 0):
            raise InvalidInputError("counts must be non-negative")
        if arr.sum() < 1:
            raise InvalidInputError("a dataset needs at least one case")
        arr.setflags(write=False)
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "counts", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Dataset is immutable")

    @property
    def m(self) -> int:
        return int(self.counts.sum())

    @property
    def n(self) -> int:
        return len(self.vars)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.vars)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.vars)

    def array(self) -> np.ndarray:
        return self.counts.reshape(self.shape)

    def marginal_counts(self, keep: Sequence[int]) -> np.ndarray:
        """Count array with one axis per kept variable, in the order given."""
        keep = list(keep)
        if len(set(keep)) != len(keep):
            raise InvalidInputError(f"repeated variable in {keep}")
        drop = tuple(i for i in range(self.n) if i not in keep)
        arr = self.array().sum(axis=drop) if drop else self.array()
        ordered = sorted(keep)
        return np.transpose(arr, [ordered.index(i) for i in keep])

    def rows(self) -> Iterable[tuple[int, ...]]:
        """Expand counts into cases, in configuration-index order."""
        for idx in np.flatnonzero(self.counts):
            config = tuple(int(v) for v in np.unravel_index(idx, self.shape))
            for _ in range(int(self.counts[idx])):
                yield config

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.vars == other.vars and np.array_equal(self.counts, other.counts)

    def __hash__(self):
        return hash((self.vars, self.counts.tobytes()))

    def __repr__(self):
        return f"Dataset({list(self.names)}, m={self.m})"


def sample(table: JointTable, m: int, seed: int) -> Dataset:
    """Draw ``m`` i.i.d. cases by inverse CDF over the flat table.

    Uniforms come from numpy's PCG64 generator seeded with ``seed``, so the
    same (table, m, seed) always yields the same counts.
    """
    if int(m) != m or m < 1:
        raise InvalidArgumentError(f"sample size must be a positive integer, got {m!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    cdf = np.cumsum(table.probs)
    u = rng.random(int(m)) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    # guard the u == cdf[-1] edge; snap to the last cell with positive mass
    last = int(np.flatnonzero(table.probs)[-1])
    idx = np.minimum(idx, last)
    counts = np.bincount(idx, minlength=table.probs.size)
    return Dataset(table.vars, counts)


def exact_dataset(table: JointTable, m: int) -> Dataset:
    """Dataset whose counts equal m * P(c) exactly for every configuration."""
    if int(m) != m or m < 1:
        raise InvalidArgumentError(f"sample size must be a positive integer, got {m!r}")
    scaled = table.probs * m
    rounded = np.round(scaled)
    bad = np.flatnonzero(np.abs(scaled - rounded) > REALIZABLE_TOL)
    if bad.size:
        config = config_of(table, int(bad[0]))
        raise NonRealizableError(
            f"m={m} is not realizable: m*P{config} = {float(scaled[bad[0]])!r} is not an integer"
        )
    return Dataset(table.vars, rounded.astype(np.int64))


def count(dataset: Dataset, partial: Mapping[int, int] | None = None) -> int:
    """Number of cases consistent with a partial assignment."""
    partial = dict(partial or {})
    index = [slice(None)] * dataset.n
    for var, val in partial.items():
        if not 0 <= var < dataset.n:
            raise InvalidAssignmentError(f"variable index {var} out of range")
        if not 0 <= val < dataset.vars[var].cardinality:
            raise InvalidAssignmentError(f"value {val} out of range for {dataset.vars[var].name}")
        index[var] = val
    return int(dataset.array()[tuple(index)].sum())


def empirical(dataset: Dataset) -> JointTable:
    return JointTable(dataset.vars, dataset.counts / dataset.m, validate=False)


def from_rows(variables: Sequence[VariableSpec], rows: Iterable[Sequence[int]]) -> Dataset:
    variables = check_variables(variables)
    shape = tuple(v.cardinality for v in variables)
    counts = np.zeros(math.prod(shape), dtype=np.int64)
    for row in rows:
        if len(row) != len(shape) or any(not 0 <= int(x) < c for x, c in zip(row, shape)):
            raise InvalidAssignmentError(f"bad case {tuple(row)} for cardinalities {shape}")
        counts[np.ravel_multi_index(tuple(int(x) for x in row), shape)] += 1
    return Dataset(variables, counts)
