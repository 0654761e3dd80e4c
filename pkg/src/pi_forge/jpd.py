"""Dense joint probability tables over discrete variables.

Probabilities are stored as a flat float array whose index runs
lexicographically over value tuples with the last variable varying fastest,
i.e. numpy C order over the variables' cardinalities.  All information
quantities are in nats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import InvalidAssignmentError, InvalidInputError, InvalidQueryError, ZeroEvidenceError

#: Largest table accepted, in cells (20 binary variables by default).
MAX_CELLS = 1 << 20

#: Default tolerance for independence tests on exact tables.
DEFAULT_TOL = 1e-9

NORMALIZATION_TOL = 1e-12

Assignment = Union[Mapping[int, int], Sequence[int]]


@dataclass(frozen=True)
class VariableSpec:
    name: str
    cardinality: int = 2

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise InvalidInputError("variable names must be non-empty strings")
        if int(self.cardinality) != self.cardinality or self.cardinality < 2:
            raise InvalidInputError(f"variable {self.name!r}: cardinality must be an integer >= 2")


def binary_vars(n: int, prefix: str = "X") -> tuple[VariableSpec, ...]:
    """``X1 .. Xn``, all binary."""
    return tuple(VariableSpec(f"{prefix}{i + 1}", 2) for i in range(n))


def check_variables(variables: Sequence[VariableSpec]) -> tuple[VariableSpec, ...]:
    variables = tuple(variables)
    if not variables:
        raise InvalidInputError("at least one variable is required")
    names = [v.name for v in variables]
    if len(set(names)) != len(names):
        raise InvalidInputError(f"duplicate variable names in {names}")
    size = math.prod(v.cardinality for v in variables)
    if size > MAX_CELLS:
        raise InvalidInputError(f"table of {size} cells exceeds the limit of {MAX_CELLS}")
    return variables


class JointTable:
    """Immutable joint distribution over an ordered list of variables."""

    __slots__ = ("vars", "probs")

    def __init__(self, variables: Sequence[VariableSpec], probs: Iterable[float], *, validate: bool = True):
        variables = check_variables(variables)
        arr = np.array(probs, dtype=float).reshape(-1)
        if validate:
            size = math.prod(v.cardinality for v in variables)
            if arr.size != size:
                raise InvalidInputError(f"expected {size} probabilities, got {arr.size}")
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise InvalidInputError("probabilities must be finite and non-negative")
            total = math.fsum(arr)
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise InvalidInputError(f"probabilities sum to {total!r}, not 1")
        arr.setflags(write=False)
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "probs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("JointTable is immutable")

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
        """Probabilities reshaped to one axis per variable."""
        return self.probs.reshape(self.shape)

    def var_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InvalidQueryError(f"no variable named {name!r}") from None

    def __getitem__(self, assignment: Assignment) -> float:
        return float(self.probs[index_of(self, assignment)])

    def __eq__(self, other):
        if not isinstance(other, JointTable):
            return NotImplemented
        return self.vars == other.vars and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.vars, self.probs.tobytes()))

    def allclose(self, other: "JointTable", atol: float = 1e-12) -> bool:
        return self.vars == other.vars and bool(np.allclose(self.probs, other.probs, rtol=0.0, atol=atol))

    def __repr__(self):
        return f"JointTable({list(self.names)}, {self.probs.tolist()})"


def uniform(variables: Sequence[VariableSpec]) -> JointTable:
    variables = check_variables(variables)
    size = math.prod(v.cardinality for v in variables)
    return JointTable(variables, np.full(size, 1.0 / size))


def from_factors(factors: Sequence[JointTable]) -> JointTable:
    """Product distribution of tables over disjoint variable sets."""
    variables: list[VariableSpec] = []
    arr = np.ones(())
    for t in factors:
        variables.extend(t.vars)
        arr = np.multiply.outer(arr, t.array())
    return JointTable(variables, arr.reshape(-1))


def product_of_marginals(table: JointTable) -> JointTable:
    """The fully independent table with the same singleton marginals."""
    return from_factors([marginalize(table, {i}) for i in range(table.n)])


def _bindings(table: JointTable, assignment: Assignment) -> dict[int, int]:
    if isinstance(assignment, Mapping):
        bindings = {int(k): int(v) for k, v in assignment.items()}
    else:
        bindings = {i: int(v) for i, v in enumerate(assignment)}
    for var, val in bindings.items():
        if not 0 <= var < table.n:
            raise InvalidAssignmentError(f"variable index {var} out of range")
        if not 0 <= val < table.vars[var].cardinality:
            raise InvalidAssignmentError(
                f"value {val} out of range for {table.vars[var].name} (cardinality {table.vars[var].cardinality})"
            )
    return bindings


def index_of(table: JointTable, full_assignment: Assignment) -> int:
    """Flat index of a full configuration (last variable fastest)."""
    bindings = _bindings(table, full_assignment)
    if len(bindings) != table.n:
        missing = sorted(set(range(table.n)) - set(bindings))
        raise InvalidAssignmentError(f"unbound variables {missing}")
    idx = 0
    for i, card in enumerate(table.shape):
        idx = idx * card + bindings[i]
    return idx


def config_of(table: JointTable, index: int) -> tuple[int, ...]:
    """Inverse of :func:`index_of`."""
    size = table.probs.size
    if not 0 <= index < size:
        raise InvalidAssignmentError(f"flat index {index} out of range [0, {size})")
    return tuple(int(v) for v in np.unravel_index(index, table.shape))


def configurations(shape: Sequence[int]) -> Iterable[tuple[int, ...]]:
    """All value tuples in flat-index order."""
    return itertools.product(*(range(c) for c in shape))


def _check_subset(table: JointTable, idx: Iterable[int], what: str) -> tuple[int, ...]:
    out = tuple(sorted(set(int(i) for i in idx)))
    for i in out:
        if not 0 <= i < table.n:
            raise InvalidQueryError(f"{what}: variable index {i} out of range")
    return out


def marginal_array(table: JointTable, keep: Iterable[int]) -> np.ndarray:
    """Marginal over ``keep`` as an ndarray (axes in ascending variable order)."""
    keep = _check_subset(table, keep, "marginalize")
    drop = tuple(i for i in range(table.n) if i not in keep)
    return table.array().sum(axis=drop) if drop else table.array()


def marginalize(table: JointTable, keep: Iterable[int]) -> JointTable:
    keep = _check_subset(table, keep, "marginalize")
    if not keep:
        raise InvalidQueryError("cannot marginalize onto an empty variable set")
    arr = marginal_array(table, keep)
    return JointTable([table.vars[i] for i in keep], arr.reshape(-1), validate=False)


def condition(table: JointTable, evidence: Mapping[int, int]) -> JointTable:
    """Posterior table over the variables not bound by ``evidence``."""
    bindings = _bindings(table, evidence)
    if not bindings:
        return table
    if len(bindings) >= table.n:
        raise InvalidQueryError("evidence must leave at least one variable unbound")
    index = tuple(bindings.get(i, slice(None)) for i in range(table.n))
    sub = table.array()[index]
    mass = float(sub.sum())
    if mass <= 0.0:
        raise ZeroEvidenceError(f"evidence {bindings} has probability zero")
    rest = [v for i, v in enumerate(table.vars) if i not in bindings]
    return JointTable(rest, (sub / mass).reshape(-1), validate=False)


def _entropy_of(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def entropy(table: JointTable) -> float:
    """Shannon entropy in nats, with 0 ln 0 = 0."""
    return max(0.0, _entropy_of(table.probs))


def grouped_marginal(table: JointTable, groups: Sequence[Sequence[int]]) -> np.ndarray:
    """Marginal with one axis per group of variables (each group flattened)."""
    flat = [i for g in groups for i in g]
    keep = sorted(flat)
    arr = marginal_array(table, keep)
    arr = np.transpose(arr, [keep.index(i) for i in flat])
    sizes = [math.prod(table.vars[i].cardinality for i in g) for g in groups]
    return arr.reshape(sizes)


def mutual_information(table: JointTable, x: int, y: int) -> float:
    """Average mutual information I(X;Y) in nats."""
    if x == y:
        raise InvalidQueryError("mutual information needs two distinct variables")
    _check_subset(table, (x, y), "mutual_information")
    joint = grouped_marginal(table, [[x], [y]])
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    ratio = joint[mask] / (px * py)[mask]
    return max(0.0, float((joint[mask] * np.log(ratio)).sum()))


def _check_disjoint(table, u, z, v):
    u = _check_subset(table, u, "u")
    z = _check_subset(table, z, "z")
    v = _check_subset(table, v, "v")
    if not u or not v:
        raise InvalidQueryError("u and v must be non-empty")
    if set(u) & set(z) or set(u) & set(v) or set(z) & set(v):
        raise InvalidQueryError(f"variable sets must be disjoint: u={u} z={z} v={v}")
    return u, z, v


def conditional_mutual_information(table: JointTable, u: Iterable[int], v: Iterable[int], z: Iterable[int] = ()) -> float:
    """I(U;V|Z) in nats."""
    u, z, v = _check_disjoint(table, u, z, v)
    a = grouped_marginal(table, [u, z, v])
    pz = a.sum(axis=(0, 2), keepdims=True)
    puz = a.sum(axis=2, keepdims=True)
    pzv = a.sum(axis=0, keepdims=True)
    mask = a > 0
    num = (a * pz)[mask]
    den = (puz * pzv)[mask]
    return max(0.0, float((a[mask] * np.log(num / den)).sum()))


def is_independent(table: JointTable, u: Iterable[int], z: Iterable[int], v: Iterable[int], tol: float = DEFAULT_TOL) -> bool:
    """Whether U and V are conditionally independent given Z.

    Uses the pointwise definition: for every configuration with
    P(v, z) > 0, |P(u | v, z) - P(u | z)| <= tol.  An empty ``z`` tests
    marginal independence.  :func:`conditional_mutual_information` is a
    cheaper scalar summary but this test is the authoritative one.
    """
    u, z, v = _check_disjoint(table, u, z, v)
    a = grouped_marginal(table, [u, z, v])
    pzv = a.sum(axis=0)
    puz = a.sum(axis=2)
    pz = puz.sum(axis=0)
    live = pzv > 0
    if not live.any():
        return True
    with np.errstate(divide="ignore", invalid="ignore"):
        cond_full = a / pzv[None, :, :]
        cond_z = (puz / pz[None, :])[:, :, None]
    diff = np.abs(cond_full - cond_z)[:, live]
    return bool(diff.max() <= tol)
