"""Structure scores: network entropy, K2, mutual-information link weights,
two-part description length and KL cross entropy."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .data import Dataset, empirical
from .errors import InvalidInputError
from .jpd import JointTable, grouped_marginal, mutual_information

ENTROPY = "entropy-nats"
LOG_K2 = "log-k2"
MDL = "mdl-bits"
CROSS_ENTROPY = "cross-entropy-nats"

_MINIMIZED = {ENTROPY, MDL, CROSS_ENTROPY}

Arc = tuple[int, int]


@dataclass(frozen=True)
class Dag:
    """Parent sets per node plus an optional total ordering.

    When ``ordering`` is given every arc must point from an earlier to a
    later node in it.
    """

    n: int
    parents: tuple[frozenset, ...]
    ordering: tuple[int, ...] | None = None

    def __post_init__(self):
        parents = tuple(frozenset(int(p) for p in ps) for ps in self.parents)
        object.__setattr__(self, "parents", parents)
        if len(parents) != self.n:
            raise InvalidInputError(f"expected {self.n} parent sets, got {len(parents)}")
        for x, ps in enumerate(parents):
            if x in ps:
                raise InvalidInputError(f"self-loop on node {x}")
            if any(not 0 <= p < self.n for p in ps):
                raise InvalidInputError(f"parent index out of range for node {x}")
        if self.ordering is not None:
            ordering = tuple(int(i) for i in self.ordering)
            object.__setattr__(self, "ordering", ordering)
            check_ordering(ordering, self.n)
            pos = {v: i for i, v in enumerate(ordering)}
            for p, c in self.arcs():
                if pos[p] >= pos[c]:
                    raise InvalidInputError(f"arc {p}->{c} violates the ordering {ordering}")
        elif topological_order(parents) is None:
            raise InvalidInputError("graph contains a directed cycle")

    @classmethod
    def empty(cls, n: int, ordering: Sequence[int] | None = None) -> "Dag":
        return cls(n, tuple(frozenset() for _ in range(n)), None if ordering is None else tuple(ordering))

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[Arc], ordering: Sequence[int] | None = None) -> "Dag":
        parents: list[set[int]] = [set() for _ in range(n)]
        for p, c in arcs:
            parents[c].add(p)
        return cls(n, tuple(frozenset(ps) for ps in parents), None if ordering is None else tuple(ordering))

    def arcs(self) -> list[Arc]:
        return sorted((p, c) for c, ps in enumerate(self.parents) for p in ps)

    def add_arcs(self, arcs: Iterable[Arc]) -> "Dag":
        return Dag.from_arcs(self.n, list(self.arcs()) + list(arcs), self.ordering)

    def with_parents(self, x: int, parents: Iterable[int]) -> "Dag":
        ps = list(self.parents)
        ps[x] = frozenset(parents)
        return Dag(self.n, tuple(ps), self.ordering)

    def skeleton(self) -> frozenset:
        return frozenset((min(p, c), max(p, c)) for p, c in self.arcs())

    def is_connected(self) -> bool:
        """Whether the underlying undirected graph is connected."""
        return _connected(self.n, self.skeleton())


def check_ordering(ordering: Sequence[int], n: int) -> None:
    if sorted(ordering) != list(range(n)):
        raise InvalidInputError(f"ordering {tuple(ordering)} is not a permutation of 0..{n - 1}")


def topological_order(parents: Sequence[frozenset]) -> list[int] | None:
    """Kahn's algorithm; None when the graph has a cycle."""
    n = len(parents)
    indeg = [len(ps) for ps in parents]
    children: list[list[int]] = [[] for _ in range(n)]
    for c, ps in enumerate(parents):
        for p in ps:
            children[p].append(c)
    ready = [i for i in range(n) if indeg[i] == 0]
    order = []
    while ready:
        node = ready.pop()
        order.append(node)
        for c in children[node]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    return order if len(order) == n else None


def _connected(n: int, links: Iterable[tuple[int, int]]) -> bool:
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in links:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == n


@dataclass(frozen=True)
class ScoreValue:
    kind: str
    value: float
    node_terms: tuple[float, ...] = field(default=())

    def better_than(self, other: "ScoreValue", tol: float = 0.0) -> bool:
        """Strict improvement by more than ``tol`` in the kind's direction."""
        if self.kind != other.kind:
            raise InvalidInputError(f"cannot compare {self.kind} with {other.kind}")
        if self.kind in _MINIMIZED:
            return self.value < other.value - tol
        return self.value > other.value + tol

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value, "node_terms": list(self.node_terms)}


Source = Union[JointTable, Dataset]


def as_table(source: Source) -> JointTable:
    return empirical(source) if isinstance(source, Dataset) else source


def _check_dag(n: int, dag: Dag) -> None:
    if dag.n != n:
        raise InvalidInputError(f"graph has {dag.n} nodes but the source has {n} variables")


def node_entropy(source: JointTable, x: int, parents: Iterable[int]) -> float:
    """Sum over parent configurations of P(pi) * H(X | pi), in nats."""
    parents = sorted(parents)
    if x in parents:
        raise InvalidInputError(f"node {x} cannot be its own parent")
    fam = grouped_marginal(source, [parents, [x]])
    total = 0.0
    for row in fam:
        mass = row.sum()
        if mass <= 0:
            continue
        cond = row[row > 0] / mass
        total += mass * float(-(cond * np.log(cond)).sum())
    return max(0.0, total)


def network_entropy(source: Source, dag: Dag) -> ScoreValue:
    table = as_table(source)
    _check_dag(table.n, dag)
    terms = tuple(node_entropy(table, x, dag.parents[x]) for x in range(dag.n))
    return ScoreValue(ENTROPY, math.fsum(terms), terms)


def _family_counts(dataset: Dataset, x: int, parents: Iterable[int]) -> np.ndarray:
    parents = sorted(parents)
    if x in parents:
        raise InvalidInputError(f"node {x} cannot be its own parent")
    card = dataset.vars[x].cardinality
    return dataset.marginal_counts(parents + [x]).reshape(-1, card)


def k2_log_value(dataset: Dataset, x: int, parents: Iterable[int]) -> float:
    """ln g(X, parents) as a bare float."""
    fam = _family_counts(dataset, x, parents)
    r = fam.shape[1]
    lg_r = math.lgamma(r)
    total = 0.0
    for row in fam:
        n_pi = int(row.sum())
        if n_pi == 0:
            continue
        total += lg_r - math.lgamma(n_pi + r) + sum(math.lgamma(int(c) + 1) for c in row)
    return total


def k2_g_log(dataset: Dataset, x: int, parents: Iterable[int]) -> ScoreValue:
    """Natural log of the K2 score g(X, parents), via log-gamma of counts."""
    value = k2_log_value(dataset, x, parents)
    return ScoreValue(LOG_K2, value, (value,))


def k2_g_exact(dataset: Dataset, x: int, parents: Iterable[int]) -> Fraction:
    """The K2 score as an exact ratio of factorial products."""
    fam = _family_counts(dataset, x, parents)
    r = fam.shape[1]
    num, den = 1, 1
    for row in fam:
        n_pi = int(row.sum())
        if n_pi == 0:
            continue
        num *= math.factorial(r - 1) * math.prod(math.factorial(int(c)) for c in row)
        den *= math.factorial(n_pi + r - 1)
    return Fraction(num, den)


def link_weights(source: Source) -> list[tuple[tuple[int, int], float]]:
    """All unordered pairs with their mutual information, largest first.

    Ties (compared at 1e-12 resolution) keep lexicographic pair order.
    """
    table = as_table(source)
    if table.n < 2:
        raise InvalidInputError("link weights need at least two variables")
    weights = [((i, j), mutual_information(table, i, j)) for i, j in itertools.combinations(range(table.n), 2)]
    return sorted(weights, key=lambda item: (-round(item[1], 12), item[0]))


def description_length(dag: Dag, source: Source, m: int | None = None) -> ScoreValue:
    """Two-part description length in bits.

    Per node: ``|parents| * log2(n)`` bits for the structure, ``log2(m) / 2``
    bits per free parameter, and ``m`` times the conditional entropy of the
    node given its parents (in bits) for the data.  A :class:`Dataset` source
    supplies ``m`` itself; a :class:`JointTable` source needs it passed in.
    """
    if isinstance(source, Dataset):
        m = source.m if m is None else m
    elif m is None:
        raise InvalidInputError("a probability table needs an explicit case count m")
    if m < 1:
        raise InvalidInputError(f"case count must be positive, got {m}")
    table = as_table(source)
    _check_dag(table.n, dag)
    cards = table.shape
    log2n = math.log2(dag.n) if dag.n > 1 else 0.0
    terms = []
    for x in range(dag.n):
        ps = dag.parents[x]
        params = (cards[x] - 1) * math.prod(cards[p] for p in ps)
        network = len(ps) * log2n + params * math.log2(m) / 2.0
        data = m * node_entropy(table, x, ps) / math.log(2)
        terms.append(network + data)
    return ScoreValue(MDL, math.fsum(terms), tuple(terms))


def factorized(dag: Dag, source: Source) -> np.ndarray:
    """Flat joint of the product of the source's conditionals along ``dag``.

    Conditionals on zero-probability parent configurations are taken as 0.
    """
    table = as_table(source)
    _check_dag(table.n, dag)
    full = table.array()
    q = np.ones(full.shape)
    axes = range(table.n)
    for x in axes:
        fam = set(dag.parents[x]) | {x}
        fam_marg = full.sum(axis=tuple(i for i in axes if i not in fam), keepdims=True)
        par_marg = full.sum(axis=tuple(i for i in axes if i not in dag.parents[x]), keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            cond = np.where(par_marg > 0, fam_marg / par_marg, 0.0)
        q = q * cond
    return q.reshape(-1)


def cross_entropy(p: Source, dag: Dag, source: Source | None = None) -> ScoreValue:
    """KL divergence from ``p`` to the factorization of ``source`` along ``dag``.

    ``source`` defaults to ``p``.  Returns ``inf`` when ``p`` puts mass where
    the factorization has none.
    """
    p_table = as_table(p)
    q = factorized(dag, p_table if source is None else source)
    pp = p_table.probs
    if q.shape != pp.shape:
        raise InvalidInputError("p and the factorized model are over different variables")
    mask = pp > 0
    if np.any(q[mask] <= 0):
        return ScoreValue(CROSS_ENTROPY, math.inf)
    value = float((pp[mask] * np.log(pp[mask] / q[mask])).sum())
    return ScoreValue(CROSS_ENTROPY, max(0.0, value))
