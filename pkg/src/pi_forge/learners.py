"""Structure learners with configurable lookahead width.

``k`` is the largest number of arcs a single search step may add.  All arcs
of one step point into a common child, so ``k = 1`` is ordinary single-link
lookahead and ``k = n - 1`` lets one step give a node every predecessor at
once.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .data import Dataset
from .errors import InvalidInputError
from .jpd import DEFAULT_TOL, is_independent
from .scores import (
    LOG_K2,
    Arc,
    Dag,
    ScoreValue,
    Source,
    as_table,
    check_ordering,
    cross_entropy,
    description_length,
    k2_g_exact,
    k2_log_value,
    link_weights,
    network_entropy,
    node_entropy,
)

#: Minimum decrease of entropy / description length that counts as improvement.
IMPROVEMENT_TOL = 1e-12

#: Case count used for description lengths when the source is an exact table.
DEFAULT_MDL_CASES = 1000

# log-K2 values closer than this are compared with the exact rational oracle
_K2_EXACT_BAND = 1e-9


@dataclass(frozen=True)
class SearchStep:
    arcs: tuple[Arc, ...]
    score_before: float
    score_after: float
    accepted: bool
    # the step's arcs are a whole candidate graph rather than an addition
    replace: bool = False

    def to_dict(self) -> dict:
        def num(x):
            return x if math.isfinite(x) else None

        return {
            "arcs": [list(a) for a in self.arcs],
            "score_before": num(self.score_before),
            "score_after": num(self.score_after),
            "accepted": self.accepted,
            "replace": self.replace,
        }


@dataclass
class SearchTrace:
    algorithm: str
    steps: list[SearchStep] = field(default_factory=list)
    final_score: ScoreValue | None = None
    link_list: list[tuple[tuple[int, int], float]] | None = None

    def accepted(self) -> list[SearchStep]:
        return [s for s in self.steps if s.accepted]

    def replay(self, initial: Dag) -> Dag:
        dag = initial
        for step in self.accepted():
            if step.replace:
                dag = Dag.from_arcs(initial.n, step.arcs, initial.ordering)
            else:
                dag = dag.add_arcs(step.arcs)
        return dag


@dataclass(frozen=True)
class UGraph:
    n: int
    links: frozenset

    def __post_init__(self):
        links = frozenset((min(a, b), max(a, b)) for a, b in self.links)
        if any(a == b for a, b in links):
            raise InvalidInputError("self-loops are not allowed")
        object.__setattr__(self, "links", links)

    def neighbors(self, i: int) -> set[int]:
        return {b if a == i else a for a, b in self.links if i in (a, b)}

    def sorted_links(self) -> list[tuple[int, int]]:
        return sorted(self.links)


@dataclass(frozen=True)
class Removal:
    link: tuple[int, int]
    sepset: tuple[int, ...]
    order: int

    def to_dict(self) -> dict:
        return {"link": list(self.link), "sepset": list(self.sepset), "order": self.order}


def _resolve_ordering(ordering: Sequence[int] | None, n: int) -> tuple[int, ...]:
    ordering = tuple(range(n)) if ordering is None else tuple(int(i) for i in ordering)
    check_ordering(ordering, n)
    return ordering


def _check_k(k: int) -> None:
    if int(k) != k or k < 1:
        raise InvalidInputError(f"lookahead width must be a positive integer, got {k!r}")


def _candidate_sets(preds: Sequence[int], width: int):
    for size in range(1, min(width, len(preds)) + 1):
        yield from itertools.combinations(sorted(preds), size)


def kutato_learn(source: Source, ordering: Sequence[int] | None = None, k: int = 1, tol: float = IMPROVEMENT_TOL) -> tuple[Dag, SearchTrace]:
    """Greedy minimum network-entropy search from the empty graph.

    Each step scores every set of at most ``k`` new arcs into one child
    (parents drawn from the child's predecessors in ``ordering``) and keeps
    the best one only if it lowers the entropy by more than ``tol``.
    """
    _check_k(k)
    table = as_table(source)
    n = table.n
    ordering = _resolve_ordering(ordering, n)
    pos = {v: i for i, v in enumerate(ordering)}
    dag = Dag.empty(n, ordering)
    cache: dict[tuple[int, frozenset], float] = {}

    def term(x, parents):
        key = (x, frozenset(parents))
        if key not in cache:
            cache[key] = node_entropy(table, x, parents)
        return cache[key]

    terms = [term(x, ()) for x in range(n)]
    current = math.fsum(terms)
    trace = SearchTrace("kutato")
    while True:
        best_score, best_arcs, best_child, best_parents = None, None, None, None
        for x in ordering:
            have = dag.parents[x]
            preds = [y for y in ordering[: pos[x]] if y not in have]
            for combo in _candidate_sets(preds, k):
                parents = have | set(combo)
                score = math.fsum(terms[:x] + [term(x, parents)] + terms[x + 1:])
                arcs = tuple(sorted((p, x) for p in combo))
                if (
                    best_score is None
                    or score < best_score - tol
                    or (abs(score - best_score) <= tol and arcs < best_arcs)
                ):
                    best_score, best_arcs, best_child, best_parents = score, arcs, x, parents
        if best_score is None:
            break
        accepted = best_score < current - tol
        trace.steps.append(SearchStep(best_arcs, current, best_score, accepted))
        if not accepted:
            break
        dag = dag.with_parents(best_child, best_parents)
        terms[best_child] = term(best_child, best_parents)
        current = math.fsum(terms)
    trace.final_score = network_entropy(table, dag)
    return dag, trace


def _k2_cmp(dataset: Dataset, x: int, a: frozenset, a_val: float, b: frozenset, b_val: float) -> int:
    """Sign of g(x, a) - g(x, b); near-ties are settled exactly."""
    if abs(a_val - b_val) > _K2_EXACT_BAND * max(1.0, abs(a_val)):
        return 1 if a_val > b_val else -1
    ga, gb = k2_g_exact(dataset, x, a), k2_g_exact(dataset, x, b)
    return (ga > gb) - (ga < gb)


def k2_learn(dataset: Dataset, ordering: Sequence[int] | None = None, max_parents: int | None = None, k: int = 1) -> tuple[Dag, SearchTrace]:
    """K2 parent search, optionally adding up to ``k`` parents per step.

    For every node in ``ordering`` the parent set grows greedily from empty
    while some candidate set of predecessors strictly increases g.
    """
    if not isinstance(dataset, Dataset):
        raise InvalidInputError("K2 needs a Dataset with integer counts")
    _check_k(k)
    n = dataset.n
    ordering = _resolve_ordering(ordering, n)
    if max_parents is None:
        max_parents = max(1, n - 1)
    if int(max_parents) != max_parents or max_parents < 1:
        raise InvalidInputError(f"max_parents must be >= 1, got {max_parents!r}")
    dag = Dag.empty(n, ordering)
    node_scores = [k2_log_value(dataset, x, ()) for x in range(n)]
    trace = SearchTrace("k2")
    for i, x in enumerate(ordering):
        parents: frozenset = frozenset()
        current = node_scores[x]
        while len(parents) < max_parents:
            preds = [y for y in ordering[:i] if y not in parents]
            best = None  # (value, arcs, parent set)
            for combo in _candidate_sets(preds, min(k, max_parents - len(parents))):
                cand = parents | set(combo)
                val = k2_log_value(dataset, x, cand)
                arcs = tuple(sorted((p, x) for p in combo))
                if best is None:
                    best = (val, arcs, cand)
                    continue
                c = _k2_cmp(dataset, x, cand, val, best[2], best[0])
                if c > 0 or (c == 0 and arcs < best[1]):
                    best = (val, arcs, cand)
            if best is None:
                break
            before = math.fsum(node_scores)
            accepted = _k2_cmp(dataset, x, best[2], best[0], parents, current) > 0
            after = before - current + best[0]
            trace.steps.append(SearchStep(best[1], before, after, accepted))
            if not accepted:
                break
            parents = best[2]
            current = best[0]
            node_scores[x] = current
            dag = dag.with_parents(x, parents)
    trace.final_score = ScoreValue(LOG_K2, math.fsum(node_scores), tuple(node_scores))
    return dag, trace


def pc_skeleton(source: Source, tol: float = DEFAULT_TOL, max_order: int | None = None) -> tuple[UGraph, list[Removal]]:
    """Constraint-based link removal starting from the complete graph.

    Pass ``order`` removes a link X-Y when X and Y are independent given some
    ``order``-sized subset of the current neighbours of X (or of Y).  Stops
    after ``max_order`` (default n - 2) or when no endpoint has enough
    neighbours left.  Links are visited in lexicographic order and removals
    take effect immediately.
    """
    table = as_table(source)
    n = table.n
    if max_order is None:
        max_order = max(0, n - 2)
    adj = {i: set(range(n)) - {i} for i in range(n)}
    removals: list[Removal] = []
    order = 0
    while order <= max_order:
        tested = False
        for x, y in sorted((a, b) for a in range(n) for b in adj[a] if a < b):
            if y not in adj[x]:
                continue
            for a, b in ((x, y), (y, x)):
                cands = sorted(adj[a] - {b})
                if len(cands) < order:
                    continue
                tested = True
                sep = next((s for s in itertools.combinations(cands, order) if is_independent(table, [x], s, [y], tol)), None)
                if sep is not None:
                    adj[x].discard(y)
                    adj[y].discard(x)
                    removals.append(Removal((x, y), tuple(sep), order))
                    break
        if not tested:
            break
        order += 1
    links = frozenset((a, b) for a in range(n) for b in adj[a] if a < b)
    return UGraph(n, links), removals


def lam_bacchus_learn(
    source: Source,
    budget_per_class: int = 1,
    m: int | None = None,
    max_links: int | None = None,
) -> tuple[Dag, SearchTrace]:
    """MDL search over graphs built from the mutual-information link list.

    Links are ranked by descending mutual information.  For each link count
    ``c`` the search draws candidates from ``c``-subsets of the list in
    lexicographic order of list position (the first is the ``c``-prefix),
    evaluating at most ``budget_per_class`` of them.  Links are oriented from
    lower to higher variable index.  The best candidate of each class by KL
    cross entropy competes across classes on description length.

    ``max_links`` caps the largest class explored, modelling a search that
    runs out of resources before reaching the tail of the list.  ``m`` is the
    case count for description lengths when ``source`` is a table.
    """
    if int(budget_per_class) != budget_per_class or budget_per_class < 1:
        raise InvalidInputError(f"budget_per_class must be >= 1, got {budget_per_class!r}")
    table = as_table(source)
    n = table.n
    if isinstance(source, Dataset):
        mdl_source, mdl_m = source, source.m if m is None else m
    else:
        mdl_source, mdl_m = table, DEFAULT_MDL_CASES if m is None else m
    weights = link_weights(table)
    links = [pair for pair, _ in weights]
    top = len(links) if max_links is None else min(len(links), max_links)
    trace = SearchTrace("lam-bacchus", link_list=weights)
    best_dag, best_dl = None, math.inf
    for size in range(top + 1):
        class_best = None  # (cross entropy, dag)
        for combo in itertools.islice(itertools.combinations(range(len(links)), size), budget_per_class):
            dag = Dag.from_arcs(n, [links[i] for i in combo])
            ce = cross_entropy(table, dag).value
            if class_best is None or ce < class_best[0]:
                class_best = (ce, dag)
        dag = class_best[1]
        dl = description_length(dag, mdl_source, mdl_m).value
        accepted = dl < best_dl - IMPROVEMENT_TOL
        trace.steps.append(SearchStep(tuple(dag.arcs()), best_dl, dl, accepted, replace=True))
        if accepted:
            best_dag, best_dl = dag, dl
    trace.final_score = description_length(best_dag, mdl_source, mdl_m)
    return best_dag, trace


LEARNERS = ("kutato", "k2", "pc", "lam-bacchus")
