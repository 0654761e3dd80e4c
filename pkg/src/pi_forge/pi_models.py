"""Pseudo-independent (PI) models: constructor, reference tables, classifier.

A full PI model over ``eta`` binary variables has every ``eta - 1`` subset
fully independent (S1) while no pair is independent given all the remaining
variables (S2).  The constructor assigns probabilities by Hamming-weight
group, alternating ``0.5**(eta-1) * q`` and ``0.5**(eta-1) * (1 - q)``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import InvalidQueryError, InvalidSpecError, NotFoundError
from .jpd import (
    DEFAULT_TOL,
    JointTable,
    binary_vars,
    configurations,
    is_independent,
    marginal_array,
    marginalize,
    product_of_marginals,
)

Number = Union[float, int, str, Fraction]


def to_fraction(x: Number) -> Fraction:
    """Exact rational for a decimal literal (``0.1`` -> ``1/10``)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class PiSpec:
    eta: int
    q: float = 1.0

    def __post_init__(self):
        if int(self.eta) != self.eta or self.eta < 3:
            raise InvalidSpecError(f"eta must be an integer >= 3, got {self.eta!r}")
        q = to_fraction(self.q)
        if not 0 <= q <= 1:
            raise InvalidSpecError(f"q must lie in [0, 1], got {self.q!r}")
        if q == Fraction(1, 2):
            raise InvalidSpecError("q = 0.5 collapses the construction to full independence")


class Verdict(str, enum.Enum):
    FULL_PI = "FullPI"
    PARTIAL_PI = "PartialPI"
    NON_PI_INDEPENDENT = "NonPI-Independent"
    NON_PI_OTHER = "NonPI-Other"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PiClassification:
    verdict: Verdict
    s1_holds: bool
    s2_holds: bool
    independent_pairs: tuple[tuple[int, int], ...]

    def to_dict(self, names: Sequence[str] | None = None) -> dict:
        pairs = [list(p) for p in self.independent_pairs]
        out = {
            "verdict": self.verdict.value,
            "s1_holds": self.s1_holds,
            "s2_holds": self.s2_holds,
            "independent_pairs": pairs,
        }
        if names is not None:
            out["independent_pair_names"] = [[names[i], names[j]] for i, j in self.independent_pairs]
        return out


def full_pi_exact(spec: PiSpec) -> list[Fraction]:
    """Exact flat probabilities of the full PI model (last variable fastest)."""
    eta = spec.eta
    q = to_fraction(spec.q)
    base = Fraction(1, 2 ** (eta - 1))
    even, odd = base * q, base * (1 - q)
    return [even if sum(c) % 2 == 0 else odd for c in configurations((2,) * eta)]


def construct_full_pi(spec: PiSpec) -> JointTable:
    return JointTable(binary_vars(spec.eta), [float(p) for p in full_pi_exact(spec)])


# Flat, last-variable-fastest transcriptions of the four reference tables.
_FIXTURES: dict[str, tuple[int, tuple[str, ...]]] = {
    "table1": (4, (
        "0.125", "0", "0", "0.125", "0", "0.125", "0.125", "0",
        "0", "0.125", "0.125", "0", "0.125", "0", "0", "0.125",
    )),
    "table2": (3, ("0.024", "0.216", "0.096", "0.264", "0.056", "0.104", "0.024", "0.216")),
    "table3": (3, ("0.225", "0.025", "0.025", "0.225", "0.20", "0.05", "0.05", "0.20")),
    "table4": (4, (
        "0.0225", "0.2025", "0.005", "0.02", "0.0175", "0.0075", "0.135", "0.09",
        "0.02", "0.18", "0.01", "0.04", "0.035", "0.015", "0.12", "0.08",
    )),
}

FIXTURE_NAMES = tuple(_FIXTURES)


def fixture_exact(name: str) -> list[Fraction]:
    try:
        _, cells = _FIXTURES[name]
    except KeyError:
        raise NotFoundError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}") from None
    return [Fraction(c) for c in cells]


def fixture(name: str) -> JointTable:
    probs = fixture_exact(name)
    n, _ = _FIXTURES[name]
    return JointTable(binary_vars(n), [float(p) for p in probs])


def marginalize_exact(probs: Sequence[Fraction], shape: Sequence[int], keep: Sequence[int]) -> dict[tuple[int, ...], Fraction]:
    """Exact marginal of a flat rational table, keyed by sub-configuration."""
    keep = sorted(keep)
    out: dict[tuple[int, ...], Fraction] = {}
    for config, p in zip(configurations(shape), probs):
        key = tuple(config[i] for i in keep)
        out[key] = out.get(key, Fraction(0)) + p
    return out


def _factorizes(table: JointTable, keep: Sequence[int], tol: float) -> bool:
    joint = marginal_array(table, keep)
    prod = np.ones(())
    for i in keep:
        prod = np.multiply.outer(prod, marginal_array(table, [i]))
    return bool(np.abs(joint - prod).max() <= tol)


def check_s1(table: JointTable, tol: float = DEFAULT_TOL) -> bool:
    """Every marginal over all-but-one variable is a product of singletons."""
    n = table.n
    return all(_factorizes(table, [i for i in range(n) if i != y], tol) for y in range(n))


def check_s2(table: JointTable, tol: float = DEFAULT_TOL) -> bool:
    """No pair is independent given all the other variables."""
    n = table.n
    for x, y in itertools.combinations(range(n), 2):
        rest = [i for i in range(n) if i not in (x, y)]
        if is_independent(table, [x], rest, [y], tol):
            return False
    return True


def independent_pairs(table: JointTable, tol: float = DEFAULT_TOL) -> tuple[tuple[int, int], ...]:
    return tuple(
        (x, y) for x, y in itertools.combinations(range(table.n), 2) if is_independent(table, [x], [], [y], tol)
    )


def classify(table: JointTable, tol: float = DEFAULT_TOL) -> PiClassification:
    if table.n < 3:
        raise InvalidQueryError("PI classification needs at least three variables")
    s1 = check_s1(table, tol)
    s2 = check_s2(table, tol)
    pairs = independent_pairs(table, tol)
    if table.allclose(product_of_marginals(table), atol=tol):
        verdict = Verdict.NON_PI_INDEPENDENT
    elif s1 and s2:
        verdict = Verdict.FULL_PI
    elif s2 and pairs:
        verdict = Verdict.PARTIAL_PI
    else:
        verdict = Verdict.NON_PI_OTHER
    return PiClassification(verdict, s1, s2, pairs)


def find_embedded_pi(table: JointTable, max_subset: int = 5, tol: float = DEFAULT_TOL) -> list[tuple[tuple[int, ...], PiClassification]]:
    """Classify the marginal of every subset of 3..max_subset variables.

    Returns the subsets (as ascending variable indices) whose marginal is a
    full or partial PI model.  Pair indices inside each classification refer
    to positions within the subset.
    """
    if not 3 <= max_subset <= table.n:
        raise InvalidQueryError(f"max_subset must lie in [3, {table.n}], got {max_subset}")
    found = []
    for size in range(3, max_subset + 1):
        for subset in itertools.combinations(range(table.n), size):
            result = classify(marginalize(table, subset), tol)
            if result.verdict in (Verdict.FULL_PI, Verdict.PARTIAL_PI):
                found.append((subset, result))
    return found


def parity_swap(eta: int) -> np.ndarray:
    """Boolean mask of odd-weight configurations, in flat order."""
    return np.array([sum(c) % 2 == 1 for c in configurations((2,) * eta)])


def expected_s1_mass(eta: int) -> Fraction:
    return Fraction(1, 2 ** (eta - 1))


def subset_marginals_exact(spec: PiSpec) -> list[dict[tuple[int, ...], Fraction]]:
    """Exact marginals over each of the ``eta`` subsets of size ``eta - 1``."""
    probs = full_pi_exact(spec)
    shape = (2,) * spec.eta
    return [
        marginalize_exact(probs, shape, [i for i in range(spec.eta) if i != y])
        for y in range(spec.eta)
    ]

