"""Ratio analysis of the K2 score for a binary node and one independent parent.

Counts follow the notation of a 2x2 contingency table over (X, Y):

    w = #(X=0)        v = #(Y=0)
    u = #(X=0, Y=0)   z = #(X=0, Y=1)

The ratio ``r = g(X, {}) / g(X, {Y})`` exceeds 1 exactly when K2 rejects Y
as a parent.  ``ratio_r_prime`` is a Stirling-type lower bound on ``r`` and
``min_r_prime`` its closed-form minimum over the admissible (w, v) region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .data import Dataset
from .errors import InvalidArgumentError, InvalidCellError
from .jpd import binary_vars

#: Largest m accepted by exhaustive_min_r unless a larger cap is passed.
DEFAULT_M_CAP = 64


@dataclass(frozen=True, order=True)
class K2Cell:
    m: int
    w: int
    v: int
    u: int
    z: int

    def __post_init__(self):
        for name in ("m", "w", "v", "u", "z"):
            val = getattr(self, name)
            if int(val) != val or val < 0:
                raise InvalidCellError(f"{name} must be a non-negative integer, got {val!r}")
        if self.w > self.m or self.v > self.m or self.u > self.v or self.z > self.m - self.v:
            raise InvalidCellError(f"counts of {self} do not fit a 2x2 table")
        if self.u + self.z != self.w:
            raise InvalidCellError(f"u + z must equal w in {self}")

    @property
    def counts(self) -> tuple[int, int, int, int]:
        """(#X=0,Y=0; #X=1,Y=0; #X=0,Y=1; #X=1,Y=1)."""
        return self.u, self.v - self.u, self.z, self.m - self.v - self.z

    def in_range(self) -> bool:
        """Whether the cell lies in the normalized, strictly positive region."""
        m = self.m
        return (
            m >= 4
            and 2 <= self.w <= m // 2
            and 2 <= self.v <= m // 2
            and 1 <= self.u <= self.v // 2
            and 1 <= self.z <= (m - self.v) // 2
        )

    def is_independent(self) -> bool:
        """w/(m-w) = u/(v-u) = z/(m-v-z), checked by cross-multiplication."""
        m, w, v, u, z = self.m, self.w, self.v, self.u, self.z
        return w * (v - u) == u * (m - w) and w * (m - v - z) == z * (m - w)

    def to_dataset(self) -> Dataset:
        """Two-variable dataset (Y, X) realizing the cell's counts."""
        u, v_u, z, rest = self.counts
        # flat order (Y, X): (0,0) (0,1) (1,0) (1,1)
        return Dataset(binary_vars(2, prefix="V"), [u, v_u, z, rest])


def g_phi(m: int, w: int) -> Fraction:
    """g(X, {}) = w! (m-w)! / (m+1)!."""
    if not 0 <= w <= m:
        raise InvalidArgumentError(f"need 0 <= w <= m, got w={w}, m={m}")
    return Fraction(math.factorial(w) * math.factorial(m - w), math.factorial(m + 1))


def g_y(cell: K2Cell) -> Fraction:
    """g(X, {Y}) = u! (v-u)! z! (m-v-z)! / ((v+1)! (m-v+1)!)."""
    num = math.prod(math.factorial(c) for c in cell.counts)
    return Fraction(num, math.factorial(cell.v + 1) * math.factorial(cell.m - cell.v + 1))


def ratio_exact(cell: K2Cell) -> Fraction:
    if not cell.is_independent():
        raise InvalidCellError(f"{cell} does not satisfy the independence relation")
    return g_phi(cell.m, cell.w) / g_y(cell)


def ratio_r(cell: K2Cell) -> float:
    return float(ratio_exact(cell))


def log_ratio_r(cell: K2Cell) -> float:
    """ln r from log-gamma evaluations; an independent route to ratio_r."""
    if not cell.is_independent():
        raise InvalidCellError(f"{cell} does not satisfy the independence relation")
    lf = lambda n: math.lgamma(n + 1)  # noqa: E731
    m, w, v = cell.m, cell.w, cell.v
    log_phi = lf(w) + lf(m - w) - lf(m + 1)
    log_y = sum(lf(c) for c in cell.counts) - lf(v + 1) - lf(m - v + 1)
    return log_phi - log_y


def _check_region(m: float, w: float, v: float) -> None:
    if not (m >= 4 and 2 <= w <= m / 2 and 2 <= v <= m / 2):
        raise InvalidArgumentError(f"need m >= 4, 2 <= w <= m/2, 2 <= v <= m/2; got m={m}, w={w}, v={v}")


def ratio_r_prime(m: float, w: float, v: float) -> float:
    """Lower bound on r obtained by bounding every factorial with Stirling's
    formula (numerator from below, denominator from above)."""
    _check_region(m, w, v)
    lead = (
        math.sqrt((v + 1) * (m - v + 1)) * m**1.5
        / (math.sqrt(2 * math.pi) * math.sqrt(w * (m - w)) * (m + 1))
    )
    corr = (
        (1 - 1 / (12 * m))
        * (1 - m / (12 * v * w))
        * (1 - m / (12 * v * (m - w)))
        * (1 - m / (12 * (m - v) * w))
        * (1 - m / (12 * (m - v) * (m - w)))
    )
    return lead * corr


def h_factors(m: float, w: float, v: float) -> tuple[float, float, float]:
    """The three factors whose product is :func:`h_of_v`."""
    _check_region(m, w, v)
    h1 = math.sqrt((v + 1) * (m - v + 1))
    h2 = (12 * v * w - m) / v * (12 * (m - v) * w - m) / (m - v)
    h3 = (12 * v * (m - w) - m) / v * (12 * (m - v) * (m - w) - m) / (m - v)
    return h1, h2, h3


def h_of_v(m: float, w: float, v: float) -> float:
    """The v-dependent part of ratio_r_prime for fixed (m, w)."""
    h1, h2, h3 = h_factors(m, w, v)
    return h1 * h2 * h3


def min_r_prime(m: float) -> float:
    """ratio_r_prime at v = 2, w = m/2, in closed form."""
    if m < 4:
        raise InvalidArgumentError(f"need m >= 4, got {m}")
    return (
        121 / (24 * (m + 1))
        * math.sqrt(m * (m - 1) / (6 * math.pi))
        * (1 - 1 / (12 * m))
        * (1 - 1 / (6 * (m - 2))) ** 2
    )


@dataclass(frozen=True)
class RatioReport:
    m: int
    min_r: float | None
    argmin: K2Cell | None
    min_r_prime: float
    cells_examined: int

    def to_row(self) -> dict:
        a = self.argmin
        return {
            "m": self.m,
            "min_r": "" if self.min_r is None else repr(self.min_r),
            "argmin": "" if a is None else f"({a.w},{a.v},{a.u},{a.z})",
            "min_r_prime": repr(self.min_r_prime),
            "cells_examined": self.cells_examined,
        }


def independent_cells(m: int) -> list[K2Cell]:
    """Every in-range integer cell for ``m`` satisfying independence.

    w and v run over [2, m // 2]; u = v w / m and z = (m - v) w / m must come
    out integral.
    """
    cells = []
    for w in range(2, m // 2 + 1):
        for v in range(2, m // 2 + 1):
            if (v * w) % m or ((m - v) * w) % m:
                continue
            cell = K2Cell(m, w, v, v * w // m, (m - v) * w // m)
            if cell.in_range() and cell.is_independent():
                cells.append(cell)
    return cells


def exhaustive_min_r(m: int, cap: int = DEFAULT_M_CAP) -> RatioReport:
    if int(m) != m or not 4 <= m <= cap:
        raise InvalidArgumentError(f"m must be an integer in [4, {cap}], got {m!r}")
    cells = independent_cells(m)
    best: tuple[Fraction, K2Cell] | None = None
    for cell in cells:
        r = ratio_exact(cell)
        if best is None or r < best[0] or (r == best[0] and cell < best[1]):
            best = (r, cell)
    if best is None:
        return RatioReport(m, None, None, min_r_prime(m), 0)
    return RatioReport(m, float(best[0]), best[1], min_r_prime(m), len(cells))
