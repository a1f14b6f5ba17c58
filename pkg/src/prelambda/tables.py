"""Contingency and probability tables, marginals and ordered top-t selection.

All table objects are frozen and hold read-only numpy arrays.  Marginals are
always recomputed from the cells, never taken from input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadOrder,
    NegativeCount,
    NegativeEntry,
    NonFiniteEntry,
    NotNormalized,
    TooFewCategories,
    ZeroTotal,
)

SUM_TOLERANCE = 1e-9


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_shape(a: np.ndarray) -> None:
    if a.ndim != 2:
        raise TooFewCategories(f"expected a two-way table, got array of shape {a.shape}")
    r, c = a.shape
    if r < 2 or c < 2:
        raise TooFewCategories(f"need at least 2 rows and 2 columns, got {r}x{c}")


@dataclass(frozen=True)
class ContingencyTable:
    """Observed (possibly weighted, non-integer) frequencies ``n_ij``."""

    counts: np.ndarray

    def __post_init__(self):
        counts = _frozen(self.counts)
        _check_shape(counts)
        if not np.all(np.isfinite(counts)):
            raise NonFiniteEntry("counts must be finite")
        if np.any(counts < 0):
            i, j = np.argwhere(counts < 0)[0]
            raise NegativeCount(f"negative count {counts[i, j]!r} at cell ({i + 1}, {j + 1})")
        if counts.sum() <= 0:
            raise ZeroTotal("grand total of counts is zero")
        object.__setattr__(self, "counts", counts)

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    @property
    def n(self) -> float:
        return float(self.counts.sum())


@dataclass(frozen=True)
class ProbabilityTable:
    """Cell probabilities ``p_ij`` with row marginals ``p_i+`` and column marginals ``p_+j``.

    Use :func:`validate_probability_table` (or :func:`normalize`) to build one;
    the constructor performs the same checks.
    """

    p: np.ndarray
    row_marginals: np.ndarray = field(init=False, repr=False)
    col_marginals: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = _frozen(self.p)
        _check_shape(p)
        if not np.all(np.isfinite(p)):
            raise NonFiniteEntry("probabilities must be finite")
        if np.any(p < 0):
            i, j = np.argwhere(p < 0)[0]
            raise NegativeEntry(f"negative probability {p[i, j]!r} at cell ({i + 1}, {j + 1})")
        total = p.sum()
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise NotNormalized(f"cells sum to {total!r}, not 1 (tolerance {SUM_TOLERANCE})")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "row_marginals", _frozen(p.sum(axis=1)))
        object.__setattr__(self, "col_marginals", _frozen(p.sum(axis=0)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.p.shape


@dataclass(frozen=True)
class TopKSelection:
    """Per-row and marginal top-t column selections.

    ``row_top_sets[i]`` lists the t columns with the largest ``p_ij`` in row i
    (descending, ties to the lowest column index); ``marginal_top_set`` does the
    same for the column marginals.  The ``*_rest`` fields are the complementary
    sums (mass outside the selected columns), accumulated directly so that they
    are exactly zero when nothing lies outside the selection.
    """

    t: int
    row_top_sets: tuple[tuple[int, ...], ...]
    row_top_sums: np.ndarray
    row_rest_sums: np.ndarray
    marginal_top_set: tuple[int, ...]
    marginal_top_sum: float
    marginal_rest_sum: float
    tie_flag: bool

    def row_mask(self, shape) -> np.ndarray:
        """Indicator grid of ``j in A_i``."""
        mask = np.zeros(shape, dtype=bool)
        for i, cols in enumerate(self.row_top_sets):
            mask[i, list(cols)] = True
        return mask

    def marginal_mask(self, c: int) -> np.ndarray:
        """Indicator vector of ``j in B``."""
        mask = np.zeros(c, dtype=bool)
        mask[list(self.marginal_top_set)] = True
        return mask


def normalize(table: ContingencyTable) -> ProbabilityTable:
    """Convert counts to proportions ``n_ij / n``."""
    return ProbabilityTable(table.counts / table.n)


def validate_probability_table(p) -> ProbabilityTable:
    """Check a raw grid of probabilities and attach its marginals."""
    return ProbabilityTable(p)


def _top(values: np.ndarray, t: int):
    order = np.argsort(-values, kind="stable")
    top = order[:t]
    rest = order[t:]
    tie = bool(values[order[t - 1]] == values[order[t]])
    return tuple(int(j) for j in top), float(values[top].sum()), float(values[rest].sum()), tie


def select_top_k(table: ProbabilityTable, t: int) -> TopKSelection:
    """Select the t largest cells of every row and the t largest column marginals.

    Ties are broken toward the lowest column index.  ``tie_flag`` is set when
    the t-th and (t+1)-th values of any sorted row, or of the sorted marginals,
    coincide.
    """
    r, c = table.shape
    if int(t) != t or t < 1 or t >= c:
        raise BadOrder(f"order t must satisfy 1 <= t < {c}, got {t}")
    t = int(t)
    tie = False
    sets, sums, rests = [], [], []
    for row in table.p:
        cols, s, rest, row_tie = _top(row, t)
        sets.append(cols)
        sums.append(s)
        rests.append(rest)
        tie |= row_tie
    marg_set, marg_sum, marg_rest, marg_tie = _top(table.col_marginals, t)
    return TopKSelection(
        t=t,
        row_top_sets=tuple(sets),
        row_top_sums=_frozen(sums),
        row_rest_sums=_frozen(rests),
        marginal_top_set=marg_set,
        marginal_top_sum=marg_sum,
        marginal_rest_sum=marg_rest,
        tie_flag=tie or marg_tie,
    )


def transpose(table: ProbabilityTable) -> ProbabilityTable:
    """Swap the roles of rows and columns."""
    return ProbabilityTable(table.p.T)


def build_independent(row_marginals, col_marginals) -> ProbabilityTable:
    """Product table ``p_ij = p_i+ * p_+j``."""
    rows = np.asarray(row_marginals, dtype=float)
    cols = np.asarray(col_marginals, dtype=float)
    for name, v in (("row", rows), ("column", cols)):
        if v.ndim != 1:
            raise TooFewCategories(f"{name} marginals must be a vector")
        if np.any(v < 0):
            raise NegativeEntry(f"{name} marginals must be non-negative")
        if abs(v.sum() - 1.0) > SUM_TOLERANCE:
            raise NotNormalized(f"{name} marginals sum to {v.sum()!r}, not 1")
    return ProbabilityTable(np.outer(rows, cols))
