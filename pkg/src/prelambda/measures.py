"""Proportional-reduction-in-error association measures.

Two families are provided for an order ``t`` (``1 <= t < c``):

* ``plain``: the multi-category extension of Goodman and Kruskal's lambda,
  ``(sum_i s_i - S_B) / (1 - S_B)``.
* ``k``: the root-mean-square variant,
  ``(sqrt(sum_i s_i**2 / p_i+) - S_B) / (1 - S_B)``.

Here ``s_i`` is the sum of the t largest cells of row i and ``S_B`` the sum of
the t largest column marginals.  At ``t = 1`` these reduce to the classic
lambda and its RMS alternative.

Both error probabilities are computed from complementary sums (mass outside
the selected cells) rather than as ``1 - x``; this keeps perfect prediction
exactly at 1 and the ordering ``k >= plain`` free of cancellation noise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMarginal
from .tables import ProbabilityTable, TopKSelection, select_top_k, transpose

# Float residue below this is snapped onto the [0, 1] boundary.  Near zero
# both signs are snapped: a true 0 can come out as +-1e-16 by cancellation.
_SNAP = 1e-12


class Family(str, enum.Enum):
    PLAIN = "plain"
    K = "k"


class Direction(str, enum.Enum):
    Y_GIVEN_X = "y-given-x"
    X_GIVEN_Y = "x-given-y"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class MeasureResult:
    """A measure value with the two error probabilities it is built from.

    ``value == (error_case1 - error_case2) / error_case1``.  When
    ``degenerate`` is set the measure is undefined (no error without the
    predictor) and ``value`` is NaN.
    """

    value: float
    family: Family
    direction: Direction
    t: int
    error_case1: float
    error_case2: float
    tie_flag: bool = False
    degenerate: bool = False


@dataclass(frozen=True)
class SymmetricWeights:
    w_y: float
    w_x: float


def _snap(v: float) -> float:
    if -_SNAP < v < _SNAP:
        return 0.0
    if 1.0 < v < 1.0 + _SNAP:
        return 1.0
    return v


def oriented(table: ProbabilityTable, direction) -> ProbabilityTable:
    """Table with the explanatory variable on the rows."""
    direction = Direction(direction)
    if direction is Direction.Y_GIVEN_X:
        return table
    if direction is Direction.X_GIVEN_Y:
        return transpose(table)
    raise ValueError("symmetric direction has no single orientation; use symmetric_lambda")


def rms_term(table: ProbabilityTable, sel: TopKSelection) -> tuple[float, np.ndarray]:
    """Return ``a = sqrt(sum_i s_i**2 / p_i+)`` and the row ratios ``b_i = s_i / p_i+``.

    Rows with ``p_i+ = 0`` get ``b_i = 0``.
    """
    rows = table.row_marginals
    b = np.divide(sel.row_top_sums, rows, out=np.zeros_like(rows), where=rows > 0)
    return math.sqrt(float(np.sum(b * sel.row_top_sums))), b


def _plain_errors(sel: TopKSelection) -> tuple[float, float]:
    return sel.marginal_rest_sum, float(np.sum(sel.row_rest_sums))


def _k_errors(table: ProbabilityTable, sel: TopKSelection) -> tuple[float, float]:
    # 1 - a = (1 - a^2) / (1 + a), and 1 - a^2 = sum_i rest_i * (1 + b_i)
    a, b = rms_term(table, sel)
    return sel.marginal_rest_sum, float(np.sum(sel.row_rest_sums * (1.0 + b))) / (1.0 + a)


def _settle(e1: float, e2: float) -> float:
    # e2 can exceed e1 only through rounding when the measure is 0
    if e1 < e2 <= e1 * (1.0 + _SNAP):
        return e1
    return e2


def _result(e1, e2, family, direction, t, sel) -> MeasureResult:
    if e1 <= 0.0:
        raise DegenerateMarginal(
            f"top-{t} column marginals sum to 1; the measure is undefined"
        )
    e2 = _settle(e1, e2)
    return MeasureResult(
        value=_snap((e1 - e2) / e1),
        family=Family(family),
        direction=Direction(direction),
        t=t,
        error_case1=e1,
        error_case2=e2,
        tie_flag=sel.tie_flag,
    )


def lambda_t(table: ProbabilityTable, t: int, direction=Direction.Y_GIVEN_X) -> MeasureResult:
    """Multi-category Goodman-Kruskal lambda of order t."""
    table = oriented(table, direction)
    sel = select_top_k(table, t)
    e1, e2 = _plain_errors(sel)
    return _result(e1, e2, Family.PLAIN, direction, sel.t, sel)


def lambda_k_t(table: ProbabilityTable, t: int, direction=Direction.Y_GIVEN_X) -> MeasureResult:
    """Multi-category RMS (Kvalseth-type) lambda of order t."""
    table = oriented(table, direction)
    sel = select_top_k(table, t)
    e1, e2 = _k_errors(table, sel)
    return _result(e1, e2, Family.K, direction, sel.t, sel)


def measure(table: ProbabilityTable, family, t: int, direction=Direction.Y_GIVEN_X) -> MeasureResult:
    if Family(family) is Family.PLAIN:
        return lambda_t(table, t, direction)
    return lambda_k_t(table, t, direction)


def _symmetric_parts(table: ProbabilityTable):
    yx = select_top_k(table, 1)
    xy = select_top_k(transpose(table), 1)
    e1_y, e2_y = _plain_errors(yx)
    e1_x, e2_x = _plain_errors(xy)
    return e1_y, e2_y, e1_x, e2_x, yx.tie_flag or xy.tie_flag


def symmetric_weights(table: ProbabilityTable) -> SymmetricWeights:
    """Weights such that ``lambda = w_y * lambda_{Y|X} + w_x * lambda_{X|Y}``."""
    e1_y, _, e1_x, _, _ = _symmetric_parts(table)
    denom = e1_y + e1_x
    if denom <= 0.0:
        raise DegenerateMarginal("both modal marginals equal 1; symmetric lambda undefined")
    return SymmetricWeights(w_y=e1_y / denom, w_x=e1_x / denom)


def symmetric_lambda(table: ProbabilityTable) -> MeasureResult:
    """Goodman and Kruskal's symmetric lambda (order 1 only)."""
    e1_y, e2_y, e1_x, e2_x, tie = _symmetric_parts(table)
    e1 = e1_y + e1_x
    e2 = e2_y + e2_x
    if e1 <= 0.0:
        raise DegenerateMarginal("both modal marginals equal 1; symmetric lambda undefined")
    e2 = _settle(e1, e2)
    return MeasureResult(
        value=_snap((e1 - e2) / e1),
        family=Family.PLAIN,
        direction=Direction.SYMMETRIC,
        t=1,
        error_case1=e1,
        error_case2=e2,
        tie_flag=tie,
    )


def measure_profile(table: ProbabilityTable, direction=Direction.Y_GIVEN_X) -> list[MeasureResult]:
    """Both families at every order ``t = 1 .. c-1``, ordered by t (plain before k).

    Orders where the measure is undefined are returned flagged ``degenerate``
    with a NaN value instead of aborting the profile.
    """
    oriented_table = oriented(table, direction)
    c = oriented_table.shape[1]
    out = []
    for t in range(1, c):
        for fam in (Family.PLAIN, Family.K):
            try:
                out.append(measure(table, fam, t, direction))
            except DegenerateMarginal:
                sel = select_top_k(oriented_table, t)
                out.append(
                    MeasureResult(
                        value=math.nan,
                        family=fam,
                        direction=Direction(direction),
                        t=t,
                        error_case1=0.0,
                        error_case2=math.nan,
                        tie_flag=sel.tie_flag,
                        degenerate=True,
                    )
                )
    return out


__all__ = [
    "Direction",
    "Family",
    "MeasureResult",
    "SymmetricWeights",
    "lambda_k_t",
    "lambda_t",
    "measure",
    "measure_profile",
    "oriented",
    "rms_term",
    "symmetric_lambda",
    "symmetric_weights",
]
