"""Delta-method standard errors and Wald intervals for the measures.

With multinomial counts, ``sqrt(n) * (estimate - lambda)`` is asymptotically
normal with variance ``sum p_ij D_ij**2 - (sum p_ij D_ij)**2`` where ``D`` is
the gradient of the measure with respect to the cell probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadAlpha, DegenerateMarginal, DegenerateRMS
from .measures import Direction, Family, measure, oriented, rms_term
from .normal import make_rng, normal_quantile
from .tables import ContingencyTable, ProbabilityTable, TopKSelection, normalize, select_top_k

# Below this the standard deviation is treated as exactly zero.
DEGENERATE_SIGMA = 1e-12


@dataclass(frozen=True)
class GradientGrid:
    """Partial derivatives of a measure with respect to each ``p_ij``.

    ``a`` and ``b`` are only set for the k family.
    """

    delta: np.ndarray
    family: Family
    t: int
    a: float | None = None
    b: np.ndarray | None = None


@dataclass(frozen=True)
class InferenceResult:
    estimate: float
    sigma2: float
    std_error: float
    ci_low: float | None
    ci_high: float | None
    alpha: float
    degenerate: bool
    tie_warning: bool
    family: Family = Family.PLAIN
    direction: Direction = Direction.Y_GIVEN_X
    t: int = 1
    n: float = math.nan


def _masks(table: ProbabilityTable, sel: TopKSelection):
    in_a = sel.row_mask(table.shape).astype(float)
    in_b = sel.marginal_mask(table.shape[1]).astype(float)[None, :]
    e1 = sel.marginal_rest_sum
    if e1 <= 0.0:
        raise DegenerateMarginal(f"top-{sel.t} column marginals sum to 1; no gradient")
    return in_a, in_b, e1


def gradient_plain(table: ProbabilityTable, sel: TopKSelection) -> GradientGrid:
    """``D_ij = (1{j in A_i} - (1 - lambda) 1{j in B}) / (1 - S_B)``."""
    in_a, in_b, e1 = _masks(table, sel)
    lam = measure(table, Family.PLAIN, sel.t).value
    delta = (in_a - (1.0 - lam) * in_b) / e1
    return GradientGrid(delta=delta, family=Family.PLAIN, t=sel.t)


def gradient_k(table: ProbabilityTable, sel: TopKSelection) -> GradientGrid:
    """``D_ij = ((b_i / a)(1{j in A_i} - b_i / 2) - (1 - lambda_K) 1{j in B}) / (1 - S_B)``."""
    in_a, in_b, e1 = _masks(table, sel)
    a, b = rms_term(table, sel)
    if a <= 0.0:
        raise DegenerateRMS("RMS term is zero; gradient undefined")
    lam = measure(table, Family.K, sel.t).value
    bc = b[:, None]
    delta = ((bc / a) * (in_a - bc / 2.0) - (1.0 - lam) * in_b) / e1
    return GradientGrid(delta=delta, family=Family.K, t=sel.t, a=a, b=b)


def gradient(table: ProbabilityTable, family, t: int) -> GradientGrid:
    sel = select_top_k(table, t)
    if Family(family) is Family.PLAIN:
        return gradient_plain(table, sel)
    return gradient_k(table, sel)


def asymptotic_variance(table: ProbabilityTable, grad: GradientGrid) -> float:
    """Variance of the gradient grid under the cell distribution ``p``.

    Equal to ``sum p D**2 - (sum p D)**2``; evaluated in centered form so a
    constant gradient of large magnitude cannot cancel to a negative value.
    """
    p = table.p / table.p.sum()
    d = grad.delta
    mean = float(np.sum(p * d))
    var = float(np.sum(p * (d - mean) ** 2))
    if -1e-12 <= var < 0.0:
        var = 0.0
    return var


def z_quantile(alpha: float) -> float:
    """Upper ``alpha / 2`` point of the standard normal."""
    if not 0.0 < alpha < 1.0:
        raise BadAlpha(f"alpha must lie in (0, 1), got {alpha!r}")
    return normal_quantile(1.0 - alpha / 2.0)


def _infer(table: ProbabilityTable, n: float, family, t, direction, alpha) -> InferenceResult:
    z = z_quantile(alpha)
    family = Family(family)
    work = oriented(table, direction)
    sel = select_top_k(work, t)
    grad = gradient_plain(work, sel) if family is Family.PLAIN else gradient_k(work, sel)
    estimate = measure(work, family, t).value
    sigma2 = asymptotic_variance(work, grad)
    sigma = math.sqrt(sigma2)
    degenerate = sigma < DEGENERATE_SIGMA
    se = sigma / math.sqrt(n)
    lo = hi = None
    if not degenerate:
        lo, hi = estimate - z * se, estimate + z * se
    return InferenceResult(
        estimate=estimate,
        sigma2=sigma2,
        std_error=se,
        ci_low=lo,
        ci_high=hi,
        alpha=alpha,
        degenerate=degenerate,
        tie_warning=sel.tie_flag,
        family=family,
        direction=Direction(direction),
        t=sel.t,
        n=n,
    )


def confidence_interval(
    table: ContingencyTable,
    family=Family.PLAIN,
    t: int = 1,
    direction=Direction.Y_GIVEN_X,
    alpha: float = 0.05,
) -> InferenceResult:
    """Plug-in estimate, delta-method standard error and Wald interval.

    Bounds are not clipped to [0, 1].  When the estimated standard deviation
    is zero the result is flagged ``degenerate`` and no interval is reported.
    """
    z_quantile(alpha)
    return _infer(normalize(table), table.n, family, t, direction, alpha)


@dataclass(frozen=True)
class MonteCarloSummary:
    family: Family
    t: int
    n: int
    replications: int
    true_value: float
    predicted_variance: float
    empirical_mean: float
    empirical_variance: float
    coverage: float
    skipped: int
    seed: int | None
    rng_algorithm: str = "numpy.random.PCG64"

    @property
    def variance_ratio(self) -> float:
        return self.empirical_variance / self.predicted_variance


def monte_carlo(
    table: ProbabilityTable,
    family,
    t: int,
    n: int,
    replications: int,
    seed=None,
    alpha: float = 0.05,
) -> MonteCarloSummary:
    """Sample multinomial tables from ``table`` and compare against delta-method predictions.

    Replicates where the measure or interval is undefined are skipped and
    counted.  Coverage is the share of intervals containing the true value;
    degenerate intervals count as misses.
    """
    family = Family(family)
    rng = make_rng(seed)
    truth = measure(table, family, t).value
    predicted = asymptotic_variance(table, gradient(table, family, t)) / n
    draws = rng.multinomial(n, table.p.ravel() / table.p.sum(), size=replications)
    estimates = []
    covered = 0
    skipped = 0
    for counts in draws:
        try:
            res = confidence_interval(
                ContingencyTable(counts.reshape(table.shape).astype(float)), family, t, alpha=alpha
            )
        except (DegenerateMarginal, DegenerateRMS):
            skipped += 1
            continue
        estimates.append(res.estimate)
        if not res.degenerate and res.ci_low <= truth <= res.ci_high:
            covered += 1
    est = np.asarray(estimates)
    used = len(est)
    return MonteCarloSummary(
        family=family,
        t=t,
        n=n,
        replications=replications,
        true_value=truth,
        predicted_variance=predicted,
        empirical_mean=float(est.mean()),
        empirical_variance=float(est.var(ddof=1)),
        coverage=covered / used,
        skipped=skipped,
        seed=seed if not isinstance(seed, np.random.Generator) else None,
    )
