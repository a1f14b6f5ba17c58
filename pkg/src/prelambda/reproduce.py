"""Published reference tables and the golden checks run by ``prelambda verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .inference import confidence_interval
from .measures import lambda_k_t, lambda_t
from .normal import NormalGridSpec, build_normal_table, bvn_rectangle, normal_quantile
from .tables import ContingencyTable, ProbabilityTable, normalize, select_top_k

# 3x3 probability tables: independent, modal column shared, quasi-independent first column.
TABLE_1 = {
    "a": [[0.30, 0.15, 0.05], [0.18, 0.09, 0.03], [0.12, 0.06, 0.02]],
    "b": [[0.30, 0.18, 0.02], [0.20, 0.10, 0.00], [0.10, 0.02, 0.08]],
    "c": [[0.30, 0.18, 0.02], [0.18, 0.10, 0.02], [0.12, 0.02, 0.06]],
}

# (lambda^(1), lambda^K(1), lambda^(2), lambda^K(2)) at three decimals.
TABLE_2 = {
    "a": (0.0, 0.0, 0.0, 0.0),
    "b": (0.0, 0.007, 0.6, 0.606),
    "c": (0.0, 0.0, 0.4, 0.403),
}

# 4x4 equal-probability bivariate normal tables at four decimals.
TABLE_3 = {
    0.0: [[0.0625] * 4] * 4,
    0.4: [
        [0.1072, 0.0692, 0.0477, 0.0258],
        [0.0692, 0.0698, 0.0632, 0.0477],
        [0.0477, 0.0632, 0.0698, 0.0692],
        [0.0258, 0.0477, 0.0692, 0.1072],
    ],
    1.0: [
        [0.25, 0.0, 0.0, 0.0],
        [0.0, 0.25, 0.0, 0.0],
        [0.0, 0.0, 0.25, 0.0],
        [0.0, 0.0, 0.0, 0.25],
    ],
}

# Alcohol consumption (rows) by cannabis use (columns), university survey.
TABLE_4_ROWS = ("At most once/month", "Twice/month", "Twice/week", "More often")
TABLE_4_COLS = ("Never", "Once or twice", "More often")
TABLE_4 = [[204, 6, 1], [211, 13, 5], [357, 44, 38], [92, 34, 49]]

# (family, t) -> (estimate, se, ci) with ci None where no interval is printed.
TABLE_5 = {
    ("plain", 1): (0.0, 0.0, None),
    ("k", 1): (0.070, 0.012, (0.047, 0.094)),
    ("plain", 2): (0.161, 0.090, (-0.015, 0.337)),
    ("k", 2): (0.186, 0.083, (0.024, 0.348)),
}


def table_1(name: str) -> ProbabilityTable:
    return ProbabilityTable(TABLE_1[name])


def table_4() -> ContingencyTable:
    return ContingencyTable(TABLE_4)


@dataclass
class Check:
    name: str
    observe: Callable[[], float]
    expected: float
    tol: float


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    observed: float
    expected: float
    tol: float
    passed: bool
    error: str | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.error:
            return f"{status} {self.name}: error {self.error}"
        return f"{status} {self.name}: observed {self.observed:.6f} expected {self.expected} (tol {self.tol:g})"


def run_checks(checks) -> list[CheckOutcome]:
    out = []
    for chk in checks:
        try:
            obs = float(chk.observe())
        except Exception as exc:  # reported, not raised
            out.append(CheckOutcome(chk.name, math.nan, chk.expected, chk.tol, False, f"{type(exc).__name__}: {exc}"))
            continue
        ok = bool(abs(obs - chk.expected) <= chk.tol)
        out.append(CheckOutcome(chk.name, obs, chk.expected, chk.tol, ok))
    return out


def _table_2_checks():
    labels = ("lambda(1)", "lambdaK(1)", "lambda(2)", "lambdaK(2)")
    for name, expected in TABLE_2.items():
        fns = (
            lambda n=name: lambda_t(table_1(n), 1).value,
            lambda n=name: lambda_k_t(table_1(n), 1).value,
            lambda n=name: lambda_t(table_1(n), 2).value,
            lambda n=name: lambda_k_t(table_1(n), 2).value,
        )
        for label, fn, exp in zip(labels, fns, expected):
            yield Check(f"table2 ({name}) {label}", fn, exp, 5e-4)


def _table_3_checks():
    for rho, grid in TABLE_3.items():
        for i, row in enumerate(grid):
            for j, exp in enumerate(row):
                fn = lambda rho=rho, i=i, j=j: build_normal_table(NormalGridSpec(4, rho)).p[i, j]
                yield Check(f"table3 rho={rho} cell({i + 1},{j + 1})", fn, exp, 5e-5)


def _table_5_checks():
    for (fam, t), (est, se, ci) in TABLE_5.items():
        label = f"{'lambda' if fam == 'plain' else 'lambdaK'}({t})"

        def res(fam=fam, t=t):
            return confidence_interval(table_4(), fam, t, alpha=0.05)

        yield Check(f"table5 {label} estimate", lambda res=res: res().estimate, est, 1e-3)
        yield Check(f"table5 {label} se", lambda res=res: res().std_error, se, 1e-3)
        if ci is None:
            yield Check(f"table5 {label} interval suppressed", lambda res=res: float(res().degenerate), 1.0, 0.0)
        else:
            yield Check(f"table5 {label} ci low", lambda res=res: res().ci_low, ci[0], 1e-3)
            yield Check(f"table5 {label} ci high", lambda res=res: res().ci_high, ci[1], 1e-3)


def _misc_checks():
    yield Check("table4 p11 = 204/1054", lambda: normalize(table_4()).p[0, 0], 0.19355, 5e-6)
    yield Check("table4 n", lambda: table_4().n, 1054.0, 0.0)
    for j, exp in enumerate((0.60, 0.30, 0.10)):
        yield Check(f"table1 (a) column marginal {j + 1}", lambda j=j: table_1("a").col_marginals[j], exp, 1e-12)
    yield Check("table1 (b) t=2 marginal top sum", lambda: select_top_k(table_1("b"), 2).marginal_top_sum, 0.90, 1e-12)
    yield Check("table4 lambda(2) = 15/93", lambda: lambda_t(normalize(table_4()), 2).value, 15 / 93, 1e-12)
    cut = normal_quantile(0.25)
    yield Check("bvn rho=0.4 corner cell", lambda: bvn_rectangle(-math.inf, cut, -math.inf, cut, 0.4), 0.1072, 5e-5)


def golden_checks() -> list[Check]:
    """Every published value this package reproduces."""
    return [*_table_2_checks(), *_table_5_checks(), *_table_3_checks(), *_misc_checks()]

