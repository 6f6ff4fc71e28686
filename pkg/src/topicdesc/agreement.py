"""Annotation statistics: Likert histograms and Krippendorff's alpha.

Alpha uses the coincidence-matrix formulation, which handles any number of
annotators and missing ratings: units with fewer than two ratings contribute
no pairable values. Difference functions: nominal (0/1), interval (squared
value difference), ordinal (squared cumulative-margin distance).
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Callable, Iterable, Sequence

METRICS = ("quality", "usefulness", "efficiency")
METRIC_KINDS = ("nominal", "ordinal", "interval")
RATING_VALUES = (0, 1, 2, 3, 4)


@dataclass(frozen=True)
class AnnotationRecord:
    output_id: str
    annotator_id: str
    metric: str
    rating: int
    timestamp: str = ""

    def validate(self) -> None:
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric: {self.metric!r}")
        if not isinstance(self.rating, int) or isinstance(self.rating, bool):
            raise ValueError(f"rating must be an integer, got {self.rating!r}")
        if self.rating not in RATING_VALUES:
            raise ValueError(f"rating out of range: {self.rating!r}")


@dataclass(frozen=True)
class ReliabilityMatrix:
    units: tuple[str, ...]
    ratings: tuple[tuple[int, ...], ...]  # per unit, same order as units


@dataclass(frozen=True)
class AgreementReport:
    alpha: float
    metric_kind: str
    d_observed: float
    d_expected: float
    n_units: int
    n_pairable_values: int
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "metric_kind": self.metric_kind,
            "d_observed": self.d_observed,
            "d_expected": self.d_expected,
            "n_units": self.n_units,
            "n_pairable_values": self.n_pairable_values,
            "degenerate": self.degenerate,
        }


def build_matrix(
    records: Iterable[AnnotationRecord], metric: str
) -> ReliabilityMatrix:
    """Group one metric's ratings by output, preserving first-seen order."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric: {metric!r}")
    per_unit: dict[str, list[int]] = {}
    seen: set[tuple[str, str]] = set()
    for rec in records:
        if rec.metric != metric:
            continue
        rec.validate()
        pair = (rec.output_id, rec.annotator_id)
        if pair in seen:
            raise ValueError(
                f"duplicate rating by {rec.annotator_id!r} on {rec.output_id!r}"
            )
        seen.add(pair)
        per_unit.setdefault(rec.output_id, []).append(rec.rating)
    return ReliabilityMatrix(
        units=tuple(per_unit),
        ratings=tuple(tuple(r) for r in per_unit.values()),
    )


def _ordinal_delta_sq(values: Sequence[int], margins: Sequence[float]):
    """delta²(c,k) = (sum of margins of values between c and k, minus the
    endpoint halves)², following the ordinal metric's cumulative form."""
    n_values = len(values)
    table = [[0.0] * n_values for _ in range(n_values)]
    for a in range(n_values):
        for b in range(a + 1, n_values):
            between = sum(margins[g] for g in range(a, b + 1))
            d = between - (margins[a] + margins[b]) / 2.0
            table[a][b] = table[b][a] = d * d
    return table


def _interval_delta_sq(values: Sequence[int], margins: Sequence[float]):
    return [[float((c - k) ** 2) for k in values] for c in values]


def _nominal_delta_sq(values: Sequence[int], margins: Sequence[float]):
    return [
        [0.0 if c == k else 1.0 for k in values] for c in values
    ]


_DELTA_BUILDERS: dict[str, Callable] = {
    "nominal": _nominal_delta_sq,
    "ordinal": _ordinal_delta_sq,
    "interval": _interval_delta_sq,
}


def krippendorff_alpha(
    matrix: ReliabilityMatrix, metric_kind: str = "ordinal"
) -> AgreementReport:
    """alpha = 1 − D_o / D_e over the coincidence matrix of paired ratings.

    Raises ValueError with fewer than two pairable values. When every paired
    rating is identical, D_e (and D_o) are zero: by convention the report
    carries alpha = 1.0 flagged as degenerate.
    """
    if metric_kind not in METRIC_KINDS:
        raise ValueError(f"unknown metric_kind: {metric_kind!r}")
    pairable = [r for r in matrix.ratings if len(r) >= 2]
    n = sum(len(r) for r in pairable)
    if n < 2:
        raise ValueError("fewer than 2 pairable values; alpha is undefined")

    values = sorted({v for r in pairable for v in r})
    index = {v: i for i, v in enumerate(values)}
    n_values = len(values)

    # coincidence matrix: each intra-unit ordered pair adds 1/(m_u - 1)
    o = [[0.0] * n_values for _ in range(n_values)]
    for ratings in pairable:
        m_u = len(ratings)
        counts = [0] * n_values
        for v in ratings:
            counts[index[v]] += 1
        for c in range(n_values):
            if counts[c] == 0:
                continue
            for k in range(n_values):
                if counts[k] == 0:
                    continue
                pairs = counts[c] * (counts[k] - (1 if c == k else 0))
                if pairs:
                    o[c][k] += pairs / (m_u - 1)
    margins = [sum(o[c]) for c in range(n_values)]

    delta_sq = _DELTA_BUILDERS[metric_kind](values, margins)
    d_observed = (
        sum(o[c][k] * delta_sq[c][k] for c in range(n_values) for k in range(n_values))
        / n
    )
    d_expected = sum(
        margins[c] * margins[k] * delta_sq[c][k]
        for c in range(n_values)
        for k in range(n_values)
    ) / (n * (n - 1))

    n_units = len(matrix.units)
    if d_expected == 0.0:
        return AgreementReport(
            alpha=1.0,
            metric_kind=metric_kind,
            d_observed=d_observed,
            d_expected=d_expected,
            n_units=n_units,
            n_pairable_values=n,
            degenerate=True,
        )
    alpha = 1.0 - d_observed / d_expected
    return AgreementReport(
        alpha=alpha,
        metric_kind=metric_kind,
        d_observed=d_observed,
        d_expected=d_expected,
        n_units=n_units,
        n_pairable_values=n,
    )


def distribution_report(
    records: Iterable[AnnotationRecord],
    key: Callable[[AnnotationRecord], object] | None = None,
) -> dict[object, list[int]]:
    """Histogram of ratings 0..4 per group (default group: the metric)."""
    if key is None:
        key = lambda rec: rec.metric
    table: dict[object, list[int]] = {}
    for rec in records:
        rec.validate()
        row = table.setdefault(key(rec), [0] * len(RATING_VALUES))
        row[rec.rating] += 1
    return table


def format_share(count: int, total: int) -> str:
    """Percentage with one decimal, half-up: 302/800 -> '37.8%'."""
    if total <= 0:
        raise ValueError("total must be positive")
    pct = (Decimal(count) * 100 / Decimal(total)).quantize(
        Decimal("0.1"), rounding=ROUND_HALF_UP
    )
    return f"{pct}%"


def format_distribution(table: dict[object, list[int]]) -> str:
    """Plain-text histogram table with counts and shares per rating."""
    lines = []
    header = "group".ljust(28) + "".join(f"{v:>14}" for v in RATING_VALUES) + f"{'total':>8}"
    lines.append(header)
    for group in sorted(table, key=str):
        row = table[group]
        total = sum(row)
        cells = "".join(
            f"{c} ({format_share(c, total)})".rjust(14) if total else f"{c}".rjust(14)
            for c in row
        )
        lines.append(str(group).ljust(28) + cells + f"{total:>8}")
    return "\n".join(lines)
