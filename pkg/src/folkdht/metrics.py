"""Graph comparison and path-length statistics.

The central comparison takes an exact tag-tag graph and an approximated
one whose arcs must be a subset of the exact arcs. Per tag, the outgoing
arc weights over the shared targets are compared by Kendall tau-b (rank
agreement, tie corrected) and cosine similarity (shape agreement); tags
with fewer than two shared arcs, or degenerate all-tied vectors, are
excluded from the means and counted. Missing arcs are profiled by their
exact weight, since losing only light arcs is the behavior worth
checking.

All aggregate means and deviations run over tag-sorted values with exact
summation, so results do not depend on iteration order. Deviations are
population deviations throughout.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from scipy.stats import kendalltau

from .errors import InvariantViolation, ValidationError
from .graphs import FolksonomyGraph

COMPARISON_COLUMNS = [
    "k",
    "recall",
    "ktau_mu",
    "ktau_sigma",
    "theta_mu",
    "theta_sigma",
    "sim1_mu",
    "sim1_sigma",
    "excluded_tags",
]


def kendall_tau(a: Sequence[float], b: Sequence[float]) -> float | None:
    """Kendall tau-b between two equal-length vectors.

    Returns None when fewer than two elements, or when one vector is
    entirely tied (the statistic is undefined there).
    """
    if len(a) != len(b):
        raise ValidationError("kendall_tau needs equal-length vectors")
    if len(a) < 2:
        return None
    value = kendalltau(a, b, variant="b").statistic
    if math.isnan(value):
        return None
    return float(value)


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float | None:
    """Cosine of the angle between two vectors; None for a zero vector."""
    if len(a) != len(b):
        raise ValidationError("cosine_similarity needs equal-length vectors")
    dot = math.fsum(x * y for x, y in zip(a, b))
    norm_a = math.sqrt(math.fsum(x * x for x in a))
    norm_b = math.sqrt(math.fsum(y * y for y in b))
    if norm_a == 0.0 or norm_b == 0.0:
        return None
    return dot / (norm_a * norm_b)


@dataclass(frozen=True)
class TagArcComparison:
    """Per-tag outcome of the graph comparison."""

    tag: str
    common_arcs: int
    kendall: float | None
    cosine: float | None
    missing_arcs: int
    missing_weight_one: int
    missing_weight_le3: int

    @property
    def sim1(self) -> float | None:
        if self.missing_arcs == 0:
            return None
        return self.missing_weight_one / self.missing_arcs


@dataclass(frozen=True)
class FgComparison:
    """Aggregated comparison between an exact and an approximated graph."""

    recall: float
    ktau_mu: float
    ktau_sigma: float
    theta_mu: float
    theta_sigma: float
    sim1_mu: float
    sim1_sigma: float
    compared_tags: int
    excluded_tags: int
    sim1_tags: int
    oracle_arcs: int
    approx_arcs: int
    missing_arcs: int
    missing_weight_le3_pct: float
    sim1_by_convention: bool  # True when no arcs were missing at all
    per_tag: dict[str, TagArcComparison]


def _mean_sigma(values: list[float]) -> tuple[float, float]:
    if not values:
        return 0.0, 0.0
    mean = math.fsum(values) / len(values)
    variance = math.fsum((v - mean) ** 2 for v in values) / len(values)
    return mean, math.sqrt(variance)


def compare_fg(oracle: FolksonomyGraph, approx: FolksonomyGraph) -> FgComparison:
    """Compare an approximated graph against its exact counterpart.

    Raises InvariantViolation if the approximated graph has any arc the
    exact graph lacks, and ValidationError on an empty exact graph.
    """
    stray = [
        (source, target)
        for source, target, _ in approx.arcs()
        if oracle.arc_weight(source, target) == 0
    ]
    if stray:
        raise InvariantViolation(
            f"approximated graph has {len(stray)} arc(s) missing from the"
            f" exact graph",
            evidence=sorted(stray)[:20],
        )
    oracle_arcs = oracle.arc_count()
    if oracle_arcs == 0:
        raise ValidationError("exact graph has no arcs to compare against")
    approx_arcs = approx.arc_count()

    per_tag: dict[str, TagArcComparison] = {}
    ktaus: list[float] = []
    thetas: list[float] = []
    sim1s: list[float] = []
    compared = 0
    excluded = 0
    missing_total = 0
    missing_le3 = 0

    for tag in sorted(oracle.tags()):
        exact_out = oracle.neighbors(tag)
        approx_out = approx.neighbors(tag)
        common = sorted(approx_out)  # subset of exact_out by the check above
        missing = [w for target, w in exact_out.items() if target not in approx_out]
        n_missing = len(missing)
        miss_one = sum(1 for w in missing if w == 1)
        miss_le3 = sum(1 for w in missing if w <= 3)
        missing_total += n_missing
        missing_le3 += miss_le3

        kt = th = None
        if approx_out:
            if len(common) >= 2:
                exact_vec = [exact_out[c] for c in common]
                approx_vec = [approx_out[c] for c in common]
                kt = kendall_tau(exact_vec, approx_vec)
                th = cosine_similarity(exact_vec, approx_vec)
                if kt is None:
                    excluded += 1
                else:
                    compared += 1
                    ktaus.append(kt)
                    thetas.append(th)
            else:
                excluded += 1
        entry = TagArcComparison(
            tag=tag,
            common_arcs=len(common),
            kendall=kt,
            cosine=th,
            missing_arcs=n_missing,
            missing_weight_one=miss_one,
            missing_weight_le3=miss_le3,
        )
        per_tag[tag] = entry
        if n_missing > 0:
            sim1s.append(entry.sim1)

    ktau_mu, ktau_sigma = _mean_sigma(ktaus)
    theta_mu, theta_sigma = _mean_sigma(thetas)
    if sim1s:
        sim1_mu, sim1_sigma = _mean_sigma(sim1s)
        by_convention = False
    else:
        # Nothing was lost anywhere; report a perfect score and flag it.
        sim1_mu, sim1_sigma = 1.0, 0.0
        by_convention = True

    return FgComparison(
        recall=approx_arcs / oracle_arcs,
        ktau_mu=ktau_mu,
        ktau_sigma=ktau_sigma,
        theta_mu=theta_mu,
        theta_sigma=theta_sigma,
        sim1_mu=sim1_mu,
        sim1_sigma=sim1_sigma,
        compared_tags=compared,
        excluded_tags=excluded,
        sim1_tags=len(sim1s),
        oracle_arcs=oracle_arcs,
        approx_arcs=approx_arcs,
        missing_arcs=missing_total,
        missing_weight_le3_pct=(missing_le3 / missing_total) if missing_total else 1.0,
        sim1_by_convention=by_convention,
        per_tag=per_tag,
    )


# -- path statistics ---------------------------------------------------------------


@dataclass(frozen=True)
class PathStats:
    """Summary of a sample of search path lengths."""

    count: int
    mean: float
    sigma: float
    median: int  # lower median
    cdf: list[tuple[int, float]]


def path_stats(lengths: Sequence[int]) -> PathStats:
    if not lengths:
        raise ValidationError("path_stats needs at least one length")
    values = list(lengths)
    counts: dict[int, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    running = 0
    cdf = []
    for value in sorted(counts):
        running += counts[value]
        cdf.append((value, running / len(values)))
    return PathStats(
        count=len(values),
        mean=statistics.fmean(values),
        sigma=statistics.pstdev(values),
        median=statistics.median_low(values),
        cdf=cdf,
    )


# -- delimited output ----------------------------------------------------------------


def write_comparison_csv(
    rows: Iterable[tuple[int | str, FgComparison]], path: str | Path
) -> None:
    """One line per compared graph, keyed by its fan-out bound."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(COMPARISON_COLUMNS)
        for k, cmp_result in rows:
            writer.writerow(
                [
                    k,
                    f"{cmp_result.recall:.6f}",
                    f"{cmp_result.ktau_mu:.6f}",
                    f"{cmp_result.ktau_sigma:.6f}",
                    f"{cmp_result.theta_mu:.6f}",
                    f"{cmp_result.theta_sigma:.6f}",
                    f"{cmp_result.sim1_mu:.6f}",
                    f"{cmp_result.sim1_sigma:.6f}",
                    cmp_result.excluded_tags,
                ]
            )


def write_cdf_csv(
    series: Iterable[tuple[float, float]], path: str | Path, value_header: str = "value"
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([value_header, "cum_fraction"])
        for value, fraction in series:
            writer.writerow([value, f"{fraction:.6f}"])
