"""Inter-issue gap extraction and the Dense/Regular/Dispersed classifier.

Each consecutive pair of issue-opening events yields one gap.  The gap
distribution's median (of positive durations) is the reference point: a gap
inside [median - alpha, median + alpha] is Regular, below the band Dense,
above it Dispersed.  Alpha defaults to six hours.

Zero-duration gaps (two issues opened at the same second) are kept in the
series and always labeled Dense, but are excluded from the median so burst
activity cannot degenerate it.
"""

from __future__ import annotations

import enum
import statistics
from dataclasses import dataclass
from typing import Sequence

from .models import Repository
from .units import HOUR

ALPHA_DEFAULT = 6 * HOUR


class InsufficientDataError(ValueError):
    """Raised when a median is requested from a series with no positive gap."""


class Label(str, enum.Enum):
    DENSE = "Dense"
    REGULAR = "Regular"
    DISPERSED = "Dispersed"


@dataclass(frozen=True)
class Gap:
    start: float  # opening time of the earlier issue
    duration: float  # seconds until the next opening; 0 allowed for ties


@dataclass
class GapSeries:
    repo_id: str
    gaps: list[Gap]

    def durations(self) -> list[float]:
        return [g.duration for g in self.gaps]


@dataclass(frozen=True)
class Distribution:
    dense_pct: float
    regular_pct: float
    dispersed_pct: float
    n_gaps: int

    def as_dict(self) -> dict[str, float]:
        return {
            "dense_pct": self.dense_pct,
            "regular_pct": self.regular_pct,
            "dispersed_pct": self.dispersed_pct,
        }


def gaps_from_times(times: Sequence[float]) -> list[float]:
    """Successive differences of sorted opening times."""
    ordered = sorted(times)
    return [b - a for a, b in zip(ordered, ordered[1:])]


def issue_gaps(repo: Repository) -> GapSeries:
    issues = repo.issues_by_time()
    gaps = [
        Gap(start=a.created_at, duration=b.created_at - a.created_at)
        for a, b in zip(issues, issues[1:])
    ]
    return GapSeries(repo_id=repo.id, gaps=gaps)


def median_positive(durations: Sequence[float]) -> float:
    """Median of the positive durations; even counts average the two central values."""
    positive = [d for d in durations if d > 0]
    if not positive:
        raise InsufficientDataError("no positive-duration gaps")
    return statistics.median(positive)


def idm(gaps: GapSeries | Sequence[float]) -> float:
    """The median inter-issue distance of a series, in seconds."""
    durations = gaps.durations() if isinstance(gaps, GapSeries) else gaps
    return median_positive(durations)


def classify_duration(duration: float, median: float, alpha: float) -> Label:
    if duration == 0:
        return Label.DENSE
    if duration < median - alpha:
        return Label.DENSE
    if duration > median + alpha:
        return Label.DISPERSED
    return Label.REGULAR


def distribution_of(labels: Sequence[Label]) -> Distribution:
    n = len(labels)
    if n == 0:
        return Distribution(0.0, 0.0, 0.0, 0)
    dense = sum(1 for l in labels if l is Label.DENSE)
    dispersed = sum(1 for l in labels if l is Label.DISPERSED)
    regular = n - dense - dispersed
    return Distribution(100.0 * dense / n, 100.0 * regular / n, 100.0 * dispersed / n, n)


def classify_gaps(
    gaps: GapSeries | Sequence[float], alpha: float = ALPHA_DEFAULT
) -> tuple[list[Label], Distribution]:
    """Label every gap against the series' own median and summarize the split."""
    durations = gaps.durations() if isinstance(gaps, GapSeries) else list(gaps)
    median = median_positive(durations)  # raises on empty/all-zero series
    labels = [classify_duration(d, median, alpha) for d in durations]
    return labels, distribution_of(labels)


@dataclass(frozen=True)
class TimelinePoint:
    window_start: float
    regular_pct: float
    n_gaps: int


def timeline_from_times(
    times: Sequence[float], window: float, alpha: float = ALPHA_DEFAULT
) -> list[TimelinePoint]:
    """Regular-share series under an expanding median.

    Windows tile the series from the first opening.  A gap belongs to the
    window holding its endpoint; its label is judged against the median of
    every gap ended by that window's close, matching the way the notifier
    re-estimates its waiting time as data accrues.
    """
    ordered = sorted(times)
    if len(ordered) < 2 or window <= 0:
        return []
    t0 = ordered[0]
    # (end_time, duration) per gap, in time order
    gap_ends = [(b, b - a) for a, b in zip(ordered, ordered[1:])]
    last_index = int((gap_ends[-1][0] - t0) // window)

    points: list[TimelinePoint] = []
    cumulative_positive: list[float] = []
    i = 0
    for k in range(last_index + 1):
        window_end = t0 + (k + 1) * window
        in_window: list[float] = []
        while i < len(gap_ends) and gap_ends[i][0] < window_end:
            in_window.append(gap_ends[i][1])
            if gap_ends[i][1] > 0:
                cumulative_positive.append(gap_ends[i][1])
            i += 1
        if not in_window:
            continue
        if cumulative_positive:
            median = statistics.median(cumulative_positive)
            labels = [classify_duration(d, median, alpha) for d in in_window]
        else:
            labels = [Label.DENSE] * len(in_window)  # zero-duration bursts only
        regular = sum(1 for l in labels if l is Label.REGULAR)
        points.append(
            TimelinePoint(
                window_start=t0 + k * window,
                regular_pct=100.0 * regular / len(in_window),
                n_gaps=len(in_window),
            )
        )
    # the endpoint of the last gap sits exactly on a window boundary when
    # (t_last - t0) is a multiple of window; the loop above already covers it
    return points


def regular_fraction_timeline(
    repo: Repository, window: float, alpha: float = ALPHA_DEFAULT
) -> list[TimelinePoint]:
    """Fig-style regularity series for one repository's real issue history."""
    return timeline_from_times([i.created_at for i in repo.issues], window, alpha)
