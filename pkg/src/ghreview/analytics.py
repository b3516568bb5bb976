"""Corpus-level statistics: category summaries, correlations, coverage.

Covers four report families: per-category repository summaries, Pearson
correlations of repository features against issue counts and against the
issue community score, reviewer expertise coverage curves, and the per-repo
opener-popularity versus received-comments series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from .community import build_graph, ics
from .models import (
    Category,
    Corpus,
    Repository,
    issue_reviewers,
    received_comment_count,
    repo_reviewers,
)
from .sentiment import repo_sentiment
from .units import DAY, HOUR

__all__ = [
    "EmptySelectionError",
    "DegenerateSeriesError",
    "PearsonResult",
    "pearson",
    "RepoSummary",
    "SUMMARY_FIELDS",
    "repo_summary",
    "CorrelationRow",
    "CorrelationReport",
    "ISSUE_TARGET_FEATURES",
    "ICS_TARGET_FEATURES",
    "correlate_features",
    "CoveragePoint",
    "CoverageReport",
    "expertise_coverage",
    "PopularityRow",
    "PopularityReport",
    "popularity_vs_comments",
    "corpus_reference_time",
]


class EmptySelectionError(ValueError):
    """Raised when a filter leaves no repositories to analyze."""


class DegenerateSeriesError(ValueError):
    """Raised when a correlation is undefined (too short or zero variance)."""


# ---------------------------------------------------------------------------
# Pearson correlation with a hand-rolled two-sided p-value.


class PearsonResult(NamedTuple):
    r: float
    p: float
    n: int


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta, modified Lentz method."""
    eps = 1e-15
    fpmin = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def _betai(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # continued fraction converges fast only below the distribution mean
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def pearson(x: Sequence[float], y: Sequence[float]) -> PearsonResult:
    """Sample Pearson r with a two-sided p-value from the t statistic.

    p = I_{df/(df+t^2)}(df/2, 1/2) with df = n - 2, which equals the
    two-tailed Student-t probability of exceeding |t|.  Perfect correlation
    reports p = 0 exactly.
    """
    if len(x) != len(y):
        raise ValueError(f"series length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise DegenerateSeriesError(f"need at least 3 paired observations, got {n}")
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxx = math.fsum((xi - mx) ** 2 for xi in x)
    syy = math.fsum((yi - my) ** 2 for yi in y)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateSeriesError("correlation undefined for a constant series")
    sxy = math.fsum((xi - mx) * (yi - my) for xi, yi in zip(x, y))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return PearsonResult(r=r, p=0.0, n=n)
    df = n - 2
    t_sq = r * r * df / (1.0 - r * r)
    p = _betai(0.5 * df, 0.5, df / (df + t_sq))
    return PearsonResult(r=r, p=min(1.0, max(0.0, p)), n=n)


# ---------------------------------------------------------------------------
# Per-category repository summaries.

SUMMARY_FIELDS = (
    "issues_per_repo",
    "closed_pct",
    "comments_per_closed_issue",
    "comments_per_open_issue",
    "mean_sentiment",
    "reviewers_per_issue",
    "contributors",
    "owner_followers",
    "opener_followers",
    "closer_followers",
    "lines_added_per_issue",
    "lines_removed_per_issue",
    "days_to_first_issue",
    "hours_between_issue_openings",
    "hours_to_close",
    "commits_per_repo",
    "commits_before_first_issue",
    "commits_between_issues",
)


@dataclass(frozen=True)
class RepoSummary:
    """Unweighted per-repo means for one repository selection.

    Fields a repository cannot provide (e.g. days_to_first_issue with zero
    issues) are skipped for that repository, not counted as zero; a field
    no repository provides is None.
    """

    category: str | None
    n_repos: int
    issues_per_repo: float | None
    closed_pct: float | None
    comments_per_closed_issue: float | None
    comments_per_open_issue: float | None
    mean_sentiment: float | None
    reviewers_per_issue: float | None
    contributors: float | None
    owner_followers: float | None
    opener_followers: float | None
    closer_followers: float | None
    lines_added_per_issue: float | None
    lines_removed_per_issue: float | None
    days_to_first_issue: float | None
    hours_between_issue_openings: float | None
    hours_to_close: float | None
    commits_per_repo: float | None
    commits_before_first_issue: float | None
    commits_between_issues: float | None

    def as_dict(self) -> dict[str, float | None]:
        return {name: getattr(self, name) for name in SUMMARY_FIELDS}


def _mean(values: list[float]) -> float | None:
    if not values:
        return None
    return math.fsum(values) / len(values)


def _between_window_commits(repo: Repository) -> list:
    """Commits strictly inside some consecutive-opening window.

    A commit timestamped exactly at an issue opening belongs to no window.
    """
    times = [i.created_at for i in repo.issues_by_time()]
    if len(times) < 2:
        return []
    picked = []
    for commit in repo.commits:
        for lo, hi in zip(times, times[1:]):
            if lo < commit.created_at < hi:
                picked.append(commit)
                break
    return picked


def repo_metrics(repo: Repository) -> dict[str, float]:
    """One repository's contribution to each summary field, absent keys skipped."""
    out: dict[str, float] = {}
    issues = repo.issues_by_time()
    n = len(issues)
    out["issues_per_repo"] = float(n)
    out["contributors"] = float(len(repo.contributors))
    out["commits_per_repo"] = float(len(repo.commits))
    out["owner_followers"] = float(repo.owner.followers)

    closed = [i for i in issues if i.closed_at is not None]
    opened = [i for i in issues if i.closed_at is None]
    if n:
        out["closed_pct"] = 100.0 * len(closed) / n
        out["reviewers_per_issue"] = math.fsum(len(issue_reviewers(i)) for i in issues) / n
        out["days_to_first_issue"] = (issues[0].created_at - repo.created_at) / DAY
        out["commits_before_first_issue"] = float(
            sum(1 for c in repo.commits if c.created_at < issues[0].created_at)
        )
    if closed:
        out["comments_per_closed_issue"] = math.fsum(len(i.comments) for i in closed) / len(closed)
        out["hours_to_close"] = (
            math.fsum(i.closed_at - i.created_at for i in closed) / len(closed) / HOUR
        )
        closer_f = [float(i.closer.followers) for i in closed if i.closer is not None]
        if closer_f:
            out["closer_followers"] = math.fsum(closer_f) / len(closer_f)
    if opened:
        out["comments_per_open_issue"] = math.fsum(len(i.comments) for i in opened) / len(opened)
    if issues:
        out["opener_followers"] = math.fsum(i.opener.followers for i in issues) / n
    if n >= 2:
        gaps = [b.created_at - a.created_at for a, b in zip(issues, issues[1:])]
        out["hours_between_issue_openings"] = math.fsum(gaps) / len(gaps) / HOUR
        window_commits = _between_window_commits(repo)
        out["commits_between_issues"] = len(window_commits) / (n - 1)
        out["lines_added_per_issue"] = math.fsum(c.lines_added for c in window_commits) / n
        out["lines_removed_per_issue"] = math.fsum(c.lines_removed for c in window_commits) / n
    score, n_comments = repo_sentiment(repo)
    if n_comments:
        out["mean_sentiment"] = score
    return out


def _select(corpus: Corpus, category: Category | str | None) -> list[Repository]:
    if category is None:
        return list(corpus.repos)
    cat = Category.parse(category) if isinstance(category, str) else category
    return [r for r in corpus.repos if r.category is cat]


def _category_name(category: Category | str | None) -> str:
    if category is None:
        return "all"
    if isinstance(category, Category):
        return category.value
    return str(category)


def repo_summary(corpus: Corpus, category: Category | str | None = None) -> RepoSummary:
    repos = _select(corpus, category)
    if not repos:
        raise EmptySelectionError(
            f"no repositories selected (category={_category_name(category)})"
        )
    columns: dict[str, list[float]] = {name: [] for name in SUMMARY_FIELDS}
    for repo in repos:
        for name, value in repo_metrics(repo).items():
            columns[name].append(value)
    cat_name = None
    if category is not None:
        cat = Category.parse(category) if isinstance(category, str) else category
        cat_name = cat.value
    return RepoSummary(
        category=cat_name,
        n_repos=len(repos),
        **{name: _mean(vals) for name, vals in columns.items()},
    )


# ---------------------------------------------------------------------------
# Feature correlations against issue count and against the community score.


@dataclass(frozen=True)
class CorrelationRow:
    feature: str
    r: float | None
    p: float | None
    n: int
    note: str | None = None


@dataclass(frozen=True)
class CorrelationReport:
    target: str
    category: str | None
    rows: tuple[CorrelationRow, ...]


def corpus_reference_time(corpus: Corpus) -> float:
    """Latest event timestamp anywhere in the corpus; the "now" for age math."""
    latest = 0.0
    for repo in corpus.repos:
        latest = max(latest, repo.created_at)
        for issue in repo.issues:
            latest = max(latest, issue.created_at)
            if issue.closed_at is not None:
                latest = max(latest, issue.closed_at)
            for comment in issue.comments:
                latest = max(latest, comment.created_at)
        for commit in repo.commits:
            latest = max(latest, commit.created_at)
    return latest


def _total_comments(repo: Repository) -> float:
    return float(sum(len(i.comments) for i in repo.issues))


def _feature_extractors(corpus: Corpus) -> dict[str, Callable[[Repository], float | None]]:
    reference = corpus_reference_time(corpus)

    def repo_age(repo: Repository) -> float:
        return (reference - repo.created_at) / DAY

    def commits_before_first(repo: Repository) -> float | None:
        issues = repo.issues_by_time()
        if not issues:
            return None
        return float(sum(1 for c in repo.commits if c.created_at < issues[0].created_at))

    def commits_between(repo: Repository) -> float | None:
        n = len(repo.issues)
        if n < 2:
            return None
        return len(_between_window_commits(repo)) / (n - 1)

    def opener_followers(repo: Repository) -> float | None:
        if not repo.issues:
            return None
        return math.fsum(i.opener.followers for i in repo.issues) / len(repo.issues)

    def owner_followers(repo: Repository) -> float:
        return float(repo.owner.followers)

    return {
        "repo_age": repo_age,
        "contributors": lambda r: float(len(r.contributors)),
        "issue_comments": _total_comments,
        "comments": _total_comments,
        "commits": lambda r: float(len(r.commits)),
        "reviewers": lambda r: float(len(repo_reviewers(r))),
        "commits_before_first_issue": commits_before_first,
        "commits_between_issues": commits_between,
        "issue_opener_followers": opener_followers,
        "repo_owner_followers": owner_followers,
        "stars": lambda r: float(r.stargazers),
        "stargazers": lambda r: float(r.stargazers),
        "forks": lambda r: float(r.forks),
        "watchers": lambda r: float(r.watchers),
        "issues_count": lambda r: float(len(r.issues)),
    }


ISSUE_TARGET_FEATURES = (
    "repo_age",
    "contributors",
    "issue_comments",
    "commits",
    "reviewers",
    "commits_before_first_issue",
    "commits_between_issues",
    "issue_opener_followers",
    "repo_owner_followers",
    "stars",
    "forks",
    "watchers",
)

ICS_TARGET_FEATURES = (
    "contributors",
    "stargazers",
    "issues_count",
    "comments",
)


def correlate_features(
    corpus: Corpus,
    target: str = "issues",
    category: Category | str | None = None,
    features: Sequence[str] | None = None,
) -> CorrelationReport:
    """Correlate per-repo features against a target quantity.

    ``target`` is "issues" (total issue count) or "ics" (community score;
    repos with an undefined score are dropped from every row).  Rows with
    fewer than 3 usable repos or a constant series carry a note instead of
    failing the whole report.
    """
    repos = _select(corpus, category)
    if len(repos) < 3:
        raise EmptySelectionError(
            f"need at least 3 repositories, got {len(repos)} "
            f"(category={_category_name(category)})"
        )
    if target == "issues":
        targets: dict[str, float] = {r.id: float(len(r.issues)) for r in repos}
        chosen = tuple(features) if features is not None else ISSUE_TARGET_FEATURES
    elif target == "ics":
        targets = {}
        for repo in repos:
            report = ics(build_graph(repo))
            if report.ics is not None:
                targets[repo.id] = report.ics
        chosen = tuple(features) if features is not None else ICS_TARGET_FEATURES
    else:
        raise ValueError(f"unknown correlation target {target!r}")

    extractors = _feature_extractors(corpus)
    rows: list[CorrelationRow] = []
    for name in chosen:
        if name not in extractors:
            raise ValueError(f"unknown feature {name!r}")
        extract = extractors[name]
        xs: list[float] = []
        ys: list[float] = []
        for repo in repos:
            if repo.id not in targets:
                continue
            value = extract(repo)
            if value is None:
                continue
            xs.append(value)
            ys.append(targets[repo.id])
        if len(xs) < 3:
            rows.append(CorrelationRow(name, None, None, len(xs), note="insufficient data"))
            continue
        try:
            result = pearson(xs, ys)
        except DegenerateSeriesError:
            rows.append(CorrelationRow(name, None, None, len(xs), note="constant series"))
            continue
        rows.append(CorrelationRow(name, result.r, result.p, result.n))
    cat_name = None
    if category is not None:
        cat = Category.parse(category) if isinstance(category, str) else category
        cat_name = cat.value
    return CorrelationReport(target=target, category=cat_name, rows=tuple(rows))


# ---------------------------------------------------------------------------
# Reviewer expertise coverage.


class CoveragePoint(NamedTuple):
    reviewer_rank_pct: float
    issues_covered_pct: float


@dataclass(frozen=True)
class CoverageReport:
    """Prefix-union issue coverage by reviewers ranked on follower count.

    curve[k-1] gives, for the k most-followed reviewers, the percentage of
    all selected issues having at least one comment from any of them.
    """

    category: str | None
    n_reviewers: int
    n_issues: int
    curve: tuple[CoveragePoint, ...]
    popularity_ratio: float | None
    top20_issue_coverage: float | None
    empty: bool = False


def expertise_coverage(
    corpus: Corpus,
    category: Category | str | None = None,
    repos: Sequence[Repository] | None = None,
) -> CoverageReport:
    selection = list(repos) if repos is not None else _select(corpus, category)
    cat_name = None
    if category is not None:
        cat = Category.parse(category) if isinstance(category, str) else category
        cat_name = cat.value

    issue_keys: list[tuple[str, str]] = []
    commenters: dict[tuple[str, str], set[str]] = {}
    follower_of: dict[str, int] = {}
    for repo in selection:
        for issue in repo.issues:
            key = (repo.id, issue.id)
            issue_keys.append(key)
            who = issue_reviewers(issue)
            commenters[key] = {user.login for user in who}
            for user in who:
                follower_of[user.login] = user.followers
    if not follower_of:
        return CoverageReport(
            category=cat_name,
            n_reviewers=0,
            n_issues=len(issue_keys),
            curve=(),
            popularity_ratio=None,
            top20_issue_coverage=None,
            empty=True,
        )

    ranked = sorted(follower_of, key=lambda login: (-follower_of[login], login))
    m = len(ranked)
    n_issues = len(issue_keys)
    total_followers = sum(follower_of.values())
    k20 = math.ceil(0.2 * m)
    top_followers = sum(follower_of[login] for login in ranked[:k20])
    if total_followers > 0:
        popularity_ratio = top_followers / total_followers
    else:
        popularity_ratio = k20 / m  # uniformity floor when no follower data

    curve: list[CoveragePoint] = []
    covered: set[tuple[str, str]] = set()
    top20_cov: float | None = None
    for k, login in enumerate(ranked, start=1):
        for key, who in commenters.items():
            if login in who:
                covered.add(key)
        pct_issues = 100.0 * len(covered) / n_issues if n_issues else 0.0
        curve.append(CoveragePoint(100.0 * k / m, pct_issues))
        if k == k20:
            top20_cov = len(covered) / n_issues if n_issues else 0.0
    return CoverageReport(
        category=cat_name,
        n_reviewers=m,
        n_issues=n_issues,
        curve=tuple(curve),
        popularity_ratio=popularity_ratio,
        top20_issue_coverage=top20_cov,
    )


# ---------------------------------------------------------------------------
# Opener popularity vs received comments (per repository).


@dataclass(frozen=True)
class PopularityRow:
    repo_id: str
    issue_count: int
    r: float
    p: float
    n: int


@dataclass(frozen=True)
class PopularityReport:
    rows: tuple[PopularityRow, ...]
    omitted: int


def popularity_vs_comments(corpus: Corpus) -> PopularityReport:
    """Per-repo correlation of opener followers vs comments received.

    Only issues whose opener also submitted code (has_linked_code) count.
    Repos with under 3 such issues, or with a constant series on either
    axis, are omitted; rows sort ascending by total issue count.
    """
    rows: list[PopularityRow] = []
    omitted = 0
    for repo in corpus.repos:
        xs: list[float] = []
        ys: list[float] = []
        for issue in repo.issues:
            if not issue.has_linked_code:
                continue
            xs.append(float(issue.opener.followers))
            ys.append(float(received_comment_count(issue)))
        if len(xs) < 3:
            omitted += 1
            continue
        try:
            result = pearson(xs, ys)
        except DegenerateSeriesError:
            omitted += 1
            continue
        rows.append(
            PopularityRow(
                repo_id=repo.id,
                issue_count=len(repo.issues),
                r=result.r,
                p=result.p,
                n=result.n,
            )
        )
    rows.sort(key=lambda row: (row.issue_count, row.repo_id))
    return PopularityReport(rows=tuple(rows), omitted=omitted)
