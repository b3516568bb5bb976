"""Issue community graphs built from reviewer co-commenting.

The graph for one repository has two node sets, issues and reviewers, and
two edge sets.  A first-level edge connects a reviewer to each issue they
commented on (excluding the issue opener's own comments); its weight is the
number of such comments.  A second-level edge connects two issues that share
at least one reviewer; its weight is the number of shared reviewers.  The
issue community score is the second-level edge count divided by
``issue_count - 1``, the edge count of a path graph over the same issues.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

from .models import Repository, issue_reviewers, reviewer_comment_counts

__all__ = [
    "E1Edge",
    "E2Edge",
    "IssueCommunityGraph",
    "ICSReport",
    "build_graph",
    "ics",
    "normalized_ics",
    "is_connected",
    "export_graph",
]


@dataclass(frozen=True)
class E1Edge:
    """Reviewer-to-issue edge; weight counts the reviewer's comments there."""

    reviewer: str
    issue: str
    weight: int


@dataclass(frozen=True)
class E2Edge:
    """Issue-to-issue edge; weight counts shared reviewers.

    ``issue_a < issue_b`` lexicographically, so each pair appears once.
    """

    issue_a: str
    issue_b: str
    weight: int


@dataclass(frozen=True)
class IssueCommunityGraph:
    repo_id: str
    issue_nodes: tuple[str, ...]
    reviewer_nodes: tuple[str, ...]
    e1_edges: tuple[E1Edge, ...]
    e2_edges: tuple[E2Edge, ...]

    def isolated_issues(self) -> tuple[str, ...]:
        """Issues that share no reviewer with any other issue."""
        linked = set()
        for edge in self.e2_edges:
            linked.add(edge.issue_a)
            linked.add(edge.issue_b)
        return tuple(i for i in self.issue_nodes if i not in linked)


@dataclass(frozen=True)
class ICSReport:
    repo_id: str
    ics: float | None
    e2_count: int
    issue_count: int
    isolated_issues: tuple[str, ...]
    undefined: bool
    exceeds_one: bool


def build_graph(repo: Repository) -> IssueCommunityGraph:
    issues = repo.issues_by_time()
    e1: list[E1Edge] = []
    reviewers_of: dict[str, set[str]] = {}
    for issue in issues:
        counts = reviewer_comment_counts(issue)
        reviewers_of[issue.id] = {user.login for user in counts}
        for user, n in counts.items():
            e1.append(E1Edge(reviewer=user.login, issue=issue.id, weight=n))

    e2: list[E2Edge] = []
    ids = sorted(reviewers_of)
    for idx, a in enumerate(ids):
        for b in ids[idx + 1 :]:
            shared = reviewers_of[a] & reviewers_of[b]
            if shared:
                e2.append(E2Edge(issue_a=a, issue_b=b, weight=len(shared)))

    reviewer_nodes = sorted({edge.reviewer for edge in e1})
    return IssueCommunityGraph(
        repo_id=repo.id,
        issue_nodes=tuple(sorted(reviewers_of)),
        reviewer_nodes=tuple(reviewer_nodes),
        e1_edges=tuple(sorted(e1, key=lambda e: (e.reviewer, e.issue))),
        e2_edges=tuple(sorted(e2, key=lambda e: (e.issue_a, e.issue_b))),
    )


def ics(graph: IssueCommunityGraph) -> ICSReport:
    """Score reviewer overlap across a repository's issues.

    Zero issues scores 0.0 (vacuously no community); a single issue has no
    pair to relate, so the score is undefined and reported as None.  Scores
    above 1.0 are legal (dense overlap beats a path graph) and flagged.
    """
    n = len(graph.issue_nodes)
    e2_count = len(graph.e2_edges)
    if n == 0:
        score: float | None = 0.0
        undefined = False
    elif n == 1:
        score = None
        undefined = True
    else:
        score = e2_count / (n - 1)
        undefined = False
    return ICSReport(
        repo_id=graph.repo_id,
        ics=score,
        e2_count=e2_count,
        issue_count=n,
        isolated_issues=graph.isolated_issues(),
        undefined=undefined,
        exceeds_one=score is not None and score > 1.0,
    )


def is_connected(graph: IssueCommunityGraph) -> bool:
    """True when every issue is reachable from every other via e2 edges.

    Vacuously true for zero or one issue.
    """
    n = len(graph.issue_nodes)
    if n <= 1:
        return True
    adjacency: dict[str, set[str]] = {i: set() for i in graph.issue_nodes}
    for edge in graph.e2_edges:
        adjacency[edge.issue_a].add(edge.issue_b)
        adjacency[edge.issue_b].add(edge.issue_a)
    seen = {graph.issue_nodes[0]}
    frontier = [graph.issue_nodes[0]]
    while frontier:
        node = frontier.pop()
        for nxt in adjacency[node]:
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return len(seen) == n


def normalized_ics(graph: IssueCommunityGraph) -> float | None:
    """Variant clamped to [0, 1]: connected graphs score 1.0 outright.

    Not part of the replicated analysis; offered because the raw score is
    unbounded above and awkward to compare across repository sizes.
    """
    report = ics(graph)
    if report.undefined:
        return None
    if report.issue_count >= 2 and is_connected(graph):
        return 1.0
    assert report.ics is not None
    return min(report.ics, 1.0)


def export_graph(graph: IssueCommunityGraph, out_dir: str) -> tuple[str, str]:
    """Write e1/e2 edge lists as CSV; returns the two file paths.

    Empty edge sets still produce header-only files so downstream tooling
    can rely on both files existing.
    """
    os.makedirs(out_dir, exist_ok=True)
    e1_path = os.path.join(out_dir, f"{graph.repo_id.replace('/', '_')}_e1.csv")
    e2_path = os.path.join(out_dir, f"{graph.repo_id.replace('/', '_')}_e2.csv")
    with open(e1_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["reviewer", "issue", "weight"])
        for edge in graph.e1_edges:
            writer.writerow([edge.reviewer, edge.issue, edge.weight])
    with open(e2_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["issue_a", "issue_b", "weight"])
        for edge in graph.e2_edges:
            writer.writerow([edge.issue_a, edge.issue_b, edge.weight])
    return e1_path, e2_path
