"""Deterministic synthetic corpora for tests and offline studies.

Every generator takes an explicit seed and builds plain model objects, so
callers get reproducible fixtures without any archive files on disk.
"""

from __future__ import annotations

import math
import random
from typing import Sequence

from .models import (
    Category,
    Comment,
    Commit,
    Corpus,
    Issue,
    Repository,
    User,
)
from .units import DAY, HOUR

__all__ = [
    "periodic_repo",
    "lognormal_repo",
    "random_users",
    "random_corpus",
]

_BASE_TIME = 1_500_000_000.0

_WORD_POOL = (
    "great good excellent thanks helpful clean works fine nice elegant",
    "bug error broken crash fails wrong annoying problem unclear worse",
    "the a this that it we you please see merge branch commit patch",
    "not never very really no cannot hardly extremely quite slightly",
)


def _flat_words() -> list[str]:
    out: list[str] = []
    for group in _WORD_POOL:
        out.extend(group.split())
    return out


def periodic_repo(
    repo_id: str,
    category: Category = Category.RANDOM,
    created_at: float = _BASE_TIME,
    period: float = 24 * HOUR,
    n_issues: int = 200,
    owner: User | None = None,
    first_offset: float | None = None,
) -> Repository:
    """Issues opened on an exact fixed period; first one after first_offset.

    With first_offset omitted the first issue lands exactly one period after
    creation, so every inter-issue gap equals ``period``.
    """
    if owner is None:
        owner = User("dev0", 0)
    if first_offset is None:
        first_offset = period
    issues = []
    t = created_at + first_offset
    for k in range(n_issues):
        issues.append(
            Issue(
                id=f"{repo_id}#{k + 1}",
                repo_id=repo_id,
                opener=owner,
                created_at=t,
            )
        )
        t += period
    return Repository(
        id=repo_id,
        category=category,
        created_at=created_at,
        owner=owner,
        contributors=(owner,),
        issues=issues,
    )


def lognormal_repo(
    repo_id: str,
    seed: int,
    category: Category = Category.RANDOM,
    created_at: float = _BASE_TIME,
    median_gap: float = 24 * HOUR,
    sigma: float = 0.6,
    duration: float = 3 * 365.25 * DAY,
    owner: User | None = None,
) -> Repository:
    """Issue gaps drawn log-normally with the requested median.

    lognormvariate(mu, sigma) has median e^mu, so mu = log(median_gap)
    keeps the configured median exact in distribution.
    """
    if owner is None:
        owner = User("dev0", 0)
    rng = random.Random(f"lognormal:{seed}:{repo_id}")
    mu = math.log(median_gap)
    issues = []
    t = created_at + rng.lognormvariate(mu, sigma)
    k = 0
    while t <= created_at + duration:
        k += 1
        issues.append(
            Issue(id=f"{repo_id}#{k}", repo_id=repo_id, opener=owner, created_at=t)
        )
        t += rng.lognormvariate(mu, sigma)
    return Repository(
        id=repo_id,
        category=category,
        created_at=created_at,
        owner=owner,
        contributors=(owner,),
        issues=issues,
    )


def random_users(rng: random.Random, count: int) -> list[User]:
    return [
        User(login=f"user{k:03d}", followers=rng.randrange(0, 500)) for k in range(count)
    ]


def random_corpus(
    seed: int,
    n_repos: int = 12,
    categories: Sequence[Category] = tuple(Category),
    issues_range: tuple[int, int] = (3, 18),
    n_users: int = 40,
    mean_gap: float = 20 * DAY,
) -> Corpus:
    """Full-feature corpus: users, comments, commits, closures, code links.

    Feature magnitudes are arbitrary but internally consistent, so archive
    round-trips, summaries, and correlation reports all have data to chew
    on.  Identical seeds give identical corpora.
    """
    rng = random.Random(f"corpus:{seed}")
    users = random_users(rng, n_users)
    words = _flat_words()
    repos: list[Repository] = []
    for r in range(n_repos):
        category = categories[r % len(categories)]
        repo_id = f"org{r:02d}/repo{r:02d}"
        created = _BASE_TIME + rng.uniform(0, 90 * DAY)
        team = rng.sample(users, k=rng.randrange(2, 8))
        owner = team[0]
        issues: list[Issue] = []
        t = created + rng.uniform(0.5 * DAY, 30 * DAY)
        n_issues = rng.randrange(*issues_range)
        for k in range(n_issues):
            opener = rng.choice(team)
            comments: list[Comment] = []
            for _ in range(rng.randrange(0, 5)):
                body = " ".join(rng.choice(words) for _ in range(rng.randrange(3, 9)))
                comments.append(
                    Comment(
                        issue_id=f"{repo_id}#{k + 1}",
                        author=rng.choice(users),
                        created_at=t + rng.uniform(HOUR, 3 * DAY),
                        body=body,
                    )
                )
            closed_at = None
            closer = None
            if rng.random() < 0.7:
                closed_at = t + rng.uniform(HOUR, 20 * DAY)
                closer = rng.choice(team)
            issues.append(
                Issue(
                    id=f"{repo_id}#{k + 1}",
                    repo_id=repo_id,
                    opener=opener,
                    created_at=t,
                    closer=closer,
                    closed_at=closed_at,
                    has_linked_code=rng.random() < 0.6,
                    comments=sorted(comments, key=lambda c: c.created_at),
                )
            )
            t += rng.expovariate(1.0 / mean_gap)
        commits: list[Commit] = []
        t_commit = created + rng.uniform(0, 5 * DAY)
        horizon = max((i.created_at for i in issues), default=created) + 30 * DAY
        while t_commit < horizon:
            commits.append(
                Commit(
                    repo_id=repo_id,
                    author=rng.choice(team),
                    created_at=t_commit,
                    lines_added=rng.randrange(0, 400),
                    lines_removed=rng.randrange(0, 150),
                )
            )
            t_commit += rng.expovariate(1.0 / (10 * DAY))
        repos.append(
            Repository(
                id=repo_id,
                category=category,
                created_at=created,
                owner=owner,
                contributors=tuple(team),
                stargazers=rng.randrange(0, 3000),
                forks=rng.randrange(0, 800),
                watchers=rng.randrange(0, 1500),
                issues=issues,
                commits=commits,
            )
        )
    repos.sort(key=lambda repo: repo.id)
    return Corpus(repos=repos, users={u.login: u for u in users})
