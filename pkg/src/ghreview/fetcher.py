"""REST ingestion of repositories into the archive data model.

Design notes, all load-bearing for the tests:

- Every response with an ETag is cached (memory plus optional JSON file),
  and conditional requests that come back 304 are served from cache
  without spending rate budget.
- One rate budget object is shared by all workers under a lock; a 403
  with zero remaining raises immediately with the advertised reset time,
  and the client refuses to issue further requests until that time.
- Follower counts are fetched once per distinct login per run, through a
  small thread pool, and stamped into the corpus meta as a snapshot time.
- Fetching is idempotent: repositories are upserted by id, so an
  interrupted run rerun against the same cache converges to the same
  corpus as an uninterrupted one.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import requests

from .archive import _parse_timestamp  # shared ISO/epoch timestamp reader
from .models import Category, Comment, Commit, Corpus, Issue, Repository, User

__all__ = [
    "FetchPlan",
    "RateBudget",
    "FetchError",
    "BudgetExhaustedError",
    "UnknownRepoError",
    "PayloadDecodeError",
    "GitHubClient",
    "fetch_repository",
    "search_by_topic",
    "fetch_corpus",
]

DEFAULT_BASE_URL = "https://api.github.com"
TOKEN_ENV_VAR = "GITHUB_TOKEN"


class FetchError(Exception):
    pass


class BudgetExhaustedError(FetchError):
    def __init__(self, reset_at: float):
        super().__init__(f"rate budget exhausted; resets at epoch {reset_at:.0f}")
        self.reset_at = reset_at


class UnknownRepoError(FetchError):
    def __init__(self, slug: str):
        super().__init__(f"repository not found: {slug}")
        self.slug = slug


class PayloadDecodeError(FetchError):
    def __init__(self, url: str, reason: str):
        super().__init__(f"undecodable payload from {url}: {reason}")
        self.url = url


@dataclass
class FetchPlan:
    targets: tuple[str, ...] = ()
    topic: str | None = None
    token: str | None = None
    page_size: int = 100
    max_pages: int = 50
    since: float | None = None
    category: Category = Category.RANDOM
    base_url: str = DEFAULT_BASE_URL
    cache_dir: str | None = None
    workers: int = 4

    def __post_init__(self) -> None:
        if not 1 <= self.page_size <= 100:
            raise ValueError(f"page_size must be in 1..100, got {self.page_size}")
        if self.max_pages < 1:
            raise ValueError("max_pages must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass
class RateBudget:
    remaining: int = -1  # unknown until the first response
    reset_at: float = 0.0

    def update(self, headers) -> None:
        remaining = headers.get("X-RateLimit-Remaining")
        reset_at = headers.get("X-RateLimit-Reset")
        if remaining is not None:
            self.remaining = int(remaining)
        if reset_at is not None:
            self.reset_at = float(reset_at)


class _NotFound(Exception):
    pass


class GitHubClient:
    """Session wrapper owning the ETag cache and the shared rate budget."""

    def __init__(self, plan: FetchPlan):
        self.plan = plan
        self.session = requests.Session()
        self.budget = RateBudget()
        self._lock = threading.Lock()
        self._cache: dict[str, dict] = {}
        self._cache_path = None
        if plan.cache_dir:
            os.makedirs(plan.cache_dir, exist_ok=True)
            self._cache_path = os.path.join(plan.cache_dir, "etag_cache.json")
            if os.path.exists(self._cache_path):
                with open(self._cache_path, "r", encoding="utf-8") as fh:
                    self._cache = json.load(fh)
        token = plan.token or os.environ.get(TOKEN_ENV_VAR)
        self._headers = {"Accept": "application/vnd.github+json"}
        if token:
            self._headers["Authorization"] = f"Bearer {token}"

    def _persist_cache(self) -> None:
        if self._cache_path is None:
            return
        tmp = self._cache_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(self._cache, fh)
        os.replace(tmp, self._cache_path)

    @staticmethod
    def _key(url: str) -> str:
        return hashlib.sha256(url.encode("utf-8")).hexdigest()

    def get(self, url: str) -> tuple[object, str | None, bool]:
        """GET one absolute URL; returns (payload, next_url, from_cache)."""
        key = self._key(url)
        with self._lock:
            if self.budget.remaining == 0 and time.time() < self.budget.reset_at:
                raise BudgetExhaustedError(self.budget.reset_at)
            cached = self._cache.get(key)
        headers = dict(self._headers)
        if cached is not None:
            headers["If-None-Match"] = cached["etag"]
        response = self.session.get(url, headers=headers, timeout=30)
        with self._lock:
            self.budget.update(response.headers)
            if response.status_code == 304 and cached is not None:
                return cached["body"], cached.get("next"), True
            if response.status_code == 403 and self.budget.remaining == 0:
                raise BudgetExhaustedError(self.budget.reset_at)
        if response.status_code == 404:
            raise _NotFound(url)
        if response.status_code >= 400:
            raise FetchError(f"HTTP {response.status_code} from {url}")
        try:
            payload = response.json()
        except ValueError as exc:
            raise PayloadDecodeError(url, str(exc)) from exc
        next_url = response.links.get("next", {}).get("url")
        etag = response.headers.get("ETag")
        if etag:
            with self._lock:
                self._cache[key] = {"etag": etag, "body": payload, "next": next_url}
                self._persist_cache()
        return payload, next_url, False

    def paged(self, url: str) -> list:
        """Follow next links up to max_pages, concatenating list payloads."""
        out: list = []
        pages = 0
        next_url: str | None = url
        while next_url is not None and pages < self.plan.max_pages:
            payload, next_url, _ = self.get(next_url)
            if not isinstance(payload, list):
                raise PayloadDecodeError(url, "expected a JSON array page")
            out.extend(payload)
            pages += 1
        return out


def _ts(value, what: str) -> float:
    return _parse_timestamp(value, 0, what)


def _query(params: dict) -> str:
    return "&".join(f"{k}={v}" for k, v in params.items())


def _fetch_users(client: GitHubClient, logins: set[str]) -> dict[str, User]:
    """Resolve follower counts, one request per distinct login, in parallel."""
    base = client.plan.base_url

    def one(login: str) -> User:
        try:
            payload, _, _ = client.get(f"{base}/users/{login}")
        except _NotFound:
            return User(login=login, followers=0)
        if not isinstance(payload, dict):
            return User(login=login, followers=0)
        return User(login=login, followers=int(payload.get("followers", 0)))

    ordered = sorted(logins)
    with ThreadPoolExecutor(max_workers=client.plan.workers) as pool:
        resolved = list(pool.map(one, ordered))
    return {user.login: user for user in resolved}


def fetch_repository(slug: str, plan: FetchPlan, client: GitHubClient | None = None) -> tuple[Repository, dict[str, User]]:
    """Fetch one repository's full event tree.

    Returns the repository plus every user it references, with follower
    counts resolved.  Raises UnknownRepoError on 404.
    """
    client = client or GitHubClient(plan)
    base = plan.base_url
    try:
        payload, _, _ = client.get(f"{base}/repos/{slug}")
    except _NotFound:
        raise UnknownRepoError(slug) from None
    if not isinstance(payload, dict):
        raise PayloadDecodeError(f"{base}/repos/{slug}", "expected a JSON object")

    owner_login = payload["owner"]["login"]
    created_at = _ts(payload["created_at"], "repo created_at")

    contributors_payload = client.paged(
        f"{base}/repos/{slug}/contributors?{_query({'per_page': plan.page_size})}"
    )
    contributor_logins = [c["login"] for c in contributors_payload if "login" in c]

    issue_params = {"state": "all", "per_page": plan.page_size}
    if plan.since is not None:
        issue_params["since"] = int(plan.since)
    issues_payload = client.paged(f"{base}/repos/{slug}/issues?{_query(issue_params)}")

    commits_payload = client.paged(
        f"{base}/repos/{slug}/commits?{_query({'per_page': plan.page_size})}"
    )

    logins: set[str] = {owner_login}
    logins.update(contributor_logins)
    comment_payloads: dict[int, list] = {}
    for item in issues_payload:
        logins.add(item["user"]["login"])
        closed_by = item.get("closed_by")
        if closed_by:
            logins.add(closed_by["login"])
        if item.get("comments", 0):
            number = item["number"]
            comment_payloads[number] = client.paged(
                f"{base}/repos/{slug}/issues/{number}/comments?"
                f"{_query({'per_page': plan.page_size})}"
            )
            for c in comment_payloads[number]:
                logins.add(c["user"]["login"])
    commit_authors: list[str | None] = []
    for item in commits_payload:
        author = item.get("author")
        login = author["login"] if author and "login" in author else None
        commit_authors.append(login)
        if login:
            logins.add(login)

    users = _fetch_users(client, logins)

    issues: list[Issue] = []
    for item in issues_payload:
        number = item["number"]
        issue_id = f"{slug}#{number}"
        closed_by = item.get("closed_by")
        comments = [
            Comment(
                issue_id=issue_id,
                author=users[c["user"]["login"]],
                created_at=_ts(c["created_at"], "comment created_at"),
                body=c.get("body") or "",
            )
            for c in comment_payloads.get(number, [])
        ]
        comments.sort(key=lambda c: c.created_at)
        issues.append(
            Issue(
                id=issue_id,
                repo_id=slug,
                opener=users[item["user"]["login"]],
                created_at=_ts(item["created_at"], "issue created_at"),
                closer=users[closed_by["login"]] if closed_by else None,
                closed_at=(
                    _ts(item["closed_at"], "issue closed_at")
                    if item.get("closed_at")
                    else None
                ),
                has_linked_code="pull_request" in item,
                comments=comments,
            )
        )
    issues.sort(key=lambda i: (i.created_at, i.id))

    commits: list[Commit] = []
    for item, login in zip(commits_payload, commit_authors):
        if login is None:
            continue  # commits without a resolvable account carry no reviewer signal
        stats = item.get("stats") or {}
        commits.append(
            Commit(
                repo_id=slug,
                author=users[login],
                created_at=_ts(item["commit"]["author"]["date"], "commit date"),
                lines_added=int(stats.get("additions", 0)),
                lines_removed=int(stats.get("deletions", 0)),
            )
        )
    commits.sort(key=lambda c: c.created_at)

    repo = Repository(
        id=slug,
        category=plan.category,
        created_at=created_at,
        owner=users[owner_login],
        contributors=tuple(users[login] for login in contributor_logins),
        stargazers=int(payload.get("stargazers_count", 0)),
        forks=int(payload.get("forks_count", 0)),
        watchers=int(payload.get("subscribers_count", payload.get("watchers_count", 0))),
        issues=issues,
        commits=commits,
    )
    return repo, users


def search_by_topic(topic: str, plan: FetchPlan, client: GitHubClient | None = None) -> list[str]:
    """Repository slugs carrying the topic, across paginated search results."""
    if not topic:
        raise ValueError("topic must be non-empty")
    client = client or GitHubClient(plan)
    base = plan.base_url
    url = f"{base}/search/repositories?{_query({'q': f'topic:{topic}', 'per_page': plan.page_size})}"
    slugs: list[str] = []
    pages = 0
    next_url: str | None = url
    while next_url is not None and pages < plan.max_pages:
        payload, next_url, _ = client.get(next_url)
        if not isinstance(payload, dict) or "items" not in payload:
            raise PayloadDecodeError(url, "expected a search result object")
        slugs.extend(item["full_name"] for item in payload["items"])
        pages += 1
    return slugs


def fetch_corpus(
    plan: FetchPlan,
    client: GitHubClient | None = None,
    base_corpus: Corpus | None = None,
) -> Corpus:
    """Fetch every planned target, upserting into an existing corpus.

    Repositories replace any same-id predecessor; users merge by login.
    Rerunning after an interruption therefore converges to the result of
    an uninterrupted run.
    """
    client = client or GitHubClient(plan)
    slugs = list(plan.targets)
    if plan.topic:
        slugs.extend(search_by_topic(plan.topic, plan, client))
    repos: dict[str, Repository] = (
        {r.id: r for r in base_corpus.repos} if base_corpus else {}
    )
    users: dict[str, User] = dict(base_corpus.users) if base_corpus else {}
    for slug in slugs:
        repo, seen = fetch_repository(slug, plan, client)
        repos[repo.id] = repo
        users.update(seen)
    meta = dict(base_corpus.meta) if base_corpus else {}
    meta.setdefault("snapshot_at", time.time())
    return Corpus(
        repos=sorted(repos.values(), key=lambda r: r.id),
        users=users,
        meta=meta,
    )
