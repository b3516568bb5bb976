#!/usr/bin/env python3
"""Build a synthetic repository-event archive.

Three generator families: `featured` corpora carry users, comments,
commits, closures, and code links, so every analytics stage has data to
chew on; `lognormal` repositories draw heavy-tailed opening gaps around
a configurable median, the workhorse for simulation studies; `periodic`
repositories open issues on an exact period and serve as boundary cases.
"""

from __future__ import annotations

import argparse
import sys

from ghreview.archive import save_archive
from ghreview.models import CATEGORY_ORDER, Corpus, Repository, User
from ghreview.synthetic import lognormal_repo, periodic_repo, random_corpus
from ghreview.units import HOUR, parse_duration


def _collect_users(repos: list[Repository]) -> dict[str, User]:
    """Every user object a repo references, keyed by login."""
    users: dict[str, User] = {}
    for repo in repos:
        users[repo.owner.login] = repo.owner
        for user in repo.contributors:
            users[user.login] = user
        for issue in repo.issues:
            users[issue.opener.login] = issue.opener
            if issue.closer is not None:
                users[issue.closer.login] = issue.closer
            for comment in issue.comments:
                users[comment.author.login] = comment.author
        for commit in repo.commits:
            users[commit.author.login] = commit.author
    return users


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Generate a synthetic event archive.")
    parser.add_argument("--out", required=True, help="archive file to write")
    parser.add_argument(
        "--kind",
        choices=("featured", "lognormal", "periodic"),
        default="featured",
        help="generator family (default: featured)",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n-repos", type=int, default=12)
    parser.add_argument(
        "--median-gap",
        type=parse_duration,
        default=24 * HOUR,
        help="median inter-issue gap for lognormal repos (e.g. 24h, 3d)",
    )
    parser.add_argument("--sigma", type=float, default=0.6, help="lognormal shape")
    parser.add_argument(
        "--period",
        type=parse_duration,
        default=24 * HOUR,
        help="exact opening period for periodic repos",
    )
    parser.add_argument("--n-issues", type=int, default=200, help="issues per periodic repo")
    args = parser.parse_args(argv)

    if args.kind == "featured":
        corpus = random_corpus(args.seed, n_repos=args.n_repos)
    else:
        repos = []
        for i in range(args.n_repos):
            category = CATEGORY_ORDER[i % len(CATEGORY_ORDER)]
            repo_id = f"syn{i:03d}/{args.kind}"
            if args.kind == "lognormal":
                repos.append(
                    lognormal_repo(
                        repo_id,
                        seed=args.seed + i,
                        category=category,
                        median_gap=args.median_gap,
                        sigma=args.sigma,
                    )
                )
            else:
                repos.append(
                    periodic_repo(
                        repo_id,
                        category=category,
                        period=args.period,
                        n_issues=args.n_issues,
                    )
                )
        corpus = Corpus(repos=repos, users=_collect_users(repos))

    save_archive(corpus, args.out)
    n_issues = sum(len(r.issues) for r in corpus.repos)
    print(f"wrote {len(corpus.repos)} repositories, {n_issues} issues -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
