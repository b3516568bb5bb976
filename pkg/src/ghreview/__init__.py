"""Repository-event analytics: archives, gap regularity, notification
simulation, issue community graphs, reviewer expertise, and sentiment."""

__version__ = "0.1.0"

from .models import (
    CATEGORY_ORDER,
    Category,
    Comment,
    Commit,
    Corpus,
    Issue,
    Repository,
    User,
    validate,
)
from .archive import (
    ArchiveError,
    ArchiveIntegrityError,
    ArchiveInvariantError,
    ArchiveParseError,
    load_archive,
    save_archive,
)
from .temporal import (
    ALPHA_DEFAULT,
    Distribution,
    GapSeries,
    InsufficientDataError,
    Label,
    classify_gaps,
    idm,
    issue_gaps,
    regular_fraction_timeline,
)
from .simulator import SimConfig, SimResult, simulate, simulate_corpus
from .community import IssueCommunityGraph, ICSReport, build_graph, ics
from .analytics import (
    CorrelationReport,
    CoverageReport,
    EmptySelectionError,
    DegenerateSeriesError,
    PearsonResult,
    RepoSummary,
    correlate_features,
    expertise_coverage,
    pearson,
    popularity_vs_comments,
    repo_summary,
)
from .sentiment import SentimentLexicon, default_lexicon, repo_sentiment, score_comment
from .fetcher import FetchPlan, fetch_corpus, fetch_repository, search_by_topic

__all__ = [
    "__version__",
    "CATEGORY_ORDER",
    "Category",
    "Comment",
    "Commit",
    "Corpus",
    "Issue",
    "Repository",
    "User",
    "validate",
    "ArchiveError",
    "ArchiveIntegrityError",
    "ArchiveInvariantError",
    "ArchiveParseError",
    "load_archive",
    "save_archive",
    "ALPHA_DEFAULT",
    "Distribution",
    "GapSeries",
    "InsufficientDataError",
    "Label",
    "classify_gaps",
    "idm",
    "issue_gaps",
    "regular_fraction_timeline",
    "SimConfig",
    "SimResult",
    "simulate",
    "simulate_corpus",
    "IssueCommunityGraph",
    "ICSReport",
    "build_graph",
    "ics",
    "CorrelationReport",
    "CoverageReport",
    "EmptySelectionError",
    "DegenerateSeriesError",
    "PearsonResult",
    "RepoSummary",
    "correlate_features",
    "expertise_coverage",
    "pearson",
    "popularity_vs_comments",
    "repo_summary",
    "SentimentLexicon",
    "default_lexicon",
    "repo_sentiment",
    "score_comment",
    "FetchPlan",
    "fetch_corpus",
    "fetch_repository",
    "search_by_topic",
]
