try:
    from . import _atmocat as _ext
except ImportError:  # in-tree runs: the extension sits on sys.path, not in the package
    import _atmocat as _ext

__all__ = [
    "CqlSyntaxError",
    "EmptyVocabulary",
    "InvalidK",
    "InvalidWeights",
    "MalformedUrl",
    "NoPlan",
    "combine_score",
    "compose_workflow",
    "evaluate_cql",
    "goodness_of_variance_fit",
    "jenks_breaks",
    "latency_score",
    "like_match",
    "normalize_url",
    "parse_cql",
    "resolve_url",
    "score_relevance",
]

for _name in __all__:
    globals()[_name] = getattr(_ext, _name)
del _name
