"""Organise model-hub metadata into an atlas of name families.

Thin Python layer over the native core. Functions mirror the C++ API;
`atlas` returns the bundle as a dict.
"""

import json as _json

from ._core import (  # noqa: F401
    ArgumentError,
    ClusterCountError,
    EmptyInputError,
    EmptySelectionError,
    Error,
    RowError,
    SchemaError,
    Server,
    UndefinedError,
    cosine_similarity,
    cut,
    extract_params,
    filter_csv,
    layout_fr,
    louvain,
    modularity,
    parse_csv,
    pearson,
    single_linkage,
    to_newick,
    word_frequencies,
)
from ._core import atlas_bundle as _atlas_bundle


def atlas(csv_text, min_downloads=10000, k=20, threshold=0.2, seed=42, iterations=50):
    """Runs the full pipeline on snapshot CSV text and returns the bundle."""
    bundle = _json.loads(_atlas_bundle(csv_text, min_downloads, k, threshold, seed, iterations))
    bundle.pop("computed_at", None)
    return bundle
