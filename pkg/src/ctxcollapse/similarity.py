"""Gestalt (Ratcliff-Obershelp) string similarity.

The matching kernel is compiled (Cython) when available; otherwise the
pure-Python twin is used.  Set CTXCOLLAPSE_SIMILARITY=python to force the
fallback, e.g. for benchmarking.
"""

import os

if os.environ.get("CTXCOLLAPSE_SIMILARITY") == "python":
    from ctxcollapse._gestalt_py import match_total

    BACKEND = "python"
else:
    try:
        from ctxcollapse._gestalt import match_total  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from ctxcollapse._gestalt_py import match_total  # type: ignore[no-redef]

        BACKEND = "python"


def ratcliff_obershelp(a: str, b: str) -> float:
    """Similarity ratio 2*M / (len(a) + len(b)) in [0, 1].

    M is the total character count from recursive longest-common-substring
    matching.  The raw matching is direction-sensitive under tie-breaks,
    so arguments are put in a canonical order first, making the ratio
    symmetric by construction.  Two empty strings are defined to be
    identical (ratio 1.0).
    """
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    if (len(a), a) > (len(b), b):
        a, b = b, a
    return 2.0 * match_total(a, b) / (len(a) + len(b))
