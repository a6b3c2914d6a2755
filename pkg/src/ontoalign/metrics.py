"""String distance and similarity primitives.

All functions are pure and operate on plain strings. Distances here are raw
(integer edit counts, Jaro similarities); the uniform [0, 1] scaling used by
the clustering layer lives in :mod:`ontoalign.distance`.
"""

from __future__ import annotations

JARO_WINKLER_PREFIX_SCALE = 0.1
JARO_WINKLER_MAX_PREFIX = 4


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character insertions, deletions, and
    substitutions transforming ``a`` into ``b``."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        append = current.append
        for j, cb in enumerate(b, start=1):
            sub = previous[j - 1] + (ca != cb)
            dele = previous[j] + 1
            ins = current[j - 1] + 1
            append(sub if sub <= dele and sub <= ins else min(dele, ins))
        previous = current
    return previous[-1]


def damerau_levenshtein(a: str, b: str) -> int:
    """Edit distance that additionally permits adjacent transpositions.

    This is the unrestricted (true) Damerau-Levenshtein distance: transposed
    characters may take part in later edits, so e.g. ``("ca", "abc")`` is 2
    (transpose to "ac", insert "b") where the restricted variant gives 3.
    """
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    maxdist = la + lb
    # DP over a (la+2) x (lb+2) matrix with a sentinel row/column at index 0.
    d = [[maxdist] * (lb + 2) for _ in range(la + 2)]
    for i in range(la + 1):
        d[i + 1][1] = i
    for j in range(lb + 1):
        d[1][j + 1] = j
    last_row: dict[str, int] = {}
    for i in range(1, la + 1):
        last_col = 0
        for j in range(1, lb + 1):
            row = last_row.get(b[j - 1], 0)
            col = last_col
            if a[i - 1] == b[j - 1]:
                cost = 0
                last_col = j
            else:
                cost = 1
            d[i + 1][j + 1] = min(
                d[i][j] + cost,  # substitution or match
                d[i + 1][j] + 1,  # insertion
                d[i][j + 1] + 1,  # deletion
                d[row][col] + (i - row - 1) + 1 + (j - col - 1),  # transposition
            )
        last_row[a[i - 1]] = i
    return d[la + 1][lb + 1]


def jaro(a: str, b: str) -> float:
    """Jaro similarity in [0, 1].

    Characters match when equal and within a window of
    ``max(|a|, |b|) // 2 - 1`` positions; the transposition count is half the
    number of matched characters that are out of order.
    """
    if a == b:
        return 1.0
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0.0
    window = max(max(la, lb) // 2 - 1, 0)
    a_matched = [False] * la
    b_matched = [False] * lb
    matches = 0
    for i, ca in enumerate(a):
        lo = max(0, i - window)
        hi = min(lb, i + window + 1)
        for j in range(lo, hi):
            if not b_matched[j] and b[j] == ca:
                a_matched[i] = True
                b_matched[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    transposed = 0
    j = 0
    for i in range(la):
        if a_matched[i]:
            while not b_matched[j]:
                j += 1
            if a[i] != b[j]:
                transposed += 1
            j += 1
    t = transposed / 2.0
    m = matches
    return (m / la + m / lb + (m - t) / m) / 3.0


def jaro_winkler(a: str, b: str) -> float:
    """Jaro-Winkler similarity: Jaro boosted by the common prefix.

    Uses the standard constants (scale 0.1, prefix capped at 4 characters).
    """
    base = jaro(a, b)
    prefix = 0
    for ca, cb in zip(a[:JARO_WINKLER_MAX_PREFIX], b[:JARO_WINKLER_MAX_PREFIX]):
        if ca != cb:
            break
        prefix += 1
    return base + prefix * JARO_WINKLER_PREFIX_SCALE * (1.0 - base)


def jaccard_tokens(a: str, b: str) -> float:
    """Jaccard distance between the word-token sets of two names.

    Inputs are expected to be normalized (space-separated tokens). Two empty
    token sets are at distance 0.
    """
    ta = set(a.split())
    tb = set(b.split())
    if not ta and not tb:
        return 0.0
    return 1.0 - len(ta & tb) / len(ta | tb)


def edit_sim(a: str, b: str) -> float:
    """Levenshtein-based similarity: 1 - d/max(|a|, |b|); 1.0 for two empties."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest
