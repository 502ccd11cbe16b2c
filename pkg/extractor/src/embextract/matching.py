"""Token-id subsequence search used to locate keywords in sentences."""

from __future__ import annotations

from typing import Sequence


def find_subsequence(haystack: Sequence[int], needle: Sequence[int]) -> list[int]:
    """Return every start index where ``needle`` occurs in ``haystack``.

    Matches may overlap; an empty needle matches nowhere.
    """
    n = len(needle)
    if n == 0 or n > len(haystack):
        return []
    first = needle[0]
    out = []
    for i in range(len(haystack) - n + 1):
        if haystack[i] == first and list(haystack[i : i + n]) == list(needle):
            out.append(i)
    return out
