"""Windowing of over-length inputs onto sentence-ish boundaries."""
from __future__ import annotations

_BOUNDARY_CHARS = ".!?\n"


def chunk_windows(length: int, text: str, max_chars: int, overlap: int) -> list[tuple[int, int]]:
    """Absolute (start, end) windows covering the text.

    Each window is at most ``max_chars`` long; consecutive windows overlap
    by about ``overlap`` characters. Cuts prefer the last sentence-ish
    boundary in the second half of the window.
    """
    if length <= max_chars:
        return [(0, length)]
    windows = []
    start = 0
    while start < length:
        end = min(start + max_chars, length)
        if end < length:
            cut = _last_boundary(text, start + max_chars // 2, end)
            if cut is not None:
                end = cut
        windows.append((start, end))
        if end >= length:
            break
        start = max(end - overlap, start + 1)
    return windows


def _last_boundary(text: str, lo: int, hi: int) -> int | None:
    for i in range(hi - 1, lo - 1, -1):
        if text[i] in _BOUNDARY_CHARS:
            return i + 1
    return None
