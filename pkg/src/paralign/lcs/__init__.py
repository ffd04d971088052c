"""Sparse longest-common-subsequence engine with match-position recovery.

Two interchangeable kernels compute the same canonical answer: a compiled
extension (built from _hs_cy.pyx) and a pure-Python fallback (_hs_py).
The compiled kernel is preferred when importable; set UPRPRC_PURE_PYTHON=1
to force the fallback. A quadratic dynamic-programming oracle with the
same tie-breaking contract is kept for verification and testing.

Both implementations return, among all maximum-length common subsequences,
the one whose (src_pos, tgt_pos) pair sequence is lexicographically
smallest: every common word sits at its earliest consistent occurrence in
both streams.
"""

from __future__ import annotations

import os
from bisect import bisect_left
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..textnorm import Document

from . import _hs_py

try:  # compiled kernel is optional
    from . import _hs_cy
except ImportError:  # pragma: no cover - depends on build environment
    _hs_cy = None

if os.environ.get("UPRPRC_PURE_PYTHON") == "1" or _hs_cy is None:
    _kernel = _hs_py
    KERNEL_BACKEND = "python"
else:
    _kernel = _hs_cy
    KERNEL_BACKEND = "native"

ORACLE_CELL_CAP = 4_000_000


class OracleTooLarge(ValueError):
    """Input exceeds the DP oracle's quadratic cell cap."""


@dataclass(frozen=True, slots=True)
class FlatToken:
    """One token of a flattened document stream."""

    surface: str
    letters: int
    para_index: int
    token_index: int


@dataclass(frozen=True, slots=True)
class MatchPair:
    src_pos: int
    tgt_pos: int


@dataclass(frozen=True, slots=True)
class LcsStats:
    n_src: int
    n_tgt: int
    r: int  # matching token pairs across the two streams
    lcs_len: int


def flatten_document(doc: Document) -> list[FlatToken]:
    """Concatenate per-paragraph tokens into one indexed stream."""
    out = []
    for para in doc.paragraphs:
        for tok in para.tokens:
            out.append(FlatToken(tok.surface, tok.letters, para.index, len(out)))
    return out


def _encode(src: Sequence[FlatToken], tgt: Sequence[FlatToken]):
    vocab: dict[str, int] = {}
    intern = vocab.setdefault
    src_ids = [intern(t.surface, len(vocab)) for t in src]
    tgt_ids = [intern(t.surface, len(vocab)) for t in tgt]
    return src_ids, tgt_ids, len(vocab)


def available_kernels() -> dict[str, object]:
    kernels: dict[str, object] = {"python": _hs_py.hs_match_pairs}
    if _hs_cy is not None:
        kernels["native"] = _hs_cy.hs_match_pairs
    return kernels


def lcs_hunt_szymanski(
    src: Sequence[FlatToken], tgt: Sequence[FlatToken]
) -> tuple[list[MatchPair], LcsStats]:
    """Canonical sparse LCS between two token streams.

    Empty input on either side yields an empty match list. Runs in
    O((R + N) log N) with R the matching-pair count, so highly repetitive
    streams cost more than low-match ones.
    """
    raw, r_count = _kernel.hs_match_tokens(
        [t.surface for t in src], [t.surface for t in tgt]
    )
    pairs = [MatchPair(a, b) for a, b in raw]
    return pairs, LcsStats(len(src), len(tgt), r_count, len(pairs))


def lcs_dp_oracle(
    src: Sequence[FlatToken], tgt: Sequence[FlatToken]
) -> tuple[list[MatchPair], LcsStats]:
    """Quadratic-table reference with the identical output contract.

    Independent of the sparse kernels: fills the full suffix-length table,
    then walks it greedily for the earliest-occurrence chain. Refuses
    inputs beyond ORACLE_CELL_CAP table cells.
    """
    n, m = len(src), len(tgt)
    if n * m > ORACLE_CELL_CAP:
        raise OracleTooLarge(f"{n} x {m} cells exceed cap {ORACLE_CELL_CAP}")
    src_ids, tgt_ids, _ = _encode(src, tgt)
    if n == 0 or m == 0:
        return [], LcsStats(n, m, 0, 0)

    src_arr = np.asarray(src_ids, dtype=np.int64)
    tgt_arr = np.asarray(tgt_ids, dtype=np.int64)

    occ: dict[int, list[int]] = {}
    for pos, tid in enumerate(tgt_ids):
        occ.setdefault(tid, []).append(pos)
    r_count = sum(len(occ.get(tid, ())) for tid in src_ids)

    # dp[i, j] = LCS length of src[i:] vs tgt[j:]
    dp = np.zeros((n + 1, m + 1), dtype=np.int32)
    for i in range(n - 1, -1, -1):
        matched = np.where(tgt_arr == src_arr[i], dp[i + 1, 1:] + 1, 0)
        best = np.maximum(dp[i + 1, :-1], matched)
        dp[i, :-1] = np.maximum.accumulate(best[::-1])[::-1]

    pairs = []
    remaining = int(dp[0, 0])
    i = j = 0
    while remaining > 0:
        positions = occ.get(src_ids[i])
        b = None
        if positions:
            t = bisect_left(positions, j)
            if t < len(positions):
                b = positions[t]
        # the earliest occurrence maximizes the continuation, so src[i]
        # either starts the chain here or cannot start it at all
        if b is not None and 1 + int(dp[i + 1, b + 1]) == remaining:
            pairs.append(MatchPair(i, b))
            i += 1
            j = b + 1
            remaining -= 1
        else:
            i += 1
    return pairs, LcsStats(n, m, r_count, len(pairs))
