"""Benchmark harness for the LCS kernels.

Generates low-match token streams (each word appears about once per side,
so R stays near N), times each kernel, and emits CSV rows of
(n, r, elapsed_ms, algorithm). The compiled kernel and the pure-Python
fallback run on identical inputs so their curves are directly comparable;
the quadratic oracle joins in only while its cell cap allows.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import IO

from . import lcs
from .lcs import ORACLE_CELL_CAP, FlatToken, lcs_dp_oracle

CSV_HEADER = "n,r,elapsed_ms,algorithm"


@dataclass
class BenchRow:
    n: int
    r: int
    elapsed_ms: float
    algorithm: str


def low_match_streams(n: int, seed: int) -> tuple[list[int], list[int], int]:
    """Two shuffles of n distinct ids: R == n, LCS around 2*sqrt(n)."""
    rng = random.Random(seed)
    src = list(range(n))
    tgt = list(range(n))
    rng.shuffle(src)
    rng.shuffle(tgt)
    return src, tgt, n


def _ids_to_tokens(ids: list[int]) -> list[FlatToken]:
    return [FlatToken(f"w{i}", 1, 0, k) for k, i in enumerate(ids)]


def run_benchmark(
    sizes: list[int], trials: int = 3, seed: int = 0, include_oracle: bool = True
) -> list[BenchRow]:
    kernels = lcs.available_kernels()
    rows = []
    for n in sizes:
        for trial in range(trials):
            src_ids, tgt_ids, r = low_match_streams(n, seed + trial)
            for name, kernel in sorted(kernels.items()):
                start = time.perf_counter()
                kernel(src_ids, tgt_ids, n)
                elapsed = (time.perf_counter() - start) * 1000.0
                rows.append(BenchRow(n, r, elapsed, f"hs-{name}"))
            if include_oracle and n * n <= ORACLE_CELL_CAP:
                src = _ids_to_tokens(src_ids)
                tgt = _ids_to_tokens(tgt_ids)
                start = time.perf_counter()
                lcs_dp_oracle(src, tgt)
                elapsed = (time.perf_counter() - start) * 1000.0
                rows.append(BenchRow(n, r, elapsed, "dp-oracle"))
    return rows


def write_csv(rows: list[BenchRow], out: IO[str]) -> None:
    out.write(CSV_HEADER + "\n")
    for row in rows:
        out.write(f"{row.n},{row.r},{row.elapsed_ms:.3f},{row.algorithm}\n")
