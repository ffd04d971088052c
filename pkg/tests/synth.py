"""Seeded synthetic data generators shared across the test suite.

Document pairs are built from a base token stream cut two different ways,
so the ground-truth M-N group structure is known exactly. Gibberish
paragraphs carry one stolen in-vocabulary word: enough to create a noisy
link when no hit-rate filter runs, while junk words (marked with 'q',
which the vocabulary never uses) keep the paragraph's hit rate tiny.
"""

from __future__ import annotations

import random

from paralign.corpus_io import BilingualPairRecord
from paralign.tables import display_width

VOCAB_LETTERS = "abcdefghijklmnop"  # no 'q': gibberish junk is q-marked
CJK_CHARS = "中文字符表格数据统计报告联合国文件程序设计算法"


def make_vocab(rng: random.Random, size: int = 150) -> list[str]:
    words = set()
    while len(words) < size:
        n = rng.randint(3, 10)
        words.add("".join(rng.choice(VOCAB_LETTERS) for _ in range(n)))
    return sorted(words)


def _split_stream(stream: list[str], cuts: list[int]) -> list[list[str]]:
    bounds = [0] + cuts + [len(stream)]
    return [stream[bounds[k] : bounds[k + 1]] for k in range(len(bounds) - 1)]


def make_aligned_pair(seed: int):
    """A synthetic (src_texts, tgt_texts, truth) triple.

    Both sides carry the same token stream, partitioned differently; truth
    lists (src_indices, tgt_indices) per block, shapes up to 5-5. Interior
    cut points use opposite parities so the two partitions never coincide
    and each block maps to exactly one connected component.
    """
    rng = random.Random(seed)
    vocab = make_vocab(rng)
    n_blocks = rng.randint(5, 8)
    src_texts: list[str] = []
    tgt_texts: list[str] = []
    truth: list[tuple[list[int], list[int]]] = []
    for _ in range(n_blocks):
        t = rng.randint(16, 60)
        stream = [rng.choice(vocab) for _ in range(t)]
        m = rng.randint(1, 5)
        n = rng.randint(1, 5)
        src_cuts = sorted(rng.sample(range(2, t - 1, 2), m - 1))
        tgt_cuts = sorted(rng.sample(range(3, t - 2, 2), n - 1))
        src_idx = list(range(len(src_texts), len(src_texts) + m))
        tgt_idx = list(range(len(tgt_texts), len(tgt_texts) + n))
        src_texts.extend(" ".join(p) for p in _split_stream(stream, src_cuts))
        tgt_texts.extend(" ".join(p) for p in _split_stream(stream, tgt_cuts))
        truth.append((src_idx, tgt_idx))
    return src_texts, tgt_texts, truth


def make_gibberish(rng: random.Random, stolen_word: str) -> str:
    words = [
        "q" + "".join(rng.choice(VOCAB_LETTERS) for _ in range(rng.randint(5, 11)))
        for _ in range(rng.randint(12, 20))
    ]
    words.insert(rng.randrange(len(words) + 1), stolen_word)
    return " ".join(words)


def inject_gibberish(src_texts, truth, seed: int, rate: float = 0.10):
    """Insert gibberish paragraphs at block boundaries on the source side.

    Each inserted paragraph carries a copy of the next block's first word,
    which the earliest-occurrence tie-break provably matches instead of
    the real copy, guaranteeing one noisy link per insertion.

    Returns (new_src_texts, injected_indices, remapped_truth).
    """
    rng = random.Random(seed)
    gaps = [group[0][0] for group in truth[1:]]
    k = min(max(1, round(rate * len(src_texts))), len(gaps))
    slots = set(rng.sample(gaps, k))
    gib_for_slot = {
        s: make_gibberish(rng, src_texts[s].split()[0]) for s in sorted(slots)
    }
    new_texts: list[str] = []
    injected: list[int] = []
    remap: dict[int, int] = {}
    for orig in range(len(src_texts)):
        if orig in gib_for_slot:
            injected.append(len(new_texts))
            new_texts.append(gib_for_slot[orig])
        remap[orig] = len(new_texts)
        new_texts.append(src_texts[orig])
    new_truth = [([remap[i] for i in s], list(t)) for s, t in truth]
    return new_texts, injected, new_truth


def _pad(cell: str, width: int) -> str:
    return cell + " " * (width - display_width(cell))


def _ascii_word(rng: random.Random, lo: int = 2, hi: int = 7) -> str:
    return "".join(rng.choice(VOCAB_LETTERS) for _ in range(rng.randint(lo, hi)))


def _cell_text(rng: random.Random) -> str:
    if rng.random() < 0.3:
        return "".join(rng.choice(CJK_CHARS) for _ in range(rng.randint(1, 4)))
    return " ".join(_ascii_word(rng) for _ in range(rng.randint(1, 2)))


def _prose(rng: random.Random) -> str:
    return " ".join(_ascii_word(rng, 3, 9) for _ in range(rng.randint(5, 15)))


def _wrap_rows(rng, cells, widths):
    """Render rows as blank-separated multi-line groups, wrapping one
    two-word cell per row when possible. Returns (lines, expected_rows)."""
    lines: list[str] = []
    expected: list[list[str]] = []
    for r, row in enumerate(cells):
        wrap_col = None
        for c, cell in enumerate(row):
            if " " in cell and rng.random() < 0.7:
                wrap_col = c
                break
        exp_row = list(row)
        if wrap_col is None:
            lines.append("  ".join(_pad(row[c], widths[c]) for c in range(len(row))).rstrip())
        else:
            first, second = row[wrap_col].split(" ", 1)
            top = ["" for _ in row]
            bottom = ["" for _ in row]
            for c, cell in enumerate(row):
                top[c] = cell if c != wrap_col else first
                bottom[c] = "" if c != wrap_col else second
            lines.append("  ".join(_pad(top[c], widths[c]) for c in range(len(row))).rstrip())
            lines.append("  ".join(_pad(bottom[c], widths[c]) for c in range(len(row))).rstrip())
            exp_row[wrap_col] = first + "\n" + second
        expected.append(exp_row)
        if r < len(cells) - 1:
            lines.append("")
    return lines, expected


def build_dash_table(rng: random.Random, kind: str):
    """Render a dash-family table; returns (lines, expected_rows, runs)."""
    cols = rng.randint(2, 4)
    n_body = rng.randint(2, 5)
    header = [_cell_text(rng) for _ in range(cols)]
    body = [[_cell_text(rng) for _ in range(cols)] for _ in range(n_body)]
    widths = [
        max(3, *(display_width(row[c]) for row in [header] + body))
        for c in range(cols)
    ]
    rule = "  ".join("-" * w for w in widths)

    def simple_line(row):
        return "  ".join(_pad(row[c], widths[c]) for c in range(cols)).rstrip()

    multiline = rng.random() < 0.35 and any(" " in c for row in body for c in row)
    if multiline:
        body_lines, body_expected = _wrap_rows(rng, body, widths)
    else:
        body_lines = [simple_line(row) for row in body]
        body_expected = body
    if kind == "dash-ruled":
        lines = [rule, simple_line(header), rule] + body_lines + [rule]
        expected = [header] + body_expected
    else:
        lines = [rule] + body_lines + [rule]
        expected = body_expected
    return lines, expected, tuple(widths)


def build_grid_table(rng: random.Random):
    cols = rng.randint(2, 4)
    n_rows = rng.randint(1, 4)
    cells = [[_cell_text(rng) for _ in range(cols)] for _ in range(n_rows)]
    widths = [
        max(3, *(display_width(row[c]) for row in cells)) for c in range(cols)
    ]
    border = "+" + "+".join("-" * w for w in widths) + "+"
    lines = [border]
    expected = []
    for row in cells:
        wrap_col = None
        if rng.random() < 0.25:
            for c, cell in enumerate(row):
                if " " in cell:
                    wrap_col = c
                    break
        exp_row = list(row)
        if wrap_col is None:
            lines.append("|" + "|".join(_pad(row[c], widths[c]) for c in range(cols)) + "|")
        else:
            first, second = row[wrap_col].split(" ", 1)
            top = [row[c] if c != wrap_col else first for c in range(cols)]
            bottom = ["" if c != wrap_col else second for c in range(cols)]
            lines.append("|" + "|".join(_pad(top[c], widths[c]) for c in range(cols)) + "|")
            lines.append("|" + "|".join(_pad(bottom[c], widths[c]) for c in range(cols)) + "|")
            exp_row[wrap_col] = first + "\n" + second
        expected.append(exp_row)
        lines.append(border)
    return lines, expected


def make_table_case(seed: int):
    """A document with planted tables; returns (text, planted).

    planted is a list of (kind_value, expected_rows) in document order.
    Dash-family tables in one case get distinct rule structures so one
    table's scan cannot absorb another.
    """
    rng = random.Random(seed)
    n_tables = rng.randint(1, 3)
    kinds = [rng.choice(["dash-ruled", "top-bottom", "grid"]) for _ in range(n_tables)]
    chunks = [_prose(rng)]
    planted = []
    used_runs = set()
    for kind in kinds:
        if kind == "grid":
            lines, expected = build_grid_table(rng)
        else:
            for _ in range(50):
                lines, expected, runs = build_dash_table(rng, kind)
                if runs not in used_runs:
                    used_runs.add(runs)
                    break
            else:
                raise AssertionError("could not generate distinct rule structure")
        planted.append((kind, expected))
        chunks.append("\n".join(lines))
        chunks.append(_prose(rng))
    return "\n\n".join(chunks), planted


def make_pair_pool(seed: int, n_total: int = 10_000, n_short: int = 1_000):
    """Bilingual pair pool with a known short-and-few-words subset."""
    rng = random.Random(seed)
    pairs = []
    short_ids = set()
    for i in range(n_total):
        pid = f"p{i:05d}"
        symbol = f"S{i // 5:04d}"
        if i < n_short:
            # under 32 characters AND under 5 words
            text = " ".join(["ab"] * rng.randint(1, 4))
            short_ids.add(pid)
        else:
            style = rng.random()
            if style < 0.2:
                # few characters but enough words
                text = " ".join(_ascii_word(rng, 2, 3) for _ in range(rng.randint(5, 7)))
            elif style < 0.4:
                # few words but enough characters
                text = _ascii_word(rng, 32, 50) + " " + _ascii_word(rng, 2, 4)
            else:
                text = " ".join(_ascii_word(rng, 3, 9) for _ in range(rng.randint(5, 80)))
        pairs.append(
            BilingualPairRecord(
                symbol=symbol,
                src_lang="fr",
                pair_id=pid,
                src_text=f"source {pid}",
                en_text=text,
                hit_rate_src=round(rng.random(), 3),
                hit_rate_en=round(rng.random(), 3),
                src_range=(i, i),
                en_range=(i, i),
            )
        )
    rng.shuffle(pairs)
    return pairs, short_ids


def assert_valid_common_subsequence(pairs, src_tokens, tgt_tokens):
    """Positions strictly increase on both sides and surfaces agree."""
    prev_a = prev_b = -1
    for pair in pairs:
        assert pair.src_pos > prev_a and pair.tgt_pos > prev_b, pairs
        assert src_tokens[pair.src_pos].surface == tgt_tokens[pair.tgt_pos].surface
        prev_a, prev_b = pair.src_pos, pair.tgt_pos
