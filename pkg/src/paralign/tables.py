"""Detect and flatten plain-text tables so rows become sentence-like lines.

Three pattern families are recognized:

* dash-ruled: two or more segmented dash rules acting as header
  separator / splitter / footer,
* top-bottom: exactly one top and one bottom dash rule,
* grid: borders drawn with '+' and '|'.

Cell geometry is computed in display-width units (East Asian Wide and
Fullwidth characters count as two columns), which is what lets CJK cell
content line up with ASCII rules.
"""

from __future__ import annotations

import enum
import logging
import re
import unicodedata
from dataclasses import dataclass

from .textnorm import normalize_newlines

logger = logging.getLogger(__name__)

MAX_FLATTEN_PASSES = 16

# A line is a dash rule when at least 80% of its non-space characters are
# '-' and it holds three or more dashes. The threshold keeps hyphenated
# prose out while tolerating stray punctuation inside a rule.
_RULE_MIN_DASHES = 3
_RULE_DASH_SHARE = 0.8

_GRID_BORDER = re.compile(r"\+[+-]*\+$")


class NotATable(ValueError):
    """Raised when a candidate line cannot yield at least two columns."""


class FlattenDiverged(RuntimeError):
    """Raised when recursive flattening fails to reach a fixpoint."""


class TableKind(enum.Enum):
    DASH_RULED = "dash-ruled"
    TOP_BOTTOM = "top-bottom"
    GRID = "grid"


@dataclass
class TableBlock:
    kind: TableKind
    line_span: tuple[int, int]  # [start, end) into the line list
    col_bounds: list[int]  # column start offsets, display-width units
    rows: list[list[str]]  # cell text; wrapped cell lines joined by '\n'


def _char_width(ch: str) -> int:
    if unicodedata.east_asian_width(ch) in ("W", "F"):
        return 2
    if unicodedata.category(ch) in ("Mn", "Me"):
        return 0
    return 1


def display_width(s: str) -> int:
    """Display width of ``s`` under the East-Asian-width profile."""
    return sum(_char_width(ch) for ch in s)


def _slice_display(line: str, start: int, end: int | None) -> str:
    """Substring of ``line`` covering display columns [start, end).

    A wide character straddling ``start`` belongs to the cell it starts in,
    i.e. it is excluded here and captured by the previous slice.
    """
    out = []
    pos = 0
    for ch in line:
        if end is not None and pos >= end:
            break
        if pos >= start:
            out.append(ch)
        pos += _char_width(ch)
    return "".join(out)


def _is_dash_rule(line: str) -> bool:
    stripped = line.strip()
    if not stripped:
        return False
    dashes = stripped.count("-")
    nonspace = sum(1 for ch in stripped if not ch.isspace())
    return dashes >= _RULE_MIN_DASHES and dashes / nonspace >= _RULE_DASH_SHARE


def _dash_runs(line: str) -> list[tuple[int, int]]:
    """Maximal dash runs as (display offset, display width) pairs."""
    runs = []
    pos = 0
    run_start = None
    run_width = 0
    for ch in line:
        w = _char_width(ch)
        if ch == "-":
            if run_start is None:
                run_start = pos
                run_width = 0
            run_width += w
        elif run_start is not None:
            runs.append((run_start, run_width))
            run_start = None
        pos += w
    if run_start is not None:
        runs.append((run_start, run_width))
    return runs


def _plus_positions(line: str) -> list[int]:
    positions = []
    pos = 0
    for ch in line:
        if ch == "+":
            positions.append(pos)
        pos += _char_width(ch)
    return positions


def _is_grid_border(line: str) -> bool:
    return bool(_GRID_BORDER.fullmatch(line.strip()))


def _is_grid_row(line: str) -> bool:
    stripped = line.strip()
    return len(stripped) >= 2 and stripped.startswith("|") and stripped.endswith("|")


def parse_columns(rule_line: str) -> list[int]:
    """Column start offsets parsed from a delimiter line.

    Dash rules yield the start of each maximal dash run; grid borders yield
    each '+' position except the final one. Fewer than two derivable
    columns means the line cannot delimit a table.
    """
    stripped = rule_line.rstrip()
    if _is_grid_border(stripped):
        plus = _plus_positions(stripped)
        if len(plus) < 3:
            raise NotATable(f"grid border has {len(plus) - 1} column(s): {rule_line!r}")
        return plus[:-1]
    runs = _dash_runs(stripped)
    if len(runs) < 2:
        raise NotATable(f"rule line has {len(runs)} column(s): {rule_line!r}")
    return [start for start, _ in runs]


def _cells_from_lines(lines: list[str], spans: list[tuple[int, int | None]]) -> list[str]:
    """Reconstruct one logical row: vertical join of each cell region."""
    cells = []
    for start, end in spans:
        parts = []
        for line in lines:
            piece = _slice_display(line, start, end).strip()
            if piece:
                parts.append(piece)
        cells.append("\n".join(parts))
    return cells


def _split_row_groups(section: list[str]) -> list[list[str]]:
    """Group section lines into logical rows.

    Blank lines separate multi-line rows (the wrapped-cell style); a section
    without blank lines is one row per physical line.
    """
    has_blank = any(not line.strip() for line in section)
    if not has_blank:
        return [[line] for line in section if line.strip()]
    groups = []
    current: list[str] = []
    for line in section:
        if line.strip():
            current.append(line)
        elif current:
            groups.append(current)
            current = []
    if current:
        groups.append(current)
    return groups


def _dash_cell_spans(runs: list[tuple[int, int]]) -> list[tuple[int, int | None]]:
    starts = [start for start, _ in runs]
    spans: list[tuple[int, int | None]] = []
    for k, start in enumerate(starts):
        end = starts[k + 1] if k + 1 < len(starts) else None
        spans.append((start, end))
    return spans


def _grid_cell_spans(plus: list[int]) -> list[tuple[int, int | None]]:
    return [(plus[k] + 1, plus[k + 1]) for k in range(len(plus) - 1)]


def _scan_grid(lines: list[str], claimed: list[bool], i: int) -> TableBlock | None:
    first = lines[i].rstrip()
    plus = _plus_positions(first)
    if len(plus) < 3:
        return None
    n = len(lines)
    regions: list[list[str]] = []
    segment: list[str] = []
    last_border = i
    j = i + 1
    while j < n and not claimed[j]:
        line = lines[j].rstrip()
        if _is_grid_border(line):
            if _plus_positions(line) != plus:
                logger.debug("grid candidate at line %d: inconsistent border at %d", i, j)
                break
            regions.append(segment)
            segment = []
            last_border = j
        elif _is_grid_row(line):
            segment.append(line)
        else:
            break
        j += 1
    # leftover segment lines after the last border are not part of the table
    if last_border == i or not any(regions):
        return None
    spans = _grid_cell_spans(plus)
    rows = [_cells_from_lines(region, spans) for region in regions if region]
    return TableBlock(TableKind.GRID, (i, last_border + 1), plus[:-1], rows)


def _scan_dash(lines: list[str], claimed: list[bool], i: int) -> TableBlock | None:
    first = lines[i].rstrip()
    runs = _dash_runs(first)
    if len(runs) < 2:
        return None
    rule_width = display_width(first)
    n = len(lines)
    rule_lines = [i]
    j = i + 1
    while j < n and not claimed[j]:
        line = lines[j].rstrip()
        if _is_dash_rule(line):
            other = _dash_runs(line)
            if len(other) >= 2:
                if other != runs:
                    # a rule with different widths ends this candidate; it may
                    # start a table of its own
                    logger.debug(
                        "dash candidate at line %d: rule widths change at %d", i, j
                    )
                    break
                rule_lines.append(j)
        elif display_width(line) > rule_width:
            # content wider than the rules cannot belong to the table
            break
        j += 1
    if len(rule_lines) < 2:
        return None
    last = rule_lines[-1]
    sections = [
        lines[rule_lines[k] + 1 : rule_lines[k + 1]] for k in range(len(rule_lines) - 1)
    ]
    if not any(line.strip() for section in sections for line in section):
        logger.debug("dash candidate at line %d: no content between rules", i)
        return None
    spans = _dash_cell_spans(runs)
    rows = []
    for section in sections:
        for group in _split_row_groups(section):
            rows.append(_cells_from_lines(group, spans))
    kind = TableKind.DASH_RULED if len(rule_lines) >= 3 else TableKind.TOP_BOTTOM
    return TableBlock(kind, (i, last + 1), [start for start, _ in runs], rows)


def detect_tables(lines: list[str]) -> list[TableBlock]:
    """Find non-overlapping table blocks, in document order.

    Grid tables win over dash patterns when both could claim a region; a
    malformed candidate (inconsistent rule widths, borderless grids) is not
    a table and its lines are left as prose.
    """
    n = len(lines)
    claimed = [False] * n
    blocks = []

    i = 0
    while i < n:
        if not claimed[i] and _is_grid_border(lines[i].rstrip()):
            block = _scan_grid(lines, claimed, i)
            if block is not None:
                blocks.append(block)
                for k in range(*block.line_span):
                    claimed[k] = True
                i = block.line_span[1]
                continue
        i += 1

    i = 0
    while i < n:
        if not claimed[i] and _is_dash_rule(lines[i].rstrip()):
            block = _scan_dash(lines, claimed, i)
            if block is not None and not any(claimed[k] for k in range(*block.line_span)):
                blocks.append(block)
                for k in range(*block.line_span):
                    claimed[k] = True
                i = block.line_span[1]
                continue
        i += 1

    blocks.sort(key=lambda b: b.line_span)
    return blocks


def flatten_table(block: TableBlock) -> list[str]:
    """One inlined line per logical row, cells space-separated.

    Wrapped cell lines are joined by single spaces in reading order; empty
    cells are skipped; a row with no cell content emits nothing.
    """
    out = []
    for row in block.rows:
        cells = [" ".join(cell.split()) for cell in row]
        cells = [c for c in cells if c]
        if cells:
            out.append(" ".join(cells))
    return out


def flatten_recursive(text: str, max_passes: int = MAX_FLATTEN_PASSES) -> str:
    """Apply table detection and flattening until no tables remain.

    Non-table lines pass through byte-identical. Nested structures (a table
    whose body embeds another pattern) resolve over multiple passes; inputs
    that keep producing tables past ``max_passes`` raise FlattenDiverged.
    """
    lines = normalize_newlines(text).split("\n")
    for _ in range(max_passes):
        blocks = detect_tables(lines)
        if not blocks:
            return "\n".join(lines)
        rebuilt: list[str] = []
        pos = 0
        for block in blocks:
            start, end = block.line_span
            rebuilt.extend(lines[pos:start])
            rebuilt.extend(flatten_table(block))
            pos = end
        rebuilt.extend(lines[pos:])
        lines = rebuilt
    raise FlattenDiverged(f"tables still present after {max_passes} passes")
