"""Readers and writers for the corpus record formats, plus statistics.

Three line-delimited UTF-8 formats (one JSON object per line, gzip
transparently handled by a .gz extension):

* file-level records: one document symbol with the text of every language
  version; gaps are empty strings so each record has an identical shape,
* bilingual pair records: one aligned paragraph group of one language
  against English, with both sides' hit rates,
* block records: one all-language paragraph block keyed by its English
  paragraph interval.

Field names are this package's own and are documented in the README.
"""

from __future__ import annotations

import gzip
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .gapa import AlignmentResult

logger = logging.getLogger(__name__)

#: Every file-level record carries these language keys (the six official
#: languages plus German, which exists for a subset of documents).
LANG_KEYS = ("ar", "de", "en", "es", "fr", "ru", "zh")


class RecordError(ValueError):
    def __init__(self, path, line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no


@dataclass
class FileLevelRecord:
    symbol: str
    texts: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.texts = {lang: self.texts.get(lang, "") for lang in LANG_KEYS}


@dataclass
class BilingualPairRecord:
    symbol: str
    src_lang: str
    pair_id: str
    src_text: str
    en_text: str
    hit_rate_src: float
    hit_rate_en: float
    src_range: tuple[int, int]
    en_range: tuple[int, int]


@dataclass
class BlockRecord:
    symbol: str
    en_range: tuple[int, int]
    texts: dict[str, str]


def _open_auto(path, mode: str) -> IO:
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t", encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def _iter_lines(path, on_error: str):
    assert on_error in ("raise", "skip")
    with _open_auto(path, "r") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError as exc:
                err = RecordError(path, line_no, f"bad JSON: {exc}")
                if on_error == "raise":
                    raise err from exc
                logger.warning("skipping record: %s", err)


def read_file_level(path, on_error: str = "raise") -> Iterator[FileLevelRecord]:
    for line_no, obj in _iter_lines(path, on_error):
        try:
            yield FileLevelRecord(
                obj["symbol"], {lang: obj.get(lang, "") for lang in LANG_KEYS}
            )
        except (KeyError, TypeError) as exc:
            err = RecordError(path, line_no, f"bad file-level record: {exc!r}")
            if on_error == "raise":
                raise err from exc
            logger.warning("skipping record: %s", err)


def write_file_level(records: Iterable[FileLevelRecord], path) -> None:
    with _open_auto(path, "w") as fh:
        for rec in records:
            obj = {"symbol": rec.symbol}
            obj.update({lang: rec.texts.get(lang, "") for lang in LANG_KEYS})
            fh.write(_dump(obj) + "\n")


def _pair_from_obj(obj) -> BilingualPairRecord:
    return BilingualPairRecord(
        symbol=obj["symbol"],
        src_lang=obj["src_lang"],
        pair_id=obj["pair_id"],
        src_text=obj["src_text"],
        en_text=obj["en_text"],
        hit_rate_src=obj["hit_rate_src"],
        hit_rate_en=obj["hit_rate_en"],
        src_range=(obj["src_range"][0], obj["src_range"][1]),
        en_range=(obj["en_range"][0], obj["en_range"][1]),
    )


def read_bilingual(path, on_error: str = "raise") -> Iterator[BilingualPairRecord]:
    for line_no, obj in _iter_lines(path, on_error):
        try:
            yield _pair_from_obj(obj)
        except (KeyError, TypeError, IndexError) as exc:
            err = RecordError(path, line_no, f"bad bilingual record: {exc!r}")
            if on_error == "raise":
                raise err from exc
            logger.warning("skipping record: %s", err)


def _pair_obj(rec: BilingualPairRecord) -> dict:
    return {
        "symbol": rec.symbol,
        "src_lang": rec.src_lang,
        "pair_id": rec.pair_id,
        "src_text": rec.src_text,
        "en_text": rec.en_text,
        "hit_rate_src": rec.hit_rate_src,
        "hit_rate_en": rec.hit_rate_en,
        "src_range": list(rec.src_range),
        "en_range": list(rec.en_range),
    }


def write_bilingual(records: Iterable[BilingualPairRecord], path) -> None:
    with _open_auto(path, "w") as fh:
        for rec in records:
            fh.write(_dump(_pair_obj(rec)) + "\n")


def bilingual_records(
    alignment: AlignmentResult,
    symbol: str,
    src_lang: str,
    src_paragraphs: list[str],
    en_paragraphs: list[str],
) -> list[BilingualPairRecord]:
    """One record per alignment group, with original-language source text.

    The alignment was computed on the translated source; group member
    indices map 1:1 back onto the original paragraphs supplied here.
    """
    records = []
    for k, group in enumerate(alignment.groups):
        records.append(
            BilingualPairRecord(
                symbol=symbol,
                src_lang=src_lang,
                pair_id=f"{symbol}:{src_lang}:{k}",
                src_text=" ".join(src_paragraphs[i] for i in group.src_members),
                en_text=" ".join(en_paragraphs[j] for j in group.tgt_members),
                hit_rate_src=group.hit_rate_src,
                hit_rate_en=group.hit_rate_tgt,
                src_range=group.src_range,
                en_range=group.tgt_range,
            )
        )
    return records


def alignment_to_json(result: AlignmentResult) -> str:
    """Deterministic single-object serialization of an alignment result."""
    return _dump(
        {
            "h_c": result.h_c,
            "groups": [
                {
                    "src_range": list(g.src_range),
                    "tgt_range": list(g.tgt_range),
                    "src_members": g.src_members,
                    "tgt_members": g.tgt_members,
                    "hit_rate_src": g.hit_rate_src,
                    "hit_rate_tgt": g.hit_rate_tgt,
                    "src_text": g.src_text,
                    "tgt_text": g.tgt_text,
                }
                for g in result.groups
            ],
            "dropped_src": result.dropped_src,
            "dropped_tgt": result.dropped_tgt,
            "hit_rates": {"src": result.hit_rates.src, "tgt": result.hit_rates.tgt},
            "diagnostics": result.diagnostics,
        }
    )


def read_blocks(path, on_error: str = "raise") -> Iterator[BlockRecord]:
    for line_no, obj in _iter_lines(path, on_error):
        try:
            yield BlockRecord(
                obj["symbol"], (obj["en_range"][0], obj["en_range"][1]), obj["texts"]
            )
        except (KeyError, TypeError, IndexError) as exc:
            err = RecordError(path, line_no, f"bad block record: {exc!r}")
            if on_error == "raise":
                raise err from exc
            logger.warning("skipping record: %s", err)


def write_blocks(records: Iterable[BlockRecord], path) -> None:
    with _open_auto(path, "w") as fh:
        for rec in records:
            fh.write(
                _dump(
                    {
                        "symbol": rec.symbol,
                        "en_range": list(rec.en_range),
                        "texts": rec.texts,
                    }
                )
                + "\n"
            )


def aggregate_blocks(
    symbol: str,
    per_lang: dict[str, list[BilingualPairRecord]],
    en_paragraphs: list[str],
) -> list[BlockRecord]:
    """Merge bilingual alignments of one symbol into all-language blocks.

    Every language's groups are intervals over English paragraph indices
    (the shared coordinate system); overlapping intervals across languages
    are unioned into blocks. A block is emitted only when every
    participating language contributes to it; languages with no surviving
    groups are excluded with a diagnostic.
    """
    langs = sorted(lang for lang, recs in per_lang.items() if recs)
    for lang in sorted(per_lang.keys() - set(langs)):
        logger.warning("%s: language %s has no surviving groups", symbol, lang)
    if not langs:
        return []

    items = [
        (rec.en_range[0], rec.en_range[1], lang, rec)
        for lang in langs
        for rec in per_lang[lang]
    ]
    items.sort(key=lambda it: (it[0], it[1]))

    # chain-merge overlapping intervals into clusters
    clusters: list[dict] = []
    for start, end, lang, rec in items:
        if clusters and start <= clusters[-1]["end"]:
            cluster = clusters[-1]
            cluster["end"] = max(cluster["end"], end)
        else:
            cluster = {"start": start, "end": end, "records": []}
            clusters.append(cluster)
        cluster["records"].append((lang, rec))

    blocks = []
    for cluster in clusters:
        present = {lang for lang, _ in cluster["records"]}
        if present != set(langs):
            missing = sorted(set(langs) - present)
            logger.warning(
                "%s: block en[%d-%d] skipped, missing %s",
                symbol,
                cluster["start"],
                cluster["end"],
                ",".join(missing),
            )
            continue
        texts = {
            "en": " ".join(en_paragraphs[cluster["start"] : cluster["end"] + 1])
        }
        for lang in langs:
            parts = [
                rec.src_text
                for rec_lang, rec in sorted(
                    cluster["records"], key=lambda it: it[1].en_range
                )
                if rec_lang == lang
            ]
            texts[lang] = " ".join(parts)
        blocks.append(BlockRecord(symbol, (cluster["start"], cluster["end"]), texts))
    return blocks


_HAN_RANGES = (
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x20000, 0x2A6DF),
    (0x2A700, 0x2EBEF),
    (0x2F800, 0x2FA1F),
)


def _is_han(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _HAN_RANGES)


def count_tokens(text: str, lang: str) -> int:
    """Whitespace tokens; for zh, Han characters count individually.

    A zh whitespace piece containing Han characters contributes one token
    per Han character; pieces without any Han character count once.
    """
    if lang != "zh":
        return len(text.split())
    total = 0
    for piece in text.split():
        han = sum(1 for ch in piece if _is_han(ch))
        total += han if han else 1
    return total


@dataclass
class CorpusStats:
    files: dict[str, int]
    tokens: dict[str, int]


def corpus_stats(records: Iterable[FileLevelRecord]) -> CorpusStats:
    """Per-language counts of non-empty files and their tokens."""
    files = {lang: 0 for lang in LANG_KEYS}
    tokens = {lang: 0 for lang in LANG_KEYS}
    for rec in records:
        for lang in LANG_KEYS:
            text = rec.texts.get(lang, "")
            if text:
                files[lang] += 1
                tokens[lang] += count_tokens(text, lang)
    return CorpusStats(files, tokens)
