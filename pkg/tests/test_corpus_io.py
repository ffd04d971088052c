import json
import random

import pytest

from paralign.corpus_io import (
    LANG_KEYS,
    BilingualPairRecord,
    BlockRecord,
    FileLevelRecord,
    RecordError,
    aggregate_blocks,
    alignment_to_json,
    bilingual_records,
    corpus_stats,
    count_tokens,
    read_bilingual,
    read_blocks,
    read_file_level,
    write_bilingual,
    write_blocks,
    write_file_level,
)
from paralign.gapa import align_documents
from paralign.textnorm import Document


def pair(symbol, lang, pid, en_range, src_text="texte", en_text="text"):
    return BilingualPairRecord(
        symbol, lang, pid, src_text, en_text, 0.8, 0.9, en_range, en_range
    )


def random_file_record(rng, i):
    texts = {}
    for lang in LANG_KEYS:
        if rng.random() < 0.2:
            texts[lang] = ""  # missing language: gap filled with empty string
        else:
            texts[lang] = " ".join(f"w{rng.randrange(50)}" for _ in range(rng.randint(1, 30)))
    return FileLevelRecord(f"SYM/{i}", texts)


class TestFileLevelRoundTrip:
    def test_missing_de_key_becomes_empty(self):
        rec = FileLevelRecord("S", {"en": "hello"})
        assert rec.texts["de"] == ""
        assert set(rec.texts) == set(LANG_KEYS)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert list(read_file_level(path)) == []

    def test_round_trip_many(self, tmp_path):
        rng = random.Random(0)
        records = [random_file_record(rng, i) for i in range(500)]
        path = tmp_path / "corpus.jsonl"
        write_file_level(records, path)
        assert list(read_file_level(path)) == records

    def test_gzip_round_trip(self, tmp_path):
        rng = random.Random(1)
        records = [random_file_record(rng, i) for i in range(20)]
        path = tmp_path / "corpus.jsonl.gz"
        write_file_level(records, path)
        assert path.read_bytes()[:2] == b"\x1f\x8b"
        assert list(read_file_level(path)) == records

    def test_malformed_line_raises_with_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"symbol": "a", "en": "x"}\nnot json\n')
        with pytest.raises(RecordError) as err:
            list(read_file_level(path))
        assert err.value.line_no == 2

    def test_malformed_line_skip_mode(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"symbol": "a", "en": "x"}\nnot json\n{"symbol": "b"}\n')
        records = list(read_file_level(path, on_error="skip"))
        assert [r.symbol for r in records] == ["a", "b"]


class TestBilingualRecords:
    def test_round_trip(self, tmp_path):
        records = [pair("S", "fr", f"S:fr:{i}", (i, i)) for i in range(200)]
        path = tmp_path / "pairs.jsonl"
        write_bilingual(records, path)
        assert list(read_bilingual(path)) == records

    def test_one_record_per_group_with_min_rates(self):
        src = Document.from_paragraph_texts(
            "S", "en", ["alpha beta", "gamma delta", "epsilon zeta"]
        )
        tgt = Document.from_paragraph_texts(
            "S", "en", ["alpha beta", "gamma delta", "epsilon zeta"]
        )
        result = align_documents(src, tgt, 0.3)
        original = ["un deux", "trois quatre", "cinq six"]
        records = bilingual_records(result, "S", "fr", original, [p.text for p in tgt.paragraphs])
        assert len(records) == 3
        assert [r.src_text for r in records] == original
        assert records[0].pair_id == "S:fr:0"
        assert records[0].hit_rate_en == 1.0

    def test_dropped_paragraphs_emit_no_record(self):
        src = Document.from_paragraph_texts(
            "S", "en", ["alpha beta gamma", "qxjz qwpk qmvr", "delta epsilon zeta"]
        )
        tgt = Document.from_paragraph_texts(
            "S", "en", ["alpha beta gamma", "delta epsilon zeta"]
        )
        result = align_documents(src, tgt, 0.3)
        records = bilingual_records(
            result, "S", "fr", ["a", "b", "c"], [p.text for p in tgt.paragraphs]
        )
        assert len(records) == 2
        assert result.dropped_src == [1]

    def test_min_member_rate_serialized(self):
        # two source paragraphs merging into one English paragraph, one of
        # them only half-matched: the record carries the minimum
        src = Document.from_paragraph_texts(
            "S", "en", ["alpha beta", "gamma qqqq zzzz xxxx"]
        )
        tgt = Document.from_paragraph_texts("S", "en", ["alpha beta gamma"])
        result = align_documents(src, tgt, 0.0)
        records = bilingual_records(
            result, "S", "fr", ["p1", "p2"], [p.text for p in tgt.paragraphs]
        )
        assert len(records) == 1
        assert records[0].hit_rate_src == pytest.approx(5 / 17)


class TestAlignmentJson:
    def test_deterministic_and_parseable(self):
        src = Document.from_paragraph_texts("S", "en", ["alpha beta", "gamma"])
        tgt = Document.from_paragraph_texts("S", "en", ["alpha beta gamma"])
        result = align_documents(src, tgt, 0.3)
        blob = alignment_to_json(result)
        assert blob == alignment_to_json(result)
        parsed = json.loads(blob)
        assert parsed["h_c"] == 0.3
        assert len(parsed["groups"]) == 1


class TestBlocks:
    def test_round_trip(self, tmp_path):
        records = [
            BlockRecord(f"S{i}", (i, i + 1), {"en": "a b", "fr": "c d", "zh": "中 文"})
            for i in range(200)
        ]
        path = tmp_path / "blocks.jsonl"
        write_blocks(records, path)
        assert list(read_blocks(path)) == records

    def test_identical_groups_pass_through(self):
        per_lang = {
            "fr": [pair("S", "fr", "a", (0, 0)), pair("S", "fr", "b", (1, 1))],
            "zh": [pair("S", "zh", "c", (0, 0)), pair("S", "zh", "d", (1, 1))],
        }
        blocks = aggregate_blocks("S", per_lang, ["en zero", "en one"])
        assert [b.en_range for b in blocks] == [(0, 0), (1, 1)]
        assert blocks[0].texts["en"] == "en zero"
        assert set(blocks[0].texts) == {"en", "fr", "zh"}

    def test_overlapping_intervals_union(self):
        per_lang = {
            "fr": [pair("S", "fr", "a", (0, 1), src_text="fr01")],
            "zh": [pair("S", "zh", "b", (1, 2), src_text="zh12")],
        }
        blocks = aggregate_blocks("S", per_lang, ["e0", "e1", "e2"])
        assert len(blocks) == 1
        assert blocks[0].en_range == (0, 2)
        assert blocks[0].texts == {"en": "e0 e1 e2", "fr": "fr01", "zh": "zh12"}

    def test_block_missing_language_not_emitted(self):
        per_lang = {
            "fr": [pair("S", "fr", "a", (0, 0)), pair("S", "fr", "b", (2, 2))],
            "zh": [pair("S", "zh", "c", (0, 0))],
        }
        blocks = aggregate_blocks("S", per_lang, ["e0", "e1", "e2"])
        assert [b.en_range for b in blocks] == [(0, 0)]

    def test_language_without_groups_excluded(self):
        per_lang = {"fr": [pair("S", "fr", "a", (0, 0))], "zh": []}
        blocks = aggregate_blocks("S", per_lang, ["e0"])
        assert len(blocks) == 1
        assert set(blocks[0].texts) == {"en", "fr"}

    def test_multiple_groups_one_language_concatenated(self):
        per_lang = {
            "fr": [
                pair("S", "fr", "a", (0, 0), src_text="fr0"),
                pair("S", "fr", "b", (1, 1), src_text="fr1"),
            ],
            "zh": [pair("S", "zh", "c", (0, 1), src_text="zh01")],
        }
        blocks = aggregate_blocks("S", per_lang, ["e0", "e1"])
        assert len(blocks) == 1
        assert blocks[0].texts["fr"] == "fr0 fr1"

    def test_random_intervals_disjoint_ordered_containing(self):
        rng = random.Random(6)
        for _ in range(50):
            n_en = rng.randint(3, 20)
            per_lang = {}
            for lang in ("fr", "zh", "ru"):
                records = []
                pos = 0
                k = 0
                while pos < n_en:
                    end = min(n_en - 1, pos + rng.randint(0, 3))
                    records.append(pair("S", lang, f"{lang}{k}", (pos, end)))
                    pos = end + 1 + rng.randint(0, 2)
                    k += 1
                per_lang[lang] = records
            en_paras = [f"e{i}" for i in range(n_en)]
            blocks = aggregate_blocks("S", per_lang, en_paras)
            # pairwise disjoint and ordered
            for prev, cur in zip(blocks, blocks[1:]):
                assert prev.en_range[1] < cur.en_range[0]
            # every group interval sits inside at most one block, entirely
            spans = [b.en_range for b in blocks]
            for records in per_lang.values():
                for rec in records:
                    holders = [
                        s for s in spans
                        if s[0] <= rec.en_range[0] and rec.en_range[1] <= s[1]
                    ]
                    partial = [
                        s for s in spans
                        if not (rec.en_range[1] < s[0] or s[1] < rec.en_range[0])
                    ]
                    assert len(holders) == len(partial) <= 1


class TestCorpusStats:
    def test_simple_token_count(self):
        stats = corpus_stats([FileLevelRecord("S", {"en": "a b c"})])
        assert stats.tokens["en"] == 3
        assert stats.files["en"] == 1
        assert stats.files["fr"] == 0

    def test_empty_corpus(self):
        stats = corpus_stats([])
        assert all(v == 0 for v in stats.files.values())
        assert all(v == 0 for v in stats.tokens.values())

    def test_zh_counts_han_characters(self):
        assert count_tokens("中文 文件", "zh") == 4
        assert count_tokens("abc 中文", "zh") == 3  # latin piece counts once
        assert count_tokens("中文 abc", "en") == 2

    def test_synthetic_corpus_matches_hand_count(self):
        records = [
            FileLevelRecord("A", {"en": "one two", "zh": "中文 报告", "fr": ""}),
            FileLevelRecord("B", {"en": "three", "zh": "", "fr": "quatre cinq"}),
        ]
        stats = corpus_stats(records)
        assert stats.files == {"ar": 0, "de": 0, "en": 2, "es": 0, "fr": 1, "ru": 0, "zh": 1}
        assert stats.tokens["en"] == 3
        assert stats.tokens["zh"] == 4
        assert stats.tokens["fr"] == 2
