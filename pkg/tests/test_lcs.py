import random

import pytest

from paralign.lcs import (
    ORACLE_CELL_CAP,
    FlatToken,
    LcsStats,
    OracleTooLarge,
    _hs_py,
    available_kernels,
    flatten_document,
    lcs_dp_oracle,
    lcs_hunt_szymanski,
)
from paralign.textnorm import Document

from .synth import assert_valid_common_subsequence


def toks(words):
    if isinstance(words, str):
        words = words.split()
    return [FlatToken(w, sum(ch.isalpha() for ch in w), 0, i) for i, w in enumerate(words)]


def random_stream(rng, n, alphabet):
    return toks([f"w{rng.randrange(alphabet)}" for _ in range(n)])


class TestHuntSzymanski:
    def test_identity(self):
        pairs, stats = lcs_hunt_szymanski(toks("a b c"), toks("a b c"))
        assert [(p.src_pos, p.tgt_pos) for p in pairs] == [(0, 0), (1, 1), (2, 2)]
        assert stats == LcsStats(3, 3, 3, 3)

    def test_spec_cross_example(self):
        pairs, stats = lcs_hunt_szymanski(toks("a x b"), toks("b a b"))
        assert stats.lcs_len == 2
        assert [(p.src_pos, p.tgt_pos) for p in pairs] == [(0, 1), (2, 2)]

    def test_empty_either_side(self):
        assert lcs_hunt_szymanski([], toks("a"))[0] == []
        assert lcs_hunt_szymanski(toks("a"), [])[0] == []

    def test_no_common_tokens(self):
        pairs, stats = lcs_hunt_szymanski(toks("a b"), toks("c d"))
        assert pairs == []
        assert stats.r == 0

    def test_r_counts_all_matching_position_pairs(self):
        _, stats = lcs_hunt_szymanski(toks("a a"), toks("a a a"))
        assert stats.r == 6
        assert stats.lcs_len == 2

    def test_earliest_occurrence_tie_break(self):
        # both (0,1) and (1,0) give length 1; the lexicographically
        # smallest pair sequence wins
        pairs, _ = lcs_hunt_szymanski(toks("b a"), toks("a b"))
        assert [(p.src_pos, p.tgt_pos) for p in pairs] == [(0, 1)]


class TestDpOracle:
    def test_matches_hs_on_trivial(self):
        a, b = toks("a b c"), toks("a b c")
        assert lcs_dp_oracle(a, b) == lcs_hunt_szymanski(a, b)

    def test_empty(self):
        pairs, stats = lcs_dp_oracle([], toks("a"))
        assert pairs == [] and stats.lcs_len == 0

    def test_cell_cap(self):
        big = toks(["x"] * 2001)
        with pytest.raises(OracleTooLarge):
            lcs_dp_oracle(big, big)
        assert 2001 * 2001 > ORACLE_CELL_CAP


class TestEquivalence:
    def test_seeded_random_trials(self):
        rng = random.Random(42)
        for trial in range(400):
            n = rng.randint(0, 120)
            m = rng.randint(0, 120)
            alphabet = rng.choice([2, 5, 10, 50])
            a = random_stream(rng, n, alphabet)
            b = random_stream(rng, m, alphabet)
            hs_pairs, hs_stats = lcs_hunt_szymanski(a, b)
            dp_pairs, dp_stats = lcs_dp_oracle(a, b)
            assert hs_stats == dp_stats, f"trial {trial}"
            assert hs_pairs == dp_pairs, f"trial {trial}"
            assert_valid_common_subsequence(hs_pairs, a, b)

    def test_length_symmetry(self):
        rng = random.Random(43)
        for _ in range(100):
            a = random_stream(rng, rng.randint(0, 60), 5)
            b = random_stream(rng, rng.randint(0, 60), 5)
            ab = lcs_hunt_szymanski(a, b)[1].lcs_len
            ba = lcs_hunt_szymanski(b, a)[1].lcs_len
            assert ab == ba

    def test_kernel_parity(self):
        kernels = available_kernels()
        rng = random.Random(44)
        for _ in range(200):
            n, m = rng.randint(0, 80), rng.randint(0, 80)
            alphabet = rng.choice([2, 4, 16])
            src = [rng.randrange(alphabet) for _ in range(n)]
            tgt = [rng.randrange(alphabet) for _ in range(m)]
            results = {
                name: kernel(src, tgt, alphabet) for name, kernel in kernels.items()
            }
            baseline = results["python"]
            for name, got in results.items():
                assert list(got[0]) == list(baseline[0]), name
                assert got[1] == baseline[1], name

    def test_pure_python_kernel_directly(self):
        pairs, r = _hs_py.hs_match_pairs([0, 1, 2], [0, 1, 2], 3)
        assert pairs == [(0, 0), (1, 1), (2, 2)]
        assert r == 3


class TestFlattenDocument:
    def test_para_and_token_indices(self):
        doc = Document.from_text("S", "en", "aa bb\n\ncc")
        flat = flatten_document(doc)
        assert [(t.surface, t.para_index, t.token_index) for t in flat] == [
            ("aa", 0, 0),
            ("bb", 0, 1),
            ("cc", 1, 2),
        ]

    def test_para_index_non_decreasing(self):
        doc = Document.from_text("S", "en", "a b c\n\nd e\n\nf")
        flat = flatten_document(doc)
        indices = [t.para_index for t in flat]
        assert indices == sorted(indices)
        assert [t.token_index for t in flat] == list(range(len(flat)))
