"""Pure-Python sparse LCS kernel.

Threshold method in the Hunt-Szymanski family, run as a backward sweep so
that every matching position pair (a, b) gets f(a, b) = the length of the
longest common subsequence that starts with that pair. A forward greedy
selection over those values then yields the unique maximum-length match
whose position-pair sequence is lexicographically smallest, i.e. every
common word is pinned to its earliest consistent occurrence on both sides.

Cost is O((R + N) log N) time and O(R + N) space, with R the number of
equal-token position pairs. The compiled kernel in _hs_cy is the same
algorithm; this module is the fallback and the reference for parity tests.
"""

from bisect import bisect_left


def hs_match_pairs(src_ids, tgt_ids, vocab_size):
    """Match two integer token streams.

    Returns (pairs, r_count) where pairs is the canonical LCS as a list of
    (src_pos, tgt_pos) tuples and r_count is the number of matching
    position pairs.
    """
    n = len(src_ids)
    m = len(tgt_ids)
    if n == 0 or m == 0:
        return [], 0

    occ = [None] * vocab_size
    for pos, tid in enumerate(tgt_ids):
        lst = occ[tid]
        if lst is None:
            occ[tid] = [pos]
        else:
            lst.append(pos)

    # neg_g[k] = -(largest tgt position starting a chain of length k) over
    # rows processed so far (rows are processed bottom-up); stored negated
    # so the non-increasing threshold array becomes bisect-friendly.
    # neg_g[0] is a sentinel below any negated position.
    neg_g = [-m]
    pair_a = []
    pair_b = []
    pair_f = []
    r_count = 0
    append_a = pair_a.append
    append_b = pair_b.append
    append_f = pair_f.append
    for a in range(n - 1, -1, -1):
        blist = occ[src_ids[a]]
        if not blist:
            continue
        r_count += len(blist)
        for b in blist:  # ascending keeps same-row updates invisible to queries
            # first level whose threshold position is <= b: chains of
            # length f-1 can be extended by a match at position b
            f = bisect_left(neg_g, -b, 1)
            if f == len(neg_g):
                neg_g.append(-b)
            elif -b < neg_g[f]:
                neg_g[f] = -b
            append_a(a)
            append_b(b)
            append_f(f)

    lcs_len = len(neg_g) - 1
    if lcs_len == 0:
        return [], r_count

    # bucket pairs by f; walking the generation order (a descending,
    # b ascending per row) in reverse makes every bucket sorted by
    # a ascending with b descending inside each a-run
    bucket_a = [[] for _ in range(lcs_len + 1)]
    bucket_b = [[] for _ in range(lcs_len + 1)]
    for idx in range(len(pair_a) - 1, -1, -1):
        f = pair_f[idx]
        bucket_a[f].append(pair_a[idx])
        bucket_b[f].append(pair_b[idx])

    # Greedy selection: at each level take the lexicographically smallest
    # pair dominating the previous choice. Within a bucket, b is
    # non-increasing across distinct a (strict domination between equal-f
    # pairs is impossible), so only the first feasible a-run needs checking.
    pairs = []
    min_a = 0
    min_b = 0
    for level in range(lcs_len, 0, -1):
        ba = bucket_a[level]
        bb = bucket_b[level]
        s = bisect_left(ba, min_a)
        a = ba[s]
        e = bisect_left(ba, a + 1, s)
        # b descending in the run: entries with b >= min_b form a prefix;
        # its last element is the smallest feasible b
        lo, hi = s, e
        while lo < hi:
            mid = (lo + hi) // 2
            if bb[mid] >= min_b:
                lo = mid + 1
            else:
                hi = mid
        b = bb[lo - 1]
        pairs.append((a, b))
        min_a = a + 1
        min_b = b + 1
    return pairs, r_count


def hs_match_tokens(src_surfaces, tgt_surfaces):
    """Match two surface-string streams, interning ids on the way."""
    vocab = {}
    intern = vocab.setdefault
    src_ids = [intern(s, len(vocab)) for s in src_surfaces]
    tgt_ids = [intern(s, len(vocab)) for s in tgt_surfaces]
    return hs_match_pairs(src_ids, tgt_ids, len(vocab))
