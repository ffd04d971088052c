# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sparse LCS kernel; algorithm identical to _hs_py.

Backward threshold sweep assigning every matching pair its best chain
length, then a greedy forward selection of the lexicographically smallest
maximum-length chain. Occurrence lists are kept in CSR form.

hs_match_tokens also performs the surface-to-id interning in C, which is
where a document-scale call spends most of its time. Internal arrays are
32-bit: streams beyond 2^31 tokens are far past the design envelope.
"""

from cpython.dict cimport PyDict_GetItem, PyDict_SetItem
from cpython.ref cimport PyObject
from libc.stdint cimport int32_t
from libc.stdlib cimport free, malloc


cdef inline int32_t _query_level(int32_t *g, int32_t glen, int32_t b) nogil:
    # first level with g[level] <= b; g is non-increasing, g[0] a sentinel
    cdef int32_t lo = 1
    cdef int32_t hi = glen
    cdef int32_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if g[mid] > b:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef Py_ssize_t _intern(list surfaces, int32_t *out, dict vocab,
                        Py_ssize_t next_id) except -1:
    cdef Py_ssize_t i
    cdef Py_ssize_t n = len(surfaces)
    cdef PyObject *hit
    cdef object s
    for i in range(n):
        s = surfaces[i]
        hit = PyDict_GetItem(vocab, s)
        if hit == NULL:
            PyDict_SetItem(vocab, s, next_id)
            out[i] = <int32_t> next_id
            next_id += 1
        else:
            out[i] = <int32_t> <Py_ssize_t> <object> hit
    return next_id


cdef _match(int32_t *src, int32_t *tgt, Py_ssize_t n, Py_ssize_t m,
            Py_ssize_t vocab_size):
    """Core matcher; takes ownership of src and tgt."""
    cdef int32_t *occ_cnt = <int32_t *> malloc((vocab_size + 1) * sizeof(int32_t))
    cdef int32_t *occ_pos = <int32_t *> malloc(m * sizeof(int32_t))
    cdef int32_t *fill = <int32_t *> malloc(vocab_size * sizeof(int32_t))
    if occ_cnt == NULL or occ_pos == NULL or fill == NULL:
        free(src); free(tgt); free(occ_cnt); free(occ_pos); free(fill)
        raise MemoryError()

    cdef Py_ssize_t i, a
    cdef int32_t b, tid, f, lo, hi, mid

    # CSR occurrence lists over the target stream, positions ascending
    for i in range(vocab_size + 1):
        occ_cnt[i] = 0
    for i in range(m):
        occ_cnt[tgt[i] + 1] += 1
    for i in range(vocab_size):
        occ_cnt[i + 1] += occ_cnt[i]
    for i in range(vocab_size):
        fill[i] = occ_cnt[i]
    for i in range(m):
        tid = tgt[i]
        occ_pos[fill[tid]] = <int32_t> i
        fill[tid] += 1
    free(fill)

    cdef Py_ssize_t r_count = 0
    for a in range(n):
        r_count += occ_cnt[src[a] + 1] - occ_cnt[src[a]]

    cdef int32_t *pair_a = NULL
    cdef int32_t *pair_b = NULL
    cdef int32_t *pair_f = NULL
    cdef int32_t *g = NULL
    cdef Py_ssize_t cap = (n if n < m else m) + 2
    if r_count > 0:
        pair_a = <int32_t *> malloc(r_count * sizeof(int32_t))
        pair_b = <int32_t *> malloc(r_count * sizeof(int32_t))
        pair_f = <int32_t *> malloc(r_count * sizeof(int32_t))
        g = <int32_t *> malloc(cap * sizeof(int32_t))
        if pair_a == NULL or pair_b == NULL or pair_f == NULL or g == NULL:
            free(src); free(tgt); free(occ_cnt); free(occ_pos)
            free(pair_a); free(pair_b); free(pair_f); free(g)
            raise MemoryError()

    cdef int32_t glen = 1
    cdef Py_ssize_t npairs = 0
    cdef Py_ssize_t start, end, k
    if r_count > 0:
        g[0] = <int32_t> m  # sentinel above any target position
        for a in range(n - 1, -1, -1):
            tid = src[a]
            start = occ_cnt[tid]
            end = occ_cnt[tid + 1]
            for k in range(start, end):
                b = occ_pos[k]
                f = _query_level(g, glen, b)
                if f == glen:
                    g[glen] = b
                    glen += 1
                elif b > g[f]:
                    g[f] = b
                pair_a[npairs] = <int32_t> a
                pair_b[npairs] = b
                pair_f[npairs] = f
                npairs += 1

    cdef Py_ssize_t lcs_len = glen - 1
    free(src); free(tgt); free(occ_cnt); free(occ_pos); free(g)
    if lcs_len == 0:
        free(pair_a); free(pair_b); free(pair_f)
        return [], r_count

    # counting sort of pairs by f; reverse traversal of the generation
    # order (a descending, b ascending per row) yields buckets sorted by
    # (a ascending, b descending within a row)
    cdef int32_t *bucket_off = <int32_t *> malloc((lcs_len + 2) * sizeof(int32_t))
    cdef int32_t *sorted_a = <int32_t *> malloc(npairs * sizeof(int32_t))
    cdef int32_t *sorted_b = <int32_t *> malloc(npairs * sizeof(int32_t))
    cdef int32_t *cursor = <int32_t *> malloc((lcs_len + 2) * sizeof(int32_t))
    if bucket_off == NULL or sorted_a == NULL or sorted_b == NULL or cursor == NULL:
        free(pair_a); free(pair_b); free(pair_f)
        free(bucket_off); free(sorted_a); free(sorted_b); free(cursor)
        raise MemoryError()
    for i in range(lcs_len + 2):
        bucket_off[i] = 0
    for i in range(npairs):
        bucket_off[pair_f[i] + 1] += 1
    for i in range(lcs_len + 1):
        bucket_off[i + 1] += bucket_off[i]
    for i in range(lcs_len + 1):
        cursor[i] = bucket_off[i]
    for i in range(npairs - 1, -1, -1):
        f = pair_f[i]
        sorted_a[cursor[f]] = pair_a[i]
        sorted_b[cursor[f]] = pair_b[i]
        cursor[f] += 1
    free(pair_a); free(pair_b); free(pair_f); free(cursor)

    # greedy selection of the lexicographically smallest chain
    cdef int32_t min_a = 0
    cdef int32_t min_b = 0
    cdef int32_t level, s, e, run_end, t, sel_a, sel_b
    out = []
    for level in range(lcs_len, 0, -1):
        s = bucket_off[level]
        e = bucket_off[level + 1]
        # first entry with a >= min_a (a ascending within the bucket)
        lo = s; hi = e
        while lo < hi:
            mid = (lo + hi) >> 1
            if sorted_a[mid] < min_a:
                lo = mid + 1
            else:
                hi = mid
        if lo >= e:
            free(bucket_off); free(sorted_a); free(sorted_b)
            raise RuntimeError("selection invariant violated: empty level")
        s = lo
        sel_a = sorted_a[s]
        # end of this a-run
        lo = s; hi = e
        while lo < hi:
            mid = (lo + hi) >> 1
            if sorted_a[mid] <= sel_a:
                lo = mid + 1
            else:
                hi = mid
        run_end = lo
        # b is descending within the run: valid entries (b >= min_b) form a
        # prefix; take its last element, the smallest feasible b
        lo = s; hi = run_end
        while lo < hi:
            mid = (lo + hi) >> 1
            if sorted_b[mid] >= min_b:
                lo = mid + 1
            else:
                hi = mid
        t = lo - 1
        if t < s:
            free(bucket_off); free(sorted_a); free(sorted_b)
            raise RuntimeError("selection invariant violated: no feasible pair")
        sel_b = sorted_b[t]
        out.append((sel_a, sel_b))
        min_a = sel_a + 1
        min_b = sel_b + 1

    free(bucket_off); free(sorted_a); free(sorted_b)
    return out, r_count


def hs_match_pairs(src_ids, tgt_ids, Py_ssize_t vocab_size):
    """Match two integer token streams; see _hs_py.hs_match_pairs."""
    cdef Py_ssize_t n = len(src_ids)
    cdef Py_ssize_t m = len(tgt_ids)
    if n == 0 or m == 0:
        return [], 0
    cdef int32_t *src = <int32_t *> malloc(n * sizeof(int32_t))
    cdef int32_t *tgt = <int32_t *> malloc(m * sizeof(int32_t))
    if src == NULL or tgt == NULL:
        free(src); free(tgt)
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        src[i] = <int32_t> src_ids[i]
    for i in range(m):
        tgt[i] = <int32_t> tgt_ids[i]
    return _match(src, tgt, n, m, vocab_size)


def hs_match_tokens(list src_surfaces, list tgt_surfaces):
    """Match two surface-string streams, interning ids internally."""
    cdef Py_ssize_t n = len(src_surfaces)
    cdef Py_ssize_t m = len(tgt_surfaces)
    if n == 0 or m == 0:
        return [], 0
    cdef int32_t *src = <int32_t *> malloc(n * sizeof(int32_t))
    cdef int32_t *tgt = <int32_t *> malloc(m * sizeof(int32_t))
    if src == NULL or tgt == NULL:
        free(src); free(tgt)
        raise MemoryError()
    cdef dict vocab = {}
    cdef Py_ssize_t vocab_size
    try:
        vocab_size = _intern(src_surfaces, src, vocab, 0)
        vocab_size = _intern(tgt_surfaces, tgt, vocab, vocab_size)
    except BaseException:
        free(src); free(tgt)
        raise
    return _match(src, tgt, n, m, vocab_size)
