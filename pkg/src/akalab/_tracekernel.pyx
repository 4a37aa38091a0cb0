# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled trace validator kernel; mirrors ``_tracekernel_py``."""

from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

cdef enum:
    NS = 0
    PUAI = 1
    CUAI = 2
    FUAI = 3
    PNAI = 4
    CNAI = 5
    FNAI = 6


cdef inline void _init(int* st, int n_ids, int n_sess) noexcept nogil:
    cdef int k
    for k in range(3 * n_ids):
        st[k] = -1
    for k in range(n_sess):
        st[3 * n_ids + k] = 0


cdef inline bint _step(int* st, int n_ids, int kind, int ident, int j, int i) noexcept nogil:
    cdef int lk, lj, li, s, nxt
    cdef int* hn
    cdef bint entry, ok
    if kind <= FUAI:
        lk = st[ident]
        lj = st[n_ids + ident]
        li = st[2 * n_ids + ident]
        entry = lk < 0 or lj < j
        if kind == NS:
            ok = entry
        elif kind == PUAI:
            if i == 0:
                ok = entry
            elif i == 1:
                ok = entry or (lk == PUAI and lj == j and li == 0)
            else:
                ok = lk == PUAI and lj == j and li == 1
        elif kind == CUAI:
            if i == 0:
                ok = entry
            else:
                ok = lk == CUAI and lj == j and li == 0
        else:
            ok = lj == j and ((lk == PUAI and li == 2) or (lk == CUAI and li == 1))
        if ok:
            st[ident] = kind
            st[n_ids + ident] = j
            st[2 * n_ids + ident] = i
        return ok
    hn = st + 3 * n_ids
    if j > 0 and hn[j - 1] == 0:
        return False
    s = hn[j]
    nxt = -1
    if kind == PNAI:
        if i == 0 and s == 0:
            nxt = 1
        elif i == 1 and s == 1:
            nxt = 2
    elif kind == CNAI:
        if i == 0 and s == 0:
            nxt = 3
        elif i == 1 and s == 3:
            nxt = 4
    elif s == 2 or s == 4:
        nxt = 5
    if nxt < 0:
        return False
    hn[j] = nxt
    return True


def first_violation(rows, int n_ids, int n_sess):
    cdef int[:, ::1] r = rows
    cdef int n = r.shape[0]
    cdef int pos
    cdef int* st = <int*> malloc((3 * n_ids + n_sess + 1) * sizeof(int))
    if st == NULL:
        raise MemoryError()
    try:
        _init(st, n_ids, n_sess)
        for pos in range(n):
            if not _step(st, n_ids, r[pos, 0], r[pos, 1], r[pos, 2], r[pos, 3]):
                return pos
        return -1
    finally:
        free(st)


def sweep(table, alphabet, int n_ids, int n_sess, int max_len):
    cdef int[:, ::1] tab = table
    cdef int[:, ::1] alpha = alphabet
    cdef int n_letters = alpha.shape[0]
    cdef int width = 3 * n_ids + n_sess
    cdef int depth, a, nxt
    cdef bint ok_v
    cdef long long valid = 0, checks = 0, mismatches = 0
    cdef int* states = <int*> malloc((max_len + 1) * width * sizeof(int))
    cdef int* oracle = <int*> malloc((max_len + 1) * sizeof(int))
    cdef int* letter = <int*> malloc((max_len + 1) * sizeof(int))
    if states == NULL or oracle == NULL or letter == NULL:
        free(states); free(oracle); free(letter)
        raise MemoryError()
    first = None
    try:
        _init(states, n_ids, n_sess)
        oracle[0] = 0
        letter[0] = 0
        depth = 0
        while depth >= 0:
            if letter[depth] == n_letters:
                depth -= 1
                if depth >= 0:
                    letter[depth] += 1
                continue
            a = letter[depth]
            memcpy(states + (depth + 1) * width, states + depth * width, width * sizeof(int))
            ok_v = _step(states + (depth + 1) * width, n_ids,
                         alpha[a, 0], alpha[a, 1], alpha[a, 2], alpha[a, 3])
            nxt = tab[oracle[depth], a]
            checks += 1
            if ok_v != (nxt >= 0):
                mismatches += 1
                if first is None:
                    first = [letter[k] for k in range(depth + 1)]
            elif ok_v:
                valid += 1
                if depth + 1 < max_len:
                    depth += 1
                    oracle[depth] = nxt
                    letter[depth] = 0
                    continue
            letter[depth] += 1
        return valid, checks, mismatches, first
    finally:
        free(states)
        free(oracle)
        free(letter)
