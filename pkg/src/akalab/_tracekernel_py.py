"""Pure-Python trace validator kernel; same interface as the compiled one.

Actions are rows ``(kind, ident, session, index)``.  Kinds 0-3 are the
subscriber actions NS, PUAI, CUAI, FUAI and 4-6 the network actions PNAI,
CNAI, FNAI.  The validator state is a flat list: last kind, session and
index per identity, then one phase per network session.
"""

from __future__ import annotations

NS, PUAI, CUAI, FUAI, PNAI, CNAI, FNAI = range(7)


def initial_state(n_ids: int, n_sess: int) -> list[int]:
    return [-1] * (3 * n_ids) + [0] * n_sess


def step(st: list[int], n_ids: int, kind: int, ident: int, j: int, i: int) -> bool:
    """Advance ``st`` in place; False (and ``st`` untouched) if the action is illegal."""
    if kind <= FUAI:
        lk, lj, li = st[ident], st[n_ids + ident], st[2 * n_ids + ident]
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
            ok = entry if i == 0 else (lk == CUAI and lj == j and li == 0)
        else:
            ok = lj == j and ((lk == PUAI and li == 2) or (lk == CUAI and li == 1))
        if ok:
            st[ident], st[n_ids + ident], st[2 * n_ids + ident] = kind, j, i
        return ok
    base = 3 * n_ids
    if j > 0 and st[base + j - 1] == 0:
        return False
    s = st[base + j]
    if kind == PNAI:
        nxt = 1 if (i == 0 and s == 0) else 2 if (i == 1 and s == 1) else -1
    elif kind == CNAI:
        nxt = 3 if (i == 0 and s == 0) else 4 if (i == 1 and s == 3) else -1
    else:
        nxt = 5 if s in (2, 4) else -1
    if nxt < 0:
        return False
    st[base + j] = nxt
    return True


def first_violation(rows, n_ids: int, n_sess: int) -> int:
    """Index of the first illegal action, or -1 if the whole trace is valid."""
    st = initial_state(n_ids, n_sess)
    for pos, (kind, ident, j, i) in enumerate(rows):
        if not step(st, n_ids, int(kind), int(ident), int(j), int(i)):
            return pos
    return -1


def sweep(table, alphabet, n_ids: int, n_sess: int, max_len: int):
    """Walk every trace up to ``max_len`` that both deciders accept.

    At each node all one-letter extensions are decided by the validator and
    by ``table`` (oracle state x letter -> next state or -1).  Returns
    ``(valid, checks, mismatches, first_mismatch)`` where ``first_mismatch``
    is the letter sequence of the first disagreement or None.
    """
    table = [list(map(int, r)) for r in table]
    letters = [tuple(map(int, r)) for r in alphabet]
    valid = checks = mismatches = 0
    first = None
    stack = [(initial_state(n_ids, n_sess), 0, [])]
    while stack:
        st, o, path = stack.pop()
        row = table[o]
        for a, (kind, ident, j, i) in enumerate(letters):
            child = st.copy()
            ok_v = step(child, n_ids, kind, ident, j, i)
            nxt = row[a]
            checks += 1
            if ok_v != (nxt >= 0):
                mismatches += 1
                if first is None:
                    first = path + [a]
                continue
            if ok_v:
                valid += 1
                if len(path) + 1 < max_len:
                    stack.append((child, nxt, path + [a]))
    return valid, checks, mismatches, first
