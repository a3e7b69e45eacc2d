"""Compiled inner loops shared by the euler, mcmc and stats modules.

All routines use 0-based market/period indices but keep state and action
ids as stored in the panel (1-based, with 0 as the separator symbol in
augmented sequences). Random draws come from numba's own generator, which
callers seed through :func:`seed` at the start of every run.
"""
import numpy as np
from numba import njit

OK = 0
REJECTION_CAP = 1
CLASS_MISMATCH = 2


@njit(cache=True)
def seed(value):
    np.random.seed(value)


@njit(cache=True)
def randint(k):
    return np.random.randint(0, k)


@njit(cache=True)
def euler_into(seq, out, alphabet):
    """Write a uniform draw from the arrangements of ``seq`` into ``out``.

    ``seq`` is a sequence over ``0..alphabet-1``. The draw keeps the first
    element and the multiset of consecutive pairs. A random arborescence of
    last-exit edges is grown by a backward walk on the wrap-closed graph,
    then the remaining out-edges of every vertex are used in uniform order.
    """
    V = seq.shape[0]
    occ_count = np.zeros(alphabet, np.int64)
    for p in range(V):
        occ_count[seq[p]] += 1

    occ_start = np.zeros(alphabet + 1, np.int64)
    out_start = np.zeros(alphabet + 1, np.int64)
    last = seq[V - 1]
    for x in range(alphabet):
        occ_start[x + 1] = occ_start[x] + occ_count[x]
        deg = occ_count[x] - 1 if x == last else occ_count[x]
        out_start[x + 1] = out_start[x] + deg

    # positions of each symbol, and targets of each symbol's path edges
    occ_pos = np.empty(V, np.int64)
    out_tgt = np.empty(max(V - 1, 1), np.int64)
    fill_occ = occ_start[:alphabet].copy()
    fill_out = out_start[:alphabet].copy()
    for p in range(V):
        x = seq[p]
        occ_pos[fill_occ[x]] = p
        fill_occ[x] += 1
        if p < V - 1:
            out_tgt[fill_out[x]] = seq[p + 1]
            fill_out[x] += 1

    # backward walk from the final symbol; entering a vertex for the first
    # time along x -> cur reserves x -> cur as the last exit from x
    visited = np.zeros(alphabet, np.bool_)
    reserved = np.full(alphabet, -1, np.int64)
    remaining = -1
    for x in range(alphabet):
        if occ_count[x] > 0:
            remaining += 1
    cur = last
    visited[cur] = True
    while remaining > 0:
        j = occ_pos[occ_start[cur] + np.random.randint(0, occ_count[cur])]
        prev = seq[j - 1] if j > 0 else seq[V - 1]
        if not visited[prev]:
            visited[prev] = True
            reserved[prev] = cur
            remaining -= 1
        cur = prev

    out_len = np.empty(alphabet, np.int64)
    for x in range(alphabet):
        b = out_start[x]
        L = out_start[x + 1] - b
        r = reserved[x]
        if r >= 0:
            for q in range(b, b + L):
                if out_tgt[q] == r:
                    out_tgt[q] = out_tgt[b + L - 1]
                    out_tgt[b + L - 1] = r
                    break
            L -= 1
        out_len[x] = L

    out[0] = seq[0]
    cur = seq[0]
    for v in range(1, V):
        L = out_len[cur]
        if L > 0:
            b = out_start[cur]
            q = b + np.random.randint(0, L)
            nxt = out_tgt[q]
            out_tgt[q] = out_tgt[b + L - 1]
            out_tgt[b + L - 1] = nxt
            out_len[cur] = L - 1
        else:
            nxt = reserved[cur]
            reserved[cur] = -1
        out[v] = nxt
        cur = nxt


@njit(cache=True)
def euler_batch(seq, alphabet, size, rng_seed):
    np.random.seed(rng_seed)
    out = np.empty((size, seq.shape[0]), np.int64)
    for r in range(size):
        euler_into(seq, out[r], alphabet)
    return out


@njit(cache=True)
def resample_states_into(S_prev, S_new, i1, i2, alphabet, cap):
    """State step for market pair ``(i1, i2)``; returns a status code.

    For distinct markets the two paths are joined with separators as
    ``path1, 0, path2, 0`` and redrawn until the separator lands right
    after the first T entries. Every other market is redrawn on its own.
    """
    n, T = S_prev.shape
    if i1 != i2:
        xi = np.empty(2 * T + 2, np.int64)
        buf = np.empty(2 * T + 2, np.int64)
        for t in range(T):
            xi[t] = S_prev[i1, t]
            xi[T + 1 + t] = S_prev[i2, t]
        xi[T] = 0
        xi[2 * T + 1] = 0
        tries = 0
        while True:
            euler_into(xi, buf, alphabet)
            if buf[T] == 0:
                break
            tries += 1
            if tries >= cap:
                return REJECTION_CAP
        for t in range(T):
            S_new[i1, t] = buf[t]
            S_new[i2, t] = buf[T + 1 + t]
    for i in range(n):
        if i1 != i2 and (i == i1 or i == i2):
            continue
        euler_into(S_prev[i], S_new[i], alphabet)
    return OK


@njit(cache=True)
def _class_code(S, i, t, m):
    T = S.shape[1]
    if t < T - 1:
        return (S[i, t] - 1) * m + (S[i, t + 1] - 1)
    return m * m + (S[i, t] - 1)


@njit(cache=True)
def resample_actions_into(S_prev, A_prev, S_new, A_new, m):
    """Permute actions within transition classes ``(s, s')`` and terminal
    classes ``s``, moving them from their old positions onto the new ones.
    ``m`` is the state count."""
    n, T = S_prev.shape
    nclass = m * m + m
    counts = np.zeros(nclass, np.int64)
    new_counts = np.zeros(nclass, np.int64)
    for i in range(n):
        for t in range(T):
            counts[_class_code(S_prev, i, t, m)] += 1
            new_counts[_class_code(S_new, i, t, m)] += 1
    for c in range(nclass):
        if counts[c] != new_counts[c]:
            return CLASS_MISMATCH
    start = np.zeros(nclass + 1, np.int64)
    for c in range(nclass):
        start[c + 1] = start[c] + counts[c]
    fill = start[:nclass].copy()
    pool = np.empty(n * T, np.int64)
    for i in range(n):
        for t in range(T):
            c = _class_code(S_prev, i, t, m)
            pool[fill[c]] = A_prev[i, t]
            fill[c] += 1
    for c in range(nclass):
        b = start[c]
        for L in range(counts[c], 1, -1):
            j = np.random.randint(0, L)
            tmp = pool[b + L - 1]
            pool[b + L - 1] = pool[b + j]
            pool[b + j] = tmp
    fill = start[:nclass].copy()
    for i in range(n):
        for t in range(T):
            c = _class_code(S_new, i, t, m)
            A_new[i, t] = pool[fill[c]]
            fill[c] += 1
    return OK


@njit(cache=True)
def step(S, A, S_tmp, A_tmp, m, cap):
    """One full chain transition, in place on ``S`` and ``A``.

    Draw order: the ordered market pair, then states, then actions.
    """
    n = S.shape[0]
    i1 = np.random.randint(0, n)
    i2 = np.random.randint(0, n)
    status = resample_states_into(S, S_tmp, i1, i2, m + 1, cap)
    if status != OK:
        return status
    status = resample_actions_into(S, A, S_tmp, A_tmp, m)
    if status != OK:
        return status
    S[:, :] = S_tmp
    A[:, :] = A_tmp
    return OK


@njit(cache=True)
def seeded_step(S, A, m, cap, rng_seed):
    np.random.seed(rng_seed)
    return step(S, A, np.empty_like(S), np.empty_like(A), m, cap)


@njit(cache=True)
def seeded_states(S_prev, i1, i2, m, cap, rng_seed):
    np.random.seed(rng_seed)
    S_new = np.empty_like(S_prev)
    status = resample_states_into(S_prev, S_new, i1, i2, m + 1, cap)
    return S_new, status


@njit(cache=True)
def seeded_actions(S_prev, A_prev, S_new, m, rng_seed):
    np.random.seed(rng_seed)
    A_new = np.empty_like(A_prev)
    status = resample_actions_into(S_prev, A_prev, S_new, A_new, m)
    return A_new, status


@njit(cache=True)
def taus(S, A, m_states, m_actions, out):
    """Fill ``out[0]`` with tau1 and ``out[1]`` with tau2.

    Terms with a zero pooled probability contribute nothing, as do the
    ``0 log 0`` terms of tau2.
    """
    n, T = S.shape
    pooled = np.zeros((m_states, m_actions), np.int64)
    pooled_visits = np.zeros(m_states, np.int64)
    market = np.zeros((m_states, m_actions), np.int64)
    visits = np.zeros(m_states, np.int64)
    for i in range(n):
        for t in range(T):
            pooled[S[i, t] - 1, A[i, t] - 1] += 1
            pooled_visits[S[i, t] - 1] += 1
    t1 = 0.0
    t2 = 0.0
    for i in range(n):
        market[:, :] = 0
        visits[:] = 0
        for t in range(T):
            market[S[i, t] - 1, A[i, t] - 1] += 1
            visits[S[i, t] - 1] += 1
        for s in range(m_states):
            v = visits[s]
            if v == 0:
                continue
            for a in range(m_actions):
                c = pooled[s, a]
                if c == 0:
                    continue
                pooled_p = c / pooled_visits[s]
                p = market[s, a] / v
                d = p - pooled_p
                t1 += d * d * v / pooled_p
                if market[s, a] > 0:
                    t2 += p * np.log(p / pooled_p) * v
    out[0] = t1
    out[1] = 2.0 * t2


@njit(cache=True)
def run_chain(S0, A0, m_states, m_actions, K, cap, rng_seed, which):
    """Run K chain states (the first is the input itself) and record the
    builtin statistics selected by ``which`` (0 = tau1, 1 = tau2).

    Returns ``(values, status)``; on failure ``values`` is truncated.
    """
    np.random.seed(rng_seed)
    S = S0.copy()
    A = A0.copy()
    S_tmp = np.empty_like(S)
    A_tmp = np.empty_like(A)
    nstat = which.shape[0]
    values = np.empty((K, nstat))
    both = np.empty(2)
    for k in range(K):
        if k > 0:
            status = step(S, A, S_tmp, A_tmp, m_states, cap)
            if status != OK:
                return values[:k], status
        taus(S, A, m_states, m_actions, both)
        for j in range(nstat):
            values[k, j] = both[which[j]]
    return values, OK
