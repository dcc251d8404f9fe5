"""Compiled replica of :class:`edgeest.enumeration.EdgeStream`.

Runs the same cover / coloring / cross procedure on the subgraph induced by
a sorted vertex set, relabeled by position, asking the same IS questions in
the same order, and records each emitted edge with the running IS count.
Members without a neighbor in the set are never materialized: they change
no IS answer and only shift positions, which are tracked as ranks.  A run
stops after ``max_edges`` emissions; ``done`` reports whether it ran to
completion (then ``total`` is its full cost).
"""
from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(cache=True)
def _indep(a, alo, ahi, b, blo, bhi, mark, st, indptr, indices):
    st[0] += 1
    t = st[0]
    for i in range(alo, ahi):
        mark[a[i]] = t
    for i in range(blo, bhi):
        mark[b[i]] = t
    for i in range(alo, ahi):
        v = a[i]
        for k in range(indptr[v], indptr[v + 1]):
            if mark[indices[k]] == t:
                return False
    for i in range(blo, bhi):
        v = b[i]
        for k in range(indptr[v], indptr[v + 1]):
            if mark[indices[k]] == t:
                return False
    return True


@nb.njit(cache=True)
def _extract(A, alen, mark, st, cnt, indptr, indices, one):
    lo = 1
    hi = alen
    while hi - lo > 1:
        mid = (lo + hi) // 2
        cnt[0] += 1
        if _indep(A, 0, mid, A, 0, 0, mark, st, indptr, indices):
            lo = mid
        else:
            hi = mid
    x = A[hi - 1]
    one[0] = x
    lo = 0
    hi = hi - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        cnt[0] += 1
        if _indep(A, 0, mid, one, 0, 1, mark, st, indptr, indices):
            lo = mid
        else:
            hi = mid
    u = A[hi - 1]
    if u < x:
        return u, x
    return x, u


@nb.njit(cache=True)
def _count_below(ranks, n, x):
    lo = 0
    hi = n
    while lo < hi:
        mid = (lo + hi) // 2
        if ranks[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@nb.njit(cache=True)
def run_compressed(s, apos, cptr, cind, max_edges):
    """EdgeStream replica on a set of size ``s`` given only its non-isolated members.

    ``apos`` holds the (sorted) positions inside the set of the members that
    have a neighbor in the set; ``cptr``/``cind`` is their adjacency in
    index space ``0..len(apos)-1``.  Every other member is isolated in the
    induced subgraph, so it changes no IS answer and only shifts ranks,
    which are tracked arithmetically.  Returns (eu, ev, costs, count,
    total, done) with endpoints as indices into ``apos``.
    """
    r = apos.size
    nedges = cind.size // 2
    cap = min(max_edges, nedges)
    out_u = np.empty(cap, dtype=np.int64)
    out_v = np.empty(cap, dtype=np.int64)
    out_c = np.empty(cap, dtype=np.int64)
    count = 0
    mark = np.zeros(max(r, 1), dtype=np.int64)
    st = np.zeros(1, dtype=np.int64)
    cnt = np.zeros(1, dtype=np.int64)
    one = np.zeros(1, dtype=np.int64)
    seen = set()
    seen.add(np.int64(-1))

    # cover: greedy matching over the remaining set, tracked as
    # (active index, rank in the remaining sequence)
    ract = np.arange(r, dtype=np.int64)
    rrank = apos.copy()
    nr = r
    rlen = s
    order = np.empty(r, dtype=np.int64)
    olen = 0
    while True:
        cnt[0] += 1
        if _indep(ract, 0, nr, ract, 0, 0, mark, st, cptr, cind):
            break
        lo = 1
        hi = rlen
        while hi - lo > 1:
            mid = (lo + hi) // 2
            cnt[0] += 1
            k = _count_below(rrank, nr, mid)
            if _indep(ract, 0, k, ract, 0, 0, mark, st, cptr, cind):
                lo = mid
            else:
                hi = mid
        x = ract[_count_below(rrank, nr, hi - 1)]
        one[0] = x
        lo = 0
        hi = hi - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            cnt[0] += 1
            k = _count_below(rrank, nr, mid)
            if _indep(ract, 0, k, one, 0, 1, mark, st, cptr, cind):
                lo = mid
            else:
                hi = mid
        y = ract[_count_below(rrank, nr, hi - 1)]
        u = min(x, y)
        v = max(x, y)
        key = u * r + v
        if key not in seen:
            seen.add(key)
            if count == cap:
                return out_u, out_v, out_c, count, cnt[0], False
            out_u[count] = u
            out_v[count] = v
            out_c[count] = cnt[0]
            count += 1
        order[olen] = u
        order[olen + 1] = v
        olen += 2
        k = 0
        drop = 0
        for i in range(nr):
            w = ract[i]
            if w == u or w == v:
                drop += 1
                continue
            ract[k] = w
            rrank[k] = rrank[i] - drop
            k += 1
        nr = k
        rlen -= 2
    if olen == 0:
        return out_u, out_v, out_c, count, cnt[0], True

    # coloring: parts as linked lists in insertion order
    head = np.full(olen, -1, dtype=np.int64)
    tail = np.full(olen, -1, dtype=np.int64)
    nxt = np.full(r, -1, dtype=np.int64)
    nparts = 0
    cand = np.empty(olen + 1, dtype=np.int64)
    for oi in range(olen):
        u = order[oi]
        placed = False
        for p in range(nparts):
            cand[0] = u
            clen = 1
            w = head[p]
            while w != -1:
                cand[clen] = w
                clen += 1
                w = nxt[w]
            cnt[0] += 1
            if _indep(cand, 0, clen, cand, 0, 0, mark, st, cptr, cind):
                nxt[tail[p]] = u
                tail[p] = u
                placed = True
                break
            a, b = _extract(cand, clen, mark, st, cnt, cptr, cind, one)
            key = a * r + b
            if key not in seen:
                seen.add(key)
                if count == cap:
                    return out_u, out_v, out_c, count, cnt[0], False
                out_u[count] = a
                out_v[count] = b
                out_c[count] = cnt[0]
                count += 1
        if not placed:
            head[nparts] = u
            tail[nparts] = u
            nparts += 1

    # cross: explicit parts, then the uncovered rest as a rank range
    flat = np.empty(olen, dtype=np.int64)
    poff = np.zeros(nparts + 1, dtype=np.int64)
    k = 0
    for p in range(nparts):
        poff[p] = k
        w = head[p]
        while w != -1:
            flat[k] = w
            k += 1
            w = nxt[w]
    poff[nparts] = k
    covered = np.zeros(r, dtype=np.bool_)
    for oi in range(olen):
        covered[order[oi]] = True
    restact = np.empty(r, dtype=np.int64)
    restrank = np.empty(r, dtype=np.int64)
    nrest = 0
    ncov = 0
    for i in range(r):
        if covered[i]:
            ncov += 1
        else:
            restact[nrest] = i
            restrank[nrest] = apos[i] - ncov
            nrest += 1
    restlen = s - olen
    total_parts = nparts + 1 if restlen > 0 else nparts

    stack = np.empty((256, 4), dtype=np.int64)
    for j in range(total_parts):
        is_rest = j == nparts
        for i in range(j):
            a0, a1 = poff[i], poff[i + 1]
            if is_rest:
                b0, b1 = 0, restlen
            else:
                b0, b1 = poff[j], poff[j + 1]
            if a1 == a0 or b1 == b0:
                continue
            cnt[0] += 1
            if is_rest:
                k0 = _count_below(restrank, nrest, b0)
                k1 = _count_below(restrank, nrest, b1)
                ok = _indep(flat, a0, a1, restact, k0, k1, mark, st, cptr, cind)
            else:
                ok = _indep(flat, a0, a1, flat, b0, b1, mark, st, cptr, cind)
            if ok:
                continue
            stack[0, 0] = a0
            stack[0, 1] = a1
            stack[0, 2] = b0
            stack[0, 3] = b1
            sp = 1
            while sp > 0:
                sp -= 1
                x0 = stack[sp, 0]
                x1 = stack[sp, 1]
                y0 = stack[sp, 2]
                y1 = stack[sp, 3]
                if x1 - x0 >= 2:
                    h = (x1 - x0) // 2
                    p0, p1, q0, q1 = x0, x0 + h, y0, y1
                    r0, r1, t0, t1 = x0 + h, x1, y0, y1
                elif y1 - y0 >= 2:
                    h = (y1 - y0) // 2
                    p0, p1, q0, q1 = x0, x1, y0, y0 + h
                    r0, r1, t0, t1 = x0, x1, y0 + h, y1
                else:
                    a = flat[x0]
                    if is_rest:
                        b = restact[_count_below(restrank, nrest, y0)]
                    else:
                        b = flat[y0]
                    if b < a:
                        a, b = b, a
                    key = a * r + b
                    if key not in seen:
                        seen.add(key)
                        if count == cap:
                            return out_u, out_v, out_c, count, cnt[0], False
                        out_u[count] = a
                        out_v[count] = b
                        out_c[count] = cnt[0]
                        count += 1
                    continue
                cnt[0] += 1
                if is_rest:
                    d1 = not _indep(flat, p0, p1, restact, _count_below(restrank, nrest, q0),
                                    _count_below(restrank, nrest, q1), mark, st, cptr, cind)
                    cnt[0] += 1
                    d2 = not _indep(flat, r0, r1, restact, _count_below(restrank, nrest, t0),
                                    _count_below(restrank, nrest, t1), mark, st, cptr, cind)
                else:
                    d1 = not _indep(flat, p0, p1, flat, q0, q1, mark, st, cptr, cind)
                    cnt[0] += 1
                    d2 = not _indep(flat, r0, r1, flat, t0, t1, mark, st, cptr, cind)
                # LIFO: second half below the first
                if d2:
                    stack[sp, 0] = r0
                    stack[sp, 1] = r1
                    stack[sp, 2] = t0
                    stack[sp, 3] = t1
                    sp += 1
                if d1:
                    stack[sp, 0] = p0
                    stack[sp, 1] = p1
                    stack[sp, 2] = q0
                    stack[sp, 3] = q1
                    sp += 1
    return out_u, out_v, out_c, count, cnt[0], True


@nb.njit(cache=True)
def compress_local(lptr, lind):
    """Drop members with no neighbor: (kept indices, CSR over kept indices)."""
    s = lptr.size - 1
    newid = np.full(s, -1, dtype=np.int64)
    r = 0
    for i in range(s):
        if lptr[i + 1] > lptr[i]:
            newid[i] = r
            r += 1
    keep = np.empty(r, dtype=np.int64)
    cptr = np.zeros(r + 1, dtype=np.int64)
    for i in range(s):
        j = newid[i]
        if j >= 0:
            keep[j] = i
            cptr[j + 1] = cptr[j] + lptr[i + 1] - lptr[i]
    cind = np.empty(lind.size, dtype=np.int64)
    for j in range(r):
        i = keep[j]
        c = cptr[j]
        for k in range(lptr[i], lptr[i + 1]):
            cind[c] = newid[lind[k]]
            c += 1
    return keep, cptr, cind


@nb.njit(cache=True)
def run_stream(s, lptr, lind, max_edges):
    """EdgeStream replica on positions ``0..s-1``; endpoints returned as positions."""
    keep, cptr, cind = compress_local(lptr, lind)
    pu, pv, pc, count, total, done = run_compressed(s, keep, cptr, cind, max_edges)
    for i in range(count):
        pu[i] = keep[pu[i]]
        pv[i] = keep[pv[i]]
    return pu, pv, pc, count, total, done


@nb.njit(cache=True)
def _set_stream(indptr, indices, verts, vpos, s, pos, max_edges):
    """Run on a set given by its size and the (vertex, position) pairs of some
    members; every member not listed must be isolated in the induced subgraph.
    Endpoints are returned as indices into ``verts``."""
    lptr, lind = induced_local(indptr, indices, verts, pos)
    keep, cptr, cind = compress_local(lptr, lind)
    apos = np.empty(keep.size, dtype=np.int64)
    for j in range(keep.size):
        apos[j] = vpos[keep[j]]
    pu, pv, pc, count, total, done = run_compressed(s, apos, cptr, cind, max_edges)
    for i in range(count):
        pu[i] = keep[pu[i]]
        pv[i] = keep[pv[i]]
    return pu, pv, pc, count, total, done


@nb.njit(cache=True)
def induced_local(indptr, indices, verts, pos):
    """Local CSR of the subgraph induced on sorted ``verts``; ``pos`` is -1 scratch."""
    s = verts.size
    for i in range(s):
        pos[verts[i]] = i
    lptr = np.zeros(s + 1, dtype=np.int64)
    for i in range(s):
        v = verts[i]
        c = 0
        for k in range(indptr[v], indptr[v + 1]):
            if pos[indices[k]] >= 0:
                c += 1
        lptr[i + 1] = lptr[i] + c
    lind = np.empty(lptr[s], dtype=np.int64)
    for i in range(s):
        v = verts[i]
        c = lptr[i]
        for k in range(indptr[v], indptr[v + 1]):
            j = pos[indices[k]]
            if j >= 0:
                lind[c] = j
                c += 1
    for i in range(s):
        pos[verts[i]] = -1
    return lptr, lind


@nb.njit(cache=True)
def ll_batch(indptr, indices, degrees, verts, vpos, offs, sizes, k, pos):
    """Per set: full-run IS count, edge count, and edges with both degrees <= k."""
    nsets = offs.size - 1
    totals = np.empty(nsets, dtype=np.int64)
    nedges = np.empty(nsets, dtype=np.int64)
    nll = np.empty(nsets, dtype=np.int64)
    big = np.int64(1) << 62
    for r in range(nsets):
        vs = verts[offs[r]:offs[r + 1]]
        pu, pv, pc, count, total, done = _set_stream(indptr, indices, vs, vpos[offs[r]:offs[r + 1]],
                                                     sizes[r], pos, big)
        totals[r] = total
        nedges[r] = count
        c = 0
        for i in range(count):
            if degrees[vs[pu[i]]] <= k and degrees[vs[pv[i]]] <= k:
                c += 1
        nll[r] = c
    return totals, nedges, nll


@nb.njit(cache=True)
def quantity_rounds(indptr, indices, degrees, verts, vpos, offs, sizes, x0, limit, m_bar, pos):
    """Consume dependent guard rounds in order until a witness or overflow.

    Returns (stopping round or -1, code 0/1/2 for none/witness/overflow,
    extra IS beyond each round's opening query, degree queries, final X).
    """
    nsets = offs.size - 1
    x = x0
    extra_is = 0
    degq = 0
    for r in range(nsets):
        vs = verts[offs[r]:offs[r + 1]]
        need = np.int64(np.ceil(limit - x))
        if need < 1:
            need = 1
        pu, pv, pc, count, total, done = _set_stream(indptr, indices, vs, vpos[offs[r]:offs[r + 1]],
                                                     sizes[r], pos, need)
        for i in range(count):
            degq += 2
            if degrees[vs[pu[i]]] > m_bar or degrees[vs[pv[i]]] > m_bar:
                return r, 1, extra_is + pc[i] - 1, degq, x
            x += 1
            if x >= limit:
                return r, 2, extra_is + pc[i] - 1, degq, x
        extra_is += total - 1
    return -1, 0, extra_is, degq, x


@nb.njit(cache=True)
def independent_sets(indptr, indices, owner, members, nsets, n):
    """Per set, whether it induces no edge; ``owner`` must be non-decreasing."""
    flags = np.ones(nsets, dtype=np.bool_)
    stamp = np.full(n, -1, dtype=np.int64)
    lo = 0
    total = members.size
    while lo < total:
        sid = owner[lo]
        hi = lo
        while hi < total and owner[hi] == sid:
            stamp[members[hi]] = sid
            hi += 1
        dep = False
        for i in range(lo, hi):
            u = members[i]
            for k in range(indptr[u], indptr[u + 1]):
                if stamp[indices[k]] == sid:
                    dep = True
                    break
            if dep:
                break
        if dep:
            flags[sid] = False
        lo = hi
    return flags
