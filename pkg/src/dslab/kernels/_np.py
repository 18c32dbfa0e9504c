"""Vectorised numpy versions of the kernels in ``_nb``."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

MASK32 = np.uint64(0xFFFFFFFF)
ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
FRAC_BITS = 60


@lru_cache(maxsize=4)
def _qa_grid(qmax):
    lens = np.arange(1, qmax + 1)
    qs = np.repeat(lens, lens)
    offs = np.concatenate(([0], np.cumsum(lens)[:-1]))
    a = np.arange(qs.size) - np.repeat(offs, lens)
    return qs, a, offs


def iq_counts(qmax, A, B, pf_ptr, pf_val):
    qs, a, offs = _qa_grid(int(qmax))
    ok = np.gcd(A + a * B, qs) == 1
    out = np.zeros(qmax + 1, np.int64)
    out[1:] = np.add.reduceat(ok.astype(np.int64), offs)
    return out


def f_table(qmax, hmax, A, B, pf_ptr, pf_val):
    out = np.zeros((qmax + 1, 2 * hmax + 1), np.int64)
    h = np.arange(-hmax, hmax + 1)
    for q in range(1, qmax + 1):
        v = A + np.arange(q) * B
        ok0 = np.gcd(v, q) == 1
        ok1 = np.gcd(v[:, None] + h[None, :] * B, q) == 1
        out[q] = (ok0[:, None] & ok1).sum(axis=0)
    return out


def _vp(n, p):
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def _primes(pf_ptr, pf_val, x):
    return [int(p) for p in pf_val[pf_ptr[x]:pf_ptr[x + 1]]]


def hc_sweep(qmax, A, B, pf_ptr, pf_val):
    A0 = A % B
    cls = [None]
    for q in range(1, qmax + 1):
        a = np.arange(1, B * q + 1)
        cls.append(a[(a % B == A0) & (np.gcd(a, q) == 1)])
    totals = np.zeros((qmax + 1, qmax + 1), np.int64)
    stats = np.zeros(3, np.int64)
    for q in range(1, qmax + 1):
        pq = _primes(pf_ptr, pf_val, q)
        for r in range(1, qmax + 1):
            if q == r:
                continue
            g = int(np.gcd(q, r))
            qg, rg = q // g, r // g
            t = ((rg - qg) * A) % B
            n, knum, kden, lp = 1, g, 1, []
            for p in sorted(set(pq) | set(_primes(pf_ptr, pf_val, r))):
                u, v = _vp(q, p), _vp(r, p)
                if u != v:
                    n *= p ** max(u, v)
                    if min(u, v) > 0 and B % p:
                        knum *= p - 1
                        kden *= p
                else:
                    lp.append(p)
            c = (rg * cls[q][:, None] - qg * cls[r][None, :]).ravel()
            cs, h = np.unique(c, return_counts=True)
            totals[q, r] = h.sum()
            stats[0] += cs.size
            bad = ((cs - t) % B != 0) | (np.gcd(cs, n) > 1)
            stats[1] += int(bad.sum())
            num = np.full(cs.size, knum, np.int64)
            den = np.full(cs.size, kden, np.int64)
            for p in lp:
                div = cs % p == 0
                if B % p == 0:
                    num = np.where(div, num * p, num)
                    den = np.where(div, den * (p - 1), den)
                else:
                    num = np.where(div, num * (p - 1), num * (p - 1) ** 2)
                    den = np.where(div, den * p, den * p * p)
            stats[2] += int((h * den > num).sum())
    return totals, stats


def _keys(num, den):
    num = np.asarray(num, np.uint64)
    den = np.asarray(den, np.uint64)
    full = num >= den
    r = np.where(full, 0, num) << np.uint64(32)
    hi = r // den
    r = (r % den) << np.uint64(32)
    lo = r // den
    k = (hi << np.uint64(32)) | lo
    return np.where(full, ALL_ONES, k)


def arc_components(lo_num, hi_num, den):
    m = len(lo_num)
    if m == 0:
        e = np.zeros(0, np.int64)
        return e, e
    lk = _keys(lo_num, den)
    hk = _keys(hi_num, den)
    order = np.argsort(lk, kind="stable")
    lks, hks = lk[order], hk[order]
    run = np.maximum.accumulate(hks)
    start = np.ones(m, bool)
    start[1:] = lks[1:] > run[:-1]
    starts = np.flatnonzero(start)
    segmax = np.maximum.reduceat(hks, starts)
    seg = np.cumsum(start) - 1
    hit = np.flatnonzero(hks == segmax[seg])
    # first position in each segment attaining the maximum
    pick = hit[np.searchsorted(hit, starts)]
    return order[starts].astype(np.int64), order[pick].astype(np.int64)


def _mul64(q, w):
    qq = np.uint64(q)
    t = qq * (w & MASK32)
    u = qq * (w >> np.uint64(32))
    lo = t + (u << np.uint64(32))
    hi = (u >> np.uint64(32)) + (lo < t).astype(np.uint64)
    return hi, lo


def _mode_ok(a, q, mode, A, B, cr, ct, primes):
    if mode == 0:
        return np.ones(a.shape, bool)
    if mode in (1, 2):
        v = a if mode == 1 else A + a * B
        ok = np.ones(a.shape, bool)
        for p in primes:
            ok &= v % p != 0
        return ok
    d = int(np.gcd(np.gcd(q, cr), ct))
    return ((a - cr) % ct == 0) & (d % np.gcd(a, q) == 0)


def mc_hits(W1, W2, qs, pint, plo, phi, gi, glo, ghi, mode, A, B, cr, ct, cu, cs,
            pf_ptr, pf_val):
    ns = W1.shape[0]
    rows = []
    for k in range(len(qs)):
        q = int(qs[k])
        if mode == 3 and (q - cs) % cu:
            continue
        h1, l1 = _mul64(q, W1)
        h2, _ = _mul64(q, W2)
        s = l1 + h2
        i0 = h1.astype(np.int64) + (s < l1)
        f_lo = (s >> np.uint64(4)).astype(np.int64)
        zl = f_lo - ghi
        zh = f_lo + 2 - glo
        base = i0 - gi
        pi, pl, ph = int(pint[k]), int(plo[k]), int(phi[k])
        c_min = -((-(zh - pl)) >> FRAC_BITS) - pi
        c_max = ((zl + pl) >> FRAC_BITS) + pi
        p_min = -((-(zl - ph)) >> FRAC_BITS) - pi
        p_max = ((zh + ph) >> FRAC_BITS) + pi
        if not (p_max >= p_min).any():
            continue
        primes = _primes(pf_ptr, pf_val, q)
        cap = q if mode != 3 else q * ct
        status = np.zeros(ns, np.int64)
        wit = np.zeros(ns, np.int64)
        span = np.minimum(c_max - c_min + 1, cap)
        for j in range(int(span.max(initial=0))):
            live = (status == 0) & (j < span)
            if not live.any():
                break
            a = base + c_min + j
            ok = live & _mode_ok(a, q, mode, A, B, cr, ct, primes)
            status[ok] = 1
            wit[ok] = a[ok]
        lo_span = np.maximum(np.minimum(c_min, p_max + 1) - p_min, 0)
        hi_start = np.maximum(c_max + 1, p_min)
        hi_span = np.maximum(p_max - hi_start + 1, 0)
        for j in range(int(lo_span.max(initial=0))):
            live = (status == 0) & (j < lo_span)
            a = base + p_min + j
            ok = live & _mode_ok(a, q, mode, A, B, cr, ct, primes)
            status[ok] = 2
            wit[ok] = a[ok]
        for j in range(int(hi_span.max(initial=0))):
            live = (status == 0) & (j < hi_span)
            a = base + hi_start + j
            ok = live & _mode_ok(a, q, mode, A, B, cr, ct, primes)
            status[ok] = 2
            wit[ok] = a[ok]
        idx = np.flatnonzero(status)
        if idx.size:
            rows.append(np.stack([idx, np.full(idx.size, q), wit[idx], status[idx] - 1,
                                  (base + c_min)[idx], (base + c_max)[idx],
                                  (base + p_min)[idx], (base + p_max)[idx]], axis=1))
    if not rows:
        return np.zeros((0, 8), np.int64)
    out = np.concatenate(rows).astype(np.int64)
    return out[np.lexsort((out[:, 1], out[:, 0]))]


def orbit_hits(words, kshift, llo, wlo, whi, full):
    N = llo.shape[0] - 1
    n = np.arange(1, N + 1)
    o = kshift * n
    wi = o >> 6
    sh = (o & 63).astype(np.uint64)
    rows = []
    for s in range(words.shape[0]):
        w = words[s]
        a = w[wi] << sh
        b = np.where(sh == 0, np.uint64(0), w[np.minimum(wi + 1, w.size - 1)] >> (np.uint64(64) - sh))
        y = a | b
        d = y - llo[1:]
        hit = (d >= np.uint64(1)) & (d < wlo[1:])
        miss = (d != ALL_ONES) & (d > whi[1:]) & (d - whi[1:] > np.uint64(1))
        st = np.where(hit, 1, np.where(miss, 0, 2))
        st[full[1:]] = 1
        idx = np.flatnonzero(st)
        rows.append(np.stack([np.full(idx.size, s), n[idx], st[idx] - 1], axis=1))
    out = np.concatenate(rows) if rows else np.zeros((0, 3), np.int64)
    return out.astype(np.int64)
