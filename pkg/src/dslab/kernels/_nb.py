"""numba implementations of the hot loops.

Every function here has a numpy twin in ``_np`` with the same signature and
the same output; ``dslab.kernels`` picks one at import time.
"""
from __future__ import annotations

import numpy as np
from numba import njit, prange

MASK32 = np.uint64(0xFFFFFFFF)
ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
FRAC_BITS = 60


@njit(cache=True)
def _gcd(a, b):
    a = abs(a)
    b = abs(b)
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _coprime_to(v, pf_ptr, pf_val, q):
    for i in range(pf_ptr[q], pf_ptr[q + 1]):
        if v % pf_val[i] == 0:
            return False
    return True


@njit(cache=True)
def iq_counts(qmax, A, B, pf_ptr, pf_val):
    out = np.zeros(qmax + 1, np.int64)
    for q in range(1, qmax + 1):
        cnt = 0
        for a in range(q):
            if _coprime_to(A + a * B, pf_ptr, pf_val, q):
                cnt += 1
        out[q] = cnt
    return out


@njit(cache=True)
def f_table(qmax, hmax, A, B, pf_ptr, pf_val):
    out = np.zeros((qmax + 1, 2 * hmax + 1), np.int64)
    for q in range(1, qmax + 1):
        for a in range(q):
            v = A + a * B
            if not _coprime_to(v, pf_ptr, pf_val, q):
                continue
            for h in range(-hmax, hmax + 1):
                if _coprime_to(v + h * B, pf_ptr, pf_val, q):
                    out[q, h + hmax] += 1
    return out


@njit(cache=True)
def _vp(n, p):
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


@njit(cache=True)
def hc_sweep(qmax, A, B, pf_ptr, pf_val):
    """Histogram c -> H(c) for every ordered pair q != r <= qmax.

    Returns (totals[q, r], stats) with stats = [distinct c seen, vanishing
    violations, bound violations].
    """
    A0 = A % B
    # residue classes a in [1, Bq], a = A mod B, (a, q) = 1
    cls_ptr = np.zeros(qmax + 2, np.int64)
    for q in range(1, qmax + 1):
        cnt = 0
        for k in range(B * q):
            a = k + 1
            if a % B == A0 and _coprime_to(a, pf_ptr, pf_val, q):
                cnt += 1
        cls_ptr[q + 1] = cls_ptr[q] + cnt
    cls_val = np.empty(cls_ptr[qmax + 1], np.int64)
    for q in range(1, qmax + 1):
        j = cls_ptr[q]
        for k in range(B * q):
            a = k + 1
            if a % B == A0 and _coprime_to(a, pf_ptr, pf_val, q):
                cls_val[j] = a
                j += 1

    size = 2 * B * qmax * qmax + 3
    buf = np.zeros(size, np.int64)
    touched = np.empty(qmax * qmax * B + 1, np.int64)
    totals = np.zeros((qmax + 1, qmax + 1), np.int64)
    stats = np.zeros(3, np.int64)
    lp = np.empty(16, np.int64)
    for q in range(1, qmax + 1):
        for r in range(1, qmax + 1):
            if q == r:
                continue
            g = _gcd(q, r)
            lcm = q // g * r
            qg = q // g
            rg = r // g
            off = B * lcm
            t = ((rg - qg) * A) % B
            # m, l, n and the c-independent part of the bound
            n = 1
            knum = g
            kden = 1
            nl = 0
            for src in range(2):
                x = q if src == 0 else r
                for i in range(pf_ptr[x], pf_ptr[x + 1]):
                    p = pf_val[i]
                    if src == 1 and q % p == 0:
                        continue
                    u = _vp(q, p)
                    v = _vp(r, p)
                    if u != v:
                        n *= p ** max(u, v)
                        if min(u, v) > 0 and B % p != 0:
                            knum *= p - 1
                            kden *= p
                    else:
                        lp[nl] = p
                        nl += 1
            nt = 0
            for ia in range(cls_ptr[q], cls_ptr[q + 1]):
                ra = rg * cls_val[ia]
                for ib in range(cls_ptr[r], cls_ptr[r + 1]):
                    idx = ra - qg * cls_val[ib] + off
                    if buf[idx] == 0:
                        touched[nt] = idx
                        nt += 1
                    buf[idx] += 1
            tot = 0
            for k in range(nt):
                idx = touched[k]
                h = buf[idx]
                buf[idx] = 0
                c = idx - off
                tot += h
                stats[0] += 1
                if (c - t) % B != 0 or _gcd(c, n) > 1:
                    stats[1] += 1
                num = knum
                den = kden
                for i in range(nl):
                    p = lp[i]
                    if B % p == 0:
                        if c % p == 0:
                            num *= p
                            den *= p - 1
                    elif c % p == 0:
                        num *= p - 1
                        den *= p
                    else:
                        num *= (p - 1) * (p - 1)
                        den *= p * p
                if h * den > num:
                    stats[2] += 1
            totals[q, r] = tot
    return totals, stats


@njit(cache=True)
def _key(num, den):
    if num >= den:
        return ALL_ONES
    r = np.uint64(num)
    d = np.uint64(den)
    r = r << np.uint64(32)
    hi = r // d
    r = r % d
    r = r << np.uint64(32)
    lo = r // d
    return (hi << np.uint64(32)) | lo


@njit(cache=True)
def arc_components(lo_num, hi_num, den):
    """Merge closed arcs lo_num/den .. hi_num/den (all inside [0, 1]).

    Returns index arrays (first, last): component j runs from the lower end
    of arc first[j] to the upper end of arc last[j].  Denominators must be
    below 2**32 so the 64-bit keys order the endpoints exactly.
    """
    m = lo_num.shape[0]
    lk = np.empty(m, np.uint64)
    hk = np.empty(m, np.uint64)
    for i in range(m):
        lk[i] = _key(lo_num[i], den[i])
        hk[i] = _key(hi_num[i], den[i])
    order = np.argsort(lk)
    first = np.empty(m, np.int64)
    last = np.empty(m, np.int64)
    nc = 0
    if m == 0:
        return first[:0], last[:0]
    cur_first = order[0]
    cur_last = order[0]
    cur_hi = hk[order[0]]
    for t in range(1, m):
        i = order[t]
        if lk[i] > cur_hi:
            first[nc] = cur_first
            last[nc] = cur_last
            nc += 1
            cur_first = i
            cur_last = i
            cur_hi = hk[i]
        elif hk[i] > cur_hi:
            cur_hi = hk[i]
            cur_last = i
    first[nc] = cur_first
    last[nc] = cur_last
    nc += 1
    return first[:nc], last[:nc]


@njit(cache=True)
def _mul64(q, w):
    qq = np.uint64(q)
    t = qq * (w & MASK32)
    u = qq * (w >> np.uint64(32))
    lo = t + (u << np.uint64(32))
    hi = u >> np.uint64(32)
    if lo < t:
        hi += np.uint64(1)
    return hi, lo


@njit(cache=True)
def _floor60(v):
    return v >> FRAC_BITS


@njit(cache=True)
def _ceil60(v):
    return -((-v) >> FRAC_BITS)


@njit(cache=True)
def _mode_ok(a, q, mode, A, B, cr, ct, pf_ptr, pf_val):
    if mode == 0:
        return True
    if mode == 1:
        return _coprime_to(a, pf_ptr, pf_val, q)
    if mode == 2:
        return _coprime_to(A + a * B, pf_ptr, pf_val, q)
    if (a - cr) % ct != 0:
        return False
    d = _gcd(_gcd(q, cr), ct)
    return d % _gcd(a, q) == 0


@njit(cache=True)
def _eval(w1, w2, q, pi, plo, phi, gi, glo, ghi, mode, A, B, cr, ct, pf_ptr, pf_val):
    h1, l1 = _mul64(q, w1)
    h2, l2 = _mul64(q, w2)
    s = l1 + h2
    i0 = np.int64(h1)
    if s < l1:
        i0 += 1
    f_lo = np.int64(s >> np.uint64(4))
    f_hi = f_lo + 2
    zl = f_lo - ghi
    zh = f_hi - glo
    base = i0 - gi
    c_min = _ceil60(zh - plo) - pi
    c_max = _floor60(zl + plo) + pi
    p_min = _ceil60(zl - phi) - pi
    p_max = _floor60(zh + phi) + pi
    cap = q if mode != 3 else q * ct
    j = c_min
    while j <= c_max and j - c_min < cap:
        a = base + j
        if _mode_ok(a, q, mode, A, B, cr, ct, pf_ptr, pf_val):
            return 1, a, base + c_min, base + c_max, base + p_min, base + p_max
        j += 1
    j = p_min
    while j <= p_max:
        if j >= c_min and j <= c_max:
            j = c_max + 1
            continue
        a = base + j
        if _mode_ok(a, q, mode, A, B, cr, ct, pf_ptr, pf_val):
            return 2, a, base + c_min, base + c_max, base + p_min, base + p_max
        j += 1
    return 0, 0, 0, 0, 0, 0


@njit(cache=True, parallel=True)
def mc_hits(W1, W2, qs, pint, plo, phi, gi, glo, ghi, mode, A, B, cr, ct, cu, cs,
            pf_ptr, pf_val):
    ns = W1.shape[0]
    nq = qs.shape[0]
    counts = np.zeros(ns, np.int64)
    for s in prange(ns):
        c = 0
        for k in range(nq):
            q = qs[k]
            if mode == 3 and (q - cs) % cu != 0:
                continue
            st, a, x0, x1, x2, x3 = _eval(W1[s], W2[s], q, pint[k], plo[k], phi[k], gi, glo, ghi,
                                         mode, A, B, cr, ct, pf_ptr, pf_val)
            if st != 0:
                c += 1
        counts[s] = c
    offs = np.zeros(ns + 1, np.int64)
    for s in range(ns):
        offs[s + 1] = offs[s] + counts[s]
    tot = offs[ns]
    out = np.empty((tot, 8), np.int64)
    for s in prange(ns):
        j = offs[s]
        for k in range(nq):
            q = qs[k]
            if mode == 3 and (q - cs) % cu != 0:
                continue
            st, a, x0, x1, x2, x3 = _eval(W1[s], W2[s], q, pint[k], plo[k], phi[k], gi, glo, ghi,
                                         mode, A, B, cr, ct, pf_ptr, pf_val)
            if st != 0:
                out[j, 0] = s
                out[j, 1] = q
                out[j, 2] = a
                out[j, 3] = st - 1
                out[j, 4] = x0
                out[j, 5] = x1
                out[j, 6] = x2
                out[j, 7] = x3
                j += 1
    return out


@njit(cache=True)
def _window(w, o):
    wi = o >> 6
    s = o & 63
    if s == 0:
        return w[wi]
    return (w[wi] << np.uint64(s)) | (w[wi + 1] >> np.uint64(64 - s))


@njit(cache=True)
def _orbit_status(w, o, llo, wlo, whi, full):
    if full:
        return 1
    d = _window(w, o) - llo
    if d >= np.uint64(1) and d < wlo:
        return 1
    if d != ALL_ONES and d > whi and d - whi > np.uint64(1):
        return 0
    return 2


@njit(cache=True, parallel=True)
def orbit_hits(words, kshift, llo, wlo, whi, full):
    """Hits of frac(2**(kshift*n) x) in arc n, for n = 1..N (arrays sized N+1)."""
    ns = words.shape[0]
    N = llo.shape[0] - 1
    counts = np.zeros(ns, np.int64)
    for s in prange(ns):
        c = 0
        for n in range(1, N + 1):
            if _orbit_status(words[s], kshift * n, llo[n], wlo[n], whi[n], full[n]) != 0:
                c += 1
        counts[s] = c
    offs = np.zeros(ns + 1, np.int64)
    for s in range(ns):
        offs[s + 1] = offs[s] + counts[s]
    out = np.empty((offs[ns], 3), np.int64)
    for s in prange(ns):
        j = offs[s]
        for n in range(1, N + 1):
            st = _orbit_status(words[s], kshift * n, llo[n], wlo[n], whi[n], full[n])
            if st != 0:
                out[j, 0] = s
                out[j, 1] = n
                out[j, 2] = st - 1
                j += 1
    return out
