"""Compiled inner loops for the alphabet searches."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def _lookup(angles, order, psi, look_tol, found, nfound):
    """Append every symbol index whose angle is within look_tol of psi."""
    m = angles.shape[0]
    psi = psi % TWO_PI
    lo, hi = 0, m
    while lo < hi:
        mid = (lo + hi) // 2
        if angles[mid] < psi:
            lo = mid + 1
        else:
            hi = mid
    for side in range(2):
        direction = 1 - 2 * side
        for off in range(side, m):
            j = (lo + direction * off) % m
            d = abs(angles[j] - psi)
            d = min(d, TWO_PI - d)
            if d > look_tol:
                break
            idx = order[j]
            dup = False
            for t in range(nfound):
                if found[t] == idx:
                    dup = True
            if not dup:
                found[nfound] = idx
                nfound += 1
    return nfound


@njit(cache=True, nogil=True)
def scan_closed(vals, angles, order, W, T, piv, N, start, stop, tol, look_tol, out):
    """Closed-form scan over prefixes start..stop-1 (entries 1..N-2; entry 0 is symbol 0).

    The last entry is solved from the pivot constraint and checked against all
    constraints.  Writes symbol rows into ``out`` and returns the count, or -1
    when ``out`` is too small.
    """
    m = vals.shape[0]
    C = W.shape[0]
    cap = out.shape[0]
    cnt = 0
    digits = np.zeros(N, np.int64)
    partial = np.empty(C, np.complex128)
    found = np.empty(m, np.int64)
    a = W[piv, N - 1]
    amod = abs(a)
    alpha = math.atan2(a.imag, a.real)
    for p in range(start, stop):
        q = p
        for i in range(N - 2, 0, -1):
            digits[i] = q % m
            q //= m
        for c in range(C):
            acc = W[c, 0] * vals[0]
            for i in range(1, N - 1):
                acc += W[c, i] * vals[digits[i]]
            partial[c] = acc
        s = partial[piv]
        smod = abs(s)
        nfound = 0
        if smod < 1e-12:
            if abs(T[piv] - amod * amod) <= 1e-9:
                for u in range(m):
                    found[nfound] = u
                    nfound += 1
        else:
            cosv = (T[piv] - smod * smod - amod * amod) / (2.0 * smod * amod)
            if abs(cosv) <= 1.0 + 1e-7:
                cosv = min(1.0, max(-1.0, cosv))
                phi = math.atan2(s.imag, s.real)
                delta = math.acos(cosv)
                nfound = _lookup(angles, order, phi - alpha + delta, look_tol, found, nfound)
                nfound = _lookup(angles, order, phi - alpha - delta, look_tol, found, nfound)
        if nfound == 0:
            continue
        found[:nfound].sort()
        for t in range(nfound):
            u = found[t]
            ok = True
            for c in range(C):
                z = partial[c] + W[c, N - 1] * vals[u]
                if abs(z.real * z.real + z.imag * z.imag - T[c]) > tol * N:
                    ok = False
                    break
            if ok:
                if cnt >= cap:
                    return -1
                for i in range(N - 1):
                    out[cnt, i] = digits[i]
                out[cnt, N - 1] = u
                cnt += 1
    return cnt


@njit(cache=True, nogil=True)
def scan_brute(vals, W, T, N, start, stop, tol, out):
    """Plain scan over entries 1..N-1; the oracle for scan_closed."""
    m = vals.shape[0]
    C = W.shape[0]
    cap = out.shape[0]
    cnt = 0
    digits = np.zeros(N, np.int64)
    for p in range(start, stop):
        q = p
        for i in range(N - 1, 0, -1):
            digits[i] = q % m
            q //= m
        ok = True
        for c in range(C):
            acc = W[c, 0] * vals[0]
            for i in range(1, N):
                acc += W[c, i] * vals[digits[i]]
            if abs(acc.real * acc.real + acc.imag * acc.imag - T[c]) > tol * N:
                ok = False
                break
        if ok:
            if cnt >= cap:
                return -1
            for i in range(N):
                out[cnt, i] = digits[i]
            cnt += 1
    return cnt


@njit(cache=True, nogil=True)
def orthogonality_bits(V, tol):
    """Bitset adjacency: bit j of row i set iff |<v_i|v_j>|^2 <= tol (normalized vectors)."""
    n, N = V.shape
    words = (n + 63) // 64
    bits = np.zeros((n, words), np.uint64)
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0j
            for a in range(N):
                acc += V[i, a].conjugate() * V[j, a]
            if acc.real * acc.real + acc.imag * acc.imag <= tol:
                bits[i, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
                bits[j, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
    return bits


@njit(cache=True, nogil=True)
def _lowest_bit(x):
    # index of the lowest set bit of a nonzero uint64
    k = 0
    while (x & np.uint64(1)) == 0:
        x >>= np.uint64(1)
        k += 1
    return k


@njit(cache=True, nogil=True)
def k_cliques(bits, n, k, out):
    """All k-cliques with increasing vertex indices, in lexicographic order.

    Returns the count, or -1 when ``out`` overflows.
    """
    words = bits.shape[1]
    cap = out.shape[0]
    cnt = 0
    cand = np.zeros((k + 1, words), np.uint64)
    stack = np.zeros(k, np.int64)
    # depth 0: every vertex is a candidate
    for v in range(n):
        cand[0, v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    depth = 0
    pos = np.zeros(k + 1, np.int64)  # next vertex to try at each depth
    pos[0] = 0
    while depth >= 0:
        # find next candidate >= pos[depth]
        v = -1
        w = pos[depth] >> 6
        while w < words:
            x = cand[depth, w]
            if w == (pos[depth] >> 6):
                sh = pos[depth] & 63
                if sh > 0:
                    x &= ~((np.uint64(1) << np.uint64(sh)) - np.uint64(1))
            if x != 0:
                v = w * 64 + _lowest_bit(x)
                break
            w += 1
        if v < 0 or v >= n:
            depth -= 1
            continue
        pos[depth] = v + 1
        stack[depth] = v
        if depth + 1 == k:
            if cnt >= cap:
                return -1
            for t in range(k):
                out[cnt, t] = stack[t]
            cnt += 1
            continue
        # next candidates: common neighbours above v
        nonempty = False
        for ww in range(words):
            y = cand[depth, ww] & bits[v, ww]
            cand[depth + 1, ww] = y
            if y != 0:
                nonempty = True
        if not nonempty:
            continue
        depth += 1
        pos[depth] = v + 1
    return cnt


@njit(cache=True, nogil=True)
def row_orbit_min(cliques, rows, keys_sorted, perms, m):
    """For each clique of vector indices, the least sorted index tuple over row permutations.

    ``rows[i]`` holds the symbol row of vector i (entry 0 fixed), ``keys_sorted``
    the base-m codes of rows 1..N-1 in increasing order (so vector i has code
    keys_sorted[i]), ``perms`` the permutations of rows 1..N-1.
    """
    B, k = cliques.shape
    P, L = perms.shape
    out = np.empty((B, k), np.int64)
    cur = np.empty(k, np.int64)
    best = np.empty(k, np.int64)
    nkeys = keys_sorted.shape[0]
    for b in range(B):
        for t in range(k):
            best[t] = cliques[b, t]
        for p in range(P):
            ok = True
            for t in range(k):
                code = 0
                r = rows[cliques[b, t]]
                for i in range(L):
                    code = code * m + r[1 + perms[p, i]]
                lo, hi = 0, nkeys
                while lo < hi:
                    mid = (lo + hi) // 2
                    if keys_sorted[mid] < code:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo >= nkeys or keys_sorted[lo] != code:
                    ok = False
                    break
                cur[t] = lo
            if not ok:
                continue
            cur.sort()
            less = False
            for t in range(k):
                if cur[t] != best[t]:
                    less = cur[t] < best[t]
                    break
            if less:
                for t in range(k):
                    best[t] = cur[t]
        for t in range(k):
            out[b, t] = best[t]
    return out
