# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled complexity kernels.

Same functions and results as ``_kernels_py``.  The cut test forms the Gram
matrix on the smaller side of the bipartition and takes its largest
eigenvalue (closed form for 2x2, power iteration otherwise).  The Rayleigh
quotient never exceeds the true eigenvalue, so a cut is never accepted on an
unconverged estimate.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef double complex cplx

cdef extern from "complex.h" nogil:
    double cabs(double complex)


cdef inline int _popcount(long x) nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


cdef inline double _norm2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef double _largest_eig(cplx* g, int d, double trace) nogil:
    cdef double a, c, half, lam, prev, nrm, num
    cdef cplx b, acc
    cdef int i, j, it, best
    cdef cplx* v
    cdef cplx* w
    if d == 1:
        return g[0].real
    if d == 2:
        a = g[0].real
        c = g[3].real
        b = g[1]
        half = 0.5 * (a - c)
        return 0.5 * (a + c) + sqrt(half * half + _norm2(b))
    v = <cplx*> malloc(d * sizeof(cplx))
    w = <cplx*> malloc(d * sizeof(cplx))
    best = 0
    for i in range(d):
        if g[i * d + i].real > g[best * d + best].real:
            best = i
    for i in range(d):
        v[i] = g[i * d + best]
    lam = 0.0
    prev = -1.0
    for it in range(500):
        nrm = 0.0
        for i in range(d):
            nrm += _norm2(v[i])
        if nrm == 0.0:
            break
        num = 0.0
        for i in range(d):
            acc = 0.0
            for j in range(d):
                acc = acc + g[i * d + j] * v[j]
            w[i] = acc
            num += (v[i].conjugate() * acc).real
        lam = num / nrm
        if fabs(lam - prev) <= 1e-15 * trace:
            break
        prev = lam
        for i in range(d):
            v[i] = w[i]
    free(v)
    free(w)
    return lam


cdef bint _cut_is_product(const cplx* psi, int n, long subset, double eps,
                          cplx* gram, long* dep_small, long* dep_big) nogil:
    cdef long full = (1 << n) - 1
    cdef long small = subset
    cdef long big = full & ~subset
    cdef int ks = _popcount(subset)
    cdef int d_s, d_b, a, b, c, q, pos
    cdef long idx
    cdef double trace = 0.0, lam
    cdef cplx acc
    if ks > n - ks:
        small = big
        big = subset
        ks = n - ks
    d_s = 1 << ks
    d_b = 1 << (n - ks)
    # scatter local indices onto the chosen qubit positions
    for a in range(d_s):
        idx = 0
        pos = 0
        for q in range(n):
            if (small >> q) & 1:
                if (a >> pos) & 1:
                    idx |= (1 << q)
                pos += 1
        dep_small[a] = idx
    for c in range(d_b):
        idx = 0
        pos = 0
        for q in range(n):
            if (big >> q) & 1:
                if (c >> pos) & 1:
                    idx |= (1 << q)
                pos += 1
        dep_big[c] = idx
    for a in range(d_s):
        for b in range(a, d_s):
            acc = 0.0
            for c in range(d_b):
                acc = acc + psi[dep_small[a] | dep_big[c]] * psi[dep_small[b] | dep_big[c]].conjugate()
            gram[a * d_s + b] = acc
            gram[b * d_s + a] = acc.conjugate()
        trace += gram[a * d_s + a].real
    if trace <= 0.0:
        return True
    lam = _largest_eig(gram, d_s, trace)
    return trace - lam <= eps * trace


cdef int _blocks(const cplx* psi, int n, double eps, long* out,
                 cplx* gram, long* dep_small, long* dep_big) nogil:
    """Write finest-factorization block masks to ``out``; return the count."""
    cdef long remaining = (1 << n) - 1
    cdef long found, subset
    cdef int nb = 0, r, k, i, j
    cdef int bits[64]
    cdef int comb[64]
    while remaining:
        r = 0
        for i in range(n):
            if (remaining >> i) & 1:
                bits[r] = i
                r += 1
        found = 0
        for k in range(1, r // 2 + 1):
            # lexicographic k-combinations of bits[0..r)
            for i in range(k):
                comb[i] = i
            while True:
                subset = 0
                for i in range(k):
                    subset |= (1 << bits[comb[i]])
                if _cut_is_product(psi, n, subset, eps, gram, dep_small, dep_big):
                    found = subset
                    break
                i = k - 1
                while i >= 0 and comb[i] == r - k + i:
                    i -= 1
                if i < 0:
                    break
                comb[i] += 1
                for j in range(i + 1, k):
                    comb[j] = comb[j - 1] + 1
            if found:
                break
        if not found:
            found = remaining
        out[nb] = found
        nb += 1
        remaining &= ~found
    return nb


def state_blocks(amplitudes, int n, double eps):
    cdef const cplx[::1] amps = np.ascontiguousarray(amplitudes, dtype=complex)
    cdef long dim = 1 << n
    cdef cplx* gram = <cplx*> malloc(dim * sizeof(cplx))
    cdef long* dep_small = <long*> malloc(dim * sizeof(long))
    cdef long* dep_big = <long*> malloc(dim * sizeof(long))
    cdef long out[64]
    cdef int nb, i
    if amps.shape[0] != dim:
        raise ValueError("amplitude length does not match qubit count")
    nb = _blocks(&amps[0], n, eps, out, gram, dep_small, dep_big)
    free(gram)
    free(dep_small)
    free(dep_big)
    return [out[i] for i in range(nb)]


def state_nu(amps, int n, double eps):
    return max(bin(m).count("1") for m in state_blocks(amps, n, eps))


def batch_state_nu(amps, tables, int n, double eps):
    cdef const cplx[::1] src = np.ascontiguousarray(amps, dtype=complex)
    cdef const long[:, ::1] tab = np.ascontiguousarray(tables, dtype=np.int64)
    cdef long m = tab.shape[0]
    cdef long dim = 1 << n
    cdef cnp.ndarray[cnp.int32_t, ndim=1] result = np.empty(m, dtype=np.int32)
    cdef cnp.int32_t[::1] res = result
    cdef cplx* buf = <cplx*> malloc(dim * sizeof(cplx))
    cdef cplx* gram = <cplx*> malloc(dim * sizeof(cplx))
    cdef long* dep_small = <long*> malloc(dim * sizeof(long))
    cdef long* dep_big = <long*> malloc(dim * sizeof(long))
    cdef long out[64]
    cdef long i, j
    cdef int nb, b, best, c
    if src.shape[0] != dim or (m > 0 and tab.shape[1] != dim):
        raise ValueError("table width does not match state dimension")
    with nogil:
        for i in range(m):
            for j in range(dim):
                buf[tab[i, j]] = src[j]
            nb = _blocks(buf, n, eps, out, gram, dep_small, dep_big)
            best = 0
            for b in range(nb):
                c = _popcount(out[b])
                if c > best:
                    best = c
            res[i] = best
    free(buf)
    free(gram)
    free(dep_small)
    free(dep_big)
    return result


cdef int _ham_max_block(cplx* w, int n, double tol, bint* seen, int* parent) nogil:
    cdef long dim = 1 << n
    cdef long j, k, m, jm, km, mask
    cdef int q, first, a, b, r, best, cnt
    cdef cplx m00, m01, m10, m11
    cdef cplx half = 0.5
    cdef cplx ihalf = 0.5j
    for q in range(n):
        m = 1 << q
        for j in range(dim):
            if j & m:
                continue
            jm = j | m
            for k in range(dim):
                if k & m:
                    continue
                km = k | m
                m00 = w[j * dim + k]
                m01 = w[j * dim + km]
                m10 = w[jm * dim + k]
                m11 = w[jm * dim + km]
                w[j * dim + k] = (m00 + m11) * half
                w[j * dim + km] = (m01 + m10) * half
                w[jm * dim + k] = (m01 - m10) * ihalf
                w[jm * dim + km] = (m00 - m11) * half
    for mask in range(dim):
        seen[mask] = False
    for j in range(dim):
        for k in range(dim):
            if cabs(w[j * dim + k]) > tol:
                seen[j | k] = True
    for q in range(n):
        parent[q] = q
    for mask in range(dim):
        if not seen[mask] or _popcount(mask) < 2:
            continue
        first = -1
        for q in range(n):
            if (mask >> q) & 1:
                if first < 0:
                    first = q
                    continue
                a = first
                while parent[a] != a:
                    a = parent[a]
                b = q
                while parent[b] != b:
                    b = parent[b]
                if a != b:
                    if a < b:
                        parent[b] = a
                    else:
                        parent[a] = b
    best = 0
    for r in range(n):
        cnt = 0
        for q in range(n):
            a = q
            while parent[a] != a:
                a = parent[a]
            if a == r:
                cnt += 1
        if cnt > best:
            best = cnt
    return best


def ham_nu(matrix, int n, double tol):
    return int(batch_ham_nu(matrix, np.arange(1 << n, dtype=np.int64)[None, :], n, tol)[0])


def batch_ham_nu(matrix, tables, int n, double tol):
    cdef const cplx[:, ::1] h = np.ascontiguousarray(matrix, dtype=complex)
    cdef const long[:, ::1] tab = np.ascontiguousarray(tables, dtype=np.int64)
    cdef long m = tab.shape[0]
    cdef long dim = 1 << n
    cdef cnp.ndarray[cnp.int32_t, ndim=1] result = np.empty(m, dtype=np.int32)
    cdef cnp.int32_t[::1] res = result
    cdef cplx* w = <cplx*> malloc(dim * dim * sizeof(cplx))
    cdef bint* seen = <bint*> malloc(dim * sizeof(bint))
    cdef int parent[64]
    cdef long i, j, k
    if h.shape[0] != dim or h.shape[1] != dim or (m > 0 and tab.shape[1] != dim):
        raise ValueError("matrix or table size does not match qubit count")
    with nogil:
        for i in range(m):
            for j in range(dim):
                for k in range(dim):
                    w[j * dim + k] = h[tab[i, j], tab[i, k]]
            res[i] = _ham_max_block(w, n, tol, seen, parent)
    free(w)
    free(seen)
    return result
