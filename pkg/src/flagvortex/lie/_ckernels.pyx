# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer Weyl-group kernels (int64).

Call-compatible with ``_pykernels``.  The caller guarantees that all
intermediate values fit in 64 bits (see ``_backend``).
"""

from libc.stdlib cimport malloc, free

ctypedef long long i64


cdef inline int _reflect(i64* v, int n, const i64* A, const int* nodes, int nn) noexcept nogil:
    cdef int count = 0
    cdef int k, i, j
    cdef i64 c
    while True:
        i = -1
        for k in range(nn):
            if v[nodes[k]] < 0:
                i = nodes[k]
                break
        if i < 0:
            return count
        c = v[i]
        for j in range(n):
            v[j] -= c * A[j * n + i]
        count += 1


cdef inline i64 _ip(const i64* x, const i64* y, const i64* G, int n) noexcept nogil:
    cdef i64 s = 0
    cdef int i, j
    for i in range(n):
        if x[i] != 0:
            for j in range(n):
                s += x[i] * G[i * n + j] * y[j]
    return s


cdef i64* _flat(object M, int n) except NULL:
    cdef i64* out = <i64*> malloc(n * n * sizeof(i64))
    if out == NULL:
        raise MemoryError()
    cdef int i, j
    for i in range(n):
        for j in range(n):
            out[i * n + j] = M[i][j]
    return out


def reflect_dominant(labels, cartan, nodes):
    cdef int n = len(labels)
    cdef int nn = len(nodes)
    cdef i64* A = _flat(cartan, n)
    cdef i64* v = <i64*> malloc(n * sizeof(i64))
    cdef int* nd = <int*> malloc(nn * sizeof(int))
    cdef int k, count
    try:
        for k in range(n):
            v[k] = labels[k]
        for k in range(nn):
            nd[k] = nodes[k]
        count = _reflect(v, n, A, nd, nn)
        return tuple([v[k] for k in range(n)]), count
    finally:
        free(A)
        free(v)
        free(nd)


def freudenthal_dominant(highest, cartan, gram, roots, heights, nodes):
    cdef int n = len(highest)
    cdef int nn = len(nodes)
    cdef int nr = len(roots)
    cdef i64* A = _flat(cartan, n)
    cdef i64* G = _flat(gram, n)
    cdef i64* R = <i64*> malloc((nr * n + 1) * sizeof(i64))
    cdef int* nd = <int*> malloc((nn + 1) * sizeof(int))
    cdef i64* mu = <i64*> malloc(n * sizeof(i64))
    cdef i64* nu = <i64*> malloc(n * sizeof(i64))
    cdef i64* dom = <i64*> malloc(n * sizeof(i64))
    cdef i64* sh = <i64*> malloc(n * sizeof(i64))
    cdef int a, i, k
    cdef bint ok
    cdef i64 total, top, denom, m
    try:
        for a in range(nr):
            for i in range(n):
                R[a * n + i] = roots[a][i]
        for k in range(nn):
            nd[k] = nodes[k]

        lam = tuple(highest)
        level = {lam: 0}
        frontier = [lam]
        while frontier:
            nxt = []
            for w in frontier:
                lv = level[w]
                for i in range(n):
                    mu[i] = w[i]
                for a in range(nr):
                    ok = True
                    for k in range(nn):
                        if mu[nd[k]] - R[a * n + nd[k]] < 0:
                            ok = False
                            break
                    if not ok:
                        continue
                    key = tuple([mu[i] - R[a * n + i] for i in range(n)])
                    if key in level:
                        continue
                    level[key] = lv + heights[a]
                    nxt.append(key)
            frontier = nxt

        for i in range(n):
            sh[i] = lam[i] + 1
        top = _ip(sh, sh, G, n)
        mult = {lam: 1}
        for w in sorted(level, key=level.__getitem__):
            if w == lam:
                continue
            for i in range(n):
                mu[i] = w[i]
            total = 0
            for a in range(nr):
                for i in range(n):
                    nu[i] = mu[i] + R[a * n + i]
                while True:
                    for i in range(n):
                        dom[i] = nu[i]
                    _reflect(dom, n, A, nd, nn)
                    got = mult.get(tuple([dom[i] for i in range(n)]))
                    if got is None:
                        break
                    m = got
                    total += m * _ip(nu, &R[a * n], G, n)
                    for i in range(n):
                        nu[i] += R[a * n + i]
            for i in range(n):
                sh[i] = mu[i] + 1
            denom = top - _ip(sh, sh, G, n)
            if (2 * total) % denom != 0:
                raise ArithmeticError("Freudenthal recursion produced a non-integer multiplicity")
            mult[w] = (2 * total) // denom
        return mult
    finally:
        free(A)
        free(G)
        free(R)
        free(nd)
        free(mu)
        free(nu)
        free(dom)
        free(sh)
