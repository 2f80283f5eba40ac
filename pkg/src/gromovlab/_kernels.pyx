# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled brute-force defect kernels.

Every kernel takes a C-contiguous float64 distance table and an ascending
array of *first indices*; it scans only the tuples whose leading index is in
that array, in lexicographic order, and returns ``(best, witness)`` where the
witness is the first tuple reaching ``best``. Tuples that do not exist (for
example quadruples in a 3-point space) yield ``(-inf, None)``.

Arithmetic follows the exact operation order of ``gromovlab._fallback`` so the
two backends agree bitwise.
"""

cdef extern from "math.h" nogil:
    double INFINITY


cdef inline double _max2(double a, double b) noexcept nogil:
    return a if a > b else b


cdef inline double _min2(double a, double b) noexcept nogil:
    return a if a < b else b


cdef inline double _median3(double a, double b, double c) noexcept nogil:
    return _max2(_min2(a, b), _min2(_max2(a, b), c))


def fourpoint_max(const double[:, ::1] d, const Py_ssize_t[::1] firsts):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t a, i, j, k, l
    cdef Py_ssize_t bi = -1, bj = -1, bk = -1, bl = -1
    cdef double s1, s2, s3, hi, mid, v
    cdef double best = -INFINITY
    with nogil:
        for a in range(firsts.shape[0]):
            i = firsts[a]
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    for l in range(k + 1, n):
                        s1 = d[i, j] + d[k, l]
                        s2 = d[i, k] + d[j, l]
                        s3 = d[i, l] + d[j, k]
                        hi = _max2(_max2(s1, s2), s3)
                        mid = _median3(s1, s2, s3)
                        v = (hi - mid) * 0.5
                        if v > best:
                            best = v
                            bi = i
                            bj = j
                            bk = k
                            bl = l
    if bi < 0:
        return best, None
    return best, (bi, bj, bk, bl)


def gromov_max(const double[:, ::1] d, const Py_ssize_t[::1] firsts):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t a, x, y, z, w
    cdef Py_ssize_t bx = -1, by = -1, bz = -1, bw = -1
    cdef double dxz, dyz, dxy, pxz, pyz, pxy, v
    cdef double best = -INFINITY
    with nogil:
        for a in range(firsts.shape[0]):
            x = firsts[a]
            for y in range(n):
                dxy = d[x, y]
                for z in range(n):
                    dxz = d[x, z]
                    dyz = d[y, z]
                    for w in range(n):
                        pxz = 0.5 * ((d[x, w] + d[z, w]) - dxz)
                        pyz = 0.5 * ((d[y, w] + d[z, w]) - dyz)
                        pxy = 0.5 * ((d[x, w] + d[y, w]) - dxy)
                        v = _min2(pxz, pyz) - pxy
                        if v > best:
                            best = v
                            bx = x
                            by = y
                            bz = z
                            bw = w
    if bx < 0:
        return best, None
    return best, (bx, by, bz, bw)


def ultra_max(const double[:, ::1] d, const Py_ssize_t[::1] firsts):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t a, i, j, k
    cdef Py_ssize_t bi = -1, bj = -1, bk = -1
    cdef double p, q, r, v
    cdef double best = -INFINITY
    with nogil:
        for a in range(firsts.shape[0]):
            i = firsts[a]
            for j in range(i + 1, n):
                p = d[i, j]
                for k in range(j + 1, n):
                    q = d[i, k]
                    r = d[j, k]
                    v = _max2(_max2(p, q), r) - _median3(p, q, r)
                    if v > best:
                        best = v
                        bi = i
                        bj = j
                        bk = k
    if bi < 0:
        return best, None
    return best, (bi, bj, bk)


def triangle_max(const double[:, ::1] d, const Py_ssize_t[::1] firsts):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t a, i, j, k
    cdef Py_ssize_t bi = -1, bj = -1, bk = -1
    cdef double v
    cdef double best = -INFINITY
    with nogil:
        for a in range(firsts.shape[0]):
            i = firsts[a]
            for j in range(i + 1, n):
                for k in range(n):
                    if k == i or k == j:
                        continue
                    v = (d[i, j] - d[i, k]) - d[k, j]
                    if v > best:
                        best = v
                        bi = i
                        bj = j
                        bk = k
    if bi < 0:
        return best, None
    return best, (bi, bj, bk)
