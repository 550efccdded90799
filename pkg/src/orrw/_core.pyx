# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_fallback`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, log1p
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

NAME = "cython"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double unit(uint64_t z) nogil:
    return <double>(z >> 11) * (1.0 / 9007199254740992.0)


def range_batch(double pu, int64_t n, keys):
    cdef uint64_t[::1] kv = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef Py_ssize_t m = kv.shape[0], j
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef int64_t t, x, r
    cdef uint64_t st
    cdef double u
    with nogil:
        for j in range(m):
            x = 0
            r = 0
            st = kv[j]
            for t in range(n):
                st = st + GOLDEN
                u = unit(mix64(st))
                if x == 0:
                    x = 1
                elif x < r:
                    if u < 0.5:
                        x += 1
                    else:
                        x -= 1
                else:
                    if u < pu:
                        x += 1
                    else:
                        x -= 1
                if x > r:
                    r = x
            ov[j] = r
    return out


def range_records(double pu, int64_t n, uint64_t key):
    cdef list out = []
    cdef int64_t t, x = 0, r = 0
    cdef uint64_t st = key
    cdef double u
    for t in range(1, n + 1):
        st = st + GOLDEN
        u = unit(mix64(st))
        if x == 0:
            x = 1
        elif x < r:
            x += 1 if u < 0.5 else -1
        else:
            x += 1 if u < pu else -1
        if x > r:
            r = x
            out.append(t)
    return np.asarray(out, dtype=np.int64)


def first_passage_direct(double pu, int64_t k, keys, int64_t max_steps):
    cdef uint64_t[::1] kv = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef Py_ssize_t m = kv.shape[0], j
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef int64_t t, x, r
    cdef uint64_t st
    cdef double u
    with nogil:
        for j in range(m):
            if k <= 0:
                ov[j] = 0
                continue
            x = 0
            r = 0
            t = 0
            st = kv[j]
            ov[j] = -1
            while t < max_steps:
                t += 1
                st = st + GOLDEN
                u = unit(mix64(st))
                if x == 0:
                    x = 1
                elif x < r:
                    if u < 0.5:
                        x += 1
                    else:
                        x -= 1
                else:
                    if u < pu:
                        x += 1
                    else:
                        x -= 1
                if x > r:
                    r = x
                    if r >= k:
                        ov[j] = t
                        break
    return out


cdef int64_t _decomp_one(double log_fail, int64_t k, uint64_t key,
                         int64_t max_steps) nogil:
    cdef uint64_t st = key
    cdef int64_t s = 1, i, f, fails, pos
    cdef double u
    for i in range(1, k):
        s += 1
        st = st + GOLDEN
        u = unit(mix64(st))
        if log_fail < 0.0:
            fails = <int64_t>floor(log1p(-u) / log_fail)
        else:
            fails = 0
        for f in range(fails):
            s += 1
            pos = i - 1
            while pos != i:
                if pos == 0:
                    pos = 1
                else:
                    st = st + GOLDEN
                    if unit(mix64(st)) < 0.5:
                        pos += 1
                    else:
                        pos -= 1
                s += 1
                if s > max_steps:
                    return -1
        if s > max_steps:
            return -1
    return s


def first_passage_decomp(double pu, double log_fail, int64_t k, keys,
                         int64_t max_steps):
    cdef uint64_t[::1] kv = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef Py_ssize_t m = kv.shape[0], j
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] ov = out
    with nogil:
        for j in range(m):
            ov[j] = _decomp_one(log_fail, k, kv[j], max_steps)
    return out


def dp_advance(double[:, ::1] P, double[:, ::1] Q, int64_t n, Py_ssize_t rlo,
               Py_ssize_t rhi, double pu, double eps, Py_ssize_t steps,
               double[:, ::1] pow_out, double[:, ::1] rise_out,
               double[::1] pruned_out):
    cdef Py_ssize_t L = pow_out.shape[1] - 1
    cdef Py_ssize_t cap = P.shape[0] - 1
    cdef double[:, ::1] src = P
    cdef double[:, ::1] dst = Q
    cdef double[:, ::1] tmp
    cdef double[::1] rowmass = np.zeros(cap + 1)
    cdef Py_ssize_t j, r, y, l, nlo, nhi
    cdef double v, m, pd = 1.0 - pu, pruned, pw, rf
    cdef bint swapped = False
    if rhi + steps > cap:
        raise ValueError("dp_advance: capacity exceeded")
    with nogil:
        for j in range(steps):
            nlo = rlo if rlo > 1 else 1
            nhi = rhi + 1
            for r in range(nlo, nhi + 1):
                m = 0.0
                y = (n + 1) % 2
                while y <= r:
                    v = 0.0
                    if r <= rhi:
                        if y == 1:
                            v = src[r, 0]
                        elif y >= 2:
                            v = 0.5 * src[r, y - 1]
                        if y + 1 == r:
                            v = v + pd * src[r, y + 1]
                        elif y + 1 < r:
                            v = v + 0.5 * src[r, y + 1]
                    if y == r and r - 1 >= rlo:
                        if r == 1:
                            v = v + src[0, 0]
                        else:
                            v = v + pu * src[r - 1, r - 1]
                    dst[r, y] = v
                    m = m + v
                    y += 2
                rowmass[r] = m
            pruned = 0.0
            while nlo < nhi and rowmass[nlo] < eps:
                pruned = pruned + rowmass[nlo]
                nlo += 1
            while nhi > nlo and rowmass[nhi] < eps:
                pruned = pruned + rowmass[nhi]
                nhi -= 1
            pruned_out[j] = pruned
            for l in range(L + 1):
                pow_out[j, l] = 0.0
                rise_out[j, l] = 0.0
            for r in range(nlo, nhi + 1):
                pw = rowmass[r]
                rf = pw * r
                for l in range(L + 1):
                    pow_out[j, l] += pw
                    rise_out[j, l] += rf
                    pw = pw * r
                    rf = rf * (r + l + 1)
            rlo = nlo
            rhi = nhi
            n += 1
            tmp = src
            src = dst
            dst = tmp
            swapped = not swapped
    return rlo, rhi, swapped
