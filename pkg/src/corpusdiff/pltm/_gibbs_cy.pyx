# cython: language_level=3
"""Compiled collapsed Gibbs sweep.

Mirrors the pure-Python kernel operation for operation; given the same
uniforms both kernels emit bit-identical assignment streams.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

KERNEL_NAME = "cython"


def sweep(
    cnp.int32_t[::1] z,
    cnp.int32_t[::1] tuple_idx,
    cnp.int32_t[::1] pass_idx,
    cnp.int32_t[::1] lang_idx,
    cnp.int32_t[::1] word_idx,
    cnp.int32_t[:, ::1] n_dk,
    cnp.int32_t[:, ::1] n_pk,
    cnp.int32_t[:, ::1] n_kw,
    cnp.int32_t[:, ::1] n_lk,
    cnp.float64_t[::1] eta_v,
    double alpha,
    double eta,
    cnp.float64_t[::1] uniforms,
):
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t k_count = n_dk.shape[1]
    cdef Py_ssize_t i, k
    cdef int d, p, lang, w, k_old, k_new
    cdef double acc, u, val
    cdef cnp.float64_t[::1] cum = np.empty(k_count, dtype=np.float64)

    for i in range(n):
        d = tuple_idx[i]
        p = pass_idx[i]
        lang = lang_idx[i]
        w = word_idx[i]
        k_old = z[i]
        n_dk[d, k_old] -= 1
        n_pk[p, k_old] -= 1
        n_kw[k_old, w] -= 1
        n_lk[lang, k_old] -= 1

        acc = 0.0
        for k in range(k_count):
            val = (n_dk[d, k] + alpha) * (n_kw[k, w] + eta) / (n_lk[lang, k] + eta_v[lang])
            acc = acc + val
            cum[k] = acc
        u = uniforms[i] * cum[k_count - 1]
        k_new = 0
        while k_new < k_count and cum[k_new] <= u:
            k_new += 1
        if k_new >= k_count:
            k_new = <int>(k_count - 1)

        z[i] = k_new
        n_dk[d, k_new] += 1
        n_pk[p, k_new] += 1
        n_kw[k_new, w] += 1
        n_lk[lang, k_new] += 1
