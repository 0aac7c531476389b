# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled brute-force enumeration over the discretised decision grid."""

cimport cython
from libc.stdlib cimport free, malloc


cdef inline double _joint(double L, double S, double beta) nogil:
    cdef double den
    if beta <= 0.0:
        return S
    if beta >= 1.0:
        return L
    den = (1.0 - beta) * L + beta * S
    if den <= 0.0:
        return 0.0
    return L * S / den


def enumerate_grid(
    const double[::1] betas,
    const double[::1] b_ups,
    const double[::1] ms,
    const double[::1] h_vals,
    const double[::1] levels,
    const double[::1] g_vals,
    double n_frames,
    double feature_bits,
    double pixels,
    double se_up,
    double se_down,
    double bandwidth,
):
    """Best (value, i_beta, i_up, i_m, i_level) over all feasible grid points.

    Scan order is beta, b_up, M, level; only a strictly larger value replaces
    the incumbent, so ties keep the lexicographically smallest index.
    Returns value -1 when nothing is feasible.
    """
    cdef Py_ssize_t nb = betas.shape[0], nu = b_ups.shape[0]
    cdef Py_ssize_t nm = ms.shape[0], nl = levels.shape[0]
    cdef Py_ssize_t i, j, k, l
    cdef double beta, up, cap_up, cap_down, val, S
    cdef double best = -1.0
    cdef Py_ssize_t bi = -1, bj = -1, bk = -1, bl = -1
    # uplink load of each level depends on beta only
    cdef double *load = <double *> malloc(max(nl, 1) * sizeof(double))
    if load == NULL:
        raise MemoryError()
    with nogil:
        for i in range(nb):
            beta = betas[i]
            for l in range(nl):
                load[l] = beta * n_frames * (feature_bits + pixels * levels[l])
            for j in range(nu):
                up = b_ups[j]
                if up < 0.0 or up > bandwidth:
                    continue
                cap_up = up * se_up
                cap_down = (bandwidth - up) * se_down
                for k in range(nm):
                    if ms[k] > cap_down:
                        continue
                    S = h_vals[k]
                    for l in range(nl):
                        if load[l] > cap_up:
                            continue
                        val = _joint(g_vals[l], S, beta)
                        if val > best:
                            best = val
                            bi = i
                            bj = j
                            bk = k
                            bl = l
    free(load)
    return best, bi, bj, bk, bl
