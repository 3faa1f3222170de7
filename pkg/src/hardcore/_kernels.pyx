# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled heat-bath update loop."""

cimport cython


def run_updates(signed char[::1] state, int[:, ::1] nbr, int[::1] sites, double[::1] u, double accept):
    """Apply ``len(sites)`` heat-bath updates in place.

    Site ``s = sites[k]`` becomes occupied iff ``u[k] < accept`` and no
    neighbour is occupied; ``nbr`` rows are padded with -1.
    """
    cdef Py_ssize_t k, i, m = sites.shape[0], deg = nbr.shape[1]
    cdef int s, w
    cdef signed char val
    for k in range(m):
        s = sites[k]
        val = 0
        if u[k] < accept:
            val = 1
            for i in range(deg):
                w = nbr[s, i]
                if w >= 0 and state[w]:
                    val = 0
                    break
        state[s] = val


def run_coupled(signed char[::1] top, signed char[::1] bottom, int[:, ::1] nbr, int[::1] sites, double[::1] u, double accept):
    """Same updates on two chains with shared randomness."""
    cdef Py_ssize_t k, i, m = sites.shape[0], deg = nbr.shape[1]
    cdef int s, w
    cdef signed char a, b
    for k in range(m):
        s = sites[k]
        a = 0
        b = 0
        if u[k] < accept:
            a = 1
            b = 1
            for i in range(deg):
                w = nbr[s, i]
                if w >= 0:
                    if top[w]:
                        a = 0
                    if bottom[w]:
                        b = 0
        top[s] = a
        bottom[s] = b
