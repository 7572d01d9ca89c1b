# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled event loop for the pair-interaction jump process.

Bit-compatible with the pure-Python fallback in ``_pyloop``: both consume the
same uniform-double stream from the BitGenerator and use identical IEEE
arithmetic (the extension is compiled with -ffp-contract=off so no FMA
contraction sneaks in).  Keep the draw protocol in lock-step with _pyloop.py.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport M_PI, cos, fabs, floor, log, log1p, sqrt

from numpy.random cimport bitgen_t

cdef double TWO_PI = 2.0 * M_PI


cdef inline double _next(bitgen_t *bg) nogil:
    return bg.next_double(bg.state)


cdef inline double _wrap(double x) nogil:
    return x - TWO_PI * floor((x + M_PI) / TWO_PI)


cdef long _loop(double *angles, long n, double rate, double eps, int family,
                double param, double *snaps, long n_snaps, double t_end,
                double *out, long cap, bitgen_t *bg) nogil:
    cdef double bound = M_PI / eps
    cdef double clock = 0.0
    cdef long si = 0, events = 0
    cdef long i, j, l, rejects
    cdef double u, ua, ub, dt, t_next, x
    while clock < t_end:
        u = _next(bg)
        dt = -log1p(-u) / rate
        t_next = clock + dt
        while si < n_snaps and snaps[si] <= t_next:
            for l in range(n):
                out[si * n + l] = angles[l]
            si += 1
        if t_next >= t_end:
            clock = t_next
            break
        u = _next(bg)
        i = <long>(u * n)
        if i >= n:
            i = n - 1
        u = _next(bg)
        j = <long>(u * (n - 1))
        if j >= n - 1:
            j = n - 2
        if j >= i:
            j += 1
        rejects = 0
        x = 0.0
        while True:
            if family == 0:
                ua = _next(bg)
                ub = _next(bg)
                if ua > 0.0:
                    x = param * (sqrt(-2.0 * log(ua)) * cos(TWO_PI * ub))
                    if fabs(x) <= bound:
                        break
            elif family == 1:
                ua = _next(bg)
                if ua > 0.0:
                    if ua < 0.5:
                        x = param * log(2.0 * ua)
                    else:
                        x = -param * log(2.0 - 2.0 * ua)
                    if fabs(x) <= bound:
                        break
            else:
                ua = _next(bg)
                x = param * (2.0 * ua - 1.0)
                if fabs(x) <= bound:
                    break
            rejects += 1
            if rejects >= cap:
                return -1
        angles[j] = _wrap(angles[i] + eps * x)
        clock = t_next
        events += 1
    while si < n_snaps:
        for l in range(n):
            out[si * n + l] = angles[l]
        si += 1
    return events


def run_event_loop(object gen, double[::1] angles, double[:, ::1] out,
                   double[::1] snap_times, double rate, double eps, int family,
                   double param, double t_end, long reject_cap=1000000):
    """Signature mirror of _pyloop.run_event_loop; ``gen`` is a numpy Generator."""
    cdef object bit_generator = gen.bit_generator
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(
        bit_generator.capsule, "BitGenerator")
    cdef long n = angles.shape[0]
    cdef long n_snaps = snap_times.shape[0]
    cdef double *sp = NULL
    cdef double *op = NULL
    cdef long events
    if n_snaps > 0:
        sp = &snap_times[0]
        op = &out[0, 0]
    with bit_generator.lock:
        with nogil:
            events = _loop(&angles[0], n, rate, eps, family, param, sp,
                           n_snaps, t_end, op, reject_cap, bg)
    if events < 0:
        raise RuntimeError(
            "noise rejection cap exceeded (1e6); epsilon too large for kernel support")
    return events
