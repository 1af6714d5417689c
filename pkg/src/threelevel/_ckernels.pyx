# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Jacobi eigensolver and the finite-difference metrology profile.

Mirrors ``_pykernels`` line for line in algorithm; results agree with it to
rounding.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, cos, sin

cnp.import_array()

STATE_EXACT = 0
STATE_LARGE_DETUNING = 1

PROFILE_COLUMNS = (
    "qfi22",
    "qfi33",
    "qfi23",
    "imag_overlap",
    "uhlmann23",
    "hss2",
    "hss3",
    "coherence",
    "norm",
)

cdef int[3] _PP
cdef int[3] _QQ
_PP[:] = [0, 0, 1]
_QQ[:] = [1, 2, 2]


cdef inline double cabs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double complex cexpi(double x) noexcept nogil:
    return cos(x) + 1j * sin(x)


cdef inline double complex conj(double complex z) noexcept nogil:
    return z.real - 1j * z.imag


def jacobi_eigh3(h, double tol=1e-15, int max_sweeps=60):
    """Eigen-decomposition of a 3x3 complex Hermitian matrix by cyclic Jacobi rotations."""
    cdef double complex a[3][3]
    cdef double complex v[3][3]
    cdef int r, c, k, p, q, piv, sweep
    cdef double scale = 0.0, off, rr, tau, t, cc, s
    cdef double complex b, phase, u_qp, u_qq, akp, akq, apk, aqk

    hh = np.asarray(h, dtype=complex)
    for r in range(3):
        for c in range(3):
            a[r][c] = hh[r, c]
            v[r][c] = 1.0 if r == c else 0.0
            scale += cabs2(a[r][c])
    scale = sqrt(scale)
    if scale == 0.0:
        scale = 1.0

    for sweep in range(max_sweeps):
        off = 0.0
        for r in range(3):
            for c in range(3):
                if r != c:
                    off += cabs2(a[r][c])
        if sqrt(off) <= tol * scale:
            break
        for piv in range(3):
            p = _PP[piv]
            q = _QQ[piv]
            b = a[p][q]
            rr = sqrt(cabs2(b))
            if rr < 1e-300:
                continue
            phase = conj(b / rr)
            tau = (a[q][q].real - a[p][p].real) / (2.0 * rr)
            t = (1.0 if tau >= 0 else -1.0) / (fabs(tau) + sqrt(1.0 + tau * tau))
            cc = 1.0 / sqrt(1.0 + t * t)
            s = t * cc
            u_qp = -s * phase
            u_qq = cc * phase
            for k in range(3):
                akp = a[k][p]
                akq = a[k][q]
                a[k][p] = akp * cc + akq * u_qp
                a[k][q] = akp * s + akq * u_qq
            for k in range(3):
                apk = a[p][k]
                aqk = a[q][k]
                a[p][k] = cc * apk + conj(u_qp) * aqk
                a[q][k] = s * apk + conj(u_qq) * aqk
            a[p][q] = 0.0
            a[q][p] = 0.0
            a[p][p] = a[p][p].real
            a[q][q] = a[q][q].real
            for k in range(3):
                akp = v[k][p]
                akq = v[k][q]
                v[k][p] = akp * cc + akq * u_qp
                v[k][q] = akp * s + akq * u_qq

    order = sorted(range(3), key=lambda i: a[i][i].real)
    w = np.array([a[i][i].real for i in order])
    vecs = np.empty((3, 3), dtype=complex)
    for r in range(3):
        for c in range(3):
            vecs[r, c] = v[r][order[c]]
    return w, vecs


cdef struct Coeffs:
    double wi
    double wk
    double complex ai[3]
    double complex aj[3]
    double complex ak[3]


cdef void _coefficients(double v2, double v3, double delta, double phi2, double phi3,
                        int kind, Coeffs* out) noexcept nogil:
    cdef double s = v2 * v2 + v3 * v3
    cdef double root = sqrt(delta * delta + s)
    cdef double wi = 0.5 * (delta - root)
    cdef double wk = 0.5 * (delta + root)
    cdef double complex e2 = cexpi(phi2)
    cdef double complex e3 = cexpi(phi3)
    cdef double ni = 1.0 / sqrt(4 * wi * wi + s)
    cdef double nk = 1.0 / sqrt(4 * wk * wk + s)
    cdef double nj = 1.0 / sqrt(s)
    cdef double complex vi[3]
    cdef double complex vj[3]
    cdef double complex vk[3]
    cdef double complex ci, cj, ck
    cdef int n
    vi[0] = -v2 * e2 * ni
    vi[1] = 2 * wi * ni
    vi[2] = -v3 * conj(e3) * ni
    vk[0] = -v2 * e2 * nk
    vk[1] = 2 * wk * nk
    vk[2] = -v3 * conj(e3) * nk
    vj[0] = -v3 * e3 * nj
    vj[1] = 0.0
    vj[2] = v2 * conj(e2) * nj
    if kind == 0:
        ci = conj(vi[0])
        cj = conj(vj[0])
        ck = conj(vk[0])
    else:
        ci = -nj * v2 * conj(e2)
        cj = -nj * v3 * conj(e3)
        ck = 0.0
    for n in range(3):
        out.ai[n] = ci * vi[n]
        out.aj[n] = cj * vj[n]
        out.ak[n] = ck * vk[n]
    out.wi = wi
    out.wk = wk


cdef inline void _amps(Coeffs* c, double complex ei, double complex ek, double t, int kind,
                       double complex* out) noexcept nogil:
    # ei, ek = exp(-i w_i t), exp(-i w_k t); the phases never enter the frequencies
    cdef int n
    if kind == 0 and t == 0.0:
        out[0] = 1.0
        out[1] = 0.0
        out[2] = 0.0
        return
    for n in range(3):
        out[n] = c.ai[n] * ei + c.aj[n] + c.ak[n] * ek


def state_grid(double v2, double v3, double delta, double phi2, double phi3, t, int kind):
    """Bare-basis amplitudes on a time grid, shape (len(t), 3)."""
    cdef double[::1] tt = np.ascontiguousarray(t, dtype=float)
    cdef Py_ssize_t m, size = tt.shape[0]
    out = np.empty((size, 3), dtype=complex)
    cdef double complex[:, ::1] o = out
    cdef Coeffs c
    cdef double complex amp[3]
    _coefficients(v2, v3, delta, phi2, phi3, kind, &c)
    with nogil:
        for m in range(size):
            _amps(&c, cexpi(-c.wi * tt[m]), cexpi(-c.wk * tt[m]), tt[m], kind, amp)
            o[m, 0] = amp[0]
            o[m, 1] = amp[1]
            o[m, 2] = amp[2]
    return out


cdef inline double _hss_fd(double complex* p, double complex* m, double h) noexcept nogil:
    # sqrt(1/2 sum |(p p^+ - m m^+) / 2h|^2)
    cdef double acc = 0.0
    cdef double complex d
    cdef int r, c
    for r in range(3):
        for c in range(3):
            d = p[r] * conj(p[c]) - m[r] * conj(m[c])
            acc += cabs2(d)
    return sqrt(0.5 * acc) / (2 * h)


def numeric_profile(double v2, double v3, double delta, double phi2, double phi3,
                    t, int kind, double h):
    """Definition-based metrology quantities from central phase differences."""
    cdef double[::1] tt = np.ascontiguousarray(t, dtype=float)
    cdef Py_ssize_t m, size = tt.shape[0]
    out = np.empty((size, 9), dtype=float)
    cdef double[:, ::1] o = out
    cdef Coeffs c0, cp2, cm2, cp3, cm3
    cdef double complex psi[3]
    cdef double complex p2[3]
    cdef double complex m2[3]
    cdef double complex p3[3]
    cdef double complex m3[3]
    cdef double complex d2[3]
    cdef double complex d3[3]
    cdef double complex g2, g3, n22, n33, ov
    cdef double complex ei, ek
    cdef double pops[3]
    cdef double tot, sq, inv2h = 1.0 / (2 * h)
    cdef int n

    _coefficients(v2, v3, delta, phi2, phi3, kind, &c0)
    _coefficients(v2, v3, delta, phi2 + h, phi3, kind, &cp2)
    _coefficients(v2, v3, delta, phi2 - h, phi3, kind, &cm2)
    _coefficients(v2, v3, delta, phi2, phi3 + h, kind, &cp3)
    _coefficients(v2, v3, delta, phi2, phi3 - h, kind, &cm3)

    with nogil:
        for m in range(size):
            ei = cexpi(-c0.wi * tt[m])
            ek = cexpi(-c0.wk * tt[m])
            _amps(&c0, ei, ek, tt[m], kind, psi)
            _amps(&cp2, ei, ek, tt[m], kind, p2)
            _amps(&cm2, ei, ek, tt[m], kind, m2)
            _amps(&cp3, ei, ek, tt[m], kind, p3)
            _amps(&cm3, ei, ek, tt[m], kind, m3)
            g2 = 0.0
            g3 = 0.0
            n22 = 0.0
            n33 = 0.0
            ov = 0.0
            for n in range(3):
                d2[n] = (p2[n] - m2[n]) * inv2h
                d3[n] = (p3[n] - m3[n]) * inv2h
                g2 = g2 + conj(psi[n]) * d2[n]
                g3 = g3 + conj(psi[n]) * d3[n]
                n22 = n22 + conj(d2[n]) * d2[n]
                n33 = n33 + conj(d3[n]) * d3[n]
                ov = ov + conj(d2[n]) * d3[n]
            o[m, 0] = 4 * (n22 - conj(g2) * g2).real
            o[m, 1] = 4 * (n33 - conj(g3) * g3).real
            o[m, 2] = 4 * (ov - conj(g2) * g3).real
            o[m, 3] = ov.imag
            o[m, 4] = 4 * (ov - conj(g2) * g3).imag
            o[m, 5] = _hss_fd(p2, m2, h)
            o[m, 6] = _hss_fd(p3, m3, h)
            tot = 0.0
            sq = 0.0
            for n in range(3):
                pops[n] = cabs2(psi[n])
                tot += pops[n]
                sq += pops[n] * pops[n]
            o[m, 7] = tot * tot - sq
            o[m, 8] = sqrt(tot)
    return out
