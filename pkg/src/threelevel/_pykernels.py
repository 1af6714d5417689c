"""Pure-Python/numpy kernels; reference implementation and import fallback.

Same API as the compiled ``_ckernels`` module.  Nothing here calls the
closed-form cubic roots used elsewhere for the spectrum: the eigensolver is a
cyclic Jacobi iteration, so it can serve as an independent oracle.
"""
import cmath
import math

import numpy as np

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

# (p, q) pivots of one cyclic sweep over a 3x3 matrix
_PIVOTS = ((0, 1), (0, 2), (1, 2))


def jacobi_eigh3(h, tol=1e-15, max_sweeps=60):
    """Eigen-decomposition of a 3x3 complex Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ascending and eigenvectors in the
    columns of ``v``.
    """
    a = [[complex(h[r][c]) for c in range(3)] for r in range(3)]
    v = [[1.0 + 0j if r == c else 0j for c in range(3)] for r in range(3)]
    scale = math.sqrt(sum(abs(x) ** 2 for row in a for x in row)) or 1.0

    for _ in range(max_sweeps):
        off = math.sqrt(sum(abs(a[r][c]) ** 2 for r in range(3) for c in range(3) if r != c))
        if off <= tol * scale:
            break
        for p, q in _PIVOTS:
            b = a[p][q]
            r = abs(b)
            if r < 1e-300:
                continue
            phase = (b / r).conjugate()
            tau = (a[q][q].real - a[p][p].real) / (2.0 * r)
            t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            # U = diag(1, e^{-i alpha}) @ [[c, s], [-s, c]] on the (p, q) plane
            u_pp, u_pq, u_qp, u_qq = c, s, -s * phase, c * phase
            for k in range(3):
                akp, akq = a[k][p], a[k][q]
                a[k][p] = akp * u_pp + akq * u_qp
                a[k][q] = akp * u_pq + akq * u_qq
            for k in range(3):
                apk, aqk = a[p][k], a[q][k]
                a[p][k] = u_pp * apk + u_qp.conjugate() * aqk
                a[q][k] = u_pq * apk + u_qq.conjugate() * aqk
            a[p][q] = a[q][p] = 0j
            a[p][p] = complex(a[p][p].real)
            a[q][q] = complex(a[q][q].real)
            for k in range(3):
                vkp, vkq = v[k][p], v[k][q]
                v[k][p] = vkp * u_pp + vkq * u_qp
                v[k][q] = vkp * u_pq + vkq * u_qq

    order = sorted(range(3), key=lambda i: a[i][i].real)
    w = np.array([a[i][i].real for i in order])
    vecs = np.array([[v[r][i] for i in order] for r in range(3)], dtype=complex)
    return w, vecs


def _coefficients(v2, v3, delta, phi2, phi3, kind):
    """Constant vectors (A_i, A_j, A_k) with psi(t) = A_i e^{-i w_i t} + A_j + A_k e^{-i w_k t}."""
    s = v2 * v2 + v3 * v3
    root = math.sqrt(delta * delta + s)
    wi = 0.5 * (delta - root)
    wk = 0.5 * (delta + root)
    e2 = cmath.exp(1j * phi2)
    e3 = cmath.exp(1j * phi3)
    vi = np.array([-v2 * e2, 2 * wi, -v3 * e3.conjugate()]) / math.sqrt(4 * wi * wi + s)
    vk = np.array([-v2 * e2, 2 * wk, -v3 * e3.conjugate()]) / math.sqrt(4 * wk * wk + s)
    vj = np.array([-v3 * e3, 0, v2 * e2.conjugate()]) / math.sqrt(s)
    if kind == STATE_EXACT:
        return wi, wk, vi[0].conjugate() * vi, vj[0].conjugate() * vj, vk[0].conjugate() * vk
    scale = -1.0 / math.sqrt(s)
    return wi, wk, scale * v2 * e2.conjugate() * vi, scale * v3 * e3.conjugate() * vj, 0 * vk


def state_grid(v2, v3, delta, phi2, phi3, t, kind):
    """Bare-basis amplitudes on a time grid, shape (len(t), 3)."""
    t = np.ascontiguousarray(t, dtype=float)
    wi, wk, a_i, a_j, a_k = _coefficients(v2, v3, delta, phi2, phi3, kind)
    amps = (
        np.exp(-1j * wi * t)[:, None] * a_i
        + a_j
        + np.exp(-1j * wk * t)[:, None] * a_k
    )
    if kind == STATE_EXACT:
        amps[t == 0] = (1.0, 0.0, 0.0)
    return amps


def _outer(x):
    return x[:, :, None] * x.conj()[:, None, :]


def _inner(x, y):
    return np.sum(x.conj() * y, axis=1)


def numeric_profile(v2, v3, delta, phi2, phi3, t, kind, h):
    """Definition-based metrology quantities from central phase differences.

    Columns follow ``PROFILE_COLUMNS``.
    """
    t = np.ascontiguousarray(t, dtype=float)
    psi = state_grid(v2, v3, delta, phi2, phi3, t, kind)
    p2 = state_grid(v2, v3, delta, phi2 + h, phi3, t, kind)
    m2 = state_grid(v2, v3, delta, phi2 - h, phi3, t, kind)
    p3 = state_grid(v2, v3, delta, phi2, phi3 + h, t, kind)
    m3 = state_grid(v2, v3, delta, phi2, phi3 - h, t, kind)
    d2 = (p2 - m2) / (2 * h)
    d3 = (p3 - m3) / (2 * h)

    g2 = _inner(psi, d2)
    g3 = _inner(psi, d3)
    q22 = _inner(d2, d2) - g2.conj() * g2
    q33 = _inner(d3, d3) - g3.conj() * g3
    overlap = _inner(d2, d3)
    q23 = overlap - g2.conj() * g3

    drho2 = (_outer(p2) - _outer(m2)) / (2 * h)
    drho3 = (_outer(p3) - _outer(m3)) / (2 * h)
    pops = np.abs(psi) ** 2

    out = np.empty((t.size, len(PROFILE_COLUMNS)))
    out[:, 0] = 4 * q22.real
    out[:, 1] = 4 * q33.real
    out[:, 2] = 4 * q23.real
    out[:, 3] = overlap.imag
    out[:, 4] = 4 * q23.imag
    out[:, 5] = np.sqrt(0.5 * np.sum(np.abs(drho2) ** 2, axis=(1, 2)))
    out[:, 6] = np.sqrt(0.5 * np.sum(np.abs(drho3) ** 2, axis=(1, 2)))
    out[:, 7] = np.sum(pops, axis=1) ** 2 - np.sum(pops**2, axis=1)
    out[:, 8] = np.sqrt(np.sum(pops, axis=1))
    return out
