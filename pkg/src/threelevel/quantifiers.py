"""l2-norm coherence and the alpha family of statistical speeds, down to the Hilbert-Schmidt speed."""
from __future__ import annotations

import numpy as np

from .errors import FormulaDiscrepancyError, InvalidArgumentError
from .estimation import _denominators, _scalar_or_array
from .profile import time_grid
from .qsystem import DensityMatrix, DriveParams

# radicands in [-RADICAND_TOL, 0) are rounding noise and map to zero
RADICAND_TOL = 1e-12
LAMBDA_FORMS = ("as_printed", "symmetry_corrected")
# "as_printed" and "symmetry_corrected" pair the matching Lambda with sqrt(L(T+S)),
# sqrt(S(L+T)); "reweighted" keeps the corrected Lambda and weights T and S by
# the Rabi factors that convert them into level populations.
HSS_VARIANTS = ("as_printed", "symmetry_corrected", "reweighted")


def _matrix(rho) -> np.ndarray:
    return rho.rho if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def coherence_l2(rho) -> float:
    """Sum of squared moduli of the off-diagonal elements."""
    m = _matrix(rho)
    return float(np.sum(np.abs(m) ** 2) - np.sum(np.abs(np.diag(m)) ** 2))


def _phasors(p: DriveParams, t):
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    wi, wk, di, dk, s = _denominators(p)
    return tt, wi, wk, np.exp(-1j * wi * tt) / di, np.exp(-1j * wk * tt) / dk, s


def coherence_l2_analytic(p: DriveParams, t):
    """Closed-form l2 coherence built from the phasors W_i, W_k."""
    _, wi, wk, w_i, w_k, s = _phasors(p, t)
    v2, v3 = p.vartheta2, p.vartheta3
    eps = 2 * v2 * (wi * w_i + wk * w_k)
    kap = v2**2 * (w_i + w_k) + v3**2 / s
    varpi = v2 * v3 * (w_i + w_k - 1 / s)
    val = 2 * (np.abs(eps * kap) ** 2 + np.abs(eps * varpi) ** 2 + np.abs(kap * varpi) ** 2)
    return _scalar_or_array(t, val)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha >= 1:
        raise InvalidArgumentError(f"alpha must be >= 1, got {alpha!r}")
    return alpha


def classical_distance_alpha(prob_p, prob_q, alpha: float) -> float:
    """(1/2 sum |p_x - q_x|^alpha)^(1/alpha); inputs need not be normalized."""
    alpha = _check_alpha(alpha)
    a = np.asarray(prob_p, dtype=float)
    b = np.asarray(prob_q, dtype=float)
    if a.shape != b.shape:
        raise InvalidArgumentError("probability vectors must have equal length")
    if np.any(a < 0) or np.any(b < 0):
        raise InvalidArgumentError("probabilities must be non-negative")
    return float((0.5 * np.sum(np.abs(a - b) ** alpha)) ** (1 / alpha))


def classical_speed_alpha(dprob, alpha: float) -> float:
    alpha = _check_alpha(alpha)
    d = np.asarray(dprob, dtype=float)
    return float((0.5 * np.sum(np.abs(d) ** alpha)) ** (1 / alpha))


def _check_hermitian(m: np.ndarray, tol: float):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgumentError("expected a square matrix")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
        raise InvalidArgumentError("matrix is not Hermitian")


def quantum_speed_alpha(drho, alpha: float, tol: float = 1e-10) -> float:
    """(1/2 Tr|drho|^alpha)^(1/alpha) via the eigenvalues of the Hermitian derivative."""
    alpha = _check_alpha(alpha)
    m = _matrix(drho)
    _check_hermitian(m, tol)
    if alpha == 2:
        return float(np.sqrt(0.5 * np.sum(np.abs(m) ** 2)))
    ev = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return float((0.5 * np.sum(np.abs(ev) ** alpha)) ** (1 / alpha))


def hss(drho, tol: float = 1e-10) -> float:
    """Hilbert-Schmidt speed sqrt(1/2 Tr[(d rho)^2]) from squared entries, no diagonalization."""
    m = _matrix(drho)
    _check_hermitian(m, tol)
    return float(np.sqrt(0.5 * np.sum(np.abs(m) ** 2)))


def lambda_term(p: DriveParams, t, form: str = "as_printed"):
    """Lambda(t).  ``symmetry_corrected`` pairs cos(w_k t) with 4 w_k^2 + S."""
    if form not in LAMBDA_FORMS:
        raise InvalidArgumentError(f"unknown Lambda form {form!r}; expected one of {LAMBDA_FORMS}")
    tt, wi, wk, _, _, s = _phasors(p, t)
    _, _, di, dk, _ = _denominators(p)
    a4 = p.vartheta2**4
    last = di if form == "as_printed" else dk
    val = (
        a4 / di**2
        + a4 / dk**2
        + 2 * a4 * np.cos((wi - wk) * tt) / (di * dk)
        + (p.vartheta3**2 / s) ** 2
        + (2 * p.vartheta2**2 * p.vartheta3**2 / s) * (np.cos(wi * tt) / di + np.cos(wk * tt) / last)
    )
    return _scalar_or_array(t, val)


def theta_term(p: DriveParams, t):
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    wi, wk, di, dk, _ = _denominators(p)
    val = wi**2 / di**2 + wk**2 / dk**2 + 2 * wi * wk * np.cos((wi - wk) * tt) / (di * dk)
    return _scalar_or_array(t, val)


def sigma_term(p: DriveParams, t):
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    wi, wk, di, dk, s = _denominators(p)
    val = (
        1 / di**2
        + 1 / dk**2
        + 2 * np.cos((wi - wk) * tt) / (di * dk)
        + 1 / s**2
        - (2 / s) * (np.cos(wi * tt) / di + np.cos(wk * tt) / dk)
    )
    return _scalar_or_array(t, val)


def hss_radicands(p: DriveParams, t, variant: str = "as_printed"):
    """Radicands (phi2, phi3) of the closed-form HSS on a grid."""
    if variant not in HSS_VARIANTS:
        raise InvalidArgumentError(f"unknown HSS variant {variant!r}; expected one of {HSS_VARIANTS}")
    tt = time_grid(t)
    lam = np.asarray(lambda_term(p, tt, "as_printed" if variant == "as_printed" else "symmetry_corrected"))
    theta = np.asarray(theta_term(p, tt))
    sigma = np.asarray(sigma_term(p, tt))
    if variant == "reweighted":
        theta = 4 * p.vartheta2**2 * theta
        sigma = p.vartheta2**2 * p.vartheta3**2 * sigma
    return lam * (theta + sigma), sigma * (lam + theta)


def radicand_sqrt(r: np.ndarray):
    """sqrt with the rounding band mapped to 0; returns (values, discrepancy mask).

    Cells with a radicand below -RADICAND_TOL are NaN in ``values`` and True in the mask.
    """
    r = np.asarray(r, dtype=float)
    bad = r < -RADICAND_TOL
    out = np.sqrt(np.where(r < 0, 0.0, r))
    out[bad] = np.nan
    return out, bad


def hss_analytic_grid(p: DriveParams, t, variant: str = "as_printed"):
    """((hss2, bad2), (hss3, bad3)) over a grid; never raises on negative radicands."""
    r2, r3 = hss_radicands(p, t, variant)
    return radicand_sqrt(r2), radicand_sqrt(r3)


def _hss_point(p, t, variant, which):
    r = hss_radicands(p, [t], variant)[which]
    (val,), (bad,) = radicand_sqrt(r)
    if bad:
        raise FormulaDiscrepancyError(
            f"negative HSS radicand {r[0]!r} ({variant}, phi{which + 2})", value=float(r[0])
        )
    return float(val)


def hss_phi2_analytic(p: DriveParams, t: float, variant: str = "as_printed") -> float:
    return _hss_point(p, t, variant, 0)


def hss_phi3_analytic(p: DriveParams, t: float, variant: str = "as_printed") -> float:
    return _hss_point(p, t, variant, 1)
