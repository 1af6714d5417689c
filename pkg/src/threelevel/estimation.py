"""Two-phase estimation: QFI matrix, compatibility, Cramer-Rao bounds and the ratio gamma.

Closed forms depend only on the Rabi frequencies, the detuning and t; the
laser phases drop out.  The numeric path differentiates the state amplitudes
with respect to phi2 and phi3 by central differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Flag, InvalidArgumentError, SingularInformationError
from .profile import DEFAULT_STEP, numeric_profile, time_grid
from .qsystem import DriveParams, PureState, eigenfrequencies

# below this a QFI entry or determinant counts as numerically zero
ZERO_TOL = 1e-14
# gamma -> 2 as t -> 0+ on the exact state, where F itself is 0/0
GAMMA_AT_ORIGIN = 2.0
QFI_MODES = ("analytic", "numeric")


@dataclass(frozen=True)
class QfiMatrix:
    f22: float
    f33: float
    f23: float

    @property
    def det(self) -> float:
        return self.f22 * self.f33 - self.f23 * self.f23

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.f22, self.f23], [self.f23, self.f33]])

    def is_psd(self, tol: float = 1e-10) -> bool:
        return self.f22 >= -tol and self.f33 >= -tol and self.det >= -tol


@dataclass(frozen=True)
class Compatibility:
    imag_overlap: float
    quantumness: float | Flag
    uhlmann: np.ndarray


@dataclass(frozen=True)
class StrategyReport:
    var_ind_phi2: float | Flag
    var_ind_phi3: float | Flag
    var_sim_phi2: float | Flag
    var_sim_phi3: float | Flag
    delta_ind: float | Flag
    delta_sim: float | Flag
    gamma: float | Flag
    quantumness: float | Flag


def _scalar_or_array(t, values):
    return float(values[0]) if np.ndim(t) == 0 else values


def _denominators(p: DriveParams):
    wi, _, wk = eigenfrequencies(p)
    s = p.rabi_sq
    return wi, wk, 4 * wi * wi + s, 4 * wk * wk + s, s


def kappa(p: DriveParams, t, cross_sign: float = 1.0):
    """kappa(t) exactly as printed; ``cross_sign`` exists only for fault injection."""
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    wi, wk, di, dk, _ = _denominators(p)
    val = (
        wi**2 / di**2
        + wk**2 / dk**2
        + cross_sign * 2 * wi * wk * np.cos((wi - wk) * tt) / (di * dk)
    )
    return _scalar_or_array(t, val)


def xi(p: DriveParams, t):
    """xi(t) exactly as printed."""
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


def closed_form_qfi(p: DriveParams, t, kappa_fn=kappa, xi_fn=xi):
    """(F22, F33, F23) arrays from kappa and xi on a validated grid."""
    tt = time_grid(t)
    a2 = p.vartheta2**2
    b = a2 * p.vartheta3**2
    q = b * np.asarray(xi_fn(p, tt))
    big_p = 4 * a2 * np.asarray(kappa_fn(p, tt)) + q
    return 4 * big_p * (1 - big_p), 4 * q * (1 - q), 4 * q * (1 - big_p)


def qfi_phi2_analytic(p: DriveParams, t):
    return _scalar_or_array(t, closed_form_qfi(p, t)[0])


def qfi_phi3_analytic(p: DriveParams, t):
    return _scalar_or_array(t, closed_form_qfi(p, t)[1])


def qfi_cross_analytic(p: DriveParams, t):
    return _scalar_or_array(t, closed_form_qfi(p, t)[2])


def qfi_pure_generic(psi, dpsi_2, dpsi_3, tol: float = 1e-10) -> QfiMatrix:
    """Pure-state QFI matrix from the state and its two parameter derivatives."""
    amps = psi.amps if isinstance(psi, PureState) else np.asarray(psi, dtype=complex)
    if abs(np.vdot(amps, amps).real - 1.0) > tol:
        raise InvalidArgumentError("state must be normalized")
    d = (np.asarray(dpsi_2, dtype=complex), np.asarray(dpsi_3, dtype=complex))
    if any(v.shape != amps.shape for v in d):
        raise InvalidArgumentError("derivatives must have the same shape as the state")
    g = [np.vdot(amps, v) for v in d]

    def entry(m, n):
        return 4 * (np.vdot(d[m], d[n]) - np.conj(g[m]) * g[n]).real

    return QfiMatrix(float(entry(0, 0)), float(entry(1, 1)), float(entry(0, 1)))


def qfi_grid(p: DriveParams, t, mode: str = "analytic", state: str = "exact", h: float = DEFAULT_STEP):
    """(F22, F33, F23) arrays over a time grid."""
    if mode == "analytic":
        return closed_form_qfi(p, t)
    if mode == "numeric":
        prof = numeric_profile(p, t, state, h)
        return prof["qfi22"], prof["qfi33"], prof["qfi23"]
    raise InvalidArgumentError(f"unknown mode {mode!r}; expected one of {QFI_MODES}")


def qfi_matrix(p: DriveParams, t: float, mode: str = "analytic", state: str = "exact",
               h: float = DEFAULT_STEP) -> QfiMatrix:
    f22, f33, f23 = qfi_grid(p, [t], mode, state, h)
    return QfiMatrix(float(f22[0]), float(f33[0]), float(f23[0]))


def quantumness_value(f22: float, f33: float, f23: float, u23: float) -> float | Flag:
    """R = largest |eigenvalue| of 2i F^-1 U, or the singular flag."""
    det = f22 * f33 - f23 * f23
    if det < ZERO_TOL:
        return Flag.SINGULAR
    f_inv = np.array([[f33, -f23], [-f23, f22]]) / det
    u = np.array([[0.0, u23], [-u23, 0.0]])
    return float(np.max(np.abs(np.linalg.eigvals(2j * f_inv @ u))))


def compatibility(p: DriveParams, t: float, state: str = "exact", h: float = DEFAULT_STEP) -> Compatibility:
    prof = numeric_profile(p, [t], state, h)
    u23 = float(prof["uhlmann23"][0])
    r = quantumness_value(
        float(prof["qfi22"][0]), float(prof["qfi33"][0]), float(prof["qfi23"][0]), u23
    )
    return Compatibility(float(prof["imag_overlap"][0]), r, np.array([[0.0, u23], [-u23, 0.0]]))


def individual_bounds(F: QfiMatrix):
    """(1/F22, 1/F33); an entry without information is flagged as unbounded."""
    return tuple(1.0 / f if f > ZERO_TOL else Flag.UNBOUNDED for f in (F.f22, F.f33))


def simultaneous_bounds(F: QfiMatrix):
    """(F33/det, F22/det) from the inverse QFI matrix."""
    det = F.det
    if det <= ZERO_TOL:
        raise SingularInformationError(f"QFI matrix is singular (det = {det!r})")
    return F.f33 / det, F.f22 / det


def _strategy(f22, f33, f23, t, quantumness=None) -> StrategyReport:
    F = QfiMatrix(f22, f33, f23)
    ind2, ind3 = individual_bounds(F)
    try:
        sim2, sim3 = simultaneous_bounds(F)
    except SingularInformationError:
        sim2 = sim3 = delta_sim = Flag.SINGULAR
    else:
        delta_sim = 0.5 * (f22 + f33) / F.det
    if isinstance(ind2, Flag) or isinstance(ind3, Flag):
        delta_ind = Flag.UNBOUNDED
    else:
        delta_ind = ind2 + ind3
    if f22 > ZERO_TOL and f33 > ZERO_TOL:
        gamma = 2 * F.det / (f22 * f33)
    elif t == 0 and f22 <= ZERO_TOL and f33 <= ZERO_TOL:
        gamma = GAMMA_AT_ORIGIN
    else:
        gamma = Flag.SINGULAR
    if quantumness is None:
        quantumness = Flag.SINGULAR
    return StrategyReport(ind2, ind3, sim2, sim3, delta_ind, delta_sim, gamma, quantumness)


def strategy_columns(f22, f33, f23, t, uhlmann=None) -> dict:
    """Per-point strategy quantities over a grid; cells are floats or flags."""
    cols = {k: [] for k in StrategyReport.__dataclass_fields__}
    u = np.zeros(len(t)) if uhlmann is None else uhlmann
    for a, b, c, tt, uu in zip(f22, f33, f23, t, u):
        a, b, c = float(a), float(b), float(c)
        rep = _strategy(a, b, c, float(tt), quantumness_value(a, b, c, float(uu)))
        for k in cols:
            cols[k].append(getattr(rep, k))
    return cols


def strategy_report(p: DriveParams, t: float, mode: str = "analytic", state: str = "exact",
                    h: float = DEFAULT_STEP) -> StrategyReport:
    """Individual and simultaneous bounds, total variances, gamma and quantumness at one instant.

    Quantumness always comes from the numeric Uhlmann term, since no closed
    form for it exists; it is combined with F from the requested mode.
    """
    F = qfi_matrix(p, t, mode, state, h)
    comp = compatibility(p, t, state, h)
    r = quantumness_value(F.f22, F.f33, F.f23, float(comp.uhlmann[0, 1]))
    return _strategy(F.f22, F.f33, F.f23, float(t), r)


def is_finite_number(x) -> bool:
    return not isinstance(x, Flag) and math.isfinite(x)
