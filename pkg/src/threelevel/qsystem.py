"""Three-level atom driven by two classical fields under two-photon resonance.

Units: hbar = 1, all frequencies are angular (rad/s) and times are in seconds,
so every ``omega * t`` is a dimensionless phase.  Basis order is the bare
basis (|l1>, |l2>, |l3>); the atom starts in |l1>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateModelError, InvalidArgumentError

STATE_KINDS = ("exact", "large_detuning")


@dataclass(frozen=True)
class DriveParams:
    """Physical knobs of the model.

    Phases are stored unreduced; everything downstream is 2*pi periodic in them.
    """

    vartheta2: float
    vartheta3: float
    delta: float = 0.0
    phi2: float = 0.0
    phi3: float = 0.0

    def __post_init__(self):
        for name in ("vartheta2", "vartheta3", "delta", "phi2", "phi3"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.vartheta2 < 0 or self.vartheta3 < 0:
            raise InvalidArgumentError("Rabi frequencies must be non-negative")
        if self.vartheta2 == 0 or self.vartheta3 == 0:
            raise DegenerateModelError(
                "degenerate model: both Rabi frequencies must be positive "
                f"(vartheta2={self.vartheta2}, vartheta3={self.vartheta3})"
            )

    @property
    def rabi_sq(self) -> float:
        """vartheta2**2 + vartheta3**2, the scale shared by every normalization."""
        return self.vartheta2**2 + self.vartheta3**2

    def replace(self, **changes) -> "DriveParams":
        values = dict(
            vartheta2=self.vartheta2,
            vartheta3=self.vartheta3,
            delta=self.delta,
            phi2=self.phi2,
            phi3=self.phi3,
        )
        values.update(changes)
        return DriveParams(**values)


@dataclass(frozen=True)
class DressedSpectrum:
    omega_i: float
    omega_j: float
    omega_k: float
    v_i: np.ndarray
    v_j: np.ndarray
    v_k: np.ndarray

    @property
    def omegas(self) -> np.ndarray:
        return np.array([self.omega_i, self.omega_j, self.omega_k])

    @property
    def vectors(self) -> np.ndarray:
        """Dressed states as the columns of a 3x3 matrix, ordered (i, j, k)."""
        return np.column_stack([self.v_i, self.v_j, self.v_k])


@dataclass(frozen=True)
class PureState:
    amps: np.ndarray
    t: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class DensityMatrix:
    rho: np.ndarray = field(repr=False)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.rho))

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


def rabi_from_field(dipole_moment: float, field_amplitude: float, hbar: float = 1.0) -> float:
    """Rabi frequency mu * E0 / hbar of one driven transition."""
    if not hbar > 0:
        raise InvalidArgumentError(f"hbar must be positive, got {hbar!r}")
    return dipole_moment * field_amplitude / hbar


def frame_shifts(Omega2: float, Omega3: float) -> tuple[float, float, float]:
    """Rotating-frame shifts (gamma1, gamma2, gamma3) that remove the time dependence."""
    return (0.0, Omega2, Omega2 - Omega3)


def build_hamiltonian(p: DriveParams) -> np.ndarray:
    """Time-independent RWA Hamiltonian with Delta2 = -Delta3 = Delta."""
    h = np.zeros((3, 3), dtype=complex)
    h[1, 1] = p.delta
    h[1, 0] = -0.5 * p.vartheta2 * np.exp(-1j * p.phi2)
    h[1, 2] = -0.5 * p.vartheta3 * np.exp(1j * p.phi3)
    h[0, 1] = np.conj(h[1, 0])
    h[2, 1] = np.conj(h[1, 2])
    return h


def cubic_residual(p: DriveParams, omega: float) -> float:
    """|w^3 - Delta w^2 - (vartheta2^2 + vartheta3^2) w / 4| for a candidate root."""
    return abs(omega**3 - p.delta * omega**2 - 0.25 * p.rabi_sq * omega)


def eigenfrequencies(p: DriveParams) -> tuple[float, float, float]:
    """Roots (omega_i, omega_j, omega_k) of the two-photon-resonance cubic, ascending."""
    root = math.sqrt(p.delta**2 + p.rabi_sq)
    return (0.5 * (p.delta - root), 0.0, 0.5 * (p.delta + root))


def approx_eigenfrequencies(p: DriveParams) -> tuple[float, float, float]:
    """Large-detuning expansion of the eigenfrequencies.

    Valid only for ``|delta| >> vartheta2, vartheta3``; the regime is not checked.
    """
    if p.delta == 0:
        raise ZeroDivisionError("large-detuning expansion needs a nonzero detuning")
    return (-p.rabi_sq / (4.0 * p.delta), 0.0, p.delta)


def _bright_vector(p: DriveParams, omega: float) -> np.ndarray:
    vec = np.array(
        [-p.vartheta2 * np.exp(1j * p.phi2), 2.0 * omega, -p.vartheta3 * np.exp(-1j * p.phi3)],
        dtype=complex,
    )
    return vec / math.sqrt(4.0 * omega**2 + p.rabi_sq)


def dressed_states(p: DriveParams) -> DressedSpectrum:
    """Eigenfrequencies and the explicit (unrephased) dressed-state vectors."""
    omega_i, omega_j, omega_k = eigenfrequencies(p)
    v_j = np.array(
        [-p.vartheta3 * np.exp(1j * p.phi3), 0.0, p.vartheta2 * np.exp(-1j * p.phi2)],
        dtype=complex,
    ) / math.sqrt(p.rabi_sq)
    return DressedSpectrum(
        omega_i, omega_j, omega_k, _bright_vector(p, omega_i), v_j, _bright_vector(p, omega_k)
    )


def initial_amplitudes(p: DriveParams, spectrum: DressedSpectrum | None = None):
    """Overlaps C_a = <a|l1> of the initial bare state with each dressed state."""
    spectrum = spectrum or dressed_states(p)
    return tuple(complex(np.conj(v[0])) for v in (spectrum.v_i, spectrum.v_j, spectrum.v_k))


def _check_time(t: float) -> float:
    t = float(t)
    if not (t >= 0 and math.isfinite(t)):
        raise InvalidArgumentError(f"time must be finite and non-negative, got {t!r}")
    return t


def evolve_exact(p: DriveParams, t: float) -> PureState:
    """Exact state at time t: sum over the dressed states with phases exp(-i omega_a t)."""
    t = _check_time(t)
    if t == 0:
        # initial condition held exactly rather than rebuilt from the expansion
        return PureState(np.array([1.0, 0.0, 0.0], dtype=complex), 0.0)
    s = dressed_states(p)
    c_i, c_j, c_k = initial_amplitudes(p, s)
    amps = (
        c_i * np.exp(-1j * s.omega_i * t) * s.v_i
        + c_j * s.v_j
        + c_k * np.exp(-1j * s.omega_k * t) * s.v_k
    )
    return PureState(amps, t)


def evolve_large_detuning(p: DriveParams, t: float) -> PureState:
    """Two-dressed-state approximation, dropping the |k> component.

    Uses the exact omega_i and dressed vectors together with the approximate
    amplitudes -vartheta e^{-i phi} / sqrt(vartheta2^2 + vartheta3^2), which makes
    the state normalized by construction.
    """
    t = _check_time(t)
    s = dressed_states(p)
    scale = -1.0 / math.sqrt(p.rabi_sq)
    amps = scale * (
        p.vartheta2 * np.exp(-1j * p.phi2) * np.exp(-1j * s.omega_i * t) * s.v_i
        + p.vartheta3 * np.exp(-1j * p.phi3) * s.v_j
    )
    return PureState(amps, t)


def evolve(p: DriveParams, t: float, state: str = "exact") -> PureState:
    if state == "exact":
        return evolve_exact(p, t)
    if state == "large_detuning":
        return evolve_large_detuning(p, t)
    raise InvalidArgumentError(f"unknown state kind {state!r}; expected one of {STATE_KINDS}")


def density_matrix(s: PureState | np.ndarray) -> DensityMatrix:
    amps = s.amps if isinstance(s, PureState) else np.asarray(s, dtype=complex)
    return DensityMatrix(np.outer(amps, amps.conj()))
