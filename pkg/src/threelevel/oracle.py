"""Independent numerical ground truth and the dual-path cross-validation harness.

The eigensolver here is a cyclic Jacobi iteration and never touches the
closed-form roots in ``qsystem``; derivatives are central differences of
state amplitudes.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import estimation, quantifiers
from ._backend import kernels
from .errors import InvalidArgumentError
from .profile import DEFAULT_STEP, amplitudes, check_step, numeric_profile, time_grid
from .qsystem import DriveParams, build_hamiltonian, cubic_residual, eigenfrequencies, evolve_exact

FAULTS = ("kappa-sign",)
HSS_CHOICES = ("auto",) + quantifiers.HSS_VARIANTS


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _hermitian(h, tol: float) -> np.ndarray:
    m = np.asarray(h, dtype=complex)
    if m.shape != (3, 3):
        raise InvalidArgumentError(f"expected a 3x3 matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > tol * max(1.0, np.max(np.abs(m))):
        raise InvalidArgumentError("matrix is not Hermitian")
    return m


def eigensolve_hermitian(h, tol: float = 1e-12) -> EigenSystem:
    """Ascending eigenvalues and orthonormal eigenvectors of a 3x3 Hermitian matrix."""
    m = _hermitian(h, tol)
    w, v = kernels.jacobi_eigh3(m)
    return EigenSystem(np.asarray(w, dtype=float), np.asarray(v, dtype=complex))


def matrix_exponential_unitary(h, t: float) -> np.ndarray:
    """exp(-i H t) through the eigendecomposition of H."""
    es = eigensolve_hermitian(h)
    v = es.eigenvectors
    return (v * np.exp(-1j * es.eigenvalues * t)) @ v.conj().T


def _shifted(p: DriveParams, which: str, dx: float) -> DriveParams:
    if which == "phi2":
        return p.replace(phi2=p.phi2 + dx)
    if which == "phi3":
        return p.replace(phi3=p.phi3 + dx)
    raise InvalidArgumentError(f"which must be 'phi2' or 'phi3', got {which!r}")


def fd_state_derivative(p: DriveParams, t: float, which: str, h: float = DEFAULT_STEP,
                        state: str = "exact") -> np.ndarray:
    """Central difference of the bare-basis amplitudes with respect to one phase."""
    h = check_step(h)
    plus = amplitudes(_shifted(p, which, h), [t], state)[0]
    minus = amplitudes(_shifted(p, which, -h), [t], state)[0]
    return (plus - minus) / (2 * h)


def fd_density_derivative(p: DriveParams, t: float, which: str, h: float = DEFAULT_STEP,
                          state: str = "exact") -> np.ndarray:
    h = check_step(h)
    plus = amplitudes(_shifted(p, which, h), [t], state)[0]
    minus = amplitudes(_shifted(p, which, -h), [t], state)[0]
    return (np.outer(plus, plus.conj()) - np.outer(minus, minus.conj())) / (2 * h)


@dataclass(frozen=True)
class Tolerances:
    spectrum_abs: float = 1e-10
    cubic: float = 1e-12
    fidelity: float = 1e-12
    norm: float = 1e-12
    qfi_rel: float = 1e-6
    qfi_abs: float = 1e-9
    coherence_abs: float = 1e-8
    hss_abs: float = 1e-8
    hss_rel: float = 1e-8
    # HSS values are also accepted when their squares agree to this level: the
    # closed-form radicand cancels to ~1e-17 near zero and sqrt amplifies it
    hss_radicand: float = quantifiers.RADICAND_TOL
    step: float = DEFAULT_STEP


@dataclass
class CheckRecord:
    check: str
    set_index: int
    t: float | None
    analytic: float | None
    oracle: float | None
    abs_dev: float | None
    rel_dev: float | None
    passed: bool
    discrepancy: bool
    counted: bool
    note: str = ""


@dataclass
class ValidationReport:
    state: str
    hss_variant: str
    faults: tuple
    params: list = field(default_factory=list)
    records: list = field(default_factory=list)
    adjudication: list = field(default_factory=list)

    @property
    def counted(self):
        return [r for r in self.records if r.counted]

    @property
    def failures(self):
        return [r for r in self.counted if not r.passed and not r.discrepancy]

    @property
    def discrepancies(self):
        return [r for r in self.counted if r.discrepancy]

    def ok(self, allow_discrepancy: bool = False) -> bool:
        return not self.failures and (allow_discrepancy or not self.discrepancies)

    def summary(self) -> dict:
        by_check = {}
        for r in self.counted:
            s = by_check.setdefault(r.check, {"total": 0, "failed": 0})
            s["total"] += 1
            s["failed"] += 0 if r.passed else 1
        return {
            "record": "summary",
            "param_sets": len(self.params),
            "checks": len(self.counted),
            "failures": len(self.failures),
            "discrepancies": len(self.discrepancies),
            "by_check": by_check,
        }

    def iter_lines(self):
        yield _dumps({
            "record": "header",
            "state": self.state,
            "hss_variant": self.hss_variant,
            "faults": list(self.faults),
        })
        for i, p in enumerate(self.params):
            yield _dumps({"record": "params", "set_index": i, **asdict(p)})
        for r in self.records:
            yield _dumps({"record": "check", **{f.name: getattr(r, f.name) for f in fields(r)}})
        for a in self.adjudication:
            yield _dumps({"record": "adjudication", **a})
        yield _dumps(self.summary())

    def to_jsonl(self) -> str:
        buf = io.StringIO()
        for line in self.iter_lines():
            buf.write(line + "\n")
        return buf.getvalue()


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def _num(x):
    """JSON-safe float; non-finite values become None."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _deviation(a, o):
    abs_dev = abs(a - o)
    rel_dev = abs_dev / abs(o) if o != 0 else (0.0 if abs_dev == 0 else math.inf)
    return abs_dev, rel_dev


def _record(check, idx, t, a, o, passed, discrepancy=False, counted=True, note=""):
    if a is None or not math.isfinite(a):
        abs_dev = rel_dev = None
    else:
        abs_dev, rel_dev = _deviation(a, o)
    return CheckRecord(check, idx, _num(t), _num(a), _num(o), _num(abs_dev), _num(rel_dev),
                       bool(passed), bool(discrepancy), counted, note)


def _spectrum_records(p: DriveParams, idx: int, tol: Tolerances):
    closed = eigenfrequencies(p)
    es = eigensolve_hermitian(build_hamiltonian(p))
    out = []
    for name, c, o in zip(("omega_i", "omega_j", "omega_k"), closed, es.eigenvalues):
        ok = abs(c - o) <= tol.spectrum_abs
        if name == "omega_j":
            ok = ok and c == 0.0
        out.append(_record(f"spectrum.{name}", idx, None, c, float(o), ok))
    for name, c in zip(("i", "j", "k"), closed):
        res = cubic_residual(p, c)
        out.append(_record(f"cubic.{name}", idx, None, res, 0.0,
                           res < tol.cubic * max(1.0, abs(c) ** 3)))
    return out


def _evolution_records(p: DriveParams, idx: int, t: np.ndarray, tol: Tolerances):
    es = eigensolve_hermitian(build_hamiltonian(p))
    v = es.eigenvectors
    # exp(-iHt) e1 for every t at once
    coeff = v[0].conj()
    oracle_states = (np.exp(-1j * np.outer(t, es.eigenvalues)) * coeff) @ v.T
    out = []
    for tt, ref in zip(t, oracle_states):
        psi = evolve_exact(p, float(tt)).amps
        fid = abs(np.vdot(ref, psi)) ** 2
        norm_dev = abs(np.linalg.norm(psi) - 1.0)
        out.append(_record("evolution", idx, tt, fid, 1.0,
                           abs(1.0 - fid) <= tol.fidelity and norm_dev <= tol.norm,
                           note="" if norm_dev <= tol.norm else f"norm deviation {norm_dev:.3e}"))
    return out


def _term_diagnosis_qfi(p: DriveParams, t: float, psi: np.ndarray, kappa_fn) -> str:
    a2 = p.vartheta2**2
    b = a2 * p.vartheta3**2
    dk = abs(float(kappa_fn(p, [t])[0]) - abs(psi[1]) ** 2 / (4 * a2))
    dx = abs(float(estimation.xi(p, t)) - abs(psi[2]) ** 2 / b)
    suspects = [n for n, d in (("kappa", dk * 4 * a2), ("xi", dx * b)) if d > 1e-9]
    return "suspected term: " + (",".join(suspects) if suspects else "none isolated")


def _term_diagnosis_hss(p: DriveParams, t: float, psi: np.ndarray, variant: str) -> str:
    form = "as_printed" if variant == "as_printed" else "symmetry_corrected"
    dl = abs(float(quantifiers.lambda_term(p, t, form)) - abs(psi[0]) ** 2)
    if dl > 1e-9:
        return f"suspected term: Lambda ({form} deviates from |psi_1|^2 by {dl:.3e})"
    if variant != "reweighted":
        return "suspected term: Theta/Sigma weighting (Rabi prefactors absent)"
    return "suspected term: none isolated"


def _close_qfi(a, o, tol):
    return abs(a - o) <= max(tol.qfi_rel * abs(o), tol.qfi_abs)


def _close_hss(a, o, tol):
    if not math.isfinite(a):
        return False
    return abs(a - o) <= max(tol.hss_rel * abs(o), tol.hss_abs) or abs(a * a - o * o) <= tol.hss_radicand


def cross_validate(params_list, t_grid, tolerances: Tolerances | None = None, state: str = "exact",
                   hss_variant: str = "auto", faults=()) -> ValidationReport:
    """Dual-path comparison of every closed form against definition-based values.

    Failures are data: each comparison becomes a record.  A mismatch of a
    closed form is marked as a discrepancy (with a suspected term) unless a
    fault was injected, in which case it is a plain failure.
    """
    tol = tolerances or Tolerances()
    if hss_variant not in HSS_CHOICES:
        raise InvalidArgumentError(f"unknown HSS variant {hss_variant!r}; expected one of {HSS_CHOICES}")
    faults = tuple(faults)
    for f in faults:
        if f not in FAULTS:
            raise InvalidArgumentError(f"unknown fault {f!r}; expected one of {FAULTS}")
    if isinstance(params_list, DriveParams):
        params_list = [params_list]
    params_list = list(params_list)
    t = time_grid(t_grid)
    report = ValidationReport(state, hss_variant, faults)
    if t.size == 0:
        return report
    report.params = params_list

    kappa_fn = estimation.kappa
    if "kappa-sign" in faults:
        def kappa_fn(p, tt):
            return estimation.kappa(p, tt, cross_sign=-1.0)
    closed_discrepancy = not faults

    variants = quantifiers.HSS_VARIANTS if hss_variant == "auto" else (hss_variant,)
    hss_records = {v: [] for v in variants}

    for idx, p in enumerate(params_list):
        report.records.extend(_spectrum_records(p, idx, tol))
        report.records.extend(_evolution_records(p, idx, t, tol))

        prof = numeric_profile(p, t, state, tol.step)
        psi = amplitudes(p, t, state)
        qfi = estimation.closed_form_qfi(p, t, kappa_fn=kappa_fn)
        for name, col, arr in zip(("qfi22", "qfi33", "qfi23"), ("qfi22", "qfi33", "qfi23"), qfi):
            for m, tt in enumerate(t):
                a, o = float(arr[m]), float(prof[col][m])
                ok = _close_qfi(a, o, tol)
                note = "" if ok else _term_diagnosis_qfi(p, float(tt), psi[m], kappa_fn)
                report.records.append(_record(name, idx, tt, a, o, ok, not ok and closed_discrepancy, note=note))

        coh = np.atleast_1d(quantifiers.coherence_l2_analytic(p, t))
        for m, tt in enumerate(t):
            a, o = float(coh[m]), float(prof["coherence"][m])
            ok = abs(a - o) <= tol.coherence_abs
            report.records.append(_record("coherence", idx, tt, a, o, ok, not ok and closed_discrepancy,
                                          note="" if ok else "suspected term: epsilon/varkappa/varpi"))

        for v in variants:
            (h2, _), (h3, _) = quantifiers.hss_analytic_grid(p, t, v)
            for name, arr, col in (("hss2", h2, "hss2"), ("hss3", h3, "hss3")):
                for m, tt in enumerate(t):
                    a, o = float(arr[m]), float(prof[col][m])
                    ok = _close_hss(a, o, tol)
                    note = "" if ok else _term_diagnosis_hss(p, float(tt), psi[m], v)
                    if not math.isfinite(a):
                        note = "negative radicand; " + note
                    hss_records[v].append(_record(f"{name}[{v}]", idx, tt, a, o, ok, not ok, note=note))

    matches = {v: all(r.passed for r in recs) for v, recs in hss_records.items()}
    selected = next((v for v in variants if matches[v]), variants[0])
    for v in variants:
        recs = hss_records[v]
        devs = [r.abs_dev for r in recs if r.abs_dev is not None]
        report.adjudication.append({
            "variant": v,
            "matches": matches[v],
            "selected": v == selected,
            "points": len(recs),
            "failed": sum(not r.passed for r in recs),
            "max_abs_dev": max(devs) if devs else None,
            "verdict": "MATCH" if matches[v] else "MISMATCH",
        })
        for r in recs:
            r.counted = v == selected
        report.records.extend(recs)
    return report


def random_params(n: int, seed: int = 0):
    """Seeded random parameter sets: vartheta in [0.1, 2], delta in [0, 50], phases in [0, 2pi)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        v2, v3 = rng.uniform(0.1, 2.0, 2)
        delta = rng.uniform(0.0, 50.0)
        phi2, phi3 = rng.uniform(0.0, 2 * np.pi, 2)
        out.append(DriveParams(float(v2), float(v3), float(delta), float(phi2), float(phi3)))
    return out
