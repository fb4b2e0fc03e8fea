"""Fidelity and concurrence of heralded two-atom states, success-probability
sweeps and the mixed-input (purification-like) report.

The scheme heralds a pure singlet out of a Bell mixture using a joint
measurement, so the report describes a generation process; no claim of an
LOCC purification protocol is made.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .atoms import PSI_PLUS, SINGLET, AtomAmplitudes
from .errors import InvalidInputError, UnsupportedSubspaceError
from .optics import DetectorPort
from .protocol import OutcomeRecord, ProtocolConfig, by_outcome, run, run_mixed_bell
from .state import N_ATOMS, as_density, as_state

# qubit subspace {m+, m-} (x) {m+, m-} inside the 9-dim two-atom space
QUBIT_INDICES = (0, 1, 3, 4)
LEAKAGE_TOL = 1e-9
PURE_CASE_MAX = Fraction(1, 8)

_SY = np.array([[0, -1j], [1j, 0]])
_SYSY = np.kron(_SY, _SY)


def fidelity(rho, target) -> float:
    """Overlap <target|rho|target> of a two-atom density matrix with a pure target."""
    rho = as_density(rho, N_ATOMS)
    t = as_state(target, N_ATOMS)
    return float(np.vdot(t, rho @ t).real)


def qubit_leakage(rho) -> float:
    """Population outside the two-qubit {m+, m-} subspace."""
    rho = np.asarray(rho)
    return float(np.trace(rho).real - np.trace(rho[np.ix_(QUBIT_INDICES, QUBIT_INDICES)]).real)


def concurrence(rho) -> float:
    """Wootters concurrence of a two-atom state confined to the qubit subspace."""
    rho = as_density(rho, N_ATOMS)
    leak = qubit_leakage(rho)
    if leak >= LEAKAGE_TOL:
        raise UnsupportedSubspaceError(f"state has population {leak:.3g} outside the qubit subspace")
    r = rho[np.ix_(QUBIT_INDICES, QUBIT_INDICES)]
    w, v = np.linalg.eigh(0.5 * (r + r.conj().T))
    # rho = Y Y^dag; the Wootters lambdas are the singular values of Y^T (sy x sy) Y.
    # This avoids square roots of the ~1e-17 eigenvalues that pure states carry.
    y = v * np.sqrt(np.clip(w, 0, None))
    lam = np.linalg.svd(y.T @ _SYSY @ y, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1:].sum()))


@dataclass(frozen=True)
class EntanglementReport:
    outcome: str
    probability: float
    fidelity_singlet: float | None
    concurrence: float | None
    qubit_leakage: float | None


def entanglement_report(record: OutcomeRecord) -> EntanglementReport:
    """Metrics for one outcome; absent (None) when the outcome has no conditional state."""
    rho = record.conditional_atoms
    if rho is None:
        return EntanglementReport(record.outcome, record.probability, None, None, None)
    leak = qubit_leakage(rho)
    conc = concurrence(rho) if leak < LEAKAGE_TOL else None
    return EntanglementReport(record.outcome, record.probability, fidelity(rho, SINGLET), conc, leak)


def _check_unit_interval(values: Iterable[float], name: str) -> list[float]:
    out = []
    for v in values:
        x = float(v)
        if not np.isfinite(x) or not 0.0 <= x <= 1.0:
            raise InvalidInputError(f"{name} value {v!r} outside [0, 1]")
        out.append(x)
    return sorted(out)


@dataclass(frozen=True)
class SweepRow:
    x: float
    p_success: float
    concurrence: float | None


def symmetric_config(x: float, **kwargs) -> ProtocolConfig:
    """Both atoms in sqrt(x)|m+> + sqrt(1-x)|m->."""
    c = AtomAmplitudes.from_population(x)
    return ProtocolConfig(atom_u=c, atom_l=c, **kwargs)


def sweep_success(grid: Sequence[float]) -> list[SweepRow]:
    """Heralding probability and heralded concurrence over |a|^2 for identical atoms."""
    tag = DetectorPort("lower", "+").tag
    rows = []
    for x in _check_unit_interval(grid, "grid"):
        rec = by_outcome(run(symmetric_config(x)))[tag]
        conc = None if rec.conditional_atoms is None else concurrence(rec.conditional_atoms)
        rows.append(SweepRow(x, rec.probability, conc))
    return rows


@dataclass(frozen=True)
class PurificationRow:
    F: float
    p_dl: float
    fid_dl: float | None
    p_du: float
    fid_du: float | None
    beats_pure_max: bool


def beats_pure_max(F: float) -> bool:
    """Whether the heralding probability F/4 strictly exceeds 1/8, in exact arithmetic."""
    return Fraction(F) / 4 > PURE_CASE_MAX


def purification_report(F_grid: Sequence[float]) -> list[PurificationRow]:
    """Per input fidelity F: D_l probability and singlet fidelity, D_u probability
    and Psi+ fidelity, and whether D_l beats the best product-state probability.
    """
    dl, du = DetectorPort("lower", "+").tag, DetectorPort("upper", "+").tag
    rows = []
    for F in _check_unit_interval(F_grid, "F"):
        recs = by_outcome(run_mixed_bell(F))
        r_l, r_u = recs[dl], recs[du]
        fid_dl = None if r_l.conditional_atoms is None else fidelity(r_l.conditional_atoms, SINGLET)
        fid_du = None if r_u.conditional_atoms is None else fidelity(r_u.conditional_atoms, PSI_PLUS)
        rows.append(PurificationRow(F, r_l.probability, fid_dl, r_u.probability, fid_du, beats_pure_max(F)))
    return rows

