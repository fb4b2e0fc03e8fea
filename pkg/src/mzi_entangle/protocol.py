"""End-to-end Mach-Zehnder run: BS1, atom U, atom L, BS2, then detection.

Pure inputs are propagated as 63-dim state vectors. Mixed inputs are
propagated as 63x63 density matrices (rho -> E rho E^dag); with
``cross_check=True`` the same input is also propagated as an ensemble of pure
states and the two results are compared.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .atoms import (
    PHI_PLUS,
    PSI_PLUS,
    AtomAmplitudes,
    interaction_unitary,
    prepare_atom,
    two_atom_ket,
)
from .errors import InvalidInputError, UndefinedConditionalError
from .optics import (
    DETECTORS,
    DetectorPort,
    beam_splitter_unitary,
    check_arm,
    check_pol,
    detector_projector,
    initial_photon,
    no_fire_projector,
)
from .state import (
    INTERNAL_TOL,
    N_ATOM,
    N_ATOMS,
    Level,
    as_density,
    as_state,
    frozen,
    mix,
    projector,
    trace_photon,
)

# outcomes below this probability carry no conditional state
PROB_THRESHOLD = 1e-12

NO_FIRE = "no_fire"
OUTCOME_TAGS = tuple(d.tag for d in DETECTORS) + (NO_FIRE,)

AtomSpec = Union[AtomAmplitudes, Sequence[complex], np.ndarray]
Ensemble = Sequence[tuple[float, Sequence[complex]]]


@dataclass(frozen=True, eq=False)
class ProtocolConfig:
    """Inputs for one protocol run.

    Either give ``atom_u`` and ``atom_l`` (amplitude pairs, or 2x2 / 3x3 density
    matrices for a single atom) or give ``joint_input``: a two-atom ket (9),
    a two-atom density matrix (9x9) or a list of ``(weight, ket)`` pairs.
    """

    atom_u: AtomSpec | None = None
    atom_l: AtomSpec | None = None
    joint_input: np.ndarray | Ensemble | None = None
    atom_u_present: bool = True
    atom_l_present: bool = True
    photon_port: str = "lower"
    photon_pol: str = "+"
    normalize: bool = False

    def __post_init__(self):
        per_atom = self.atom_u is not None or self.atom_l is not None
        if per_atom == (self.joint_input is not None):
            raise InvalidInputError("set either both per-atom states or joint_input, not both or neither")
        if per_atom and (self.atom_u is None or self.atom_l is None):
            raise InvalidInputError("both atom_u and atom_l are required when using per-atom states")
        check_arm(self.photon_port)
        object.__setattr__(self, "photon_pol", check_pol(self.photon_pol))

    @classmethod
    def product(cls, alpha, beta, a, b, **kwargs) -> "ProtocolConfig":
        """Atom U in ``alpha|m+> + beta|m->``, atom L in ``a|m+> + b|m->``."""
        return cls(atom_u=AtomAmplitudes(alpha, beta), atom_l=AtomAmplitudes(a, b), **kwargs)


@dataclass(frozen=True, eq=False)
class OutcomeRecord:
    outcome: str
    probability: float
    # probability-weighted (unnormalized) two-atom operator for this outcome
    weighted_atoms: np.ndarray
    conditional_atoms: np.ndarray | None

    def conditional(self) -> np.ndarray:
        if self.conditional_atoms is None:
            raise UndefinedConditionalError(
                f"outcome {self.outcome} has probability {self.probability:.3g}; no conditional state"
            )
        return self.conditional_atoms


def _atom_density(spec: AtomSpec, normalize: bool) -> tuple[np.ndarray, np.ndarray | None]:
    """Return (3x3 density, 3-ket or None) for a single-atom spec."""
    if isinstance(spec, AtomAmplitudes):
        ket = prepare_atom(spec)
        return projector(ket), ket
    arr = np.asarray(spec, dtype=complex)
    if arr.ndim == 1 and arr.shape == (2,):
        amps = AtomAmplitudes.normalized(*arr) if normalize else AtomAmplitudes(*arr)
        ket = prepare_atom(amps)
        return projector(ket), ket
    if arr.shape == (2, 2):
        full = np.zeros((N_ATOM, N_ATOM), dtype=complex)
        full[:2, :2] = arr
        arr = full
    if arr.shape == (N_ATOM, N_ATOM):
        return as_density(arr, N_ATOM, normalize), None
    raise InvalidInputError(f"unsupported single-atom spec of shape {arr.shape}")


def atom_input(config: ProtocolConfig) -> tuple[np.ndarray, Ensemble | None]:
    """Two-atom input as (9x9 density, pure-state ensemble or None).

    The ensemble is None only when the input is given as a density matrix;
    callers that need one fall back to its eigendecomposition.
    """
    if config.joint_input is None:
        rho_u, ket_u = _atom_density(config.atom_u, config.normalize)
        rho_l, ket_l = _atom_density(config.atom_l, config.normalize)
        rho = np.kron(rho_u, rho_l)
        if ket_u is not None and ket_l is not None:
            return rho, [(1.0, np.kron(ket_u, ket_l))]
        return rho, None
    joint = config.joint_input
    if isinstance(joint, np.ndarray) and joint.ndim == 2:
        return as_density(joint, N_ATOMS, config.normalize), None
    if isinstance(joint, (list, tuple)) and joint and isinstance(joint[0], tuple):
        ens = [(float(w), as_state(k, N_ATOMS)) for w, k in joint]
        return mix(ens, N_ATOMS), ens
    ket = as_state(joint, N_ATOMS, config.normalize)
    return projector(ket), [(1.0, ket)]


def eigen_ensemble(rho: np.ndarray) -> list[tuple[float, np.ndarray]]:
    evals, evecs = np.linalg.eigh(rho)
    return [(float(w), evecs[:, k]) for k, w in enumerate(evals) if w > INTERNAL_TOL]


@lru_cache(maxsize=None)
def evolution_operator(atom_u_present: bool = True, atom_l_present: bool = True, pol: str = "+") -> np.ndarray:
    """BS2 . interaction(L) . interaction(U) . BS1 as one 63x63 unitary."""
    bs = beam_splitter_unitary()
    iu = interaction_unitary("U", atom_u_present, pol)
    il = interaction_unitary("L", atom_l_present, pol)
    return frozen(bs @ il @ iu @ bs)


def _config_operator(config: ProtocolConfig) -> np.ndarray:
    return evolution_operator(bool(config.atom_u_present), bool(config.atom_l_present), config.photon_pol)


def outcome_projectors() -> list[tuple[str, np.ndarray]]:
    return [(d.tag, detector_projector(d)) for d in DETECTORS] + [(NO_FIRE, no_fire_projector())]


def _records(weighted: list[tuple[str, np.ndarray]]) -> list[OutcomeRecord]:
    out = []
    for tag, w in weighted:
        p = max(float(np.trace(w).real), 0.0)
        cond = w / p if p > PROB_THRESHOLD else None
        out.append(OutcomeRecord(tag, p, frozen(w), None if cond is None else frozen(cond)))
    return out


def _weighted_from_vector(psi_out: np.ndarray) -> list[tuple[str, np.ndarray]]:
    return [(tag, trace_photon(projector(p @ psi_out))) for tag, p in outcome_projectors()]


def _weighted_from_density(rho_out: np.ndarray) -> list[tuple[str, np.ndarray]]:
    return [(tag, trace_photon(p @ rho_out @ p)) for tag, p in outcome_projectors()]


def _run_ensemble(config: ProtocolConfig, ensemble: Ensemble) -> list[tuple[str, np.ndarray]]:
    e = _config_operator(config)
    photon = initial_photon(config.photon_port, config.photon_pol)
    total = {tag: 0 for tag in OUTCOME_TAGS}
    for w, ket in ensemble:
        for tag, m in _weighted_from_vector(e @ np.kron(photon, ket)):
            total[tag] = total[tag] + w * m
    return list(total.items())


def _run_density(config: ProtocolConfig, rho_atoms: np.ndarray) -> list[tuple[str, np.ndarray]]:
    e = _config_operator(config)
    photon = projector(initial_photon(config.photon_port, config.photon_pol))
    rho = np.kron(photon, rho_atoms)
    return _weighted_from_density(e @ rho @ e.conj().T)


def run(config: ProtocolConfig, cross_check: bool = False) -> list[OutcomeRecord]:
    """Outcome records for D_l(+), D_l(-), D_u(+), D_u(-) and no-fire, in that order.

    With ``cross_check`` the state-vector ensemble path and the density-matrix
    path are both evaluated and must agree within 1e-10.
    """
    rho, ensemble = atom_input(config)
    pure = ensemble is not None and len(ensemble) == 1
    if pure and not cross_check:
        return _records(_run_ensemble(config, ensemble))
    weighted = _run_density(config, rho)
    if cross_check:
        alt = _run_ensemble(config, ensemble if ensemble is not None else eigen_ensemble(rho))
        for (tag, a), (_, b) in zip(weighted, alt):
            err = float(np.abs(a - b).max())
            if err > INTERNAL_TOL:
                raise AssertionError(f"ensemble and density paths disagree on {tag} by {err:.3g}")
    return _records(weighted)


def by_outcome(records: Sequence[OutcomeRecord]) -> dict[str, OutcomeRecord]:
    return {r.outcome: r for r in records}


def _amplitudes(alpha, beta, a, b) -> tuple[complex, complex, complex, complex]:
    u = AtomAmplitudes(alpha, beta)
    l = AtomAmplitudes(a, b)
    return u.c_plus, u.c_minus, l.c_plus, l.c_minus


def closed_form_probabilities(alpha, beta, a, b) -> tuple[float, float, float]:
    """(P(D_l), P(D_u), P(no fire)) for a sigma+ photon entering the lower port."""
    alpha, beta, a, b = _amplitudes(alpha, beta, a, b)
    ba, ab, bb = abs(beta * a) ** 2, abs(alpha * b) ** 2, abs(beta * b) ** 2
    return 0.25 * (ba + ab), 0.25 * (ba + ab + 4 * bb), 0.5 * (abs(alpha) ** 2 + abs(a) ** 2)


def heralded_state(alpha, beta, a, b) -> np.ndarray:
    """Normalized two-atom ket left after a D_l click: beta*a|m-m+> - alpha*b|m+m->."""
    alpha, beta, a, b = _amplitudes(alpha, beta, a, b)
    ket = two_atom_ket({(Level.M_MINUS, Level.M_PLUS): beta * a, (Level.M_PLUS, Level.M_MINUS): -alpha * b})
    n = np.linalg.norm(ket)
    if n ** 2 <= PROB_THRESHOLD:
        raise UndefinedConditionalError("D_l has zero probability for these amplitudes")
    return ket / n


def upper_click_state(alpha, beta, a, b) -> np.ndarray:
    """Normalized two-atom ket left after a D_u click:
    beta|m->(a|m+> + b|m->) + b(alpha|m+> + beta|m->)|m->.
    """
    alpha, beta, a, b = _amplitudes(alpha, beta, a, b)
    m_minus = np.array([0, 1, 0], dtype=complex)
    ket = beta * np.kron(m_minus, [a, b, 0]) + b * np.kron([alpha, beta, 0], m_minus)
    n = np.linalg.norm(ket)
    if n ** 2 <= PROB_THRESHOLD:
        raise UndefinedConditionalError("D_u has zero probability for these amplitudes")
    return ket / n


def post_select_dl(config: ProtocolConfig) -> tuple[float, np.ndarray]:
    """Probability of a lower-detector click and the heralded two-atom state."""
    rec = by_outcome(run(config))[DetectorPort("lower", config.photon_pol).tag]
    return rec.probability, rec.conditional()


def bell_mixture(fidelity: float) -> list[tuple[float, np.ndarray]]:
    """Ensemble F |Psi+><Psi+| + (1-F) |Phi+><Phi+|."""
    f = float(fidelity)
    if not np.isfinite(f) or not 0.0 <= f <= 1.0:
        raise InvalidInputError(f"fidelity must lie in [0, 1], got {fidelity!r}")
    return [(f, np.array(PSI_PLUS)), (1.0 - f, np.array(PHI_PLUS))]


def run_mixed_bell(fidelity: float, cross_check: bool = True) -> list[OutcomeRecord]:
    """Run the Psi+/Phi+ Bell mixture of fidelity ``fidelity`` through the interferometer."""
    return run(ProtocolConfig(joint_input=bell_mixture(fidelity)), cross_check=cross_check)


def global_phase(c: AtomAmplitudes, theta: float) -> AtomAmplitudes:
    z = np.exp(1j * float(theta))
    return AtomAmplitudes(c.c_plus * z, c.c_minus * z)

