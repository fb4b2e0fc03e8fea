"""Brute-force reference model of the interferometer.

Every operator is assembled ket by ket from explicit transition rules, with
its own label table and its own photon ordering. Nothing here is imported from
the engine's operator builders, so agreement between the two is evidence that
both are right rather than that they share a bug.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

# deliberately not the engine's photon order
PHOTONS = [
    ("scat", "L"),
    ("fly", "lower", "-"),
    ("scat", "U"),
    ("fly", "upper", "+"),
    ("vac",),
    ("fly", "lower", "+"),
    ("fly", "upper", "-"),
]
LEVELS = ["m+", "m-", "g"]
KETS = [(ph, u, l) for ph in PHOTONS for u in LEVELS for l in LEVELS]
INDEX = {k: i for i, k in enumerate(KETS)}
ATOM_KETS = [(u, l) for u in LEVELS for l in LEVELS]
ATOM_INDEX = {k: i for i, k in enumerate(ATOM_KETS)}
ARM_OF = {"U": "upper", "L": "lower"}

OUTCOMES = {
    "D_l(+)": ("fly", "lower", "+"),
    "D_l(-)": ("fly", "lower", "-"),
    "D_u(+)": ("fly", "upper", "+"),
    "D_u(-)": ("fly", "upper", "-"),
}


def _matrix(rule) -> np.ndarray:
    n = len(KETS)
    m = np.zeros((n, n), dtype=complex)
    for j, ket in enumerate(KETS):
        for image, amp in rule(ket).items():
            m[INDEX[image], j] += amp
    return m


def _bs_rule(ket):
    ph, u, l = ket
    if ph[0] != "fly":
        return {ket: 1.0}
    _, arm, pol = ph
    other = "lower" if arm == "upper" else "upper"
    r = 1 / math.sqrt(2)
    # same-arm term picks up the factor i
    return {(("fly", other, pol), u, l): r, (("fly", arm, pol), u, l): 1j * r}


def beam_splitter() -> np.ndarray:
    return _matrix(_bs_rule)


def interaction(atom: str, pol: str, present: bool = True) -> np.ndarray:
    absorbing = "m+" if pol == "+" else "m-"
    fly = ("fly", ARM_OF[atom], pol)
    scat = ("scat", atom)

    def rule(ket):
        ph, u, l = ket
        level = u if atom == "U" else l
        if not present:
            return {ket: 1.0}
        if ph == fly and level == absorbing:
            new_ph, new_level = scat, "g"
        elif ph == scat and level == "g":
            new_ph, new_level = fly, absorbing
        else:
            return {ket: 1.0}
        return {(new_ph, new_level, l) if atom == "U" else (new_ph, u, new_level): 1.0}

    return _matrix(rule)


def _embed(rho_atoms: np.ndarray, photon) -> np.ndarray:
    n = len(KETS)
    rho = np.zeros((n, n), dtype=complex)
    for (a, ka), (b, kb) in itertools.product(enumerate(ATOM_KETS), repeat=2):
        rho[INDEX[(photon,) + ka], INDEX[(photon,) + kb]] = rho_atoms[a, b]
    return rho


def _reduced(rho: np.ndarray, photons) -> np.ndarray:
    """Photon-traced two-atom operator restricted to the given photon labels."""
    out = np.zeros((len(ATOM_KETS), len(ATOM_KETS)), dtype=complex)
    for ph in photons:
        for (a, ka), (b, kb) in itertools.product(enumerate(ATOM_KETS), repeat=2):
            out[a, b] += rho[INDEX[(ph,) + ka], INDEX[(ph,) + kb]]
    return out


def outcomes(rho_atoms, atom_u_present=True, atom_l_present=True, port="lower", pol="+",
             threshold: float = 1e-12) -> dict[str, tuple[float, np.ndarray | None]]:
    """Probability and conditional two-atom state for each detector outcome.

    ``rho_atoms`` is a 9x9 two-atom density matrix in [m+, m-, g] (x) [m+, m-, g] order.
    """
    rho_atoms = np.asarray(rho_atoms, dtype=complex)
    rho = _embed(rho_atoms, ("fly", port, pol))
    for op in (beam_splitter(), interaction("U", pol, atom_u_present),
               interaction("L", pol, atom_l_present), beam_splitter()):
        rho = op @ rho @ op.conj().T
    groups = {tag: [ph] for tag, ph in OUTCOMES.items()}
    groups["no_fire"] = [ph for ph in PHOTONS if ph[0] != "fly"]
    result = {}
    for tag, phs in groups.items():
        w = _reduced(rho, phs)
        p = float(np.trace(w).real)
        result[tag] = (p, w / p if p > threshold else None)
    return result


def outcomes_pure(alpha, beta, a, b, **kwargs):
    ket_u = np.array([alpha, beta, 0], dtype=complex)
    ket_l = np.array([a, b, 0], dtype=complex)
    psi = np.array([ket_u[LEVELS.index(u)] * ket_l[LEVELS.index(l)] for u, l in ATOM_KETS])
    return outcomes(np.outer(psi, psi.conj()), **kwargs)
