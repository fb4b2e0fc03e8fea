"""Photonic register, beam splitters and polarization-resolving detectors."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidInputError
from .state import DIM, N_ATOMS, N_PHOTON, Photon, frozen

ARMS = ("upper", "lower")
POLARIZATIONS = ("+", "-")

_POL_ALIASES = {
    "+": "+", "plus": "+", "sigma+": "+", "σ+": "+",
    "-": "-", "minus": "-", "sigma-": "-", "σ-": "-", "σ−": "-",
}

_FLY = {
    ("upper", "+"): Photon.UPPER_PLUS,
    ("upper", "-"): Photon.UPPER_MINUS,
    ("lower", "+"): Photon.LOWER_PLUS,
    ("lower", "-"): Photon.LOWER_MINUS,
}


def check_arm(arm: str) -> str:
    if arm not in ARMS:
        raise InvalidInputError(f"arm must be 'upper' or 'lower', got {arm!r}")
    return arm


def check_pol(pol: str) -> str:
    try:
        return _POL_ALIASES[pol]
    except (KeyError, TypeError):
        raise InvalidInputError(f"polarization must be '+' or '-', got {pol!r}") from None


def fly(arm: str, pol: str) -> Photon:
    return _FLY[check_arm(arm), check_pol(pol)]


def scattered(atom: str) -> Photon:
    if atom == "U":
        return Photon.SCATTERED_U
    if atom == "L":
        return Photon.SCATTERED_L
    raise InvalidInputError(f"atom must be 'U' or 'L', got {atom!r}")


@dataclass(frozen=True)
class DetectorPort:
    port: str
    pol: str

    def __post_init__(self):
        check_arm(self.port)
        object.__setattr__(self, "pol", check_pol(self.pol))

    @property
    def tag(self) -> str:
        return f"D_{self.port[0]}({self.pol})"


# D_l before D_u, sigma+ before sigma-
DETECTORS = tuple(DetectorPort(port, pol) for port in ("lower", "upper") for pol in POLARIZATIONS)


def initial_photon(port: str = "lower", pol: str = "+") -> np.ndarray:
    """Photon register factor for a single photon entering ``port`` with polarization ``pol``."""
    v = np.zeros(N_PHOTON, dtype=complex)
    v[fly(port, pol)] = 1.0
    return v


def photon_operator(block: np.ndarray) -> np.ndarray:
    """Lift a 7x7 photon operator to the full space (identity on both atoms)."""
    return np.kron(block, np.eye(N_ATOMS))


def _beam_splitter_block() -> np.ndarray:
    # upper -> (lower + i upper)/sqrt2, lower -> (upper + i lower)/sqrt2, per polarization
    s = 1 / np.sqrt(2)
    b = np.eye(N_PHOTON, dtype=complex)
    for pol in POLARIZATIONS:
        u, l = fly("upper", pol), fly("lower", pol)
        b[u, u] = 1j * s
        b[l, u] = s
        b[u, l] = s
        b[l, l] = 1j * s
    return b


@lru_cache(maxsize=None)
def beam_splitter_unitary() -> np.ndarray:
    """63x63 unitary for a symmetric beam splitter acting on the Fly modes."""
    return frozen(photon_operator(_beam_splitter_block()))


@lru_cache(maxsize=None)
def detector_projector(d: DetectorPort) -> np.ndarray:
    block = np.zeros((N_PHOTON, N_PHOTON), dtype=complex)
    i = fly(d.port, d.pol)
    block[i, i] = 1.0
    return frozen(photon_operator(block))


@lru_cache(maxsize=None)
def no_fire_projector() -> np.ndarray:
    """Complement of the four detector projectors: Vacuum plus both Scattered labels."""
    p = np.eye(DIM, dtype=complex)
    for d in DETECTORS:
        p = p - detector_projector(d)
    return frozen(p)
