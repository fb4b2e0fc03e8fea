"""Atomic registers: preparation of the metastable superpositions and the
absorb-then-scatter interaction with photons in the atom's arm.

The excited level is adiabatically eliminated: a photon of polarization p in
the atom's arm, meeting the atom in m_p, becomes the atom's scattered-photon
label with the atom left in g. The map is realized as a permutation that swaps
that pair of basis states, so it is exactly unitary and involutive. The reverse
branch (Scattered -> Fly) is never reached in a protocol run because each atom
interacts once, before any scattered amplitude exists.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidInputError
from .optics import check_pol, fly, scattered
from .state import DIM, INPUT_TOL, N_ATOM, Level, as_amplitude, basis_labels, frozen, tensor_basis

ATOM_ARM = {"U": "upper", "L": "lower"}


@dataclass(frozen=True)
class AtomAmplitudes:
    """Coefficients of ``c_plus |m+> + c_minus |m->``."""

    c_plus: complex
    c_minus: complex

    def __post_init__(self):
        cp, cm = as_amplitude(self.c_plus), as_amplitude(self.c_minus)
        norm2 = abs(cp) ** 2 + abs(cm) ** 2
        if abs(norm2 - 1.0) > INPUT_TOL:
            raise InvalidInputError(
                f"atom amplitudes not normalized: |c+|^2 + |c-|^2 = {norm2:.12g}"
            )
        object.__setattr__(self, "c_plus", cp)
        object.__setattr__(self, "c_minus", cm)

    @classmethod
    def normalized(cls, c_plus, c_minus) -> "AtomAmplitudes":
        cp, cm = as_amplitude(c_plus), as_amplitude(c_minus)
        n = np.sqrt(abs(cp) ** 2 + abs(cm) ** 2)
        if n < INPUT_TOL:
            raise InvalidInputError("cannot normalize zero atom amplitudes")
        return cls(cp / n, cm / n)

    @classmethod
    def from_population(cls, x: float, phase_plus: float = 0.0, phase_minus: float = 0.0):
        """Atom with ``|c_plus|^2 = x`` and the given relative phases."""
        if not 0.0 <= x <= 1.0:
            raise InvalidInputError(f"population must lie in [0, 1], got {x}")
        return cls(np.sqrt(x) * np.exp(1j * phase_plus), np.sqrt(1 - x) * np.exp(1j * phase_minus))


def prepare_atom(c: AtomAmplitudes) -> np.ndarray:
    v = np.zeros(N_ATOM, dtype=complex)
    v[Level.M_PLUS] = c.c_plus
    v[Level.M_MINUS] = c.c_minus
    return v


def check_atom(atom: str) -> str:
    if atom not in ATOM_ARM:
        raise InvalidInputError(f"atom must be 'U' or 'L', got {atom!r}")
    return atom


def _absorbing_level(pol: str) -> Level:
    return Level.M_PLUS if pol == "+" else Level.M_MINUS


@lru_cache(maxsize=None)
def interaction_unitary(atom: str, present: bool = True, pol: str = "+") -> np.ndarray:
    """Permutation unitary for one atom interacting with the photon in its arm.

    Only the channel matching the run's photon polarization ``pol`` is active:
    ``Fly(arm, pol) (x) m_pol  <->  Scattered(atom) (x) g``, the other atom untouched.
    An absent atom gives the identity.
    """
    check_atom(atom)
    pol = check_pol(pol)
    perm = np.arange(DIM)
    if present:
        photon_in = fly(ATOM_ARM[atom], pol)
        photon_out = scattered(atom)
        level_in = _absorbing_level(pol)
        for other in range(N_ATOM):
            if atom == "U":
                i = tensor_basis(photon_in, level_in, other)
                j = tensor_basis(photon_out, Level.G, other)
            else:
                i = tensor_basis(photon_in, other, level_in)
                j = tensor_basis(photon_out, other, Level.G)
            perm[i], perm[j] = j, i
    u = np.zeros((DIM, DIM), dtype=complex)
    u[perm, np.arange(DIM)] = 1.0
    return frozen(u)


def describe_swaps(u: np.ndarray) -> list[tuple[tuple, tuple]]:
    """Human-readable list of the basis pairs a permutation unitary exchanges."""
    out = []
    cols = np.argmax(np.abs(u), axis=0)
    for j, i in enumerate(cols):
        if i > j:
            out.append((tuple(x.name for x in basis_labels(j)), tuple(x.name for x in basis_labels(i))))
    return out


def two_atom_ket(terms: dict[tuple[int, int], complex]) -> np.ndarray:
    """9-vector over atom U (x) atom L from ``{(level_u, level_l): amplitude}``."""
    v = np.zeros(N_ATOM * N_ATOM, dtype=complex)
    for (u, l), amp in terms.items():
        v[int(u) * N_ATOM + int(l)] = amp
    return v


def product_ket(u: AtomAmplitudes, l: AtomAmplitudes) -> np.ndarray:
    return np.kron(prepare_atom(u), prepare_atom(l))


_P, _M = Level.M_PLUS, Level.M_MINUS
_S = 1 / np.sqrt(2)

# heralded target: (|m- m+> - |m+ m->)/sqrt2
SINGLET = frozen(two_atom_ket({(_M, _P): _S, (_P, _M): -_S}))
PSI_PLUS = frozen(two_atom_ket({(_P, _M): _S, (_M, _P): _S}))
PHI_PLUS = frozen(two_atom_ket({(_P, _P): _S, (_M, _M): _S}))
PHI_MINUS = frozen(two_atom_ket({(_P, _P): _S, (_M, _M): -_S}))

BELL_STATES = {
    "singlet": SINGLET,
    "psi-plus": PSI_PLUS,
    "phi-plus": PHI_PLUS,
    "phi-minus": PHI_MINUS,
}
