"""Dense linear algebra over the photon (x) atom U (x) atom L Hilbert space.

The composite space has dimension 7 * 3 * 3 = 63 and is ordered photon-major:
``flat = photon * 9 + atom_u * 3 + atom_l``. Photon labels are

    0 Vacuum, 1 Fly(upper, +), 2 Fly(upper, -), 3 Fly(lower, +),
    4 Fly(lower, -), 5 Scattered(U), 6 Scattered(L)

and each atom register is ordered [m+, m-, g].
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError

N_PHOTON = 7
N_ATOM = 3
N_ATOMS = N_ATOM * N_ATOM
DIM = N_PHOTON * N_ATOMS

INPUT_TOL = 1e-9
INTERNAL_TOL = 1e-10


class Photon(IntEnum):
    VACUUM = 0
    UPPER_PLUS = 1
    UPPER_MINUS = 2
    LOWER_PLUS = 3
    LOWER_MINUS = 4
    SCATTERED_U = 5
    SCATTERED_L = 6


class Level(IntEnum):
    M_PLUS = 0
    M_MINUS = 1
    G = 2


def _check_label(value, size: int, name: str) -> int:
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)):
        raise InvalidInputError(f"{name} label must be an integer, got {value!r}")
    if not 0 <= int(value) < size:
        raise InvalidInputError(f"{name} label {value!r} outside [0, {size - 1}]")
    return int(value)


def tensor_basis(photon, atom_u, atom_l) -> int:
    """Flat index of ``|photon> (x) |atom_u> (x) |atom_l>``."""
    p = _check_label(photon, N_PHOTON, "photon")
    u = _check_label(atom_u, N_ATOM, "atom_u")
    l = _check_label(atom_l, N_ATOM, "atom_l")
    return p * N_ATOMS + u * N_ATOM + l


def basis_labels(index) -> tuple[Photon, Level, Level]:
    """Inverse of :func:`tensor_basis`."""
    i = _check_label(index, DIM, "flat")
    p, rest = divmod(i, N_ATOMS)
    u, l = divmod(rest, N_ATOM)
    return Photon(p), Level(u), Level(l)


def basis_vector(photon, atom_u, atom_l) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[tensor_basis(photon, atom_u, atom_l)] = 1.0
    return v


def frozen(arr: np.ndarray) -> np.ndarray:
    """Mark an array read-only so cached operators cannot be mutated by callers."""
    arr.setflags(write=False)
    return arr


def as_amplitude(value) -> complex:
    try:
        z = complex(value)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"not a complex amplitude: {value!r}") from exc
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise InvalidInputError(f"amplitude must be finite, got {value!r}")
    return z


def as_state(vec, dim: int = DIM, normalize: bool = False) -> np.ndarray:
    """Validate a state vector of length ``dim``.

    Unnormalized input is rejected unless ``normalize`` is set.
    """
    v = np.array(vec, dtype=complex).reshape(-1)
    if v.shape != (dim,):
        raise InvalidInputError(f"state must have {dim} amplitudes, got shape {np.shape(vec)}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("state contains NaN or Inf")
    norm2 = float(np.vdot(v, v).real)
    if normalize:
        if norm2 < INPUT_TOL:
            raise InvalidInputError("cannot normalize a zero vector")
        return v / np.sqrt(norm2)
    if abs(norm2 - 1.0) > INPUT_TOL:
        raise InvalidInputError(f"state is not normalized (squared norm {norm2:.12g})")
    return v


def apply_operator(op, state) -> np.ndarray:
    """Return ``op @ state`` without renormalizing."""
    op = np.asarray(op)
    state = np.asarray(state)
    if op.ndim != 2 or state.ndim != 1 or op.shape[1] != state.shape[0]:
        raise InvalidInputError(
            f"operator of shape {op.shape} cannot act on state of shape {state.shape}"
        )
    return op @ state


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex)
    return np.outer(v, v.conj())


def trace_photon(rho: np.ndarray) -> np.ndarray:
    """Partial trace over the photon register, no validation (works on unnormalized operators)."""
    r = np.asarray(rho).reshape(N_PHOTON, N_ATOMS, N_PHOTON, N_ATOMS)
    return np.einsum("piqj,pq->ij", r, np.eye(N_PHOTON))


def partial_trace_photon(rho) -> np.ndarray:
    """Reduce a valid 63x63 density matrix to the 9x9 two-atom density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (DIM, DIM):
        raise InvalidInputError(f"expected a {DIM}x{DIM} density matrix, got {rho.shape}")
    diag = validate_density(rho)
    if not diag.ok:
        raise InvalidInputError(f"input is not a valid density matrix: {diag}")
    return trace_photon(rho)


def mix(ensemble: Iterable[tuple[float, Sequence[complex]]], dim: int | None = None) -> np.ndarray:
    """Density matrix ``sum_i w_i |psi_i><psi_i|`` of a weighted pure-state ensemble."""
    items = list(ensemble)
    if not items:
        raise InvalidInputError("ensemble is empty")
    weights = np.array([w for w, _ in items], dtype=float)
    if np.any(~np.isfinite(weights)) or np.any(weights < 0):
        raise InvalidInputError(f"ensemble weights must be non-negative, got {weights.tolist()}")
    if abs(weights.sum() - 1.0) > INPUT_TOL:
        raise InvalidInputError(f"ensemble weights sum to {weights.sum():.12g}, not 1")
    if dim is None:
        dim = np.asarray(items[0][1]).size
    rho = np.zeros((dim, dim), dtype=complex)
    for w, psi in items:
        rho += w * projector(as_state(psi, dim))
    return rho


@dataclass(frozen=True)
class DensityDiagnostics:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    tol: float = INPUT_TOL

    @property
    def ok(self) -> bool:
        return (
            self.hermiticity_defect <= self.tol
            and self.trace_defect <= self.tol
            and self.min_eigenvalue >= -self.tol
        )

    def __str__(self) -> str:
        status = "pass" if self.ok else "fail"
        return (
            f"{status}: hermiticity {self.hermiticity_defect:.3g}, "
            f"trace {self.trace_defect:.3g}, min eigenvalue {self.min_eigenvalue:.3g}"
        )


def validate_density(rho, tol: float = INPUT_TOL) -> DensityDiagnostics:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidInputError(f"density matrix must be square, got shape {rho.shape}")
    herm = float(np.abs(rho - rho.conj().T).max())
    tr = float(abs(np.trace(rho) - 1.0))
    # eigenvalues of the Hermitian part; the anti-Hermitian defect is reported separately
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return DensityDiagnostics(herm, tr, float(evals.min()), tol)


def as_density(rho, dim: int, normalize: bool = False) -> np.ndarray:
    rho = np.array(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise InvalidInputError(f"expected a {dim}x{dim} density matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidInputError("density matrix contains NaN or Inf")
    if normalize:
        tr = np.trace(rho).real
        if tr < INPUT_TOL:
            raise InvalidInputError("cannot normalize a density matrix with zero trace")
        rho = rho / tr
    diag = validate_density(rho)
    if not diag.ok:
        raise InvalidInputError(f"invalid density matrix ({diag})")
    return rho
