import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mzi_entangle.atoms import PHI_PLUS, PSI_PLUS, interaction_unitary
from mzi_entangle.errors import InvalidInputError
from mzi_entangle.optics import beam_splitter_unitary
from mzi_entangle.protocol import evolution_operator
from mzi_entangle.state import (
    DIM,
    Level,
    Photon,
    apply_operator,
    as_state,
    basis_labels,
    basis_vector,
    mix,
    partial_trace_photon,
    projector,
    tensor_basis,
    validate_density,
)


def rand_ket(rng, dim):
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / np.linalg.norm(z)


def test_tensor_basis_examples():
    assert tensor_basis(Photon.VACUUM, Level.M_PLUS, Level.M_PLUS) == 0
    assert tensor_basis(6, 2, 2) == 62
    assert tensor_basis(Photon.LOWER_PLUS, Level.M_PLUS, Level.M_MINUS) == 28


def test_tensor_basis_round_trip():
    for i in range(DIM):
        assert tensor_basis(*basis_labels(i)) == i
    seen = {tensor_basis(p, u, l) for p in range(7) for u in range(3) for l in range(3)}
    assert seen == set(range(DIM))


@pytest.mark.parametrize("labels", [(7, 0, 0), (0, 3, 0), (0, 0, -1), ("vac", 0, 0), (1.0, 0, 0), (True, 0, 0)])
def test_tensor_basis_rejects_bad_labels(labels):
    with pytest.raises(InvalidInputError):
        tensor_basis(*labels)


def test_apply_operator():
    rng = np.random.default_rng(1)
    psi = rand_ket(rng, DIM)
    assert np.array_equal(apply_operator(np.eye(DIM), psi), psi)
    assert np.array_equal(apply_operator(np.zeros((DIM, DIM)), psi), np.zeros(DIM))
    out = apply_operator(beam_splitter_unitary(), psi)
    assert abs(np.linalg.norm(out) - 1) < 1e-12
    with pytest.raises(InvalidInputError):
        apply_operator(np.eye(9), psi)


def test_as_state_rejects_unnormalized_unless_asked():
    v = np.zeros(DIM)
    v[0] = 2.0
    with pytest.raises(InvalidInputError):
        as_state(v)
    assert np.allclose(as_state(v, normalize=True), basis_vector(0, 0, 0))


def test_partial_trace_product_state():
    psi = basis_vector(Photon.UPPER_PLUS, Level.M_PLUS, Level.M_MINUS)
    red = partial_trace_photon(projector(psi))
    want = np.kron(np.diag([1, 0, 0]), np.diag([0, 1, 0]))
    assert np.abs(red - want).max() < 1e-15


def test_partial_trace_maximally_mixed():
    red = partial_trace_photon(np.eye(DIM) / DIM)
    assert np.abs(red - np.eye(9) / 9).max() < 1e-15


def test_partial_trace_after_lower_click_is_heralded_projector():
    # product input with alpha=0.6, beta=0.8, a=0.8, b=0.6
    alpha, beta, a, b = 0.6, 0.8, 0.8, 0.6
    psi0 = np.kron(np.eye(7)[Photon.LOWER_PLUS], np.kron([alpha, beta, 0], [a, b, 0]))
    out = evolution_operator() @ psi0
    block = np.zeros((7, 7))
    block[Photon.LOWER_PLUS, Photon.LOWER_PLUS] = 1
    phi = np.kron(block, np.eye(9)) @ out
    p = np.vdot(phi, phi).real
    red = partial_trace_photon(projector(phi / np.sqrt(p)))
    # hand-built heralded ket: beta*a|m- m+> - alpha*b|m+ m->
    ket = np.zeros(9)
    ket[1 * 3 + 0] = beta * a
    ket[0 * 3 + 1] = -alpha * b
    ket /= np.linalg.norm(ket)
    assert abs(p - 0.25 * ((beta * a) ** 2 + (alpha * b) ** 2)) < 1e-12
    assert np.abs(red - np.outer(ket, ket)).max() < 1e-12


def test_partial_trace_rejects_invalid():
    with pytest.raises(InvalidInputError):
        partial_trace_photon(0.9 * np.eye(DIM) / DIM)
    with pytest.raises(InvalidInputError):
        partial_trace_photon(np.eye(9) / 9)


def test_mix_examples():
    rng = np.random.default_rng(2)
    psi = rand_ket(rng, 9)
    assert np.abs(mix([(1.0, psi)]) - np.outer(psi, psi.conj())).max() < 1e-15
    assert np.abs(mix([(0.5, psi), (0.5, psi)]) - np.outer(psi, psi.conj())).max() < 1e-15

    rho = mix([(0.8, PSI_PLUS), (0.2, PHI_PLUS)])
    # F|Psi+><Psi+| + (1-F)|Phi+><Phi+| written out entry by entry, F = 0.8
    want = np.zeros((9, 9))
    pp, pm, mp, mm = 0, 1, 3, 4
    for i in (pm, mp):
        for j in (pm, mp):
            want[i, j] = 0.8 / 2
    for i in (pp, mm):
        for j in (pp, mm):
            want[i, j] = 0.2 / 2
    assert np.abs(rho - want).max() < 1e-15


@pytest.mark.parametrize("ens", [[(-0.1, PSI_PLUS), (1.1, PHI_PLUS)], [(0.5, PSI_PLUS), (0.4, PHI_PLUS)], []])
def test_mix_rejects_bad_weights(ens):
    with pytest.raises(InvalidInputError):
        mix(ens, 9)


def test_validate_density_examples():
    assert validate_density(np.eye(DIM) / DIM).ok
    d = validate_density(0.9 * np.eye(DIM) / DIM)
    assert not d.ok and abs(d.trace_defect - 0.1) < 1e-12

    F = 0.8
    mm = np.zeros(9)
    mm[4] = 1
    # ((2-F)/4)^-1 * ((1-F)/2 |m- m-><m- m-| + F/4 |Psi+><Psi+|)
    rho9 = (2 * (1 - F) / (2 - F)) * np.outer(mm, mm) + (F / (2 - F)) * np.outer(PSI_PLUS, PSI_PLUS)
    assert validate_density(rho9).ok

    bad = np.eye(9) / 9
    bad[0, 1] = 0.1
    assert validate_density(bad).hermiticity_defect == pytest.approx(0.1)
    assert not validate_density(np.diag([1.5, -0.5])).ok


def test_operators_preserve_norm():
    rng = np.random.default_rng(3)
    ops = [beam_splitter_unitary()] + [
        interaction_unitary(atom, present, pol)
        for atom in ("U", "L") for present in (True, False) for pol in ("+", "-")
    ]
    for _ in range(100):
        v = rand_ket(rng, DIM)
        for op in ops:
            assert abs(np.linalg.norm(op @ v) - 1) < 1e-10


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 6))
def test_partial_trace_preserves_trace_and_hermiticity(seed, rank):
    rng = np.random.default_rng(seed)
    rho = mix([(1 / rank, rand_ket(rng, DIM)) for _ in range(rank)])
    red = partial_trace_photon(rho)
    assert abs(np.trace(red) - 1) < 1e-10
    assert np.abs(red - red.conj().T).max() < 1e-10


@settings(max_examples=50, deadline=None)
@given(weights=st.lists(st.floats(0, 1), min_size=1, max_size=6).filter(lambda w: sum(w) > 1e-3),
       seed=st.integers(0, 2**32 - 1))
def test_mix_is_positive(weights, seed):
    rng = np.random.default_rng(seed)
    w = np.array(weights) / sum(weights)
    rho = mix([(wi, rand_ket(rng, 9)) for wi in w])
    assert np.linalg.eigvalsh(rho).min() >= -1e-10
