import numpy as np

from mzi_entangle import oracle

S = np.sqrt(0.5)


def test_oracle_operators_are_unitary():
    n = len(oracle.KETS)
    for op in [oracle.beam_splitter()] + [oracle.interaction(a, p) for a in "UL" for p in "+-"]:
        assert np.abs(op @ op.conj().T - np.eye(n)).max() < 1e-12


def test_oracle_reproduces_balanced_table():
    r = oracle.outcomes_pure(S, S, S, S)
    assert abs(r["D_l(+)"][0] - 1 / 8) < 1e-12
    assert abs(r["D_u(+)"][0] - 3 / 8) < 1e-12
    assert abs(r["no_fire"][0] - 1 / 2) < 1e-12
    assert r["D_l(-)"][1] is None


def test_oracle_empty_interferometer():
    r = oracle.outcomes_pure(1, 0, 0, 1, atom_u_present=False, atom_l_present=False)
    assert abs(r["D_u(+)"][0] - 1) < 1e-12
