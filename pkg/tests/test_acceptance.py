"""Exit criteria. Each criterion runs at its pinned tolerance and prints one
PASS/FAIL line (visible with ``pytest -s`` or in the ``-v`` report).

    1 table1               engine vs Table-1 closed forms, 1000 configs, 1e-10
    2 max_success          symmetric sweep, step 1e-3, max 0.125 at x = 0.5
    3 eq5_state            heralded singlet fidelity / concurrence, 100 configs, 1e-10
    4 purification         P = F/4, (2-F)/4 at 1e-12; fidelities at 1e-10
    5 empty_interferometer P(D_u) = 1 at 1e-12
    6 oracle_equivalence   brute-force oracle, 200 configs incl. absent / mixed, 1e-10
    7 invariants           unitarity 1e-12, permutations, polarization, paths, phases
    8 threshold            F/4 > 1/8 iff F > 1/2; fid_du < F on (0, 1)
"""
import numpy as np
import pytest

from mzi_entangle.selftest import CHECKS, DEFAULT_SEED

CRITERIA = list(CHECKS)


@pytest.mark.parametrize("name", CRITERIA)
@pytest.mark.parametrize("seed", [DEFAULT_SEED, 12345])
def test_criterion(name, seed):
    rng = np.random.default_rng([seed, CRITERIA.index(name)])
    result = CHECKS[name](rng)
    print(f"\n[criterion {CRITERIA.index(name) + 1}, seed {seed}] {result.line()}")
    assert result.passed, result.detail
