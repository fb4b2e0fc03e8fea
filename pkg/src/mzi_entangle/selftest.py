"""Acceptance suites: oracle equivalence, closed-form regressions and invariants.

Each check takes a numpy Generator and returns a :class:`CheckResult`. The
``selftest`` CLI command and ``tests/test_acceptance.py`` both run them.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import oracle
from .analysis import beats_pure_max, concurrence, fidelity, purification_report, sweep_success
from .atoms import PHI_PLUS, PSI_PLUS, SINGLET, AtomAmplitudes, interaction_unitary
from .optics import beam_splitter_unitary, fly
from .protocol import (
    ProtocolConfig,
    _run_density,
    _run_ensemble,
    atom_input,
    bell_mixture,
    by_outcome,
    closed_form_probabilities,
    evolution_operator,
    run,
    run_mixed_bell,
)
from .state import DIM, N_ATOMS

DEFAULT_SEED = 0


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def random_amplitudes(rng: np.random.Generator) -> AtomAmplitudes:
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    return AtomAmplitudes.normalized(*z)


def random_ket(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / np.linalg.norm(z)


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _port_probs(recs) -> tuple[float, float, float]:
    r = by_outcome(recs)
    return (
        r["D_l(+)"].probability + r["D_l(-)"].probability,
        r["D_u(+)"].probability + r["D_u(-)"].probability,
        r["no_fire"].probability,
    )


def check_table1(rng: np.random.Generator, n: int = 1000) -> CheckResult:
    err = total_err = 0.0
    for _ in range(n):
        u, l = random_amplitudes(rng), random_amplitudes(rng)
        got = _port_probs(run(ProtocolConfig(atom_u=u, atom_l=l)))
        want = closed_form_probabilities(u.c_plus, u.c_minus, l.c_plus, l.c_minus)
        err = max(err, max(abs(g - w) for g, w in zip(got, want)))
        total_err = max(total_err, abs(sum(got) - 1.0))
    ok = err <= 1e-10 and total_err <= 1e-10
    return CheckResult("table1", ok, f"{n} configs, max |engine - closed form| {err:.2e}, max |sum - 1| {total_err:.2e} (tol 1e-10)")


def check_max_success(rng: np.random.Generator) -> CheckResult:
    grid = [k / 1000 for k in range(1001)]
    rows = sweep_success(grid)
    err = max(abs(r.p_success - 0.5 * r.x * (1 - r.x)) for r in rows)
    best = max(rows, key=lambda r: r.p_success)
    ok = err <= 1e-10 and best.x == 0.5 and abs(best.p_success - 0.125) <= 1e-10
    return CheckResult(
        "max_success", ok,
        f"{len(rows)} points, max |P - x(1-x)/2| {err:.2e}; grid max {best.p_success:.12g} at x={best.x}",
    )


def symmetric_random_pair(rng: np.random.Generator) -> tuple[AtomAmplitudes, AtomAmplitudes]:
    """Two atoms in the same superposition up to a global phase."""
    x = rng.uniform(0.05, 0.95)
    phi_p, phi_m, theta = rng.uniform(0, 2 * np.pi, size=3)
    l = AtomAmplitudes(np.sqrt(x) * np.exp(1j * phi_p), np.sqrt(1 - x) * np.exp(1j * phi_m))
    u = AtomAmplitudes(l.c_plus * np.exp(1j * theta), l.c_minus * np.exp(1j * theta))
    return u, l


def check_eq5_state(rng: np.random.Generator, n: int = 100) -> CheckResult:
    fid_err = conc_err = 0.0
    for _ in range(n):
        u, l = symmetric_random_pair(rng)
        rho = by_outcome(run(ProtocolConfig(atom_u=u, atom_l=l)))["D_l(+)"].conditional()
        fid_err = max(fid_err, abs(fidelity(rho, SINGLET) - 1))
        conc_err = max(conc_err, abs(concurrence(rho) - 1))
    ok = fid_err <= 1e-10 and conc_err <= 1e-10
    return CheckResult("eq5_state", ok, f"{n} configs, max |fidelity - 1| {fid_err:.2e}, max |concurrence - 1| {conc_err:.2e} (tol 1e-10)")


def check_purification(rng: np.random.Generator) -> CheckResult:
    e_pl = e_pu = e_fl = e_fu = 0.0
    for k in range(11):
        F = k / 10
        row = purification_report([F])[0]
        e_pl = max(e_pl, abs(row.p_dl - F / 4))
        e_pu = max(e_pu, abs(row.p_du - (2 - F) / 4))
        if F > 0:
            e_fl = max(e_fl, abs(row.fid_dl - 1))
        e_fu = max(e_fu, abs(row.fid_du - F / (2 - F)))
    phi_dl = by_outcome(run(ProtocolConfig(joint_input=np.array(PHI_PLUS))))["D_l(+)"].probability
    ok = e_pl <= 1e-12 and e_pu <= 1e-12 and e_fl <= 1e-10 and e_fu <= 1e-10 and phi_dl < 1e-12
    return CheckResult(
        "purification", ok,
        f"|P_dl - F/4| {e_pl:.2e}, |P_du - (2-F)/4| {e_pu:.2e} (tol 1e-12); "
        f"|fid_dl - 1| {e_fl:.2e}, |fid_du - F/(2-F)| {e_fu:.2e} (tol 1e-10); Phi+ P_dl {phi_dl:.2e}",
    )


def check_empty_interferometer(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    # the atoms' state is irrelevant when both are absent
    for u, l in [(random_amplitudes(rng), random_amplitudes(rng)) for _ in range(5)]:
        cfg = ProtocolConfig(atom_u=u, atom_l=l, atom_u_present=False, atom_l_present=False)
        worst = max(worst, abs(by_outcome(run(cfg))["D_u(+)"].probability - 1))
    return CheckResult("empty_interferometer", worst <= 1e-12, f"max |P(D_u+) - 1| {worst:.2e} (tol 1e-12)")


def random_config(rng: np.random.Generator, kind: str) -> ProtocolConfig:
    flags = dict(
        atom_u_present=bool(rng.random() < 0.75),
        atom_l_present=bool(rng.random() < 0.75),
        photon_port=str(rng.choice(["lower", "upper"], p=[0.75, 0.25])),
        photon_pol=str(rng.choice(["+", "-"], p=[0.75, 0.25])),
    )
    if kind == "product":
        return ProtocolConfig(atom_u=random_amplitudes(rng), atom_l=random_amplitudes(rng), **flags)
    if kind == "joint_pure":
        return ProtocolConfig(joint_input=random_ket(rng, N_ATOMS), **flags)
    if kind == "bell_mixture":
        return ProtocolConfig(joint_input=bell_mixture(rng.uniform()), **flags)
    if kind == "joint_mixed":
        return ProtocolConfig(joint_input=random_density(rng, N_ATOMS, int(rng.integers(1, 10))), **flags)
    if kind == "atom_mixed":
        return ProtocolConfig(atom_u=random_density(rng, 2), atom_l=random_amplitudes(rng), **flags)
    raise ValueError(kind)


CONFIG_KINDS = ("product", "joint_pure", "bell_mixture", "joint_mixed", "atom_mixed")


def check_oracle_equivalence(rng: np.random.Generator, n: int = 200) -> CheckResult:
    p_err = s_err = 0.0
    absent = mixed = 0
    for i in range(n):
        kind = CONFIG_KINDS[i % len(CONFIG_KINDS)]
        cfg = random_config(rng, kind)
        absent += not (cfg.atom_u_present and cfg.atom_l_present)
        mixed += kind in ("bell_mixture", "joint_mixed", "atom_mixed")
        rho_atoms, _ = atom_input(cfg)
        ref = oracle.outcomes(rho_atoms, cfg.atom_u_present, cfg.atom_l_present, cfg.photon_port, cfg.photon_pol)
        for rec in run(cfg):
            p_ref, cond_ref = ref[rec.outcome]
            p_err = max(p_err, abs(rec.probability - p_ref))
            if (cond_ref is None) != (rec.conditional_atoms is None):
                s_err = np.inf
            elif cond_ref is not None:
                s_err = max(s_err, float(np.abs(rec.conditional_atoms - cond_ref).max()))
    ok = p_err <= 1e-10 and s_err <= 1e-10 and absent > 0 and mixed > 0
    return CheckResult(
        "oracle_equivalence", ok,
        f"{n} configs ({absent} with an absent atom, {mixed} mixed), max prob err {p_err:.2e}, max state err {s_err:.2e} (tol 1e-10)",
    )


def _is_permutation(u: np.ndarray) -> bool:
    return (
        bool(np.all((u == 0) | (u == 1)))
        and bool(np.all(u.sum(axis=0) == 1))
        and bool(np.all(u.sum(axis=1) == 1))
    )


def check_invariants(rng: np.random.Generator, n: int = 50) -> CheckResult:
    failures = []
    bs = beam_splitter_unitary()
    unit_err = float(np.abs(bs @ bs.conj().T - np.eye(DIM)).max())
    if unit_err > 1e-12:
        failures.append(f"beam splitter unitarity {unit_err:.2e}")

    for atom in ("U", "L"):
        for pol in ("+", "-"):
            u = interaction_unitary(atom, True, pol)
            if not _is_permutation(u) or not np.array_equal(u @ u, np.eye(DIM)):
                failures.append(f"interaction {atom}{pol} not an involutive permutation")
    for pol in ("+", "-"):
        iu, il = interaction_unitary("U", True, pol), interaction_unitary("L", True, pol)
        if np.abs(iu @ il - il @ iu).max() > 1e-12:
            failures.append(f"interactions do not commute for pol {pol}")

    # a sigma+ photon never populates sigma- Fly modes
    minus = [fly(arm, "-") for arm in ("upper", "lower")]
    pol_err = 0.0
    for _ in range(n):
        psi = np.zeros((7, N_ATOMS), dtype=complex)
        psi[[fly("upper", "+"), fly("lower", "+")]] = random_ket(rng, 2 * N_ATOMS).reshape(2, N_ATOMS)
        out = (evolution_operator(True, True, "+") @ psi.reshape(-1)).reshape(7, N_ATOMS)
        pol_err = max(pol_err, float(np.abs(out[minus]).max()))
    if pol_err >= 1e-12:
        failures.append(f"polarization leak {pol_err:.2e}")

    path_err = 0.0
    for i in range(n):
        cfg = random_config(rng, CONFIG_KINDS[i % len(CONFIG_KINDS)])
        rho, ens = atom_input(cfg)
        if ens is None:
            w, v = np.linalg.eigh(rho)
            ens = [(float(x), v[:, k]) for k, x in enumerate(w) if x > 0]
        a = _run_density(cfg, rho)
        b = _run_ensemble(cfg, ens)
        path_err = max(path_err, max(float(np.abs(x - y).max()) for (_, x), (_, y) in zip(a, b)))
    if path_err > 1e-10:
        failures.append(f"ensemble/density disagreement {path_err:.2e}")

    phase_err = 0.0
    for _ in range(n):
        u, l = random_amplitudes(rng), random_amplitudes(rng)
        tu, tl = np.exp(1j * rng.uniform(0, 2 * np.pi, size=2))
        base = run(ProtocolConfig(atom_u=u, atom_l=l))
        shifted = run(ProtocolConfig(
            atom_u=AtomAmplitudes(u.c_plus * tu, u.c_minus * tu),
            atom_l=AtomAmplitudes(l.c_plus * tl, l.c_minus * tl),
        ))
        phase_err = max(phase_err, max(abs(x.probability - y.probability) for x, y in zip(base, shifted)))
    if phase_err > 1e-10:
        failures.append(f"global phase changes probabilities by {phase_err:.2e}")

    detail = "; ".join(failures) if failures else (
        f"unitarity {unit_err:.1e}, polarization leak {pol_err:.1e}, "
        f"path agreement {path_err:.1e}, phase invariance {phase_err:.1e}"
    )
    return CheckResult("invariants", not failures, detail)


def check_threshold(rng: np.random.Generator) -> CheckResult:
    grid = sorted({k / 100 for k in range(101)} | {0.5, np.nextafter(0.5, 1), np.nextafter(0.5, 0)})
    bad = [F for F in grid if beats_pure_max(F) != (Fraction(F) > Fraction(1, 2))]
    inner = [F for F in grid if 0 < F < 1]
    # Psi+ fidelity after a D_u click, from the engine
    du_fid = {
        F: fidelity(by_outcome(run_mixed_bell(F, cross_check=False))["D_u(+)"].conditional(), PSI_PLUS)
        for F in inner
    }
    not_lower = [F for F, f in du_fid.items() if not f < F]
    ok = not bad and not not_lower
    return CheckResult(
        "threshold", ok,
        f"{len(grid)} F values; F/4 > 1/8 iff F > 1/2: {'ok' if not bad else bad}; "
        f"fid_du < F on (0,1): {'ok' if not not_lower else not_lower}",
    )


CHECKS: dict[str, Callable[[np.random.Generator], CheckResult]] = {
    "table1": check_table1,
    "max_success": check_max_success,
    "eq5_state": check_eq5_state,
    "purification": check_purification,
    "empty_interferometer": check_empty_interferometer,
    "oracle_equivalence": check_oracle_equivalence,
    "invariants": check_invariants,
    "threshold": check_threshold,
}


def run_all(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    results = []
    for name, check in CHECKS.items():
        rng = np.random.default_rng([seed, list(CHECKS).index(name)])
        try:
            results.append(check(rng))
        except Exception as exc:  # a crash is a failed suite, not an aborted run
            results.append(CheckResult(name, False, f"raised {type(exc).__name__}: {exc}"))
    return results
