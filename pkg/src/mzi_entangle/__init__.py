"""Heralded two-atom entanglement from a single photon in a Mach-Zehnder interferometer."""
from .analysis import concurrence, fidelity, purification_report, sweep_success
from .atoms import PHI_PLUS, PSI_PLUS, SINGLET, AtomAmplitudes
from .errors import InvalidInputError, UndefinedConditionalError, UnsupportedSubspaceError
from .protocol import (
    OutcomeRecord,
    ProtocolConfig,
    closed_form_probabilities,
    post_select_dl,
    run,
    run_mixed_bell,
)

__version__ = "0.1.0"
