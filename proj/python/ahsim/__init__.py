"""Anderson-Holstein master equations (Redfield, Lindblad) and classical master equations."""

from ._ahsim import (
    DiscreteBath,
    ModelParams,
    WideBand,
    __version__,
    apply_generator,
    canonical_config,
    check,
    cme_rates,
    coefficients,
    energies,
    fc_matrix,
    franck_condon,
    propagate,
    rate_matrices,
    run_config,
    superoperator,
    wigner,
)

__all__ = [
    "DiscreteBath",
    "ModelParams",
    "WideBand",
    "__version__",
    "apply_generator",
    "canonical_config",
    "check",
    "cme_rates",
    "coefficients",
    "energies",
    "fc_matrix",
    "franck_condon",
    "propagate",
    "rate_matrices",
    "run_config",
    "superoperator",
    "wigner",
]
