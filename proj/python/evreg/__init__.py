"""Multivariate deep evidential regression."""

from ._evreg import (  # noqa: F401
    NIG,
    NIW,
    DimensionMismatch,
    DomainError,
    Error,
    Model,
    NotPositiveDefinite,
    circle_dataset,
    coupled_niw_nll,
    degeneration_nll,
    fit_student_t,
    model_evidence_logpdf,
    model_evidence_mc,
    nig_nll,
    niw_moments,
    niw_nll,
    posterior_update,
    sample_niw,
    student_t_logpdf,
    train_circle,
    verify,
)

__version__ = "0.1.0"
