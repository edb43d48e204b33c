"""Recovery of sparse binary signals from (biased) linear measurements."""

from ._binrec import (
    check,
    delta_bin,
    dual_certificate,
    face_survival_prob,
    gen_matrix,
    gen_noise,
    gen_support,
    mibi_sample_bound,
    noise_error_bound,
    phase_transition,
    recovers_uniquely,
    solve,
    verify_certificate,
)

__all__ = [
    "check",
    "delta_bin",
    "dual_certificate",
    "face_survival_prob",
    "gen_matrix",
    "gen_noise",
    "gen_support",
    "mibi_sample_bound",
    "noise_error_bound",
    "phase_transition",
    "recovers_uniquely",
    "solve",
    "verify_certificate",
]
