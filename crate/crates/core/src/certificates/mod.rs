//! Existence-condition checkers. Each produces a [`CertificateReport`].
//!
//! Conditions that quantify over all of `K` are checked on seeded samples:
//! a `fail` is backed by a re-checkable witness and is conclusive, while a
//! `pass` on sampled data is evidence only and says so in its notes.

mod game;
mod growth;
mod pfunction;
mod pmatrix;
mod rank;
mod report;
mod sampling;
mod sigma;

pub use game::{
    hessian_block_convexity, p_upsilon_check, pl_condition_check, pl_moduli, upsilon_build,
    PlConfig, PlayerPl, QUASI_NASH_TOL,
};
pub use growth::{fit_growth, growth_l0lp_fit, GrowthFit};
pub use pfunction::{
    block_pfunction_ratio, block_pfunction_search, uniform_pfunction_search, MIN_PAIRS,
};
pub use pmatrix::{
    direction_grid, mixed_row_matrix, pmatrix_at, pmatrix_minors, pmatrix_oracle, principal_minor,
    principal_minors, recheck_mixed_rows, sign_reversal_value, uniform_pmatrix_sampled,
    MIN_ORACLE_SAMPLES,
};
pub use rank::{family_matrix, maximal_rank_tsearch, RankSearchConfig};
pub use report::{
    CertificateRecord, CertificateReport, Condition, EvidenceRecord, Verdict, Witness,
    WitnessRecord, SAMPLED_NOTE,
};
pub use sampling::{SampleSet, DEFAULT_RADIUS};
pub use sigma::{principal_submatrix_sigma_sweep, recheck_point_subset, DEFAULT_SIGMA_THRESHOLD};

use crate::model::VIProblem;
use crate::normal_map::{coercivity_probe, normal_map, ProbeConfig, ProbeVerdict};

/// Wraps [`coercivity_probe`] as a certificate: coercive evidence passes,
/// a non-growing ray fails with that ray as witness.
pub fn coercivity_certificate(p: &VIProblem, cfg: &ProbeConfig) -> CertificateReport {
    let probe = coercivity_probe(p, cfg);
    let margin = probe.min_slope().unwrap_or(f64::NAN);
    let budget = probe.rays.len() * cfg.steps;
    let report = match probe.verdict {
        ProbeVerdict::CoerciveEvidence => {
            CertificateReport::new(Condition::Coercivity, Verdict::Pass, margin)
                .note("coercive-evidence: every probed ray grows; evidence, not a proof")
        }
        ProbeVerdict::ViolationWitness => {
            let ray = probe.witness().expect("violation has a ray");
            let last = ray.norms.len() - 1;
            CertificateReport::new(Condition::Coercivity, Verdict::Fail, margin)
                .with_witness(Witness::Ray {
                    direction: ray.direction.clone(),
                    radii: (ray.radii[0], ray.radii[last]),
                    norms: (ray.norms[0], ray.norms[last]),
                })
                .note("violation-witness: the residual norm did not double along the witness ray")
        }
        ProbeVerdict::Inconclusive => {
            CertificateReport::new(Condition::Coercivity, Verdict::Inconclusive, margin)
                .note("inconclusive: some ray grew too slowly or produced non-finite values")
        }
    };
    report
        .with_sampling(cfg.seed, budget)
        .evidence("rays", probe.rays.len() as f64)
        .evidence("r0", cfg.r0)
        .evidence("growth", cfg.growth)
        .evidence("steps", cfg.steps as f64)
        .note("margin is the smallest fitted log-log slope")
}

/// Residual norms at the two ends of a ray witness.
pub fn recheck_ray(
    p: &VIProblem,
    direction: &crate::linalg::Vector,
    radii: (f64, f64),
) -> crate::error::Result<(f64, f64)> {
    let first = normal_map(p, &(direction * radii.0))?.norm;
    let last = normal_map(p, &(direction * radii.1))?.norm;
    Ok((first, last))
}
