use super::report::{CertificateReport, Condition, Verdict, Witness, SAMPLED_NOTE};
use super::sampling::SampleSet;
use crate::error::{Error, Result};
use crate::linalg::{sigma_min, IndexSubsets, PrincipalSubmatrix, Vector, ENUMERATION_LIMIT};
use crate::model::{jacobian, VIProblem};

/// Default pass threshold for the smallest principal-submatrix singular value.
pub const DEFAULT_SIGMA_THRESHOLD: f64 = 1e-10;

/// Smallest singular value over every sample point and every nonempty
/// principal submatrix of `∇F` there. Passes iff it exceeds `threshold`.
pub fn principal_submatrix_sigma_sweep(
    p: &VIProblem,
    samples: &SampleSet,
    threshold: f64,
) -> Result<CertificateReport> {
    let m = p.dim();
    if m > ENUMERATION_LIMIT {
        return Err(Error::Budget {
            m,
            limit: ENUMERATION_LIMIT,
        });
    }
    if samples.is_empty() {
        return Err(Error::Precondition("sample set is empty".into()));
    }
    let mut best: Option<(Vector, Vec<usize>, f64)> = None;
    let mut full_min = f64::INFINITY;
    for x in samples.points() {
        let j = jacobian(p, x)?;
        for s in IndexSubsets::new(m) {
            let sigma = sigma_min(&PrincipalSubmatrix::of(&j, &s).matrix);
            if s.len() == m {
                full_min = full_min.min(sigma);
            }
            if best.as_ref().is_none_or(|(_, _, b)| sigma < *b) {
                best = Some((x.clone(), s, sigma));
            }
        }
    }
    let (x, indices, margin) = best.expect("nonempty sample set");
    let witness = Witness::PointSubset {
        x,
        indices,
        value: margin,
    };
    let report = if margin > threshold {
        CertificateReport::new(Condition::SigmaSweep, Verdict::Pass, margin).note(SAMPLED_NOTE)
    } else {
        CertificateReport::new(Condition::SigmaSweep, Verdict::Fail, margin)
    };
    Ok(report
        .with_witness(witness)
        .with_sampling(samples.seed(), samples.len())
        .evidence("threshold", threshold)
        .evidence("sigma_min_full", full_min)
        .note("witness records the arg-min point and principal index set")
        .note(samples.radius_note()))
}

/// Singular value behind a [`Witness::PointSubset`].
pub fn recheck_point_subset(p: &VIProblem, x: &Vector, indices: &[usize]) -> Result<f64> {
    let j = jacobian(p, x)?;
    Ok(sigma_min(&PrincipalSubmatrix::of(&j, indices).matrix))
}
