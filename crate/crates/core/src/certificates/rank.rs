//! Search for a scaling `t > 0` under which every element of the generalized
//! Jacobian of the normal map of `tF` is nonsingular.
//!
//! At a point `x` outside the interior of a box `K`, those elements lie in the
//! family
//!
//! ```text
//! β Σ α_i e_i e_iᵀ + t ∇F(Π_K[x]) (I - β Σ α_i e_i e_iᵀ),   β ∈ [0,1], α ∈ simplex,
//! ```
//!
//! which is sampled through [`convg_hull_sample`]. Inside `K` the only element
//! is `t ∇F(x)`.

use super::pmatrix::principal_minor;
use super::report::{CertificateReport, Condition, Verdict, Witness, SAMPLED_NOTE};
use super::sampling::{sub_seed, SampleSet};
use crate::error::{Error, Result};
use crate::linalg::{sigma_min, IndexSubsets, Matrix, Vector, ENUMERATION_LIMIT};
use crate::model::{jacobian, VIProblem};
use crate::projection::{convg_hull_sample, ConvexHullPoint, BETA_GRID};

#[derive(Debug, Clone, PartialEq)]
pub struct RankSearchConfig {
    pub t_schedule: Vec<f64>,
    pub tol: f64,
    pub beta_grid: Vec<f64>,
    /// `α` samples per `β`, on top of which vertices and the barycenter are
    /// always included.
    pub alpha_samples: usize,
    pub seed: u64,
}

impl Default for RankSearchConfig {
    fn default() -> Self {
        Self {
            t_schedule: (0..=12).map(|k| f64::from(1u32 << k)).collect(),
            tol: 1e-8,
            beta_grid: BETA_GRID.to_vec(),
            alpha_samples: 16,
            seed: 42,
        }
    }
}

/// `β Σ α_i e_i e_iᵀ + t J (I - β Σ α_i e_i e_iᵀ)`.
pub fn family_matrix(jf: &Matrix, point: &ConvexHullPoint, t: f64) -> Matrix {
    let m = jf.nrows();
    let comp = point.complement();
    let mut out = Matrix::zeros(m, m);
    for c in 0..m {
        let col = jf.column(c) * (t * point.diagonal[c]);
        out.set_column(c, &col);
        out[(c, c)] += comp[c];
    }
    out
}

fn on_boundary(p: &VIProblem, x: &Vector) -> bool {
    let k = p.set();
    (0..x.len()).any(|i| x[i] == k.lower()[i] || x[i] == k.upper()[i])
}

/// Samples should lie in `K`; points on the boundary stand for every `x`
/// outside the interior that projects onto them.
pub fn maximal_rank_tsearch(
    p: &VIProblem,
    samples: &SampleSet,
    cfg: &RankSearchConfig,
) -> Result<CertificateReport> {
    let m = p.dim();
    if m > ENUMERATION_LIMIT {
        return Err(Error::Budget {
            m,
            limit: ENUMERATION_LIMIT,
        });
    }
    if samples.is_empty() || cfg.t_schedule.is_empty() {
        return Err(Error::Precondition(
            "sample set and t schedule must be nonempty".into(),
        ));
    }
    if cfg.t_schedule.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Precondition("t schedule must be positive".into()));
    }
    let points: Vec<(Vector, Matrix)> = samples
        .points()
        .iter()
        .map(|x| jacobian(p, x).map(|j| (x.clone(), j)))
        .collect::<Result<_>>()?;

    // standing hypothesis: ∇F nonsingular on K
    let mut sigma_floor = f64::INFINITY;
    for (x, j) in &points {
        let s = sigma_min(j);
        sigma_floor = sigma_floor.min(s);
        if !(s >= cfg.tol) {
            return Ok(
                CertificateReport::new(Condition::MaximalRank, Verdict::Fail, s)
                    .with_witness(Witness::PointSubset {
                        x: x.clone(),
                        indices: (0..m).collect(),
                        value: s,
                    })
                    .with_sampling(samples.seed(), samples.len())
                    .note("hypothesis fails: the Jacobian is singular at a sample of K"),
            );
        }
    }

    if !p.set().has_finite_bound() {
        let t = cfg.t_schedule[0];
        return Ok(CertificateReport::new(Condition::MaximalRank, Verdict::Pass, sigma_floor)
            .with_sampling(samples.seed(), samples.len())
            .evidence("t", t)
            .evidence("sigma_min_jacobian", sigma_floor)
            .note("K is the whole space: the normal-map Jacobian is the Jacobian of F for every t")
            .note(SAMPLED_NOTE));
    }

    // standing hypothesis: (m-1)×(m-1) principal minors nonzero on the boundary
    if m >= 2 {
        for (x, j) in points.iter().filter(|(x, _)| on_boundary(p, x)) {
            for s in IndexSubsets::of_size(m, m - 1) {
                let d = principal_minor(j, &s);
                if !(d.abs() >= cfg.tol) {
                    return Ok(CertificateReport::new(Condition::MaximalRank, Verdict::Fail, d)
                        .with_witness(Witness::PointSubset {
                            x: x.clone(),
                            indices: s,
                            value: d,
                        })
                        .with_sampling(samples.seed(), samples.len())
                        .note("hypothesis fails: a principal minor of order m-1 vanishes on the boundary"));
                }
            }
        }
    }

    let family = convg_hull_sample(m, &cfg.beta_grid, cfg.alpha_samples, sub_seed(cfg.seed, 7));
    let mut last: Option<(f64, Witness)> = None;
    for &t in &cfg.t_schedule {
        let mut worst: Option<(f64, Witness)> = None;
        for (x, j) in &points {
            if on_boundary(p, x) {
                for member in &family {
                    let s = sigma_min(&family_matrix(j, member, t));
                    if worst.as_ref().is_none_or(|(w, _)| s < *w) {
                        worst = Some((
                            s,
                            Witness::FamilyMember {
                                x: x.clone(),
                                beta: member.beta,
                                alpha: member.alpha.clone(),
                                t,
                                value: s,
                            },
                        ));
                    }
                }
            } else {
                let s = sigma_min(&(j * t));
                if worst.as_ref().is_none_or(|(w, _)| s < *w) {
                    worst = Some((
                        s,
                        Witness::FamilyMember {
                            x: x.clone(),
                            beta: 0.0,
                            alpha: vec![1.0 / m as f64; m],
                            t,
                            value: s,
                        },
                    ));
                }
            }
        }
        let (s, w) = worst.expect("nonempty samples");
        if s >= cfg.tol {
            return Ok(
                CertificateReport::new(Condition::MaximalRank, Verdict::Pass, s)
                    .with_witness(w)
                    .with_sampling(samples.seed(), samples.len())
                    .evidence("t", t)
                    .evidence("sigma_min_jacobian", sigma_floor)
                    .evidence("family_size", family.len() as f64)
                    .note("witness is the arg-min family member at the accepted t")
                    .note(SAMPLED_NOTE),
            );
        }
        last = Some((s, w));
    }
    let (s, w) = last.expect("nonempty schedule");
    Ok(
        CertificateReport::new(Condition::MaximalRank, Verdict::Inconclusive, s)
            .with_witness(w)
            .with_sampling(samples.seed(), samples.len())
            .evidence("sigma_min_jacobian", sigma_floor)
            .note("no t in the schedule made every sampled family member nonsingular"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoxSet, Builtin, Mapping};

    #[test]
    fn identity_on_cube_passes_at_one() {
        let k = BoxSet::uniform(3, 0.0, 1.0).unwrap();
        let p = VIProblem::new(Mapping::identity(3), k.clone(), "t").unwrap();
        let s = SampleSet::boundary_mix(&k, 12, 1, 10.0);
        let r = maximal_rank_tsearch(&p, &s, &RankSearchConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.evidence_value("t"), Some(1.0));
        assert!(r.margin >= 1e-8);
    }

    #[test]
    fn full_space_degenerates_to_jacobian_check() {
        let k = BoxSet::full(2);
        let a = Matrix::from_row_slice(2, 2, &[1., 2., 3., 1.]);
        let p = VIProblem::new(Mapping::linear(a.clone()).unwrap(), k.clone(), "t").unwrap();
        let r = maximal_rank_tsearch(
            &p,
            &SampleSet::uniform(&k, 5, 1, 10.0),
            &RankSearchConfig::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!((r.margin - sigma_min(&a)).abs() < 1e-15);
    }

    #[test]
    fn singular_boundary_jacobian_fails() {
        let k = BoxSet::uniform(2, 0.0, 1.0).unwrap();
        let p = VIProblem::new(Mapping::builtin(Builtin::Cubic, 2), k.clone(), "t").unwrap();
        let r = maximal_rank_tsearch(
            &p,
            &SampleSet::boundary_mix(&k, 9, 2, 10.0),
            &RankSearchConfig::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.witness.is_some());
    }

    #[test]
    fn family_matrix_at_drop_vertex() {
        let a = Matrix::from_row_slice(2, 2, &[1., 2., 3., 1.]);
        let vertex = ConvexHullPoint::new(1.0, vec![1.0, 0.0]);
        let f = family_matrix(&a, &vertex, 2.0);
        assert_eq!(f, Matrix::from_row_slice(2, 2, &[1., 4., 0., 2.]));
    }
}
