//! Damped semismooth Newton on the normal map.
//!
//! A zero `v` of `F_K^nor` gives the solution `x* = Π_K[v]`. Each iteration
//! takes the first acceptable direction among
//!
//! 1. Newton, `J d = -r`, or the regularized step `(JᵀJ + λI) d = -Jᵀr` when
//!    `J` is numerically singular;
//! 2. the merit gradient step `d = -Jᵀr`;
//! 3. the fixed-point step `d = -r`, i.e. `v ← Π_K[v] - F(Π_K[v])`.
//!
//! Steps are damped by Armijo backtracking on `θ(v) = ½ ||r(v)||²`.

use std::cmp::Ordering;
use std::fmt;

use crate::certificates::{
    hessian_block_convexity, pl_condition_check, PlConfig, SampleSet, Verdict, DEFAULT_RADIUS,
};
use crate::error::Result;
use crate::linalg::{singular_values, solve as lu_solve, Matrix, Vector};
use crate::model::{QuadraticGame, VIProblem};
use crate::normal_map::{normal_map, normal_map_jacobian_element, NormalMapEval};
use crate::projection::{project, BoundaryRule};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub max_iters: usize,
    /// Residual tolerance `ε` on `||F_K^nor(v)||`.
    pub tol: f64,
    pub armijo_sigma: f64,
    pub backtrack: f64,
    pub max_halvings: usize,
    /// `λ`: singularity threshold relative to `||J||` and the regularization weight.
    pub reg_floor: f64,
    pub boundary_rule: BoundaryRule,
    /// Defaults to [`crate::model::BoxSet::midpoint`].
    pub start: Option<Vector>,
    /// Half-width for multistart draws on unbounded coordinates.
    pub start_radius: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            tol: 1e-10,
            armijo_sigma: 1e-4,
            backtrack: 0.5,
            max_halvings: 40,
            reg_floor: 1e-8,
            boundary_rule: BoundaryRule::One,
            start: None,
            start_radius: DEFAULT_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Solved,
    MaxIters,
    LineSearchStall,
    SingularJacobianFallbackExhausted,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Solved => "solved",
            SolveStatus::MaxIters => "max-iters",
            SolveStatus::LineSearchStall => "line-search-stall",
            SolveStatus::SingularJacobianFallbackExhausted => {
                "singular-jacobian-fallback-exhausted"
            }
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Newton,
    Regularized,
    Gradient,
    FixedPoint,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Newton => "newton",
            StepKind::Regularized => "regularized",
            StepKind::Gradient => "gradient",
            StepKind::FixedPoint => "fixed-point",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    ViSolution,
    QuasiNash,
    Nash,
    NotApplicable,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::ViSolution => "vi-solution",
            Classification::QuasiNash => "quasi-nash",
            Classification::Nash => "nash",
            Classification::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub start: Vector,
    /// Terminal point of the normal-map iteration.
    pub v: Vector,
    /// `Π_K[v]`.
    pub x: Vector,
    pub residual: f64,
    /// Residual norm at the start and after every accepted step.
    pub trace: Vec<f64>,
    pub steps: Vec<StepKind>,
    pub classification: Classification,
    /// Message of an evaluation failure that ended the run early.
    pub failure: Option<String>,
}

impl SolveResult {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    pub fn solved(&self) -> bool {
        self.status == SolveStatus::Solved
    }
}

fn merit(e: &NormalMapEval) -> f64 {
    0.5 * e.r.dot(&e.r)
}

pub fn solve(p: &VIProblem, cfg: &SolveConfig) -> Result<SolveResult> {
    let start = cfg.start.clone().unwrap_or_else(|| p.set().midpoint());
    let mut current = normal_map(p, &start)?;
    let mut trace = vec![current.norm];
    let mut steps = Vec::new();
    let mut status = SolveStatus::MaxIters;
    let mut failure = None;

    for _ in 0..cfg.max_iters {
        if current.norm <= cfg.tol {
            status = SolveStatus::Solved;
            break;
        }
        let j = match normal_map_jacobian_element(p, &current.v, cfg.boundary_rule) {
            Ok(j) => j,
            Err(e) => {
                failure = Some(e.to_string());
                status = SolveStatus::LineSearchStall;
                break;
            }
        };
        let sv = singular_values(&j);
        let (smin, smax) = (sv.min(), sv.max());
        let singular = !(smax > 0.0) || smin < cfg.reg_floor * smax;

        match take_step(p, cfg, &current, &j, singular) {
            Some((next, kind)) => {
                current = next;
                trace.push(current.norm);
                steps.push(kind);
            }
            None => {
                status = if singular {
                    SolveStatus::SingularJacobianFallbackExhausted
                } else {
                    SolveStatus::LineSearchStall
                };
                break;
            }
        }
    }
    if current.norm <= cfg.tol {
        status = SolveStatus::Solved;
    }

    let x = project(p.set(), &current.v);
    Ok(SolveResult {
        status,
        start,
        x,
        residual: current.norm,
        v: current.v,
        trace,
        steps,
        classification: if status == SolveStatus::Solved {
            Classification::ViSolution
        } else {
            Classification::NotApplicable
        },
        failure,
    })
}

fn take_step(
    p: &VIProblem,
    cfg: &SolveConfig,
    current: &NormalMapEval,
    j: &Matrix,
    singular: bool,
) -> Option<(NormalMapEval, StepKind)> {
    let r = &current.r;
    let grad = j.transpose() * r;
    let m = r.len();

    let mut candidates: Vec<(Vector, StepKind)> = Vec::with_capacity(3);
    if singular {
        let normal = j.transpose() * j + Matrix::identity(m, m) * cfg.reg_floor;
        if let Some(d) = lu_solve(&normal, &-&grad) {
            candidates.push((d, StepKind::Regularized));
        }
    } else if let Some(d) = lu_solve(j, &-r) {
        candidates.push((d, StepKind::Newton));
    }
    if grad.iter().any(|g| *g != 0.0) {
        candidates.push((-&grad, StepKind::Gradient));
    }
    candidates.push((-r, StepKind::FixedPoint));

    let theta = merit(current);
    for (d, kind) in candidates {
        if !d.iter().all(|v| v.is_finite()) || d.iter().all(|v| *v == 0.0) {
            continue;
        }
        let slope = grad.dot(&d);
        let slope = match kind {
            StepKind::FixedPoint => slope.min(0.0),
            _ if !(slope < 0.0) => continue,
            _ => slope,
        };
        if let Some(next) = line_search(p, cfg, &current.v, &d, theta, slope) {
            return Some((next, kind));
        }
    }
    None
}

fn line_search(
    p: &VIProblem,
    cfg: &SolveConfig,
    v: &Vector,
    d: &Vector,
    theta: f64,
    slope: f64,
) -> Option<NormalMapEval> {
    let mut t = 1.0;
    for _ in 0..=cfg.max_halvings {
        let trial = v + d * t;
        if let Ok(e) = normal_map(p, &trial) {
            let next = merit(&e);
            if next < theta && next <= theta + cfg.armijo_sigma * t * slope {
                return Some(e);
            }
        }
        t *= cfg.backtrack;
    }
    None
}

/// Labels a solved result: `vi-solution` for plain VIs; for games
/// `quasi-nash`, upgraded to `nash` when the block-convexity gate or the PŁ
/// check passes.
pub fn classify(p: &VIProblem, g: Option<&QuadraticGame>, res: &SolveResult) -> Classification {
    let _ = p;
    if res.status != SolveStatus::Solved {
        return Classification::NotApplicable;
    }
    let Some(g) = g else {
        return Classification::ViSolution;
    };
    if hessian_block_convexity(g).verdict == Verdict::Pass {
        return Classification::Nash;
    }
    match pl_condition_check(g, &res.x, &PlConfig::default()) {
        Ok(r) if r.verdict == Verdict::Pass => Classification::Nash,
        _ => Classification::QuasiNash,
    }
}

/// Distance below which two solutions are treated as the same.
pub const DEDUP_TOL: f64 = 1e-6;

/// Solves from the default start plus `starts - 1` seeded points of `K`.
/// Results are sorted by residual, then lexicographically by `x*`, and
/// deduplicated.
pub fn multistart(
    p: &VIProblem,
    cfg: &SolveConfig,
    starts: usize,
    seed: u64,
) -> Result<Vec<SolveResult>> {
    assert!(starts >= 1, "at least one start is required");
    let mut results = vec![solve(p, cfg)?];
    let extra = SampleSet::uniform(p.set(), starts - 1, seed, cfg.start_radius);
    for s in extra.points() {
        let c = SolveConfig {
            start: Some(s.clone()),
            ..cfg.clone()
        };
        results.push(solve(p, &c)?);
    }
    results.sort_by(compare_results);
    let mut kept: Vec<SolveResult> = Vec::new();
    for r in results {
        if kept.iter().all(|k| (&k.x - &r.x).norm() > DEDUP_TOL) {
            kept.push(r);
        }
    }
    Ok(kept)
}

fn compare_results(a: &SolveResult, b: &SolveResult) -> Ordering {
    a.residual.total_cmp(&b.residual).then_with(|| {
        a.x.iter()
            .zip(b.x.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{game_to_vi, BoxSet, Mapping};

    fn example_vi() -> VIProblem {
        VIProblem::new(
            Mapping::linear(Matrix::from_row_slice(2, 2, &[1., 2., 3., 1.])).unwrap(),
            BoxSet::full(2),
            "example-vi",
        )
        .unwrap()
    }

    #[test]
    fn example_vi_solves_to_origin() {
        let cfg = SolveConfig {
            start: Some(Vector::from_vec(vec![1.0, 1.0])),
            ..Default::default()
        };
        let res = solve(&example_vi(), &cfg).unwrap();
        assert_eq!(res.status, SolveStatus::Solved);
        assert!(res.x.norm() <= 1e-8);
    }

    #[test]
    fn identity_on_shifted_box_lands_on_corner() {
        let p = VIProblem::new(
            Mapping::identity(3),
            BoxSet::uniform(3, 1.0, 2.0).unwrap(),
            "t",
        )
        .unwrap();
        let res = solve(&p, &SolveConfig::default()).unwrap();
        assert!(res.solved());
        assert_eq!(res.x, Vector::from_element(3, 1.0));
    }

    #[test]
    fn constant_mapping_solves_in_two_steps() {
        let p = VIProblem::new(
            Mapping::constant(Vector::from_element(3, 1.0)),
            BoxSet::uniform(3, 0.0, 1.0).unwrap(),
            "t",
        )
        .unwrap();
        let res = solve(&p, &SolveConfig::default()).unwrap();
        assert!(res.solved());
        assert!(res.iterations() <= 2);
        assert_eq!(res.x, Vector::zeros(3));
    }

    #[test]
    fn spd_affine_converges_quadratically() {
        let a = Matrix::from_row_slice(3, 3, &[4., 1., 0., 1., 3., 1., 0., 1., 2.]);
        let p = VIProblem::new(
            Mapping::affine(a, Vector::from_vec(vec![1., -2., 3.])).unwrap(),
            BoxSet::full(3),
            "t",
        )
        .unwrap();
        let res = solve(&p, &SolveConfig::default()).unwrap();
        assert!(res.solved());
        for w in res.trace.windows(2) {
            if w[0] <= 1e-3 {
                assert!(w[1] <= 10.0 * w[0] * w[0]);
            }
        }
    }

    #[test]
    fn trace_is_strictly_decreasing() {
        let p = VIProblem::new(
            Mapping::builtin(crate::model::Builtin::CubicShift, 2),
            BoxSet::uniform(2, 0.0, 2.0).unwrap(),
            "t",
        )
        .unwrap();
        let cfg = SolveConfig {
            start: Some(Vector::from_vec(vec![5.0, -3.0])),
            ..Default::default()
        };
        let res = solve(&p, &cfg).unwrap();
        assert!(res.solved());
        assert!(res.trace.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(res.x, project(p.set(), &res.v));
    }

    #[test]
    fn example_game_is_nash() {
        let g = QuadraticGame::unconstrained(
            vec![1, 1],
            Matrix::from_row_slice(2, 2, &[1., 2., 3., 1.]),
            Vector::zeros(2),
        )
        .unwrap();
        let p = game_to_vi(&g);
        let res = solve(&p, &SolveConfig::default()).unwrap();
        assert_eq!(classify(&p, Some(&g), &res), Classification::Nash);
        assert_eq!(classify(&p, None, &res), Classification::ViSolution);
    }

    #[test]
    fn flat_own_cost_stays_quasi_nash() {
        let g = QuadraticGame::unconstrained(
            vec![1, 1],
            Matrix::from_row_slice(2, 2, &[0., 1., 1., 1.]),
            Vector::zeros(2),
        )
        .unwrap();
        let p = game_to_vi(&g);
        let res = solve(&p, &SolveConfig::default()).unwrap();
        assert!(res.solved());
        assert_eq!(classify(&p, Some(&g), &res), Classification::QuasiNash);
    }

    #[test]
    fn single_start_matches_solve() {
        let p = example_vi();
        let cfg = SolveConfig::default();
        let many = multistart(&p, &cfg, 1, 3).unwrap();
        assert_eq!(many, vec![solve(&p, &cfg).unwrap()]);
    }

    #[test]
    fn multistart_deduplicates() {
        let sols = multistart(&example_vi(), &SolveConfig::default(), 8, 42).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].x.norm() <= 1e-8);
    }
}
