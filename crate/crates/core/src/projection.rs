//! Euclidean projection onto boxes and elements of its generalized Jacobian.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::linalg::{Matrix, Vector};
use crate::model::BoxSet;

/// Componentwise clamp `median(lo_i, x_i, hi_i)`.
pub fn project(k: &BoxSet, x: &Vector) -> Vector {
    assert_eq!(k.dim(), x.len(), "projection dimension mismatch");
    Vector::from_fn(x.len(), |i, _| clamp(x[i], k.lower()[i], k.upper()[i]))
}

fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}

/// Which diagonal entry to use where the projection is not differentiable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryRule {
    /// `d_i = 1`; the identity belongs to the generalized Jacobian at boundary
    /// points of a box with nonempty interior.
    #[default]
    One,
    Zero,
}

impl BoundaryRule {
    fn value(self) -> f64 {
        match self {
            BoundaryRule::One => 1.0,
            BoundaryRule::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activity {
    Interior,
    AtLower,
    AtUpper,
    OutsideBelow,
    OutsideAbove,
    /// Both bounds infinite.
    Free,
}

/// A diagonal element of `∂Π_K[x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionJacobianElement {
    pub diagonal: Vec<f64>,
    pub activity: Vec<Activity>,
    pub rule: BoundaryRule,
}

impl ProjectionJacobianElement {
    pub fn matrix(&self) -> Matrix {
        Matrix::from_diagonal(&Vector::from_column_slice(&self.diagonal))
    }
}

pub fn projection_jacobian_element(
    k: &BoxSet,
    x: &Vector,
    rule: BoundaryRule,
) -> ProjectionJacobianElement {
    assert_eq!(k.dim(), x.len(), "projection dimension mismatch");
    let mut diagonal = Vec::with_capacity(x.len());
    let mut activity = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let (lo, hi, xi) = (k.lower()[i], k.upper()[i], x[i]);
        let tag = if k.is_free(i) {
            Activity::Free
        } else if xi < lo {
            Activity::OutsideBelow
        } else if xi > hi {
            Activity::OutsideAbove
        } else if xi == lo {
            Activity::AtLower
        } else if xi == hi {
            Activity::AtUpper
        } else {
            Activity::Interior
        };
        let d = match tag {
            Activity::Free | Activity::Interior => 1.0,
            Activity::OutsideBelow | Activity::OutsideAbove => 0.0,
            Activity::AtLower | Activity::AtUpper => rule.value(),
        };
        diagonal.push(d);
        activity.push(tag);
    }
    ProjectionJacobianElement {
        diagonal,
        activity,
        rule,
    }
}

/// Vertex of the set `G = {I} ∪ {I - e_i e_iᵀ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvGVertex {
    Identity,
    DropCoordinate(usize),
}

impl ConvGVertex {
    pub fn matrix(self, m: usize) -> Matrix {
        let mut d = Matrix::identity(m, m);
        if let ConvGVertex::DropCoordinate(i) = self {
            d[(i, i)] = 0.0;
        }
        d
    }

    pub fn all(m: usize) -> impl Iterator<Item = ConvGVertex> {
        std::iter::once(ConvGVertex::Identity).chain((0..m).map(ConvGVertex::DropCoordinate))
    }
}

/// A point of `Conv(G)`, written `I - β Σ α_i e_i e_iᵀ` with `α` on the unit
/// simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHullPoint {
    pub beta: f64,
    pub alpha: Vec<f64>,
    /// Diagonal entries `1 - β α_i`.
    pub diagonal: Vec<f64>,
}

impl ConvexHullPoint {
    pub fn new(beta: f64, alpha: Vec<f64>) -> Self {
        let diagonal = alpha.iter().map(|a| 1.0 - beta * a).collect();
        Self {
            beta,
            alpha,
            diagonal,
        }
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_diagonal(&Vector::from_column_slice(&self.diagonal))
    }

    /// `β Σ α_i e_i e_iᵀ` as a diagonal.
    pub fn complement(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| self.beta * a).collect()
    }
}

/// Default `β` grid.
pub const BETA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Deterministic sample of `Conv(G)`.
///
/// For every `β` in the grid the `α` family holds the `m` simplex vertices,
/// the barycenter, and Dirichlet(1, …, 1) draws up to `alpha_samples` in
/// total. `β = 0` collapses every `α` to the identity, so a single entry is
/// emitted for it.
pub fn convg_hull_sample(
    m: usize,
    beta_grid: &[f64],
    alpha_samples: usize,
    seed: u64,
) -> Vec<ConvexHullPoint> {
    assert!(m > 0, "dimension must be positive");
    assert!(
        beta_grid.iter().all(|b| (0.0..=1.0).contains(b)),
        "beta grid must lie in [0, 1]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let barycenter = vec![1.0 / m as f64; m];
    let draws = alpha_samples.saturating_sub(m + 1);
    let mut alphas: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            e
        })
        .collect();
    alphas.push(barycenter.clone());
    for _ in 0..draws {
        let raw: Vec<f64> = (0..m).map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = raw.iter().sum();
        alphas.push(raw.into_iter().map(|v| v / total).collect());
    }

    let mut out = Vec::new();
    for &beta in beta_grid {
        if beta == 0.0 {
            out.push(ConvexHullPoint::new(0.0, barycenter.clone()));
        } else {
            out.extend(alphas.iter().map(|a| ConvexHullPoint::new(beta, a.clone())));
        }
    }
    out
}
