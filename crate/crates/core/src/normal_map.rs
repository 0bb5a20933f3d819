//! The normal map `F_K^nor(v) = v - Π_K[v] + F(Π_K[v])`, elements of its
//! generalized Jacobian, and a ray probe for norm coercivity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::linalg::{Matrix, Vector};
use crate::model::{check_len, jacobian, VIProblem};
use crate::projection::{project, projection_jacobian_element, BoundaryRule};

#[derive(Debug, Clone, PartialEq)]
pub struct NormalMapEval {
    pub v: Vector,
    /// `Π_K[v]`
    pub z: Vector,
    /// `v - z + F(z)`
    pub r: Vector,
    pub norm: f64,
}

pub fn normal_map(p: &VIProblem, v: &Vector) -> Result<NormalMapEval> {
    check_len("normal map point", p.dim(), v.len())?;
    let z = project(p.set(), v);
    let fz = p.evaluate(&z)?;
    // coordinates with v_i == z_i contribute exactly F_i(z)
    let r = Vector::from_fn(v.len(), |i, _| {
        if v[i] == z[i] {
            fz[i]
        } else {
            (v[i] - z[i]) + fz[i]
        }
    });
    let norm = r.norm();
    Ok(NormalMapEval {
        v: v.clone(),
        z,
        r,
        norm,
    })
}

/// `I - D + ∇F(Π_K[v]) D` with `D` the projection Jacobian element at `v`.
pub fn normal_map_jacobian_element(
    p: &VIProblem,
    v: &Vector,
    rule: BoundaryRule,
) -> Result<Matrix> {
    check_len("normal map point", p.dim(), v.len())?;
    let z = project(p.set(), v);
    let jf = jacobian(p, &z)?;
    let d = projection_jacobian_element(p.set(), v, rule);
    Ok(assemble_normal_jacobian(&jf, &d.diagonal))
}

/// Column `j` is column `j` of `jf` when `d_j = 1`, `e_j` when `d_j = 0`, and
/// the affine blend otherwise.
pub(crate) fn assemble_normal_jacobian(jf: &Matrix, d: &[f64]) -> Matrix {
    let m = d.len();
    let mut j = Matrix::zeros(m, m);
    for c in 0..m {
        if d[c] == 1.0 {
            j.set_column(c, &jf.column(c));
        } else if d[c] == 0.0 {
            j[(c, c)] = 1.0;
        } else {
            let col = jf.column(c) * d[c];
            j.set_column(c, &col);
            j[(c, c)] += 1.0 - d[c];
        }
    }
    j
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeVerdict {
    CoerciveEvidence,
    ViolationWitness,
    Inconclusive,
}

impl ProbeVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbeVerdict::CoerciveEvidence => "coercive-evidence",
            ProbeVerdict::ViolationWitness => "violation-witness",
            ProbeVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    /// Number of rays; raised to `2m` if smaller. The first `2m` are `±e_i`.
    pub rays: usize,
    pub r0: f64,
    pub growth: f64,
    pub steps: usize,
    /// Radii discarded before fitting the log-log slope.
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            rays: 0,
            r0: 1.0,
            growth: 2.0,
            steps: 12,
            burn_in: 4,
            seed: 42,
        }
    }
}

/// Residual norms along one ray.
#[derive(Debug, Clone, PartialEq)]
pub struct RayTable {
    pub direction: Vector,
    pub radii: Vec<f64>,
    pub norms: Vec<f64>,
    /// Least-squares slope of `log ‖F_K^nor‖` against `log r` past burn-in;
    /// `None` when some norm in the window is zero or non-finite.
    pub slope: Option<f64>,
    pub verdict: ProbeVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityProbe {
    pub rays: Vec<RayTable>,
    pub verdict: ProbeVerdict,
    pub config: ProbeConfig,
}

impl CoercivityProbe {
    pub fn min_slope(&self) -> Option<f64> {
        self.rays
            .iter()
            .map(|r| r.slope)
            .try_fold(f64::INFINITY, |acc, s| s.map(|s| acc.min(s)))
    }

    /// The first ray flagged as a violation.
    pub fn witness(&self) -> Option<&RayTable> {
        self.rays
            .iter()
            .find(|r| r.verdict == ProbeVerdict::ViolationWitness)
    }
}

/// Slope threshold for coercive evidence.
pub const MIN_SLOPE: f64 = 0.5;
/// Growth the final residual norm must show over the first one.
pub const MIN_GROWTH_FACTOR: f64 = 2.0;

/// Evaluates `‖F_K^nor‖` at radii `r0 · growth^k` along `±e_i` and seeded
/// random unit directions. The result is evidence only: finitely many rays and
/// radii cannot establish coercivity over all of `R^m`.
pub fn coercivity_probe(p: &VIProblem, cfg: &ProbeConfig) -> CoercivityProbe {
    let m = p.dim();
    assert!(cfg.growth > 1.0, "growth must exceed 1");
    assert!(cfg.steps >= 8, "at least 8 radii are required");
    assert!(cfg.burn_in + 2 <= cfg.steps, "burn-in leaves too few radii");
    let rays = cfg.rays.max(2 * m);
    let radii: Vec<f64> = (0..cfg.steps)
        .map(|k| cfg.r0 * cfg.growth.powi(k as i32))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut directions = Vec::with_capacity(rays);
    for i in 0..m {
        for sign in [1.0, -1.0] {
            let mut e = Vector::zeros(m);
            e[i] = sign;
            directions.push(e);
        }
    }
    while directions.len() < rays {
        let g = Vector::from_fn(m, |_, _| StandardNormal.sample(&mut rng));
        let n = g.norm();
        if n > 1e-12 {
            directions.push(g / n);
        }
    }

    let tables: Vec<RayTable> = directions
        .into_iter()
        .map(|u| probe_ray(p, u, &radii, cfg.burn_in))
        .collect();

    let verdict = if tables
        .iter()
        .any(|t| t.verdict == ProbeVerdict::ViolationWitness)
    {
        ProbeVerdict::ViolationWitness
    } else if tables
        .iter()
        .all(|t| t.verdict == ProbeVerdict::CoerciveEvidence)
    {
        ProbeVerdict::CoerciveEvidence
    } else {
        ProbeVerdict::Inconclusive
    };
    CoercivityProbe {
        rays: tables,
        verdict,
        config: cfg.clone(),
    }
}

fn probe_ray(p: &VIProblem, direction: Vector, radii: &[f64], burn_in: usize) -> RayTable {
    let norms: Vec<f64> = radii
        .iter()
        .map(|&r| match normal_map(p, &(&direction * r)) {
            Ok(e) => e.norm,
            Err(_) => f64::NAN,
        })
        .collect();

    let finite = norms.iter().all(|n| n.is_finite());
    let slope = if finite {
        log_log_slope(&radii[burn_in..], &norms[burn_in..])
    } else {
        None
    };
    let verdict = if !finite {
        ProbeVerdict::Inconclusive
    } else if !(norms[norms.len() - 1] >= MIN_GROWTH_FACTOR * norms[0]) {
        ProbeVerdict::ViolationWitness
    } else if slope.is_some_and(|s| s >= MIN_SLOPE) {
        ProbeVerdict::CoerciveEvidence
    } else {
        ProbeVerdict::Inconclusive
    };
    RayTable {
        direction,
        radii: radii.to_vec(),
        norms,
        slope,
        verdict,
    }
}

fn log_log_slope(radii: &[f64], norms: &[f64]) -> Option<f64> {
    if norms.iter().any(|&n| !(n > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}
