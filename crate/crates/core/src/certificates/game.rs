//! Certificates specific to quadratic games: the Υ matrix, block convexity,
//! and the PŁ-type check that upgrades a quasi-Nash point to a Nash
//! equilibrium.

use nalgebra::Cholesky;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::pmatrix::pmatrix_minors;
use super::report::{CertificateReport, Condition, Verdict, Witness};
use super::sampling::{sub_seed, SampleSet};
use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, lambda_min_sym, spectral_norm, Matrix, Vector};
use crate::model::{game_to_vi, jacobian, QuadraticGame};

/// Common block size `n` of a game whose players all have `n` actions.
fn uniform_block_size(g: &QuadraticGame) -> Result<usize> {
    let n = g.block_sizes()[0];
    if g.block_sizes().iter().any(|&b| b != n) {
        return Err(Error::Config(format!(
            "the Upsilon matrix needs equal player dimensions, got blocks {:?}",
            g.block_sizes()
        )));
    }
    Ok(n)
}

/// `Υ` with `κ_ii = min λ_min(sym A_ii(x))` and `-κ_ij = -max ||A_ij(x)||_2`
/// over the samples, `A = ∇F` the game Jacobian. Quadratic games have a
/// constant Jacobian, so the result does not depend on the samples.
pub fn upsilon_build(g: &QuadraticGame, samples: &SampleSet) -> Result<Matrix> {
    let n = uniform_block_size(g)?;
    if samples.is_empty() {
        return Err(Error::Precondition("sample set is empty".into()));
    }
    let players = g.players();
    let p = game_to_vi(g);
    let mut ups = Matrix::zeros(players, players);
    for i in 0..players {
        for j in 0..players {
            ups[(i, j)] = if i == j { f64::INFINITY } else { 0.0 };
        }
    }
    for x in samples.points() {
        let a = jacobian(&p, x)?;
        for i in 0..players {
            for j in 0..players {
                let block = a.view((i * n, j * n), (n, n)).into_owned();
                if i == j {
                    ups[(i, i)] = ups[(i, i)].min(lambda_min_sym(&block));
                } else {
                    ups[(i, j)] = ups[(i, j)].max(spectral_norm(&block));
                }
            }
        }
    }
    for i in 0..players {
        for j in (0..players).filter(|&j| j != i) {
            ups[(i, j)] = -ups[(i, j)];
        }
    }
    Ok(ups)
}

fn format_matrix(a: &Matrix) -> String {
    let rows: Vec<String> = (0..a.nrows())
        .map(|r| {
            let cells: Vec<String> = (0..a.ncols()).map(|c| format!("{}", a[(r, c)])).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// P_Υ condition: every own block symmetric positive definite and `Υ` a
/// P-matrix. The failing clause is recorded in the notes.
pub fn p_upsilon_check(g: &QuadraticGame, samples: &SampleSet) -> Result<CertificateReport> {
    let ups = upsilon_build(g, samples)?;
    let mut evidence = Vec::new();
    for i in 0..ups.nrows() {
        for j in 0..ups.ncols() {
            evidence.push((format!("upsilon[{i}][{j}]"), ups[(i, j)]));
        }
    }

    let mut own_failure = None;
    for i in 0..g.players() {
        let q = g.q_block(i, i);
        let lam = lambda_min_sym(&q);
        if !is_symmetric(&q) || !(lam > 0.0) {
            own_failure = Some((i, lam));
            break;
        }
    }
    let minors = pmatrix_minors(&ups)?;

    let mut report = if let Some((player, lam)) = own_failure {
        CertificateReport::new(Condition::Upsilon, Verdict::Fail, lam)
            .with_witness(Witness::Player { player, value: lam })
            .note(format!(
                "clause (i) fails: own block of player {player} is not positive definite (lambda_min = {lam})"
            ))
    } else if minors.verdict == Verdict::Fail {
        CertificateReport::new(Condition::Upsilon, Verdict::Fail, minors.margin)
            .with_witness(
                minors
                    .witness
                    .clone()
                    .expect("failing minors carry a witness"),
            )
            .note("clause (ii) fails: Upsilon is not a P-matrix")
    } else {
        CertificateReport::new(Condition::Upsilon, Verdict::Pass, minors.margin)
            .note("P_Upsilon holds, so the game has a unique Nash equilibrium")
    };
    report.evidence = evidence;
    Ok(report
        .with_sampling(samples.seed(), samples.len())
        .note(format!("upsilon = {}", format_matrix(&ups)))
        .note("margin is the smallest principal minor of Upsilon"))
}

/// Smallest eigenvalue of the symmetrized own-cost blocks; positive means
/// every cost is strongly convex in the player's own variable.
pub fn hessian_block_convexity(g: &QuadraticGame) -> CertificateReport {
    let mut margin = f64::INFINITY;
    let mut worst = 0;
    let mut evidence = Vec::new();
    for i in 0..g.players() {
        let lam = lambda_min_sym(&g.q_block(i, i));
        evidence.push((format!("lambda_min[{i}]"), lam));
        if lam < margin {
            margin = lam;
            worst = i;
        }
    }
    let mut report = if margin > 0.0 {
        CertificateReport::new(Condition::BlockConvexity, Verdict::Pass, margin)
            .note("each cost is strongly convex in the player's own variable")
    } else {
        CertificateReport::new(Condition::BlockConvexity, Verdict::Fail, margin).with_witness(
            Witness::Player {
                player: worst,
                value: margin,
            },
        )
    };
    report.evidence = evidence;
    report
}

/// Tolerance on `||F(x̄)||` for a quasi-Nash candidate.
pub const QUASI_NASH_TOL: f64 = 1e-6;
const MIN_GAP: f64 = 1e-12;
const DIVERGED: f64 = 1e12;

/// Per-player outcome of the PŁ check.
#[derive(Debug, Clone, PartialEq)]
pub enum PlayerPl {
    /// Empirical `μ_i` and whether the inner minimum was in closed form.
    Modulus { mu: f64, closed_form: bool },
    /// Inner minimum does not exist (cost unbounded below).
    Unbounded,
    /// No sampled point had a positive suboptimality gap.
    NoGap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlConfig {
    pub samples: usize,
    pub seed: u64,
    /// Standard deviation of the Gaussian draws around `x̄_i`.
    pub radius: f64,
}

impl Default for PlConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 42,
            radius: super::sampling::DEFAULT_RADIUS,
        }
    }
}

/// Computes the empirical PŁ modulus of every player at `xbar`.
pub fn pl_moduli(g: &QuadraticGame, xbar: &Vector, cfg: &PlConfig) -> Result<Vec<PlayerPl>> {
    let p = game_to_vi(g);
    let residual = p.evaluate(xbar)?.norm();
    if !(residual <= QUASI_NASH_TOL) {
        return Err(Error::Precondition(format!(
            "x̄ is not a quasi-Nash point: ||F(x̄)|| = {residual:e} > {QUASI_NASH_TOL:e}"
        )));
    }
    (0..g.players())
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, i as u64));
            player_modulus(g, i, xbar, cfg, &mut rng)
        })
        .collect()
}

fn player_modulus(
    g: &QuadraticGame,
    i: usize,
    xbar: &Vector,
    cfg: &PlConfig,
    rng: &mut ChaCha8Rng,
) -> Result<PlayerPl> {
    let q = g.q_block(i, i);
    let lin = g.coupling(i, xbar);
    let center = g.block_of(xbar, i);
    let n = q.nrows();
    let draw = |rng: &mut ChaCha8Rng| {
        Vector::from_fn(n, |k, _| {
            center[k]
                + cfg.radius * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
        })
    };
    let grad = |x: &Vector| &q * x + &lin;

    if let Some(chol) = Cholesky::new(q.clone()) {
        // minimizer u* = -Q⁻¹ g; gap(x) = ½ (x - u*)ᵀ Q (x - u*)
        let minimizer = -chol.solve(&lin);
        let mut mu = f64::INFINITY;
        for _ in 0..cfg.samples {
            let x = draw(rng);
            let u = &x - &minimizer;
            let gap = 0.5 * u.dot(&(&q * &u));
            if gap > MIN_GAP {
                let qu = &q * &u;
                mu = mu.min(qu.dot(&qu) / gap);
            }
        }
        return Ok(if mu.is_finite() {
            PlayerPl::Modulus {
                mu,
                closed_form: true,
            }
        } else {
            PlayerPl::NoGap
        });
    }

    let f = |x: &Vector| 0.5 * x.dot(&(&q * x)) + x.dot(&lin);
    let starts = (10 * n * n).max(1);
    let mut best = f64::INFINITY;
    for _ in 0..starts {
        match coordinate_descent(&q, &lin, draw(rng)) {
            Some(x) => best = best.min(f(&x)),
            None => return Ok(PlayerPl::Unbounded),
        }
    }
    let mut mu = f64::INFINITY;
    for _ in 0..cfg.samples {
        let x = draw(rng);
        let gap = f(&x) - best;
        if gap > MIN_GAP {
            mu = mu.min(grad(&x).norm_squared() / gap);
        }
    }
    Ok(if mu.is_finite() {
        PlayerPl::Modulus {
            mu,
            closed_form: false,
        }
    } else {
        PlayerPl::NoGap
    })
}

/// Exact coordinate minimization of `½ xᵀQx + gᵀx` until the gradient is
/// below `1e-10`; `None` when the iterates diverge or a coordinate has no
/// minimizer.
fn coordinate_descent(q: &Matrix, lin: &Vector, mut x: Vector) -> Option<Vector> {
    let n = x.len();
    for _ in 0..10_000 {
        let mut max_grad: f64 = 0.0;
        for k in 0..n {
            let gk = q.row(k).transpose().dot(&x) + lin[k];
            max_grad = max_grad.max(gk.abs());
            let qkk = q[(k, k)];
            if qkk > 0.0 {
                x[k] -= gk / qkk;
            } else if qkk < 0.0 || gk.abs() > 1e-10 {
                return None;
            }
        }
        if !x.iter().all(|v| v.is_finite()) || x.norm() > DIVERGED {
            return None;
        }
        if max_grad <= 1e-10 {
            return Some(x);
        }
    }
    None
}

/// PŁ-type check at a quasi-Nash candidate of an unconstrained game. Passes
/// iff every player's empirical modulus is positive.
pub fn pl_condition_check(
    g: &QuadraticGame,
    xbar: &Vector,
    cfg: &PlConfig,
) -> Result<CertificateReport> {
    let moduli = pl_moduli(g, xbar, cfg)?;
    let mut evidence = Vec::new();
    let mut notes = Vec::new();
    let mut margin = f64::INFINITY;
    let mut inconclusive = false;
    let mut failed: Option<(usize, f64)> = None;
    for (i, m) in moduli.iter().enumerate() {
        match m {
            PlayerPl::Modulus { mu, closed_form } => {
                evidence.push((format!("mu[{i}]"), *mu));
                if !closed_form {
                    notes.push(format!("player {i}: inner minimum estimated by sampling"));
                }
                margin = margin.min(*mu);
                if !(*mu > 0.0) && failed.is_none() {
                    failed = Some((i, *mu));
                }
            }
            PlayerPl::Unbounded => {
                inconclusive = true;
                notes.push(format!(
                    "player {i}: cost is unbounded below in its own variable, inner minimum diverges"
                ));
            }
            PlayerPl::NoGap => {
                inconclusive = true;
                notes.push(format!(
                    "player {i}: no sampled point has a positive suboptimality gap"
                ));
            }
        }
    }
    if !margin.is_finite() {
        margin = f64::NAN;
    }
    let mut report = if let Some((player, mu)) = failed {
        CertificateReport::new(Condition::Pl, Verdict::Fail, margin)
            .with_witness(Witness::Player { player, value: mu })
    } else if inconclusive {
        CertificateReport::new(Condition::Pl, Verdict::Inconclusive, margin)
    } else {
        CertificateReport::new(Condition::Pl, Verdict::Pass, margin)
            .note("the quasi-Nash point is a Nash equilibrium")
    };
    if !g.actions().is_full_space() {
        report.verdict = Verdict::Inconclusive;
        report = report.note("the PL upgrade applies to unconstrained action sets only");
    }
    report.evidence = evidence;
    report.notes.extend(notes);
    Ok(report
        .with_sampling(cfg.seed, cfg.samples)
        .note(crate::certificates::report::SAMPLED_NOTE))
}
