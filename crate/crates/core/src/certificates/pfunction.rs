//! Pair searches for the uniform (block) P-function property
//!
//! ```text
//! max_j <[F(x) - F(y)]_j, [x - y]_j>  >=  mu ||x - y||²
//! ```
//!
//! Coordinates form singleton blocks in the plain variant.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pmatrix::direction_grid;
use super::report::{CertificateReport, Condition, Verdict, Witness, SAMPLED_NOTE};
use super::sampling::draw_point;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::model::{block_ranges, VIProblem};
use crate::projection::project;

pub const MIN_PAIRS: usize = 100;
/// Pairs closer than this are redrawn.
pub const COINCIDENT: f64 = 1e-12;
const MAX_REDRAWS: usize = 20;

/// `max_j <[F(x)-F(y)]_j, [x-y]_j> / ||x-y||²` over the given blocks.
pub fn block_pfunction_ratio(
    p: &VIProblem,
    blocks: &[Range<usize>],
    x: &Vector,
    y: &Vector,
) -> Result<f64> {
    let df = p.evaluate(x)? - p.evaluate(y)?;
    let dx = x - y;
    let denom: f64 = dx.iter().map(|v| v * v).sum();
    let best = blocks
        .iter()
        .map(|r| r.clone().map(|i| df[i] * dx[i]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best / denom)
}

/// Coordinatewise search: [`block_pfunction_search`] with singleton blocks.
pub fn uniform_pfunction_search(
    p: &VIProblem,
    pairs: usize,
    seed: u64,
    radius: f64,
) -> Result<CertificateReport> {
    let blocks = vec![1; p.dim()];
    let mut r = search(p, &blocks, pairs, seed, radius)?;
    r.condition = Condition::Pfunction;
    Ok(r)
}

pub fn block_pfunction_search(
    p: &VIProblem,
    blocks: &[usize],
    pairs: usize,
    seed: u64,
    radius: f64,
) -> Result<CertificateReport> {
    let total: usize = blocks.iter().sum();
    if total != p.dim() || blocks.contains(&0) {
        return Err(Error::Config(format!(
            "block partition {blocks:?} is inconsistent with dimension {}",
            p.dim()
        )));
    }
    search(p, blocks, pairs, seed, radius)
}

/// Pairs are `x` drawn from `K` and `y = Π_K[x - s d]`. The first directions
/// `d` come from the signed grid of [`direction_grid`], the rest are random.
/// The witness is the first violating pair in generation order; the margin
/// is the smallest ratio over all pairs.
fn search(
    p: &VIProblem,
    blocks: &[usize],
    pairs: usize,
    seed: u64,
    radius: f64,
) -> Result<CertificateReport> {
    if pairs < MIN_PAIRS {
        return Err(Error::Precondition(format!(
            "at least {MIN_PAIRS} pairs are required, got {pairs}"
        )));
    }
    let m = p.dim();
    let ranges = block_ranges(blocks);
    let grid = direction_grid(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut margin = f64::INFINITY;
    let mut witness: Option<Witness> = None;
    let mut evaluated = 0usize;
    let mut redraws = 0usize;
    for n in 0..pairs {
        let Some((x, y)) = draw_pair(p, &grid, n, radius, &mut rng, &mut redraws) else {
            continue;
        };
        let rho = block_pfunction_ratio(p, &ranges, &x, &y)?;
        evaluated += 1;
        margin = margin.min(rho);
        if !(rho > 0.0) && witness.is_none() {
            witness = Some(Witness::Pair { x, y, value: rho });
        }
    }

    let report = match witness {
        Some(w) => {
            CertificateReport::new(Condition::BlockPfunction, Verdict::Fail, margin).with_witness(w)
        }
        None => CertificateReport::new(Condition::BlockPfunction, Verdict::Inconclusive, margin)
            .note("no violating pair found; margin is the empirical modulus mu")
            .note(SAMPLED_NOTE),
    };
    Ok(report
        .with_sampling(seed, pairs)
        .evidence("pairs_evaluated", evaluated as f64)
        .evidence("redraws", redraws as f64)
        .note(format!(
            "unbounded coordinates sampled within radius {radius}"
        )))
}

fn draw_pair(
    p: &VIProblem,
    grid: &[Vector],
    n: usize,
    radius: f64,
    rng: &mut ChaCha8Rng,
    redraws: &mut usize,
) -> Option<(Vector, Vector)> {
    let k = p.set();
    for _ in 0..MAX_REDRAWS {
        let x = draw_point(k, radius, rng);
        let d = match grid.get(n) {
            Some(d) => d.clone(),
            None => {
                let g = super::pmatrix::random_direction(p.dim(), rng);
                g.normalize()
            }
        };
        let step = radius * (0.05 + 0.95 * rng.random::<f64>());
        let y = project(k, &(&x - d * step));
        if (&x - &y).norm() >= COINCIDENT {
            return Some((x, y));
        }
        *redraws += 1;
    }
    None
}
