use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::{CertificateReport, Condition, Verdict};
use super::sampling::draw_point;
use crate::error::{Error, Result};
use crate::model::VIProblem;

/// Fitted `(L0, Lp)` for `||F(x) - F(y)|| <= L0 + Lp ||x - y||^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub l0: f64,
    pub lp: f64,
    /// Fraction of pairs with `||x - y|| >= 1`.
    pub far_fraction: f64,
    pub pairs: usize,
}

/// Least-max fit of the growth bound over sampled pairs of `K`.
///
/// `Lp` is the largest ratio `||F(x)-F(y)|| / max(d^p, d)` with `d = ||x-y||`;
/// for `d >= 1` this is the usual `d^p` ratio. `L0` then absorbs whatever the
/// pairs with `d < 1` still exceed. Every sampled pair is covered by the fit.
pub fn fit_growth(
    p: &VIProblem,
    pairs: usize,
    exponent: f64,
    seed: u64,
    radius: f64,
) -> Result<GrowthFit> {
    if !(exponent >= 1.0) {
        return Err(Error::Precondition(format!(
            "growth exponent must be at least 1, got {exponent}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let x = draw_point(p.set(), radius, &mut rng);
        let y = draw_point(p.set(), radius, &mut rng);
        let d = (&x - &y).norm();
        if d < 1e-12 {
            continue;
        }
        let gap = (p.evaluate(&x)? - p.evaluate(&y)?).norm();
        data.push((d, gap));
    }
    let lp = data
        .iter()
        .map(|&(d, gap)| gap / d.powf(exponent).max(d))
        .fold(0.0_f64, f64::max)
        .max(f64::EPSILON);
    let l0 = data
        .iter()
        .filter(|(d, _)| *d < 1.0)
        .map(|&(d, gap)| (gap - lp * d.powf(exponent)).max(0.0))
        .fold(0.0_f64, f64::max);
    let far = data.iter().filter(|(d, _)| *d >= 1.0).count();
    Ok(GrowthFit {
        l0,
        lp,
        far_fraction: if data.is_empty() {
            0.0
        } else {
            far as f64 / data.len() as f64
        },
        pairs: data.len(),
    })
}

/// Records the fitted growth constants; always passes, margin is `Lp`.
pub fn growth_l0lp_fit(
    p: &VIProblem,
    pairs: usize,
    exponent: f64,
    seed: u64,
    radius: f64,
) -> Result<CertificateReport> {
    let fit = fit_growth(p, pairs, exponent, seed, radius)?;
    Ok(
        CertificateReport::new(Condition::Growth, Verdict::Pass, fit.lp)
            .with_sampling(seed, pairs)
            .evidence("p", exponent)
            .evidence("l0", fit.l0)
            .evidence("lp", fit.lp)
            .evidence("coverage_far_fraction", fit.far_fraction)
            .note("fit covers every sampled pair; constants are empirical")
            .note(format!(
                "unbounded coordinates sampled within radius {radius}"
            )),
    )
}
