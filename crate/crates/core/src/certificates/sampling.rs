use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::model::BoxSet;
use crate::projection::project;

/// Default half-width used for coordinates without a finite bound.
pub const DEFAULT_RADIUS: f64 = 10.0;

/// A finite, seeded set of points of `K` standing in for "all `x ∈ K`".
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: Vec<Vector>,
    seed: u64,
    radius: f64,
}

impl SampleSet {
    /// Uniform draws over the box, unbounded sides truncated at `radius`.
    pub fn uniform(k: &BoxSet, count: usize, seed: u64, radius: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| draw_point(k, radius, &mut rng))
            .collect();
        Self {
            points,
            seed,
            radius,
        }
    }

    /// Cycles through interior draws, draws with a random subset of coordinates
    /// pinned to a finite bound, and draws with every finite-bounded
    /// coordinate pinned (vertices and edges of the box). Falls back to
    /// uniform draws when the box has no finite bound.
    pub fn boundary_mix(k: &BoxSet, count: usize, seed: u64, radius: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bounded: Vec<usize> = (0..k.dim()).filter(|&i| !k.is_free(i)).collect();
        let points = (0..count)
            .map(|n| {
                let mut x = draw_point(k, radius, &mut rng);
                if bounded.is_empty() {
                    return x;
                }
                match n % 3 {
                    0 => {}
                    1 => {
                        let pick = bounded[rng.random_range(0..bounded.len())];
                        pin(k, &mut x, pick, &mut rng);
                        for &i in &bounded {
                            if i != pick && rng.random_bool(0.3) {
                                pin(k, &mut x, i, &mut rng);
                            }
                        }
                    }
                    _ => {
                        for &i in &bounded {
                            pin(k, &mut x, i, &mut rng);
                        }
                    }
                }
                x
            })
            .collect();
        Self {
            points,
            seed,
            radius,
        }
    }

    /// Wraps explicit points, which must all lie in `K`.
    pub fn from_points(k: &BoxSet, points: Vec<Vector>) -> Result<Self> {
        for (n, p) in points.iter().enumerate() {
            if !k.contains(p) {
                return Err(Error::Config(format!("sample point {n} lies outside K")));
            }
        }
        Ok(Self {
            points,
            seed: 0,
            radius: DEFAULT_RADIUS,
        })
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub(crate) fn radius_note(&self) -> String {
        format!(
            "unbounded coordinates sampled within radius {}",
            self.radius
        )
    }
}

pub(crate) fn draw_point(k: &BoxSet, radius: f64, rng: &mut impl Rng) -> Vector {
    let raw = Vector::from_fn(k.dim(), |i, _| {
        let (a, b) = k.sampling_interval(i, radius);
        a + (b - a) * rng.random::<f64>()
    });
    project(k, &raw)
}

fn pin(k: &BoxSet, x: &mut Vector, i: usize, rng: &mut impl Rng) {
    let (lo, hi) = (k.lower()[i], k.upper()[i]);
    x[i] = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            if rng.random_bool(0.5) {
                lo
            } else {
                hi
            }
        }
        (true, false) => lo,
        (false, true) => hi,
        (false, false) => x[i],
    };
}

/// Derives an independent stream seed from a base seed and a label.
pub(crate) fn sub_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
