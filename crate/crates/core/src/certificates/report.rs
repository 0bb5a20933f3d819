//! Certificate reports and their structured-text record form.
//!
//! A serialized report has the fields
//!
//! ```text
//! condition = "pfunction"
//! verdict = "fail"
//! margin = -0.5
//! seed = 42
//! budget = 1000
//! notes = ["..."]
//! [witness]
//! kind = "pair"
//! values = [...]
//! indices = [...]
//! [[evidence]]
//! name = "..."
//! value = ...
//! ```
//!
//! `seed`, `budget`, and `witness` are omitted when absent. `witness.values`
//! holds the witness vectors concatenated in the order documented on
//! [`Witness`]; `witness.indices` holds 0-based index sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::linalg::Vector;

/// Every condition the checkers know about, with its command-line id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Pmatrix,
    PmatrixOracle,
    UniformPmatrix,
    SigmaSweep,
    Pfunction,
    BlockPfunction,
    Growth,
    Upsilon,
    MaximalRank,
    Coercivity,
    Pl,
    BlockConvexity,
}

impl Condition {
    pub const ALL: [Condition; 12] = [
        Condition::Pmatrix,
        Condition::PmatrixOracle,
        Condition::UniformPmatrix,
        Condition::SigmaSweep,
        Condition::Pfunction,
        Condition::BlockPfunction,
        Condition::Growth,
        Condition::Upsilon,
        Condition::MaximalRank,
        Condition::Coercivity,
        Condition::Pl,
        Condition::BlockConvexity,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Condition::Pmatrix => "pmatrix",
            Condition::PmatrixOracle => "pmatrix-oracle",
            Condition::UniformPmatrix => "uniform-pmatrix",
            Condition::SigmaSweep => "sigma-sweep",
            Condition::Pfunction => "pfunction",
            Condition::BlockPfunction => "block-pfunction",
            Condition::Growth => "growth",
            Condition::Upsilon => "upsilon",
            Condition::MaximalRank => "maximal-rank",
            Condition::Coercivity => "coercivity",
            Condition::Pl => "pl",
            Condition::BlockConvexity => "block-convexity",
        }
    }

    /// Whether the condition only makes sense for games.
    pub fn game_only(self) -> bool {
        matches!(
            self,
            Condition::Upsilon | Condition::Pl | Condition::BlockConvexity
        )
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| format!("unknown condition `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            "inconclusive" => Ok(Verdict::Inconclusive),
            other => Err(format!("unknown verdict `{other}`")),
        }
    }
}

/// The object a failing (or limiting) check was realized at.
///
/// Record layout of `values`, in order:
/// - `IndexSet`: `[value]`
/// - `Direction`: `w, [value]`
/// - `Pair`: `x, y, [value]`
/// - `MixedRows`: `x^1, …, x^m, [value]`
/// - `PointSubset`: `x, [value]`
/// - `FamilyMember`: `x, alpha, [beta, t, value]`
/// - `Ray`: `direction, [r_first, r_last, norm_first, norm_last]`
/// - `Player`: `[value]`, with `indices = [player]`
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// A principal index set and its minor.
    IndexSet {
        indices: Vec<usize>,
        value: f64,
    },
    /// A direction `w` and `max_i w_i (A w)_i`.
    Direction {
        w: Vector,
        value: f64,
    },
    /// A pair of points and the P-function ratio.
    Pair {
        x: Vector,
        y: Vector,
        value: f64,
    },
    /// Points whose Jacobian rows form a mixed-row matrix, plus the index set
    /// of its offending principal minor.
    MixedRows {
        points: Vec<Vector>,
        indices: Vec<usize>,
        value: f64,
    },
    /// A point and a principal index set of `∇F` there.
    PointSubset {
        x: Vector,
        indices: Vec<usize>,
        value: f64,
    },
    /// A member `β Σ α_i e_i e_iᵀ + t ∇F(Π_K[x]) (I - β Σ α_i e_i e_iᵀ)` of the
    /// t-scaled normal-map Jacobian family.
    FamilyMember {
        x: Vector,
        beta: f64,
        alpha: Vec<f64>,
        t: f64,
        value: f64,
    },
    /// A ray along which the normal-map residual failed to grow.
    Ray {
        direction: Vector,
        radii: (f64, f64),
        norms: (f64, f64),
    },
    Player {
        player: usize,
        value: f64,
    },
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self {
            Witness::IndexSet { .. } => "index-set",
            Witness::Direction { .. } => "direction",
            Witness::Pair { .. } => "pair",
            Witness::MixedRows { .. } => "mixed-rows",
            Witness::PointSubset { .. } => "point-subset",
            Witness::FamilyMember { .. } => "family-member",
            Witness::Ray { .. } => "ray",
            Witness::Player { .. } => "player",
        }
    }

    pub fn record(&self) -> WitnessRecord {
        let mut values = Vec::new();
        let mut indices = Vec::new();
        match self {
            Witness::IndexSet { indices: s, value } => {
                indices.extend(s);
                values.push(*value);
            }
            Witness::Direction { w, value } => {
                values.extend(w.iter());
                values.push(*value);
            }
            Witness::Pair { x, y, value } => {
                values.extend(x.iter().chain(y.iter()));
                values.push(*value);
            }
            Witness::MixedRows {
                points,
                indices: s,
                value,
            } => {
                for p in points {
                    values.extend(p.iter());
                }
                values.push(*value);
                indices.extend(s);
            }
            Witness::PointSubset {
                x,
                indices: s,
                value,
            } => {
                values.extend(x.iter());
                values.push(*value);
                indices.extend(s);
            }
            Witness::FamilyMember {
                x,
                beta,
                alpha,
                t,
                value,
            } => {
                values.extend(x.iter().chain(alpha.iter()));
                values.extend([*beta, *t, *value]);
            }
            Witness::Ray {
                direction,
                radii,
                norms,
            } => {
                values.extend(direction.iter());
                values.extend([radii.0, radii.1, norms.0, norms.1]);
            }
            Witness::Player { player, value } => {
                indices.push(*player);
                values.push(*value);
            }
        }
        WitnessRecord {
            kind: self.kind().to_string(),
            values,
            indices,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub condition: Condition,
    pub verdict: Verdict,
    /// Condition-specific figure: minimum principal minor, minimum singular
    /// value, empirical modulus, fitted constant, …
    pub margin: f64,
    pub witness: Option<Witness>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    /// Named numbers backing the verdict, in a fixed order.
    pub evidence: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

/// Note attached to every sampled pass.
pub const SAMPLED_NOTE: &str = "sampled surrogate, not a proof";

impl CertificateReport {
    pub fn new(condition: Condition, verdict: Verdict, margin: f64) -> Self {
        Self {
            condition,
            verdict,
            margin,
            witness: None,
            seed: None,
            budget: None,
            evidence: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn with_sampling(mut self, seed: u64, budget: usize) -> Self {
        self.seed = Some(seed);
        self.budget = Some(budget);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn evidence(mut self, name: impl Into<String>, value: f64) -> Self {
        self.evidence.push((name.into(), value));
        self
    }

    pub fn evidence_value(&self, name: &str) -> Option<f64> {
        self.evidence
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn record(&self) -> CertificateRecord {
        CertificateRecord {
            condition: self.condition.id().to_string(),
            verdict: self.verdict.as_str().to_string(),
            margin: self.margin,
            seed: self.seed,
            budget: self.budget,
            notes: self.notes.clone(),
            witness: self.witness.as_ref().map(Witness::record),
            evidence: self
                .evidence
                .iter()
                .map(|(name, value)| EvidenceRecord {
                    name: name.clone(),
                    value: *value,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub kind: String,
    pub values: Vec<f64>,
    #[serde(default)]
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub name: String,
    pub value: f64,
}

/// Serializable form of a [`CertificateReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub condition: String,
    pub verdict: String,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<EvidenceRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_ids_round_trip() {
        for c in Condition::ALL {
            assert_eq!(c.id().parse::<Condition>().unwrap(), c);
        }
        assert!("bogus".parse::<Condition>().is_err());
    }

    #[test]
    fn record_serializes_to_toml_and_back() {
        let report = CertificateReport::new(Condition::Pfunction, Verdict::Fail, -0.5)
            .with_witness(Witness::Pair {
                x: Vector::from_vec(vec![1.0, 0.0]),
                y: Vector::from_vec(vec![0.0, 1.0]),
                value: -0.5,
            })
            .with_sampling(42, 1000)
            .evidence("mu", -0.5)
            .note("hello");
        let text = toml::to_string(&report.record()).unwrap();
        assert!(text.contains("condition = \"pfunction\""));
        assert!(text.contains("verdict = \"fail\""));
        let back: CertificateRecord = toml::from_str(&text).unwrap();
        assert_eq!(back, report.record());
    }

    #[test]
    fn pair_witness_layout() {
        let w = Witness::Pair {
            x: Vector::from_vec(vec![1.0, 2.0]),
            y: Vector::from_vec(vec![3.0, 4.0]),
            value: -1.0,
        };
        assert_eq!(w.record().values, vec![1.0, 2.0, 3.0, 4.0, -1.0]);
    }
}
