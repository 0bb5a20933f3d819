//! Problem files.
//!
//! A problem file is TOML. Infinite bounds are written `inf` / `-inf`;
//! matrices are flat and row-major.
//!
//! ```toml
//! name = "example-vi"
//! m = 2
//!
//! [set]
//! lo = [-inf, -inf]
//! hi = [inf, inf]
//! # blocks = [1, 1]      optional player partition
//!
//! [mapping]
//! kind = "affine"        # affine | game | builtin
//!
//! [affine]
//! A = [1.0, 2.0, 3.0, 1.0]
//! b = [0.0, 0.0]
//! ```
//!
//! A `game` problem instead carries `[game]` with `blocks`, the full block
//! cost matrix `Q` (row-major, `m×m`) and the stacked linear term `c`; the
//! action sets are taken from `[set]`. A `builtin` problem carries
//! `[builtin] id = "cubic-shift"`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::model::{game_to_vi, BoxSet, Builtin, Mapping, QuadraticGame, VIProblem};

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemKind {
    Affine { a: Matrix, b: Vector },
    Game(QuadraticGame),
    Builtin(Builtin),
}

/// A named problem, as loaded from a file or the registry.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemDef {
    pub name: String,
    pub set: BoxSet,
    pub kind: ProblemKind,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    name: String,
    m: usize,
    set: RawSet,
    mapping: RawMapping,
    #[serde(skip_serializing_if = "Option::is_none")]
    affine: Option<RawAffine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    game: Option<RawGame>,
    #[serde(skip_serializing_if = "Option::is_none")]
    builtin: Option<RawBuiltin>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    lo: Vec<f64>,
    hi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    blocks: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMapping {
    kind: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAffine {
    #[serde(rename = "A")]
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    blocks: Vec<usize>,
    #[serde(rename = "Q")]
    q: Vec<f64>,
    c: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBuiltin {
    id: String,
}

/// 1-based line of byte offset `pos`.
fn line_at(text: &str, pos: usize) -> usize {
    text[..pos.min(text.len())]
        .bytes()
        .filter(|b| *b == b'\n')
        .count()
        + 1
}

/// Line where `key` is assigned inside `[table]` (or at top level when
/// `table` is empty); falls back to the table header, then to line 1.
fn line_of(text: &str, table: &str, key: &str) -> usize {
    let mut current = String::new();
    let mut header = None;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_string();
            if current == table {
                header = Some(n + 1);
            }
            continue;
        }
        if current == table {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return n + 1;
                }
            }
        }
    }
    header.unwrap_or(1)
}

impl ProblemDef {
    pub fn new(name: impl Into<String>, set: BoxSet, kind: ProblemKind) -> Result<Self> {
        let def = Self {
            name: name.into(),
            set,
            kind,
        };
        def.to_vi()?;
        Ok(def)
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn game(&self) -> Option<&QuadraticGame> {
        match &self.kind {
            ProblemKind::Game(g) => Some(g),
            _ => None,
        }
    }

    pub fn kind_id(&self) -> &'static str {
        match self.kind {
            ProblemKind::Affine { .. } => "affine",
            ProblemKind::Game(_) => "game",
            ProblemKind::Builtin(_) => "builtin",
        }
    }

    pub fn to_vi(&self) -> Result<VIProblem> {
        let m = self.dim();
        let p = match &self.kind {
            ProblemKind::Affine { a, b } => VIProblem::new(
                Mapping::affine(a.clone(), b.clone())?,
                self.set.clone(),
                &self.name,
            )?,
            ProblemKind::Game(g) => game_to_vi(g).with_label(&self.name),
            ProblemKind::Builtin(id) => {
                VIProblem::new(Mapping::builtin(*id, m), self.set.clone(), &self.name)?
            }
        };
        Ok(p)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawProblem = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(1, |s| line_at(text, s.start)),
            message: e.message().trim().to_string(),
        })?;
        let at = |table: &str, key: &str, message: String| Error::Parse {
            line: line_of(text, table, key),
            message,
        };
        let m = raw.m;
        if m == 0 {
            return Err(at("", "m", "m must be positive".into()));
        }
        for (key, v) in [("lo", &raw.set.lo), ("hi", &raw.set.hi)] {
            if v.len() != m {
                return Err(at(
                    "set",
                    key,
                    format!("expected {m} bounds, found {}", v.len()),
                ));
            }
        }
        let mut set =
            BoxSet::new(raw.set.lo, raw.set.hi).map_err(|e| at("set", "lo", e.to_string()))?;
        if let Some(blocks) = raw.set.blocks {
            set = set
                .with_blocks(blocks)
                .map_err(|e| at("set", "blocks", e.to_string()))?;
        }

        let kind = match raw.mapping.kind.as_str() {
            "affine" => {
                let a = raw.affine.ok_or_else(|| {
                    at(
                        "mapping",
                        "kind",
                        "kind = \"affine\" needs an [affine] table".into(),
                    )
                })?;
                if a.a.len() != m * m {
                    return Err(at(
                        "affine",
                        "A",
                        format!("expected {} entries, found {}", m * m, a.a.len()),
                    ));
                }
                if a.b.len() != m {
                    return Err(at(
                        "affine",
                        "b",
                        format!("expected {m} entries, found {}", a.b.len()),
                    ));
                }
                ProblemKind::Affine {
                    a: Matrix::from_row_slice(m, m, &a.a),
                    b: Vector::from_vec(a.b),
                }
            }
            "game" => {
                let g = raw.game.ok_or_else(|| {
                    at(
                        "mapping",
                        "kind",
                        "kind = \"game\" needs a [game] table".into(),
                    )
                })?;
                if g.blocks.iter().sum::<usize>() != m || g.blocks.contains(&0) {
                    return Err(at(
                        "game",
                        "blocks",
                        format!("block sizes must be positive and sum to {m}"),
                    ));
                }
                if g.q.len() != m * m {
                    return Err(at(
                        "game",
                        "Q",
                        format!("expected {} entries, found {}", m * m, g.q.len()),
                    ));
                }
                if g.c.len() != m {
                    return Err(at(
                        "game",
                        "c",
                        format!("expected {m} entries, found {}", g.c.len()),
                    ));
                }
                let game = QuadraticGame::new(
                    g.blocks,
                    Matrix::from_row_slice(m, m, &g.q),
                    Vector::from_vec(g.c),
                    set.clone(),
                )
                .map_err(|e| at("game", "Q", e.to_string()))?;
                set = game.actions().clone();
                ProblemKind::Game(game)
            }
            "builtin" => {
                let b = raw.builtin.ok_or_else(|| {
                    at(
                        "mapping",
                        "kind",
                        "kind = \"builtin\" needs a [builtin] table".into(),
                    )
                })?;
                let id = Builtin::from_id(&b.id).ok_or_else(|| {
                    at(
                        "builtin",
                        "id",
                        format!("unknown builtin mapping '{}'", b.id),
                    )
                })?;
                ProblemKind::Builtin(id)
            }
            other => {
                return Err(at(
                    "mapping",
                    "kind",
                    format!("unknown mapping kind '{other}' (expected affine, game or builtin)"),
                ))
            }
        };
        Self::new(raw.name, set, kind).map_err(|e| at("", "name", e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        let m = self.dim();
        let row_major = |a: &Matrix| -> Vec<f64> {
            (0..m)
                .flat_map(|i| (0..m).map(move |j| a[(i, j)]))
                .collect()
        };
        let mut raw = RawProblem {
            name: self.name.clone(),
            m,
            set: RawSet {
                lo: self.set.lower().to_vec(),
                hi: self.set.upper().to_vec(),
                blocks: self.set.blocks().map(<[usize]>::to_vec),
            },
            mapping: RawMapping {
                kind: self.kind_id().into(),
            },
            affine: None,
            game: None,
            builtin: None,
        };
        match &self.kind {
            ProblemKind::Affine { a, b } => {
                raw.affine = Some(RawAffine {
                    a: row_major(a),
                    b: b.iter().copied().collect(),
                })
            }
            ProblemKind::Game(g) => {
                raw.game = Some(RawGame {
                    blocks: g.block_sizes().to_vec(),
                    q: row_major(g.cost_matrix()),
                    c: g.linear_term().iter().copied().collect(),
                })
            }
            ProblemKind::Builtin(id) => raw.builtin = Some(RawBuiltin { id: id.id().into() }),
        }
        toml::to_string(&raw).expect("problem data is always serializable")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml())
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
    }
}
