//! Run reports and the solve / certify drivers behind the subcommands.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use vicert::certificates::{
    block_pfunction_search, coercivity_certificate, growth_l0lp_fit, hessian_block_convexity,
    maximal_rank_tsearch, p_upsilon_check, pl_condition_check, pmatrix_at, pmatrix_oracle,
    principal_submatrix_sigma_sweep, uniform_pfunction_search, uniform_pmatrix_sampled,
    CertificateRecord, CertificateReport, Condition, PlConfig, RankSearchConfig, SampleSet,
    Verdict, DEFAULT_SIGMA_THRESHOLD, MIN_ORACLE_SAMPLES, MIN_PAIRS,
};
use vicert::problem::{ProblemDef, ProblemKind};
use vicert::{
    classify, jacobian, multistart, solve, ProbeConfig, SolveConfig, SolveResult, SolveStatus,
    VIProblem,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Smallest principal minor a mixed-row matrix needs for a uniform P pass.
pub const ETA_FLOOR: f64 = 1e-8;

/// A resolved problem and where it came from.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub def: ProblemDef,
    /// `registry` or the file path.
    pub source: String,
}

/// Looks `problem` up in the registry, then tries it as a file path.
pub fn resolve(problem: &str) -> Result<Resolved, String> {
    if let Some(e) = vicert::lookup(problem) {
        return Ok(Resolved {
            def: e.def,
            source: "registry".into(),
        });
    }
    let path = Path::new(problem);
    if !path.exists() {
        return Err(format!(
            "unknown problem '{problem}' (not a registry id or an existing file)"
        ));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{problem}: {e}"))?;
    match ProblemDef::parse(&text) {
        Ok(def) => Ok(Resolved {
            def,
            source: problem.into(),
        }),
        Err(vicert::Error::Parse { line, message }) => Err(format!("{problem}:{line}: {message}")),
        Err(e) => Err(format!("{problem}: {e}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub samples: usize,
    pub starts: usize,
    pub tol: f64,
    pub radius: f64,
    pub trace: bool,
    pub timing: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 200,
            starts: 8,
            tol: 1e-10,
            radius: 10.0,
            trace: false,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub command: String,
    pub problem: String,
    pub source: String,
    pub kind: String,
    pub dim: usize,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub samples: usize,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub status: String,
    pub classification: String,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub start: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub steps: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedRecord {
    pub condition: String,
    pub reason: String,
}

/// Everything a command produced, serialized as TOML on stdout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run: RunInfo,
    pub config: ConfigEcho,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub solutions: Vec<SolutionRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<CertificateRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedRecord>,
}

impl RunReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run reports are serializable")
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

fn run_info(command: &str, r: &Resolved, started: Option<Instant>) -> RunInfo {
    RunInfo {
        command: command.into(),
        problem: r.def.name.clone(),
        source: r.source.clone(),
        kind: r.def.kind_id().into(),
        dim: r.def.dim(),
        version: VERSION.into(),
        wall_clock_s: started.map(|t| t.elapsed().as_secs_f64()),
    }
}

fn solution_record(res: &SolveResult, trace: bool) -> SolutionRecord {
    SolutionRecord {
        status: res.status.as_str().into(),
        classification: res.classification.as_str().into(),
        x: res.x.iter().copied().collect(),
        v: res.v.iter().copied().collect(),
        start: res.start.iter().copied().collect(),
        residual: res.residual,
        iterations: res.iterations(),
        steps: res.steps.iter().map(|s| s.as_str().to_string()).collect(),
        trace: trace.then(|| res.trace.clone()),
        failure: res.failure.clone(),
    }
}

fn solve_config(s: &Settings) -> SolveConfig {
    SolveConfig {
        tol: s.tol,
        start_radius: s.radius,
        ..SolveConfig::default()
    }
}

/// Multistart solve. The report lists distinct solutions, best first; the
/// flag says whether the best one converged.
pub fn run_solve(r: &Resolved, s: &Settings) -> Result<(RunReport, bool), String> {
    let started = s.timing.then(Instant::now);
    let p = r.def.to_vi().map_err(|e| e.to_string())?;
    let mut results =
        multistart(&p, &solve_config(s), s.starts.max(1), s.seed).map_err(|e| e.to_string())?;
    for res in &mut results {
        res.classification = classify(&p, r.def.game(), res);
    }
    let solved = results
        .first()
        .is_some_and(|b| b.status == SolveStatus::Solved);
    let report = RunReport {
        run: run_info("solve", r, started),
        config: ConfigEcho {
            seed: s.seed,
            samples: s.samples,
            radius: s.radius,
            starts: Some(s.starts.max(1)),
            tol: Some(s.tol),
            conditions: Vec::new(),
        },
        solutions: results
            .iter()
            .map(|res| solution_record(res, s.trace))
            .collect(),
        certificates: Vec::new(),
        skipped: Vec::new(),
    };
    Ok((report, solved))
}

/// Conditions run when none are requested.
pub fn default_conditions(def: &ProblemDef) -> Vec<Condition> {
    Condition::ALL
        .into_iter()
        .filter(|c| *c != Condition::PmatrixOracle)
        .filter(|c| applicability(def, *c).is_ok())
        .collect()
}

fn blocks_of(def: &ProblemDef) -> Option<Vec<usize>> {
    def.game()
        .map(|g| g.block_sizes().to_vec())
        .or_else(|| def.set.blocks().map(<[usize]>::to_vec))
}

fn applicability(def: &ProblemDef, c: Condition) -> Result<(), String> {
    if c.game_only() && def.game().is_none() {
        return Err("applies to games only".into());
    }
    if c == Condition::BlockPfunction && blocks_of(def).is_none() {
        return Err("problem has no block partition".into());
    }
    Ok(())
}

/// Growth exponent used for the `(L0, Lp)` fit: affine mappings grow
/// linearly, the compiled-in nonlinear mappings at most cubically.
fn growth_exponent(def: &ProblemDef) -> f64 {
    match def.kind {
        ProblemKind::Builtin(_) => 3.0,
        _ => 1.0,
    }
}

fn check(
    def: &ProblemDef,
    p: &VIProblem,
    c: Condition,
    s: &Settings,
) -> Result<CertificateReport, String> {
    let k = p.set();
    let points = || SampleSet::boundary_mix(k, s.samples.max(1), s.seed, s.radius);
    let pairs = s.samples.max(MIN_PAIRS);
    let game = || {
        def.game()
            .ok_or_else(|| "applies to games only".to_string())
    };
    let out = match c {
        Condition::Pmatrix => pmatrix_at(p, &k.midpoint()),
        Condition::PmatrixOracle => {
            let a = jacobian(p, &k.midpoint()).map_err(|e| e.to_string())?;
            pmatrix_oracle(&a, s.samples.max(MIN_ORACLE_SAMPLES), s.seed)
        }
        Condition::UniformPmatrix => {
            uniform_pmatrix_sampled(p, &points(), 4 * s.samples.max(1), ETA_FLOOR)
        }
        Condition::SigmaSweep => {
            principal_submatrix_sigma_sweep(p, &points(), DEFAULT_SIGMA_THRESHOLD)
        }
        Condition::Pfunction => uniform_pfunction_search(p, pairs, s.seed, s.radius),
        Condition::BlockPfunction => {
            let blocks = blocks_of(def).ok_or("problem has no block partition")?;
            block_pfunction_search(p, &blocks, pairs, s.seed, s.radius)
        }
        Condition::Growth => growth_l0lp_fit(p, pairs, growth_exponent(def), s.seed, s.radius),
        Condition::Upsilon => p_upsilon_check(game()?, &points()),
        Condition::MaximalRank => maximal_rank_tsearch(
            p,
            &points(),
            &RankSearchConfig {
                seed: s.seed,
                ..RankSearchConfig::default()
            },
        ),
        Condition::Coercivity => Ok(coercivity_certificate(
            p,
            &ProbeConfig {
                seed: s.seed,
                ..ProbeConfig::default()
            },
        )),
        Condition::Pl => {
            let g = game()?;
            let res = solve(p, &solve_config(s)).map_err(|e| e.to_string())?;
            if !res.solved() {
                return Err(format!(
                    "no quasi-Nash point to test (solver: {})",
                    res.status
                ));
            }
            pl_condition_check(
                g,
                &res.x,
                &PlConfig {
                    samples: s.samples.max(1),
                    seed: s.seed,
                    radius: s.radius,
                },
            )
        }
        Condition::BlockConvexity => Ok(hessian_block_convexity(game()?)),
    };
    out.map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    AllPass,
    AnyFail,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::AllPass => 0,
            Outcome::AnyFail => 2,
            Outcome::Inconclusive => 3,
        }
    }
}

/// Runs the requested checkers (all applicable ones when `conditions` is
/// empty). Inapplicable or infeasible checks are listed as skipped.
pub fn run_certify(
    r: &Resolved,
    conditions: &[Condition],
    s: &Settings,
) -> Result<(RunReport, Outcome), String> {
    let started = s.timing.then(Instant::now);
    let p = r.def.to_vi().map_err(|e| e.to_string())?;
    let requested = if conditions.is_empty() {
        default_conditions(&r.def)
    } else {
        conditions.to_vec()
    };
    let mut certificates = Vec::new();
    let mut skipped = Vec::new();
    for &c in &requested {
        let result = applicability(&r.def, c).and_then(|()| check(&r.def, &p, c, s));
        match result {
            Ok(rep) => certificates.push(rep),
            Err(reason) => skipped.push(SkippedRecord {
                condition: c.id().into(),
                reason,
            }),
        }
    }
    let outcome = if certificates.iter().any(|c| c.verdict == Verdict::Fail) {
        Outcome::AnyFail
    } else if certificates
        .iter()
        .any(|c| c.verdict == Verdict::Inconclusive)
    {
        Outcome::Inconclusive
    } else {
        Outcome::AllPass
    };
    let report = RunReport {
        run: run_info("certify", r, started),
        config: ConfigEcho {
            seed: s.seed,
            samples: s.samples,
            radius: s.radius,
            starts: None,
            tol: None,
            conditions: requested.iter().map(|c| c.id().to_string()).collect(),
        },
        solutions: Vec::new(),
        certificates: certificates.iter().map(CertificateReport::record).collect(),
        skipped,
    };
    Ok((report, outcome))
}
