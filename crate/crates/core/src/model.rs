//! Problem data: box feasible sets, mappings with Jacobian access, quadratic
//! games, and the [`VIProblem`] that ties a mapping to a set.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, Matrix, Vector};

/// Cartesian product of closed intervals `[lo_i, hi_i]`, with infinite bounds
/// allowed. An optional block partition groups coordinates by player.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    lo: Vec<f64>,
    hi: Vec<f64>,
    blocks: Option<Vec<usize>>,
}

impl BoxSet {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Dimension {
                context: "box bounds",
                expected: lo.len(),
                found: hi.len(),
            });
        }
        for (i, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if l.is_nan() || h.is_nan() {
                return Err(Error::Config(format!("bound {i} is NaN")));
            }
            if l == f64::INFINITY || h == f64::NEG_INFINITY {
                return Err(Error::Config(format!("bound {i} is empty: lo={l}, hi={h}")));
            }
            if l > h {
                return Err(Error::Config(format!("coordinate {i} has lo={l} > hi={h}")));
            }
        }
        Ok(Self {
            lo,
            hi,
            blocks: None,
        })
    }

    /// The whole space `R^m`.
    pub fn full(m: usize) -> Self {
        Self {
            lo: vec![f64::NEG_INFINITY; m],
            hi: vec![f64::INFINITY; m],
            blocks: None,
        }
    }

    /// `[lo, hi]^m`.
    pub fn uniform(m: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; m], vec![hi; m])
    }

    /// Attaches a block partition; block sizes must be positive and sum to `m`.
    pub fn with_blocks(mut self, blocks: Vec<usize>) -> Result<Self> {
        let total: usize = blocks.iter().sum();
        if total != self.dim() {
            return Err(Error::Dimension {
                context: "block partition",
                expected: self.dim(),
                found: total,
            });
        }
        if blocks.contains(&0) {
            return Err(Error::Config("block sizes must be positive".into()));
        }
        self.blocks = Some(blocks);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lo
    }

    pub fn upper(&self) -> &[f64] {
        &self.hi
    }

    pub fn blocks(&self) -> Option<&[usize]> {
        self.blocks.as_deref()
    }

    /// Coordinate ranges of the block partition, or one range per coordinate
    /// when no partition is attached.
    pub fn block_ranges(&self) -> Vec<Range<usize>> {
        match &self.blocks {
            Some(b) => block_ranges(b),
            None => (0..self.dim()).map(|i| i..i + 1).collect(),
        }
    }

    pub fn is_free(&self, i: usize) -> bool {
        self.lo[i] == f64::NEG_INFINITY && self.hi[i] == f64::INFINITY
    }

    pub fn is_full_space(&self) -> bool {
        (0..self.dim()).all(|i| self.is_free(i))
    }

    pub fn has_finite_bound(&self) -> bool {
        self.lo.iter().chain(&self.hi).any(|b| b.is_finite())
    }

    pub fn contains(&self, x: &Vector) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(i, &xi)| self.lo[i] <= xi && xi <= self.hi[i])
    }

    /// True when `x` lies in the topological interior of the box.
    pub fn contains_interior(&self, x: &Vector) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(i, &xi)| self.lo[i] < xi && xi < self.hi[i])
    }

    /// Default start point: the box midpoint, `0` for free coordinates, and one
    /// unit inside the finite bound for half-bounded coordinates.
    pub fn midpoint(&self) -> Vector {
        Vector::from_fn(self.dim(), |i, _| {
            let (l, h) = (self.lo[i], self.hi[i]);
            match (l.is_finite(), h.is_finite()) {
                (true, true) => 0.5 * (l + h),
                (true, false) => l + 1.0,
                (false, true) => h - 1.0,
                (false, false) => 0.0,
            }
        })
    }

    /// Finite sampling interval for coordinate `i`; infinite sides are replaced
    /// so that the interval has width `2 * radius`.
    pub fn sampling_interval(&self, i: usize, radius: f64) -> (f64, f64) {
        let (l, h) = (self.lo[i], self.hi[i]);
        match (l.is_finite(), h.is_finite()) {
            (true, true) => (l, h),
            (true, false) => (l, l + 2.0 * radius),
            (false, true) => (h - 2.0 * radius, h),
            (false, false) => (-radius, radius),
        }
    }
}

pub(crate) fn block_ranges(sizes: &[usize]) -> Vec<Range<usize>> {
    let mut start = 0;
    sizes
        .iter()
        .map(|&n| {
            let r = start..start + n;
            start += n;
            r
        })
        .collect()
}

/// Nonlinear mappings compiled into the crate, addressable by id from problem
/// files. Each has an analytic Jacobian and works in any dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `F_i(x) = x_i^3`
    Cubic,
    /// `F_i(x) = x_i^3 + x_i - 1`
    CubicShift,
    /// `F_i(x) = 2 x_i + sin(x_{i+1}) - 1`, indices taken cyclically.
    SineCoupled,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::Cubic, Builtin::CubicShift, Builtin::SineCoupled];

    pub fn id(self) -> &'static str {
        match self {
            Builtin::Cubic => "cubic",
            Builtin::CubicShift => "cubic-shift",
            Builtin::SineCoupled => "sine-coupled",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.id() == id)
    }

    fn eval(self, x: &Vector) -> Vector {
        let m = x.len();
        match self {
            Builtin::Cubic => x.map(|v| v * v * v),
            Builtin::CubicShift => x.map(|v| v * v * v + v - 1.0),
            Builtin::SineCoupled => {
                Vector::from_fn(m, |i, _| 2.0 * x[i] + x[(i + 1) % m].sin() - 1.0)
            }
        }
    }

    fn jacobian(self, x: &Vector) -> Matrix {
        let m = x.len();
        match self {
            Builtin::Cubic => Matrix::from_diagonal(&x.map(|v| 3.0 * v * v)),
            Builtin::CubicShift => Matrix::from_diagonal(&x.map(|v| 3.0 * v * v + 1.0)),
            Builtin::SineCoupled => {
                let mut j = Matrix::from_diagonal_element(m, m, 2.0);
                for i in 0..m {
                    let next = (i + 1) % m;
                    j[(i, next)] += x[next].cos();
                }
                j
            }
        }
    }
}

pub type EvalFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&Vector) -> Matrix + Send + Sync>;

#[derive(Clone)]
pub enum MappingKind {
    /// `F(x) = A x + b`.
    Affine {
        a: Matrix,
        b: Vector,
    },
    /// Pseudo-gradient of a quadratic game; affine with the assembled block matrix.
    GameGradient {
        a: Matrix,
        b: Vector,
    },
    Builtin(Builtin),
    /// User-supplied evaluator; a finite-difference Jacobian is used when
    /// `jacobian` is `None`.
    Custom {
        eval: EvalFn,
        jacobian: Option<JacobianFn>,
    },
}

impl fmt::Debug for MappingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MappingKind::Affine { a, b } => f
                .debug_struct("Affine")
                .field("a", a)
                .field("b", b)
                .finish(),
            MappingKind::GameGradient { a, b } => f
                .debug_struct("GameGradient")
                .field("a", a)
                .field("b", b)
                .finish(),
            MappingKind::Builtin(id) => f.debug_tuple("Builtin").field(id).finish(),
            MappingKind::Custom { jacobian, .. } => f
                .debug_struct("Custom")
                .field("analytic_jacobian", &jacobian.is_some())
                .finish(),
        }
    }
}

/// A mapping `F: R^m -> R^m`.
#[derive(Debug, Clone)]
pub struct Mapping {
    dim: usize,
    kind: MappingKind,
}

impl Mapping {
    pub fn affine(a: Matrix, b: Vector) -> Result<Self> {
        check_affine(&a, &b)?;
        Ok(Self {
            dim: b.len(),
            kind: MappingKind::Affine { a, b },
        })
    }

    /// `F(x) = A x`.
    pub fn linear(a: Matrix) -> Result<Self> {
        let m = a.nrows();
        Self::affine(a, Vector::zeros(m))
    }

    pub fn identity(m: usize) -> Self {
        Self {
            dim: m,
            kind: MappingKind::Affine {
                a: Matrix::identity(m, m),
                b: Vector::zeros(m),
            },
        }
    }

    pub fn constant(c: Vector) -> Self {
        let m = c.len();
        Self {
            dim: m,
            kind: MappingKind::Affine {
                a: Matrix::zeros(m, m),
                b: c,
            },
        }
    }

    pub fn builtin(id: Builtin, m: usize) -> Self {
        Self {
            dim: m,
            kind: MappingKind::Builtin(id),
        }
    }

    pub fn custom(m: usize, eval: EvalFn, jacobian: Option<JacobianFn>) -> Self {
        Self {
            dim: m,
            kind: MappingKind::Custom { eval, jacobian },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &MappingKind {
        &self.kind
    }

    /// `(A, b)` when the mapping is affine (including game gradients).
    pub fn as_affine(&self) -> Option<(&Matrix, &Vector)> {
        match &self.kind {
            MappingKind::Affine { a, b } | MappingKind::GameGradient { a, b } => Some((a, b)),
            _ => None,
        }
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        !matches!(&self.kind, MappingKind::Custom { jacobian: None, .. })
    }

    /// Evaluates `F(x)`, rejecting non-finite output.
    pub fn evaluate(&self, x: &Vector) -> Result<Vector> {
        check_len("mapping argument", self.dim, x.len())?;
        let y = match &self.kind {
            MappingKind::Affine { a, b } | MappingKind::GameGradient { a, b } => a * x + b,
            MappingKind::Builtin(id) => id.eval(x),
            MappingKind::Custom { eval, .. } => eval(x),
        };
        check_len("mapping output", self.dim, y.len())?;
        check_finite(&y)?;
        Ok(y)
    }

    /// Analytic Jacobian, when the mapping carries one.
    pub fn analytic_jacobian(&self, x: &Vector) -> Option<Result<Matrix>> {
        let j = match &self.kind {
            MappingKind::Affine { a, .. } | MappingKind::GameGradient { a, .. } => a.clone(),
            MappingKind::Builtin(id) => id.jacobian(x),
            MappingKind::Custom {
                jacobian: Some(jac),
                ..
            } => jac(x),
            MappingKind::Custom { jacobian: None, .. } => return None,
        };
        Some(check_finite_matrix(&j).map(|_| j))
    }
}

fn check_affine(a: &Matrix, b: &Vector) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension {
            context: "affine matrix columns",
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    check_len("affine offset", a.nrows(), b.len())?;
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Config("affine data must be finite".into()));
    }
    Ok(())
}

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            context,
            expected,
            found,
        })
    }
}

fn check_finite(v: &Vector) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(coordinate) => Err(Error::NonFinite { coordinate }),
        None => Ok(()),
    }
}

fn check_finite_matrix(a: &Matrix) -> Result<()> {
    for r in 0..a.nrows() {
        if (0..a.ncols()).any(|c| !a[(r, c)].is_finite()) {
            return Err(Error::NonFinite { coordinate: r });
        }
    }
    Ok(())
}

/// An `N`-player game with quadratic costs
///
/// ```text
/// f_i(x) = ½ x_iᵀ Q_ii x_i + x_iᵀ Σ_{j≠i} Q_ij x_j + c_iᵀ x_i
/// ```
///
/// stored as one block matrix `Q` (block `(i, j)` is `Q_ij`) and a stacked
/// linear term `c`. Player `i` controls the coordinates of block `i` and is
/// restricted to the matching part of `actions`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticGame {
    blocks: Vec<usize>,
    q: Matrix,
    c: Vector,
    actions: BoxSet,
}

impl QuadraticGame {
    pub fn new(blocks: Vec<usize>, q: Matrix, c: Vector, actions: BoxSet) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Config("a game needs at least one player".into()));
        }
        let m: usize = blocks.iter().sum();
        check_len("game cost matrix rows", m, q.nrows())?;
        check_len("game cost matrix columns", m, q.ncols())?;
        check_len("game linear term", m, c.len())?;
        check_len("game action set", m, actions.dim())?;
        if q.iter().chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Config("game cost data must be finite".into()));
        }
        let actions = actions.with_blocks(blocks.clone())?;
        let game = Self {
            blocks,
            q,
            c,
            actions,
        };
        for i in 0..game.players() {
            if !is_symmetric(&game.q_block(i, i)) {
                return Err(Error::Config(format!(
                    "own-cost block Q_{i}{i} of player {i} is not symmetric"
                )));
            }
        }
        Ok(game)
    }

    /// Game with all action sets equal to the full space.
    pub fn unconstrained(blocks: Vec<usize>, q: Matrix, c: Vector) -> Result<Self> {
        let m = q.nrows();
        Self::new(blocks, q, c, BoxSet::full(m))
    }

    pub fn players(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_range(&self, i: usize) -> Range<usize> {
        block_ranges(&self.blocks)[i].clone()
    }

    pub fn cost_matrix(&self) -> &Matrix {
        &self.q
    }

    pub fn linear_term(&self) -> &Vector {
        &self.c
    }

    pub fn actions(&self) -> &BoxSet {
        &self.actions
    }

    pub fn q_block(&self, i: usize, j: usize) -> Matrix {
        let (ri, rj) = (self.block_range(i), self.block_range(j));
        self.q
            .view((ri.start, rj.start), (ri.len(), rj.len()))
            .into_owned()
    }

    pub fn c_block(&self, i: usize) -> Vector {
        let r = self.block_range(i);
        self.c.rows(r.start, r.len()).into_owned()
    }

    pub fn block_of(&self, x: &Vector, i: usize) -> Vector {
        let r = self.block_range(i);
        x.rows(r.start, r.len()).into_owned()
    }

    /// Linear coefficient of player `i`'s cost once the others' actions are
    /// fixed: `Σ_{j≠i} Q_ij x_j + c_i`.
    pub fn coupling(&self, i: usize, x: &Vector) -> Vector {
        let mut g = self.c_block(i);
        for j in (0..self.players()).filter(|&j| j != i) {
            g += self.q_block(i, j) * self.block_of(x, j);
        }
        g
    }

    /// `f_i(x)`.
    pub fn cost(&self, i: usize, x: &Vector) -> f64 {
        let xi = self.block_of(x, i);
        let qii = self.q_block(i, i);
        0.5 * xi.dot(&(&qii * &xi)) + xi.dot(&self.coupling(i, x))
    }

    /// `∇_i f_i(x) = Q_ii x_i + Σ_{j≠i} Q_ij x_j + c_i`.
    pub fn own_gradient(&self, i: usize, x: &Vector) -> Vector {
        self.q_block(i, i) * self.block_of(x, i) + self.coupling(i, x)
    }
}

/// A variational inequality `VI(K, F)` over a box.
#[derive(Debug, Clone)]
pub struct VIProblem {
    mapping: Mapping,
    set: BoxSet,
    label: String,
}

impl VIProblem {
    pub fn new(mapping: Mapping, set: BoxSet, label: impl Into<String>) -> Result<Self> {
        check_len("feasible set", mapping.dim(), set.dim())?;
        Ok(Self {
            mapping,
            set,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn mapping(&self) -> &Mapping {
        &self.mapping
    }

    pub fn set(&self) -> &BoxSet {
        &self.set
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_set(self, set: BoxSet) -> Result<Self> {
        Self::new(self.mapping, set, self.label)
    }

    pub fn evaluate(&self, x: &Vector) -> Result<Vector> {
        self.mapping.evaluate(x)
    }
}

/// Compiles a game into the VI of its pseudo-gradient mapping
/// `F = (∇_1 f_1, …, ∇_N f_N)` over the product of the action sets.
pub fn game_to_vi(g: &QuadraticGame) -> VIProblem {
    let mapping = Mapping {
        dim: g.dim(),
        kind: MappingKind::GameGradient {
            a: g.q.clone(),
            b: g.c.clone(),
        },
    };
    VIProblem {
        mapping,
        set: g.actions.clone(),
        label: "game".into(),
    }
}

/// Relative central-difference step for coordinate value `x`.
pub fn fd_step(x: f64) -> f64 {
    1e-6 * (1.0 + x.abs())
}

/// `∇F(x)`, analytic when available and central differences otherwise.
pub fn jacobian(p: &VIProblem, x: &Vector) -> Result<Matrix> {
    check_len("jacobian point", p.dim(), x.len())?;
    match p.mapping.analytic_jacobian(x) {
        Some(j) => j,
        None => finite_difference_jacobian(p, x),
    }
}

/// Central finite-difference Jacobian with step `1e-6 (1 + |x_i|)`.
pub fn finite_difference_jacobian(p: &VIProblem, x: &Vector) -> Result<Matrix> {
    central_differences(|v| p.mapping.evaluate(v), x)
}

/// Column-by-column central differences of an arbitrary vector function.
pub fn central_differences<F>(f: F, x: &Vector) -> Result<Matrix>
where
    F: Fn(&Vector) -> Result<Vector>,
{
    let m = x.len();
    let mut jac: Option<Matrix> = None;
    let mut probe = x.clone();
    for j in 0..m {
        let h = fd_step(x[j]);
        probe[j] = x[j] + h;
        let plus = f(&probe)?;
        probe[j] = x[j] - h;
        let minus = f(&probe)?;
        probe[j] = x[j];
        let jac = jac.get_or_insert_with(|| Matrix::zeros(plus.len(), m));
        let col = (plus - minus) / (2.0 * h);
        jac.set_column(j, &col);
    }
    Ok(jac.unwrap_or_else(|| Matrix::zeros(0, 0)))
}
