//! Built-in problems with their known answers, used by the CLI and the
//! self-tests.

use crate::certificates::{Condition, Verdict};
use crate::linalg::{Matrix, Vector};
use crate::model::{BoxSet, Builtin, QuadraticGame};
use crate::problem::{ProblemDef, ProblemKind};

#[derive(Debug, Clone)]
pub struct ProblemRegistryEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub def: ProblemDef,
    /// Known unique solution, when there is one.
    pub solution: Option<Vector>,
    /// Verdicts that the default certify run must reproduce.
    pub verdicts: Vec<(Condition, Verdict)>,
}

/// Real root of `x³ + x - 1`.
pub const CUBIC_SHIFT_ROOT: f64 = 0.682_327_803_828_019_3;

fn entry(
    id: &'static str,
    summary: &'static str,
    set: BoxSet,
    kind: ProblemKind,
    solution: Option<Vec<f64>>,
    verdicts: Vec<(Condition, Verdict)>,
) -> ProblemRegistryEntry {
    ProblemRegistryEntry {
        id,
        summary,
        def: ProblemDef::new(id, set, kind).expect("registry problems are well-formed"),
        solution: solution.map(Vector::from_vec),
        verdicts,
    }
}

pub fn registry() -> Vec<ProblemRegistryEntry> {
    let example_a = Matrix::from_row_slice(2, 2, &[1., 2., 3., 1.]);
    let example_game =
        QuadraticGame::unconstrained(vec![1, 1], example_a.clone(), Vector::zeros(2))
            .expect("valid game");

    #[rustfmt::skip]
    let box_q = Matrix::from_row_slice(4, 4, &[
        2., 0., 0., 1.,
        0., 2., 0., 0.,
        0., 0., 2., 0.,
        0., 0., 0., 2.,
    ]);
    let box_game = QuadraticGame::new(
        vec![2, 2],
        box_q,
        Vector::from_vec(vec![3., -1., 0.5, -4.]),
        BoxSet::uniform(4, -1.0, 1.0).expect("valid box"),
    )
    .expect("valid game");

    vec![
        entry(
            "example-vi",
            "F(x) = (x1 + 2 x2, 3 x1 + x2) on R^2; unique solution, but F is not a P-function",
            BoxSet::full(2),
            ProblemKind::Affine {
                a: example_a.clone(),
                b: Vector::zeros(2),
            },
            Some(vec![0.0, 0.0]),
            vec![
                (Condition::Pfunction, Verdict::Fail),
                (Condition::Pmatrix, Verdict::Fail),
                (Condition::SigmaSweep, Verdict::Pass),
                (Condition::Coercivity, Verdict::Pass),
                (Condition::MaximalRank, Verdict::Pass),
            ],
        ),
        entry(
            "example-game",
            "two scalar players with costs x1²/2 + 2 x1 x2 and 3 x1 x2 + x2²/2; Nash point at 0",
            example_game.actions().clone(),
            ProblemKind::Game(example_game),
            Some(vec![0.0, 0.0]),
            vec![
                (Condition::Upsilon, Verdict::Fail),
                (Condition::BlockConvexity, Verdict::Pass),
                (Condition::Pl, Verdict::Pass),
            ],
        ),
        entry(
            "identity-box",
            "F(x) = x on [1,2]^3; solution at the lower corner",
            BoxSet::uniform(3, 1.0, 2.0).expect("valid box"),
            ProblemKind::Affine {
                a: Matrix::identity(3, 3),
                b: Vector::zeros(3),
            },
            Some(vec![1.0; 3]),
            vec![
                (Condition::Pmatrix, Verdict::Pass),
                (Condition::MaximalRank, Verdict::Pass),
            ],
        ),
        entry(
            "constant-box",
            "F(x) = (1,1,1) on [0,1]^3; solution at the origin",
            BoxSet::uniform(3, 0.0, 1.0).expect("valid box"),
            ProblemKind::Affine {
                a: Matrix::zeros(3, 3),
                b: Vector::from_element(3, 1.0),
            },
            Some(vec![0.0; 3]),
            // bounded K: v - Π_K[v] alone makes the normal map coercive
            vec![
                (Condition::Coercivity, Verdict::Pass),
                (Condition::Pmatrix, Verdict::Fail),
            ],
        ),
        entry(
            "cubic-shift-box",
            "F_i(x) = x_i³ + x_i - 1 on [0,2]^2; interior solution at the real root",
            BoxSet::uniform(2, 0.0, 2.0).expect("valid box"),
            ProblemKind::Builtin(Builtin::CubicShift),
            Some(vec![CUBIC_SHIFT_ROOT; 2]),
            vec![(Condition::Coercivity, Verdict::Pass)],
        ),
        entry(
            "sine-coupled",
            "F_i(x) = 2 x_i + sin(x_{i+1}) - 1 on a mixed box",
            BoxSet::new(
                vec![0.0, f64::NEG_INFINITY, -1.0],
                vec![f64::INFINITY, f64::INFINITY, 0.25],
            )
            .expect("valid box"),
            ProblemKind::Builtin(Builtin::SineCoupled),
            None,
            vec![(Condition::SigmaSweep, Verdict::Pass)],
        ),
        entry(
            "box-game",
            "two players with two actions each on [-1,1]^4 and one-way coupling",
            box_game.actions().clone(),
            ProblemKind::Game(box_game),
            None,
            vec![(Condition::BlockConvexity, Verdict::Pass)],
        ),
    ]
}

pub fn lookup(id: &str) -> Option<ProblemRegistryEntry> {
    registry().into_iter().find(|e| e.id == id)
}
