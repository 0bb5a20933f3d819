use proptest::prelude::*;
use vicert::model::finite_difference_jacobian;
use vicert::{
    game_to_vi, jacobian, normal_map, project, BoxSet, Builtin, Mapping, Matrix, QuadraticGame,
    VIProblem, Vector,
};

fn bounds(m: usize) -> impl Strategy<Value = BoxSet> {
    proptest::collection::vec((-5.0..5.0f64, 0.0..4.0f64, 0u8..4), m).prop_map(|spec| {
        let (lo, hi): (Vec<f64>, Vec<f64>) = spec
            .into_iter()
            .map(|(a, w, kind)| match kind {
                0 => (a, a + w),
                1 => (f64::NEG_INFINITY, a),
                2 => (a, f64::INFINITY),
                _ => (f64::NEG_INFINITY, f64::INFINITY),
            })
            .unzip();
        BoxSet::new(lo, hi).unwrap()
    })
}

fn point(m: usize) -> impl Strategy<Value = Vector> {
    proptest::collection::vec(-20.0..20.0f64, m).prop_map(Vector::from_vec)
}

proptest! {
    #[test]
    fn projection_is_an_idempotent_clamp(k in bounds(4), x in point(4)) {
        let z = project(&k, &x);
        prop_assert!(k.contains(&z));
        prop_assert_eq!(project(&k, &z), z.clone());
        for i in 0..4 {
            let expect = if x[i] < k.lower()[i] { k.lower()[i] } else if x[i] > k.upper()[i] { k.upper()[i] } else { x[i] };
            prop_assert_eq!(z[i], expect);
        }
    }

    #[test]
    fn projection_is_nonexpansive(k in bounds(3), x in point(3), y in point(3)) {
        let d = (project(&k, &x) - project(&k, &y)).norm();
        prop_assert!(d <= (&x - &y).norm() + 1e-12);
    }

    #[test]
    fn normal_map_is_f_inside_k(k in bounds(3), x in point(3)) {
        let p = VIProblem::new(Mapping::builtin(Builtin::SineCoupled, 3), k.clone(), "t").unwrap();
        let z = project(&k, &x);
        let e = normal_map(&p, &z).unwrap();
        prop_assert_eq!(e.r, p.evaluate(&z).unwrap());
    }

    #[test]
    fn normal_map_splits_into_offset_and_f(k in bounds(3), v in point(3)) {
        let p = VIProblem::new(Mapping::builtin(Builtin::CubicShift, 3), k.clone(), "t").unwrap();
        let e = normal_map(&p, &v).unwrap();
        let z = project(&k, &v);
        let expect = &v - &z + p.evaluate(&z).unwrap();
        prop_assert!((e.r - expect).amax() <= 1e-12);
        prop_assert_eq!(e.z, z);
    }
}

#[test]
fn affine_jacobian_is_constant_bit_for_bit() {
    let a = Matrix::from_row_slice(3, 3, &[0.3, -1.0, 2.5, 1e-3, 4.0, 0.0, -7.0, 0.25, 1.0]);
    let p = VIProblem::new(
        Mapping::affine(a.clone(), Vector::from_vec(vec![1., 2., 3.])).unwrap(),
        BoxSet::full(3),
        "t",
    )
    .unwrap();
    for i in 0..10 {
        let x = Vector::from_fn(3, |j, _| (i * 3 + j) as f64 * 0.731 - 5.0);
        assert_eq!(jacobian(&p, &x).unwrap(), a);
    }
}

#[test]
fn game_jacobian_is_the_block_matrix() {
    let q = Matrix::from_row_slice(3, 3, &[2., 0.5, -1., 0.5, 3., 4., 2., -2., 1.]);
    let g =
        QuadraticGame::unconstrained(vec![2, 1], q.clone(), Vector::from_vec(vec![1., 0., -1.]))
            .unwrap();
    let p = game_to_vi(&g);
    let x = Vector::from_vec(vec![0.3, -0.7, 1.9]);
    assert_eq!(jacobian(&p, &x).unwrap(), q);
    // F_i = Q_ii x_i + sum_j Q_ij x_j + c_i, written out for player 2
    let f = p.evaluate(&x).unwrap();
    assert!((f[2] - (2.0 * 0.3 - 2.0 * -0.7 + 1.9 - 1.0)).abs() < 1e-15);
}

#[test]
fn builtin_jacobians_match_central_differences() {
    for b in Builtin::ALL {
        let p = VIProblem::new(Mapping::builtin(b, 4), BoxSet::full(4), "t").unwrap();
        for i in 0..10 {
            let x = Vector::from_fn(4, |j, _| ((i * 7 + j * 3) % 17) as f64 / 4.0 - 2.0);
            let fd = finite_difference_jacobian(&p, &x).unwrap();
            let an = jacobian(&p, &x).unwrap();
            assert!((fd - an).amax() <= 1e-5, "{} at {x}", b.id());
        }
    }
}
