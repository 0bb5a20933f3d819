use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vicert::certificates::{
    block_pfunction_ratio, coercivity_certificate, maximal_rank_tsearch, pmatrix_minors,
    pmatrix_oracle, principal_submatrix_sigma_sweep, recheck_mixed_rows, recheck_point_subset,
    recheck_ray, uniform_pfunction_search, uniform_pmatrix_sampled, RankSearchConfig, SampleSet,
    Verdict, Witness,
};
use vicert::{BoxSet, Builtin, Mapping, Matrix, ProbeConfig, VIProblem, Vector};

/// All seven principal minors of a 3×3 matrix, expanded by hand.
fn minors3(a: &Matrix) -> Vec<f64> {
    let d2 = |i: usize, j: usize| a[(i, i)] * a[(j, j)] - a[(i, j)] * a[(j, i)];
    let det = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
        - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
        + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
    vec![
        a[(0, 0)],
        a[(1, 1)],
        a[(2, 2)],
        d2(0, 1),
        d2(0, 2),
        d2(1, 2),
        det,
    ]
}

#[test]
fn minors_verdict_matches_hand_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let a = Matrix::from_fn(3, 3, |_, _| rng.random_range(-2.0..2.0));
        let expect = minors3(&a);
        let r = pmatrix_minors(&a).unwrap();
        let min = expect.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((r.margin - min).abs() <= 1e-12);
        assert_eq!(r.verdict == Verdict::Pass, min > 0.0);
    }
}

#[test]
fn oracle_never_fails_a_p_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    while checked < 20 {
        let a = Matrix::from_fn(3, 3, |i, j| {
            if i == j {
                rng.random_range(1.0..3.0)
            } else {
                rng.random_range(-1.0..1.0)
            }
        });
        if minors3(&a).iter().all(|m| *m > 1e-6) {
            assert_ne!(
                pmatrix_oracle(&a, 2000, checked).unwrap().verdict,
                Verdict::Fail
            );
            checked += 1;
        }
    }
}

#[test]
fn oracle_witness_rechecks() {
    let a = Matrix::from_row_slice(2, 2, &[1., 2., 3., 1.]);
    let r = pmatrix_oracle(&a, 1000, 1).unwrap();
    let Some(Witness::Direction { w, value }) = r.witness else {
        panic!("expected direction")
    };
    let aw = &a * &w;
    let direct = (0..2)
        .map(|i| w[i] * aw[i])
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(direct, value);
    assert!(direct <= 0.0);
}

#[test]
fn mixed_row_witness_rechecks() {
    // x_i^3: Jacobian diag(3x_i²) vanishes at 0, so the uniform check fails there.
    let k = BoxSet::uniform(2, -1.0, 1.0).unwrap();
    let p = VIProblem::new(Mapping::builtin(Builtin::Cubic, 2), k.clone(), "t").unwrap();
    let s =
        SampleSet::from_points(&k, vec![Vector::zeros(2), Vector::from_element(2, 0.5)]).unwrap();
    let r = uniform_pmatrix_sampled(&p, &s, 8, 1e-8).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    let Some(Witness::MixedRows {
        points,
        indices,
        value,
    }) = r.witness
    else {
        panic!("expected mixed rows")
    };
    assert_eq!(recheck_mixed_rows(&p, &points, &indices).unwrap(), value);
}

#[test]
fn point_subset_witness_rechecks() {
    let k = BoxSet::uniform(2, -2.0, 2.0).unwrap();
    let p = VIProblem::new(Mapping::builtin(Builtin::SineCoupled, 2), k.clone(), "t").unwrap();
    let r = principal_submatrix_sigma_sweep(&p, &SampleSet::boundary_mix(&k, 30, 3, 10.0), 1e-10)
        .unwrap();
    let Some(Witness::PointSubset { x, indices, value }) = r.witness else {
        panic!("expected point subset")
    };
    assert_eq!(recheck_point_subset(&p, &x, &indices).unwrap(), value);
    assert_eq!(r.margin, value);
}

#[test]
fn pair_witness_rechecks() {
    let a = Matrix::from_row_slice(2, 2, &[1., 2., 3., 1.]);
    let p = VIProblem::new(Mapping::linear(a).unwrap(), BoxSet::full(2), "t").unwrap();
    let r = uniform_pfunction_search(&p, 100, 42, 10.0).unwrap();
    let Some(Witness::Pair { x, y, value }) = r.witness else {
        panic!("expected pair")
    };
    assert_eq!(
        block_pfunction_ratio(&p, &[0..1, 1..2], &x, &y).unwrap(),
        value
    );
    // direct: max_i (A d)_i d_i / |d|² with d = x - y
    let d = &x - &y;
    let ad = Vector::from_vec(vec![d[0] + 2.0 * d[1], 3.0 * d[0] + d[1]]);
    let direct = (ad[0] * d[0]).max(ad[1] * d[1]) / d.norm_squared();
    assert!((direct - value).abs() <= 1e-12);
    assert!(value <= 0.0);
}

#[test]
fn ray_witness_rechecks() {
    let p = VIProblem::new(
        Mapping::constant(Vector::from_element(2, 1.0)),
        BoxSet::full(2),
        "t",
    )
    .unwrap();
    let r = coercivity_certificate(&p, &ProbeConfig::default());
    let Some(Witness::Ray {
        direction,
        radii,
        norms,
    }) = r.witness
    else {
        panic!("expected ray")
    };
    assert_eq!(recheck_ray(&p, &direction, radii).unwrap(), norms);
}

#[test]
fn p_matrix_jacobian_implies_nonsingular_principal_submatrices() {
    // a P-matrix has positive minors, so every principal submatrix is nonsingular
    let a = Matrix::from_row_slice(3, 3, &[2., -1., 0.5, 0.3, 1., -0.2, 0.1, 0.4, 3.]);
    assert_eq!(pmatrix_minors(&a).unwrap().verdict, Verdict::Pass);
    let k = BoxSet::uniform(3, 0.0, 1.0).unwrap();
    let p = VIProblem::new(Mapping::linear(a).unwrap(), k.clone(), "t").unwrap();
    let s = SampleSet::boundary_mix(&k, 10, 1, 10.0);
    assert_eq!(
        principal_submatrix_sigma_sweep(&p, &s, 1e-10)
            .unwrap()
            .verdict,
        Verdict::Pass
    );
    assert_eq!(
        uniform_pmatrix_sampled(&p, &s, 40, 1e-8).unwrap().verdict,
        Verdict::Pass
    );
    assert_eq!(
        maximal_rank_tsearch(&p, &s, &RankSearchConfig::default())
            .unwrap()
            .verdict,
        Verdict::Pass
    );
}
