//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the verdict lines show under a plain `cargo test`.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vicert::certificates::{
    coercivity_certificate, family_matrix, hessian_block_convexity, maximal_rank_tsearch,
    p_upsilon_check, pl_condition_check, pmatrix_minors, pmatrix_oracle, principal_minors,
    uniform_pfunction_search, upsilon_build, PlConfig, RankSearchConfig, SampleSet, Verdict,
    Witness,
};
use vicert::linalg::sigma_min;
use vicert::normal_map::coercivity_probe;
use vicert::projection::{convg_hull_sample, ConvexHullPoint, BETA_GRID};
use vicert::{
    classify, lookup, multistart, normal_map, normal_map_jacobian_element, registry, solve,
    BoundaryRule, BoxSet, Classification, Mapping, Matrix, ProbeConfig, ProbeVerdict, SolveConfig,
    VIProblem, Vector,
};

type Check = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ac1() -> Check {
    let p = lookup("example-vi").unwrap().def.to_vi().unwrap();
    let t = Instant::now();
    let sols = multistart(&p, &SolveConfig::default(), 8, 42).map_err(|e| e.to_string())?;
    let dt = t.elapsed().as_secs_f64();
    ensure(
        sols.len() == 1,
        format!("{} distinct solutions", sols.len()),
    )?;
    let err = sols[0].x.norm();
    ensure(sols[0].solved() && err <= 1e-8, format!("|x*| = {err:e}"))?;
    ensure(dt < 1.0, format!("took {dt:.3} s"))?;
    Ok(format!("one solution, |x*| = {err:e}, {dt:.4} s"))
}

fn ac2() -> Check {
    let e = lookup("example-game").unwrap();
    let g = e.def.game().unwrap();
    let p = e.def.to_vi().unwrap();
    let res = solve(&p, &SolveConfig::default()).map_err(|e| e.to_string())?;
    ensure(
        res.solved() && res.x.norm() <= 1e-8,
        format!("x* = {}", res.x),
    )?;
    ensure(
        hessian_block_convexity(g).verdict == Verdict::Pass,
        "block-convexity gate did not pass",
    )?;
    ensure(
        classify(&p, Some(g), &res) == Classification::Nash,
        "not classified nash",
    )?;
    let pl = pl_condition_check(g, &Vector::zeros(2), &PlConfig::default())
        .map_err(|e| e.to_string())?;
    let mu: Vec<f64> = (0..2)
        .map(|i| pl.evidence_value(&format!("mu[{i}]")).unwrap_or(f64::NAN))
        .collect();
    ensure(
        mu.iter().all(|m| (m - 2.0).abs() <= 1e-9),
        format!("mu = {mu:?}"),
    )?;
    Ok(format!("x* = 0, nash, mu = {mu:?}"))
}

fn ac3() -> Check {
    let vi = lookup("example-vi").unwrap().def.to_vi().unwrap();
    let r = uniform_pfunction_search(&vi, 200, 42, 10.0).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Fail, "pfunction did not fail")?;
    let Some(Witness::Pair { x, y, value }) = &r.witness else {
        return Err("no pair witness".into());
    };
    let d = x - y;
    let ad = Vector::from_vec(vec![d[0] + 2.0 * d[1], 3.0 * d[0] + d[1]]);
    let recheck = (ad[0] * d[0]).max(ad[1] * d[1]) / d.norm_squared();
    ensure(
        recheck <= 0.0 && (recheck - value).abs() <= 1e-12,
        format!("recheck {recheck} vs {value}"),
    )?;
    let u = &d / d.norm();
    let target = Vector::from_vec(vec![1.0, -1.0]) / 2f64.sqrt();
    let dist = (&u - &target).norm().min((&u + &target).norm());
    ensure(
        dist <= 1e-3,
        format!("direction {u} is {dist:e} from (1,-1)/sqrt2"),
    )?;

    let game = lookup("example-game").unwrap();
    let g = game.def.game().unwrap();
    let s = SampleSet::uniform(g.actions(), 50, 42, 10.0);
    let ups = upsilon_build(g, &s).map_err(|e| e.to_string())?;
    ensure(
        ups == Matrix::from_row_slice(2, 2, &[1., -2., -3., 1.]),
        format!("upsilon = {ups}"),
    )?;
    let rep = p_upsilon_check(g, &s).map_err(|e| e.to_string())?;
    ensure(
        rep.verdict == Verdict::Fail && rep.margin == -5.0,
        format!("upsilon verdict {:?}, margin {}", rep.verdict, rep.margin),
    )?;
    Ok(format!(
        "pair direction within {dist:.1e}; upsilon det = {}",
        rep.margin
    ))
}

fn ac4() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut tested, mut fails, mut found) = (0, 0, 0);
    while tested < 100 {
        let a = Matrix::from_fn(3, 3, |i, j| {
            let shift = if i == j { 0.6 } else { 0.0 };
            rng.random_range(-1.0..1.0) + shift
        });
        let minors = principal_minors(&a).map_err(|e| e.to_string())?;
        if minors.iter().any(|(_, m)| m.abs() < 1e-6) {
            continue;
        }
        tested += 1;
        let exact = pmatrix_minors(&a).map_err(|e| e.to_string())?.verdict;
        let oracle = pmatrix_oracle(&a, 100_000, tested)
            .map_err(|e| e.to_string())?
            .verdict;
        if exact == Verdict::Pass && oracle == Verdict::Fail {
            return Err(format!("oracle failed a P-matrix: {a}"));
        }
        if exact == Verdict::Fail {
            fails += 1;
            if oracle == Verdict::Fail {
                found += 1;
            }
        }
    }
    let dt = t.elapsed().as_secs_f64();
    ensure(fails > 0, "no non-P matrices drawn")?;
    let rate = found as f64 / fails as f64;
    ensure(rate >= 0.95, format!("witness rate {rate:.3}"))?;
    ensure(dt < 10.0, format!("took {dt:.2} s"))?;
    Ok(format!(
        "{tested} matrices, witnesses for {found}/{fails} non-P, {dt:.2} s"
    ))
}

fn ac5() -> Check {
    let ids = [
        "example-vi",
        "example-game",
        "identity-box",
        "cubic-shift-box",
        "sine-coupled",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for id in ids {
        let p = lookup(id).unwrap().def.to_vi().unwrap();
        let k = p.set();
        let m = p.dim();
        for _ in 0..50 {
            // keep every coordinate at least 1e-3 from the bounds, inside or out
            let v = Vector::from_fn(m, |i, _| loop {
                let (lo, hi) = (k.lower()[i].max(-6.0), k.upper()[i].min(6.0));
                let c = rng.random_range(lo - 2.0..hi + 2.0);
                if (c - k.lower()[i]).abs() >= 1e-3 && (c - k.upper()[i]).abs() >= 1e-3 {
                    break c;
                }
            });
            let j = normal_map_jacobian_element(&p, &v, BoundaryRule::One)
                .map_err(|e| e.to_string())?;
            let mut fd = Matrix::zeros(m, m);
            for c in 0..m {
                let h = 1e-6 * (1.0 + v[c].abs());
                let mut plus = v.clone();
                let mut minus = v.clone();
                plus[c] += h;
                minus[c] -= h;
                let col = (normal_map(&p, &plus).unwrap().r - normal_map(&p, &minus).unwrap().r)
                    / (2.0 * h);
                fd.set_column(c, &col);
            }
            let err = (j - fd).amax();
            worst = worst.max(err);
            ensure(err <= 1e-5, format!("{id} at {v}: error {err:e}"))?;
        }
    }
    Ok(format!("250 points over 5 problems, max error {worst:.1e}"))
}

fn ac6() -> Check {
    let mut slopes = Vec::new();
    for m in [2, 5, 10] {
        let p = VIProblem::new(Mapping::identity(m), BoxSet::full(m), "id").unwrap();
        let probe = coercivity_probe(&p, &ProbeConfig::default());
        ensure(
            probe.verdict == ProbeVerdict::CoerciveEvidence,
            format!("identity m={m}: {:?}", probe.verdict),
        )?;
        for ray in &probe.rays {
            let s = ray.slope.unwrap_or(f64::NAN);
            ensure(
                (s - 1.0).abs() <= 0.01,
                format!("identity m={m}: slope {s}"),
            )?;
            slopes.push(s);
        }
        let c = VIProblem::new(
            Mapping::constant(Vector::from_element(m, 1.0)),
            BoxSet::full(m),
            "c",
        )
        .unwrap();
        let probe = coercivity_probe(&c, &ProbeConfig::default());
        ensure(
            probe
                .rays
                .iter()
                .all(|r| r.verdict == ProbeVerdict::ViolationWitness),
            format!("constant m={m}: not every ray is a violation"),
        )?;
        ensure(
            coercivity_certificate(&c, &ProbeConfig::default()).verdict == Verdict::Fail,
            "constant certificate did not fail",
        )?;
    }
    let lo = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(format!(
        "identity slopes in [{lo:.6}, {hi:.6}]; constant violates on every ray"
    ))
}

fn ac7() -> Check {
    let k = BoxSet::uniform(3, 0.0, 1.0).unwrap();
    let p = VIProblem::new(Mapping::identity(3), k.clone(), "id").unwrap();
    let s = SampleSet::boundary_mix(&k, 30, 7, 10.0);
    let r =
        maximal_rank_tsearch(&p, &s, &RankSearchConfig::default()).map_err(|e| e.to_string())?;
    ensure(
        r.verdict == Verdict::Pass,
        format!("identity: {:?}", r.verdict),
    )?;
    ensure(
        r.evidence_value("t") == Some(1.0),
        format!("accepted t = {:?}", r.evidence_value("t")),
    )?;
    ensure(r.margin >= 1e-8, format!("margin {}", r.margin))?;
    // the full grid includes the beta = 1 drop-coordinate vertices
    let family = convg_hull_sample(3, &BETA_GRID, 16, 7);
    for i in 0..3 {
        let mut alpha = vec![0.0; 3];
        alpha[i] = 1.0;
        let vertex = ConvexHullPoint::new(1.0, alpha.clone());
        ensure(
            family.iter().any(|f| f.beta == 1.0 && f.alpha == alpha),
            format!("vertex e_{i} missing from the grid"),
        )?;
        let s = sigma_min(&family_matrix(&Matrix::identity(3, 3), &vertex, 1.0));
        ensure(s >= 1e-8, format!("vertex e_{i}: sigma {s}"))?;
    }
    let min_family = family
        .iter()
        .map(|f| sigma_min(&family_matrix(&Matrix::identity(3, 3), f, 1.0)))
        .fold(f64::INFINITY, f64::min);
    ensure(min_family >= 1e-8, format!("family sigma {min_family}"))?;

    let vi = lookup("example-vi").unwrap().def.to_vi().unwrap();
    let r = maximal_rank_tsearch(
        &vi,
        &SampleSet::uniform(vi.set(), 20, 7, 10.0),
        &RankSearchConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Pass, "example-vi did not pass")?;
    ensure(
        r.notes.iter().any(|n| n.contains("whole space")),
        "example-vi did not take the full-space path",
    )?;
    Ok(format!(
        "identity passes at t = 1, min family sigma {min_family}; example-vi full-space pass"
    ))
}

fn ac8() -> Check {
    let mut count = 0;
    for e in registry() {
        let p = e.def.to_vi().unwrap();
        let k = p.set();
        for res in multistart(&p, &SolveConfig::default(), 4, 8).map_err(|e| e.to_string())? {
            if !res.solved() {
                continue;
            }
            let x = &res.x;
            let f = p.evaluate(x).unwrap();
            let floor = -1e-8 * (1.0 + f.norm());
            let mut rng = ChaCha8Rng::seed_from_u64(count);
            for _ in 0..1000 {
                let z = Vector::from_fn(x.len(), |i, _| {
                    rng.random_range(
                        k.lower()[i].max(x[i] - 100.0)..=k.upper()[i].min(x[i] + 100.0),
                    )
                });
                let gap = f.dot(&(&z - x));
                ensure(gap >= floor, format!("{}: <F(x*), z - x*> = {gap:e}", e.id))?;
            }
            count += 1;
        }
    }
    Ok(format!("{count} solved results, 1000 feasible points each"))
}

fn ac9() -> Check {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_vicert"))
            .args(["certify", "example-game", "--seed", "7"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(!a.stdout.is_empty(), "empty report")?;
    ensure(a.stdout == b.stdout, "reports differ")?;
    ensure(a.status.code() == b.status.code(), "exit codes differ")?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("AC1", "example VI: single solution at the origin", ac1),
        ("AC2", "example game: nash with PL moduli 2", ac2),
        ("AC3", "example failure witnesses", ac3),
        ("AC4", "P-matrix oracle agrees with minors", ac4),
        ("AC5", "normal-map Jacobian matches finite differences", ac5),
        ("AC6", "coercivity probe calibration", ac6),
        ("AC7", "maximal-rank t-search sanity", ac7),
        ("AC8", "solutions satisfy the VI inequality", ac8),
        ("AC9", "certify is byte-for-byte deterministic", ac9),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        match check() {
            Ok(detail) => println!("[PASS] {id} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
