use super::*;
use crate::linalg::{dist2_sq, dot};
use crate::metrics::simplex_duality_gap;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quadratic_f() -> SmoothFunction {
    SmoothFunction::new(
        |x: &[f64]| 0.5 * dot(x, x),
        |x: &[f64], g: &mut [f64]| g.copy_from_slice(x),
        1.0,
    )
}

fn linear_constraint(coef: Vec<f64>, c: f64) -> SmoothFunction {
    let c2 = coef.clone();
    SmoothFunction::new(move |x: &[f64]| c + dot(&coef, x), move |_x: &[f64], g: &mut [f64]| g.copy_from_slice(&c2), 0.0)
}

fn example_nonbilinear() -> VIProblem {
    make_nonbilinear_constrained(
        quadratic_f(),
        vec![linear_constraint(vec![-1.0, 0.0], 1.0)],
        vec![-5.0; 2],
        vec![5.0; 2],
    )
    .unwrap()
}

#[test]
fn known_game_solutions() {
    let p = make_matrix_game(
        Arc::new(generators::matching_pennies()),
        Geometry::Euclidean,
        OracleScheme::FixedRowColNorms,
    )
    .unwrap();
    assert_eq!(p.known_solution, Some(Point::uniform(2, 2)));
    let rps = make_matrix_game(
        Arc::new(generators::rock_paper_scissors()),
        Geometry::EntropicSimplex { n: 3, m: 3 },
        OracleScheme::VariableEntropic,
    )
    .unwrap();
    let s = rps.known_solution.clone().unwrap();
    assert_eq!(s, Point::uniform(3, 3));
    assert!(simplex_duality_gap(rps.game().unwrap(), &s).unwrap() <= 1e-12);
    let a = make_matrix_game(
        Arc::new(generators::gaussian(3, 4, 1).unwrap()),
        Geometry::Euclidean,
        OracleScheme::VariableEuclidean,
    )
    .unwrap();
    assert!(a.known_solution.is_none());
}

#[test]
fn game_pairing_errors() {
    let a = Arc::new(generators::matching_pennies());
    let ent = Geometry::EntropicSimplex { n: 2, m: 2 };
    for s in [OracleScheme::FixedRowColNorms, OracleScheme::VariableEuclidean] {
        assert!(matches!(make_matrix_game(a.clone(), ent, s), Err(VrviError::Config(_))));
    }
    assert!(make_matrix_game(a.clone(), Geometry::Euclidean, OracleScheme::VariableEntropic).is_err());
    assert!(make_matrix_game(a.clone(), ent, OracleScheme::Exact).is_ok());
    assert!(make_matrix_game(a, Geometry::EntropicSimplex { n: 3, m: 2 }, OracleScheme::Exact).is_err());
}

#[test]
fn operator_lipschitz_by_geometry() {
    let a = Arc::new(generators::gaussian(3, 5, 2).unwrap());
    let e = make_matrix_game(a.clone(), Geometry::Euclidean, OracleScheme::FixedRowColNorms).unwrap();
    assert_eq!(e.operator_lipschitz(), a.spectral_norm());
    let h = make_matrix_game(a.clone(), Geometry::EntropicSimplex { n: 5, m: 3 }, OracleScheme::VariableEntropic)
        .unwrap();
    assert_eq!(h.operator_lipschitz(), a.max_norm());
}

#[test]
fn policeman_examples() {
    let g = generators::policeman_burglar(6, 3).unwrap();
    let n = 6;
    let step = 1.0 - (-generators::POLICEMAN_THETA).exp();
    let w: Vec<f64> = (0..n).map(|i| g.get(i, if i == 0 { 1 } else { i - 1 }) / step).collect();
    for (i, wi) in w.iter().enumerate() {
        assert_eq!(g.get(i, i), 0.0);
        for j in 0..n {
            let r = g.get(i, j) / wi;
            assert!((0.0..1.0).contains(&r));
        }
        for j in i + 1..n - 1 {
            assert!(g.get(i, j + 1) >= g.get(i, j));
        }
    }
    assert_eq!(g.dense(), generators::policeman_burglar(6, 3).unwrap().dense());
    assert_ne!(g.dense(), generators::policeman_burglar(6, 4).unwrap().dense());
    assert!(generators::policeman_burglar(1, 0).is_err());
}

#[test]
fn nemirovski_examples() {
    let g = generators::nemirovski_test(2, 1, 0).unwrap();
    let want = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0];
    for (a, b) in g.dense().iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
    for fam in [1, 2] {
        let g = generators::nemirovski_test(7, fam, 0).unwrap();
        assert!(g.dense().iter().all(|v| (0.0..=1.0).contains(v)));
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(g.get(i, j), g.get(j, i));
            }
        }
    }
    assert!(generators::nemirovski_test(4, 3, 0).is_err());
}

#[test]
fn lin_constrained_quadratic_solution() {
    let xhat = vec![0.5, -1.0, 2.0];
    let eye = Arc::new(MatrixGame::from_dense(3, 3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap());
    let p = make_lin_constrained(
        BlockFunction::HalfSquaredDistance { center: xhat.clone() },
        eye,
        xhat.clone(),
        OracleScheme::FixedRowColNorms,
    )
    .unwrap();
    let sol = Point::new(&xhat, &[0.0; 3]).unwrap();
    assert!(p.natural_residual(&sol).unwrap() <= 1e-15);
    assert!(p.natural_residual(&p.z0).unwrap() > 0.1);
    assert_eq!(p.z0, Point::zeros(3, 3));
    let bad = make_lin_constrained(
        BlockFunction::Zero,
        Arc::new(generators::gaussian(2, 3, 0).unwrap()),
        vec![0.0; 3],
        OracleScheme::FixedRowColNorms,
    );
    assert!(matches!(bad, Err(VrviError::Dimension { .. })));
}

#[test]
fn nonbilinear_kkt_example() {
    let p = example_nonbilinear();
    let sol = Point::new(&[1.0, 0.0], &[1.0]).unwrap();
    assert!(p.natural_residual(&sol).unwrap() <= 1e-15);
    let off = Point::new(&[0.9, 0.0], &[1.0]).unwrap();
    assert!(p.natural_residual(&off).unwrap() > 1e-3);
}

#[test]
fn nonbilinear_inactive_constraint() {
    let p = make_nonbilinear_constrained(
        SmoothFunction::new(
            |x: &[f64]| 0.5 * ((x[0] - 0.3).powi(2) + (x[1] + 0.2).powi(2)),
            |x: &[f64], g: &mut [f64]| {
                g[0] = x[0] - 0.3;
                g[1] = x[1] + 0.2;
            },
            1.0,
        ),
        vec![linear_constraint(vec![0.0, 0.0], -1.0)],
        vec![-1.0; 2],
        vec![1.0; 2],
    )
    .unwrap();
    let sol = Point::new(&[0.3, -0.2], &[0.0]).unwrap();
    assert!(p.natural_residual(&sol).unwrap() <= 1e-15);
}

#[test]
fn nonbilinear_oracle_unbiased_and_declared_bounds() {
    let p = make_nonbilinear_constrained(
        quadratic_f(),
        vec![linear_constraint(vec![-1.0, 0.0], 1.0), linear_constraint(vec![0.5, 1.0], -2.0)],
        vec![-5.0; 2],
        vec![5.0; 2],
    )
    .unwrap();
    let z = Point::new(&[0.4, -0.3], &[0.7, 1.2]).unwrap();
    assert!(crate::oracle::verify_unbiased(&p.oracle, &z, None).unwrap() <= 1e-12);
    let f = p.oracle.full(&z).unwrap();
    // grad f + sum y_i grad h_i, then -h(x).
    let want = [0.4 - 0.7 + 0.6, -0.3 + 1.2, -(1.0 - 0.4), -(0.2 - 0.3 - 2.0)];
    for (a, b) in f.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
    match p.oracle.source() {
        Source::Sum(s) => assert_eq!(s.lipschitz(), &[0.5, 0.5]),
        _ => unreachable!(),
    }
}

#[test]
fn nonbilinear_requires_gradients() {
    let mut f = quadratic_f();
    f.gradient = None;
    let r = make_nonbilinear_constrained(f, vec![linear_constraint(vec![1.0], 0.0)], vec![-1.0], vec![1.0]);
    assert!(matches!(r, Err(VrviError::Config(_))));
    let mut h = linear_constraint(vec![1.0], 0.0);
    h.gradient = None;
    let r = make_nonbilinear_constrained(quadratic_f(), vec![h], vec![-1.0], vec![1.0]);
    assert!(matches!(r, Err(VrviError::Config(_))));
}

#[test]
fn nonbilinear_operator_is_monotone_on_random_segments() {
    let sq = SmoothFunction::new(
        |x: &[f64]| x[0] * x[0] + x[1] * x[1] - 1.0,
        |x: &[f64], g: &mut [f64]| {
            g[0] = 2.0 * x[0];
            g[1] = 2.0 * x[1];
        },
        2.0,
    );
    let p = make_nonbilinear_constrained(
        quadratic_f(),
        vec![sq, linear_constraint(vec![1.0, 1.0], -0.5)],
        vec![-2.0; 2],
        vec![2.0; 2],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let mk = |rng: &mut ChaCha8Rng| {
            Point::new(
                &[rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
                &[rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)],
            )
            .unwrap()
        };
        let (u, v) = (mk(&mut rng), mk(&mut rng));
        let (fu, fv) = (p.oracle.full(&u).unwrap(), p.oracle.full(&v).unwrap());
        let df: Vec<f64> = fu.iter().zip(&fv).map(|(a, b)| a - b).collect();
        let dz: Vec<f64> = u.as_slice().iter().zip(v.as_slice()).map(|(a, b)| a - b).collect();
        assert!(dot(&df, &dz) >= -1e-9);
    }
}

#[test]
fn strongly_convex_instance() {
    let p = make_strongly_convex(4, 0.5, 2.0, Point::new(&[1.0; 4], &[-1.0; 4]).unwrap()).unwrap();
    assert_eq!(p.known_solution, Some(Point::zeros(4, 4)));
    assert!(p.natural_residual(&Point::zeros(4, 4)).unwrap() <= 1e-15);
    let a = p.game().unwrap();
    assert!((a.spectral_norm() - 2.0).abs() < 1e-6);
    assert_eq!(p.g.strong_convexity(), 0.5);
    assert!(make_strongly_convex(3, 0.5, 1.0, Point::zeros(3, 3)).is_err());
}

#[test]
fn with_scheme_and_start() {
    let p = make_matrix_game(
        Arc::new(generators::gaussian(3, 3, 4).unwrap()),
        Geometry::Euclidean,
        OracleScheme::FixedRowColNorms,
    )
    .unwrap();
    let q = p.with_scheme(OracleScheme::Exact).unwrap();
    assert_eq!(q.oracle.scheme(), OracleScheme::Exact);
    assert!(p.clone().with_start(Point::new(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap()).is_ok());
    assert!(matches!(
        p.clone().with_start(Point::new(&[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap()),
        Err(VrviError::Domain(_))
    ));
    assert!(p.with_start(Point::zeros(2, 3)).is_err());
    let e = make_matrix_game(
        Arc::new(generators::matching_pennies()),
        Geometry::EntropicSimplex { n: 2, m: 2 },
        OracleScheme::VariableEntropic,
    )
    .unwrap();
    assert!(e.with_start(Point::new(&[1.0, 0.0], &[0.5, 0.5]).unwrap()).is_err());
}

#[test]
fn natural_residual_zero_at_game_equilibrium() {
    let p = make_matrix_game(
        Arc::new(generators::rock_paper_scissors()),
        Geometry::Euclidean,
        OracleScheme::FixedRowColNorms,
    )
    .unwrap();
    assert!(p.natural_residual(&Point::uniform(3, 3)).unwrap() <= 1e-15);
    let v = Point::new(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
    assert!(dist2_sq(v.as_slice(), p.z0.as_slice()) > 0.0);
    assert!(p.natural_residual(&v).unwrap() > 0.1);
}

#[test]
fn planted_sum_solution_and_monotonicity() {
    let p = make_planted_simplex_sum(3, 2, 3, 7).unwrap();
    let s = p.known_solution.clone().unwrap();
    assert!(p.oracle.full(&s).unwrap().iter().all(|v| v.abs() < 1e-14));
    assert!(p.natural_residual(&s).unwrap() < 1e-14);
    assert!(p.natural_residual(&p.z0).unwrap() > 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let u: Vec<f64> = (0..5).map(|_| rng.random::<f64>()).collect();
        let v: Vec<f64> = (0..5).map(|_| rng.random::<f64>()).collect();
        let (pu, pv) = (Point::from_vec(u.clone(), 3).unwrap(), Point::from_vec(v.clone(), 3).unwrap());
        let df: Vec<f64> = p.oracle.full(&pu).unwrap().iter().zip(p.oracle.full(&pv).unwrap()).map(|(a, b)| a - b).collect();
        let dz: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
        assert!(dot(&df, &dz) >= -1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prop_generated_games_are_consistent(seed in any::<u64>(), n in 2usize..12) {
        for g in [
            generators::policeman_burglar(n, seed).unwrap(),
            generators::nemirovski_test(n, 1, seed).unwrap(),
            generators::nemirovski_test(n, 2, seed).unwrap(),
            generators::gaussian(n, n + 1, seed).unwrap(),
        ] {
            prop_assert!(g.max_norm() <= g.spectral_norm() * (1.0 + 1e-6));
            prop_assert!(g.spectral_norm() <= g.frobenius_norm() * (1.0 + 1e-9));
            let scan = g.dense().iter().filter(|a| **a != 0.0).count();
            prop_assert_eq!(scan, g.nnz());
        }
        let a = generators::policeman_burglar(n, seed).unwrap();
        let b = generators::policeman_burglar(n, seed).unwrap();
        prop_assert_eq!(a.fingerprint(), b.fingerprint());
    }
}
