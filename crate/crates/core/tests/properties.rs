use num_traits::Zero;
use proptest::prelude::*;

use slm_core::arrangement::{characteristic_polynomial, enumerate_regions, Arrangement, SignVector};
use slm_core::degeneration::tropical_predictions;
use slm_core::dpp::{cauchy_binet_residual, dpp_probabilities};
use slm_core::geometry::{chamber_arrangement, lognormal_polytope, swap_candidates};
use slm_core::json::{rational_from_json, rationals_to_json};
use slm_core::linalg::Matrix;
use slm_core::mle::{likelihood_matrix, solve_all, SolveOptions};
use slm_core::model::{evaluate, SquaredLinearModel};
use slm_core::scalar::int;
use slm_core::{catalog, Rational};

/// Essential arrangements without parallel rows, from small integer rows.
fn arrangement(d: usize, max_n: usize) -> impl Strategy<Value = Arrangement> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, d), d + 1..=max_n).prop_filter_map("degenerate", |rows| {
        let rows: Vec<Vec<Rational>> = rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect();
        let arr = Arrangement::from_rows(rows).ok()?;
        let (arr, _) = arr.dedup_parallel();
        (arr.rank() == arr.d() && arr.n() > arr.d()).then_some(arr)
    })
}

fn any_arrangement() -> impl Strategy<Value = Arrangement> {
    prop_oneof![arrangement(2, 6), arrangement(3, 6)]
}

fn generic_model() -> impl Strategy<Value = SquaredLinearModel> {
    (2usize..=3, 1usize..=3, any::<u64>()).prop_map(|(d, extra, seed)| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        SquaredLinearModel::new(catalog::random_generic(d, d + extra, 7, &mut rng)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn regions_match_zaslavsky(arr in any_arrangement()) {
        let chi = characteristic_polynomial(&arr).unwrap();
        let regions = enumerate_regions(&arr).unwrap();
        prop_assert_eq!(regions.len() as i64, chi.eval(-1).abs() / 2);
        prop_assert_eq!(chi.eval(1), 0);
        for r in &regions {
            prop_assert!(r.verify(&arr));
            prop_assert_eq!(r.sign.signs()[0], 1);
        }
        let mut signs: Vec<&SignVector> = regions.iter().map(|r| &r.sign).collect();
        signs.sort();
        signs.dedup();
        prop_assert_eq!(signs.len(), regions.len());
    }

    #[test]
    fn charpoly_ignores_scaling_and_order(arr in any_arrangement(), scales in prop::collection::vec(1i64..5, 6), rot in 0usize..6) {
        let chi = characteristic_polynomial(&arr).unwrap();
        let n = arr.n();
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let src = (i + rot) % n;
                let sign = if scales[i] % 2 == 0 { -1 } else { 1 };
                arr.row(src).iter().map(|v| v * int(sign * scales[i])).collect()
            })
            .collect();
        let moved = Arrangement::from_rows(rows).unwrap();
        prop_assert_eq!(characteristic_polynomial(&moved).unwrap(), chi);
    }

    #[test]
    fn probabilities_are_projective(arr in any_arrangement(), x in prop::collection::vec(-9i64..=9, 3), lambda in 1i64..7) {
        let m = SquaredLinearModel::new(arr).unwrap();
        let x: Vec<Rational> = x[..m.d()].iter().map(|&v| int(v)).collect();
        prop_assume!(!x.iter().all(Zero::is_zero));
        let p = evaluate(&m, &x).unwrap();
        prop_assert_eq!(p.iter().fold(Rational::zero(), |a, b| a + b), int(1));
        let scaled: Vec<Rational> = x.iter().map(|v| v * int(-lambda)).collect();
        prop_assert_eq!(evaluate(&m, &scaled).unwrap(), p);
    }

    #[test]
    fn log_normal_polytope_contains_its_model_point(m in generic_model(), x in prop::collection::vec(-9i64..=9, 3)) {
        let x: Vec<Rational> = x[..m.d()].iter().map(|&v| int(v)).collect();
        let y = m.arrangement().values(&x);
        prop_assume!(y.iter().all(|v| !v.is_zero()));
        let pi = lognormal_polytope(&m, &y).unwrap();
        let q: Rational = y.iter().map(|v| v * v).sum();
        let star: Vec<Rational> = y.iter().map(|v| v * v / q.clone()).collect();
        prop_assert!(pi.contains(&star));
        for v in &pi.vertices {
            prop_assert!(pi.contains(v));
        }
        prop_assert!(pi.dim <= m.n() - m.d());
    }

    #[test]
    fn swap_candidates_stay_in_the_model(m in generic_model(), x in prop::collection::vec(-5i64..=5, 3)) {
        let x: Vec<Rational> = x[..m.d()].iter().map(|&v| int(v)).collect();
        let y = m.arrangement().values(&x);
        prop_assume!(y.iter().all(|v| !v.is_zero()));
        let own = SignVector::from_values(&y).unwrap();
        for c in swap_candidates(&m, &y).unwrap() {
            prop_assert!(m.kernel_complement().contains(&c.image));
            prop_assert_ne!(SignVector::from_values(&c.image).unwrap(), own.clone());
        }
    }

    #[test]
    fn chamber_count_before_dedup(m in generic_model()) {
        let (n, d) = (m.n() as u64, m.d() as u64);
        if let Ok(ch) = chamber_arrangement(&m) {
            let binom = (0..d - 1).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
            prop_assert_eq!(ch.raw_count() as u64, n + binom);
        }
    }

    #[test]
    fn tropical_prediction_count(m in generic_model(), w in prop::collection::vec(1i64..20, 6), anchor in 0usize..6) {
        let n = m.n();
        let mut w: Vec<Rational> = w[..n].iter().map(|&v| int(v)).collect();
        w[anchor % n] = int(0);
        let rep = tropical_predictions(&m, &w).unwrap();
        let mu = slm_core::arrangement::generic_ml_degree(m.d(), n);
        prop_assert_eq!(rep.predictions.len() as u64, mu);
        for p in &rep.predictions {
            prop_assert!(p.support.len() < m.d());
        }
    }

    #[test]
    fn cauchy_binet(k in 1usize..4, extra in 0usize..4, entries in prop::collection::vec(-1.0f64..1.0, 28)) {
        let n = k + extra;
        let theta = Matrix::from_fn(k, n, |i, j| entries[i * n + j]);
        prop_assume!(theta.rank() == k);
        prop_assume!(theta.mul(&theta.transpose()).determinant() > 1e-6);
        prop_assert!(cauchy_binet_residual(&theta) <= 1e-12);
        let dist = dpp_probabilities(&theta).unwrap();
        let total: f64 = dist.probs.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rationals_round_trip(num in -10_000i64..10_000, den in 1i64..10_000) {
        let q = Rational::new(num.into(), den.into());
        let v = rationals_to_json(std::slice::from_ref(&q));
        prop_assert_eq!(rational_from_json(&v[0]).unwrap(), q);
    }

    #[test]
    fn sign_vectors_round_trip(raw in prop::collection::vec(prop::bool::ANY, 1..10)) {
        let signs: Vec<i8> = raw.iter().map(|&b| if b { 1 } else { -1 }).collect();
        let s = SignVector::from_signs(signs).unwrap();
        prop_assert_eq!(SignVector::parse(&s.to_string()).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn one_critical_point_per_region(m in generic_model(), s in prop::collection::vec(0.05f64..1.0, 6)) {
        let s = &s[..m.n()];
        let rep = solve_all(&m, s, &SolveOptions::default()).unwrap();
        prop_assert!(rep.failures.is_empty());
        let regions = enumerate_regions(m.arrangement()).unwrap();
        prop_assert_eq!(rep.points.len(), regions.len());
        for p in &rep.points {
            prop_assert!(p.region.matches(&p.y));
            prop_assert!(likelihood_matrix(&m, s, &p.x).rank_ratio() <= 1e-7);
        }
        let best = rep.mle_point().unwrap();
        prop_assert!(rep.points.iter().all(|p| p.log_l <= best.log_l));
    }
}
