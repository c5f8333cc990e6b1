//! Invariants of tableau synthesis, analysis and stability classification.

use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use multistep::analysis::*;
use multistep::rational::{int, rat, Rational};
use multistep::stability::*;
use multistep::tableau::*;

#[test]
fn adams_weights_match_lagrange_oracle() {
    for k in 1..=8usize {
        let ab_nodes = InterpolationNodeSet::range(1, k as i64).unwrap();
        let ab = adams_bashforth(k).unwrap();
        assert_eq!(
            &ab.betas()[1..],
            lagrange_integral_oracle(&ab_nodes, 0, 1)
                .unwrap()
                .as_slice(),
            "AB({k})"
        );
        let am_nodes = InterpolationNodeSet::range(0, k as i64).unwrap();
        // AM(1) plain is backward Euler; the interpolation result is the trapezoid.
        let am = adams_moulton(k, k == 1).unwrap();
        assert_eq!(
            am.betas(),
            lagrange_integral_oracle(&am_nodes, 0, 1)
                .unwrap()
                .as_slice(),
            "AM({k})"
        );
    }
}

#[test]
fn explicitness_and_partition_of_unity() {
    for k in 1..=MAX_ADAMS_STEPS {
        let ab = adams_bashforth(k).unwrap();
        let am = adams_moulton(k, false).unwrap();
        assert!(ab.is_explicit());
        assert!(am.is_implicit());
        assert!(ab.betas().iter().sum::<Rational>().is_one(), "AB({k})");
        assert!(am.betas().iter().sum::<Rational>().is_one(), "AM({k})");
    }
    assert!(trapezoid().betas().iter().sum::<Rational>().is_one());
}

#[test]
fn polynomial_exactness_of_operator() {
    for t in builtin_tableaus() {
        let p = order_report(&t).unwrap().order as u32;
        for q in 0..=p {
            assert!(
                operator_on_monomial(&t, q).is_zero(),
                "{} on t^{q}",
                t.name()
            );
        }
        assert!(
            !operator_on_monomial(&t, p + 1).is_zero(),
            "{} on t^{}",
            t.name(),
            p + 1
        );
    }
}

#[test]
fn trapezoid_has_smallest_order_two_error_constant() {
    let trap = order_report(&trapezoid()).unwrap().error_constant.abs();
    assert_eq!(trap, rat(1, 12));
    let order_two: Vec<Tableau> = builtin_tableaus()
        .into_iter()
        .filter(|t| order_report(t).unwrap().order == 2)
        .collect();
    assert!(order_two.len() >= 4);
    for t in &order_two {
        assert!(
            order_report(t).unwrap().error_constant.abs() >= trap,
            "{}",
            t.name()
        );
    }
}

#[test]
fn family_order_claims() {
    for k in 1..=6 {
        assert_eq!(order_report(&adams_bashforth(k).unwrap()).unwrap().order, k);
        assert_eq!(order_report(&bdf(k).unwrap()).unwrap().order, k);
    }
    for k in 2..=6 {
        assert_eq!(
            order_report(&adams_moulton(k, false).unwrap())
                .unwrap()
                .order,
            k + 1
        );
    }
}

fn builtins() -> &'static [Tableau] {
    static CACHE: OnceLock<Vec<Tableau>> = OnceLock::new();
    CACHE.get_or_init(builtin_tableaus)
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-8i64..=8, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

/// Random tableaus, with the consistency conditions enforced on part of the sample.
fn tableau_strategy() -> impl Strategy<Value = Tableau> {
    (1usize..=5, any::<bool>(), any::<bool>())
        .prop_flat_map(|(k, fix_sum, fix_slope)| {
            (
                prop::collection::vec(small_rational(), k + 1),
                prop::collection::vec(small_rational(), k + 1),
                Just((k, fix_sum, fix_slope)),
            )
        })
        .prop_filter_map("overstated k", |(mut a, mut b, (k, fix_sum, fix_slope))| {
            a[0] = int(1);
            if fix_sum {
                let rest: Rational = a[..k].iter().sum();
                a[k] = -rest;
            }
            if fix_slope {
                let w: Rational = a.iter().enumerate().map(|(j, x)| x * int(j as i64)).sum();
                let rest: Rational = b[..k].iter().sum();
                b[k] = -(w + rest);
            }
            custom_tableau(a, b).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn consistency_criteria_coincide(t in tableau_strategy()) {
        let sums = consistency_by_sums(&t);
        prop_assert_eq!(sums, consistency_by_polys(&t));
        prop_assert_eq!(sums, order_report(&t).map(|r| r.consistent).unwrap_or(true));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tableau_text_round_trip(t in tableau_strategy()) {
        let back = Tableau::parse(&t.to_text()).unwrap();
        prop_assert_eq!(back.alphas(), t.alphas());
        prop_assert_eq!(back.betas(), t.betas());
    }

    #[test]
    fn region_is_conjugate_symmetric(idx in 0usize..34, re in -6.0f64..2.0, im in -4.0f64..4.0) {
        let t = &builtins()[idx];
        let z = Complex64::new(re, im);
        let radius = amplification_radius(t, z).unwrap();
        // Points on the boundary itself may legitimately flip on rounding.
        prop_assume!((radius - 1.0).abs() > 1e-6);
        prop_assert_eq!(
            in_stability_region(t, z).unwrap(),
            in_stability_region(t, z.conj()).unwrap()
        );
    }
}

fn recurrence_bounded(t: &Tableau, seed: u64) -> bool {
    let alphas = t.alphas_f64();
    let k = t.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..100).all(|_| {
        let mut y: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        for _ in 0..10_000 {
            let n = y.len();
            let next = -(1..=k).map(|j| alphas[j] * y[n - j]).sum::<f64>();
            if next.is_nan() || next.abs() >= 1e3 {
                return false;
            }
            y.push(next);
        }
        true
    })
}

#[test]
fn root_condition_matches_recurrence_boundedness() {
    let mut tableaus = builtin_tableaus();
    // rho = (x - 1)^2 and rho = (x - 1)(x + 1.5): unstable custom cases.
    tableaus
        .push(custom_tableau(vec![int(1), int(-2), int(1)], vec![int(0), int(1), int(0)]).unwrap());
    tableaus.push(
        custom_tableau(
            vec![int(1), rat(1, 2), rat(-3, 2)],
            vec![int(0), int(1), int(0)],
        )
        .unwrap(),
    );
    for (i, t) in tableaus.iter().enumerate() {
        let verdict = zero_stability(t).unwrap();
        assert_eq!(
            recurrence_bounded(t, i as u64),
            verdict.class.is_stable(),
            "{}: {verdict}",
            t.name()
        );
    }
}

#[test]
fn bdf_beyond_six_is_zero_unstable() {
    for k in 1..=6 {
        assert_eq!(
            zero_stability(&bdf(k).unwrap()).unwrap().class,
            ZeroStabilityClass::StronglyStable
        );
    }
    for k in 7..=8 {
        assert_eq!(
            zero_stability(&bdf(k).unwrap()).unwrap().class,
            ZeroStabilityClass::Unstable
        );
    }
}

#[test]
fn origin_membership_equals_zero_stability() {
    for t in builtin_tableaus() {
        assert_eq!(
            in_stability_region(&t, Complex64::new(0.0, 0.0)).unwrap(),
            zero_stability(&t).unwrap().class.is_stable(),
            "{}",
            t.name()
        );
    }
}

#[test]
fn boundary_locus_points_have_unit_roots() {
    for t in builtin_tableaus() {
        for p in boundary_locus(&t, 64).unwrap() {
            let Some(z) = p.z else { continue };
            if z.norm() > 1e6 {
                continue;
            }
            let roots = poly_roots(&stability_polynomial(&t, z)).unwrap();
            let closest = roots
                .roots()
                .iter()
                .map(|r| (r.norm() - 1.0).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(
                closest <= 1e-6,
                "{} theta = {}: {closest}",
                t.name(),
                p.theta
            );
        }
    }
}

#[test]
fn stiff_decay_drives_roots_to_zero() {
    let stiff: Vec<Tableau> = builtin_tableaus()
        .into_iter()
        .filter(|t| has_stiff_decay(t).unwrap())
        .collect();
    let names: Vec<&str> = stiff.iter().map(Tableau::name).collect();
    assert!(names.contains(&"AM(1)/backward-Euler"));
    for t in &stiff {
        let radius = |z: f64| amplification_radius(t, Complex64::new(z, 0.0)).unwrap();
        // The 0.01 bound at z = -1e6 holds up to k = 3; roots decay like |z|^(-1/k).
        if t.k() <= 3 {
            assert!(radius(-1e6) < 0.01, "{}: {}", t.name(), radius(-1e6));
        }
        assert!(
            radius(-1e9) < radius(-1e6) && radius(-1e12) < radius(-1e9),
            "{}",
            t.name()
        );
        let scaled = radius(-1e12) * 1e12f64.powf(1.0 / t.k() as f64);
        assert!(scaled < 10.0, "{}: {scaled}", t.name());
    }
}

#[test]
fn explicit_methods_never_a_stable() {
    for t in builtin_tableaus().into_iter().filter(Tableau::is_explicit) {
        assert!(
            is_a_stable_sampled(&t, 1000, 1)
                .unwrap()
                .is_counterexample(),
            "{}",
            t.name()
        );
    }
}

#[test]
fn a_stability_sampling_is_deterministic() {
    let t = bdf(4).unwrap();
    assert_eq!(
        is_a_stable_sampled(&t, 5000, 42).unwrap(),
        is_a_stable_sampled(&t, 5000, 42).unwrap()
    );
}

#[test]
fn synthesis_is_reproducible() {
    assert_eq!(builtin_tableaus(), builtin_tableaus());
    assert_eq!(bdf(8).unwrap(), bdf(8).unwrap());
    assert!(!bdf(8).unwrap().alphas()[8].is_zero());
}
