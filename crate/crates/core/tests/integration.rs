//! Integration invariants: polynomial exactness, linearity, stability coherence.

use num_complex::Complex64;

use multistep::analysis::order_report;
use multistep::integrate::*;
use multistep::problems::*;
use multistep::stability::{amplification_radius, in_stability_region};
use multistep::tableau::*;

#[test]
fn exact_on_polynomials_up_to_order() {
    for t in builtin_tableaus() {
        if !multistep::stability::zero_stability(&t)
            .unwrap()
            .class
            .is_stable()
        {
            continue;
        }
        let p = order_report(&t).unwrap().order;
        for degree in 0..=p.min(MAX_POLYNOMIAL_DEGREE) {
            let prob = polynomial_problem(degree).unwrap();
            let cfg = SolveConfig::new(0.01, 1.0).with_starter(Starter::Exact);
            let traj = solve_fixed_step(&t, &prob, &cfg).unwrap();
            assert_eq!(traj.len(), 101);
            let err = traj.final_error(&prob).unwrap();
            assert!(err < 1e-10, "{} degree {degree}: {err:e}", t.name());
        }
    }
}

#[test]
fn degree_ten_is_not_exact_for_lower_orders() {
    let prob = polynomial_problem(10).unwrap();
    for t in builtin_tableaus() {
        let p = order_report(&t).unwrap().order;
        if p >= 10
            || !multistep::stability::zero_stability(&t)
                .unwrap()
                .class
                .is_stable()
        {
            continue;
        }
        let cfg = SolveConfig::new(0.1, 2.0).with_starter(Starter::Exact);
        let err = solve_fixed_step(&t, &prob, &cfg)
            .unwrap()
            .final_error(&prob)
            .unwrap();
        assert!(err > 1e-10, "{}: {err:e}", t.name());
    }
}

fn scaled_dahlquist(lambda: f64, y0: f64) -> IVProblem {
    IVProblem::new("scaled", 0.0, vec![y0], move |_, y| vec![lambda * y[0]])
}

#[test]
fn linearity_in_initial_value() {
    for t in builtin_tableaus().into_iter().filter(Tableau::is_explicit) {
        let cfg = SolveConfig::new(0.05, 2.0);
        let base = solve_fixed_step(&t, &scaled_dahlquist(-0.8, 1.0), &cfg).unwrap();
        // Scaling by a power of two commutes with every rounding step.
        let doubled = solve_fixed_step(&t, &scaled_dahlquist(-0.8, -4.0), &cfg).unwrap();
        for (a, b) in base.states.iter().zip(&doubled.states) {
            assert_eq!(b[0], -4.0 * a[0], "{}", t.name());
        }
        // Outside the region, parasitic roots amplify rounding exponentially.
        if !in_stability_region(&t, Complex64::new(-0.8 * 0.05, 0.0)).unwrap() {
            continue;
        }
        let c = -3.7;
        let scaled = solve_fixed_step(&t, &scaled_dahlquist(-0.8, c), &cfg).unwrap();
        for (a, b) in base.states.iter().zip(&scaled.states) {
            let want = c * a[0];
            assert!(
                (b[0] - want).abs() <= 1e-13 * want.abs(),
                "{} {:e} vs {want:e}",
                t.name(),
                b[0]
            );
        }
    }
}

#[test]
fn region_membership_predicts_long_run_behavior() {
    let methods = [
        forward_euler(),
        adams_bashforth(2).unwrap(),
        adams_bashforth(3).unwrap(),
        trapezoid(),
        adams_moulton(3, false).unwrap(),
        bdf(2).unwrap(),
        bdf(4).unwrap(),
    ];
    let zs = [
        Complex64::new(-0.3, 0.0),
        Complex64::new(-0.5, 0.4),
        Complex64::new(-1.2, 0.0),
        Complex64::new(-2.5, 0.0),
        Complex64::new(-4.0, 1.0),
        Complex64::new(0.5, 0.0),
    ];
    let h = 0.01;
    for t in &methods {
        for &z in &zs {
            let radius = amplification_radius(t, z).unwrap();
            if (radius - 1.0).abs() < 1e-3 {
                continue;
            }
            let lambda = z / h;
            let prob = dahlquist_complex(lambda);
            let cfg = SolveConfig::new(h, 1000.0 * h).with_starter(Starter::Exact);
            let traj = solve_fixed_step(t, &prob, &cfg).unwrap();
            let mags: Vec<f64> = traj.states.iter().map(|y| y[0].hypot(y[1])).collect();
            let half = mags.len() / 2;
            let first = mags[..half].iter().cloned().fold(0.0, f64::max);
            let last = mags[half..].iter().cloned().fold(0.0, f64::max);
            if in_stability_region(t, z).unwrap() {
                assert!(
                    last <= first + 1e-9,
                    "{} z = {z}: {first} -> {last}",
                    t.name()
                );
            } else if z.im == 0.0 {
                assert!(traj.meta.diverged || last > first, "{} z = {z}", t.name());
            }
        }
    }
}

#[test]
fn stiff_step_ratios() {
    let p = dahlquist(-1e6);
    let cfg = SolveConfig::new(1.0, 1.0);
    let be = solve_fixed_step(&backward_euler(), &p, &cfg).unwrap();
    assert!((be.states[1][0] / be.states[0][0]).abs() <= 1e-5);
    let tr = solve_fixed_step(&trapezoid(), &p, &cfg).unwrap();
    assert!((tr.states[1][0] / tr.states[0][0]).abs() >= 0.99);
}

#[test]
fn bdf2_newton_on_stiff_problem() {
    let p = dahlquist(-1e4);
    let cfg = SolveConfig::new(0.1, 5.0).with_starter(Starter::Exact);
    let traj = solve_fixed_step(&bdf(2).unwrap(), &p, &cfg).unwrap();
    assert!(traj.meta.newton_iterations.iter().all(|&n| n <= 5));
    assert!(traj.final_state()[0].abs() < 1e-3);
}

#[test]
fn bdf_beats_trapezoid_on_stiff_relaxation() {
    // Stiff transient plus smooth forcing: only stiff decay damps the transient
    // at a step far above 1/|lambda|.
    let p = stiff_relaxation(-1e4, 2.0).unwrap();
    let cfg = SolveConfig::new(0.05, 1.0).with_starter(Starter::Rk4);
    let err = |t: &Tableau| {
        solve_fixed_step(t, &p, &cfg)
            .unwrap()
            .final_error(&p)
            .unwrap()
    };
    let be = err(&backward_euler());
    let tr = err(&trapezoid());
    assert!(be < 1e-2, "BE {be}");
    assert!(tr > 10.0 * be, "trapezoid {tr} vs BE {be}");
}

#[test]
fn rk4_starter_keeps_high_order() {
    let p = dahlquist(-1.0);
    let hs: Vec<f64> = (0..4).map(|m| 0.1 / 2f64.powi(m)).collect();
    let base = SolveConfig::new(hs[0], 1.0).with_starter(Starter::Rk4);
    let r = observed_order(&bdf(5).unwrap(), &p, &base, &hs).unwrap();
    assert!((r.slope - 5.0).abs() < 0.4, "{}", r.slope);
    let r = observed_order(&adams_bashforth(4).unwrap(), &p, &base, &hs).unwrap();
    assert!((r.slope - 4.0).abs() < 0.3, "{}", r.slope);
}

#[test]
fn complex_dahlquist_matches_scalar_recurrence() {
    let lambda = Complex64::new(-1.0, 3.0);
    let h = 0.01;
    let p = dahlquist_complex(lambda);
    let traj = solve_fixed_step(&forward_euler(), &p, &SolveConfig::new(h, 0.5)).unwrap();
    let amp = Complex64::new(1.0, 0.0) + lambda * h;
    for (n, y) in traj.states.iter().enumerate() {
        let want = amp.powu(n as u32);
        assert!((y[0] - want.re).abs() < 1e-12 && (y[1] - want.im).abs() < 1e-12);
    }
}
