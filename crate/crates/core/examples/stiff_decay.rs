//! Stiff decay: BDF damps a fast transient that the trapezoid rule keeps alive.
//!
//! ```text
//! cargo run --release --example stiff_decay
//! ```

use num_complex::Complex64;

use multistep::integrate::{solve_fixed_step, SolveConfig, Starter};
use multistep::problems::{dahlquist, stiff_relaxation};
use multistep::stability::{amplification_radius, has_stiff_decay};
use multistep::tableau::{backward_euler, bdf, trapezoid};
use multistep::Result;

fn main() -> Result<()> {
    let methods = [backward_euler(), trapezoid(), bdf(2)?, bdf(4)?];

    println!(
        "{:<22} {:>11} {:>14}",
        "method", "stiff decay", "radius(-1e6)"
    );
    for t in &methods {
        let r = amplification_radius(t, Complex64::new(-1e6, 0.0))?;
        println!("{:<22} {:>11} {:>14.3e}", t.name(), has_stiff_decay(t)?, r);
    }

    let p = dahlquist(-1e6);
    let cfg = SolveConfig::new(1.0, 1.0).with_starter(Starter::Exact);
    for t in &methods[..2] {
        let y = solve_fixed_step(t, &p, &cfg)?;
        println!(
            "{} on lambda = -1e6, h = 1: y1/y0 = {:.3e}",
            t.name(),
            y.states[1][0] / y.states[0][0]
        );
    }

    // An RK4 starter at h * lambda = -500 would dominate the error.
    let p = stiff_relaxation(-1e4, 2.0)?;
    let cfg = SolveConfig::new(0.05, 1.0).with_starter(Starter::Exact);
    for t in &methods {
        let y = solve_fixed_step(t, &p, &cfg)?;
        println!(
            "{} on stiff relaxation: final error {:.3e}",
            t.name(),
            y.final_error(&p).unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
