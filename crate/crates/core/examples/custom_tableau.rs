//! Analyze and integrate with a tableau read from text.
//!
//! ```text
//! cargo run --example custom_tableau
//! ```

use multistep::analysis::order_report;
use multistep::integrate::{solve_fixed_step, SolveConfig};
use multistep::problems::lookup;
use multistep::stability::{is_a_stable_sampled, zero_stability};
use multistep::{Result, Tableau};

// Milne-Simpson: order 4, weakly stable.
const MILNE: &str = "\
# Milne-Simpson
k=2
alpha=1 0 -1
beta=1/3 4/3 1/3
";

fn main() -> Result<()> {
    let t = Tableau::parse(MILNE)?;
    println!("{t}\n");
    println!("{}", order_report(&t)?.to_key_values());
    println!("zero stability: {}", zero_stability(&t)?);
    println!("A-stability: {}", is_a_stable_sampled(&t, 2000, 3)?);

    let entry = lookup("dahlquist")?;
    let p = entry.build_default()?;
    for h in [0.1, 0.05, 0.025] {
        let traj = solve_fixed_step(&t, &p, &SolveConfig::new(h, 10.0))?;
        println!(
            "h = {h}: error at t = 10 is {:.3e}",
            traj.final_error(&p).unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
