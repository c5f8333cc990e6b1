//! The built-in problem catalog and a solve with overridden parameters.
//!
//! ```text
//! cargo run --example problem_catalog
//! ```

use multistep::integrate::{solve_fixed_step, SolveConfig};
use multistep::problems::{catalog, exact_solution_residual, Params};
use multistep::tableau::adams_moulton;
use multistep::Result;

fn main() -> Result<()> {
    for entry in catalog() {
        println!("{}: {}", entry.name, entry.description);
        for (key, value) in entry.params {
            println!("    {key} = {value}");
        }
        let p = entry.build_default()?;
        if let Some(r) = exact_solution_residual(&p, 1.0, 50) {
            println!("    exact-solution residual: {r:.2e}");
        }
    }

    let params = Params::from([("lambda".to_string(), -0.5), ("lambda_im".to_string(), 4.0)]);
    let p = catalog()[0].build(&params)?;
    let traj = solve_fixed_step(&adams_moulton(4, false)?, &p, &SolveConfig::new(0.01, 5.0))?;
    print!("{}", traj.to_csv().lines().last().unwrap_or_default());
    println!(
        "\nfinal error: {:.3e}",
        traj.final_error(&p).unwrap_or(f64::NAN)
    );
    Ok(())
}
