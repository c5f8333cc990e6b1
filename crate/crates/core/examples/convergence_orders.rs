//! Observed convergence order on y' = -y against the theoretical order.
//!
//! ```text
//! cargo run --release --example convergence_orders
//! ```

use multistep::analysis::order_report;
use multistep::integrate::{observed_order, SolveConfig, Starter};
use multistep::problems::dahlquist;
use multistep::tableau::{adams_bashforth, adams_moulton, bdf, trapezoid};
use multistep::Result;

fn main() -> Result<()> {
    let problem = dahlquist(-1.0);
    let hs: Vec<f64> = (0..5).map(|m| 0.1 / 2f64.powi(m)).collect();
    let base = SolveConfig::new(hs[0], 1.0).with_starter(Starter::Exact);
    let methods = [
        adams_bashforth(2)?,
        adams_bashforth(4)?,
        trapezoid(),
        adams_moulton(3, false)?,
        bdf(3)?,
        bdf(5)?,
    ];
    println!("{:<20} {:>6} {:>8}", "method", "order", "slope");
    for t in &methods {
        let report = observed_order(t, &problem, &base, &hs)?;
        println!(
            "{:<20} {:>6} {:>8.3}",
            t.name(),
            order_report(t)?.order,
            report.slope
        );
    }
    Ok(())
}
