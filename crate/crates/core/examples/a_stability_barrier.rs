//! Sampled A-stability: only the order-1 and order-2 implicit methods survive.
//!
//! ```text
//! cargo run --release --example a_stability_barrier
//! ```

use multistep::analysis::order_report;
use multistep::stability::is_a_stable_sampled;
use multistep::tableau::builtin_tableaus;
use multistep::Result;

fn main() -> Result<()> {
    for t in builtin_tableaus() {
        let order = order_report(&t)?.order;
        let verdict = is_a_stable_sampled(&t, 20_000, 1)?;
        println!("{:<24} order {:>2}  {verdict}", t.name(), order);
        if !verdict.is_counterexample() {
            assert!(order <= 2);
        }
    }
    Ok(())
}
