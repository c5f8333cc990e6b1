//! Order, error constant and consistency of every built-in tableau.
//!
//! ```text
//! cargo run --example order_and_consistency
//! ```

use multistep::analysis::{consistency_by_polys, consistency_by_sums, order_report};
use multistep::tableau::builtin_tableaus;
use multistep::Result;

fn main() -> Result<()> {
    println!(
        "{:<24} {:>5} {:>24} {:>10}",
        "method", "order", "error constant", "consistent"
    );
    for t in builtin_tableaus() {
        let report = order_report(&t)?;
        assert_eq!(consistency_by_sums(&t), consistency_by_polys(&t));
        println!(
            "{:<24} {:>5} {:>24} {:>10}",
            t.name(),
            report.order,
            report.error_constant.to_string(),
            report.consistent
        );
    }
    Ok(())
}
