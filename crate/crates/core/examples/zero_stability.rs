//! Root condition for BDF(1..8) and for two hand-written tableaus.
//!
//! ```text
//! cargo run --example zero_stability
//! ```

use multistep::rational::int;
use multistep::stability::zero_stability;
use multistep::tableau::{bdf, custom_tableau, leapfrog};
use multistep::Result;

fn main() -> Result<()> {
    for k in 1..=8 {
        let t = bdf(k)?;
        let verdict = zero_stability(&t)?;
        println!(
            "{:<8} {verdict}  max|root|={:.6}",
            t.name(),
            verdict.roots.max_modulus()
        );
    }

    let t = leapfrog();
    println!("{:<8} {}", t.name(), zero_stability(&t)?);

    // rho = (x - 1)^2: a repeated root on the unit circle.
    let t = custom_tableau(vec![int(1), int(-2), int(1)], vec![int(0), int(1), int(0)])?;
    println!("{:<8} {}", "(x-1)^2", zero_stability(&t)?);
    Ok(())
}
