//! Exact Adams-Bashforth, Adams-Moulton and BDF coefficients.
//!
//! ```text
//! cargo run --example synthesize_tableaus
//! ```

use multistep::tableau::{adams_bashforth, adams_bashforth_closed_form, adams_moulton, bdf};
use multistep::Result;

fn main() -> Result<()> {
    for k in 1..=4 {
        println!("{}\n", adams_bashforth(k)?);
    }
    for k in 2..=4 {
        println!("{}\n", adams_moulton(k, false)?);
    }
    for k in 1..=6 {
        println!("{}\n", bdf(k)?);
    }

    // Two independent constructions of the explicit Adams weights.
    for k in 1..=12 {
        let ab = adams_bashforth(k)?;
        assert_eq!(&ab.betas()[1..], adams_bashforth_closed_form(k)?.as_slice());
    }
    println!("AB(1..12): interpolation and closed form agree");
    Ok(())
}
