//! Absolute stability regions as CSV, plus an ASCII rendering.
//!
//! ```text
//! cargo run --release --example stability_regions [family] [k]
//! ```

use std::env;
use std::fs::File;
use std::io::{BufWriter, Write};

use multistep::stability::{boundary_locus, region_grid_scan, Window};
use multistep::tableau::{adams_bashforth, adams_moulton, bdf, Tableau};
use multistep::{Error, Result};

fn pick(family: &str, k: usize) -> Result<Tableau> {
    match family {
        "ab" => adams_bashforth(k),
        "am" => adams_moulton(k, false),
        "bdf" => bdf(k),
        other => Err(Error::Usage(format!("unknown family {other}"))),
    }
}

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = env::args().skip(1).collect();
    let family = args.first().map_or("bdf", String::as_str);
    let k: usize = args.get(1).map_or(Ok(3), |s| s.parse())?;
    let t = pick(family, k)?;

    let window = Window::default();
    let grid = region_grid_scan(&t, window, (65, 33))?;
    println!(
        "{} on [{}, {}] x [{}, {}]:",
        t.name(),
        window.re_min,
        window.re_max,
        window.im_min,
        window.im_max
    );
    for row in grid.cells.chunks(65).rev() {
        let line: String = row
            .iter()
            .map(|c| if c.inside { '#' } else { '.' })
            .collect();
        println!("{line}");
    }
    println!(
        "inside: {} of {} cells",
        grid.inside_count(),
        grid.cells.len()
    );

    let path = env::temp_dir().join(format!("{family}{k}_locus.csv"));
    let mut out = BufWriter::new(File::create(&path)?);
    writeln!(out, "theta,re,im")?;
    for p in boundary_locus(&t, 720)? {
        if let Some(z) = p.z {
            writeln!(out, "{},{},{}", p.theta, z.re, z.im)?;
        }
    }
    println!("boundary locus written to {}", path.display());
    Ok(())
}
