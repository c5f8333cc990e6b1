//! Zero-stability, absolute stability regions, A-stability sampling and
//! stiff decay.
//!
//! Applying a method to `y' = lambda y` with `z = lambda h` gives the
//! stability polynomial `rho(x) - z sigma(x)`; `z` belongs to the absolute
//! stability region when every root has modulus at most one and the roots on
//! the unit circle are simple. At `z = 0` this is the root condition on `rho`.

mod roots;

pub use roots::{poly_roots, real_poly_roots, RootSet, CLUSTER_RADIUS, RESIDUAL_TOL};

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{characteristic_pair, consistency_by_polys};
use crate::error::{Error, Result};
use crate::tableau::Tableau;

/// Tolerance for every `|x| <= 1` comparison against the unit circle.
pub const UNIT_CIRCLE_TOL: f64 = 1e-8;
/// `|sigma(e^{i theta})|` below which a locus sample is reported as a pole.
pub const POLE_TOL: f64 = 1e-12;

fn fmt_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZeroStabilityClass {
    StronglyStable,
    WeaklyStable,
    Unstable,
}

impl ZeroStabilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ZeroStabilityClass::StronglyStable => "strongly_stable",
            ZeroStabilityClass::WeaklyStable => "weakly_stable",
            ZeroStabilityClass::Unstable => "unstable",
        }
    }

    pub fn is_stable(self) -> bool {
        self != ZeroStabilityClass::Unstable
    }
}

impl fmt::Display for ZeroStabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroStabilityVerdict {
    pub class: ZeroStabilityClass,
    /// For `Unstable`, a root violating the root condition; for
    /// `WeaklyStable`, a unit-modulus root other than 1.
    pub offending_root: Option<Complex64>,
    /// Roots of `rho`.
    pub roots: RootSet,
    /// `false` when the tableau fails the consistency test; the verdict is
    /// still computed.
    pub consistent: bool,
}

impl fmt::Display for ZeroStabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offending_root {
            Some(r) => write!(f, "class={} root={}", self.class, fmt_complex(r)),
            None => write!(f, "class={} root=none", self.class),
        }
    }
}

fn on_unit_circle(r: Complex64) -> bool {
    (r.norm() - 1.0).abs() <= UNIT_CIRCLE_TOL
}

/// The first root that breaks the root condition, if any.
fn root_condition_violation(roots: &RootSet) -> Option<Complex64> {
    roots
        .iter()
        .find(|&(r, m)| r.norm() > 1.0 + UNIT_CIRCLE_TOL || (m >= 2 && on_unit_circle(r)))
        .map(|(r, _)| r)
}

/// Classifies the method by the root condition on `rho`.
pub fn zero_stability(t: &Tableau) -> Result<ZeroStabilityVerdict> {
    let rho = characteristic_pair(t).rho.to_f64_coeffs();
    let roots = real_poly_roots(&rho)?;
    let consistent = consistency_by_polys(t);
    let (class, offending_root) = match root_condition_violation(&roots) {
        Some(r) => (ZeroStabilityClass::Unstable, Some(r)),
        None => {
            let spurious = roots
                .iter()
                .map(|(r, _)| r)
                .find(|&r| r.norm() >= 1.0 - UNIT_CIRCLE_TOL && (r - 1.0).norm() > CLUSTER_RADIUS);
            match spurious {
                Some(r) => (ZeroStabilityClass::WeaklyStable, Some(r)),
                None => (ZeroStabilityClass::StronglyStable, None),
            }
        }
    };
    Ok(ZeroStabilityVerdict {
        class,
        offending_root,
        roots,
        consistent,
    })
}

/// Coefficients of `rho(x) - z sigma(x)`, lowest power first, length `k + 1`.
pub fn stability_polynomial(t: &Tableau, z: Complex64) -> Vec<Complex64> {
    let alphas = t.alphas_f64();
    let betas = t.betas_f64();
    let k = t.k();
    (0..=k)
        .map(|power| {
            let j = k - power;
            Complex64::new(alphas[j], 0.0) - z * betas[j]
        })
        .collect()
}

/// Largest root modulus of the stability polynomial at `z`; infinite when the
/// leading coefficient vanishes, since the lost root has gone to infinity.
pub fn amplification_radius(t: &Tableau, z: Complex64) -> Result<f64> {
    Ok(stability_roots(t, z)?.map_or(f64::INFINITY, |r| r.max_modulus()))
}

fn stability_roots(t: &Tableau, z: Complex64) -> Result<Option<RootSet>> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("non-finite z = {z}")));
    }
    let coeffs = stability_polynomial(t, z);
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let leading = coeffs[coeffs.len() - 1].norm();
    if leading <= 1e-14 * scale {
        return Ok(None);
    }
    poly_roots(&coeffs).map(Some)
}

/// Whether `z = lambda h` lies in the absolute stability region.
pub fn in_stability_region(t: &Tableau, z: Complex64) -> Result<bool> {
    Ok(match stability_roots(t, z)? {
        None => false,
        Some(roots) => root_condition_violation(&roots).is_none(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocusPoint {
    pub theta: f64,
    /// `rho(e^{i theta}) / sigma(e^{i theta})`, or `None` at a pole.
    pub z: Option<Complex64>,
}

impl LocusPoint {
    pub fn is_pole(&self) -> bool {
        self.z.is_none()
    }
}

/// Samples the boundary locus `z(theta) = rho(e^{i theta}) / sigma(e^{i theta})`
/// at `n_samples` angles uniform on `[0, 2 pi)`.
pub fn boundary_locus(t: &Tableau, n_samples: usize) -> Result<Vec<LocusPoint>> {
    if n_samples < 8 {
        return Err(Error::Domain(format!(
            "boundary locus needs at least 8 samples, got {n_samples}"
        )));
    }
    let pair = characteristic_pair(t);
    if pair.sigma.is_zero() {
        return Err(Error::Domain(format!(
            "{}: sigma is identically zero, the boundary locus is undefined",
            t.name()
        )));
    }
    let to_c = |v: Vec<f64>| {
        v.into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect::<Vec<_>>()
    };
    let rho = to_c(pair.rho.to_f64_coeffs());
    let sigma = to_c(pair.sigma.to_f64_coeffs());
    let eval = |c: &[Complex64], x: Complex64| {
        c.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a)
    };
    Ok((0..n_samples)
        .map(|m| {
            let theta = TAU * m as f64 / n_samples as f64;
            let x = Complex64::from_polar(1.0, theta);
            let s = eval(&sigma, x);
            let z = (s.norm() >= POLE_TOL).then(|| eval(&rho, x) / s);
            LocusPoint { theta, z }
        })
        .collect())
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let w = Self {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        let finite = [re_min, re_max, im_min, im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || re_min >= re_max || im_min >= im_max {
            return Err(Error::Domain(format!("empty or non-finite window {w:?}")));
        }
        Ok(w)
    }
}

impl Default for Window {
    fn default() -> Self {
        Self {
            re_min: -6.0,
            re_max: 2.0,
            im_min: -4.0,
            im_max: 4.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionCell {
    pub z: Complex64,
    pub inside: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionSample {
    pub window: Window,
    /// Points along the real and imaginary axes.
    pub resolution: (usize, usize),
    /// Row-major: imaginary part outer (ascending), real part inner (ascending).
    pub cells: Vec<RegionCell>,
}

impl RegionSample {
    pub fn inside_count(&self) -> usize {
        self.cells.iter().filter(|c| c.inside).count()
    }

    /// Grid spacing along the real and imaginary axes.
    pub fn spacing(&self) -> (f64, f64) {
        let (nx, ny) = self.resolution;
        let step = |lo: f64, hi: f64, n: usize| {
            if n > 1 {
                (hi - lo) / (n - 1) as f64
            } else {
                0.0
            }
        };
        (
            step(self.window.re_min, self.window.re_max, nx),
            step(self.window.im_min, self.window.im_max, ny),
        )
    }
}

fn grid_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Evaluates [`in_stability_region`] on an `nx x ny` grid spanning `window`
/// (endpoints included). Cells are computed in parallel; output order is fixed.
pub fn region_grid_scan(
    t: &Tableau,
    window: Window,
    resolution: (usize, usize),
) -> Result<RegionSample> {
    let (nx, ny) = resolution;
    if nx == 0 || ny == 0 {
        return Err(Error::Domain("grid resolution must be positive".into()));
    }
    let xs = grid_axis(window.re_min, window.re_max, nx);
    let ys = grid_axis(window.im_min, window.im_max, ny);
    let points: Vec<Complex64> = ys
        .iter()
        .flat_map(|&im| xs.iter().map(move |&re| Complex64::new(re, im)))
        .collect();
    let cells = points
        .par_iter()
        .map(|&z| in_stability_region(t, z).map(|inside| RegionCell { z, inside }))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionSample {
        window,
        resolution,
        cells,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AStabilityVerdict {
    /// No sampled left-half-plane point fell outside the region.
    StableOnSample { samples: usize },
    /// A point with `Re(z) < 0` outside the region.
    Counterexample(Complex64),
}

impl AStabilityVerdict {
    pub fn is_counterexample(&self) -> bool {
        matches!(self, AStabilityVerdict::Counterexample(_))
    }
}

impl fmt::Display for AStabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AStabilityVerdict::StableOnSample { samples } => {
                write!(f, "a_stable_on_sample samples={samples}")
            }
            AStabilityVerdict::Counterexample(z) => {
                write!(f, "not_a_stable z={}", fmt_complex(*z))
            }
        }
    }
}

const MIN_RADIUS: f64 = 1e-3;
const MAX_RADIUS: f64 = 1e6;

/// Left-half-plane sample points: a log-radial grid whose angles crowd
/// toward the imaginary axis, followed by seeded pseudorandom points.
fn a_stability_samples(sample_count: usize, seed: u64) -> Vec<Complex64> {
    let grid_target = sample_count / 2;
    let n_radii = ((grid_target as f64).sqrt().floor() as usize).max(2);
    // Angles are split evenly between the upper and lower quadrants.
    let n_angles_half = (grid_target / n_radii / 2).max(1);
    let log_lo = MIN_RADIUS.ln();
    let log_hi = MAX_RADIUS.ln();
    let radii: Vec<f64> = (0..n_radii)
        .map(|i| (log_lo + (log_hi - log_lo) * i as f64 / (n_radii - 1) as f64).exp())
        .collect();
    // Distance (radians) from the imaginary axis, log-spaced in [1e-4, pi/2].
    let offsets: Vec<f64> = (0..n_angles_half)
        .map(|i| {
            if n_angles_half == 1 {
                FRAC_PI_2
            } else {
                let (a, b) = (1e-4f64.ln(), FRAC_PI_2.ln());
                (a + (b - a) * i as f64 / (n_angles_half - 1) as f64).exp()
            }
        })
        .collect();
    let mut out = Vec::with_capacity(sample_count);
    for &r in &radii {
        for &d in &offsets {
            out.push(Complex64::from_polar(r, FRAC_PI_2 + d));
            out.push(Complex64::from_polar(r, 3.0 * FRAC_PI_2 - d));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < sample_count {
        let r = rng.gen_range(log_lo..log_hi).exp();
        // Open interval (pi/2, 3pi/2).
        let theta = FRAC_PI_2 + PI * rng.gen_range(f64::EPSILON..1.0);
        let z = Complex64::from_polar(r, theta);
        if z.re < 0.0 {
            out.push(z);
        }
    }
    out.truncate(sample_count);
    out
}

/// Searches the open left half-plane (`1e-3 <= |z| <= 1e6`) for a point
/// outside the stability region. A counterexample disproves A-stability; its
/// absence proves nothing.
pub fn is_a_stable_sampled(
    t: &Tableau,
    sample_count: usize,
    seed: u64,
) -> Result<AStabilityVerdict> {
    if sample_count < 100 {
        return Err(Error::Domain(format!(
            "A-stability sampling needs at least 100 samples, got {sample_count}"
        )));
    }
    for z in a_stability_samples(sample_count, seed) {
        if !in_stability_region(t, z)? {
            return Ok(AStabilityVerdict::Counterexample(z));
        }
    }
    Ok(AStabilityVerdict::StableOnSample {
        samples: sample_count,
    })
}

/// Stiff decay: as `z -> -inf` the roots of the stability polynomial tend to
/// the roots of `sigma`, so the method damps infinitely stiff modes iff every
/// root of `sigma` lies strictly inside the unit disc. Explicit methods never do.
pub fn has_stiff_decay(t: &Tableau) -> Result<bool> {
    if t.is_explicit() {
        return Ok(false);
    }
    let sigma = characteristic_pair(t).sigma.to_f64_coeffs();
    if sigma.len() < 2 {
        // sigma is a nonzero constant: no finite roots.
        return Ok(true);
    }
    let roots = real_poly_roots(&sigma)?;
    Ok(roots.max_modulus() < 1.0 - UNIT_CIRCLE_TOL)
}
