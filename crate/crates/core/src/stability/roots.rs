//! Complex polynomial roots by Aberth-Ehrlich simultaneous iteration, with a
//! companion-matrix eigenvalue fallback.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative residual required of every returned root.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Roots closer than this are merged into one root of higher multiplicity.
pub const CLUSTER_RADIUS: f64 = 1e-7;
pub const MAX_ITERATIONS: usize = 200;

/// Distinct roots with multiplicities. Sorted by real part, then imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    roots: Vec<Complex64>,
    multiplicities: Vec<usize>,
}

impl RootSet {
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn iter(&self) -> impl Iterator<Item = (Complex64, usize)> + '_ {
        self.roots
            .iter()
            .copied()
            .zip(self.multiplicities.iter().copied())
    }

    /// Sum of multiplicities, equal to the polynomial degree.
    pub fn degree(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// `p(z)` and `p'(z)` in one pass.
fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    coeffs
        .iter()
        .rev()
        .fold((zero, zero), |(p, dp), c| (p * z + c, dp * z + p))
}

fn residual_ok(coeffs: &[Complex64], scale: f64, z: Complex64) -> bool {
    let degree = coeffs.len() - 1;
    let bound = RESIDUAL_TOL * scale * z.norm().max(1.0).powi(degree as i32);
    horner(coeffs, z).norm() <= bound
}

fn initial_guesses(monic: &[Complex64]) -> Vec<Complex64> {
    let m = monic.len() - 1;
    let radius = (0..m)
        .map(|i| monic[i].norm().powf(1.0 / (m - i) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    (0..m)
        .map(|j| {
            let angle = std::f64::consts::TAU * j as f64 / m as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect()
}

/// One Gauss-Seidel Aberth sweep; returns the largest relative correction.
fn aberth_sweep(coeffs: &[Complex64], z: &mut [Complex64]) -> f64 {
    let mut largest: f64 = 0.0;
    for i in 0..z.len() {
        let (p, dp) = horner_with_derivative(coeffs, z[i]);
        if p.norm() == 0.0 {
            continue;
        }
        let ratio = p / dp;
        let repulsion: Complex64 = z
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, zj)| (z[i] - zj).inv())
            .sum();
        let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
        if step.is_finite() {
            z[i] -= step;
            largest = largest.max(step.norm() / z[i].norm().max(1.0));
        }
    }
    largest
}

fn aberth(coeffs: &[Complex64], scale: f64) -> Option<Vec<Complex64>> {
    let mut z = initial_guesses(coeffs);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let step = aberth_sweep(coeffs, &mut z);
        if z.iter().any(|r| !r.is_finite()) {
            return None;
        }
        if z.iter().all(|&r| residual_ok(coeffs, scale, r)) {
            // Keep refining: the residual test alone leaves multiple roots
            // spread by roughly the square root of the tolerance.
            if step <= 1e-14 {
                return Some(z);
            }
            let mut refined = z.clone();
            for _ in 0..50 {
                let step = aberth_sweep(coeffs, &mut refined);
                if !refined
                    .iter()
                    .all(|&r| r.is_finite() && residual_ok(coeffs, scale, r))
                {
                    break;
                }
                z.copy_from_slice(&refined);
                if step <= 1e-14 {
                    break;
                }
            }
            return Some(z);
        }
    }
    None
}

/// Eigenvalues of the companion matrix of a monic polynomial.
pub(crate) fn companion_roots(monic: &[Complex64]) -> Option<Vec<Complex64>> {
    let m = monic.len() - 1;
    let mut companion = DMatrix::<Complex64>::zeros(m, m);
    for i in 0..m {
        companion[(0, i)] = -monic[m - 1 - i];
        if i + 1 < m {
            companion[(i + 1, i)] = Complex64::new(1.0, 0.0);
        }
    }
    let schur = nalgebra::linalg::Schur::try_new(companion, 1e-15, 10_000)?;
    let mut roots: Vec<Complex64> = schur.eigenvalues()?.iter().copied().collect();
    // Newton polish against the polynomial itself.
    for r in &mut roots {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(monic, *r);
            let step = p / dp;
            if step.is_finite() {
                *r -= step;
            }
        }
    }
    Some(roots)
}

fn cluster(mut roots: Vec<Complex64>) -> RootSet {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let n = roots.len();
    // Single-linkage grouping via union-find.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= CLUSTER_RADIUS {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for (i, &root) in roots.iter().enumerate().take(n) {
        let g = find(&mut parent, i);
        match groups.iter_mut().find(|(id, _, _)| *id == g) {
            Some((_, sum, count)) => {
                *sum += root;
                *count += 1;
            }
            None => groups.push((g, root, 1)),
        }
    }
    RootSet {
        roots: groups.iter().map(|&(_, s, c)| s / c as f64).collect(),
        multiplicities: groups.iter().map(|&(_, _, c)| c).collect(),
    }
}

/// All complex roots of `sum_i coeffs[i] x^i` (lowest power first).
pub fn poly_roots(coeffs: &[Complex64]) -> Result<RootSet> {
    if coeffs.len() < 2 {
        return Err(Error::Domain(
            "polynomial must have degree at least 1".into(),
        ));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain(
            "polynomial has non-finite coefficients".into(),
        ));
    }
    let leading = coeffs[coeffs.len() - 1];
    if leading.norm() == 0.0 {
        return Err(Error::Domain("leading coefficient is zero".into()));
    }

    // Exact zero roots are split off before iterating.
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let monic: Vec<Complex64> = coeffs[zeros..].iter().map(|c| c / leading).collect();
    let m = monic.len() - 1;

    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if m == 1 {
        roots.push(-monic[0]);
    } else if m > 1 {
        let scale = monic.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let found = aberth(&monic, scale)
            .or_else(|| companion_roots(&monic))
            .ok_or_else(|| {
                Error::Numerical(format!(
                    "root finding failed for degree {m} polynomial {monic:?}"
                ))
            })?;
        if let Some(bad) = found.iter().find(|&&r| !residual_ok(&monic, scale, r)) {
            return Err(Error::Numerical(format!(
                "root {bad} of degree {m} polynomial has residual {:e} above tolerance \
                 after {MAX_ITERATIONS} iterations and companion fallback",
                horner(&monic, *bad).norm()
            )));
        }
        roots.extend(found);
    }
    Ok(cluster(roots))
}

/// Roots of a real polynomial, lowest power first.
pub fn real_poly_roots(coeffs: &[f64]) -> Result<RootSet> {
    let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    poly_roots(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn linear_and_quadratic() {
        let r = real_poly_roots(&[-1.0, 1.0]).unwrap();
        assert_eq!(r.roots(), &[c(1.0, 0.0)]);
        assert_eq!(r.multiplicities(), &[1]);

        let r = real_poly_roots(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(r.roots().len(), 2);
        assert!((r.roots()[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((r.roots()[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn bdf2_rho() {
        let r = real_poly_roots(&[1.0 / 3.0, -4.0 / 3.0, 1.0]).unwrap();
        assert!((r.roots()[0] - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!((r.roots()[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn multiplicities() {
        // x^3 (x - 1)^2 = x^5 - 2x^4 + x^3
        let r = real_poly_roots(&[0.0, 0.0, 0.0, 1.0, -2.0, 1.0]).unwrap();
        assert_eq!(r.degree(), 5);
        assert_eq!(r.roots().len(), 2);
        let (zero, m0) = r.iter().next().unwrap();
        assert_eq!((zero, m0), (c(0.0, 0.0), 3));
        let (one, m1) = r.iter().nth(1).unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-7);
        assert_eq!(m1, 2);
    }

    #[test]
    fn complex_coefficients() {
        // (x - i)(x + 2) = x^2 + (2 - i) x - 2i
        let r = poly_roots(&[c(0.0, -2.0), c(2.0, -1.0), c(1.0, 0.0)]).unwrap();
        assert!((r.roots()[0] - c(-2.0, 0.0)).norm() < 1e-12);
        assert!((r.roots()[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn wilkinson_like_degree_twelve() {
        // prod_{i=1}^{12} (x - i/12)
        let mut p = vec![1.0];
        for i in 1..=12 {
            let root = i as f64 / 12.0;
            let mut next = vec![0.0; p.len() + 1];
            for (d, &a) in p.iter().enumerate() {
                next[d + 1] += a;
                next[d] -= root * a;
            }
            p = next;
        }
        let r = real_poly_roots(&p).unwrap();
        assert_eq!(r.degree(), 12);
        for (i, root) in r.roots().iter().enumerate() {
            assert!((root.re - (i + 1) as f64 / 12.0).abs() < 1e-6, "{root}");
        }
    }

    #[test]
    fn companion_fallback_agrees() {
        let monic = [c(6.0, 0.0), c(-5.0, 0.0), c(1.0, 0.0)];
        let mut roots = companion_roots(&monic).unwrap();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((roots[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((roots[1] - c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(real_poly_roots(&[1.0]), Err(Error::Domain(_))));
        assert!(matches!(
            real_poly_roots(&[1.0, 0.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            real_poly_roots(&[1.0, f64::NAN]),
            Err(Error::Domain(_))
        ));
    }
}
