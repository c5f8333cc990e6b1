//! Built-in initial value problems with closed-form solutions.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrate::{IVProblem, Stiffness};

/// Problems with `|lambda|` at least this large are tagged stiff.
pub const STIFF_THRESHOLD: f64 = 1e3;
pub const MAX_POLYNOMIAL_DEGREE: usize = 10;

fn stiffness_of(lambda_magnitude: f64) -> Stiffness {
    if lambda_magnitude >= STIFF_THRESHOLD {
        Stiffness::Stiff
    } else {
        Stiffness::Nonstiff
    }
}

/// `y' = lambda y`, `y(0) = 1`, exact `e^{lambda t}`.
pub fn dahlquist(lambda: f64) -> IVProblem {
    IVProblem::new("dahlquist", 0.0, vec![1.0], move |_, y| vec![lambda * y[0]])
        .with_jacobian(move |_, _| DMatrix::from_element(1, 1, lambda))
        .with_exact(move |t| vec![(lambda * t).exp()])
        .with_stiffness(stiffness_of(lambda.abs()))
}

/// Complex test equation as a real system in `(Re y, Im y)`, `y(0) = 1`.
pub fn dahlquist_complex(lambda: Complex64) -> IVProblem {
    let (a, b) = (lambda.re, lambda.im);
    IVProblem::new("dahlquist", 0.0, vec![1.0, 0.0], move |_, y| {
        vec![a * y[0] - b * y[1], b * y[0] + a * y[1]]
    })
    .with_jacobian(move |_, _| DMatrix::from_row_slice(2, 2, &[a, -b, b, a]))
    .with_exact(move |t| {
        let v = (lambda * t).exp();
        vec![v.re, v.im]
    })
    .with_stiffness(stiffness_of(lambda.norm()))
}

/// `y' = q'(t)` with `q(t) = sum_{m=0}^{degree} t^m / (m + 1)`, exact `q`.
///
/// A method of order `p` with exact starting values reproduces `q` to
/// rounding whenever `degree <= p`.
pub fn polynomial_problem(degree: usize) -> Result<IVProblem> {
    if degree > MAX_POLYNOMIAL_DEGREE {
        return Err(Error::Domain(format!(
            "polynomial degree must be at most {MAX_POLYNOMIAL_DEGREE}, got {degree}"
        )));
    }
    let q = move |t: f64| {
        (0..=degree)
            .rev()
            .fold(0.0, |acc, m| acc * t + 1.0 / (m + 1) as f64)
    };
    let dq = move |t: f64| {
        (1..=degree)
            .rev()
            .fold(0.0, |acc, m| acc * t + m as f64 / (m + 1) as f64)
    };
    Ok(IVProblem::new(
        format!("polynomial({degree})"),
        0.0,
        vec![q(0.0)],
        move |t, _| vec![dq(t)],
    )
    .with_jacobian(|_, _| DMatrix::zeros(1, 1))
    .with_exact(move |t| vec![q(t)]))
}

/// `y' = lambda (y - cos t) - sin t`, exact `cos t + (y0 - 1) e^{lambda t}`.
pub fn stiff_relaxation(lambda: f64, y0: f64) -> Result<IVProblem> {
    if lambda.is_nan() || lambda >= 0.0 {
        return Err(Error::Domain(format!(
            "relaxation rate must be negative, got {lambda}"
        )));
    }
    Ok(
        IVProblem::new("stiff_relaxation", 0.0, vec![y0], move |t, y| {
            vec![lambda * (y[0] - t.cos()) - t.sin()]
        })
        .with_jacobian(move |_, _| DMatrix::from_element(1, 1, lambda))
        .with_exact(move |t| vec![t.cos() + (y0 - 1.0) * (lambda * t).exp()])
        .with_stiffness(stiffness_of(lambda.abs())),
    )
}

pub type Params = BTreeMap<String, f64>;

#[derive(Clone, Copy)]
pub struct ProblemCatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Accepted parameters and their defaults.
    pub params: &'static [(&'static str, f64)],
    builder: fn(&Params) -> Result<IVProblem>,
}

impl std::fmt::Debug for ProblemCatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemCatalogEntry")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

impl ProblemCatalogEntry {
    /// Builds the problem, filling unspecified parameters with defaults.
    pub fn build(&self, overrides: &Params) -> Result<IVProblem> {
        let mut params: Params = self
            .params
            .iter()
            .map(|&(k, v)| (k.to_string(), v))
            .collect();
        for (k, v) in overrides {
            if !params.contains_key(k) {
                let known: Vec<&str> = self.params.iter().map(|p| p.0).collect();
                return Err(Error::Usage(format!(
                    "problem {} has no parameter {k:?} (accepted: {})",
                    self.name,
                    known.join(", ")
                )));
            }
            params.insert(k.clone(), *v);
        }
        (self.builder)(&params)
    }

    pub fn build_default(&self) -> Result<IVProblem> {
        self.build(&Params::new())
    }
}

fn degree_param(p: &Params) -> Result<usize> {
    let d = p["degree"];
    if d < 0.0 || d.fract() != 0.0 {
        return Err(Error::Domain(format!(
            "degree must be a nonnegative integer, got {d}"
        )));
    }
    polynomial_problem(d as usize).map(|_| d as usize)
}

const CATALOG: &[ProblemCatalogEntry] = &[
    ProblemCatalogEntry {
        name: "dahlquist",
        description: "y' = lambda y, y(0) = 1 (complex lambda via lambda_im)",
        params: &[("lambda", -1.0), ("lambda_im", 0.0)],
        builder: |p| {
            let (re, im) = (p["lambda"], p["lambda_im"]);
            Ok(if im == 0.0 {
                dahlquist(re)
            } else {
                dahlquist_complex(Complex64::new(re, im))
            })
        },
    },
    ProblemCatalogEntry {
        name: "polynomial",
        description: "y' = q'(t), q(t) = sum_{m<=degree} t^m/(m+1)",
        params: &[("degree", 3.0)],
        builder: |p| polynomial_problem(degree_param(p)?),
    },
    ProblemCatalogEntry {
        name: "stiff_relaxation",
        description: "y' = lambda (y - cos t) - sin t, exact cos t + (y0 - 1) e^{lambda t}",
        params: &[("lambda", -1e4), ("y0", 1.0)],
        builder: |p| stiff_relaxation(p["lambda"], p["y0"]),
    },
];

pub fn catalog() -> &'static [ProblemCatalogEntry] {
    CATALOG
}

pub fn lookup(name: &str) -> Result<&'static ProblemCatalogEntry> {
    CATALOG.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = CATALOG.iter().map(|e| e.name).collect();
        Error::Usage(format!(
            "unknown problem {name:?} (available: {})",
            names.join(", ")
        ))
    })
}

/// Largest central-difference residual `|(y(t+d) - y(t-d)) / 2d - f(t, y(t))|`
/// of the exact solution over `points` samples of `[t0, t_end]`.
pub fn exact_solution_residual(p: &IVProblem, t_end: f64, points: usize) -> Option<f64> {
    let exact = p.exact.as_ref()?;
    let delta = 1e-6;
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let t = p.t0 + (t_end - p.t0) * i as f64 / (points.max(2) - 1) as f64;
        let ahead = exact(t + delta);
        let behind = exact(t - delta);
        let f = p.rhs(t, &exact(t));
        for d in 0..f.len() {
            worst = worst.max(((ahead[d] - behind[d]) / (2.0 * delta) - f[d]).abs());
        }
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dahlquist_examples() {
        let p = dahlquist(0.0);
        assert_eq!(p.exact_at(3.0).unwrap(), vec![1.0]);
        let p = dahlquist(-1.0);
        assert_eq!(p.exact_at(1.0).unwrap()[0], (-1.0f64).exp());
        assert_eq!(p.stiffness, Stiffness::Nonstiff);
        assert_eq!(dahlquist(-1e6).stiffness, Stiffness::Stiff);
        let p = dahlquist_complex(Complex64::new(-0.5, 2.0));
        let e = p.exact_at(1.0).unwrap();
        let want = Complex64::new(-0.5, 2.0).exp();
        assert!((e[0] - want.re).abs() < 1e-15 && (e[1] - want.im).abs() < 1e-15);
    }

    #[test]
    fn polynomial_examples() {
        let p = polynomial_problem(0).unwrap();
        assert_eq!(p.y0, vec![1.0]);
        assert_eq!(p.rhs(0.7, &[0.0]), vec![0.0]);
        let p = polynomial_problem(3).unwrap();
        // q = 1 + t/2 + t^2/3 + t^3/4
        assert!((p.exact_at(2.0).unwrap()[0] - (1.0 + 1.0 + 4.0 / 3.0 + 2.0)).abs() < 1e-14);
        assert!((p.rhs(2.0, &[0.0])[0] - (0.5 + 4.0 / 3.0 + 3.0)).abs() < 1e-14);
        assert!(polynomial_problem(11).is_err());
    }

    #[test]
    fn relaxation_examples() {
        let p = stiff_relaxation(-1e4, 1.0).unwrap();
        assert_eq!(p.exact_at(0.3).unwrap()[0], 0.3f64.cos());
        assert_eq!(p.stiffness, Stiffness::Stiff);
        let p = stiff_relaxation(-1e4, 2.0).unwrap();
        assert_eq!(p.exact_at(0.0).unwrap()[0], 2.0);
        assert!((p.exact_at(1e-4).unwrap()[0] - (1e-4f64.cos() + (-1.0f64).exp())).abs() < 1e-15);
        assert!(matches!(stiff_relaxation(0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn catalog_self_test() {
        for entry in catalog() {
            let p = entry.build_default().unwrap();
            let res = exact_solution_residual(&p, 1.0, 100).unwrap();
            assert!(res <= 1e-6, "{}: residual {res}", entry.name);
            assert_eq!(p.exact_at(p.t0).unwrap(), p.y0, "{}", entry.name);
        }
    }

    #[test]
    fn catalog_lookup_and_params() {
        let entry = lookup("dahlquist").unwrap();
        let mut params = Params::new();
        params.insert("lambda".into(), -2.0);
        let p = entry.build(&params).unwrap();
        assert_eq!(p.rhs(0.0, &[1.5]), vec![-3.0]);
        params.insert("lambda_im".into(), 1.0);
        assert_eq!(entry.build(&params).unwrap().dimension(), 2);
        params.insert("mu".into(), 1.0);
        assert!(matches!(entry.build(&params), Err(Error::Usage(_))));
        assert!(lookup("vdp").is_err());

        let mut deg = Params::new();
        deg.insert("degree".into(), 2.5);
        assert!(lookup("polynomial").unwrap().build(&deg).is_err());
    }
}
