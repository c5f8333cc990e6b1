//! Coefficient sets of linear multistep methods and their exact synthesis.
//!
//! A k-step method is stored in the normalized form
//!
//! ```text
//! sum_{j=0}^{k} alpha_j y_{n-j} = h sum_{j=0}^{k} beta_j f_{n-j},   alpha_0 = 1
//! ```
//!
//! Adams tableaus are built by integrating Lagrange basis polynomials exactly
//! ([`lagrange_integral_oracle`]); the classical binomial closed form for the
//! Adams-Bashforth weights lives in [`adams_bashforth_closed_form`] and is kept
//! as an independent cross-check. BDF tableaus are assembled from the backward
//! difference operator.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{binomial, factorial, int, parse_rational, to_f64, Rational, RationalPoly};

/// Largest step count synthesized for Adams methods.
pub const MAX_ADAMS_STEPS: usize = 12;
/// Largest step count synthesized for BDF methods. Orders 7 and 8 are kept so
/// their zero-instability can be shown.
pub const MAX_BDF_STEPS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    AdamsBashforth,
    AdamsMoulton,
    Bdf,
    Custom,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::AdamsBashforth => "AB",
            Family::AdamsMoulton => "AM",
            Family::Bdf => "BDF",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Exact coefficients `(alpha_0..alpha_k, beta_0..beta_k)` of a k-step method.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tableau {
    k: usize,
    alphas: Vec<Rational>,
    betas: Vec<Rational>,
    family: Family,
    name: String,
}

impl Tableau {
    fn build(
        alphas: Vec<Rational>,
        betas: Vec<Rational>,
        family: Family,
        name: impl Into<String>,
    ) -> Result<Self> {
        if alphas.len() != betas.len() {
            return Err(Error::Construction(format!(
                "alpha has {} entries but beta has {}",
                alphas.len(),
                betas.len()
            )));
        }
        if alphas.len() < 2 {
            return Err(Error::Construction(
                "a tableau needs at least two coefficients per row (k >= 1)".into(),
            ));
        }
        if !alphas[0].is_one() {
            return Err(Error::Construction(format!(
                "alpha_0 must be 1, got {}",
                alphas[0]
            )));
        }
        let k = alphas.len() - 1;
        if alphas[k].is_zero() && betas[k].is_zero() {
            return Err(Error::Construction(format!(
                "alpha_{k} and beta_{k} are both zero; the step count is overstated"
            )));
        }
        Ok(Self {
            k,
            alphas,
            betas,
            family,
            name: name.into(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Rational] {
        &self.betas
    }

    pub fn alphas_f64(&self) -> Vec<f64> {
        self.alphas.iter().map(to_f64).collect()
    }

    pub fn betas_f64(&self) -> Vec<f64> {
        self.betas.iter().map(to_f64).collect()
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Short human-readable label such as `AB(3)` or `trapezoid`.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_explicit(&self) -> bool {
        self.betas[0].is_zero()
    }

    pub fn is_implicit(&self) -> bool {
        !self.is_explicit()
    }

    /// Renders the tableau in the plain-text file format read by [`Tableau::parse`].
    pub fn to_text(&self) -> String {
        let join = |v: &[Rational]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "# {}\nk={}\nalpha= {}\nbeta= {}\n",
            self.name,
            self.k,
            join(&self.alphas),
            join(&self.betas)
        )
    }

    /// Parses the tableau text format:
    ///
    /// ```text
    /// # explicit midpoint
    /// k=2
    /// alpha= 1 0 -1
    /// beta= 0 2 0
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut k: Option<(usize, usize)> = None;
        let mut alphas: Option<(Vec<Rational>, usize)> = None;
        let mut betas: Option<(Vec<Rational>, usize)> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |reason: String| Error::Parse {
                line: line_no,
                reason,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key=value`, got {line:?}")))?;
            let entries = || -> Result<Vec<Rational>> {
                value
                    .split_whitespace()
                    .map(|s| parse_rational(s).map_err(|e| parse_err(e.to_string())))
                    .collect()
            };
            match key.trim() {
                "k" => {
                    let v = value
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| parse_err(format!("bad step count {:?}", value.trim())))?;
                    k = Some((v, line_no));
                }
                "alpha" => alphas = Some((entries()?, line_no)),
                "beta" => betas = Some((entries()?, line_no)),
                other => return Err(parse_err(format!("unknown key {other:?}"))),
            }
        }

        let missing = |what: &str| Error::Parse {
            line: text.lines().count(),
            reason: format!("missing `{what}=` line"),
        };
        let (k, k_line) = k.ok_or_else(|| missing("k"))?;
        let (alphas, a_line) = alphas.ok_or_else(|| missing("alpha"))?;
        let (betas, b_line) = betas.ok_or_else(|| missing("beta"))?;
        for (len, line) in [(alphas.len(), a_line), (betas.len(), b_line)] {
            if len != k + 1 {
                return Err(Error::Parse {
                    line,
                    reason: format!("expected k+1 = {} entries, got {len}", k + 1),
                });
            }
        }
        let _ = k_line;
        custom_tableau(alphas, betas)
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Rational]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "method: {}", self.name)?;
        writeln!(f, "family: {}", self.family)?;
        writeln!(f, "k: {}", self.k)?;
        writeln!(f, "alpha: {}", join(&self.alphas))?;
        writeln!(f, "beta: {}", join(&self.betas))?;
        write!(f, "explicit: {}", self.is_explicit())
    }
}

/// Distinct interpolation nodes `t_{n-j}`, given by their offsets `j` in units of `h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InterpolationNodeSet {
    offsets: Vec<i64>,
}

impl InterpolationNodeSet {
    pub fn new(mut offsets: Vec<i64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::Domain("node set is empty".into()));
        }
        offsets.sort_unstable();
        if let Some(w) = offsets.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Domain(format!("duplicate node offset {}", w[0])));
        }
        Ok(Self { offsets })
    }

    /// Offsets `start..=end`.
    pub fn range(start: i64, end: i64) -> Result<Self> {
        Self::new((start..=end).collect())
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }
}

/// Exact weights `(1/h) * integral of l_j` over `[t_{n-upper}, t_{n-lower}]`,
/// one per node in ascending offset order, where `l_j` is the Lagrange basis
/// polynomial of node `t_{n-j}`.
///
/// Time is measured in units of `h` from `t_n`, so node `j` sits at `-j`.
pub fn lagrange_integral_oracle(
    nodes: &InterpolationNodeSet,
    lower: i64,
    upper: i64,
) -> Result<Vec<Rational>> {
    if lower >= upper {
        return Err(Error::Domain(format!(
            "integration offsets must satisfy lower < upper, got {lower} >= {upper}"
        )));
    }
    let a = int(-upper);
    let b = int(-lower);
    let positions: Vec<Rational> = nodes.offsets.iter().map(|&j| int(-j)).collect();
    Ok(positions
        .iter()
        .enumerate()
        .map(|(i, xi)| {
            let mut basis = RationalPoly::constant(Rational::one());
            for (m, xm) in positions.iter().enumerate() {
                if m != i {
                    let factor = RationalPoly::linear_factor(xm.clone())
                        .scale(&(Rational::one() / (xi - xm)));
                    basis = &basis * &factor;
                }
            }
            basis.integrate(&a, &b)
        })
        .collect())
}

fn check_range(what: &str, k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        return Err(Error::Domain(format!(
            "{what} step count must be in 1..={max}, got {k}"
        )));
    }
    Ok(())
}

fn adams_alphas(k: usize) -> Vec<Rational> {
    let mut alphas = vec![Rational::zero(); k + 1];
    alphas[0] = Rational::one();
    alphas[1] = -Rational::one();
    alphas
}

/// The explicit k-step Adams-Bashforth method.
pub fn adams_bashforth(k: usize) -> Result<Tableau> {
    check_range("Adams-Bashforth", k, MAX_ADAMS_STEPS)?;
    let weights = lagrange_integral_oracle(&InterpolationNodeSet::range(1, k as i64)?, 0, 1)?;
    let mut betas = Vec::with_capacity(k + 1);
    betas.push(Rational::zero());
    betas.extend(weights);
    Tableau::build(
        adams_alphas(k),
        betas,
        Family::AdamsBashforth,
        format!("AB({k})"),
    )
}

/// `integral_0^1 binom(-s, i) ds`, with `binom(-s, i) = (-s)(-s-1)...(-s-i+1) / i!`.
fn binomial_neg_s_integral(i: usize) -> Rational {
    let mut numerator = RationalPoly::constant(Rational::one());
    for m in 0..i {
        // (-s - m)
        numerator = &numerator * &RationalPoly::new(vec![int(-(m as i64)), int(-1)]);
    }
    numerator.integrate(&Rational::zero(), &Rational::one()) / factorial(i)
}

/// Adams-Bashforth weights `beta_1..beta_k` from the alternating binomial sum
///
/// ```text
/// beta_j = (-1)^(j-1) sum_{i=j-1}^{k-1} C(i, j-1) (-1)^i integral_0^1 C(-s, i) ds
/// ```
///
/// Not used for synthesis; it cross-checks [`adams_bashforth`].
pub fn adams_bashforth_closed_form(k: usize) -> Result<Vec<Rational>> {
    check_range("Adams-Bashforth", k, MAX_ADAMS_STEPS)?;
    let integrals: Vec<Rational> = (0..k).map(binomial_neg_s_integral).collect();
    let sign = |e: usize| if e.is_multiple_of(2) { int(1) } else { int(-1) };
    Ok((1..=k)
        .map(|j| {
            let sum = (j - 1..k).fold(Rational::zero(), |acc, i| {
                acc + binomial(i, j - 1) * sign(i) * &integrals[i]
            });
            sign(j - 1) * sum
        })
        .collect())
}

/// The implicit k-step Adams-Moulton method.
///
/// For `k = 1` the plain call yields Backward Euler (`beta_1 = 0`) and
/// `trapezoid_variant = true` yields the implicit trapezoid rule; for `k >= 2`
/// the weights integrate the degree-k interpolant through `t_n..t_{n-k}` over
/// `[t_{n-1}, t_n]`.
pub fn adams_moulton(k: usize, trapezoid_variant: bool) -> Result<Tableau> {
    check_range("Adams-Moulton", k, MAX_ADAMS_STEPS)?;
    if trapezoid_variant && k != 1 {
        return Err(Error::Usage(format!(
            "the trapezoid variant only exists for k = 1, got k = {k}"
        )));
    }
    if k == 1 && !trapezoid_variant {
        return Tableau::build(
            adams_alphas(1),
            vec![Rational::one(), Rational::zero()],
            Family::AdamsMoulton,
            "AM(1)/backward-Euler",
        );
    }
    let betas = lagrange_integral_oracle(&InterpolationNodeSet::range(0, k as i64)?, 0, 1)?;
    let name = if k == 1 {
        "AM(1)/trapezoid".to_string()
    } else {
        format!("AM({k})")
    };
    Tableau::build(adams_alphas(k), betas, Family::AdamsMoulton, name)
}

/// `nabla^i y_n` for `values = [y_n, y_{n-1}, ...]`.
pub fn backward_difference(values: &[Rational], i: usize) -> Result<Rational> {
    if values.len() < i + 1 {
        return Err(Error::Domain(format!(
            "backward difference of order {i} needs {} values, got {}",
            i + 1,
            values.len()
        )));
    }
    let mut diffs = values[..=i].to_vec();
    for _ in 0..i {
        diffs = diffs.windows(2).map(|w| &w[0] - &w[1]).collect();
    }
    Ok(diffs.swap_remove(0))
}

/// The k-step backward differentiation formula, normalized to `alpha_0 = 1`.
pub fn bdf(k: usize) -> Result<Tableau> {
    check_range("BDF", k, MAX_BDF_STEPS)?;
    // Coefficient of y_{n-m} in sum_i (1/i) nabla^i y_n: apply the operator to
    // the unit sequence that picks out y_{n-m}.
    let mut raw = Vec::with_capacity(k + 1);
    for m in 0..=k {
        let mut unit = vec![Rational::zero(); k + 1];
        unit[m] = Rational::one();
        let mut acc = Rational::zero();
        for i in 1..=k {
            acc += backward_difference(&unit, i)? / int(i as i64);
        }
        raw.push(acc);
    }
    let scale = raw[0].clone();
    let alphas: Vec<Rational> = raw.iter().map(|a| a / &scale).collect();
    let mut betas = vec![Rational::zero(); k + 1];
    betas[0] = Rational::one() / scale;
    Tableau::build(alphas, betas, Family::Bdf, format!("BDF({k})"))
}

/// A user-supplied tableau.
pub fn custom_tableau(alphas: Vec<Rational>, betas: Vec<Rational>) -> Result<Tableau> {
    let k = alphas.len().saturating_sub(1);
    Tableau::build(alphas, betas, Family::Custom, format!("custom({k})"))
}

pub fn forward_euler() -> Tableau {
    adams_bashforth(1).expect("AB(1) is in range")
}

pub fn backward_euler() -> Tableau {
    adams_moulton(1, false).expect("AM(1) is in range")
}

pub fn trapezoid() -> Tableau {
    adams_moulton(1, true).expect("AM(1) is in range")
}

/// Explicit midpoint rule `y_n = y_{n-2} + 2h f_{n-1}`.
pub fn leapfrog() -> Tableau {
    Tableau::build(
        vec![int(1), int(0), int(-1)],
        vec![int(0), int(2), int(0)],
        Family::Custom,
        "leapfrog",
    )
    .expect("leapfrog coefficients are valid")
}

/// Every tableau this crate can synthesize: AB(1..=12), AM(1..=12) plus the
/// trapezoid variant, BDF(1..=8), and the leapfrog rule.
pub fn builtin_tableaus() -> Vec<Tableau> {
    let mut out = Vec::new();
    out.extend((1..=MAX_ADAMS_STEPS).map(|k| adams_bashforth(k).unwrap()));
    out.push(trapezoid());
    out.extend((1..=MAX_ADAMS_STEPS).map(|k| adams_moulton(k, false).unwrap()));
    out.extend((1..=MAX_BDF_STEPS).map(|k| bdf(k).unwrap()));
    out.push(leapfrog());
    out
}
