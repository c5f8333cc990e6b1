//! Order, error constant and consistency of a [`Tableau`].
//!
//! Applying the method's linear operator
//! `L_h[y](t) = sum_j alpha_j y(t - jh) - h beta_j y'(t - jh)` to a smooth `y`
//! and expanding about `t` gives `L_h[y](t) = sum_i C_i h^i y^(i)(t)` with
//!
//! ```text
//! C_0 = sum_j alpha_j
//! C_i = (-1)^i [ (1/i!) sum_j j^i alpha_j + (1/(i-1)!) sum_j j^(i-1) beta_j ]
//! ```
//!
//! so `C_1 = -(sum_j j alpha_j + sum_j beta_j)`. The consistency test by sums
//! checks the bracket without the sign; both forms vanish together. Likewise
//! `rho'(1) - sigma(1) = -(sum_j j alpha_j + sum_j beta_j)` once `rho(1) = 0`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{factorial, int, Rational, RationalPoly};
use crate::tableau::Tableau;

/// Exact Taylor constants `C_0..=C_qmax` of the method's linear operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorConstants {
    values: Vec<Rational>,
}

impl TaylorConstants {
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, i: usize) -> Option<&Rational> {
        self.values.get(i)
    }
}

pub fn taylor_constants(t: &Tableau, q_max: usize) -> TaylorConstants {
    let mut values = Vec::with_capacity(q_max + 1);
    values.push(t.alphas().iter().sum::<Rational>());
    for i in 1..=q_max {
        let mut alpha_sum = Rational::zero();
        let mut beta_sum = Rational::zero();
        for (j, (a, b)) in t.alphas().iter().zip(t.betas()).enumerate() {
            let jr = int(j as i64);
            alpha_sum += num_traits::pow(jr.clone(), i) * a;
            // pow(0, 0) = 1 keeps beta_0 in C_1.
            beta_sum += num_traits::pow(jr, i - 1) * b;
        }
        let bracket = alpha_sum / factorial(i) + beta_sum / factorial(i - 1);
        values.push(if i % 2 == 0 { bracket } else { -bracket });
    }
    TaylorConstants { values }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderReport {
    pub consistent: bool,
    /// Largest `p` with `C_0 = ... = C_p = 0`; 0 when even `C_0` is nonzero.
    pub order: usize,
    /// First nonzero Taylor constant, `C_{p+1}` for a method of order `p`.
    pub error_constant: Rational,
    pub constants: TaylorConstants,
}

impl OrderReport {
    /// Flat `key=value` lines: `order=`, `error_constant=`, `consistent=`, then `C0=`..`Cq=`.
    pub fn to_key_values(&self) -> String {
        let mut out = format!(
            "order={}\nerror_constant={}\nconsistent={}\n",
            self.order, self.error_constant, self.consistent
        );
        for (i, c) in self.constants.values().iter().enumerate() {
            out.push_str(&format!("C{i}={c}\n"));
        }
        out
    }
}

impl fmt::Display for OrderReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_key_values().trim_end())
    }
}

/// Order and error constant, searching the Taylor constants up to `C_{k+3}`.
pub fn order_report(t: &Tableau) -> Result<OrderReport> {
    let constants = taylor_constants(t, t.k() + 3);
    let Some(first_nonzero) = constants.values.iter().position(|c| !c.is_zero()) else {
        return Err(Error::Analysis(format!(
            "{}: Taylor constants C_0..C_{} all vanish",
            t.name(),
            t.k() + 3
        )));
    };
    let order = first_nonzero.saturating_sub(1);
    Ok(OrderReport {
        consistent: first_nonzero >= 2,
        order,
        error_constant: constants.values[first_nonzero].clone(),
        constants,
    })
}

/// `sum alpha_j = 0` and `sum j alpha_j + sum beta_j = 0`.
pub fn consistency_by_sums(t: &Tableau) -> bool {
    let alpha_sum: Rational = t.alphas().iter().sum();
    let weighted: Rational = t
        .alphas()
        .iter()
        .enumerate()
        .map(|(j, a)| a * int(j as i64))
        .sum();
    let beta_sum: Rational = t.betas().iter().sum();
    alpha_sum.is_zero() && (weighted + beta_sum).is_zero()
}

/// The characteristic polynomials `rho(x) = sum alpha_j x^(k-j)` and
/// `sigma(x) = sum beta_j x^(k-j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacteristicPair {
    pub rho: RationalPoly,
    pub sigma: RationalPoly,
}

pub fn characteristic_pair(t: &Tableau) -> CharacteristicPair {
    CharacteristicPair {
        rho: RationalPoly::from_descending(t.alphas()),
        sigma: RationalPoly::from_descending(t.betas()),
    }
}

/// `rho(1) = 0` and `rho'(1) = sigma(1)`.
pub fn consistency_by_polys(t: &Tableau) -> bool {
    let pair = characteristic_pair(t);
    let one = Rational::one();
    pair.rho.eval(&one).is_zero() && pair.rho.derivative().eval(&one) == pair.sigma.eval(&one)
}

/// `L_h` applied to `y(t) = t^q` at `t = k` with `h = 1`, evaluated exactly.
pub fn operator_on_monomial(t: &Tableau, q: u32) -> Rational {
    let k = t.k() as i64;
    let y = |x: i64| num_traits::pow(int(x), q as usize);
    let dy = |x: i64| {
        if q == 0 {
            Rational::zero()
        } else {
            int(q as i64) * num_traits::pow(int(x), q as usize - 1)
        }
    };
    t.alphas()
        .iter()
        .zip(t.betas())
        .enumerate()
        .map(|(j, (a, b))| {
            let x = k - j as i64;
            a * y(x) - b * dy(x)
        })
        .sum()
}
