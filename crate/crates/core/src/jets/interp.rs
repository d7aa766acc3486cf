//! Recovering the counting polynomial from counts at several primes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::CountTable;
use crate::algebra::LaurentPoly;
use crate::error::{Error, Result};

/// Extra primes beyond `degree_bound + 1` that must be reproduced.
pub const MIN_VERIFY: usize = 2;

/// The counting polynomial `P(q)`, re-read as a polynomial in `L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPoly {
    pub class: LaurentPoly,
    pub degree_bound: usize,
}

impl ClassPoly {
    /// `χ_c`, the value at `L = 1`.
    pub fn chi_c(&self) -> i128 {
        self.class.eval_at_one()
    }
}

/// Newton coefficients through `(x_i, y_i)`, converted to the monomial basis.
fn newton(points: &[(BigRational, BigRational)]) -> Vec<BigRational> {
    let n = points.len();
    let mut dd: Vec<BigRational> = points.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            let den = &points[i].0 - &points[i - level].0;
            dd[i] = num / den;
        }
    }
    // Horner in the Newton basis
    let mut coeffs = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        // coeffs = coeffs·(x − x_i) + dd[i]
        let xi = &points[i].0;
        let mut next = vec![BigRational::zero(); n];
        for k in 0..n {
            if coeffs[k].is_zero() {
                continue;
            }
            if k + 1 < n {
                next[k + 1] += &coeffs[k];
            }
            next[k] -= &coeffs[k] * xi;
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    coeffs
}

fn eval(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Unique polynomial of degree `≤ degree_bound` through the first
/// `degree_bound + 1` rows, required to have integer coefficients and to
/// reproduce every further row.
pub fn interpolate_class(table: &CountTable, degree_bound: usize) -> Result<ClassPoly> {
    interpolate_scaled(table, degree_bound, 0)
}

/// As [`interpolate_class`] for `count / q^shift`; the result is multiplied
/// back by `L^shift`.
pub fn interpolate_scaled(table: &CountTable, degree_bound: usize, shift: u32) -> Result<ClassPoly> {
    let needed = degree_bound + 1 + MIN_VERIFY;
    if table.rows.len() < needed {
        return Err(Error::NotEnoughPrimes { needed, have: table.rows.len() });
    }
    let fail = || Error::Interpolation { degree_bound: degree_bound + shift as usize, table: table.clone() };
    let mut points = Vec::with_capacity(table.rows.len());
    for &(q, n) in &table.rows {
        let scale = BigInt::from(q).pow(shift);
        let n = BigInt::from(n);
        if !(&n % &scale).is_zero() {
            return Err(fail());
        }
        points.push((BigRational::from_integer(BigInt::from(q)), BigRational::from_integer(n / scale)));
    }
    let coeffs = newton(&points[..degree_bound + 1]);
    if coeffs.iter().any(|c| !c.is_integer()) {
        return Err(fail());
    }
    if points[degree_bound + 1..].iter().any(|(x, y)| eval(&coeffs, x) != *y) {
        return Err(fail());
    }
    let mut terms = Vec::with_capacity(coeffs.len());
    for (k, c) in coeffs.iter().enumerate() {
        let c = c.to_integer().to_i128().ok_or_else(fail)?;
        terms.push((k as i64 + shift as i64, c));
    }
    Ok(ClassPoly { class: LaurentPoly::from_terms(terms), degree_bound: degree_bound + shift as usize })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(u64, u128)]) -> CountTable {
        CountTable { rows: rows.to_vec() }
    }

    #[test]
    fn linear_counts() {
        let t = table(&[(5, 10), (7, 14), (11, 22), (13, 26), (17, 34)]);
        let c = interpolate_class(&t, 2).unwrap();
        assert_eq!(c.class, LaurentPoly::monomial(1, 2));
        assert_eq!(c.chi_c(), 2);
    }

    #[test]
    fn margin_is_required() {
        let t = table(&[(5, 10), (7, 14), (11, 22), (13, 26)]);
        assert!(matches!(interpolate_class(&t, 2), Err(Error::NotEnoughPrimes { needed: 5, have: 4 })));
    }

    #[test]
    fn constants_and_zero() {
        let t = table(&[(2, 1), (3, 1), (5, 1), (7, 1)]);
        assert_eq!(interpolate_class(&t, 1).unwrap().class, LaurentPoly::one());
        let z = table(&[(2, 0), (3, 0), (5, 0), (7, 0)]);
        assert!(interpolate_class(&z, 1).unwrap().class.is_zero());
    }

    #[test]
    fn non_polynomial_counts_fail() {
        // q + (−1)^{(q−1)/2}: points on x² + y² = 1 over F_q, not a polynomial
        let t = table(&[(3, 4), (5, 4), (7, 8), (11, 12), (13, 12)]);
        match interpolate_class(&t, 2) {
            Err(Error::Interpolation { table: got, .. }) => assert_eq!(got, t),
            other => panic!("expected interpolation failure, got {other:?}"),
        }
    }

    #[test]
    fn scaled_interpolation() {
        // 2(q − 1)q^3
        let rows: Vec<(u64, u128)> =
            [5u64, 13, 17, 29, 37].iter().map(|&q| (q, 2 * (q as u128 - 1) * (q as u128).pow(3))).collect();
        let c = interpolate_scaled(&table(&rows), 1, 3).unwrap();
        assert_eq!(c.class, LaurentPoly::from_terms([(4, 2), (3, -2)]));
    }
}
