//! Termwise products of rational series.

use num_integer::Integer;

use super::dagger::{seq_mul_factor, DaggerSeries, Factor, SeriesDegree, TPoly};
use crate::error::{Error, Result};

/// Extra expansion terms checked after the numerator has been read off.
pub const VERIFY_MARGIN: usize = 8;

/// Denominator candidate for `h ∗ h'`: one factor per pair of factors.
///
/// With `c = lcm(b, b')`, the roots of `1 − L^a T^b` raised to `c` give
/// `L^{a c / b}`, so a pair contributes `1 − L^{a c/b + a' c/b'} T^c`.
pub fn pair_denominator(left: &[Factor], right: &[Factor]) -> Vec<Factor> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for f in left {
        for g in right {
            let c = f.b.lcm(&g.b);
            let a = f.a * (c / f.b) as i64 + g.a * (c / g.b) as i64;
            out.push(Factor::new(a, c));
        }
    }
    out
}

fn polynomial_part_degree(h: &DaggerSeries) -> i64 {
    match h.degree() {
        SeriesDegree::NegInfinity => -1,
        SeriesDegree::Finite(d) => d.max(-1),
    }
}

/// The unique rational series whose expansion is the termwise product of the
/// expansions of `h` and `h'`.
pub fn hadamard(h: &DaggerSeries, g: &DaggerSeries) -> Result<DaggerSeries> {
    if h.is_zero() || g.is_zero() {
        return Ok(DaggerSeries::zero());
    }
    if h.num_low_degree().unwrap_or(0) < 0 || g.num_low_degree().unwrap_or(0) < 0 {
        return Err(Error::Invalid("Hadamard product needs numerators in nonnegative powers of T".into()));
    }
    let den = pair_denominator(h.denominator(), g.denominator());
    let den_deg: usize = den.iter().map(|f| f.b as usize).sum();
    let poly_part = polynomial_part_degree(h).max(polynomial_part_degree(g));
    let num_bound = (den_deg as i64 + poly_part).max(0) as usize;
    let order = num_bound + den_deg + VERIFY_MARGIN;

    let mut seq = h.expand(order).termwise_product(&g.expand(order)).terms;
    for &f in &den {
        seq_mul_factor(&mut seq, f);
    }
    if let Some(index) = seq.iter().enumerate().skip(num_bound + 1).find(|(_, c)| !c.is_zero()).map(|(i, _)| i) {
        return Err(Error::HadamardVerification { index });
    }
    let num: TPoly = seq
        .into_iter()
        .take(num_bound + 1)
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i64, c))
        .collect();
    Ok(DaggerSeries::new(num, den).reduced())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LaurentPoly;

    fn l(e: i64, c: i128) -> LaurentPoly {
        LaurentPoly::monomial(e, c)
    }

    #[test]
    fn examples() {
        let t1 = DaggerSeries::geometric(1, l(0, 1), Factor::new(0, 1));
        assert_eq!(hadamard(&t1, &t1).unwrap(), t1);

        let tl = DaggerSeries::geometric(1, l(0, 1), Factor::new(1, 1));
        let h = hadamard(&tl, &tl).unwrap();
        assert_eq!(h, DaggerSeries::geometric(1, l(0, 1), Factor::new(2, 1)));
        assert_eq!(h.denominator(), &[Factor::new(2, 1)]);

        let t2 = DaggerSeries::geometric(2, l(0, 1), Factor::new(0, 1));
        assert_eq!(hadamard(&t1, &t2).unwrap(), t2);
    }

    #[test]
    fn mixed_periods() {
        // Σ L^k T^{2k} ∗ Σ T^{3k} = Σ L^{3j} T^{6j}
        let h = DaggerSeries::geometric(0, l(0, 1), Factor::new(1, 2));
        let g = DaggerSeries::geometric(0, l(0, 1), Factor::new(0, 3));
        let r = hadamard(&h, &g).unwrap();
        assert_eq!(r, DaggerSeries::geometric(0, l(0, 1), Factor::new(3, 6)));
    }

    #[test]
    fn polynomial_parts() {
        let p = DaggerSeries::polynomial(TPoly::from([(0, l(0, 3)), (2, l(1, 1)), (5, l(0, 7))]));
        let ones = DaggerSeries::geometric(0, l(0, 1), Factor::new(0, 1));
        assert_eq!(hadamard(&p, &ones).unwrap(), p);
    }
}
