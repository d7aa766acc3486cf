//! Integer Laurent polynomials in a single symbol.
//!
//! The symbol is usually the class `L` of the affine line, but the same type
//! carries Laurent polynomials in `T` (for the Γ-side sums) and in `U` (for
//! the polytope zeta functions). Only the printing differs.
//!
//! Coefficients are `i128`. Every arithmetic step is checked; an overflow
//! aborts with a panic instead of wrapping.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[inline]
pub(crate) fn ck_add(a: i128, b: i128) -> i128 {
    a.checked_add(b).expect("coefficient overflow in exact arithmetic")
}

#[inline]
pub(crate) fn ck_mul(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("coefficient overflow in exact arithmetic")
}

/// Sparse integer Laurent polynomial; terms are sorted by exponent and
/// never carry a zero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: Vec<(i64, i128)>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i128) -> Self {
        Self::monomial(0, c)
    }

    /// `c · L^exp`.
    pub fn monomial(exp: i64, c: i128) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Self { terms: vec![(exp, c)] }
        }
    }

    /// The symbol itself.
    pub fn var() -> Self {
        Self::monomial(1, 1)
    }

    /// Builds from arbitrary `(exponent, coefficient)` pairs, merging repeated
    /// exponents and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (i64, i128)>>(terms: I) -> Self {
        let mut acc: BTreeMap<i64, i128> = BTreeMap::new();
        for (e, c) in terms {
            let slot = acc.entry(e).or_insert(0);
            *slot = ck_add(*slot, c);
        }
        Self { terms: acc.into_iter().filter(|&(_, c)| c != 0).collect() }
    }

    /// Builds from a dense coefficient vector starting at exponent `low`.
    pub fn from_dense(low: i64, coeffs: &[i128]) -> Self {
        Self { terms: coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (low + i as i64, c)).collect() }
    }

    pub fn terms(&self) -> &[(i64, i128)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms == [(0, 1)]
    }

    pub fn coeff(&self, exp: i64) -> i128 {
        match self.terms.binary_search_by_key(&exp, |&(e, _)| e) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    /// Highest exponent, `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        self.terms.last().map(|&(e, _)| e)
    }

    /// Lowest exponent, `None` for zero.
    pub fn low_degree(&self) -> Option<i64> {
        self.terms.first().map(|&(e, _)| e)
    }

    pub fn leading_coeff(&self) -> Option<i128> {
        self.terms.last().map(|&(_, c)| c)
    }

    /// Multiplication by `L^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { terms: self.terms.iter().map(|&(e, c)| (e + k, c)).collect() }
    }

    pub fn scale(&self, s: i128) -> Self {
        if s == 0 {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|&(e, c)| (e, ck_mul(c, s))).collect() }
    }

    /// `self^k` for `k ≥ 0`.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// If `self = ±L^a`, returns `(±1, a)`.
    pub fn as_signed_monomial(&self) -> Option<(i128, i64)> {
        match self.terms.as_slice() {
            [(e, c)] if *c == 1 || *c == -1 => Some((*c, *e)),
            _ => None,
        }
    }

    /// Value at `L = 1`: the sum of the coefficients.
    pub fn eval_at_one(&self) -> i128 {
        self.terms.iter().fold(0, |acc, &(_, c)| ck_add(acc, c))
    }

    /// Exact value at the integer `q`; negative exponents contribute `q^{-k}`.
    pub fn eval_at_int(&self, q: i64) -> BigRational {
        let base = BigRational::from_integer(BigInt::from(q));
        let mut acc = BigRational::zero();
        for &(e, c) in &self.terms {
            let mut term = BigRational::from_integer(BigInt::from(c));
            let p = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
            if e >= 0 {
                term *= p;
            } else {
                term /= p;
            }
            acc += term;
        }
        acc
    }

    /// Exact quotient by `d` when `d` divides `self` in `Z[L, L^{-1}]`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (d_low, d_lead_e, d_lead) = (d.low_degree()?, d.degree()?, d.leading_coeff()?);
        let mut rem: BTreeMap<i64, i128> = self.terms.iter().copied().collect();
        let mut quot = Vec::new();
        let floor = self.low_degree()? - d_low;
        while let Some((&top, &c)) = rem.iter().next_back() {
            if top - d_lead_e < floor {
                return None;
            }
            if c % d_lead != 0 {
                return None;
            }
            let qc = c / d_lead;
            let qe = top - d_lead_e;
            quot.push((qe, qc));
            for &(e, dc) in &d.terms {
                let slot = rem.entry(qe + e).or_insert(0);
                *slot = ck_add(*slot, -ck_mul(qc, dc));
                if *slot == 0 {
                    rem.remove(&(qe + e));
                }
            }
        }
        Some(Self::from_terms(quot))
    }

    /// Renders with the given symbol, highest power first (`"L^2 - 2*L + 1"`).
    pub fn display_with(&self, symbol: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, &(e, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.unsigned_abs();
            if i == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            let mono = match e {
                0 => String::new(),
                1 => symbol.to_string(),
                _ => format!("{symbol}^{e}"),
            };
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag == 1 {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("L"))
    }
}

impl PartialOrd for LaurentPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LaurentPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.cmp(&other.terms)
    }
}

fn merge(a: &[(i64, i128)], b: &[(i64, i128)], sign: i128) -> Vec<(i64, i128)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => unreachable!(),
        };
        match take {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push((b[j].0, ck_mul(sign, b[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let c = ck_add(a[i].1, ck_mul(sign, b[j].1));
                if c != 0 {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly { terms: merge(&self.terms, &rhs.terms, 1) }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly { terms: merge(&self.terms, &rhs.terms, -1) }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let lo = self.terms[0].0 + rhs.terms[0].0;
        let hi = self.terms.last().unwrap().0 + rhs.terms.last().unwrap().0;
        let span = (hi - lo) as usize + 1;
        // dense scratch unless the product is very sparse
        if span <= 4 * (self.terms.len() * rhs.terms.len()) + 64 {
            let mut buf = vec![0i128; span];
            for &(ea, ca) in &self.terms {
                for &(eb, cb) in &rhs.terms {
                    let slot = &mut buf[(ea + eb - lo) as usize];
                    *slot = ck_add(*slot, ck_mul(ca, cb));
                }
            }
            LaurentPoly::from_dense(lo, &buf)
        } else {
            LaurentPoly::from_terms(
                self.terms
                    .iter()
                    .flat_map(|&(ea, ca)| rhs.terms.iter().map(move |&(eb, cb)| (ea + eb, ck_mul(ca, cb)))),
            )
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1)
    }
}

impl Zero for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for LaurentPoly {
    fn one() -> Self {
        LaurentPoly::one()
    }
}

impl From<i128> for LaurentPoly {
    fn from(c: i128) -> Self {
        Self::constant(c)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.terms.iter().map(|&(e, c)| (e, c)).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<(i64, i128)> = Vec::deserialize(d)?;
        Ok(Self::from_terms(pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(t: &[(i64, i128)]) -> LaurentPoly {
        LaurentPoly::from_terms(t.iter().copied())
    }

    #[test]
    fn eval_at_one_examples() {
        assert_eq!(lp(&[(2, 1), (1, -2), (0, 1)]).eval_at_one(), 0);
        assert_eq!(LaurentPoly::zero().eval_at_one(), 0);
        assert_eq!(lp(&[(-1, 2), (0, 3)]).eval_at_one(), 5);
    }

    #[test]
    fn eval_at_int_examples() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(LaurentPoly::var().eval_at_int(5), r(5, 1));
        assert_eq!(LaurentPoly::monomial(-1, 1).eval_at_int(2), r(1, 2));
        assert_eq!(lp(&[(1, 2), (0, 3)]).eval_at_int(7), r(17, 1));
    }

    #[test]
    fn no_zero_terms_stored() {
        let a = lp(&[(1, 1), (0, 1)]);
        let b = lp(&[(1, 1), (0, -1)]);
        let d = &a - &b;
        assert_eq!(d.terms(), &[(0, 2)]);
        assert!((&a - &a).is_zero());
        assert!(lp(&[(3, 0)]).is_zero());
    }

    #[test]
    fn display() {
        assert_eq!(lp(&[(2, 1), (1, -2), (0, 1)]).to_string(), "L^2 - 2*L + 1");
        assert_eq!(lp(&[(1, 1), (0, -1)]).display_with("T"), "T - 1");
        assert_eq!(lp(&[(-1, -2)]).to_string(), "-2*L^-1");
    }

    #[test]
    fn exact_division() {
        let lm1 = lp(&[(1, 1), (0, -1)]);
        let sq = &lm1 * &lm1;
        assert_eq!(sq.div_exact(&lm1), Some(lm1.clone()));
        assert_eq!(lp(&[(1, 1)]).div_exact(&lm1), None);
        assert_eq!(lp(&[(3, 2)]).div_exact(&lp(&[(1, 2)])), Some(lp(&[(2, 1)])));
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_aborts() {
        let big = LaurentPoly::constant(i128::MAX / 2 + 1);
        let _ = &big + &big;
    }

    #[test]
    fn json_shape() {
        let p = lp(&[(1, 1), (0, -1)]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[[0,-1],[1,1]]");
        let back: LaurentPoly = serde_json::from_str("[[1,1],[0,-1]]").unwrap();
        assert_eq!(back, p);
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-6i64..6, -20i128..20), 0..6).prop_map(LaurentPoly::from_terms)
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a * &b).eval_at_one(), a.eval_at_one() * b.eval_at_one());
            if !b.is_zero() {
                prop_assert_eq!((&a * &b).div_exact(&b), Some(a.clone()));
            }
        }
    }
}
