//! Rational series `P(T) / ∏ (1 − L^a T^b)` with `P` a Laurent polynomial in
//! `T` over `Z[L, L^{-1}]` and every `b ≥ 1`.
//!
//! The denominator is kept as a factor multiset and never expanded, so the
//! degree and the limit at `T = ∞` read off directly from the factors.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::laurent::LaurentPoly;
use crate::error::{Error, Result};

/// Polynomial in `T` (possibly with negative powers) over `Z[L, L^{-1}]`.
pub type TPoly = BTreeMap<i64, LaurentPoly>;

/// One denominator factor `1 − L^a T^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub a: i64,
    pub b: u32,
}

impl Factor {
    pub fn new(a: i64, b: u32) -> Self {
        assert!(b >= 1, "denominator factor needs b >= 1");
        Self { a, b }
    }
}

/// Degree of a series in `T`; the zero series has degree `−∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SeriesDegree {
    NegInfinity,
    Finite(i64),
}

/// Coefficients of `T^0 .. T^N` of an expansion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesPrefix {
    pub terms: Vec<LaurentPoly>,
}

impl SeriesPrefix {
    pub fn new(terms: Vec<LaurentPoly>) -> Self {
        Self { terms }
    }

    /// Truncation order `N` (the prefix holds `N + 1` terms).
    pub fn order(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, n: usize) -> &LaurentPoly {
        &self.terms[n]
    }

    /// Termwise product (the Hadamard product of two prefixes).
    pub fn termwise_product(&self, other: &Self) -> Self {
        Self { terms: self.terms.iter().zip(&other.terms).map(|(x, y)| x * y).collect() }
    }

    /// Termwise `L → 1`.
    pub fn eval_at_one(&self) -> Vec<i128> {
        self.terms.iter().map(LaurentPoly::eval_at_one).collect()
    }
}

#[derive(Clone, Debug)]
pub struct DaggerSeries {
    num: TPoly,
    den: Vec<Factor>,
}

pub(crate) fn tpoly_clean(p: TPoly) -> TPoly {
    p.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

pub(crate) fn tpoly_add(a: &TPoly, b: &TPoly) -> TPoly {
    let mut out = a.clone();
    for (&e, c) in b {
        let slot = out.entry(e).or_default();
        *slot = &*slot + c;
    }
    tpoly_clean(out)
}

pub(crate) fn tpoly_mul(a: &TPoly, b: &TPoly) -> TPoly {
    let mut out: TPoly = BTreeMap::new();
    for (&ea, ca) in a {
        for (&eb, cb) in b {
            let slot = out.entry(ea + eb).or_default();
            *slot = &*slot + &(ca * cb);
        }
    }
    tpoly_clean(out)
}

/// `p · (1 − L^a T^b)`.
pub(crate) fn tpoly_mul_factor(p: &TPoly, f: Factor) -> TPoly {
    let mut out = p.clone();
    for (&e, c) in p {
        let slot = out.entry(e + f.b as i64).or_default();
        *slot = &*slot - &c.shift(f.a);
    }
    tpoly_clean(out)
}

/// `p / (1 − L^a T^b)` when the division is exact.
pub(crate) fn tpoly_div_factor(p: &TPoly, f: Factor) -> Option<TPoly> {
    let (Some((&lo, _)), Some((&hi, _))) = (p.iter().next(), p.iter().next_back()) else {
        return Some(TPoly::new());
    };
    let b = f.b as i64;
    if hi - lo < b {
        return None;
    }
    // q_k = p_k + L^a q_{k-b}, for k in lo..=hi-b
    let mut q: TPoly = BTreeMap::new();
    for k in lo..=hi - b {
        let mut c = p.get(&k).cloned().unwrap_or_default();
        if let Some(prev) = q.get(&(k - b)) {
            c = &c + &prev.shift(f.a);
        }
        if !c.is_zero() {
            q.insert(k, c);
        }
    }
    if tpoly_mul_factor(&q, f) == *p {
        Some(q)
    } else {
        None
    }
}

/// Multiplies a truncated sequence (indices `0..len`) by `1 − L^a T^b`.
pub(crate) fn seq_mul_factor(seq: &mut [LaurentPoly], f: Factor) {
    let b = f.b as usize;
    for n in (b..seq.len()).rev() {
        let sub = seq[n - b].shift(f.a);
        seq[n] = &seq[n] - &sub;
    }
}

/// Divides a truncated sequence by `1 − L^a T^b` (expands the geometric series).
pub(crate) fn seq_div_factor(seq: &mut [LaurentPoly], f: Factor) {
    let b = f.b as usize;
    for n in b..seq.len() {
        let add = seq[n - b].shift(f.a);
        seq[n] = &seq[n] + &add;
    }
}

impl DaggerSeries {
    pub fn new(num: TPoly, mut den: Vec<Factor>) -> Self {
        den.sort();
        let num = tpoly_clean(num);
        if num.is_empty() {
            den.clear();
        }
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self::new(TPoly::new(), Vec::new())
    }

    pub fn polynomial(num: TPoly) -> Self {
        Self::new(num, Vec::new())
    }

    /// `c · T^k`.
    pub fn monomial(k: i64, c: LaurentPoly) -> Self {
        Self::polynomial(BTreeMap::from([(k, c)]))
    }

    /// `c · T^k / (1 − L^a T^b)`.
    pub fn geometric(k: i64, c: LaurentPoly, f: Factor) -> Self {
        Self::new(BTreeMap::from([(k, c)]), vec![f])
    }

    pub fn numerator(&self) -> &TPoly {
        &self.num
    }

    pub fn denominator(&self) -> &[Factor] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Lowest power of `T` in the numerator.
    pub fn num_low_degree(&self) -> Option<i64> {
        self.num.keys().next().copied()
    }

    pub fn num_degree(&self) -> Option<i64> {
        self.num.keys().next_back().copied()
    }

    /// Sum of the `b` over the denominator factors.
    pub fn den_degree(&self) -> i64 {
        self.den.iter().map(|f| f.b as i64).sum()
    }

    /// `deg_T(P) − Σ b`; `−∞` for the zero series.
    pub fn degree(&self) -> SeriesDegree {
        match self.num_degree() {
            None => SeriesDegree::NegInfinity,
            Some(d) => SeriesDegree::Finite(d - self.den_degree()),
        }
    }

    /// `lim_{T→∞}`: zero when the degree is negative, the leading-coefficient
    /// ratio when it is zero, undefined otherwise.
    pub fn limit(&self) -> Result<LaurentPoly> {
        match self.degree() {
            SeriesDegree::NegInfinity => Ok(LaurentPoly::zero()),
            SeriesDegree::Finite(d) if d < 0 => Ok(LaurentPoly::zero()),
            SeriesDegree::Finite(0) => {
                let (_, lead) = self.num.iter().next_back().expect("nonzero numerator");
                // leading T-coefficient of ∏(1 − L^a T^b) is (−1)^k L^{Σa}
                let k = self.den.len();
                let sum_a: i64 = self.den.iter().map(|f| f.a).sum();
                let eps = if k.is_multiple_of(2) { 1 } else { -1 };
                Ok(lead.scale(eps).shift(-sum_a))
            }
            SeriesDegree::Finite(d) => Err(Error::LimitUndefined { degree: d }),
        }
    }

    /// Coefficients of `T^0 .. T^N` of the expansion in powers of `T`.
    pub fn expand(&self, order: usize) -> SeriesPrefix {
        let low = self.num_low_degree().unwrap_or(0).min(0);
        let len = (order as i64 - low + 1) as usize;
        let mut seq = vec![LaurentPoly::zero(); len];
        for (&e, c) in &self.num {
            let idx = e - low;
            if idx >= 0 && (idx as usize) < len {
                seq[idx as usize] = c.clone();
            }
        }
        for &f in &self.den {
            seq_div_factor(&mut seq, f);
        }
        SeriesPrefix::new(seq.split_off((-low) as usize))
    }

    pub fn add(&self, other: &Self) -> Self {
        // common denominator: multiset union with maximal multiplicities
        let mut mine: BTreeMap<Factor, usize> = BTreeMap::new();
        for f in &self.den {
            *mine.entry(*f).or_default() += 1;
        }
        let mut theirs: BTreeMap<Factor, usize> = BTreeMap::new();
        for f in &other.den {
            *theirs.entry(*f).or_default() += 1;
        }
        let mut common = Vec::new();
        let mut p = self.num.clone();
        let mut q = other.num.clone();
        let keys: std::collections::BTreeSet<Factor> = mine.keys().chain(theirs.keys()).copied().collect();
        for f in keys {
            let (x, y) = (mine.get(&f).copied().unwrap_or(0), theirs.get(&f).copied().unwrap_or(0));
            for _ in 0..x.max(y) {
                common.push(f);
            }
            for _ in x..x.max(y) {
                p = tpoly_mul_factor(&p, f);
            }
            for _ in y..x.max(y) {
                q = tpoly_mul_factor(&q, f);
            }
        }
        Self::new(tpoly_add(&p, &q), common).reduced()
    }

    pub fn neg(&self) -> Self {
        Self::new(self.num.iter().map(|(&e, c)| (e, -c)).collect(), self.den.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut den = self.den.clone();
        den.extend_from_slice(&other.den);
        Self::new(tpoly_mul(&self.num, &other.num), den).reduced()
    }

    /// Multiplies numerator and denominator by the same factor; the series is
    /// unchanged.
    pub fn with_extra_factor(&self, f: Factor) -> Self {
        let mut den = self.den.clone();
        den.push(f);
        Self::new(tpoly_mul_factor(&self.num, f), den)
    }

    /// Substitutes `T → L^s T`: factor `(a, b)` becomes `(a + s·b, b)`.
    pub fn twist(&self, s: i64) -> Self {
        Self::new(
            self.num.iter().map(|(&e, c)| (e, c.shift(s * e))).collect(),
            self.den.iter().map(|f| Factor::new(f.a + s * f.b as i64, f.b)).collect(),
        )
    }

    /// Cancels every denominator factor that divides the numerator exactly.
    pub fn reduced(&self) -> Self {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        // larger b first so that composite factors go before their divisors
        den.sort_by(|x, y| y.b.cmp(&x.b).then(x.a.cmp(&y.a)));
        let mut keep = Vec::with_capacity(den.len());
        for f in den {
            match tpoly_div_factor(&num, f) {
                Some(q) if !num.is_empty() => num = q,
                _ => keep.push(f),
            }
        }
        Self::new(num, keep)
    }

    /// Semantic equality: `P·Q' = P'·Q` as polynomials.
    pub fn same_series(&self, other: &Self) -> bool {
        let mut lhs = self.num.clone();
        for &f in &other.den {
            lhs = tpoly_mul_factor(&lhs, f);
        }
        let mut rhs = other.num.clone();
        for &f in &self.den {
            rhs = tpoly_mul_factor(&rhs, f);
        }
        lhs == rhs
    }

    /// Replaces each `L`-coefficient by its value at `L = 1` and each
    /// factor `(a, b)` by `(0, b)`.
    pub fn eval_l_at_one(&self) -> Self {
        Self::new(
            self.num.iter().map(|(&e, c)| (e, LaurentPoly::constant(c.eval_at_one()))).collect(),
            self.den.iter().map(|f| Factor::new(0, f.b)).collect(),
        )
    }

    pub fn display_with(&self, symbol: &str, var: &str) -> String {
        let num = if self.num.is_empty() {
            "0".to_string()
        } else {
            let parts = self
                .num
                .iter()
                .rev()
                .map(|(&e, c)| {
                    let coeff = c.display_with(symbol);
                    let coeff = if c.terms().len() > 1 { format!("({coeff})") } else { coeff };
                    match e {
                        0 => coeff,
                        _ => {
                            let t = if e == 1 { var.to_string() } else { format!("{var}^{e}") };
                            match c.as_signed_monomial() {
                                Some((1, 0)) => t,
                                Some((-1, 0)) => format!("-{t}"),
                                _ => format!("{coeff}*{t}"),
                            }
                        }
                    }
                })
                .collect::<Vec<_>>();
            let mut out = String::new();
            for (i, p) in parts.iter().enumerate() {
                match (i, p.strip_prefix('-')) {
                    (0, _) => out.push_str(p),
                    (_, Some(rest)) => {
                        out.push_str(" - ");
                        out.push_str(rest);
                    }
                    (_, None) => {
                        out.push_str(" + ");
                        out.push_str(p);
                    }
                }
            }
            out
        };
        if self.den.is_empty() {
            return num;
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|f| {
                let l = match f.a {
                    0 => String::new(),
                    1 => format!("{symbol}*"),
                    a => format!("{symbol}^{a}*"),
                };
                let t = if f.b == 1 { var.to_string() } else { format!("{var}^{}", f.b) };
                format!("(1 - {l}{t})")
            })
            .collect();
        format!("({num}) / {}", den.join(""))
    }
}

impl PartialEq for DaggerSeries {
    fn eq(&self, other: &Self) -> bool {
        self.same_series(other)
    }
}

impl fmt::Display for DaggerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("L", "T"))
    }
}

#[derive(Serialize, Deserialize)]
struct DaggerWire {
    num: Vec<(i64, LaurentPoly)>,
    den: Vec<(i64, u32)>,
}

impl Serialize for DaggerSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DaggerWire {
            num: self.num.iter().map(|(&e, c)| (e, c.clone())).collect(),
            den: self.den.iter().map(|f| (f.a, f.b)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DaggerSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = DaggerWire::deserialize(d)?;
        if w.den.iter().any(|&(_, b)| b == 0) {
            return Err(serde::de::Error::custom("denominator factor with b = 0"));
        }
        let mut num = TPoly::new();
        for (e, c) in w.num {
            let slot = num.entry(e).or_default();
            *slot = &*slot + &c;
        }
        Ok(Self::new(num, w.den.into_iter().map(|(a, b)| Factor::new(a, b)).collect()))
    }
}
