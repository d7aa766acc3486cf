//! Integer polynomials in `x1..xn` and their text syntax.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{ck_add, ck_mul};
use crate::error::{Error, Result};

/// Sparse polynomial with `i128` coefficients; every stored exponent vector
/// has length `n_vars` and every stored coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultiPoly {
    n_vars: usize,
    terms: BTreeMap<Vec<u32>, i128>,
}

impl MultiPoly {
    pub fn zero(n_vars: usize) -> Self {
        Self { n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: i128) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(vec![0; n_vars], c);
        p
    }

    /// `x_{i+1}` (variables are 0-indexed internally).
    pub fn var(n_vars: usize, i: usize) -> Self {
        assert!(i < n_vars, "variable index out of range");
        let mut e = vec![0; n_vars];
        e[i] = 1;
        let mut p = Self::zero(n_vars);
        p.add_term(e, 1);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, i128)>>(n_vars: usize, terms: I) -> Self {
        let mut p = Self::zero(n_vars);
        for (e, c) in terms {
            assert_eq!(e.len(), n_vars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: i128) {
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(e).or_insert(0);
        *slot = ck_add(*slot, c);
        if *slot == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, i128)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Same polynomial viewed in `n ≥ n_vars` variables.
    pub fn widen(&self, n: usize) -> Self {
        assert!(n >= self.n_vars);
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut e = e.clone();
                e.resize(n, 0);
                (e, c)
            })
            .collect();
        Self { n_vars: n, terms }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let n = self.n_vars.max(other.n_vars);
        (self.widen(n), other.widen(n))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.aligned(other);
        for (e, c) in b.terms {
            a.add_term(e, c);
        }
        a
    }

    pub fn neg(&self) -> Self {
        Self { n_vars: self.n_vars, terms: self.terms.iter().map(|(e, &c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let mut out = Self::zero(a.n_vars);
        for (ea, &ca) in &a.terms {
            for (eb, &cb) in &b.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ck_mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.n_vars, 1);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Value at a rational point.
    pub fn eval(&self, x: &[BigRational]) -> BigRational {
        assert_eq!(x.len(), self.n_vars, "point dimension");
        let mut acc = BigRational::zero();
        for (e, &c) in &self.terms {
            let mut t = BigRational::from_integer(BigInt::from(c));
            for (xi, &k) in x.iter().zip(e) {
                t *= num_traits::pow(xi.clone(), k as usize);
            }
            acc += t;
        }
        acc
    }

    /// Order of vanishing at the origin (lowest total degree); `None` for 0.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    /// Polynomial in the shifted variables `y = x − p`.
    pub fn translate(&self, p: &[BigRational]) -> BTreeMap<Vec<u32>, BigRational> {
        assert_eq!(p.len(), self.n_vars);
        let mut out: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (e, &c) in &self.terms {
            // ∏ (y_i + p_i)^{e_i} expanded binomially
            let mut partial: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
            partial.insert(vec![0; self.n_vars], BigRational::from_integer(BigInt::from(c)));
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut next = BTreeMap::new();
                for (mono, coef) in &partial {
                    let mut binom = BigInt::one();
                    for j in 0..=k {
                        let mut m = mono.clone();
                        m[i] += j;
                        let w = coef
                            * BigRational::from_integer(binom.clone())
                            * num_traits::pow(p[i].clone(), (k - j) as usize);
                        add_rat(&mut next, m, w);
                        binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
                    }
                }
                partial = next;
            }
            for (m, w) in partial {
                add_rat(&mut out, m, w);
            }
        }
        out
    }
}

fn add_rat(map: &mut BTreeMap<Vec<u32>, BigRational>, e: Vec<u32>, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(e.clone()).or_insert_with(BigRational::zero);
    *slot += c;
    if slot.is_zero() {
        map.remove(&e);
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest total degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| b.iter().sum::<u32>().cmp(&a.iter().sum::<u32>()).then(b.cmp(a)));
        for (idx, (e, &c)) in terms.into_iter().enumerate() {
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{k}", i + 1) })
                .collect();
            let mag = c.unsigned_abs();
            let body = match (vars.is_empty(), mag) {
                (true, _) => mag.to_string(),
                (false, 1) => vars.join("*"),
                (false, _) => format!("{mag}*{}", vars.join("*")),
            };
            match (idx, c < 0) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for MultiPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}

/// Parses `+ - * ^` expressions over integers and `x1..xn`. The variable
/// count is the largest index that occurs (at least 1).
pub fn parse_poly(src: &str) -> Result<MultiPoly> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected character"));
    }
    let n = poly.n_vars.max(1);
    Ok(poly.widen(n))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "number out of range".into() })
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let k = self.number()?;
            let k = u32::try_from(k)
                .ok()
                .filter(|&k| k <= 64)
                .ok_or(Error::Parse { pos: at, msg: "exponent too large".into() })?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let at = self.pos;
                let i = self.number()? as usize;
                if i == 0 || i > 64 {
                    return Err(Error::Parse { pos: at, msg: "variables are x1..x64".into() });
                }
                Ok(MultiPoly::var(i, i - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let at = self.pos;
                let v = self.number()?;
                let v = i128::from(v);
                if v > i64::MAX as i128 {
                    return Err(Error::Parse { pos: at, msg: "number out of range".into() });
                }
                Ok(MultiPoly::constant(0, v))
            }
            Some(_) => Err(self.err("expected a number, variable or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let p = parse_poly("x1^2 + x2^3").unwrap();
        assert_eq!(p.n_vars(), 2);
        assert_eq!(p.to_string(), "x2^3 + x1^2");
        assert_eq!(parse_poly("(x1 - 1)^2").unwrap().to_string(), "x1^2 - 2*x1 + 1");
        assert_eq!(parse_poly("x1*x2 - x2*x1").unwrap().to_string(), "0");
        assert_eq!(parse_poly(" -3 * x3 ").unwrap().n_vars(), 3);
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert!(matches!(parse_poly("x1 + * x2"), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(parse_poly("x1 + y"), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(parse_poly("(x1"), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_poly("x0"), Err(Error::Parse { pos: 1, .. })));
        assert!(matches!(parse_poly("x1 x2"), Err(Error::Parse { pos: 3, .. })));
    }

    #[test]
    fn translate_recenters() {
        let f = parse_poly("x1^2 - 2*x1 + 1").unwrap();
        let one = BigRational::one();
        let g = f.translate(std::slice::from_ref(&one));
        assert_eq!(g.len(), 1);
        assert_eq!(g[&vec![2]], one);
        assert!(f.eval(&[BigRational::one()]).is_zero());
    }
}
