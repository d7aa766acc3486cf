//! The level equations cutting out the jets with `f(φ) ≡ t^m mod t^{m+1}`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::MultiPoly;
use crate::error::{Error, Result};

/// Sorted `(variable, exponent)` pairs with positive exponents.
pub type Monomial = Vec<(u16, u16)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

type RPoly = BTreeMap<Monomial, BigRational>;

fn rpoly_add_into(acc: &mut RPoly, m: Monomial, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let slot = acc.entry(m.clone()).or_insert_with(BigRational::zero);
    *slot += c;
    if slot.is_zero() {
        acc.remove(&m);
    }
}

/// Product of two series truncated after `t^m`.
fn series_mul(a: &[RPoly], b: &[RPoly], m: usize) -> Vec<RPoly> {
    let mut out = vec![RPoly::new(); m + 1];
    for (i, pa) in a.iter().enumerate() {
        for (j, pb) in b.iter().enumerate().take(m + 1 - i) {
            for (ma, ca) in pa {
                for (mb, cb) in pb {
                    rpoly_add_into(&mut out[i + j], mono_mul(ma, mb), ca * cb);
                }
            }
        }
    }
    out
}

/// One level equation `g_k = target` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelEquation {
    pub terms: Vec<(Monomial, BigInt)>,
    pub target: BigInt,
    /// Factor by which the rational coefficients were multiplied.
    pub denominator: BigInt,
}

/// The system for `X_{m,x}` in the `n·m` unknowns `a_{i,j}`; `a_{i,j}` has
/// index `(j − 1)·n + i` with `i` 0-based and `j` the level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetConstraintSystem {
    pub n: usize,
    pub m: usize,
    pub levels: Vec<LevelEquation>,
}

impl JetConstraintSystem {
    pub fn n_unknowns(&self) -> usize {
        self.n * self.m
    }

    pub fn var_index(&self, i: usize, level: usize) -> usize {
        (level - 1) * self.n + i
    }

    /// Level of an unknown.
    pub fn var_level(&self, idx: usize) -> usize {
        idx / self.n + 1
    }

    pub fn var_name(&self, idx: usize) -> String {
        format!("a{}_{}", idx % self.n + 1, self.var_level(idx))
    }

    /// Unknowns occurring in some level equation.
    pub fn constrained_vars(&self) -> BTreeSet<usize> {
        self.levels
            .iter()
            .flat_map(|l| l.terms.iter().flat_map(|(mono, _)| mono.iter().map(|&(v, _)| v as usize)))
            .collect()
    }

    pub fn free_var_count(&self) -> usize {
        self.n_unknowns() - self.constrained_vars().len()
    }

    /// Every monomial of `g_k` only involves unknowns of level `≤ k`.
    pub fn is_level_local(&self) -> bool {
        self.levels.iter().enumerate().all(|(k, l)| {
            l.terms.iter().all(|(mono, _)| mono.iter().all(|&(v, _)| self.var_level(v as usize) <= k + 1))
        })
    }

    /// Whether `g_k = target` for all levels.
    pub fn is_solution(&self, values: &[BigInt]) -> bool {
        self.levels.iter().all(|l| {
            let v: BigInt = l
                .terms
                .iter()
                .map(|(mono, c)| {
                    mono.iter()
                        .fold(c.clone(), |acc, &(x, e)| acc * num_traits::pow(values[x as usize].clone(), e as usize))
                })
                .sum();
            v == l.target
        })
    }

    /// Primes that divide a cleared denominator.
    pub fn denominators(&self) -> Vec<BigInt> {
        self.levels.iter().map(|l| l.denominator.clone()).collect()
    }
}

/// Expands `f(x + Σ_j a_{·,j} t^j)` modulo `t^{m+1}` and clears the
/// denominators of each level separately.
pub fn build_jet_system(f: &MultiPoly, x: &[BigRational], m: usize) -> Result<JetConstraintSystem> {
    assert!(m >= 1, "jet order must be positive");
    let n = f.n_vars();
    if x.len() != n {
        return Err(Error::Invalid(format!("base point has {} coordinates, polynomial has {n} variables", x.len())));
    }
    if n * m > u16::MAX as usize {
        return Err(Error::Invalid("too many jet unknowns".into()));
    }
    let value = f.eval(x);
    if !value.is_zero() {
        return Err(Error::NonVanishing { value: value.to_string() });
    }
    let g = f.translate(x);

    let max_exp: Vec<u32> = (0..n).map(|i| g.keys().map(|e| e[i]).max().unwrap_or(0)).collect();
    // powers[i][k] = (Σ_j a_{i,j} t^j)^k truncated
    let mut powers: Vec<Vec<Vec<RPoly>>> = Vec::with_capacity(n);
    for (i, &top) in max_exp.iter().enumerate() {
        let mut base = vec![RPoly::new(); m + 1];
        for (j, slot) in base.iter_mut().enumerate().skip(1) {
            slot.insert(vec![(((j - 1) * n + i) as u16, 1)], BigRational::one());
        }
        let mut one = vec![RPoly::new(); m + 1];
        one[0].insert(vec![], BigRational::one());
        let mut list = vec![one];
        for k in 1..=top as usize {
            let next = series_mul(&list[k - 1], &base, m);
            list.push(next);
        }
        powers.push(list);
    }

    let mut total = vec![RPoly::new(); m + 1];
    for (e, c) in &g {
        let mut prod: Option<Vec<RPoly>> = None;
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let p = &powers[i][k as usize];
            prod = Some(match prod {
                None => p.clone(),
                Some(acc) => series_mul(&acc, p, m),
            });
        }
        let prod = prod.unwrap_or_else(|| {
            let mut one = vec![RPoly::new(); m + 1];
            one[0].insert(vec![], BigRational::one());
            one
        });
        for (k, poly) in prod.into_iter().enumerate() {
            for (mono, coef) in poly {
                rpoly_add_into(&mut total[k], mono, coef * c);
            }
        }
    }

    let levels = (1..=m)
        .map(|k| {
            let den = total[k].values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let terms = total[k]
                .iter()
                .map(|(mono, c)| (mono.clone(), (c * BigRational::from_integer(den.clone())).to_integer()))
                .collect();
            let target = if k == m { den.clone() } else { BigInt::zero() };
            LevelEquation { terms, target, denominator: den.abs() }
        })
        .collect();
    Ok(JetConstraintSystem { n, m, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::parse_poly;

    fn origin(n: usize) -> Vec<BigRational> {
        vec![BigRational::zero(); n]
    }

    #[test]
    fn square_at_level_two() {
        let f = parse_poly("x1^2").unwrap();
        let s = build_jet_system(&f, &origin(1), 2).unwrap();
        assert!(s.levels[0].terms.is_empty());
        assert_eq!(s.levels[1].terms, vec![(vec![(0, 2)], BigInt::from(1))]);
        assert_eq!(s.levels[1].target, BigInt::from(1));
        assert!(s.is_level_local());
    }

    #[test]
    fn node_level_one_is_inconsistent() {
        let f = parse_poly("x1*x2").unwrap();
        let s = build_jet_system(&f, &origin(2), 1).unwrap();
        assert!(s.levels[0].terms.is_empty());
        assert_eq!(s.levels[0].target, BigInt::from(1));
    }

    #[test]
    fn linear_is_a_single_unknown() {
        let s = build_jet_system(&parse_poly("x1").unwrap(), &origin(1), 1).unwrap();
        assert_eq!(s.levels[0].terms, vec![(vec![(0, 1)], BigInt::from(1))]);
    }

    #[test]
    fn nonvanishing_is_rejected() {
        let f = parse_poly("x1 + 1").unwrap();
        assert!(matches!(build_jet_system(&f, &origin(1), 1), Err(Error::NonVanishing { .. })));
    }

    #[test]
    fn rational_base_point_clears_denominators() {
        // 4x² − 1 at x = 1/2 becomes 4y² + 4y
        let f = parse_poly("4*x1^2 - 1").unwrap();
        let half = BigRational::new(1.into(), 2.into());
        let s = build_jet_system(&f, &[half], 2).unwrap();
        assert_eq!(s.levels[0].terms, vec![(vec![(0, 1)], BigInt::from(4))]);
        assert!(s.levels.iter().all(|l| l.terms.iter().all(|(_, c)| !c.is_zero())));
        assert!(s.is_level_local());
    }
}
