//! `χ_c` from counts over the extensions `F_{p^e}` of one prime.
//!
//! `G(t) = Σ_{e≥1} N_e t^e = Σ_α ± α t / (1 − α t)` over the Frobenius
//! eigenvalues, so `G` is rational and `χ_c = −lim_{t→∞} G(t)`. The
//! denominator is found with Berlekamp–Massey over `Q`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::count::{count_equations, system_equations};
use super::field::{Field, MAX_FIELD_ORDER};
use super::system::JetConstraintSystem;
use crate::error::{Error, Result};

/// Terms beyond `2·(recurrence order)` that must follow the recurrence.
pub const FROBENIUS_MARGIN: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusCounts {
    pub p: u32,
    /// `(e, N_e)` for the unknowns that occur in some equation.
    pub counts: Vec<(u32, u128)>,
    pub recurrence_order: usize,
    pub chi_c: i128,
}

/// Connection polynomial `C` (with `C_0 = 1`) of the shortest linear
/// recurrence generating `s`.
pub fn berlekamp_massey(s: &[BigRational]) -> Vec<BigRational> {
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let (mut len, mut shift) = (0usize, 1usize);
    let mut last = BigRational::one();
    for n in 0..s.len() {
        let mut d = s[n].clone();
        for i in 1..=len {
            d += &c[i] * &s[n - i];
        }
        if d.is_zero() {
            shift += 1;
            continue;
        }
        let coef = &d / &last;
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, BigRational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + shift] -= &coef * bi;
        }
        if 2 * len <= n {
            len = n + 1 - len;
            b = prev;
            last = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.resize(len + 1, BigRational::zero());
    c
}

fn degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// `−lim_{t→∞} Σ_{e≥1} N_e t^e` if the counts determine a recurrence with
/// the required margin.
pub fn chi_from_extension_counts(counts: &[BigRational]) -> Option<(usize, BigRational)> {
    let c = berlekamp_massey(counts);
    let order = c.len() - 1;
    if 2 * order + FROBENIUS_MARGIN > counts.len() {
        return None;
    }
    // G = Σ_{e≥1} N_e t^e; P = C·G mod t^{order+1}
    let g: Vec<BigRational> = std::iter::once(BigRational::zero()).chain(counts.iter().cloned()).collect();
    let p: Vec<BigRational> = (0..=order)
        .map(|k| (0..=k).filter(|&i| i < c.len() && k - i < g.len()).map(|i| &c[i] * &g[k - i]).sum())
        .collect();
    let lim = match (degree(&p), degree(&c)) {
        (None, _) => BigRational::zero(),
        (Some(dp), Some(dc)) if dp < dc => BigRational::zero(),
        (Some(dp), Some(dc)) if dp == dc => &p[dp] / &c[dc],
        _ => return None,
    };
    Some((order, -lim))
}

/// Counts the constrained unknowns of `sys` over `F_{p^e}` for
/// `e = 1, 2, …` until the trace recurrence is determined.
pub fn frobenius_chi_c(sys: &JetConstraintSystem, p: u32, budget: u64) -> Result<FrobeniusCounts> {
    let vars: BTreeSet<u16> = sys.constrained_vars().into_iter().map(|v| v as u16).collect();
    let mut counts = Vec::new();
    let mut e = 1u32;
    loop {
        let q = (p as u64).checked_pow(e);
        if q.is_none_or(|q| q > MAX_FIELD_ORDER) {
            return Err(Error::FrobeniusFit { max_extension: e - 1 });
        }
        let field = Field::new(p, e)?;
        let n = count_equations(&field, system_equations(sys, &field), vars.clone(), budget)?;
        counts.push((e, n));
        let seq: Vec<BigRational> = counts.iter().map(|&(_, n)| BigRational::from_integer(BigInt::from(n))).collect();
        if let Some((order, chi)) = chi_from_extension_counts(&seq) {
            if !chi.is_integer() {
                return Err(Error::FrobeniusFit { max_extension: e });
            }
            let chi_c: i128 = chi.to_integer().try_into().map_err(|_| Error::FrobeniusFit { max_extension: e })?;
            return Ok(FrobeniusCounts { p, counts, recurrence_order: order, chi_c });
        }
        e += 1;
    }
}
