//! Recovering a rational form from finitely many expansion coefficients.

use std::collections::BTreeMap;

use super::dagger::{seq_mul_factor, tpoly_div_factor, DaggerSeries, Factor, SeriesPrefix, TPoly};
use super::laurent::LaurentPoly;
use crate::error::{Error, Result};

/// Smallest allowed number of verification terms.
pub const MIN_MARGIN: usize = 4;

/// Largest survivor multiset that is searched exhaustively for a minimal
/// denominator after greedy cancellation.
const EXHAUSTIVE_LIMIT: usize = 14;

#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    /// Terms beyond `deg Q + numerator bound + 1` that must also match.
    pub margin: usize,
    /// Upper bound on `deg_T` of the numerator; inferred from the prefix
    /// length when absent.
    pub num_degree_bound: Option<usize>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { margin: MIN_MARGIN, num_degree_bound: None }
    }
}

/// `Q · s mod T^len`; returns the numerator if every coefficient above
/// `bound` vanishes.
fn numerator_for(prefix: &[LaurentPoly], den: &[Factor], bound: usize) -> Option<TPoly> {
    let mut seq = prefix.to_vec();
    for &f in den {
        seq_mul_factor(&mut seq, f);
    }
    if seq.iter().skip(bound + 1).any(|c| !c.is_zero()) {
        return None;
    }
    Some(
        seq.into_iter().take(bound + 1).enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as i64, c)).collect(),
    )
}

fn den_key(den: &[Factor]) -> (i64, usize, Vec<Factor>) {
    let mut sorted = den.to_vec();
    sorted.sort();
    (den.iter().map(|f| f.b as i64).sum(), den.len(), sorted)
}

/// Finds `P / Q` reproducing `prefix`, with `Q` a sub-multiset of
/// `candidates`.
///
/// Every candidate is first used, then factors are cancelled greedily
/// (largest `b` first), and finally the survivors are searched exhaustively
/// for the smallest `Σ b`, ties broken by fewer factors and then by the
/// lexicographic order of the sorted `(a, b)` list.
pub fn fit(prefix: &SeriesPrefix, candidates: &[Factor], opts: FitOptions) -> Result<DaggerSeries> {
    let margin = opts.margin.max(MIN_MARGIN);
    let len = prefix.len();
    let fail = Error::FitFailure { terms: len };
    let full_deg: usize = candidates.iter().map(|f| f.b as usize).sum();
    let bound = match opts.num_degree_bound {
        Some(b) => b,
        None => len.checked_sub(1 + margin + full_deg).ok_or(fail)?,
    };
    if bound + full_deg + 1 + margin > len {
        return Err(Error::FitFailure { terms: len });
    }
    let terms = &prefix.terms;

    let num = numerator_for(terms, candidates, bound).ok_or(Error::FitFailure { terms: len })?;
    let mut greedy = DaggerSeries::new(num, candidates.to_vec()).reduced();
    if greedy.is_zero() {
        return Ok(DaggerSeries::zero());
    }

    // A subset Q' of the survivors Q represents the same series exactly when
    // Q / Q' divides the numerator, so subsets are tested by division.
    let survivors: Vec<Factor> = greedy.denominator().to_vec();
    if survivors.len() > 1 && survivors.len() <= EXHAUSTIVE_LIMIT {
        let mut best: Option<((i64, usize, Vec<Factor>), TPoly)> = None;
        for mask in 0u32..(1 << survivors.len()) {
            let (den, rest): (Vec<(usize, &Factor)>, Vec<(usize, &Factor)>) =
                survivors.iter().enumerate().partition(|(i, _)| mask & (1 << i) != 0);
            let den: Vec<Factor> = den.into_iter().map(|(_, f)| *f).collect();
            let key = den_key(&den);
            if best.as_ref().is_some_and(|(k, _)| key >= *k) {
                continue;
            }
            let p = rest.into_iter().try_fold(greedy.numerator().clone(), |p, (_, f)| tpoly_div_factor(&p, *f));
            if let Some(p) = p {
                best = Some((key, p));
            }
        }
        if let Some(((_, _, den), p)) = best {
            greedy = DaggerSeries::new(p, den);
        }
    }
    Ok(greedy)
}

/// Fits a sequence of plain integers (no `L`).
pub fn fit_integers(values: &[i128], candidates: &[Factor], opts: FitOptions) -> Result<DaggerSeries> {
    let prefix = SeriesPrefix::new(values.iter().map(|&v| LaurentPoly::constant(v)).collect());
    fit(&prefix, candidates, opts)
}

/// Multiset with each factor repeated `mult` times, deduplicated first.
pub fn with_multiplicity(factors: &[Factor], mult: usize) -> Vec<Factor> {
    let mut counts: BTreeMap<Factor, usize> = BTreeMap::new();
    for f in factors {
        counts.insert(*f, mult);
    }
    counts.into_iter().flat_map(|(f, k)| std::iter::repeat_n(f, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(e: i64, c: i128) -> LaurentPoly {
        LaurentPoly::monomial(e, c)
    }

    #[test]
    fn period_three_prefix() {
        // 2L^{-1}T, 2L^{-2}T^4, 2L^{-3}T^7, ...
        let mut terms = vec![LaurentPoly::zero(); 18];
        for k in 0..6 {
            terms[1 + 3 * k] = l(-(k as i64) - 1, 2);
        }
        let h = fit(&SeriesPrefix::new(terms.clone()), &[Factor::new(-1, 3)], FitOptions::default()).unwrap();
        let expected = DaggerSeries::geometric(1, l(-1, 2), Factor::new(-1, 3));
        assert_eq!(h, expected);
        assert_eq!(h.denominator(), &[Factor::new(-1, 3)]);
        assert_eq!(h.expand(17).terms, terms);
    }

    #[test]
    fn constant_ones() {
        let h = fit_integers(&[1; 6], &[Factor::new(0, 1)], FitOptions::default()).unwrap();
        assert_eq!(h, DaggerSeries::geometric(0, l(0, 1), Factor::new(0, 1)));
    }

    #[test]
    fn parity_needs_period_two() {
        let r = fit_integers(&[0, 1, 0, 1, 0, 1], &[Factor::new(0, 1)], FitOptions::default());
        assert!(matches!(r, Err(Error::FitFailure { .. })));
        let h = fit_integers(&[0, 1, 0, 1, 0, 1, 0, 1], &[Factor::new(0, 2)], FitOptions::default()).unwrap();
        assert_eq!(h, DaggerSeries::geometric(1, l(0, 1), Factor::new(0, 2)));
    }

    #[test]
    fn minimal_denominator_is_chosen() {
        // 1/(1+T) = (1−T)/(1−T^2): needs (0,2) and nothing else
        let vals: Vec<i128> = (0..20).map(|n| if n % 2 == 0 { 1 } else { -1 }).collect();
        let cands = [Factor::new(0, 1), Factor::new(0, 1), Factor::new(0, 2), Factor::new(0, 2)];
        let h = fit_integers(&vals, &cands, FitOptions::default()).unwrap();
        assert_eq!(h.denominator(), &[Factor::new(0, 2)]);
        // quadratic growth keeps a squared factor
        let vals: Vec<i128> = (0..20).map(|n| n as i128).collect();
        let h = fit_integers(&vals, &cands, FitOptions::default()).unwrap();
        assert_eq!(h.denominator(), &[Factor::new(0, 1), Factor::new(0, 1)]);
    }
}
