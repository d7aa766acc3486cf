//! Jet spaces `X_{m,x}`, their point counts and the invariants read off
//! from them.

mod count;
mod field;
mod frobenius;
mod interp;
mod poly;
mod system;

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use count::{
    count_equations, count_points, count_points_naive, count_points_with_budget, system_equations, FPoly,
    DEFAULT_NODE_BUDGET,
};
pub use field::{Field, MAX_FIELD_ORDER};
pub use frobenius::{berlekamp_massey, chi_from_extension_counts, frobenius_chi_c, FrobeniusCounts, FROBENIUS_MARGIN};
pub use interp::{interpolate_class, interpolate_scaled, ClassPoly, MIN_VERIFY};
pub use poly::{parse_poly, MultiPoly};
pub use system::{build_jet_system, JetConstraintSystem, LevelEquation, Monomial};

use crate::algebra::{fit, DaggerSeries, Factor, FitOptions, LaurentPoly, SeriesPrefix, MIN_MARGIN};
use crate::error::{Error, Result};

/// `(q, #X(F_q))` rows in increasing `q`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountTable {
    pub rows: Vec<(u64, u128)>,
}

/// Largest prime considered when collecting admissible primes.
const PRIME_SEARCH_LIMIT: u64 = 1 << 31;

#[derive(Clone, Copy, Debug)]
pub struct JetOptions {
    /// Number of primes to count at; defaults to `degree bound + 3`.
    pub primes: Option<usize>,
    pub node_budget: u64,
    /// Only primes `≡ 1` modulo this are used; defaults to
    /// [`default_modulus`].
    pub modulus: Option<u64>,
    /// Fall back to counting over extension fields when the counts are not
    /// polynomial or too few primes are available.
    pub frobenius: bool,
    /// Largest prime counted at, over `F_p` or its extensions.
    pub max_prime: Option<u64>,
}

impl Default for JetOptions {
    fn default() -> Self {
        Self { primes: None, node_budget: DEFAULT_NODE_BUDGET, modulus: None, frobenius: true, max_prime: None }
    }
}

/// `lcm(4, 2, …, deg f)` for `deg f ≥ 2`, else 1: for `q ≡ 1` modulo it,
/// the roots of unity that jet equations of `f` can produce lie in `F_q`.
pub fn default_modulus(f: &MultiPoly) -> u64 {
    let d = f.degree() as u64;
    if d < 2 {
        return 1;
    }
    (2..=d).fold(4u64, |acc, k| acc.lcm(&k))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn divides_any(p: u64, values: &[BigInt]) -> bool {
    let p = BigInt::from(p);
    values.iter().any(|v| !v.is_zero() && (v % &p).is_zero())
}

/// Integers whose prime divisors are excluded: coefficients of `f` and the
/// cleared level denominators.
fn bad_values(f: &MultiPoly, sys: &JetConstraintSystem) -> Vec<BigInt> {
    f.terms().map(|(_, c)| BigInt::from(c)).chain(sys.denominators()).collect()
}

/// The `count` smallest primes `p > deg f` with `p ≡ 1 (mod modulus)` that
/// divide no coefficient of `f` and no cleared denominator.
pub fn admissible_primes(f: &MultiPoly, sys: &JetConstraintSystem, modulus: u64, count: usize) -> Result<Vec<u64>> {
    admissible_primes_upto(f, sys, modulus, count, PRIME_SEARCH_LIMIT)
}

/// As [`admissible_primes`], considering only primes up to `limit`.
pub fn admissible_primes_upto(
    f: &MultiPoly,
    sys: &JetConstraintSystem,
    modulus: u64,
    count: usize,
    limit: u64,
) -> Result<Vec<u64>> {
    let bad = bad_values(f, sys);
    let mut out = Vec::with_capacity(count);
    let mut p = f.degree() as u64 + 1;
    while out.len() < count {
        if p > limit.min(PRIME_SEARCH_LIMIT) || p > u32::MAX as u64 {
            return Err(Error::NotEnoughPrimes { needed: count, have: out.len() });
        }
        if p % modulus == 1 % modulus && is_prime(p) && !divides_any(p, &bad) {
            out.push(p);
        }
        p += 1;
    }
    Ok(out)
}

/// Counts at every prime, in parallel; rows keep the order of `primes`.
pub fn count_table(sys: &JetConstraintSystem, primes: &[u64], budget: u64) -> Result<CountTable> {
    let rows: Vec<Result<(u64, u128)>> =
        primes.par_iter().map(|&q| Ok((q, count_points_with_budget(sys, q as u32, budget)?))).collect();
    Ok(CountTable { rows: rows.into_iter().collect::<Result<_>>()? })
}

/// Counting polynomial of `X_{m,x}` together with the counts it came from.
pub fn class_via_jets(
    f: &MultiPoly,
    x: &[BigRational],
    m: usize,
    opts: &JetOptions,
) -> Result<(ClassPoly, CountTable)> {
    let sys = build_jet_system(f, x, m)?;
    class_of_system(f, &sys, opts)
}

fn class_of_system(f: &MultiPoly, sys: &JetConstraintSystem, opts: &JetOptions) -> Result<(ClassPoly, CountTable)> {
    let constrained = sys.constrained_vars().len();
    let free = sys.free_var_count() as u32;
    let n_primes = opts.primes.unwrap_or(constrained + 1 + MIN_VERIFY).max(constrained + 1 + MIN_VERIFY);
    let modulus = opts.modulus.unwrap_or_else(|| default_modulus(f));
    let limit = opts.max_prime.unwrap_or(PRIME_SEARCH_LIMIT);
    let primes = admissible_primes_upto(f, sys, modulus, n_primes, limit)?;
    let table = count_table(sys, &primes, opts.node_budget)?;
    let class = interpolate_scaled(&table, constrained, free)?;
    Ok((class, table))
}

/// How `χ_c` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiRoute {
    /// Value at `L = 1` of the interpolated counting polynomial.
    Class,
    /// Frobenius-trace recurrence over extensions of one prime.
    Frobenius,
}

/// `χ_c(X_{m,x})`, which equals the Lefschetz number `Λ(M_x^m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetEuler {
    pub m: usize,
    pub counts: CountTable,
    pub class: Option<LaurentPoly>,
    pub frobenius: Option<FrobeniusCounts>,
    pub chi_c: i128,
    pub route: ChiRoute,
}

/// Smallest prime `p > deg f` dividing no coefficient or denominator.
fn frobenius_prime(f: &MultiPoly, sys: &JetConstraintSystem, limit: u64) -> Result<u32> {
    Ok(admissible_primes_upto(f, sys, 1, 1, limit)?[0] as u32)
}

pub fn lefschetz_via_jets(f: &MultiPoly, x: &[BigRational], m: usize, opts: &JetOptions) -> Result<JetEuler> {
    let sys = build_jet_system(f, x, m)?;
    match class_of_system(f, &sys, opts) {
        Ok((class, counts)) => Ok(JetEuler {
            m,
            counts,
            chi_c: class.chi_c(),
            class: Some(class.class),
            frobenius: None,
            route: ChiRoute::Class,
        }),
        Err(e @ (Error::Interpolation { .. } | Error::NotEnoughPrimes { .. })) if opts.frobenius => {
            let table = match e {
                Error::Interpolation { table, .. } => table,
                _ => CountTable::default(),
            };
            let p = frobenius_prime(f, &sys, opts.max_prime.unwrap_or(PRIME_SEARCH_LIMIT))?;
            let fr = frobenius_chi_c(&sys, p, opts.node_budget)?;
            Ok(JetEuler {
                m,
                counts: table,
                class: None,
                chi_c: fr.chi_c,
                frobenius: Some(fr),
                route: ChiRoute::Frobenius,
            })
        }
        Err(e) => Err(e),
    }
}

/// `[X_{m,x}] L^{−m d}` for `m = 0..=max_m` (term 0 is 0).
pub fn zeta_via_jets(
    f: &MultiPoly,
    x: &[BigRational],
    d: usize,
    max_m: usize,
    opts: &JetOptions,
) -> Result<SeriesPrefix> {
    let mut out = vec![LaurentPoly::zero()];
    out.extend(zeta_terms(f, x, d, 1..=max_m, opts)?);
    Ok(SeriesPrefix::new(out))
}

/// `[X_{m,x}] L^{−m d}` for each `m` in `orders`, computed in parallel.
pub fn zeta_terms(
    f: &MultiPoly,
    x: &[BigRational],
    d: usize,
    orders: RangeInclusive<usize>,
    opts: &JetOptions,
) -> Result<Vec<LaurentPoly>> {
    let terms: Vec<Result<LaurentPoly>> = orders
        .into_par_iter()
        .map(|m| {
            let (class, _) = class_via_jets(f, x, m, opts).map_err(|e| Error::AtOrder { m, source: Box::new(e) })?;
            Ok(class.class.shift(-((m * d) as i64)))
        })
        .collect();
    terms.into_iter().collect()
}

/// `S = −lim Z` of a fitted zeta function, with `χ_c(S)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MilnorFiberLimit {
    pub zeta: DaggerSeries,
    pub s: LaurentPoly,
    pub chi_c: i128,
}

/// Fits `prefix` over `candidates` (numerator degree at most the
/// denominator degree) and returns `−lim`.
pub fn milnor_fiber_limit(prefix: &SeriesPrefix, candidates: &[Factor]) -> Result<MilnorFiberLimit> {
    let deg: usize = candidates.iter().map(|f| f.b as usize).sum();
    let zeta = fit(prefix, candidates, FitOptions { margin: MIN_MARGIN, num_degree_bound: Some(deg) })?;
    let s = -zeta.limit()?;
    let chi_c = s.eval_at_one();
    Ok(MilnorFiberLimit { zeta, s, chi_c })
}

/// Terms a prefix needs so that [`milnor_fiber_limit`] can use
/// `candidates`.
pub fn terms_needed(candidates: &[Factor]) -> usize {
    let deg: usize = candidates.iter().map(|f| f.b as usize).sum();
    2 * deg + 1 + MIN_MARGIN
}

/// Multisets of factors `(a, b)` with `−d·b ≤ a ≤ 0` and `Σ b ≤ max_deg`,
/// ordered by `Σ b`, then size, then lexicographically.
pub fn candidate_grid(d: usize, max_deg: usize) -> Vec<Vec<Factor>> {
    let mut singles = Vec::new();
    for b in 1..=max_deg as u32 {
        for a in -((d as i64) * b as i64)..=0 {
            singles.push(Factor::new(a, b));
        }
    }
    singles.sort();
    let mut out: Vec<Vec<Factor>> = vec![vec![]];
    fn extend(singles: &[Factor], start: usize, budget: usize, cur: &mut Vec<Factor>, out: &mut Vec<Vec<Factor>>) {
        for i in start..singles.len() {
            let b = singles[i].b as usize;
            if b > budget {
                continue;
            }
            cur.push(singles[i]);
            out.push(cur.clone());
            extend(singles, i, budget - b, cur, out);
            cur.pop();
        }
    }
    extend(&singles, 0, max_deg, &mut vec![], &mut out);
    out.sort_by_key(|c| (c.iter().map(|f| f.b as usize).sum::<usize>(), c.len(), c.clone()));
    out
}

/// First candidate set of [`candidate_grid`] that fits `prefix` with the
/// required margin.
pub fn search_zeta_fit(prefix: &SeriesPrefix, d: usize) -> Result<MilnorFiberLimit> {
    let len = prefix.len();
    let max_deg = len.saturating_sub(1 + MIN_MARGIN) / 2;
    for cands in candidate_grid(d, max_deg) {
        if let Ok(r) = milnor_fiber_limit(prefix, &cands) {
            return Ok(r);
        }
    }
    Err(Error::FitFailure { terms: len })
}

/// Parses `"p/q"` or integer coordinates separated by commas.
pub fn parse_point(s: &str, n: usize) -> Result<Vec<BigRational>> {
    if s.trim().is_empty() {
        return Ok(vec![BigRational::zero(); n]);
    }
    let coords: Vec<BigRational> = s
        .split(',')
        .map(|c| {
            crate::gamma::parse_rat(c.trim()).ok_or_else(|| Error::Invalid(format!("cannot read coordinate {c:?}")))
        })
        .collect::<Result<_>>()?;
    if coords.len() != n {
        return Err(Error::Invalid(format!("base point has {} coordinates, expected {n}", coords.len())));
    }
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes_fall_back_to_extensions() {
        let f = parse_poly("x1^2 + x2^3").unwrap();
        let x = [BigRational::zero(), BigRational::zero()];
        let opts = JetOptions { max_prime: Some(29), ..JetOptions::default() };
        let got: Vec<i128> = (1..=6).map(|m| lefschetz_via_jets(&f, &x, m, &opts).unwrap().chi_c).collect();
        assert_eq!(got, vec![0, 2, 3, 2, 0, -1]);
        let r = lefschetz_via_jets(&f, &x, 4, &opts).unwrap();
        assert_eq!(r.route, ChiRoute::Frobenius);
        assert!(r.frobenius.unwrap().p <= 29);
    }

    fn origin(n: usize) -> Vec<BigRational> {
        vec![BigRational::zero(); n]
    }

    fn lp(terms: &[(i64, i128)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn lefschetz_examples() {
        let opts = JetOptions::default();
        let sq = parse_poly("x1^2").unwrap();
        let r = lefschetz_via_jets(&sq, &origin(1), 2, &opts).unwrap();
        assert_eq!((r.class.clone().unwrap(), r.chi_c, r.route), (lp(&[(1, 2)]), 2, ChiRoute::Class));
        assert_eq!(lefschetz_via_jets(&sq, &origin(1), 1, &opts).unwrap().chi_c, 0);
        let node = parse_poly("x1*x2").unwrap();
        let r = lefschetz_via_jets(&node, &origin(2), 3, &opts).unwrap();
        // 2(q − 1)q^3
        assert_eq!(r.class.unwrap(), lp(&[(4, 2), (3, -2)]));
        assert_eq!(r.chi_c, 0);
    }

    #[test]
    fn zeta_prefixes() {
        let opts = JetOptions::default();
        let sq = parse_poly("x1^2").unwrap();
        let z = zeta_via_jets(&sq, &origin(1), 1, 6, &opts).unwrap();
        let expected = [lp(&[]), lp(&[]), lp(&[(-1, 2)]), lp(&[]), lp(&[(-2, 2)]), lp(&[]), lp(&[(-3, 2)])];
        assert_eq!(z.terms, expected);
        let lin = parse_poly("x1").unwrap();
        let z = zeta_via_jets(&lin, &origin(1), 1, 3, &opts).unwrap();
        assert_eq!(z.terms[1..], [lp(&[(-1, 1)]), lp(&[(-2, 1)]), lp(&[(-3, 1)])]);
    }

    #[test]
    fn fiber_limits() {
        let opts = JetOptions::default();
        let sq = parse_poly("x1^2").unwrap();
        let z = zeta_via_jets(&sq, &origin(1), 1, 8, &opts).unwrap();
        let r = milnor_fiber_limit(&z, &[Factor::new(-1, 2)]).unwrap();
        assert_eq!(r.zeta, DaggerSeries::geometric(2, lp(&[(-1, 2)]), Factor::new(-1, 2)));
        assert_eq!((r.s.clone(), r.chi_c), (lp(&[(0, 2)]), 2));
        let searched = search_zeta_fit(&z, 1).unwrap();
        assert_eq!(searched.zeta, r.zeta);
    }

    #[test]
    fn admissible_primes_respect_modulus_and_coefficients() {
        let f = parse_poly("3*x1^2 + x2^3").unwrap();
        let sys = build_jet_system(&f, &origin(2), 2).unwrap();
        assert_eq!(admissible_primes(&f, &sys, 12, 4).unwrap(), vec![13, 37, 61, 73]);
        assert_eq!(admissible_primes(&f, &sys, 1, 3).unwrap(), vec![5, 7, 11]);
        assert_eq!(default_modulus(&f), 12);
    }

    #[test]
    fn grid_is_ordered() {
        let g = candidate_grid(1, 2);
        assert_eq!(g[0], vec![]);
        assert_eq!(g[1], vec![Factor::new(-1, 1)]);
        assert!(g.windows(2).all(|w| w[0].iter().map(|f| f.b).sum::<u32>() <= w[1].iter().map(|f| f.b).sum::<u32>()));
    }
}
