//! Exact solution counts of polynomial systems over finite fields.
//!
//! The search keeps the equations partially evaluated. At every node it
//! drops satisfied equations, splits the system into variable-disjoint
//! components, eliminates an unknown that occurs as a lone linear term,
//! branches on the roots of a univariate equation, and only otherwise
//! enumerates an unknown over the whole field. Unknowns that occur in no
//! equation contribute a factor `q` each.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::field::Field;
use super::system::{JetConstraintSystem, Monomial};
use crate::error::{Error, Result};

/// Default bound on search nodes per count.
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;

/// Field orders from which a branching step is split across threads.
const PAR_THRESHOLD: u32 = 2048;

/// Polynomial over a [`Field`], terms sorted by monomial, coefficients
/// nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FPoly {
    terms: Vec<(Monomial, u32)>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut map: BTreeMap<u16, u16> = a.iter().copied().collect();
    for &(v, e) in b {
        *map.entry(v).or_default() += e;
    }
    map.into_iter().collect()
}

impl FPoly {
    pub fn zero() -> Self {
        Self { terms: vec![] }
    }

    fn from_map(field: &Field, map: BTreeMap<Monomial, u32>) -> Self {
        let _ = field;
        Self { terms: map.into_iter().filter(|(_, c)| *c != 0).collect() }
    }

    pub fn from_terms(field: &Field, terms: impl IntoIterator<Item = (Monomial, u32)>) -> Self {
        let mut map: BTreeMap<Monomial, u32> = BTreeMap::new();
        for (m, c) in terms {
            let slot = map.entry(m).or_insert(0);
            *slot = field.add(*slot, c);
        }
        Self::from_map(field, map)
    }

    /// `Σ c·mono − target` reduced into the field.
    pub fn from_integer_equation(field: &Field, terms: &[(Monomial, BigInt)], target: &BigInt) -> Self {
        let p = BigInt::from(field.p());
        let red = |c: &BigInt| -> u32 {
            let r = ((c % &p) + &p) % &p;
            r.to_u32().expect("residue fits")
        };
        let mut all: Vec<(Monomial, u32)> = terms.iter().map(|(m, c)| (m.clone(), red(c))).collect();
        if !target.is_zero() {
            all.push((vec![], field.neg(red(target))));
        }
        Self::from_terms(field, all)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<u32> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(m, c)] if m.is_empty() => Some(*c),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<u16> {
        self.terms.iter().flat_map(|(m, _)| m.iter().map(|&(v, _)| v)).collect()
    }

    fn degree_in(&self, v: u16) -> u16 {
        self.terms.iter().filter_map(|(m, _)| m.iter().find(|&&(x, _)| x == v).map(|&(_, e)| e)).max().unwrap_or(0)
    }

    pub fn eval(&self, field: &Field, values: &[u32]) -> u32 {
        self.terms.iter().fold(0, |acc, (m, c)| {
            let t = m.iter().fold(*c, |t, &(v, e)| field.mul(t, field.pow(values[v as usize], e as u64)));
            field.add(acc, t)
        })
    }

    /// Substitutes `v := value`.
    pub fn substitute(&self, field: &Field, v: u16, value: u32) -> Self {
        if !self.terms.iter().any(|(m, _)| m.iter().any(|&(x, _)| x == v)) {
            return self.clone();
        }
        let mut map: BTreeMap<Monomial, u32> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut c = *c;
            let mut rest = Vec::with_capacity(m.len());
            for &(x, e) in m {
                if x == v {
                    c = field.mul(c, field.pow(value, e as u64));
                } else {
                    rest.push((x, e));
                }
            }
            if c != 0 {
                let slot = map.entry(rest).or_insert(0);
                *slot = field.add(*slot, c);
            }
        }
        Self::from_map(field, map)
    }

    fn mul(&self, field: &Field, other: &Self) -> Self {
        let mut map: BTreeMap<Monomial, u32> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let slot = map.entry(mono_mul(a, b)).or_insert(0);
                *slot = field.add(*slot, field.mul(*ca, *cb));
            }
        }
        Self::from_map(field, map)
    }

    /// Substitutes `v := expr`.
    fn substitute_poly(&self, field: &Field, v: u16, expr: &Self) -> Self {
        if !self.terms.iter().any(|(m, _)| m.iter().any(|&(x, _)| x == v)) {
            return self.clone();
        }
        let mut powers = vec![Self { terms: vec![(vec![], 1)] }];
        let mut acc: BTreeMap<Monomial, u32> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.iter().find(|&&(x, _)| x == v).map_or(0, |&(_, e)| e) as usize;
            let rest: Monomial = m.iter().copied().filter(|&(x, _)| x != v).collect();
            while powers.len() <= e {
                let next = powers.last().expect("nonempty").mul(field, expr);
                powers.push(next);
            }
            for (pm, pc) in &powers[e].terms {
                let slot = acc.entry(mono_mul(&rest, pm)).or_insert(0);
                *slot = field.add(*slot, field.mul(*c, *pc));
            }
        }
        Self::from_map(field, acc)
    }

    /// Coefficients in `v` (lowest first) if `v` is the only unknown.
    fn univariate(&self, v: u16) -> Option<Vec<u32>> {
        let mut coeffs = vec![0u32; self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            match m.as_slice() {
                [] => coeffs[0] = *c,
                [(x, e)] if *x == v => coeffs[*e as usize] = *c,
                _ => return None,
            }
        }
        Some(coeffs)
    }

    /// `v` with coefficient `c` when `c·v` is the only term containing `v`.
    fn lone_linear(&self, v: u16) -> Option<u32> {
        let mut found = None;
        for (m, c) in &self.terms {
            if m.iter().any(|&(x, _)| x == v) {
                if found.is_some() || m.as_slice() != [(v, 1)] {
                    return None;
                }
                found = Some(*c);
            }
        }
        found
    }
}

struct Search<'a> {
    field: &'a Field,
    nodes: AtomicU64,
    budget: u64,
}

fn checked_pow(q: u128, k: usize) -> Result<u128> {
    q.checked_pow(k as u32).ok_or_else(|| Error::Invalid("point count exceeds 128 bits".into()))
}

fn checked_mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b).ok_or_else(|| Error::Invalid("point count exceeds 128 bits".into()))
}

fn checked_sum(items: impl Iterator<Item = Result<u128>>) -> Result<u128> {
    let mut acc = 0u128;
    for x in items {
        acc = acc.checked_add(x?).ok_or_else(|| Error::Invalid("point count exceeds 128 bits".into()))?;
    }
    Ok(acc)
}

impl Search<'_> {
    fn tick(&self) -> Result<()> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(Error::ResourceLimit { budget: self.budget });
        }
        Ok(())
    }

    /// Number of points of `F_q^{vars}` satisfying every equation; every
    /// unknown of `eqs` must be in `vars`.
    fn count(&self, eqs: Vec<FPoly>, vars: BTreeSet<u16>) -> Result<u128> {
        self.tick()?;
        let q = self.field.order() as u128;
        let mut live = Vec::with_capacity(eqs.len());
        for e in eqs {
            match e.as_constant() {
                Some(0) => {}
                Some(_) => return Ok(0),
                None => live.push(e),
            }
        }
        let used: BTreeSet<u16> = live.iter().flat_map(FPoly::vars).collect();
        let free = checked_pow(q, vars.len() - used.len())?;
        if live.is_empty() {
            return Ok(free);
        }

        let comps = components(&live);
        if comps.len() > 1 {
            let mut acc = free;
            for (idx, cvars) in comps {
                let sub: Vec<FPoly> = idx.into_iter().map(|i| live[i].clone()).collect();
                let c = self.count(sub, cvars)?;
                if c == 0 {
                    return Ok(0);
                }
                acc = checked_mul(acc, c)?;
            }
            return Ok(acc);
        }
        checked_mul(free, self.count_connected(live, used)?)
    }

    fn count_connected(&self, eqs: Vec<FPoly>, vars: BTreeSet<u16>) -> Result<u128> {
        let f = self.field;
        // an unknown occurring only as c·v in one equation is determined by the rest
        for (i, e) in eqs.iter().enumerate() {
            for v in e.vars() {
                if let Some(c) = e.lone_linear(v) {
                    let inv = f.inv(c);
                    let rest = FPoly::from_terms(
                        f,
                        e.terms
                            .iter()
                            .filter(|(m, _)| m.as_slice() != [(v, 1)])
                            .map(|(m, t)| (m.clone(), f.neg(f.mul(*t, inv)))),
                    );
                    let others: Vec<FPoly> = eqs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, o)| o.substitute_poly(f, v, &rest))
                        .collect();
                    let mut sub = vars.clone();
                    sub.remove(&v);
                    return self.count(others, sub);
                }
            }
        }

        // branch on the roots of a univariate equation
        let uni = eqs.iter().enumerate().find_map(|(i, e)| {
            let vs = e.vars();
            (vs.len() == 1).then(|| {
                let v = *vs.iter().next().expect("one var");
                (i, v, e.univariate(v).expect("univariate"))
            })
        });
        if let Some((_, v, coeffs)) = uni {
            if eqs.len() == 1 {
                return Ok(f.count_roots(&coeffs) as u128);
            }
            let roots = f.roots(&coeffs);
            return self.branch(&eqs, &vars, v, roots);
        }

        let v = branch_var(&eqs);
        self.branch(&eqs, &vars, v, f.elements().collect())
    }

    fn branch(&self, eqs: &[FPoly], vars: &BTreeSet<u16>, v: u16, values: Vec<u32>) -> Result<u128> {
        let mut sub = vars.clone();
        sub.remove(&v);
        let one = |val: u32| -> Result<u128> {
            let next: Vec<FPoly> = eqs.iter().map(|e| e.substitute(self.field, v, val)).collect();
            self.count(next, sub.clone())
        };
        if values.len() as u32 >= PAR_THRESHOLD {
            let parts: Vec<Result<u128>> = values.par_iter().map(|&val| one(val)).collect();
            checked_sum(parts.into_iter())
        } else {
            checked_sum(values.into_iter().map(one))
        }
    }
}

/// Groups equations into connected components of the shares-an-unknown
/// relation.
fn components(eqs: &[FPoly]) -> Vec<(Vec<usize>, BTreeSet<u16>)> {
    let var_sets: Vec<BTreeSet<u16>> = eqs.iter().map(FPoly::vars).collect();
    let mut parent: Vec<usize> = (0..eqs.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    let mut owner: BTreeMap<u16, usize> = BTreeMap::new();
    for (i, vs) in var_sets.iter().enumerate() {
        for &v in vs {
            if let Some(&j) = owner.get(&v) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            } else {
                owner.insert(v, i);
            }
        }
    }
    let mut groups: BTreeMap<usize, (Vec<usize>, BTreeSet<u16>)> = BTreeMap::new();
    for (i, vs) in var_sets.into_iter().enumerate() {
        let r = find(&mut parent, i);
        let g = groups.entry(r).or_default();
        g.0.push(i);
        g.1.extend(vs);
    }
    groups.into_values().collect()
}

/// Prefers the higher-degree unknown of a two-unknown equation (leaving a
/// low-degree univariate equation behind), then the unknown occurring in
/// the most equations.
fn branch_var(eqs: &[FPoly]) -> u16 {
    let mut best: Option<((u8, usize, u16, std::cmp::Reverse<u16>), u16)> = None;
    let mut occurrences: BTreeMap<u16, usize> = BTreeMap::new();
    for e in eqs {
        for v in e.vars() {
            *occurrences.entry(v).or_default() += 1;
        }
    }
    for e in eqs {
        let vs: Vec<u16> = e.vars().into_iter().collect();
        for &v in &vs {
            let pair_bonus = u8::from(vs.len() == 2 && vs.iter().all(|&w| w == v || e.degree_in(w) <= e.degree_in(v)));
            let key = (pair_bonus, occurrences[&v], e.degree_in(v), std::cmp::Reverse(v));
            if best.as_ref().is_none_or(|(k, _)| key > *k) {
                best = Some((key, v));
            }
        }
    }
    best.expect("nonempty system").1
}

/// Equations of `sys` over `field`.
pub fn system_equations(sys: &JetConstraintSystem, field: &Field) -> Vec<FPoly> {
    sys.levels.iter().map(|l| FPoly::from_integer_equation(field, &l.terms, &l.target)).collect()
}

/// Solutions of `eqs` in `F^{vars}`.
pub fn count_equations(field: &Field, eqs: Vec<FPoly>, vars: BTreeSet<u16>, budget: u64) -> Result<u128> {
    let s = Search { field, nodes: AtomicU64::new(0), budget };
    s.count(eqs, vars)
}

/// Number of points of `X_{m,x}` over `F_q` (all `n·m` unknowns).
pub fn count_points(sys: &JetConstraintSystem, q: u32) -> Result<u128> {
    count_points_with_budget(sys, q, DEFAULT_NODE_BUDGET)
}

pub fn count_points_with_budget(sys: &JetConstraintSystem, q: u32, budget: u64) -> Result<u128> {
    let field = Field::prime(q)?;
    let vars = (0..sys.n_unknowns() as u16).collect();
    count_equations(&field, system_equations(sys, &field), vars, budget)
}

/// Exhaustive enumeration over `F_q^{n·m}`; the reference for
/// [`count_points`].
pub fn count_points_naive(sys: &JetConstraintSystem, q: u32) -> Result<u128> {
    let field = Field::prime(q)?;
    let eqs = system_equations(sys, &field);
    let n = sys.n_unknowns();
    let total = (q as u128)
        .checked_pow(n as u32)
        .filter(|&t| t <= 1 << 32)
        .ok_or_else(|| Error::Invalid("search space too large for exhaustive enumeration".into()))?;
    let mut values = vec![0u32; n];
    let mut hits = 0u128;
    for _ in 0..total {
        if eqs.iter().all(|e| e.eval(&field, &values) == 0) {
            hits += 1;
        }
        for slot in values.iter_mut() {
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
        }
    }
    Ok(hits)
}
