//! Rational polyhedral cells and finite unions of them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub(crate) fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `⟨coeffs, x⟩ (=|<|≤) rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearRow {
    pub coeffs: Vec<i64>,
    pub rhs: Rat,
}

impl LinearRow {
    pub fn new(coeffs: Vec<i64>, rhs: Rat) -> Self {
        Self { coeffs, rhs }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        self.coeffs.iter().zip(x).fold(Rat::zero(), |acc, (&c, v)| acc + rint(c) * v)
    }

    /// Scales to coprime integer coefficients whose first nonzero entry is
    /// positive; returns the row and whether the sign flipped.
    pub(crate) fn normalized(&self) -> Option<(LinearRow, bool)> {
        let first = *self.coeffs.iter().find(|&&c| c != 0)?;
        let g = self.coeffs.iter().fold(0i64, |g, &c| g.gcd(&c));
        let flip = first < 0;
        let s = if flip { -g } else { g };
        Some((LinearRow { coeffs: self.coeffs.iter().map(|&c| c / s).collect(), rhs: &self.rhs / rint(s) }, flip))
    }

    pub(crate) fn negated(&self) -> LinearRow {
        LinearRow { coeffs: self.coeffs.iter().map(|&c| -c).collect(), rhs: -self.rhs.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Rel {
    Eq,
    Lt,
    Le,
}

/// A relatively convex piece of `Q^n` cut out by linear equalities, strict
/// and weak inequalities with integer coefficients and rational constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalCell {
    pub dim: usize,
    pub eq: Vec<LinearRow>,
    pub lt: Vec<LinearRow>,
    pub le: Vec<LinearRow>,
}

impl RationalCell {
    /// The whole space `Q^n`.
    pub fn universe(dim: usize) -> Self {
        Self { dim, eq: vec![], lt: vec![], le: vec![] }
    }

    pub fn point(coords: &[Rat]) -> Self {
        let dim = coords.len();
        let mut c = Self::universe(dim);
        for (i, v) in coords.iter().enumerate() {
            c.eq.push(LinearRow::new(unit(dim, i, 1), v.clone()));
        }
        c
    }

    /// Product of intervals; `None` as an upper end means `+∞`.
    pub fn product(intervals: &[Interval]) -> Self {
        let dim = intervals.len();
        let mut c = Self::universe(dim);
        for (i, iv) in intervals.iter().enumerate() {
            c.add_interval(i, iv);
        }
        c
    }

    fn add_interval(&mut self, i: usize, iv: &Interval) {
        let dim = self.dim;
        if let (Some(hi), true, true) = (&iv.hi, iv.lo_closed, iv.hi_closed) {
            if *hi == iv.lo {
                self.eq.push(LinearRow::new(unit(dim, i, 1), iv.lo.clone()));
                return;
            }
        }
        let lower = LinearRow::new(unit(dim, i, -1), -iv.lo.clone());
        if iv.lo_closed {
            self.le.push(lower)
        } else {
            self.lt.push(lower)
        }
        if let Some(hi) = &iv.hi {
            let upper = LinearRow::new(unit(dim, i, 1), hi.clone());
            if iv.hi_closed {
                self.le.push(upper)
            } else {
                self.lt.push(upper)
            }
        }
    }

    pub fn with_eq(mut self, coeffs: Vec<i64>, rhs: Rat) -> Self {
        self.eq.push(LinearRow::new(coeffs, rhs));
        self
    }

    pub fn with_lt(mut self, coeffs: Vec<i64>, rhs: Rat) -> Self {
        self.lt.push(LinearRow::new(coeffs, rhs));
        self
    }

    pub fn with_le(mut self, coeffs: Vec<i64>, rhs: Rat) -> Self {
        self.le.push(LinearRow::new(coeffs, rhs));
        self
    }

    pub(crate) fn rows(&self) -> impl Iterator<Item = (Rel, &LinearRow)> {
        self.eq
            .iter()
            .map(|r| (Rel::Eq, r))
            .chain(self.lt.iter().map(|r| (Rel::Lt, r)))
            .chain(self.le.iter().map(|r| (Rel::Le, r)))
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.rows().all(|(rel, r)| {
            let v = r.eval(x);
            match rel {
                Rel::Eq => v == r.rhs,
                Rel::Lt => v < r.rhs,
                Rel::Le => v <= r.rhs,
            }
        })
    }

    /// The topological closure (strict inequalities made weak). Exact for
    /// nonempty cells.
    pub fn closure(&self) -> Self {
        let mut c = self.clone();
        c.le.append(&mut c.lt);
        c
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut c = self.clone();
        c.eq.extend(other.eq.iter().cloned());
        c.lt.extend(other.lt.iter().cloned());
        c.le.extend(other.le.iter().cloned());
        c
    }

    pub fn is_empty(&self) -> bool {
        !feasible(self.dim, self.rows().map(|(rel, r)| to_sys(rel, r)).collect())
    }

    /// Rank of the equality rows; the cell, when nonempty and relatively
    /// open, has dimension `dim − rank`.
    pub fn eq_rank(&self) -> usize {
        rank(&self.eq.iter().map(|r| r.coeffs.iter().map(|&c| rint(c)).collect()).collect::<Vec<_>>())
    }

    /// Exact range of coordinate `i` over the cell: `(lower, upper)`, each
    /// `Some((value, attained))` or `None` when unbounded. `None` overall
    /// for an empty cell.
    pub fn coordinate_range(&self, i: usize) -> Option<(Option<(Rat, bool)>, Option<(Rat, bool)>)> {
        let mut sys: Vec<SysRow> = self.rows().map(|(rel, r)| to_sys(rel, r)).collect();
        for v in 0..self.dim {
            if v != i {
                sys = eliminate(sys, v)?;
            }
        }
        let mut lo: Option<(Rat, bool)> = None;
        let mut hi: Option<(Rat, bool)> = None;
        for row in sys {
            let c = &row.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let bound = &row.rhs / c;
            let strict = row.rel == Rel::Lt;
            let mut tighten_hi = |b: Rat, attained: bool| {
                hi = Some(match hi.take() {
                    None => (b, attained),
                    Some((h, _)) if b < h => (b, attained),
                    Some((h, a)) if b == h => (h, a && attained),
                    Some(x) => x,
                })
            };
            let tighten_lo = |lo: &mut Option<(Rat, bool)>, b: Rat, attained: bool| {
                *lo = Some(match lo.take() {
                    None => (b, attained),
                    Some((l, _)) if b > l => (b, attained),
                    Some((l, a)) if b == l => (l, a && attained),
                    Some(x) => x,
                })
            };
            match row.rel {
                Rel::Eq => {
                    tighten_hi(bound.clone(), true);
                    tighten_lo(&mut lo, bound, true);
                }
                _ if c.is_positive() => tighten_hi(bound, !strict),
                _ => tighten_lo(&mut lo, bound, !strict),
            }
        }
        Some((lo, hi))
    }

    /// Vertices of the closure, sorted. Empty when the closure has no vertex.
    pub fn vertices(&self) -> Vec<Vec<Rat>> {
        let closure = self.closure();
        let rows: Vec<&LinearRow> = closure.eq.iter().chain(closure.le.iter()).collect();
        let n = self.dim;
        let mut out: Vec<Vec<Rat>> = Vec::new();
        if n == 0 {
            return if closure.is_empty() { vec![] } else { vec![vec![]] };
        }
        for subset in combinations(rows.len(), n) {
            let a: Vec<Vec<Rat>> = subset.iter().map(|&k| rows[k].coeffs.iter().map(|&c| rint(c)).collect()).collect();
            let b: Vec<Rat> = subset.iter().map(|&k| rows[k].rhs.clone()).collect();
            if let Some(x) = solve_unique(a, b) {
                if closure.contains(&x) && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out.sort();
        out
    }

    /// `Some(intervals)` if every row involves a single coordinate.
    pub fn as_box(&self) -> Option<Vec<(Option<(Rat, bool)>, Option<(Rat, bool)>)>> {
        if self.rows().any(|(_, r)| r.coeffs.iter().filter(|&&c| c != 0).count() > 1) {
            return None;
        }
        (0..self.dim).map(|i| self.coordinate_range(i)).collect()
    }
}

fn trivially_true(rel: Rel, rhs: &Rat) -> bool {
    match rel {
        Rel::Eq => rhs.is_zero(),
        Rel::Lt => rhs.is_positive(),
        Rel::Le => !rhs.is_negative(),
    }
}

pub(crate) fn unit(dim: usize, i: usize, s: i64) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[i] = s;
    v
}

/// One coordinate interval; `hi = None` means unbounded above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat,
    pub lo_closed: bool,
    pub hi: Option<Rat>,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: Rat, hi: Rat) -> Self {
        Self { lo, lo_closed: true, hi: Some(hi), hi_closed: true }
    }

    pub fn open(lo: Rat, hi: Rat) -> Self {
        Self { lo, lo_closed: false, hi: Some(hi), hi_closed: false }
    }

    pub fn point(v: Rat) -> Self {
        Self::closed(v.clone(), v)
    }

    pub fn half_line(lo: Rat, closed: bool) -> Self {
        Self { lo, lo_closed: closed, hi: None, hi_closed: false }
    }
}

/// Finite union of cells in a common ambient space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySet {
    pub dim: usize,
    pub cells: Vec<RationalCell>,
}

impl PolySet {
    pub fn new(dim: usize, cells: Vec<RationalCell>) -> Result<Self> {
        if let Some(c) = cells.iter().find(|c| c.dim != dim || c.rows().any(|(_, r)| r.coeffs.len() != dim)) {
            return Err(Error::Invalid(format!("cell of dimension {} in a PolySet of dimension {dim}", c.dim)));
        }
        Ok(Self { dim, cells })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, cells: vec![] }
    }

    pub fn single(cell: RationalCell) -> Self {
        Self { dim: cell.dim, cells: vec![cell] }
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.cells.iter().any(|c| c.contains(x))
    }

    /// Per-coordinate `(lower, upper)` over the union; `None` entries mark
    /// unbounded directions. Empty cells are ignored.
    pub fn bounding_box(&self) -> Vec<(Option<Rat>, Option<Rat>)> {
        let mut out: Vec<(Option<Rat>, Option<Rat>)> = Vec::new();
        let mut first = true;
        for cell in &self.cells {
            let ranges: Option<Vec<_>> = (0..self.dim).map(|i| cell.coordinate_range(i)).collect();
            let Some(ranges) = ranges else { continue };
            let this: Vec<(Option<Rat>, Option<Rat>)> =
                ranges.into_iter().map(|(lo, hi)| (lo.map(|x| x.0), hi.map(|x| x.0))).collect();
            if first {
                out = this;
                first = false;
                continue;
            }
            for (acc, new) in out.iter_mut().zip(this) {
                acc.0 = match (acc.0.take(), new.0) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    _ => None,
                };
                acc.1 = match (acc.1.take(), new.1) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    _ => None,
                };
            }
        }
        if first {
            vec![(Some(Rat::zero()), Some(Rat::zero())); self.dim]
        } else {
            out
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.bounding_box().iter().all(|(lo, hi)| lo.is_some() && hi.is_some())
    }

    pub fn is_bounded_below(&self) -> bool {
        self.bounding_box().iter().all(|(lo, _)| lo.is_some())
    }

    pub fn nonempty_cells(&self) -> impl Iterator<Item = &RationalCell> {
        self.cells.iter().filter(|c| !c.is_empty())
    }
}

// ---------------------------------------------------------------------------
// Fourier–Motzkin over the rationals, with strictness tracking.

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct SysRow {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
    pub rel: Rel,
}

pub(crate) fn to_sys(rel: Rel, r: &LinearRow) -> SysRow {
    SysRow { coeffs: r.coeffs.iter().map(|&c| rint(c)).collect(), rhs: r.rhs.clone(), rel }
}

fn scale_row(r: &SysRow, s: &Rat) -> (Vec<Rat>, Rat) {
    (r.coeffs.iter().map(|c| c * s).collect(), &r.rhs * s)
}

fn normalize_sys(mut r: SysRow) -> SysRow {
    if let Some(p) = r.coeffs.iter().find(|c| !c.is_zero()).cloned() {
        let s = p.abs().recip();
        r.coeffs.iter_mut().for_each(|c| *c = &*c * &s);
        r.rhs = &r.rhs * &s;
    }
    r
}

/// Eliminates variable `v`; `None` when a contradiction appears.
fn eliminate(sys: Vec<SysRow>, v: usize) -> Option<Vec<SysRow>> {
    // substitute through an equality when one involves v
    if let Some(pos) = sys.iter().position(|r| r.rel == Rel::Eq && !r.coeffs[v].is_zero()) {
        let pivot = sys[pos].clone();
        let mut out = Vec::with_capacity(sys.len());
        for (k, r) in sys.into_iter().enumerate() {
            if k == pos {
                continue;
            }
            if r.coeffs[v].is_zero() {
                out.push(r);
                continue;
            }
            let f = &r.coeffs[v] / &pivot.coeffs[v];
            let (pc, pr) = scale_row(&pivot, &f);
            let coeffs: Vec<Rat> = r.coeffs.iter().zip(pc).map(|(a, b)| a - b).collect();
            out.push(SysRow { coeffs, rhs: &r.rhs - pr, rel: r.rel });
        }
        return check_constants(out);
    }
    let (mut pos, mut neg, mut rest) = (vec![], vec![], vec![]);
    for r in sys {
        let c = r.coeffs[v].clone();
        if c.is_zero() {
            rest.push(r);
        } else if c.is_positive() {
            pos.push(r);
        } else {
            neg.push(r);
        }
    }
    for p in &pos {
        for n in &neg {
            let (pc, pr) = scale_row(p, &n.coeffs[v].abs());
            let (nc, nr) = scale_row(n, &p.coeffs[v]);
            let coeffs: Vec<Rat> = pc.iter().zip(nc).map(|(a, b)| a + b).collect();
            let rel = if p.rel == Rel::Lt || n.rel == Rel::Lt { Rel::Lt } else { Rel::Le };
            rest.push(SysRow { coeffs, rhs: pr + nr, rel });
        }
    }
    check_constants(rest)
}

fn check_constants(sys: Vec<SysRow>) -> Option<Vec<SysRow>> {
    let mut out: Vec<SysRow> = Vec::with_capacity(sys.len());
    for r in sys {
        if r.coeffs.iter().all(Zero::is_zero) {
            if !trivially_true(r.rel, &r.rhs) {
                return None;
            }
            continue;
        }
        out.push(normalize_sys(r));
    }
    out.sort();
    out.dedup();
    // keep only the tightest of parallel inequalities
    let mut pruned: Vec<SysRow> = Vec::with_capacity(out.len());
    for r in out {
        if let Some(last) = pruned.last_mut() {
            if last.coeffs == r.coeffs && last.rel != Rel::Eq && r.rel != Rel::Eq {
                if r.rhs < last.rhs || (r.rhs == last.rhs && r.rel == Rel::Lt) {
                    *last = r;
                }
                continue;
            }
        }
        pruned.push(r);
    }
    Some(pruned)
}

pub(crate) fn feasible(dim: usize, mut sys: Vec<SysRow>) -> bool {
    sys = match check_constants(sys) {
        Some(s) => s,
        None => return false,
    };
    for v in 0..dim {
        sys = match eliminate(sys, v) {
            Some(s) => s,
            None => return false,
        };
    }
    true
}

pub(crate) fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let pivot = m[r].clone();
                m[i].iter_mut().zip(pivot).for_each(|(x, y)| *x = &*x - &f * y);
            }
        }
        r += 1;
    }
    r
}

fn solve_unique(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                let (pivot, pb) = (a[c].clone(), b[c].clone());
                a[i].iter_mut().zip(pivot).for_each(|(x, y)| *x = &*x - &f * y);
                b[i] = &b[i] - &f * pb;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// `ceil(x)` and `floor(x)` as `i64`.
pub(crate) fn ceil_i64(x: &Rat) -> i64 {
    x.ceil().to_integer().to_i64().expect("coordinate out of range")
}

pub(crate) fn floor_i64(x: &Rat) -> i64 {
    x.floor().to_integer().to_i64().expect("coordinate out of range")
}

pub(crate) fn denom_i64(x: &Rat) -> i64 {
    x.denom().to_i64().expect("denominator out of range")
}

// ---------------------------------------------------------------------------
// JSON: {"dim": n, "cells": [{"eq": [[c.., d]], "lt": [..], "le": [..]}]}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RatWire {
    Int(i64),
    Text(String),
}

pub(crate) fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (BigInt, BigInt) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
            (!d.is_zero()).then(|| Rat::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
    }
}

fn rat_to_wire(r: &Rat) -> RatWire {
    match (r.is_integer(), r.to_integer().to_i64()) {
        (true, Some(v)) => RatWire::Int(v),
        _ => RatWire::Text(format!("{}/{}", r.numer(), r.denom())),
    }
}

#[derive(Serialize, Deserialize)]
struct RowWire(Vec<RatWire>);

#[derive(Serialize, Deserialize, Default)]
struct CellWire {
    #[serde(default)]
    eq: Vec<RowWire>,
    #[serde(default)]
    lt: Vec<RowWire>,
    #[serde(default)]
    le: Vec<RowWire>,
}

#[derive(Serialize, Deserialize)]
struct SetWire {
    dim: usize,
    cells: Vec<CellWire>,
}

fn row_to_wire(r: &LinearRow) -> RowWire {
    let mut v: Vec<RatWire> = r.coeffs.iter().map(|&c| RatWire::Int(c)).collect();
    v.push(rat_to_wire(&r.rhs));
    RowWire(v)
}

fn row_from_wire(w: RowWire, dim: usize) -> std::result::Result<LinearRow, String> {
    if w.0.len() != dim + 1 {
        return Err(format!("row has {} entries, expected {}", w.0.len(), dim + 1));
    }
    let mut vals = w.0;
    let rhs = match vals.pop().unwrap() {
        RatWire::Int(v) => rint(v),
        RatWire::Text(s) => parse_rat(&s).ok_or_else(|| format!("bad rational {s:?}"))?,
    };
    let coeffs = vals
        .into_iter()
        .map(|v| match v {
            RatWire::Int(c) => Ok(c),
            RatWire::Text(s) => Err(format!("coefficient {s:?} must be an integer")),
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(LinearRow { coeffs, rhs })
}

impl RationalCell {
    fn to_wire(&self) -> CellWire {
        CellWire {
            eq: self.eq.iter().map(row_to_wire).collect(),
            lt: self.lt.iter().map(row_to_wire).collect(),
            le: self.le.iter().map(row_to_wire).collect(),
        }
    }

    fn from_wire(w: CellWire, dim: usize) -> std::result::Result<Self, String> {
        let conv = |rows: Vec<RowWire>| {
            rows.into_iter().map(|r| row_from_wire(r, dim)).collect::<std::result::Result<Vec<_>, _>>()
        };
        Ok(Self { dim, eq: conv(w.eq)?, lt: conv(w.lt)?, le: conv(w.le)? })
    }

    /// Parses a standalone cell object given the ambient dimension.
    pub fn from_json_value(v: serde_json::Value, dim: usize) -> Result<Self> {
        let w: CellWire = serde_json::from_value(v)?;
        Self::from_wire(w, dim).map_err(Error::Invalid)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_wire()).expect("cell serializes")
    }
}

impl Serialize for PolySet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetWire { dim: self.dim, cells: self.cells.iter().map(RationalCell::to_wire).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolySet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = SetWire::deserialize(d)?;
        let cells = w
            .cells
            .into_iter()
            .map(|c| RationalCell::from_wire(c, w.dim))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok(PolySet { dim: w.dim, cells })
    }
}

impl fmt::Display for RationalCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: &LinearRow, op: &str| {
            let lhs: Vec<String> = r
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| if c == 1 { format!("x{}", i + 1) } else { format!("{c}*x{}", i + 1) })
                .collect();
            format!("{} {op} {}", if lhs.is_empty() { "0".into() } else { lhs.join(" + ") }, r.rhs)
        };
        let parts: Vec<String> = self
            .rows()
            .map(|(rel, r)| {
                show(
                    r,
                    match rel {
                        Rel::Eq => "=",
                        Rel::Lt => "<",
                        Rel::Le => "<=",
                    },
                )
            })
            .collect();
        if parts.is_empty() {
            write!(f, "Q^{}", self.dim)
        } else {
            write!(f, "{{{}}}", parts.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> RationalCell {
        RationalCell::universe(2)
            .with_le(vec![-1, 0], rint(0))
            .with_le(vec![0, -1], rint(0))
            .with_le(vec![1, 1], rint(1))
    }

    #[test]
    fn emptiness() {
        assert!(!triangle().is_empty());
        let open_point = RationalCell::universe(1).with_lt(vec![1], rint(0)).with_lt(vec![-1], rint(0));
        assert!(open_point.is_empty());
        let half = RationalCell::universe(1).with_le(vec![1], rint(0)).with_le(vec![-1], rint(0));
        assert!(!half.is_empty());
        let skew = RationalCell::universe(2)
            .with_eq(vec![1, 1], rat(1, 2))
            .with_lt(vec![-1, 0], rint(0))
            .with_lt(vec![0, -1], rint(0));
        assert!(!skew.is_empty());
        assert!(skew.clone().with_le(vec![1, 0], rint(0)).is_empty());
    }

    #[test]
    fn ranges_and_vertices() {
        let (lo, hi) = triangle().coordinate_range(0).unwrap();
        assert_eq!(lo, Some((rint(0), true)));
        assert_eq!(hi, Some((rint(1), true)));
        let v = triangle().vertices();
        assert_eq!(v, vec![vec![rint(0), rint(0)], vec![rint(0), rint(1)], vec![rint(1), rint(0)]]);
        let open = RationalCell::product(&[Interval::open(rint(0), rat(1, 3))]);
        let (lo, hi) = open.coordinate_range(0).unwrap();
        assert_eq!(lo, Some((rint(0), false)));
        assert_eq!(hi, Some((rat(1, 3), false)));
        let ray = RationalCell::product(&[Interval::half_line(rint(2), true)]);
        assert_eq!(ray.coordinate_range(0).unwrap().1, None);
    }

    #[test]
    fn json_roundtrip() {
        let s = PolySet::single(RationalCell::product(&[
            Interval::closed(rat(-1, 2), rint(3)),
            Interval::open(rint(0), rint(1)),
        ]));
        let text = serde_json::to_string(&s).unwrap();
        let back: PolySet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let parsed: PolySet = serde_json::from_str(r#"{"dim":1,"cells":[{"le":[[1,"1/2"],[-1,0]]}]}"#).unwrap();
        assert!(parsed.contains(&[rat(1, 4)]));
        assert!(!parsed.contains(&[rat(3, 4)]));
    }
}
