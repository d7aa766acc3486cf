//! Weighted lattice-point series of bounded sets and their limits.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde_json::{json, Value};

use super::cell::{denom_i64, PolySet, Rat, RationalCell};
use super::decompose::chi;
use super::lattice::{box_weight_sum, compile, lattice_numerators, satisfies};
use crate::algebra::{fit, DaggerSeries, Factor, FitOptions, LaurentPoly, SeriesPrefix, MIN_MARGIN};
use crate::error::{Error, Result};

/// `x ↦ ⟨a, x⟩ + b` on the points of `guard`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePiece {
    pub guard: RationalCell,
    pub a: Vec<i64>,
    pub b: i64,
}

/// Piecewise affine form; guards are pairwise disjoint and cover the set it
/// is evaluated on.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFormPW {
    pub dim: usize,
    pub pieces: Vec<AffinePiece>,
}

impl AffineFormPW {
    /// A single affine piece valid everywhere.
    pub fn affine(a: Vec<i64>, b: i64) -> Self {
        let dim = a.len();
        Self { dim, pieces: vec![AffinePiece { guard: RationalCell::universe(dim), a, b }] }
    }

    pub fn zero(dim: usize) -> Self {
        Self::affine(vec![0; dim], 0)
    }

    pub fn eval(&self, x: &[Rat]) -> Option<Rat> {
        let p = self.pieces.iter().find(|p| p.guard.contains(x))?;
        Some(
            p.a.iter().zip(x).map(|(&c, v)| v * Rat::from_integer(c.into())).sum::<Rat>()
                + Rat::from_integer(p.b.into()),
        )
    }

    /// Parses `{"pieces": [{"guard": cell, "a": [...], "b": int}]}`; a
    /// missing guard means the whole space.
    pub fn from_json_value(v: Value, dim: usize) -> Result<Self> {
        let pieces = v
            .get("pieces")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid("affine form needs a \"pieces\" array".into()))?;
        let mut out = Vec::with_capacity(pieces.len());
        for p in pieces {
            let a: Vec<i64> = serde_json::from_value(p.get("a").cloned().unwrap_or(Value::Null))?;
            if a.len() != dim {
                return Err(Error::Invalid(format!("coefficient vector has length {}, expected {dim}", a.len())));
            }
            let b = p.get("b").map(|b| serde_json::from_value(b.clone())).transpose()?.unwrap_or(0);
            let guard = match p.get("guard") {
                Some(g) => RationalCell::from_json_value(g.clone(), dim)?,
                None => RationalCell::universe(dim),
            };
            out.push(AffinePiece { guard, a, b });
        }
        Ok(Self { dim, pieces: out })
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "pieces": self.pieces.iter().map(|p| json!({
                "guard": p.guard.to_json_value(),
                "a": p.a,
                "b": p.b,
            })).collect::<Vec<_>>()
        })
    }
}

fn check_dims(set: &PolySet, form: &AffineFormPW) -> Result<()> {
    if form.dim != set.dim || form.pieces.iter().any(|p| p.guard.dim != set.dim || p.a.len() != set.dim) {
        return Err(Error::Invalid(format!("affine form dimension does not match the set ({})", set.dim)));
    }
    Ok(())
}

/// Denominator candidates: every vertex `v` of a piece contributes
/// `1 − U^{−q ℓ(v)} T^q` with `q` the common denominator of `v`, repeated up
/// to `dim + 1` times when several vertices share it.
pub fn polytope_candidates(set: &PolySet, form: &AffineFormPW) -> Result<Vec<Factor>> {
    check_dims(set, form)?;
    let mut mult: BTreeMap<Factor, usize> = BTreeMap::new();
    for cell in set.nonempty_cells() {
        for piece in &form.pieces {
            let part = cell.intersect(&piece.guard);
            if part.is_empty() {
                continue;
            }
            let mut local: BTreeMap<Factor, usize> = BTreeMap::new();
            for v in part.vertices() {
                let q = v.iter().fold(1i64, |acc, x| acc.lcm(&denom_i64(x)));
                let lq: Rat = v.iter().zip(&piece.a).map(|(x, &c)| x * Rat::from_integer((c * q).into())).sum();
                let a: i64 = lq.to_integer().try_into().map_err(|_| Error::Invalid("weight out of range".into()))?;
                *local.entry(Factor::new(-(a + piece.b * q), q as u32)).or_default() += 1;
            }
            for (f, k) in local {
                let k = k.min(set.dim + 1);
                let e = mult.entry(f).or_default();
                *e = (*e).max(k);
            }
        }
    }
    Ok(mult.into_iter().flat_map(|(f, k)| std::iter::repeat_n(f, k)).collect())
}

/// Smallest `M` for which [`zeta_polytope`] has enough coefficients.
pub fn polytope_terms_needed(candidates: &[Factor]) -> usize {
    let deg: usize = candidates.iter().map(|f| f.b as usize).sum();
    2 * deg + MIN_MARGIN
}

/// `s_m = Σ_{γ ∈ S ∩ (1/m)Z^n} U^{−m ℓ(γ)}`; `U` occupies the `L` slot.
pub fn polytope_coefficient(set: &PolySet, form: &AffineFormPW, m: i64) -> Result<LaurentPoly> {
    check_dims(set, form)?;
    let mut cells = set.nonempty_cells();
    if let ([piece], Some(cell), None) = (form.pieces.as_slice(), cells.next(), cells.next()) {
        if piece.guard.rows().next().is_none() {
            if let Some(sum) = box_weight_sum(cell, &piece.a, m) {
                return Ok(sum.shift(-piece.b * m));
            }
        }
    }
    scan_coefficient(set, form, m)
}

/// [`polytope_coefficient`] by enumerating lattice points.
fn scan_coefficient(set: &PolySet, form: &AffineFormPW, m: i64) -> Result<LaurentPoly> {
    let points = lattice_numerators(set, m)?;
    let guards: Vec<_> = form.pieces.iter().map(|p| compile(&p.guard, m)).collect();
    let mut terms = Vec::with_capacity(points.len());
    for k in points {
        let mut hits = guards.iter().enumerate().filter(|(_, g)| satisfies(g, &k));
        let (Some((i, _)), None) = (hits.next(), hits.next()) else {
            return Err(Error::Invalid(format!("affine form guards do not partition the set at level {m}")));
        };
        let p = &form.pieces[i];
        let e: i64 = p.a.iter().zip(&k).map(|(c, x)| c * x).sum::<i64>() + p.b * m;
        terms.push((-e, 1));
    }
    Ok(LaurentPoly::from_terms(terms))
}

/// Fits `Σ_{m ≥ 1} s_m T^m` from `s_1..s_M` and checks that its limit is
/// `−χ(S)`.
pub fn zeta_polytope(set: &PolySet, form: &AffineFormPW, terms: usize) -> Result<DaggerSeries> {
    check_dims(set, form)?;
    if set.nonempty_cells().next().is_none() {
        return Ok(DaggerSeries::zero());
    }
    let expected = chi(set)?;
    let candidates = polytope_candidates(set, form)?;
    let deg: usize = candidates.iter().map(|f| f.b as usize).sum();
    let mut coeffs = vec![LaurentPoly::zero()];
    for m in 1..=terms as i64 {
        coeffs.push(polytope_coefficient(set, form, m)?);
    }
    let opts =
        FitOptions { margin: (terms + 1).saturating_sub(2 * deg + 1).max(MIN_MARGIN), num_degree_bound: Some(deg) };
    let h = fit(&SeriesPrefix::new(coeffs), &candidates, opts)?;
    let lim = h.limit()?;
    if lim != LaurentPoly::constant(-(expected as i128)) {
        return Err(Error::LimitMismatch { limit: lim.display_with("U"), expected: -(expected as i128) });
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::cell::{rat, rint, Interval};

    #[test]
    fn box_coefficients_match_enumeration() {
        let boxes = [
            vec![Interval::closed(rat(-1, 2), rat(5, 3)), Interval::open(rat(1, 4), rat(2, 1))],
            vec![Interval { lo: rat(-2, 3), lo_closed: false, hi: Some(rat(1, 6)), hi_closed: true }],
            vec![
                Interval::point(rat(1, 3)),
                Interval::closed(rat(0, 1), rat(1, 1)),
                Interval::open(rat(-1, 1), rat(1, 2)),
            ],
        ];
        for ivs in &boxes {
            let set = PolySet::single(RationalCell::product(ivs));
            let n = ivs.len();
            let form = AffineFormPW::affine((0..n as i64).map(|i| 2 - i).collect(), -1);
            for m in 1..=7 {
                assert_eq!(polytope_coefficient(&set, &form, m).unwrap(), scan_coefficient(&set, &form, m).unwrap());
            }
        }
    }

    fn run(set: &PolySet, form: &AffineFormPW) -> DaggerSeries {
        let m = polytope_terms_needed(&polytope_candidates(set, form).unwrap());
        zeta_polytope(set, form, m).unwrap()
    }

    #[test]
    fn point_gives_geometric_series() {
        let p = PolySet::single(RationalCell::point(&[rint(0)]));
        let h = run(&p, &AffineFormPW::zero(1));
        assert_eq!(h, DaggerSeries::geometric(1, LaurentPoly::one(), Factor::new(0, 1)));
        assert_eq!(h.limit().unwrap(), LaurentPoly::constant(-1));
    }

    #[test]
    fn segment_with_slope() {
        let s = PolySet::single(RationalCell::product(&[Interval::closed(rint(0), rint(1))]));
        let h = run(&s, &AffineFormPW::affine(vec![1], 0));
        assert_eq!(h.limit().unwrap(), LaurentPoly::constant(-1));
        let expansion = h.expand(6);
        for m in 1..=6 {
            let direct = LaurentPoly::from_terms((0..=m).map(|k| (-k, 1)));
            assert_eq!(expansion.get(m as usize), &direct);
        }
    }

    #[test]
    fn open_segment() {
        let s = PolySet::single(RationalCell::product(&[Interval::open(rint(0), rint(1))]));
        let h = run(&s, &AffineFormPW::zero(1));
        let expected = DaggerSeries::new(
            [(2, LaurentPoly::one())].into_iter().collect(),
            vec![Factor::new(0, 1), Factor::new(0, 1)],
        );
        assert!(h.same_series(&expected), "{h}");
        assert_eq!(h.limit().unwrap(), LaurentPoly::one());
    }

    #[test]
    fn rational_vertices_and_pieces() {
        let s = PolySet::single(RationalCell::product(&[Interval::closed(rat(1, 2), rat(5, 3))]));
        let form = AffineFormPW {
            dim: 1,
            pieces: vec![
                AffinePiece { guard: RationalCell::universe(1).with_lt(vec![1], rint(1)), a: vec![2], b: 0 },
                AffinePiece { guard: RationalCell::universe(1).with_le(vec![-1], rint(-1)), a: vec![-1], b: 3 },
            ],
        };
        assert_eq!(run(&s, &form).limit().unwrap(), LaurentPoly::constant(-1));
    }

    #[test]
    fn bad_guards_are_rejected() {
        let s = PolySet::single(RationalCell::product(&[Interval::closed(rint(0), rint(1))]));
        let form = AffineFormPW {
            dim: 1,
            pieces: vec![AffinePiece { guard: RationalCell::universe(1).with_lt(vec![1], rint(1)), a: vec![0], b: 0 }],
        };
        assert!(matches!(polytope_coefficient(&s, &form, 1), Err(Error::Invalid(_))));
    }

    #[test]
    fn empty_set_is_zero() {
        assert!(zeta_polytope(&PolySet::empty(2), &AffineFormPW::zero(2), 4).unwrap().is_zero());
    }

    #[test]
    fn json_round_trip() {
        let form = AffineFormPW::affine(vec![1, -2], 3);
        let back = AffineFormPW::from_json_value(form.to_json_value(), 2).unwrap();
        assert_eq!(back, form);
    }
}
