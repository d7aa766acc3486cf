//! Points of `(1/m)Z^n` in a set and the weighted sums over them.

use num_traits::Zero;
use rayon::prelude::*;

use super::cell::{ceil_i64, denom_i64, floor_i64, rat, PolySet, Rat, RationalCell, Rel};
use crate::algebra::{DaggerSeries, Factor, LaurentPoly, TPoly};
use crate::error::{Error, Result};

/// Coordinate sum.
pub fn weight(point: &[Rat]) -> Rat {
    point.iter().fold(Rat::zero(), |acc, x| acc + x)
}

/// Integer form of a row for points `k / m`: `den · ⟨c, k⟩ (rel) m · num`.
pub(crate) struct ScaledRow {
    coeffs: Vec<i128>,
    rhs: i128,
    rel: Rel,
}

pub(crate) fn compile(cell: &RationalCell, m: i64) -> Vec<ScaledRow> {
    cell.rows()
        .map(|(rel, r)| {
            let den = denom_i64(&r.rhs) as i128;
            let num: i128 = r.rhs.numer().try_into().expect("constant out of range");
            ScaledRow { coeffs: r.coeffs.iter().map(|&c| c as i128 * den).collect(), rhs: m as i128 * num, rel }
        })
        .collect()
}

pub(crate) fn satisfies(rows: &[ScaledRow], k: &[i64]) -> bool {
    rows.iter().all(|r| {
        let v: i128 = r.coeffs.iter().zip(k).map(|(&c, &x)| c * x as i128).sum();
        match r.rel {
            Rel::Eq => v == r.rhs,
            Rel::Lt => v < r.rhs,
            Rel::Le => v <= r.rhs,
        }
    })
}

/// Numerators `k` of the points `k / m` of a bounded set, sorted
/// lexicographically.
pub fn lattice_numerators(set: &PolySet, m: i64) -> Result<Vec<Vec<i64>>> {
    assert!(m >= 1, "lattice step needs m >= 1");
    if set.cells.is_empty() {
        return Ok(vec![]);
    }
    let bbox = set.bounding_box();
    let mut ranges = Vec::with_capacity(set.dim);
    for (lo, hi) in &bbox {
        let (Some(lo), Some(hi)) = (lo, hi) else { return Err(Error::Unbounded) };
        ranges.push((ceil_i64(&(lo * rat(m, 1))), floor_i64(&(hi * rat(m, 1)))));
    }
    let compiled: Vec<Vec<ScaledRow>> = set.cells.iter().map(|c| compile(c, m)).collect();
    if set.dim == 0 {
        return Ok(if compiled.iter().any(|rows| satisfies(rows, &[])) { vec![vec![]] } else { vec![] });
    }
    let (first_lo, first_hi) = ranges[0];
    // slabs along the first coordinate are scanned independently
    let slabs: Vec<Vec<Vec<i64>>> = (first_lo..=first_hi)
        .into_par_iter()
        .map(|k0| {
            let mut out = Vec::new();
            let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
            k[0] = k0;
            if ranges.iter().skip(1).any(|r| r.0 > r.1) {
                return out;
            }
            loop {
                if compiled.iter().any(|rows| satisfies(rows, &k)) {
                    out.push(k.clone());
                }
                // odometer over coordinates 1..n
                let mut i = set.dim - 1;
                loop {
                    if i == 0 {
                        return out;
                    }
                    if k[i] < ranges[i].1 {
                        k[i] += 1;
                        break;
                    }
                    k[i] = ranges[i].0;
                    i -= 1;
                }
            }
        })
        .collect();
    Ok(slabs.into_iter().flatten().collect())
}

/// Points of `S ∩ (1/m)Z^n`, sorted lexicographically.
pub fn lattice_points(set: &PolySet, m: i64) -> Result<Vec<Vec<Rat>>> {
    Ok(lattice_numerators(set, m)?.into_iter().map(|k| k.into_iter().map(|x| rat(x, m)).collect()).collect())
}

fn t_minus_one_pow(n: usize) -> LaurentPoly {
    LaurentPoly::from_terms([(1, 1), (0, -1)]).pow(n as u32)
}

/// `(T − 1)^n Σ_{γ ∈ S ∩ (1/m)Z^n} T^{−m·w(γ)}` as a Laurent polynomial in `T`.
pub fn alpha_m(set: &PolySet, m: i64) -> Result<LaurentPoly> {
    let pts = lattice_numerators(set, m)?;
    let sum = LaurentPoly::from_terms(pts.iter().map(|k| (-k.iter().sum::<i64>(), 1)));
    Ok(&t_minus_one_pow(set.dim) * &sum)
}

/// `(T − 1) Σ_{k ∈ [k0, k1]} T^{−k}` for one coordinate, or the half-line
/// version when `k1` is absent.
fn one_dim_factor(k0: i64, k1: Option<i64>) -> DaggerSeries {
    match k1 {
        Some(k1) if k1 < k0 => DaggerSeries::zero(),
        Some(k1) => {
            let sum = LaurentPoly::from_terms((k0..=k1).map(|k| (-k, 1)));
            let p = &t_minus_one_pow(1) * &sum;
            DaggerSeries::polynomial(p.terms().iter().map(|&(e, c)| (e, LaurentPoly::constant(c))).collect())
        }
        None => {
            // (T − 1) Σ_{k ≥ k0} T^{−k} = T^{1−k0}, written as T^{1−k0}(1 − T) / (1 − T)
            let num: TPoly =
                [(1 - k0, LaurentPoly::constant(1)), (2 - k0, LaurentPoly::constant(-1))].into_iter().collect();
            DaggerSeries::new(num, vec![Factor::new(0, 1)]).reduced()
        }
    }
}

fn integer_range(lo: &(Rat, bool), hi: Option<&(Rat, bool)>, m: i64) -> (i64, Option<i64>) {
    let scaled = |x: &Rat| x * rat(m, 1);
    let (l, lc) = lo;
    let k0 = if *lc { ceil_i64(&scaled(l)) } else { floor_i64(&scaled(l)) + 1 };
    let k1 = hi.map(|(h, hc)| if *hc { floor_i64(&scaled(h)) } else { ceil_i64(&scaled(h)) - 1 });
    (k0, k1)
}

/// `Σ_{γ ∈ cell ∩ (1/m)Z^n} U^{−m a·γ}` in closed form when `cell` is a
/// bounded product of intervals; `None` otherwise.
pub(crate) fn box_weight_sum(cell: &RationalCell, a: &[i64], m: i64) -> Option<LaurentPoly> {
    let ranges = cell.as_box()?;
    let mut numerator = LaurentPoly::one();
    let mut divisor = LaurentPoly::one();
    for ((lo, hi), &ai) in ranges.iter().zip(a) {
        let (k0, Some(k1)) = integer_range(lo.as_ref()?, Some(hi.as_ref()?), m) else {
            return None;
        };
        if k1 < k0 {
            return Some(LaurentPoly::zero());
        }
        if ai == 0 {
            numerator = numerator.scale((k1 - k0 + 1) as i128);
        } else {
            // Σ_{k0..=k1} x^k = (x^{k0} − x^{k1+1}) / (1 − x) with x = U^{−a}
            let top = LaurentPoly::from_terms([(-ai * k0, 1), (-ai * (k1 + 1), -1)]);
            numerator = &numerator * &top;
            divisor = &divisor * &LaurentPoly::from_terms([(0, 1), (-ai, -1)]);
        }
    }
    numerator.div_exact(&divisor)
}

/// The rational form of `(T − 1)^n Σ T^{−m·w(γ)}` for sets bounded below
/// that are disjoint unions of interval products (each interval bounded or
/// of the form `[c, ∞)` / `(c, ∞)`).
pub fn tilde_alpha(set: &PolySet, m: i64) -> Result<DaggerSeries> {
    let cells: Vec<&RationalCell> = set.nonempty_cells().collect();
    for (i, a) in cells.iter().enumerate() {
        for b in &cells[i + 1..] {
            if !a.intersect(b).is_empty() {
                return Err(Error::UnsupportedShape("cells overlap".into()));
            }
        }
    }
    let mut total = DaggerSeries::zero();
    for cell in cells {
        let ranges =
            cell.as_box().ok_or_else(|| Error::UnsupportedShape(format!("{cell} is not a product of intervals")))?;
        let mut term = DaggerSeries::monomial(0, LaurentPoly::one());
        for (lo, hi) in ranges {
            let lo = lo.ok_or_else(|| Error::UnsupportedShape("set is not bounded below".into()))?;
            let (k0, k1) = integer_range(&lo, hi.as_ref(), m);
            term = term.mul(&one_dim_factor(k0, k1));
        }
        total = total.add(&term);
    }
    Ok(total.reduced())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::cell::{rint, Interval};

    fn t(terms: &[(i64, i128)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    fn iv(lo: i64, hi: i64, lc: bool, hc: bool) -> PolySet {
        PolySet::single(RationalCell::product(&[Interval {
            lo: rint(lo),
            lo_closed: lc,
            hi: Some(rint(hi)),
            hi_closed: hc,
        }]))
    }

    fn as_poly(h: &DaggerSeries) -> LaurentPoly {
        assert!(h.denominator().is_empty(), "{h}");
        LaurentPoly::from_terms(h.numerator().iter().map(|(&e, c)| (e, c.eval_at_one())))
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(&[rat(1, 2), rat(1, 2)]), rint(1));
        assert_eq!(weight(&[rint(0), rint(0)]), rint(0));
        assert_eq!(weight(&[rat(2, 3), rat(-1, 3), rint(1)]), rat(4, 3));
    }

    #[test]
    fn lattice_point_examples() {
        assert_eq!(
            lattice_points(&iv(0, 1, true, true), 2).unwrap(),
            vec![vec![rint(0)], vec![rat(1, 2)], vec![rint(1)]]
        );
        assert!(lattice_points(&iv(0, 1, false, false), 1).unwrap().is_empty());
        let tri = PolySet::single(
            RationalCell::universe(2)
                .with_le(vec![-1, 0], rint(0))
                .with_le(vec![0, -1], rint(0))
                .with_le(vec![1, 1], rint(1)),
        );
        assert_eq!(
            lattice_points(&tri, 1).unwrap(),
            vec![vec![rint(0), rint(0)], vec![rint(0), rint(1)], vec![rint(1), rint(0)]]
        );
        let ray = PolySet::single(RationalCell::product(&[Interval::half_line(rint(0), true)]));
        assert!(matches!(lattice_points(&ray, 1), Err(Error::Unbounded)));
    }

    #[test]
    fn alpha_examples() {
        let point = PolySet::single(RationalCell::point(&[rint(0)]));
        assert_eq!(alpha_m(&point, 1).unwrap(), t(&[(1, 1), (0, -1)]));
        assert_eq!(alpha_m(&iv(0, 1, true, true), 1).unwrap(), t(&[(1, 1), (-1, -1)]));
        assert_eq!(alpha_m(&iv(0, 1, false, false), 2).unwrap(), t(&[(0, 1), (-1, -1)]));
        assert!(alpha_m(&PolySet::empty(2), 3).unwrap().is_zero());
    }

    #[test]
    fn tilde_alpha_examples() {
        let open_ray = PolySet::single(RationalCell::product(&[Interval::half_line(rint(0), false)]));
        for m in 1..=6 {
            assert_eq!(as_poly(&tilde_alpha(&open_ray, m).unwrap()), LaurentPoly::one());
        }
        let point = PolySet::single(RationalCell::point(&[rint(0)]));
        assert_eq!(as_poly(&tilde_alpha(&point, 1).unwrap()), t(&[(1, 1), (0, -1)]));
        let closed_ray = PolySet::single(RationalCell::product(&[Interval::half_line(rint(0), true)]));
        assert_eq!(as_poly(&tilde_alpha(&closed_ray, 1).unwrap()), t(&[(1, 1)]));
        let tri = PolySet::single(RationalCell::universe(2).with_le(vec![1, 1], rint(1)).with_le(vec![-1, 0], rint(0)));
        assert!(matches!(tilde_alpha(&tri, 1), Err(Error::UnsupportedShape(_))));
    }
}
