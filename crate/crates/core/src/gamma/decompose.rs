//! Relatively open cell decompositions and Euler characteristics.

use num_traits::Signed;

use super::cell::{ceil_i64, feasible, rint, to_sys, unit, LinearRow, PolySet, RationalCell};
use crate::error::{Error, Result};

/// Largest ambient dimension handled by the arrangement refinement.
pub const MAX_DIM: usize = 4;

fn hyperplanes(set: &PolySet) -> Vec<LinearRow> {
    let mut hs: Vec<LinearRow> = Vec::new();
    for cell in &set.cells {
        for (_, row) in cell.rows() {
            if let Some((h, _)) = row.normalized() {
                if !hs.contains(&h) {
                    hs.push(h);
                }
            }
        }
    }
    hs
}

fn meets_any(face: &RationalCell, set: &PolySet) -> bool {
    set.cells.iter().any(|c| feasible(face.dim, face.rows().chain(c.rows()).map(|(rel, r)| to_sys(rel, r)).collect()))
}

/// Refines `set` by the arrangement of all its defining hyperplanes and
/// returns the faces lying in the set. Each output cell is relatively open:
/// its equalities cut out its affine hull and every other row is strict.
pub fn decompose_open(set: &PolySet) -> Result<PolySet> {
    if set.dim > MAX_DIM {
        return Err(Error::DimensionLimit { dim: set.dim, max: MAX_DIM });
    }
    let mut faces = vec![RationalCell::universe(set.dim)];
    faces.retain(|f| meets_any(f, set));
    for h in hyperplanes(set) {
        let mut next = Vec::with_capacity(faces.len() * 3);
        for face in faces {
            // faces already on h (through an implied equality) split trivially
            for part in [
                face.clone().with_lt(h.coeffs.clone(), h.rhs.clone()),
                face.clone().with_eq(h.coeffs.clone(), h.rhs.clone()),
                face.clone().with_lt(h.negated().coeffs, h.negated().rhs),
            ] {
                if meets_any(&part, set) {
                    next.push(part);
                }
            }
        }
        faces = next;
    }
    Ok(PolySet { dim: set.dim, cells: faces })
}

/// Dimension of a nonempty relatively open face from [`decompose_open`].
pub fn face_dim(face: &RationalCell) -> usize {
    face.dim - face.eq_rank()
}

fn chi_of_faces(faces: &PolySet) -> i64 {
    faces.cells.iter().map(|f| if face_dim(f).is_multiple_of(2) { 1 } else { -1 }).sum()
}

/// o-minimal Euler characteristic of a bounded set.
pub fn chi(set: &PolySet) -> Result<i64> {
    if set.dim > MAX_DIM {
        return Err(Error::DimensionLimit { dim: set.dim, max: MAX_DIM });
    }
    if !set.is_bounded() {
        return Err(Error::Unbounded);
    }
    Ok(chi_of_faces(&decompose_open(set)?))
}

/// Recession cone generated by standard basis vectors, checked per cell.
fn check_supported_recession(cell: &RationalCell) -> Result<()> {
    let n = cell.dim;
    let cone = RationalCell {
        dim: n,
        eq: cell.eq.iter().map(|r| LinearRow::new(r.coeffs.clone(), rint(0))).collect(),
        lt: vec![],
        le: cell.lt.iter().chain(&cell.le).map(|r| LinearRow::new(r.coeffs.clone(), rint(0))).collect(),
    };
    let in_cone = |i: usize| cone.contains(&(0..n).map(|k| rint(i64::from(k == i))).collect::<Vec<_>>());
    for k in 0..n {
        if in_cone(k) {
            continue;
        }
        let mut probe = cone.clone();
        for i in 0..n {
            probe = probe.with_le(unit(n, i, -1), rint(0));
        }
        probe = probe.with_eq(unit(n, k, 1), rint(1));
        if !probe.is_empty() {
            return Err(Error::UnsupportedShape(format!(
                "recession cone of {cell} is not spanned by coordinate directions"
            )));
        }
    }
    Ok(())
}

/// `lim_{r→∞} χ(S ∩ [−r, r]^n)` for sets bounded below whose cells recede
/// only along coordinate directions.
pub fn chi_bounded(set: &PolySet) -> Result<i64> {
    if set.dim > MAX_DIM {
        return Err(Error::DimensionLimit { dim: set.dim, max: MAX_DIM });
    }
    if !set.is_bounded_below() {
        return Err(Error::UnsupportedShape("set is not bounded below".into()));
    }
    let mut reach = 0i64;
    for cell in set.nonempty_cells() {
        check_supported_recession(cell)?;
        for v in cell.vertices() {
            for x in v {
                reach = reach.max(ceil_i64(&x.abs()));
            }
        }
        for (_, row) in cell.rows() {
            reach = reach.max(ceil_i64(&row.rhs.abs()));
        }
    }
    let r = reach + 1;
    let (a, b) = (chi_truncated(set, r)?, chi_truncated(set, 2 * r)?);
    if a != b {
        return Err(Error::UnsupportedShape(format!("truncated Euler characteristic did not stabilize ({a} vs {b})")));
    }
    Ok(a)
}

/// Euler characteristic of a product of intervals, read from the endpoint
/// types: point 1, closed 1, half-open 0, open −1.
pub fn chi_of_box(cell: &RationalCell) -> Option<i64> {
    let ranges = cell.as_box()?;
    let mut acc = 1i64;
    for (lo, hi) in ranges {
        let ((l, lc), (h, hc)) = (lo?, hi?);
        if l > h || (l == h && !(lc && hc)) {
            return Some(0);
        }
        acc *= match (l == h, lc, hc) {
            (true, _, _) | (false, true, true) => 1,
            (false, false, false) => -1,
            _ => 0,
        };
    }
    Some(acc)
}

/// `χ` computed with an explicit integer truncation radius (no stabilization
/// check).
pub fn chi_truncated(set: &PolySet, r: i64) -> Result<i64> {
    let n = set.dim;
    let cells = set
        .cells
        .iter()
        .map(|c| {
            let mut c = c.clone();
            for i in 0..n {
                c = c.with_le(unit(n, i, 1), rint(r)).with_le(unit(n, i, -1), rint(r));
            }
            c
        })
        .collect();
    chi(&PolySet { dim: n, cells })
}
