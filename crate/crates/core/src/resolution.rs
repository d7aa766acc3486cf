//! Monodromy invariants computed from embedded-resolution data supplied by
//! the user.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::algebra::{fit_integers, DaggerSeries, Factor, FitOptions, LaurentPoly, TPoly, MIN_MARGIN};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: String,
    /// Multiplicity of `f ∘ π` along the divisor.
    #[serde(rename = "N")]
    pub n: u32,
    /// One plus the discrepancy.
    pub nu: u32,
}

/// Open stratum `E_I° ∩ π^{-1}(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub ids: Vec<String>,
    pub chi: i64,
    /// Class of the unramified cover `Ẽ_I°` as a polynomial in `L`.
    #[serde(rename = "class_L", default, skip_serializing_if = "Option::is_none")]
    pub class_l: Option<LaurentPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionData {
    pub d: usize,
    pub components: Vec<Component>,
    pub strata: Vec<Stratum>,
}

impl ResolutionData {
    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s)?;
        r.validate()?;
        Ok(r)
    }

    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    /// Structural checks plus the Euler-number checks available from the
    /// data: the A'Campo sum at `lcm(N)` is the full singleton sum, and a
    /// supplied cover class specializes to `gcd(N_I) · χ(E_I°)` at `L = 1`.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for c in &self.components {
            if c.n == 0 || c.nu == 0 {
                return Err(Error::Malformed(format!("component {} needs N >= 1 and nu >= 1", c.id)));
            }
            if !seen.insert(c.id.as_str()) {
                return Err(Error::Malformed(format!("duplicate component id {}", c.id)));
            }
        }
        let mut sets = BTreeSet::new();
        for s in &self.strata {
            if s.ids.is_empty() {
                return Err(Error::Malformed("stratum with no components".into()));
            }
            let set: BTreeSet<&str> = s.ids.iter().map(String::as_str).collect();
            if set.len() != s.ids.len() {
                return Err(Error::Malformed(format!("stratum {:?} repeats a component", s.ids)));
            }
            if let Some(missing) = set.iter().find(|id| !seen.contains(*id)) {
                return Err(Error::Malformed(format!("stratum {:?} references unknown component {missing}", s.ids)));
            }
            if !sets.insert(set) {
                return Err(Error::Malformed(format!("stratum {:?} listed twice", s.ids)));
            }
            if let Some(class) = &s.class_l {
                let g = self.gcd_n(s) as i128;
                if class.eval_at_one() != g * s.chi as i128 {
                    return Err(Error::Malformed(format!(
                        "class_L of {:?} is {} at L = 1, expected gcd(N) * chi = {}",
                        s.ids,
                        class.eval_at_one(),
                        g * s.chi as i128
                    )));
                }
            }
        }
        let l = self.lcm_n();
        let singles: i128 = self.singletons().map(|(c, s)| c.n as i128 * s.chi as i128).sum();
        if acampo_sum(self, l) != singles {
            return Err(Error::Malformed("A'Campo sum at lcm(N) differs from the singleton sum".into()));
        }
        Ok(())
    }

    fn gcd_n(&self, s: &Stratum) -> u64 {
        s.ids.iter().filter_map(|id| self.component(id)).fold(0u64, |g, c| g.gcd(&(c.n as u64)))
    }

    pub fn lcm_n(&self) -> u64 {
        self.components.iter().fold(1u64, |l, c| l.lcm(&(c.n as u64)))
    }

    pub fn max_n(&self) -> u32 {
        self.components.iter().map(|c| c.n).max().unwrap_or(1)
    }

    fn singletons(&self) -> impl Iterator<Item = (&Component, &Stratum)> {
        self.strata.iter().filter(|s| s.ids.len() == 1).filter_map(|s| self.component(&s.ids[0]).map(|c| (c, s)))
    }

    /// `(−ν_i, N_i)` once per component that appears in some stratum.
    pub fn zeta_candidates(&self) -> Vec<Factor> {
        let used: BTreeSet<&str> = self.strata.iter().flat_map(|s| s.ids.iter().map(String::as_str)).collect();
        let mut mult: BTreeMap<Factor, usize> = BTreeMap::new();
        for c in self.components.iter().filter(|c| used.contains(c.id.as_str())) {
            *mult.entry(Factor::new(-(c.nu as i64), c.n)).or_default() += 1;
        }
        mult.into_iter().flat_map(|(f, k)| std::iter::repeat_n(f, k)).collect()
    }
}

fn acampo_sum(res: &ResolutionData, m: u64) -> i128 {
    res.singletons().filter(|(c, _)| m.is_multiple_of(c.n as u64)).map(|(c, s)| c.n as i128 * s.chi as i128).sum()
}

/// `Λ(M_x^m) = Σ_{N_i | m} N_i χ(E_i°)` over singleton strata.
pub fn acampo_lefschetz(res: &ResolutionData, m: u64) -> Result<i128> {
    if m == 0 {
        return Err(Error::Invalid("m must be positive".into()));
    }
    res.validate()?;
    Ok(acampo_sum(res, m))
}

/// `Σ_I (L − 1)^{|I|−1} [Ẽ_I°] ∏_{i∈I} L^{−ν_i} T^{N_i} / (1 − L^{−ν_i} T^{N_i})`.
pub fn denef_loeser_zeta(res: &ResolutionData) -> Result<DaggerSeries> {
    res.validate()?;
    let l_minus_one = LaurentPoly::from_terms([(1, 1), (0, -1)]);
    let mut total = DaggerSeries::zero();
    for s in &res.strata {
        let class = s.class_l.clone().ok_or_else(|| Error::MissingClass(s.ids.clone()))?;
        let comps: Vec<&Component> = s.ids.iter().filter_map(|id| res.component(id)).collect();
        let nu: i64 = comps.iter().map(|c| c.nu as i64).sum();
        let n: i64 = comps.iter().map(|c| c.n as i64).sum();
        let coeff = &(&l_minus_one.pow(comps.len() as u32 - 1) * &class) * &LaurentPoly::monomial(-nu, 1);
        let num: TPoly = [(n, coeff)].into_iter().collect();
        let den = comps.iter().map(|c| Factor::new(-(c.nu as i64), c.n)).collect();
        total = total.add(&DaggerSeries::new(num, den));
    }
    Ok(total.reduced())
}

/// The `L = 1` specialization `Σ_i N_i χ(E_i°) T^{N_i} / (1 − T^{N_i})`;
/// strata with `|I| ≥ 2` drop out through their `(L − 1)` factors.
pub fn denef_loeser_euler(res: &ResolutionData) -> Result<DaggerSeries> {
    res.validate()?;
    let mut total = DaggerSeries::zero();
    for (c, s) in res.singletons() {
        let coeff = LaurentPoly::constant(c.n as i128 * s.chi as i128);
        total = total.add(&DaggerSeries::geometric(c.n as i64, coeff, Factor::new(0, c.n)));
    }
    Ok(total.reduced())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceSource {
    Jets,
    Resolution,
}

/// `Λ(M^m)` for `m = 1..=M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LefschetzSequence {
    pub values: BTreeMap<usize, i128>,
    pub source: SequenceSource,
}

impl LefschetzSequence {
    pub fn new(values: &[i128], source: SequenceSource) -> Self {
        Self { values: values.iter().enumerate().map(|(i, &v)| (i + 1, v)).collect(), source }
    }

    pub fn from_resolution(res: &ResolutionData, max_m: usize) -> Result<Self> {
        let values: Vec<i128> = (1..=max_m as u64).map(|m| acampo_lefschetz(res, m)).collect::<Result<_>>()?;
        Ok(Self::new(&values, SequenceSource::Resolution))
    }

    /// Values in order, checking that the keys are exactly `1..=M`.
    pub fn as_vec(&self) -> Result<Vec<i128>> {
        if self.values.keys().copied().ne(1..=self.values.len()) {
            return Err(Error::Invalid("Lefschetz sequence must cover 1..M contiguously".into()));
        }
        Ok(self.values.values().copied().collect())
    }
}

/// Smallest `m0 ≤ M/2` with `Σ_m Λ(M^m) T^m = Σ_{i ≤ m0} Λ(M^i) T^i / (1 − T^{m0})`
/// on the covered range, and `χ = Λ(M^{m0})`.
pub fn quasi_unipotent_period(seq: &LefschetzSequence) -> Result<(usize, i128)> {
    let v = seq.as_vec()?;
    let max = v.len() / 2;
    for m0 in 1..=max {
        let num: TPoly =
            (1..=m0).filter(|&i| v[i - 1] != 0).map(|i| (i as i64, LaurentPoly::constant(v[i - 1]))).collect();
        let h = DaggerSeries::new(num, vec![Factor::new(0, m0 as u32)]);
        let expansion = h.expand(v.len()).eval_at_one();
        if expansion[1..] == v[..] {
            return Ok((m0, v[m0 - 1]));
        }
    }
    Err(Error::NoPeriod { max })
}

/// Fits `Σ_m Λ(M^m) T^m` over factors `(0, b)` and returns the fit with
/// `−lim`.
pub fn euler_zeta_limit(seq: &LefschetzSequence, periods: &[u32]) -> Result<(DaggerSeries, i128)> {
    let v = seq.as_vec()?;
    let mut prefix = vec![0i128];
    prefix.extend(v);
    let cands: Vec<Factor> = periods.iter().map(|&b| Factor::new(0, b)).collect();
    let deg: usize = periods.iter().map(|&b| b as usize).sum();
    let h = fit_integers(&prefix, &cands, FitOptions { margin: MIN_MARGIN, num_degree_bound: Some(deg) })?;
    let lim = h.limit()?;
    let chi = -lim.eval_at_one();
    Ok((h, chi))
}

/// Terms [`euler_zeta_limit`] needs for the given periods.
pub fn euler_terms_needed(periods: &[u32]) -> usize {
    let deg: usize = periods.iter().map(|&b| b as usize).sum();
    2 * deg + MIN_MARGIN
}
