//! The `milnor` command line: parses inputs, runs the computations,
//! cross-checks the oracles and renders tables or JSON.
//!
//! Exit status: 0 success, 1 computation failed, 2 parse or configuration
//! error, 3 oracle disagreement, 4 resource limit.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{DaggerSeries, LaurentPoly, SeriesPrefix, MIN_MARGIN};
use crate::error::{Error, Result};
use crate::gamma::{self, AffineFormPW, PolySet};
use crate::jets::{self, ChiRoute, CountTable, JetOptions, MultiPoly, DEFAULT_NODE_BUDGET};
use crate::resolution::{self, LefschetzSequence, ResolutionData};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DISAGREE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

/// Terms of the zeta prefix when neither `-M` nor a fixture is given.
pub const DEFAULT_TERMS: usize = 8;
/// The zeta prefix is extended up to this many terms when no candidate
/// set fits the requested prefix.
pub const DEFAULT_MAX_TERMS: usize = 16;

#[derive(Parser, Clone, Debug)]
#[command(name = "milnor", version, about = "Jet-space Euler characteristics and monodromy Lefschetz numbers")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// χ_c(X_{m,x}) by point counting, optionally checked against A'Campo.
    Lefschetz {
        #[command(flatten)]
        jet: JetArgs,
        #[arg(short = 'm', long = "m-range", default_value = "1..6")]
        m_range: MRange,
        /// Resolution fixture (file or fixture directory).
        #[arg(long)]
        resolution: Option<PathBuf>,
    },
    /// Motivic zeta prefix, fitted rational form and S_{f,x}.
    Zeta {
        #[command(flatten)]
        jet: JetArgs,
        /// Number of series terms; defaults to 2·max N + 2 with a resolution, else 8.
        #[arg(short = 'M', long = "terms")]
        terms: Option<usize>,
        /// Upper limit when the prefix has to be extended for a fit.
        #[arg(long)]
        max_terms: Option<usize>,
        /// Resolution fixture (file or fixture directory).
        #[arg(long)]
        resolution: Option<PathBuf>,
    },
    /// Euler characteristics and lattice-point series of polyhedral sets.
    Polytope {
        #[arg(value_enum)]
        action: PolytopeAction,
        /// Set as a JSON file path or inline JSON.
        #[arg(long)]
        set: String,
        /// Piecewise affine form (file or inline JSON); defaults to zero.
        #[arg(long)]
        form: Option<String>,
        /// Level for `alpha`.
        #[arg(short = 'm', long = "m", default_value_t = 1)]
        m: i64,
        /// Number of series terms; defaults to the fitting bound of the candidates.
        #[arg(short = 'M', long = "terms")]
        terms: Option<usize>,
    },
    /// Lefschetz numbers, period and zeta functions from resolution data.
    Acampo {
        /// Resolution fixture (file or fixture directory).
        #[arg(long)]
        resolution: PathBuf,
        /// Number of Lefschetz numbers to compute; defaults to 2·max N + 2.
        #[arg(short = 'M', long = "terms")]
        terms: Option<usize>,
    },
    /// Raw point counts of X_{m,x} over the admissible primes.
    Count {
        #[command(flatten)]
        jet: JetArgs,
        #[arg(short = 'm', long = "m-range", default_value = "1..3")]
        m_range: MRange,
    },
}

#[derive(Args, Clone, Debug)]
pub struct JetArgs {
    /// Polynomial in x1..xn, e.g. "x1^2 + x2^3".
    #[arg(short = 'f', long = "poly")]
    pub poly: String,
    /// Base point as comma-separated rationals; defaults to the origin.
    #[arg(long)]
    pub at: Option<String>,
    /// Number of primes to count at (at least degree bound + 3).
    #[arg(long)]
    pub primes: Option<usize>,
    /// Largest prime to count at; extension fields of a small prime are
    /// used when too few primes remain for interpolation.
    #[arg(long)]
    pub max_prime: Option<u64>,
    /// Search nodes allowed per count.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolytopeAction {
    Chi,
    Alpha,
    Series,
}

/// Inclusive range of jet orders written `a..b`, `a..=b` or `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MRange {
    pub start: usize,
    pub end: usize,
}

impl FromStr for MRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("cannot read {t:?} as an order"));
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => (num(s)?, num(s)?),
        };
        if start == 0 || end < start {
            return Err(format!("range {s:?} must be nonempty and start at 1 or later"));
        }
        Ok(Self { start, end })
    }
}

impl MRange {
    pub fn orders(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Agree,
    Disagree,
    Unchecked,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LefschetzRow {
    pub m: usize,
    pub chi_c: Option<i128>,
    pub route: Option<ChiRoute>,
    pub class: Option<LaurentPoly>,
    pub counts: CountTable,
    pub acampo: Option<i128>,
    pub status: Status,
    pub error: Option<String>,
    /// Exit status this row contributes; nonzero only for failed rows.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub exit: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LefschetzReport {
    pub poly: String,
    pub at: Vec<String>,
    pub rows: Vec<LefschetzRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaFit {
    pub zeta: DaggerSeries,
    pub s: LaurentPoly,
    pub chi_c: i128,
}

/// Consistency of `χ_c(S)` with the monodromy period of a fixture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodCheck {
    pub m0: usize,
    pub lefschetz_m0: i128,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaReport {
    pub poly: String,
    pub at: Vec<String>,
    pub d: usize,
    pub terms_requested: usize,
    pub terms_used: usize,
    pub prefix: Vec<LaurentPoly>,
    pub fit: Option<ZetaFit>,
    /// Largest `Σ b` of the candidate grid searched when no fit was found.
    pub grid_max_degree: Option<usize>,
    pub period: Option<PeriodCheck>,
    /// Term-by-term comparison with the Denef–Loeser series of the fixture.
    pub resolution_zeta: Option<Status>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeReport {
    pub action: PolytopeAction,
    pub chi: Option<i64>,
    pub m: Option<i64>,
    pub alpha: Option<String>,
    pub zeta: Option<DaggerSeries>,
    pub limit: Option<LaurentPoly>,
    pub terms: Option<usize>,
    pub status: Option<Status>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcampoReport {
    pub lefschetz: Vec<(usize, i128)>,
    pub period: Option<(usize, i128)>,
    pub euler_zeta: DaggerSeries,
    /// `−lim` of the `L = 1` zeta function.
    pub euler_chi: i128,
    /// `−lim` of the series fitted to the Lefschetz sequence over the period.
    pub zeta_limit_chi: Option<i128>,
    pub zeta: Option<DaggerSeries>,
    pub s: Option<LaurentPoly>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub m: usize,
    pub counts: CountTable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub poly: String,
    pub at: Vec<String>,
    pub rows: Vec<CountRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Report {
    Lefschetz(LefschetzReport),
    Zeta(ZetaReport),
    Polytope(PolytopeReport),
    Acampo(AcampoReport),
    Count(CountReport),
}

/// Exit status for an error, looking through per-order wrappers.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::AtOrder { source, .. } => exit_code(source),
        Error::Parse { .. }
        | Error::Invalid(_)
        | Error::Malformed(_)
        | Error::MissingClass(_)
        | Error::NonVanishing { .. }
        | Error::DimensionLimit { .. }
        | Error::UnsupportedShape(_)
        | Error::Unbounded
        | Error::Json(_)
        | Error::Io(_) => EXIT_CONFIG,
        Error::ResourceLimit { .. } | Error::NotEnoughPrimes { .. } | Error::FrobeniusFit { .. } => EXIT_RESOURCE,
        Error::LimitMismatch { .. } => EXIT_DISAGREE,
        _ => EXIT_FAILURE,
    }
}

fn is_zero(c: &i32) -> bool {
    *c == 0
}

fn worst(codes: impl IntoIterator<Item = i32>) -> i32 {
    // disagreement outranks resource limits, which outrank other failures
    let rank = |c: i32| match c {
        EXIT_DISAGREE => 4,
        EXIT_CONFIG => 3,
        EXIT_RESOURCE => 2,
        EXIT_FAILURE => 1,
        _ => 0,
    };
    codes.into_iter().max_by_key(|&c| rank(c)).unwrap_or(EXIT_OK)
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Disagree => EXIT_DISAGREE,
        Status::Failed => EXIT_FAILURE,
        _ => EXIT_OK,
    }
}

fn verdict(equal: bool) -> Status {
    if equal {
        Status::Agree
    } else {
        Status::Disagree
    }
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self {
            Report::Lefschetz(r) => worst(r.rows.iter().map(|row| row.exit.max(status_code(row.status)))),
            Report::Zeta(r) => {
                let fit = if r.fit.is_some() { EXIT_OK } else { EXIT_FAILURE };
                let period = r.period.as_ref().map_or(EXIT_OK, |p| status_code(p.status));
                worst([fit, period, r.resolution_zeta.map_or(EXIT_OK, status_code)])
            }
            Report::Polytope(r) => r.status.map_or(EXIT_OK, status_code),
            Report::Acampo(r) => status_code(r.status),
            Report::Count(_) => EXIT_OK,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Lefschetz(r) => {
                let _ = writeln!(s, "f = {} at ({})", r.poly, r.at.join(", "));
                let _ =
                    writeln!(s, "{:>3}  {:>6}  {:<9}  {:>7}  {:<9}  class", "m", "chi_c", "route", "A'Campo", "status");
                for row in &r.rows {
                    let chi = row.chi_c.map_or("-".into(), |c| c.to_string());
                    let route = match row.route {
                        Some(ChiRoute::Class) => "class",
                        Some(ChiRoute::Frobenius) => "frobenius",
                        None => "-",
                    };
                    let ac = row.acampo.map_or("-".into(), |c| c.to_string());
                    let detail = match (&row.class, &row.error) {
                        (_, Some(e)) => e.clone(),
                        (Some(c), None) => c.to_string(),
                        (None, None) => "-".into(),
                    };
                    let _ = writeln!(
                        s,
                        "{:>3}  {:>6}  {:<9}  {:>7}  {:<9}  {}",
                        row.m,
                        chi,
                        route,
                        ac,
                        status_str(row.status),
                        detail
                    );
                }
            }
            Report::Zeta(r) => {
                let _ = writeln!(s, "f = {} at ({}), d = {}", r.poly, r.at.join(", "), r.d);
                if r.terms_used != r.terms_requested {
                    let _ = writeln!(s, "terms: {} requested, {} used", r.terms_requested, r.terms_used);
                }
                for (m, t) in r.prefix.iter().enumerate().skip(1) {
                    let _ = writeln!(s, "  Z_{m} = {t}");
                }
                match &r.fit {
                    Some(fit) => {
                        let _ = writeln!(s, "Z(T) = {}", fit.zeta);
                        let _ = writeln!(s, "S = {}", fit.s);
                        let _ = writeln!(s, "chi_c(S) = {}", fit.chi_c);
                    }
                    None => {
                        let _ = writeln!(
                            s,
                            "no fit: candidate grid of factors (a, b) with -d*b <= a <= 0 and total b <= {} exhausted; extend with -M",
                            r.grid_max_degree.unwrap_or(0)
                        );
                    }
                }
                if let Some(p) = &r.period {
                    let _ = writeln!(
                        s,
                        "period m0 = {}, Lefschetz(M^m0) = {}: {}",
                        p.m0,
                        p.lefschetz_m0,
                        status_str(p.status)
                    );
                }
                if let Some(st) = r.resolution_zeta {
                    let _ = writeln!(s, "resolution zeta: {}", status_str(st));
                }
            }
            Report::Polytope(r) => {
                if let Some(c) = r.chi {
                    let _ = writeln!(s, "chi = {c}");
                }
                if let (Some(m), Some(a)) = (r.m, &r.alpha) {
                    let _ = writeln!(s, "alpha_{m} = {a}");
                }
                if let Some(z) = &r.zeta {
                    let _ = writeln!(s, "Z(T) = {}", z.display_with("U", "T"));
                }
                if let Some(l) = &r.limit {
                    let _ = writeln!(s, "limit = {}", l.display_with("U"));
                }
                if let Some(st) = r.status {
                    let word = if st == Status::Agree { "OK" } else { "MISMATCH" };
                    let _ = writeln!(s, "verdict: {word}");
                }
            }
            Report::Acampo(r) => {
                let _ = writeln!(s, "{:>3}  {:>7}", "m", "Lambda");
                for (m, v) in &r.lefschetz {
                    let _ = writeln!(s, "{m:>3}  {v:>7}");
                }
                match r.period {
                    Some((m0, chi)) => {
                        let _ = writeln!(s, "period m0 = {m0}, chi = {chi}");
                    }
                    None => {
                        let _ = writeln!(s, "period: none within the computed range");
                    }
                }
                let _ = writeln!(s, "Z(T)|L=1 = {}", r.euler_zeta);
                let _ = writeln!(s, "-lim Z(T)|L=1 = {}", r.euler_chi);
                if let Some(c) = r.zeta_limit_chi {
                    let _ = writeln!(s, "-lim of fitted Lefschetz series = {c}");
                }
                if let (Some(z), Some(sv)) = (&r.zeta, &r.s) {
                    let _ = writeln!(s, "Z(T) = {z}");
                    let _ = writeln!(s, "S = {sv}");
                }
                let _ = writeln!(s, "status: {}", status_str(r.status));
            }
            Report::Count(r) => {
                let _ = writeln!(s, "f = {} at ({})", r.poly, r.at.join(", "));
                for row in &r.rows {
                    let cells: Vec<String> = row.counts.rows.iter().map(|(q, n)| format!("{q}:{n}")).collect();
                    let _ = writeln!(s, "m = {}: {}", row.m, cells.join(" "));
                }
            }
        }
        s
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Agree => "AGREE",
        Status::Disagree => "DISAGREE",
        Status::Unchecked => "-",
        Status::Failed => "FAILED",
    }
}

struct JetInput {
    text: String,
    f: MultiPoly,
    x: Vec<BigRational>,
    opts: JetOptions,
}

impl JetInput {
    fn new(args: &JetArgs) -> Result<Self> {
        let f = jets::parse_poly(&args.poly)?;
        let x = jets::parse_point(args.at.as_deref().unwrap_or(""), f.n_vars())?;
        if args.node_budget == 0 {
            return Err(Error::Invalid("node budget must be positive".into()));
        }
        if args.primes == Some(0) {
            return Err(Error::Invalid("prime budget must be positive".into()));
        }
        let opts = JetOptions {
            primes: args.primes,
            node_budget: args.node_budget,
            max_prime: args.max_prime,
            ..JetOptions::default()
        };
        Ok(Self { text: f.to_string(), f, x, opts })
    }

    fn at(&self) -> Vec<String> {
        self.x.iter().map(|c| c.to_string()).collect()
    }
}

/// Reads JSON from a path, or parses the argument itself when it starts
/// with `{`.
fn read_json_arg(arg: &str) -> Result<serde_json::Value> {
    let text = if arg.trim_start().starts_with('{') { arg.to_string() } else { std::fs::read_to_string(arg)? };
    Ok(serde_json::from_str(&text)?)
}

/// Loads a resolution fixture from a file or from `resolution.json` inside
/// a fixture directory.
pub fn load_resolution(path: &Path) -> Result<ResolutionData> {
    let file = if path.is_dir() { path.join("resolution.json") } else { path.to_path_buf() };
    ResolutionData::from_json(&std::fs::read_to_string(file)?)
}

fn check_dimension(res: &ResolutionData, f: &MultiPoly) -> Result<()> {
    if res.d != f.n_vars() {
        return Err(Error::Invalid(format!(
            "resolution has d = {} but the polynomial has {} variables",
            res.d,
            f.n_vars()
        )));
    }
    Ok(())
}

fn cmd_lefschetz(jet: &JetArgs, range: MRange, resolution: Option<&Path>) -> Result<Report> {
    let input = JetInput::new(jet)?;
    let res = resolution.map(load_resolution).transpose()?;
    if let Some(res) = &res {
        check_dimension(res, &input.f)?;
    }
    let orders: Vec<usize> = range.orders().collect();
    let results: Vec<Result<jets::JetEuler>> =
        orders.par_iter().map(|&m| jets::lefschetz_via_jets(&input.f, &input.x, m, &input.opts)).collect();
    let mut rows = Vec::with_capacity(orders.len());
    for (m, r) in orders.into_iter().zip(results) {
        let acampo = res.as_ref().map(|res| resolution::acampo_lefschetz(res, m as u64)).transpose()?;
        let row = match r {
            Ok(je) => LefschetzRow {
                m,
                chi_c: Some(je.chi_c),
                route: Some(je.route),
                class: je.class,
                counts: je.counts,
                acampo,
                status: acampo.map_or(Status::Unchecked, |a| verdict(a == je.chi_c)),
                error: None,
                exit: EXIT_OK,
            },
            Err(e) => LefschetzRow {
                m,
                chi_c: None,
                route: None,
                class: None,
                counts: match &e {
                    Error::Interpolation { table, .. } => table.clone(),
                    _ => CountTable::default(),
                },
                acampo,
                status: Status::Failed,
                error: Some(e.to_string()),
                exit: exit_code(&e),
            },
        };
        rows.push(row);
    }
    Ok(Report::Lefschetz(LefschetzReport { at: input.at(), poly: input.text, rows }))
}

fn cmd_zeta(
    jet: &JetArgs,
    terms: Option<usize>,
    max_terms: Option<usize>,
    resolution: Option<&Path>,
) -> Result<Report> {
    let input = JetInput::new(jet)?;
    let res = resolution.map(load_resolution).transpose()?;
    if let Some(res) = &res {
        check_dimension(res, &input.f)?;
    }
    let d = input.f.n_vars();
    let requested = terms.unwrap_or_else(|| res.as_ref().map_or(DEFAULT_TERMS, |r| 2 * r.max_n() as usize + 2));
    if requested == 0 {
        return Err(Error::Invalid("number of terms must be positive".into()));
    }
    let cap = max_terms.unwrap_or(DEFAULT_MAX_TERMS).max(requested);
    let mut prefix = vec![LaurentPoly::zero()];
    prefix.extend(jets::zeta_terms(&input.f, &input.x, d, 1..=requested, &input.opts)?);
    let fit = loop {
        let p = SeriesPrefix::new(prefix.clone());
        match jets::search_zeta_fit(&p, d) {
            Ok(fit) => break Some(fit),
            Err(Error::FitFailure { .. }) if prefix.len() - 1 < cap => {
                let from = prefix.len();
                let to = (from + 1).min(cap);
                prefix.extend(jets::zeta_terms(&input.f, &input.x, d, from..=to, &input.opts)?);
            }
            Err(Error::FitFailure { .. }) => break None,
            Err(e) => return Err(e),
        }
    };
    let terms_used = prefix.len() - 1;
    let fit = fit.map(|f| ZetaFit { zeta: f.zeta, s: f.s, chi_c: f.chi_c });
    let (mut period, mut resolution_zeta) = (None, None);
    if let Some(res) = &res {
        let seq = LefschetzSequence::from_resolution(res, 2 * res.lcm_n() as usize)?;
        if let (Ok((m0, lambda)), Some(fit)) = (resolution::quasi_unipotent_period(&seq), &fit) {
            period = Some(PeriodCheck { m0, lefschetz_m0: lambda, status: verdict(fit.chi_c == lambda) });
        }
        match resolution::denef_loeser_zeta(res) {
            Ok(z) => resolution_zeta = Some(verdict(z.expand(terms_used).terms == prefix)),
            Err(Error::MissingClass(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let grid_max_degree = fit.is_none().then(|| prefix.len().saturating_sub(1 + MIN_MARGIN) / 2);
    Ok(Report::Zeta(ZetaReport {
        poly: input.text.clone(),
        at: input.at(),
        d,
        terms_requested: requested,
        terms_used,
        prefix,
        fit,
        grid_max_degree,
        period,
        resolution_zeta,
    }))
}

fn cmd_polytope(action: PolytopeAction, set: &str, form: Option<&str>, m: i64, terms: Option<usize>) -> Result<Report> {
    let set: PolySet = serde_json::from_value(read_json_arg(set)?)?;
    let mut report =
        PolytopeReport { action, chi: None, m: None, alpha: None, zeta: None, limit: None, terms: None, status: None };
    match action {
        PolytopeAction::Chi => {
            report.chi = Some(if set.is_bounded() { gamma::chi(&set)? } else { gamma::chi_bounded(&set)? });
        }
        PolytopeAction::Alpha => {
            if m <= 0 {
                return Err(Error::Invalid("m must be positive".into()));
            }
            report.m = Some(m);
            report.alpha = Some(if set.is_bounded() {
                gamma::alpha_m(&set, m)?.display_with("T")
            } else {
                gamma::tilde_alpha(&set, m)?.display_with("L", "T")
            });
        }
        PolytopeAction::Series => {
            let form = match form {
                Some(f) => AffineFormPW::from_json_value(read_json_arg(f)?, set.dim)?,
                None => AffineFormPW::zero(set.dim),
            };
            let chi = gamma::chi(&set)?;
            let needed = gamma::polytope_terms_needed(&gamma::polytope_candidates(&set, &form)?);
            let terms = terms.unwrap_or(needed).max(needed);
            report.chi = Some(chi);
            report.terms = Some(terms);
            match gamma::zeta_polytope(&set, &form, terms) {
                Ok(z) => {
                    let lim = if z.is_zero() { LaurentPoly::zero() } else { z.limit()? };
                    report.status = Some(verdict(lim == LaurentPoly::constant(-(chi as i128))));
                    report.limit = Some(lim);
                    report.zeta = Some(z);
                }
                Err(Error::LimitMismatch { .. }) => report.status = Some(Status::Disagree),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Report::Polytope(report))
}

fn cmd_acampo(path: &Path, terms: Option<usize>) -> Result<Report> {
    let res = load_resolution(path)?;
    let len = terms.unwrap_or(2 * res.max_n() as usize + 2);
    if len == 0 {
        return Err(Error::Invalid("number of terms must be positive".into()));
    }
    let seq = LefschetzSequence::from_resolution(&res, len)?;
    let period = match resolution::quasi_unipotent_period(&seq) {
        Ok(p) => Some(p),
        Err(Error::NoPeriod { .. }) => None,
        Err(e) => return Err(e),
    };
    let euler_zeta = resolution::denef_loeser_euler(&res)?;
    let euler_chi = if euler_zeta.is_zero() { 0 } else { -euler_zeta.limit()?.eval_at_one() };
    let zeta_limit_chi = match period {
        Some((m0, _)) => {
            let long = LefschetzSequence::from_resolution(&res, resolution::euler_terms_needed(&[m0 as u32]))?;
            Some(resolution::euler_zeta_limit(&long, &[m0 as u32])?.1)
        }
        None => None,
    };
    let (zeta, s) = match resolution::denef_loeser_zeta(&res) {
        Ok(z) => {
            let s = if z.is_zero() { LaurentPoly::zero() } else { -z.limit()? };
            (Some(z), Some(s))
        }
        Err(Error::MissingClass(_)) => (None, None),
        Err(e) => return Err(e),
    };
    let mut chis = vec![euler_chi];
    chis.extend(period.map(|p| p.1));
    chis.extend(zeta_limit_chi);
    chis.extend(s.as_ref().map(LaurentPoly::eval_at_one));
    let status = verdict(chis.iter().all(|&c| c == euler_chi));
    Ok(Report::Acampo(AcampoReport {
        lefschetz: seq.values.into_iter().collect(),
        period,
        euler_zeta,
        euler_chi,
        zeta_limit_chi,
        zeta,
        s,
        status,
    }))
}

fn cmd_count(jet: &JetArgs, range: MRange) -> Result<Report> {
    let input = JetInput::new(jet)?;
    let rows: Vec<Result<CountRow>> = range
        .orders()
        .into_par_iter()
        .map(|m| {
            let sys = jets::build_jet_system(&input.f, &input.x, m)?;
            let constrained = sys.constrained_vars().len();
            let n = input.opts.primes.unwrap_or(constrained + 1 + jets::MIN_VERIFY);
            let limit = input.opts.max_prime.unwrap_or(u64::MAX);
            let primes = jets::admissible_primes_upto(&input.f, &sys, jets::default_modulus(&input.f), n, limit)?;
            let counts = jets::count_table(&sys, &primes, input.opts.node_budget)
                .map_err(|e| Error::AtOrder { m, source: Box::new(e) })?;
            Ok(CountRow { m, counts })
        })
        .collect();
    Ok(Report::Count(CountReport {
        poly: input.text.clone(),
        at: input.at(),
        rows: rows.into_iter().collect::<Result<_>>()?,
    }))
}

fn dispatch(command: &Command) -> Result<Report> {
    match command {
        Command::Lefschetz { jet, m_range, resolution } => cmd_lefschetz(jet, *m_range, resolution.as_deref()),
        Command::Zeta { jet, terms, max_terms, resolution } => cmd_zeta(jet, *terms, *max_terms, resolution.as_deref()),
        Command::Polytope { action, set, form, m, terms } => cmd_polytope(*action, set, form.as_deref(), *m, *terms),
        Command::Acampo { resolution, terms } => cmd_acampo(resolution, *terms),
        Command::Count { jet, m_range } => cmd_count(jet, *m_range),
    }
}

/// Runs the configured command on a pool of `cfg.threads` workers.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    match cfg.threads {
        Some(0) => Err(Error::Invalid("thread count must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Invalid(format!("cannot start thread pool: {e}")))?;
            pool.install(|| dispatch(&cfg.command))
        }
        None => dispatch(&cfg.command),
    }
}

/// Parses `args`, runs and renders; returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cfg) {
        Ok(report) => {
            let text = if cfg.json { report.to_json() } else { report.to_text() };
            let _ = out.write_all(text.as_bytes());
            report.exit_code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
