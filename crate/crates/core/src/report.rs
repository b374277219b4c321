//! Per-level analysis reports, regime classification, scans over levels and
//! rendering as JSON, CSV or a text table.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{is_prime, p_adic_order};
use crate::error::{check_level_and_prime, Error, ErrorKind, Result};
use crate::group_ring::OrderOfVanishing;
use crate::modsym::{eisenstein_rank_with, Direct, EisensteinOptions, HeckeSource};
use crate::padic::{PiValuation, DEFAULT_PRECISION};
use crate::zeta::ord_vs_theta_check_at;

/// Fixed CSV header.
pub const CSV_HEADER: &str =
    "N,p,s,ord,val_chi_theta_s,r,regime,merel_ok,lecouturier_ok,prop51_ok,rank_T,new_eisenstein";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Merel,
    Lecouturier,
    EqualThree,
    Spoiler,
    Higher,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Merel => "merel",
            Regime::Lecouturier => "lecouturier",
            Regime::EqualThree => "equal-three",
            Regime::Spoiler => "spoiler",
            Regime::Higher => "higher",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitPrediction {
    pub t: u32,
    pub field_degree: u64,
    pub orbit_size: u64,
}

/// Galois orbits of new Eisenstein-congruent eigenforms at level `N²`: one
/// per `1 <= t <= s`, each totally ramified of degree `½(p-1)p^{t-1}(r-2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitForecast {
    pub orbits: u32,
    pub per_orbit: Vec<OrbitPrediction>,
}

impl OrbitForecast {
    pub fn new(p: u64, s: u32, r: usize) -> Self {
        let per_orbit = (1..=s)
            .map(|t| {
                let degree = (p - 1) * p.pow(t - 1) * (r as u64).saturating_sub(2) / 2;
                OrbitPrediction {
                    t,
                    field_degree: degree,
                    orbit_size: degree,
                }
            })
            .collect();
        Self {
            orbits: s,
            per_orbit,
        }
    }

    pub fn total_size(&self) -> u64 {
        self.per_orbit.iter().map(|o| o.orbit_size).sum()
    }
}

fn ord_is(ord: OrderOfVanishing, v: usize) -> bool {
    ord.is(v)
}

/// Regime of `(ord, r)`, with the orbit prediction attached in the spoiler regime only.
pub fn classify_regime(
    ord: OrderOfVanishing,
    r: usize,
    p: u64,
    s: u32,
) -> (Regime, Option<OrbitForecast>) {
    let ord3 = ord_is(ord, 3);
    let r3 = r == 4;
    if r == 2 && ord_is(ord, 1) {
        (Regime::Merel, None)
    } else if r == 3 && ord_is(ord, 2) {
        (Regime::Lecouturier, None)
    } else if ord3 && r3 {
        (Regime::EqualThree, None)
    } else if ord3 != r3 {
        (Regime::Spoiler, Some(OrbitForecast::new(p, s, r)))
    } else {
        (Regime::Higher, None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Criteria {
    pub merel_ok: Option<bool>,
    pub lecouturier_ok: Option<bool>,
    /// `v(χ_s(Θ))` agrees with `ord`.
    #[serde(rename = "prop51_ok")]
    pub valuation_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[allow(non_snake_case)]
pub struct Counts {
    pub rank_T: u64,
    pub new_eisenstein: i64,
}

impl Counts {
    pub fn new(p: u64, s: u32, r: usize) -> Self {
        let ps = p.pow(s);
        Self {
            rank_T: (ps + 1) * r as u64 / 2,
            new_eisenstein: (ps as i64 - 1) * (r as i64 - 2) / 2,
        }
    }

    /// `rank_T = p^s + (r - 1) + new_eisenstein`.
    pub fn identity_holds(&self, p: u64, s: u32, r: usize) -> bool {
        self.rank_T as i64 == p.pow(s) as i64 + (r as i64 - 1) + self.new_eisenstein
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub kind: ErrorKind,
    pub message: String,
}

impl From<&Error> for Failure {
    fn from(e: &Error) -> Self {
        Self {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

/// `r`, or why it is missing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankField {
    Value(usize),
    Skipped,
    Failed(Failure),
}

impl RankField {
    pub fn value(&self) -> Option<usize> {
        match self {
            RankField::Value(r) => Some(*r),
            _ => None,
        }
    }
}

impl Serialize for RankField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wrapped<'a> {
            error: &'a Failure,
        }
        match self {
            RankField::Value(r) => s.serialize_u64(*r as u64),
            RankField::Skipped => s.serialize_none(),
            RankField::Failed(f) => Wrapped { error: f }.serialize(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationEntry {
    pub t: u32,
    #[serde(serialize_with = "serialize_valuation")]
    pub valuation: PiValuation,
}

fn serialize_valuation<S: Serializer>(
    v: &PiValuation,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        PiValuation::Exact(x) => s.serialize_u64(*x),
        PiValuation::AtLeast(_) => s.serialize_str(&v.to_string()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Timings {
    pub ord_ms: u128,
    pub rank_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub p: u64,
    pub s: u32,
    pub ord: OrderOfVanishing,
    pub val_chi_theta: Vec<ValuationEntry>,
    pub r: RankField,
    pub regime: Option<Regime>,
    pub criteria: Criteria,
    pub counts: Option<Counts>,
    #[serde(rename = "theoremC")]
    pub orbit_forecast: Option<OrbitForecast>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl AnalysisReport {
    /// `v(χ_s(Θ))` for the top character.
    pub fn top_valuation(&self) -> PiValuation {
        self.val_chi_theta.last().expect("s >= 1").valuation
    }

    /// Every criterion that could be evaluated holds.
    pub fn all_ok(&self) -> bool {
        self.criteria.valuation_ok
            && self.criteria.merel_ok != Some(false)
            && self.criteria.lecouturier_ok != Some(false)
    }
}

#[derive(Clone, Debug, Default)]
pub struct AnalyzeOptions {
    /// Starting `p`-adic precision exponent.
    pub precision: Option<u32>,
    pub ord_only: bool,
    pub timings: bool,
    pub eisenstein: EisensteinOptions,
}

pub fn analyze(n: u64, p: u64, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    analyze_with(n, p, opts, &Direct)
}

/// Full report for one level. Precondition failures and precision exhaustion
/// are errors; failures of the rank computation are recorded in `r`.
pub fn analyze_with(
    n: u64,
    p: u64,
    opts: &AnalyzeOptions,
    source: &dyn HeckeSource,
) -> Result<AnalysisReport> {
    check_level_and_prime(n, p)?;
    let s = p_adic_order(n - 1, p);
    let t0 = Instant::now();
    let check = ord_vs_theta_check_at(n, p, opts.precision.unwrap_or(DEFAULT_PRECISION))?;
    let ord_ms = t0.elapsed().as_millis();
    let t1 = Instant::now();
    let r = if opts.ord_only {
        RankField::Skipped
    } else {
        match eisenstein_rank_with(n, p, &opts.eisenstein, source) {
            Ok(res) => RankField::Value(res.r),
            Err(e)
                if matches!(
                    e.kind(),
                    ErrorKind::DimensionCap | ErrorKind::InvariantViolation
                ) =>
            {
                RankField::Failed(Failure::from(&e))
            }
            Err(e) => return Err(e),
        }
    };
    let rank_ms = t1.elapsed().as_millis();
    let ord = check.ord;
    let (regime, orbit_forecast, counts, merel_ok, lecouturier_ok) = match r.value() {
        Some(r) => {
            let (regime, pred) = classify_regime(ord, r, p, s);
            (
                Some(regime),
                pred,
                Some(Counts::new(p, s, r)),
                Some((r == 2) == ord_is(ord, 1)),
                Some((r == 3) == ord_is(ord, 2)),
            )
        }
        None => (None, None, None, None, None),
    };
    Ok(AnalysisReport {
        n,
        p,
        s,
        ord,
        val_chi_theta: check
            .val_chi_theta
            .iter()
            .map(|&(t, valuation)| ValuationEntry { t, valuation })
            .collect(),
        r,
        regime,
        criteria: Criteria {
            merel_ok,
            lecouturier_ok,
            valuation_ok: check.consistent,
        },
        counts,
        orbit_forecast,
        timings: opts.timings.then_some(Timings { ord_ms, rank_ms }),
    })
}

/// A scan row that could not be analyzed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanFailure {
    #[serde(rename = "N")]
    pub n: u64,
    pub p: u64,
    pub error: Failure,
}

pub type ScanEntry = std::result::Result<AnalysisReport, ScanFailure>;

/// Primes `N ≡ 1 (mod p)` with `n_min <= N <= n_max`.
pub fn scan_levels(p: u64, n_min: u64, n_max: u64) -> Vec<u64> {
    (n_min.max(5)..=n_max)
        .filter(|&n| n % p == 1 && is_prime(n))
        .collect()
}

/// Analyzes every qualifying level in parallel, handing entries to `emit` in
/// increasing `N` as soon as each prefix is complete.
pub fn scan_each(
    p: u64,
    n_min: u64,
    n_max: u64,
    opts: &AnalyzeOptions,
    source: &dyn HeckeSource,
    mut emit: impl FnMut(&ScanEntry),
) -> Result<()> {
    if !is_prime(p) || p < 5 {
        return Err(Error::InvalidArgument(format!(
            "p = {p} must be a prime >= 5"
        )));
    }
    let levels = scan_levels(p, n_min, n_max);
    let chunk = (rayon::current_num_threads() * 2).max(1);
    for block in levels.chunks(chunk) {
        let entries: Vec<ScanEntry> = block
            .par_iter()
            .map(|&n| {
                analyze_with(n, p, opts, source).map_err(|e| ScanFailure {
                    n,
                    p,
                    error: Failure::from(&e),
                })
            })
            .collect();
        entries.iter().for_each(&mut emit);
    }
    Ok(())
}

pub fn scan(p: u64, n_min: u64, n_max: u64, opts: &AnalyzeOptions) -> Result<Vec<ScanEntry>> {
    let mut out = Vec::new();
    scan_each(p, n_min, n_max, opts, &Direct, |e| out.push(e.clone()))?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn rank_cell(r: &RankField) -> String {
    match r {
        RankField::Value(v) => v.to_string(),
        RankField::Skipped => String::new(),
        RankField::Failed(f) => format!(
            "error:{}",
            serde_json::to_value(f.kind).unwrap().as_str().unwrap()
        ),
    }
}

fn cells(r: &AnalysisReport) -> [String; 12] {
    [
        r.n.to_string(),
        r.p.to_string(),
        r.s.to_string(),
        r.ord.to_string(),
        r.top_valuation().to_string(),
        rank_cell(&r.r),
        opt(r.regime.map(Regime::as_str)),
        opt(r.criteria.merel_ok),
        opt(r.criteria.lecouturier_ok),
        r.criteria.valuation_ok.to_string(),
        opt(r.counts.as_ref().map(|c| c.rank_T)),
        opt(r.counts.as_ref().map(|c| c.new_eisenstein)),
    ]
}

fn failure_cells(f: &ScanFailure) -> [String; 12] {
    let mut c: [String; 12] = Default::default();
    c[0] = f.n.to_string();
    c[1] = f.p.to_string();
    c[5] = format!(
        "error:{}",
        serde_json::to_value(f.error.kind)
            .unwrap()
            .as_str()
            .unwrap()
    );
    c
}

fn entry_cells(e: &ScanEntry) -> [String; 12] {
    match e {
        Ok(r) => cells(r),
        Err(f) => failure_cells(f),
    }
}

/// One JSON object per line.
pub fn render_json_line(e: &ScanEntry) -> String {
    match e {
        Ok(r) => serde_json::to_string(r),
        Err(f) => serde_json::to_string(f),
    }
    .expect("reports serialize")
}

pub fn render_csv_row(e: &ScanEntry) -> String {
    entry_cells(e).join(",")
}

pub fn render_entries(entries: &[ScanEntry], format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = String::new();
            for e in entries {
                out.push_str(&render_json_line(e));
                out.push('\n');
            }
            out
        }
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for e in entries {
                out.push_str(&render_csv_row(e));
                out.push('\n');
            }
            out
        }
        Format::Table => {
            let rows: Vec<[String; 12]> = entries.iter().map(entry_cells).collect();
            render_table(&rows)
        }
    }
}

/// Deterministic serialization of a single report.
pub fn render(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(report).expect("reports serialize");
            s.push('\n');
            s
        }
        _ => render_entries(&[Ok(report.clone())], format),
    }
}

fn render_table(rows: &[[String; 12]]) -> String {
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&width)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &mut header.iter().copied());
    let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
    line(&mut out, &mut rule.iter().map(String::as_str));
    for row in rows {
        line(&mut out, &mut row.iter().map(String::as_str));
    }
    out
}
