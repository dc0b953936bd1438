//! The logic behind the `centraldeg` binary: every command is a pure
//! function of its arguments and seed, returning a serializable outcome.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::centralpath::{
    dual_slack, slack, to_csv, trace_lp, trace_qp, trace_sdp, PathSample, PathTrace, Primal, ScheduleConfig,
};
use crate::error::{Error, Result};
use crate::formulas::{
    genus_from_hvector, genus_lp, genus_lp_closed, genus_lp_sum, genus_sdp_special, genus_table_entry,
    polynomiality_check, psi_lp, psi_qp, psi_sdp_reference, sdp_symmetry_partner, sym_dim, DegreeReport, Family,
    GenusSource, HVector, Method,
};
use crate::homotopy::{count_torus_solutions, CountReport, Filters, SquareSystem, TrackerConfig};
use crate::instances::{
    build_ml_system, ml_degree, ml_path_counts, random_lp, random_qp, random_sdp, random_slice, reduce_lp,
    reduce_qp, ClearedKkt,
};
use crate::polytope::{
    lp_support_polytope, normalized_volume, product_simplex_volume, qp_weighted_volume, staircase_counts, MAX_DIM,
};
use crate::sos::{sos_degree, sos_dims, sos_reference, PATH_BUDGET};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

/// Settings shared by all commands.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub tracker: TrackerConfig,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    /// Keep `runtime_ms` in homotopy reports; without it output is
    /// byte-identical across runs.
    pub timings: bool,
}

/// What `degree` is asked about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Target {
    Lp { m: usize, d: usize },
    Qp { m: usize, d: usize },
    Sdp { m: usize, d: usize },
    Sos { n: usize, two_d: usize },
}

impl Target {
    pub fn family(&self) -> Family {
        match self {
            Target::Lp { .. } => Family::Lp,
            Target::Qp { .. } => Family::Qp,
            Target::Sdp { .. } => Family::Sdp,
            Target::Sos { .. } => Family::Sos,
        }
    }

    /// `(m, d)` of the underlying program.
    pub fn dims(&self) -> Result<(usize, usize)> {
        match *self {
            Target::Lp { m, d } | Target::Qp { m, d } | Target::Sdp { m, d } => Ok((m, d)),
            Target::Sos { n, two_d } => {
                if two_d % 2 != 0 {
                    return Err(Error::InvalidDimensions(format!("form degree must be even, got {two_d}")));
                }
                sos_dims(n, two_d / 2)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Formula,
    Polytope,
    Homotopy,
    #[default]
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeOutcome {
    pub target: Target,
    pub m: usize,
    pub d: usize,
    pub reports: Vec<DegreeReport>,
    pub homotopy: Option<CountReport>,
    /// Every method returned the same value.
    pub agree: bool,
}

/// Closed-form (or shipped) degree. SDP values follow from `d = 1`,
/// `d = N - 1` and the symmetry `d <-> N - d - 1`; the sum-of-squares and
/// remaining SDP entries are reference data.
pub fn formula_degree(target: &Target) -> Result<DegreeReport> {
    let (m, d) = target.dims()?;
    let (value, method) = match *target {
        Target::Lp { m, d } => (psi_lp(m, d)?, Method::Formula),
        Target::Qp { m, d } => (psi_qp(m, d)?, Method::Formula),
        Target::Sdp { m, d } => {
            let n = sym_dim(m);
            let value = psi_sdp_reference(m, d)
                .ok_or_else(|| Error::NotDerivable(format!("no closed form or table entry for SDP m={m}, d={d}")))?;
            let partner = sdp_symmetry_partner(m, d).ok();
            let derived = d == 1 || d + 1 == n || partner == Some(1);
            (value, if derived { Method::Formula } else { Method::Reference })
        }
        Target::Sos { n, two_d } => {
            let value = sos_reference(n, two_d).ok_or_else(|| {
                Error::NotDerivable(format!("no shipped value for forms of degree {two_d} in {n} variables"))
            })?;
            (value, Method::Reference)
        }
    };
    Ok(DegreeReport {
        family: target.family(),
        m,
        d,
        value,
        method,
    })
}

/// Normalized volume of the Newton polytope of the reduced KKT system (LP,
/// by exact triangulation when the dimension allows), or the staircase
/// count (QP, and LP beyond [`MAX_DIM`]).
pub fn polytope_degree(target: &Target) -> Result<DegreeReport> {
    let (m, d) = target.dims()?;
    let value = match *target {
        Target::Lp { m, d } => {
            if m <= MAX_DIM {
                normalized_volume(&lp_support_polytope(m, d)?)?
            } else {
                let total = staircase_counts(m, d)?.total();
                debug_assert_eq!(total, product_simplex_volume(m - d - 1, d));
                total
            }
        }
        Target::Qp { m, d } => qp_weighted_volume(m, d)?,
        Target::Sdp { .. } | Target::Sos { .. } => {
            return Err(Error::NotDerivable(format!(
                "no polytope route for the {} family",
                target.family()
            )))
        }
    };
    Ok(DegreeReport {
        family: target.family(),
        m,
        d,
        value,
        method: Method::Polytope,
    })
}

fn check_budget<S: SquareSystem + ?Sized>(sys: &S, reference: Option<u64>) -> Result<()> {
    let paths = sys
        .degrees()
        .iter()
        .try_fold(1u128, |acc, &k| acc.checked_mul(k as u128))
        .unwrap_or(u128::MAX);
    if paths > PATH_BUDGET {
        return Err(Error::BudgetExceeded {
            paths,
            budget: PATH_BUDGET,
            reference,
        });
    }
    Ok(())
}

/// Counts solutions of the system for a random instance drawn from `seed`:
/// the sliced and reduced KKT equations for LP/QP, the likelihood equations
/// for SDP and Gram programs.
pub fn homotopy_degree(target: &Target, seed: u64, tracker: &TrackerConfig) -> Result<CountReport> {
    let (m, d) = target.dims()?;
    let label = target.family().to_string();
    let report = match *target {
        Target::Lp { m, d } => {
            let sys = reduce_lp(&random_lp(m, d, seed)?, &random_slice(m, seed))?;
            check_budget(&sys, psi_lp(m, d).ok())?;
            count_torus_solutions(&sys, &kkt_filters(sys.dim()), tracker)?
        }
        Target::Qp { m, d } => {
            let sys = reduce_qp(&random_qp(m, d, seed)?, &random_slice(m, seed))?;
            check_budget(&sys, psi_qp(m, d).ok())?;
            count_torus_solutions(&sys, &kkt_filters(sys.dim()), tracker)?
        }
        Target::Sdp { m, d } => {
            let ml = build_ml_system(&random_sdp(m, d, seed)?, seed)?;
            let (conc, cov) = ml_path_counts(&ml);
            let paths = conc.min(cov);
            if paths > PATH_BUDGET {
                return Err(Error::BudgetExceeded {
                    paths,
                    budget: PATH_BUDGET,
                    reference: psi_sdp_reference(m, d),
                });
            }
            ml_degree(&ml, tracker)?
        }
        Target::Sos { n, two_d } => return sos_degree(n, two_d / 2, seed, tracker),
    };
    Ok(report.labelled(&label, m, d))
}

fn kkt_filters(n: usize) -> Filters {
    Filters {
        avoid_singular_locus: true,
        ..Filters::torus(n)
    }
}

pub fn cmd_degree(target: &Target, method: MethodChoice, cfg: &RunConfig) -> Result<DegreeOutcome> {
    let (m, d) = target.dims()?;
    let mut reports = Vec::new();
    let mut homotopy = None;
    let wants = |mc: MethodChoice| method == mc || method == MethodChoice::All;
    let optional = method == MethodChoice::All;

    if wants(MethodChoice::Formula) {
        match formula_degree(target) {
            Ok(r) => reports.push(r),
            Err(Error::NotDerivable(_)) if optional => {}
            Err(e) => return Err(e),
        }
    }
    if wants(MethodChoice::Polytope) {
        match polytope_degree(target) {
            Ok(r) => reports.push(r),
            Err(Error::NotDerivable(_)) if optional => {}
            Err(e) => return Err(e),
        }
    }
    if wants(MethodChoice::Homotopy) {
        let report = homotopy_degree(target, cfg.seed, &cfg.tracker)?;
        reports.push(DegreeReport {
            family: target.family(),
            m,
            d,
            value: report.count as u64,
            method: Method::Homotopy,
        });
        homotopy = Some(report);
    }
    let agree = reports.windows(2).all(|w| w[0].value == w[1].value);
    if !agree {
        let values: Vec<String> = reports.iter().map(|r| format!("{} {}", r.method, r.value)).collect();
        return Err(Error::Mismatch(format!(
            "{} m={m} d={d}: {}",
            target.family(),
            values.join(", ")
        )));
    }
    Ok(DegreeOutcome {
        target: *target,
        m,
        d,
        reports,
        homotopy,
        agree,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GenusQuery {
    SdpSpecial { m: usize, d: usize },
    Lp { m: usize, d: usize },
    Hvector { h: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusOutcome {
    pub query: GenusQuery,
    pub value: i64,
    /// For `sdp-special`: whether the value also appears in the shipped table.
    pub source: Option<GenusSource>,
}

pub fn cmd_genus(query: &GenusQuery) -> Result<GenusOutcome> {
    let (value, source) = match query {
        GenusQuery::SdpSpecial { m, d } => {
            let g = genus_sdp_special(*m, *d).ok_or_else(|| {
                Error::NotDerivable(format!(
                    "genus of the SDP central curve at m={m}, d={d}; covered are d = 1, N-3, N-2, N-1 with N = m(m+1)/2"
                ))
            })?;
            (g, Some(genus_table_entry(*m, *d).map_or(GenusSource::Proposition, |e| e.1)))
        }
        GenusQuery::Lp { m, d } => (genus_lp(*m, *d)?, None),
        GenusQuery::Hvector { h } => (genus_from_hvector(&HVector::new(h.clone())?), None),
    };
    Ok(GenusOutcome {
        query: query.clone(),
        value,
        source,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathFamily {
    Lp,
    Qp,
    Sdp,
}

/// Summary of a traced central path; the samples themselves go to CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathOutcome {
    pub family: PathFamily,
    pub m: usize,
    pub d: usize,
    pub seed: u64,
    pub schedule: ScheduleConfig,
    pub samples: usize,
    pub complete: bool,
    pub failure_lambda: Option<f64>,
    pub max_kkt_residual: f64,
    /// Largest `|gap / lambda - m| / m` over the samples.
    pub max_gap_defect: f64,
    /// Every sample strictly feasible (`x > 0`, or `X` admits a Cholesky factor).
    pub strictly_feasible: bool,
    pub csv: Option<String>,
    #[serde(skip)]
    pub trace: Vec<PathSample>,
}

/// Relative tolerance on `gap / lambda = m`.
pub const GAP_TOL: f64 = 1e-6;

impl PathOutcome {
    pub fn passed(&self) -> bool {
        self.complete && self.strictly_feasible && self.max_gap_defect < GAP_TOL
    }
}

fn vec_gap<P: ClearedKkt + ?Sized>(prog: &P, s: &PathSample) -> (f64, bool) {
    let x = s.primal.coords();
    let gap: f64 = x.iter().zip(slack(prog, x, &s.dual)).map(|(a, b)| a * b).sum();
    (gap, x.iter().all(|v| *v > 0.0))
}

pub fn cmd_path(family: PathFamily, m: usize, d: usize, sched: &ScheduleConfig, cfg: &RunConfig) -> Result<PathOutcome> {
    let seed = cfg.seed;
    let (trace, checks): (PathTrace, Vec<(f64, bool)>) = match family {
        PathFamily::Lp => {
            let lp = random_lp(m, d, seed)?;
            let t = trace_lp(&lp, sched)?;
            let c = t.samples.iter().map(|s| vec_gap(&lp, s)).collect();
            (t, c)
        }
        PathFamily::Qp => {
            let qp = random_qp(m, d, seed)?;
            let t = trace_qp(&qp, sched)?;
            let c = t.samples.iter().map(|s| vec_gap(&qp, s)).collect();
            (t, c)
        }
        PathFamily::Sdp => {
            let sdp = random_sdp(m, d, seed)?;
            let t = trace_sdp(&sdp, sched)?;
            let c = t
                .samples
                .iter()
                .map(|s| match &s.primal {
                    Primal::Matrix(x) => (x.inner(&dual_slack(&sdp, &s.dual)), x.to_dense().cholesky().is_some()),
                    Primal::Vector(_) => (f64::NAN, false),
                })
                .collect();
            (t, c)
        }
    };
    let mf = m as f64;
    let max_gap_defect = trace
        .samples
        .iter()
        .zip(&checks)
        .map(|(s, (gap, _))| (gap / s.lambda - mf).abs() / mf)
        .fold(0.0, f64::max);
    let csv = if let Some(path) = &cfg.out {
        if !trace.samples.is_empty() {
            std::fs::write(path, to_csv(&trace.samples)?)?;
        }
        Some(path.display().to_string())
    } else {
        None
    };
    Ok(PathOutcome {
        family,
        m,
        d,
        seed,
        schedule: sched.clone(),
        samples: trace.samples.len(),
        complete: trace.is_complete(),
        failure_lambda: trace.failure,
        max_kkt_residual: trace.samples.iter().map(|s| s.kkt_residual).fold(0.0, f64::max),
        max_gap_defect,
        strictly_feasible: checks.iter().all(|c| c.1),
        csv,
        trace: trace.samples,
    })
}

/// One checked case of a claim: the expected and observed integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub label: String,
    pub expected: i64,
    pub observed: Option<i64>,
    pub pass: bool,
}

impl Case {
    fn new(label: impl Into<String>, expected: i64, observed: Result<i64>) -> Self {
        let observed = observed.ok();
        Self {
            label: label.into(),
            expected,
            pass: observed == Some(expected),
            observed,
        }
    }

    fn check(label: impl Into<String>, ok: bool) -> Self {
        Self {
            label: label.into(),
            expected: 1,
            observed: Some(ok as i64),
            pass: ok,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub id: usize,
    pub claim: String,
    pub pass: bool,
    pub cases: Vec<Case>,
}

impl Claim {
    fn new(id: usize, claim: &str, cases: Vec<Case>) -> Self {
        Self {
            id,
            claim: claim.into(),
            pass: cases.iter().all(|c| c.pass),
            cases,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reproduction {
    pub seed: u64,
    pub tracker_seeds: Vec<u64>,
    pub claims: Vec<Claim>,
    pub all_pass: bool,
}

/// Homotopy count, refused unless every tracker seed agreed.
fn count(target: Target, seed: u64, tracker: &TrackerConfig) -> Result<i64> {
    let r = homotopy_degree(&target, seed, tracker)?;
    if !r.consensus {
        return Err(Error::Mismatch(format!("per-seed counts {:?}", r.per_seed_counts)));
    }
    Ok(r.count as i64)
}

pub fn claim_lp_degrees(seed: u64, tracker: &TrackerConfig) -> Claim {
    let mut cases = Vec::new();
    for m in 2..=7 {
        for d in 1..m {
            let want = psi_lp(m, d).expect("valid dims") as i64;
            cases.push(Case::new(format!("lp m={m} d={d}"), want, count(Target::Lp { m, d }, seed, tracker)));
        }
    }
    Claim::new(1, "LP central curve degree is C(m-1, d) for 1 <= d < m <= 7", cases)
}

pub fn claim_qp_degrees(seed: u64, tracker: &TrackerConfig) -> Claim {
    let mut cases = Vec::new();
    for m in 2..=6 {
        for d in 1..m {
            let want = psi_qp(m, d).expect("valid dims") as i64;
            cases.push(Case::new(format!("qp m={m} d={d}"), want, count(Target::Qp { m, d }, seed, tracker)));
        }
    }
    Claim::new(2, "QP central curve degree is sum_k C(m-k-2, d-1) 2^k for 1 <= d < m <= 6", cases)
}

pub fn claim_sdp_m3(seed: u64, tracker: &TrackerConfig) -> Claim {
    let counts: Vec<Option<i64>> = (1..=4).map(|d| count(Target::Sdp { m: 3, d }, seed, tracker).ok()).collect();
    let case = |label: &str, expected: i64, observed: Option<i64>| Case {
        label: label.into(),
        expected,
        observed,
        pass: observed == Some(expected),
    };
    let cases = vec![
        case("sdp m=3 d=1", 2, counts[0]),
        case("sdp m=3 d=4", 2, counts[3]),
        // x itself is not pinned, only the symmetry
        case("sdp m=3 d=2 equals its partner d=3", counts[2].unwrap_or(-1), counts[1]),
    ];
    Claim::new(3, "SDP degrees at m = 3 form the palindrome (2, x, x, 2)", cases)
}

pub fn claim_polynomiality(seed: u64, tracker: &TrackerConfig) -> Claim {
    let mut points = Vec::new();
    let mut cases = Vec::new();
    for m in 3..=5 {
        let c = count(Target::Sdp { m, d: 1 }, seed, tracker);
        if let Ok(v) = &c {
            points.push((m as i64, *v));
        }
        cases.push(Case::new(format!("sdp m={m} d=1"), m as i64 - 1, c));
    }
    let fit = polynomiality_check(1, &points);
    let linear = fit.as_ref().is_ok_and(|f| {
        f.fits && f.integer_valued && f.coefficient_strings() == vec!["-1".to_string(), "1".to_string()]
    });
    cases.push(Case::check("counts fit m - 1 exactly", linear && points.len() == 3));
    Claim::new(4, "SDP degree at d = 1 is the degree-1 polynomial m - 1", cases)
}

pub fn claim_sos(seed: u64, tracker: &TrackerConfig) -> Claim {
    let mut cases = vec![Case::new("binary sextics", 7, count(Target::Sos { n: 2, two_d: 6 }, seed, tracker))];
    for (n, dd, want) in [(2, 4, 45u64), (3, 2, 66)] {
        let refused = matches!(
            sos_degree(n, dd, seed, tracker),
            Err(Error::BudgetExceeded { reference: Some(r), .. }) if r == want
        );
        cases.push(Case::check(format!("n={n} 2D={} refused with reference {want}", 2 * dd), refused));
    }
    Claim::new(5, "Gram programs of binary sextics have central curves of degree 7", cases)
}

pub fn claim_polytope() -> Claim {
    let mut cases = Vec::new();
    for m in 2..=6 {
        for d in 1..m {
            let vol = lp_support_polytope(m, d).and_then(|p| normalized_volume(&p)).map(|v| v as i64);
            cases.push(Case::new(format!("volume m={m} d={d}"), psi_lp(m, d).expect("valid") as i64, vol));
        }
    }
    for m in 2..=12 {
        for d in 1..m {
            let ok = staircase_counts(m, d).is_ok_and(|s| s.total() == psi_lp(m, d).expect("valid"));
            cases.push(Case::check(format!("staircase m={m} d={d}"), ok));
        }
    }
    Claim::new(6, "Newton polytope volume and staircase count equal C(m-1, d)", cases)
}

pub fn claim_genus() -> Claim {
    let mut cases = Vec::new();
    for (m, d, g) in [(3, 3, 1), (3, 4, 0), (4, 7, 10), (4, 8, 1), (5, 12, 33), (5, 13, 3)] {
        cases.push(Case::new(
            format!("sdp m={m} d={d}"),
            g,
            genus_sdp_special(m, d).ok_or(Error::Empty("genus")),
        ));
    }
    for m in 2..=8 {
        let n = sym_dim(m);
        cases.push(Case::new(format!("sdp m={m} d=1"), 0, genus_sdp_special(m, 1).ok_or(Error::Empty("genus"))));
        cases.push(Case::new(
            format!("sdp m={m} d=N-1"),
            0,
            genus_sdp_special(m, n - 1).ok_or(Error::Empty("genus")),
        ));
    }
    let symmetric = (2..=10).all(|m| (1..m).all(|d| genus_lp(m, d).ok().is_some() && genus_lp(m, d).ok() == genus_lp(m, m - d).ok()));
    cases.push(Case::check("lp genus symmetric in d <-> m - d for m <= 10", symmetric));
    let forms_agree = (2..=12).all(|m| {
        (1..m).all(|d| match (genus_lp_sum(m, d), genus_lp_closed(m, d)) {
            (Ok(s), Ok(c)) => num_rational::BigRational::from_integer(s) == c,
            _ => false,
        })
    });
    cases.push(Case::check("lp genus sum form equals closed form for m <= 12", forms_agree));
    Claim::new(7, "Genus of SDP and LP central curves", cases)
}

/// Schedule used for the central-path claim: 20 samples from `lambda = 1`.
pub fn claim_schedule() -> ScheduleConfig {
    ScheduleConfig {
        steps: 20,
        ..ScheduleConfig::default()
    }
}

pub fn claim_central_path(seed: u64) -> Claim {
    let sched = claim_schedule();
    let cfg = RunConfig {
        seed,
        ..RunConfig::default()
    };
    let mut cases = Vec::new();
    for (family, m, d) in [(PathFamily::Lp, 6, 2), (PathFamily::Qp, 5, 2), (PathFamily::Sdp, 4, 3)] {
        let name = format!("{family:?} m={m} d={d}").to_lowercase();
        match cmd_path(family, m, d, &sched, &cfg) {
            Ok(o) => {
                cases.push(Case::check(format!("{name}: 20 samples, strictly feasible"), o.complete && o.samples == 20 && o.strictly_feasible));
                cases.push(Case::check(format!("{name}: complementarity below 1e-8"), complementarity(&o) < 1e-8));
                cases.push(Case::check(format!("{name}: gap / lambda = m"), o.max_gap_defect < GAP_TOL));
            }
            Err(_) => cases.push(Case::check(format!("{name}: trace"), false)),
        }
    }
    Claim::new(8, "Central path samples satisfy the KKT invariants", cases)
}

/// Largest scaled KKT residual of the trace; for LP/QP it bounds
/// `max_i |x_i s_i / lambda - 1|`, for SDP `|X^{1/2} S X^{1/2} / lambda - Id|`.
fn complementarity(o: &PathOutcome) -> f64 {
    o.trace.iter().map(|s| s.kkt_residual).fold(0.0, f64::max)
}

/// Runs every desk-scale claim with instance seed `seed`.
pub fn reproduce_paper(seed: u64, tracker: &TrackerConfig) -> Reproduction {
    let claims = vec![
        claim_lp_degrees(seed, tracker),
        claim_qp_degrees(seed, tracker),
        claim_sdp_m3(seed, tracker),
        claim_polynomiality(seed, tracker),
        claim_sos(seed, tracker),
        claim_polytope(),
        claim_genus(),
        claim_central_path(seed),
    ];
    Reproduction::from_claims(seed, tracker, claims)
}

impl Reproduction {
    pub fn from_claims(seed: u64, tracker: &TrackerConfig, claims: Vec<Claim>) -> Self {
        Self {
            seed,
            tracker_seeds: tracker.seeds.clone(),
            all_pass: claims.iter().all(|c| c.pass),
            claims,
        }
    }
}

/// JSON value of `v`, dropping every `runtime_ms` key unless `timings`.
pub fn to_json<T: Serialize>(v: &T, timings: bool) -> Result<String> {
    fn strip(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(map) => {
                map.remove("runtime_ms");
                map.values_mut().for_each(strip);
            }
            serde_json::Value::Array(a) => a.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut value = serde_json::to_value(v)?;
    if !timings {
        strip(&mut value);
    }
    Ok(serde_json::to_string_pretty(&value)?)
}

impl DegreeOutcome {
    pub fn to_text(&self) -> String {
        let values: Vec<String> = self.reports.iter().map(|r| format!("{} {}", r.method, r.value)).collect();
        let mut s = format!("{} m={} d={}: {}\n", self.target.family(), self.m, self.d, values.join(", "));
        if let Some(h) = &self.homotopy {
            let _ = writeln!(
                s,
                "  homotopy: {} paths, {} failed, {} spurious, per seed {:?}",
                h.paths_tracked, h.failures, h.filtered_spurious, h.per_seed_counts
            );
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("family,m,d,method,value\n");
        for r in &self.reports {
            let _ = writeln!(s, "{},{},{},{},{}", r.family, r.m, r.d, r.method, r.value);
        }
        s
    }
}

impl GenusOutcome {
    pub fn to_text(&self) -> String {
        match &self.query {
            GenusQuery::SdpSpecial { m, d } => format!("sdp genus m={m} d={d}: {}\n", self.value),
            GenusQuery::Lp { m, d } => format!("lp genus m={m} d={d}: {}\n", self.value),
            GenusQuery::Hvector { h } => format!("genus of h-vector {h:?}: {}\n", self.value),
        }
    }

    pub fn to_csv(&self) -> String {
        let (kind, m, d) = match &self.query {
            GenusQuery::SdpSpecial { m, d } => ("sdp-special", m.to_string(), d.to_string()),
            GenusQuery::Lp { m, d } => ("lp", m.to_string(), d.to_string()),
            GenusQuery::Hvector { .. } => ("hvector", String::new(), String::new()),
        };
        format!("kind,m,d,value\n{kind},{m},{d},{}\n", self.value)
    }
}

impl PathOutcome {
    pub fn to_text(&self) -> String {
        format!(
            "{:?} m={} d={} seed={}: {} samples{}, max residual {:.3e}, max gap defect {:.3e}, strictly feasible {}\n",
            self.family,
            self.m,
            self.d,
            self.seed,
            self.samples,
            match self.failure_lambda {
                Some(l) => format!(" (newton failed at lambda {l:e})"),
                None => String::new(),
            },
            self.max_kkt_residual,
            self.max_gap_defect,
            self.strictly_feasible
        )
        .to_lowercase()
    }
}

impl Reproduction {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.claims {
            let passed = c.cases.iter().filter(|k| k.pass).count();
            let _ = writeln!(
                s,
                "{} {:>2}  {}  ({passed}/{} cases)",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.claim,
                c.cases.len()
            );
            for k in c.cases.iter().filter(|k| !k.pass) {
                let _ = writeln!(s, "        {}: expected {}, observed {:?}", k.label, k.expected, k.observed);
            }
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("id,claim,pass,cases_passed,cases\n");
        for c in &self.claims {
            let passed = c.cases.iter().filter(|k| k.pass).count();
            let _ = writeln!(s, "{},\"{}\",{},{passed},{}", c.id, c.claim, c.pass, c.cases.len());
        }
        s
    }
}
