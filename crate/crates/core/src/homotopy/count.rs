use std::cmp::Ordering;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::start::StartSystem;
use super::system::SquareSystem;
use super::tracker::{track_path, PathOutcome, PathStatus, TrackerConfig};
use crate::error::{Error, Result};
use crate::rng::{Sampler, STREAM_TRACKER};

/// Which converged endpoints count as genuine solutions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Filters {
    /// Coordinates that must have modulus above `torus_tol`.
    pub torus_coords: Vec<usize>,
    /// Reject endpoints whose norm is below `torus_tol` (the origin).
    pub nonzero: bool,
    /// Reject endpoints whose `singular_measure` is below `det_tol`.
    pub avoid_singular_locus: bool,
}

impl Filters {
    pub fn torus(n: usize) -> Self {
        Self {
            torus_coords: (0..n).collect(),
            ..Self::default()
        }
    }

    pub fn likelihood() -> Self {
        Self {
            torus_coords: Vec::new(),
            nonzero: true,
            avoid_singular_locus: true,
        }
    }

    fn accepts<S: SquareSystem + ?Sized>(&self, sys: &S, z: &[C64], cfg: &TrackerConfig) -> bool {
        if self.torus_coords.iter().any(|&i| z[i].norm() <= cfg.torus_tol) {
            return false;
        }
        if self.nonzero && z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() <= cfg.torus_tol {
            return false;
        }
        if self.avoid_singular_locus {
            if let Some(measure) = sys.singular_measure(z) {
                if !(measure > cfg.det_tol) {
                    return false;
                }
            }
        }
        true
    }
}

/// Result of counting solutions over several tracker seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub family: String,
    pub m: usize,
    pub d: usize,
    pub method: String,
    pub count: usize,
    pub per_seed_counts: Vec<usize>,
    pub paths_tracked: u64,
    pub failures: u64,
    pub diverged: u64,
    pub filtered_spurious: u64,
    pub runtime_ms: u64,
    pub seeds: Vec<u64>,
    pub config: TrackerConfig,
    pub consensus: bool,
    /// Deduplicated solutions found with the first seed, in path order.
    #[serde(skip)]
    pub solutions: Vec<Vec<C64>>,
}

impl CountReport {
    pub fn labelled(mut self, family: &str, m: usize, d: usize) -> Self {
        self.family = family.to_string();
        self.m = m;
        self.d = d;
        self
    }
}

struct SeedRun {
    solutions: Vec<Vec<C64>>,
    failures: u64,
    diverged: u64,
    spurious: u64,
    paths: u64,
}

fn run_seed<S: SquareSystem + ?Sized>(sys: &S, filters: &Filters, cfg: &TrackerConfig, seed: u64) -> SeedRun {
    let mut sampler = Sampler::new(seed, STREAM_TRACKER);
    let gamma = sampler.unit_complex();
    let start = StartSystem::random(&sys.degrees(), &mut sampler);
    let total = start.num_paths();

    let outcomes: Vec<PathOutcome> = (0..total as u64)
        .into_par_iter()
        .map(|i| track_path(sys, &start, gamma, i as u128, cfg))
        .collect();

    let mut run = SeedRun {
        solutions: Vec::new(),
        failures: 0,
        diverged: 0,
        spurious: 0,
        paths: total as u64,
    };
    let mut kept = Vec::new();
    for o in outcomes {
        match o.status {
            PathStatus::Failed => run.failures += 1,
            PathStatus::Infinity => run.diverged += 1,
            PathStatus::Converged => {
                if filters.accepts(sys, &o.endpoint, cfg) {
                    kept.push(o.endpoint);
                } else {
                    run.spurious += 1;
                }
            }
        }
    }
    run.solutions = dedup(&kept, cfg.dedup_tol);
    run
}

/// Tracks every total-degree path for each seed in `cfg.seeds` and counts
/// the distinct converged endpoints that pass `filters`.
///
/// Paths run in parallel; outcomes are merged in path order so the report
/// does not depend on scheduling. Seeds that disagree on the count yield
/// [`Error::GenericityFailure`] carrying the full report.
pub fn count_torus_solutions<S: SquareSystem + ?Sized>(
    sys: &S,
    filters: &Filters,
    cfg: &TrackerConfig,
) -> Result<CountReport> {
    cfg.validate()?;
    let started = Instant::now();
    let runs: Vec<SeedRun> = cfg.seeds.iter().map(|&s| run_seed(sys, filters, cfg, s)).collect();
    let per_seed_counts: Vec<usize> = runs.iter().map(|r| r.solutions.len()).collect();
    let consensus = per_seed_counts.windows(2).all(|w| w[0] == w[1]);
    let report = CountReport {
        family: "system".into(),
        m: sys.dim(),
        d: 0,
        method: "homotopy".into(),
        count: per_seed_counts[0],
        per_seed_counts,
        paths_tracked: runs.iter().map(|r| r.paths).sum(),
        failures: runs.iter().map(|r| r.failures).sum(),
        diverged: runs.iter().map(|r| r.diverged).sum(),
        filtered_spurious: runs.iter().map(|r| r.spurious).sum(),
        runtime_ms: started.elapsed().as_millis() as u64,
        seeds: cfg.seeds.clone(),
        config: cfg.clone(),
        consensus,
        solutions: runs.into_iter().next().map(|r| r.solutions).unwrap_or_default(),
    };
    if consensus {
        Ok(report)
    } else {
        Err(Error::GenericityFailure(Box::new(report)))
    }
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn lex_cmp(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Collapses points closer than `tol * (1 + |a|)` to a single
/// representative, the lexicographically smallest member of its cluster.
/// Representatives keep their input order.
pub fn dedup(points: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| lex_cmp(&points[i], &points[j]).then(i.cmp(&j)));
    let mut reps: Vec<usize> = Vec::new();
    for &i in &order {
        let p = &points[i];
        let dup = reps
            .iter()
            .any(|&r| dist(&points[r], p) < tol * (1.0 + norm(&points[r])));
        if !dup {
            reps.push(i);
        }
    }
    reps.sort_unstable();
    reps.into_iter().map(|i| points[i].clone()).collect()
}
