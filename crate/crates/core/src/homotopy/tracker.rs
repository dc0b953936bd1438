use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::start::StartSystem;
use super::system::SquareSystem;
use crate::algebra::small;

/// Step control and classification settings for the path tracker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    pub step_init: f64,
    pub step_min: f64,
    pub corrector_tol: f64,
    pub corrector_max_iters: usize,
    pub divergence_radius: f64,
    pub endpoint_newton_iters: usize,
    pub dedup_tol: f64,
    pub torus_tol: f64,
    pub det_tol: f64,
    pub seeds: Vec<u64>,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            step_init: 0.1,
            step_min: 1e-12,
            corrector_tol: 1e-10,
            corrector_max_iters: 3,
            divergence_radius: 1e10,
            endpoint_newton_iters: 20,
            dedup_tol: 1e-6,
            torus_tol: 1e-8,
            det_tol: 1e-8,
            seeds: vec![1, 2, 3],
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            self.step_init,
            self.step_min,
            self.corrector_tol,
            self.divergence_radius,
            self.dedup_tol,
            self.torus_tol,
            self.det_tol,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) || self.corrector_max_iters == 0 {
            return Err(crate::Error::Invalid("tracker tolerances must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(crate::Error::Invalid("at least one tracker seed is required".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathStatus {
    Converged,
    Infinity,
    Failed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathOutcome {
    pub start_index: u128,
    pub status: PathStatus,
    pub endpoint: Vec<C64>,
    /// Largest relative residual of the target system at the endpoint.
    pub residual: f64,
    pub steps: usize,
}

const MAX_STEPS: usize = 200_000;
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

struct Workspace {
    f: Vec<C64>,
    jf: Vec<C64>,
    g: Vec<C64>,
    gd: Vec<C64>,
    hz: Vec<C64>,
    rhs: Vec<C64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            f: vec![ZERO; n],
            jf: vec![ZERO; n * n],
            g: vec![ZERO; n],
            gd: vec![ZERO; n],
            hz: vec![ZERO; n * n],
            rhs: vec![ZERO; n],
        }
    }
}

struct Homotopy<'a, S: ?Sized> {
    target: &'a S,
    start: &'a StartSystem,
    gamma: C64,
    n: usize,
}

impl<'a, S: SquareSystem + ?Sized> Homotopy<'a, S> {
    /// Fills `hz` with dH/dz at `(z, t)` and `rhs` with `-H` (when
    /// `for_predictor` is false) or `-dH/dt` (when true).
    fn assemble(&self, z: &[C64], t: f64, ws: &mut Workspace, for_predictor: bool) {
        let n = self.n;
        self.target.eval_jacobian(z, &mut ws.f, &mut ws.jf);
        self.start.eval_diag_jacobian(z, &mut ws.g, &mut ws.gd);
        let a = self.gamma * (1.0 - t);
        for i in 0..n {
            for j in 0..n {
                ws.hz[i * n + j] = ws.jf[i * n + j] * t;
            }
            ws.hz[i * n + i] += a * ws.gd[i];
            ws.rhs[i] = if for_predictor {
                -(ws.f[i] - self.gamma * ws.g[i])
            } else {
                -(ws.f[i] * t + a * ws.g[i])
            };
        }
    }
}

fn norm_inf(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.norm()))
}

/// Tracks one path of `H(z, t) = gamma (1 - t) G(z) + t F(z)` from a start
/// solution at `t = 0` to `t = 1`.
///
/// Euler predictor, Newton corrector with at most `corrector_max_iters`
/// iterations; the step halves on corrector failure and doubles after five
/// consecutive successes. Converged endpoints are sharpened with up to
/// `endpoint_newton_iters` Newton steps on `F`.
pub fn track_path<S: SquareSystem + ?Sized>(
    target: &S,
    start: &StartSystem,
    gamma: C64,
    start_index: u128,
    cfg: &TrackerConfig,
) -> PathOutcome {
    let n = target.dim();
    let h = Homotopy {
        target,
        start,
        gamma,
        n,
    };
    let mut ws = Workspace::new(n);
    let mut z = start.point(start_index);
    let mut z0 = z.clone();

    let mut t = 0.0f64;
    let mut step = cfg.step_init;
    let mut successes = 0;
    let mut steps = 0;
    let outcome = |status, z: &[C64], residual, steps| PathOutcome {
        start_index,
        status,
        endpoint: z.to_vec(),
        residual,
        steps,
    };

    while t < 1.0 {
        steps += 1;
        if steps > MAX_STEPS {
            return outcome(PathStatus::Failed, &z, f64::INFINITY, steps);
        }
        let last = step >= 1.0 - t;
        let dt = if last { 1.0 - t } else { step };
        let t1 = if last { 1.0 } else { t + dt };

        z0.copy_from_slice(&z);
        let ok = predict(&h, &mut ws, &mut z, t, dt) && correct(&h, &mut ws, &mut z, t1, cfg);
        if ok {
            t = t1;
            successes += 1;
            if successes >= 5 {
                step = (step * 2.0).min(cfg.step_init);
                successes = 0;
            }
            if norm_inf(&z) > cfg.divergence_radius {
                return outcome(PathStatus::Infinity, &z, f64::INFINITY, steps);
            }
        } else {
            z.copy_from_slice(&z0);
            successes = 0;
            step *= 0.5;
            if step < cfg.step_min {
                let status = if norm_inf(&z) > cfg.divergence_radius {
                    PathStatus::Infinity
                } else {
                    PathStatus::Failed
                };
                let residual = target.relative_residual(&z);
                return outcome(status, &z, residual, steps);
            }
        }
    }

    sharpen(target, &mut ws, &mut z, cfg.endpoint_newton_iters);
    let residual = target.relative_residual(&z);
    let status = if !residual.is_finite() || norm_inf(&z) > cfg.divergence_radius {
        PathStatus::Infinity
    } else if residual < cfg.corrector_tol {
        PathStatus::Converged
    } else {
        PathStatus::Failed
    };
    outcome(status, &z, residual, steps)
}

fn predict<S: SquareSystem + ?Sized>(
    h: &Homotopy<S>,
    ws: &mut Workspace,
    z: &mut [C64],
    t: f64,
    dt: f64,
) -> bool {
    h.assemble(z, t, ws, true);
    if !small::solve(&mut ws.hz, h.n, &mut ws.rhs) {
        return false;
    }
    for i in 0..h.n {
        z[i] += ws.rhs[i] * dt;
    }
    z.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

fn correct<S: SquareSystem + ?Sized>(
    h: &Homotopy<S>,
    ws: &mut Workspace,
    z: &mut [C64],
    t: f64,
    cfg: &TrackerConfig,
) -> bool {
    let mut prev = f64::INFINITY;
    for _ in 0..cfg.corrector_max_iters {
        h.assemble(z, t, ws, false);
        if !small::solve(&mut ws.hz, h.n, &mut ws.rhs) {
            return false;
        }
        let dz = norm_inf(&ws.rhs);
        // Newton must contract, otherwise the predictor left the basin
        if !dz.is_finite() || dz > 0.5 * prev {
            return false;
        }
        for i in 0..h.n {
            z[i] += ws.rhs[i];
        }
        if dz <= cfg.corrector_tol * (1.0 + norm_inf(z)) {
            return true;
        }
        prev = dz;
    }
    false
}

/// Newton on the target alone; keeps the iterate with the smallest residual.
fn sharpen<S: SquareSystem + ?Sized>(target: &S, ws: &mut Workspace, z: &mut [C64], iters: usize) {
    let n = target.dim();
    let mut best = z.to_vec();
    let mut best_res = target.relative_residual(z);
    for _ in 0..iters {
        target.eval_jacobian(z, &mut ws.f, &mut ws.jf);
        ws.hz.copy_from_slice(&ws.jf);
        for i in 0..n {
            ws.rhs[i] = -ws.f[i];
        }
        if !small::solve(&mut ws.hz, n, &mut ws.rhs) {
            break;
        }
        for i in 0..n {
            z[i] += ws.rhs[i];
        }
        let res = target.relative_residual(z);
        if res < best_res {
            best_res = res;
            best.copy_from_slice(z);
        }
        if norm_inf(&ws.rhs) <= 1e-15 * (1.0 + norm_inf(z)) {
            break;
        }
    }
    z.copy_from_slice(&best);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Poly, PolySystem};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_homotopy_stays_at_start() {
        let r = c(0.6, 0.8);
        let start = StartSystem::new(vec![2], vec![r]);
        let z = Poly::var(1, 0);
        let target = PolySystem::new(vec![&(&z * &z) - &Poly::constant(1, r)]).unwrap();
        let cfg = TrackerConfig::default();
        for idx in 0..2 {
            let out = track_path(&target, &start, c(1.0, 0.0), idx, &cfg);
            assert_eq!(out.status, PathStatus::Converged);
            assert!((out.endpoint[0] - start.point(idx)[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn univariate_square_roots_of_one() {
        let start = StartSystem::new(vec![2], vec![c(0.0, 1.0)]);
        let z = Poly::var(1, 0);
        let target = PolySystem::new(vec![&(&z * &z) - &Poly::constant(1, 1.0)]).unwrap();
        let cfg = TrackerConfig::default();
        let gamma = C64::from_polar(1.0, 0.77);
        let mut ends: Vec<f64> = (0..2)
            .map(|i| {
                let out = track_path(&target, &start, gamma, i, &cfg);
                assert_eq!(out.status, PathStatus::Converged);
                assert!(out.endpoint[0].im.abs() < 1e-12);
                out.endpoint[0].re
            })
            .collect();
        ends.sort_by(f64::total_cmp);
        assert!((ends[0] + 1.0).abs() < 1e-12);
        assert!((ends[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_target_sends_extra_paths_to_infinity() {
        // z^2 start, target 2z - 1: one finite root, one path diverges
        let start = StartSystem::new(vec![2], vec![c(0.3, -0.954)]);
        let z = Poly::var(1, 0);
        let target = PolySystem::new(vec![&z.scale(c(2.0, 0.0)) - &Poly::constant(1, 1.0)]).unwrap();
        // declared degree 2 by the start system, actual degree 1
        let cfg = TrackerConfig::default();
        let gamma = C64::from_polar(1.0, 2.1);
        let outs: Vec<_> = (0..2).map(|i| track_path(&target, &start, gamma, i, &cfg)).collect();
        let conv: Vec<_> = outs.iter().filter(|o| o.status == PathStatus::Converged).collect();
        assert_eq!(conv.len(), 1);
        assert!((conv[0].endpoint[0] - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(TrackerConfig::default().validate().is_ok());
        let mut bad = TrackerConfig::default();
        bad.seeds.clear();
        assert!(bad.validate().is_err());
        let mut bad = TrackerConfig::default();
        bad.step_min = 0.0;
        assert!(bad.validate().is_err());
    }
}
