//! Following the central path of random LP, QP and SDP instances with a
//! damped Newton method on the barrier problem
//! `minimize f(x) - lambda sum log x_i` (or `- lambda log det X`) subject to
//! the equality constraints, warm-started along a geometric `lambda`
//! schedule.
//!
//! Newton steps are computed in coordinates scaled by the current iterate
//! (`dx = X u`, `dX = L U L^T` with `X = L L^T`), where the Hessian of the
//! barrier is `lambda Id`. The residual reported with each sample is the
//! scaled KKT defect `|X s / lambda - 1|_2` (LP/QP, `s = c + Q x - A^T y`)
//! or `|L^T S L / lambda - Id|_F` (SDP, `S = C - sum y_i A_i`), with `y`
//! the least-squares multipliers at the sample.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::SymMatrix;
use crate::error::{Error, Result};
use crate::instances::{ClearedKkt, SdpInstance};

const MAX_HALVINGS: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub lambda_start: f64,
    pub sigma: f64,
    pub steps: usize,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    /// Residual accepted when no damped step decreases it any further
    /// (roundoff dominates for small `lambda`).
    pub stall_tol: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            lambda_start: 1.0,
            sigma: 0.5,
            steps: 30,
            newton_tol: 1e-10,
            newton_max_iters: 50,
            stall_tol: 1e-7,
        }
    }
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_start > 0.0 && self.lambda_start.is_finite()) {
            return Err(Error::Invalid(format!("lambda_start must be positive, got {}", self.lambda_start)));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::Invalid(format!("sigma must lie in (0, 1), got {}", self.sigma)));
        }
        if self.steps == 0 || self.newton_max_iters == 0 {
            return Err(Error::Invalid("steps and newton_max_iters must be positive".into()));
        }
        if !(self.newton_tol > 0.0 && self.stall_tol >= self.newton_tol) {
            return Err(Error::Invalid("need 0 < newton_tol <= stall_tol".into()));
        }
        Ok(())
    }

    /// `lambda_start * sigma^k` for `k = 0..steps`.
    pub fn lambdas(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.lambda_start * self.sigma.powi(k as i32)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Primal {
    Vector(Vec<f64>),
    Matrix(SymMatrix),
}

impl Primal {
    /// `x_1..x_m`, or the upper triangle of `X` row by row.
    pub fn coords(&self) -> &[f64] {
        match self {
            Primal::Vector(x) => x,
            Primal::Matrix(x) => x.packed(),
        }
    }

    fn names(&self) -> Vec<String> {
        match self {
            Primal::Vector(x) => (1..=x.len()).map(|i| format!("x{i}")).collect(),
            Primal::Matrix(x) => {
                let m = x.dim();
                (0..m)
                    .flat_map(|i| (i..m).map(move |j| format!("X{}_{}", i + 1, j + 1)))
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub lambda: f64,
    pub primal: Primal,
    pub dual: Vec<f64>,
    pub kkt_residual: f64,
}

/// Samples in decreasing `lambda`; `failure` holds the `lambda` at which
/// Newton gave up, in which case the samples stop before it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathTrace {
    pub samples: Vec<PathSample>,
    pub failure: Option<f64>,
}

impl PathTrace {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    /// The samples, or [`Error::NewtonFailure`] if the trace was cut short.
    pub fn into_result(self) -> Result<Vec<PathSample>> {
        match self.failure {
            Some(lambda) => Err(Error::NewtonFailure { lambda }),
            None => Ok(self.samples),
        }
    }
}

struct VecProblem<'a> {
    a: &'a DMatrix<f64>,
    b: &'a [f64],
    c: &'a [f64],
    q: Option<&'a [f64]>,
}

impl VecProblem<'_> {
    /// `X (c + Q x)`.
    fn scaled_grad(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, xi)| xi * (self.c[i] + self.q.map_or(0.0, |q| q[i] * xi)))
            .collect()
    }

    fn scaled_a(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.a.nrows(), self.a.ncols(), |r, c| self.a[(r, c)] * x[c])
    }

    /// Least-squares multipliers and the scaled residual at `x`.
    fn residual(&self, x: &[f64], lambda: f64) -> Option<(Vec<f64>, f64)> {
        let g = DVector::from_vec(self.scaled_grad(x));
        let at = self.scaled_a(x);
        let shifted = g.add_scalar(-lambda);
        let y = at.transpose().svd(true, true).solve(&shifted, 0.0).ok()?;
        let r = &g - at.transpose() * &y;
        let res = r.iter().map(|v| (v / lambda - 1.0).powi(2)).sum::<f64>().sqrt();
        Some((y.iter().cloned().collect(), res))
    }

    /// Removes the drift of `A x - b` with the correction
    /// `X^2 A^T w`, `(A X^2 A^T) w = A x - b`.
    fn restore(&self, x: &mut [f64]) -> Option<()> {
        let at = self.scaled_a(x);
        let defect = DVector::from_fn(self.b.len(), |r, _| {
            (0..x.len()).map(|i| self.a[(r, i)] * x[i]).sum::<f64>() - self.b[r]
        });
        let w = (&at * at.transpose()).cholesky()?.solve(&defect);
        let corr = at.transpose() * w;
        for (xi, ci) in x.iter_mut().zip(corr.iter()) {
            *xi -= *xi * ci;
        }
        Some(())
    }

    /// Newton direction in `x` for the barrier problem at `lambda`.
    fn step(&self, x: &[f64], lambda: f64) -> Option<Vec<f64>> {
        let m = x.len();
        let g: Vec<f64> = self.scaled_grad(x).iter().map(|v| v - lambda).collect();
        let h: Vec<f64> = (0..m)
            .map(|i| lambda + self.q.map_or(0.0, |q| q[i] * x[i] * x[i]))
            .collect();
        let at = self.scaled_a(x);
        // (A~ H^-1 A~^T) y = A~ H^-1 g, u = H^-1 (A~^T y - g)
        let hinv_at = DMatrix::from_fn(m, at.nrows(), |i, r| at[(r, i)] / h[i]);
        let lhs = &at * &hinv_at;
        let rhs = DVector::from_fn(at.nrows(), |r, _| (0..m).map(|i| at[(r, i)] * g[i] / h[i]).sum());
        let y = lhs.lu().solve(&rhs)?;
        let aty = at.transpose() * y;
        Some((0..m).map(|i| x[i] * (aty[i] - g[i]) / h[i]).collect())
    }
}

fn trace_vec(p: &VecProblem, x0: &[f64], sched: &ScheduleConfig) -> Result<PathTrace> {
    sched.validate()?;
    if x0.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Invalid("certificate is not strictly positive".into()));
    }
    let mut x = x0.to_vec();
    let mut samples = Vec::with_capacity(sched.steps);
    for lambda in sched.lambdas() {
        match newton_vec(p, &mut x, lambda, sched) {
            Some((y, res)) => samples.push(PathSample {
                lambda,
                primal: Primal::Vector(x.clone()),
                dual: y,
                kkt_residual: res,
            }),
            None => {
                return Ok(PathTrace {
                    samples,
                    failure: Some(lambda),
                })
            }
        }
    }
    Ok(PathTrace { samples, failure: None })
}

fn newton_vec(p: &VecProblem, x: &mut Vec<f64>, lambda: f64, sched: &ScheduleConfig) -> Option<(Vec<f64>, f64)> {
    let (mut y, mut res) = p.residual(x, lambda)?;
    for _ in 0..sched.newton_max_iters {
        if res < sched.newton_tol {
            return Some((y, res));
        }
        let dx = p.step(x, lambda)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let mut trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + t * b).collect();
            if trial.iter().all(|v| *v > 0.0) && p.restore(&mut trial).is_some() && trial.iter().all(|v| *v > 0.0) {
                if let Some((ty, tres)) = p.residual(&trial, lambda) {
                    if tres < res {
                        *x = trial;
                        (y, res) = (ty, tres);
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (res < sched.stall_tol).then_some((y, res))
}

/// Central path of an LP or QP from its certificate.
pub fn trace_kkt<P: ClearedKkt + ?Sized>(prog: &P, sched: &ScheduleConfig) -> Result<PathTrace> {
    let p = VecProblem {
        a: prog.constraint_matrix(),
        b: prog.rhs(),
        c: prog.cost(),
        q: prog.quadratic(),
    };
    trace_vec(&p, prog.certificate(), sched)
}

pub fn trace_lp(lp: &crate::instances::LpInstance, sched: &ScheduleConfig) -> Result<PathTrace> {
    trace_kkt(lp, sched)
}

pub fn trace_qp(qp: &crate::instances::QpInstance, sched: &ScheduleConfig) -> Result<PathTrace> {
    trace_kkt(qp, sched)
}

struct SdpState {
    chol: DMatrix<f64>,
    y: DVector<f64>,
    res: f64,
}

fn sdp_state(sdp: &SdpInstance, x: &DMatrix<f64>, lambda: f64) -> Option<SdpState> {
    let l = x.clone().cholesky()?.l();
    let lt = l.transpose();
    let ct = &lt * sdp.c.to_dense() * &l;
    let at: Vec<DMatrix<f64>> = sdp.amats.iter().map(|a| &lt * a.to_dense() * &l).collect();
    let d = at.len();
    let m = x.nrows();
    let cols = DMatrix::from_fn(m * m, d, |k, i| at[i][(k / m, k % m)]);
    let target = DVector::from_fn(m * m, |k, _| ct[(k / m, k % m)] - if k / m == k % m { lambda } else { 0.0 });
    let y = cols.svd(true, true).solve(&target, 0.0).ok()?;
    let mut s = ct.clone();
    for (ai, yi) in at.iter().zip(y.iter()) {
        s -= ai * *yi;
    }
    let res = (&s / lambda - DMatrix::identity(m, m)).norm();
    Some(SdpState {
        chol: l,
        y,
        res,
    })
}

/// Central path of an SDP from its certificate `X0`.
pub fn trace_sdp(sdp: &SdpInstance, sched: &ScheduleConfig) -> Result<PathTrace> {
    sched.validate()?;
    let mut x = sdp.x0.to_dense();
    if x.clone().cholesky().is_none() {
        return Err(Error::Invalid("certificate is not positive definite".into()));
    }
    let mut samples = Vec::with_capacity(sched.steps);
    for lambda in sched.lambdas() {
        match newton_sdp(sdp, &mut x, lambda, sched) {
            Some(st) => samples.push(PathSample {
                lambda,
                primal: Primal::Matrix(symmetrize(&x)),
                dual: st.y.iter().cloned().collect(),
                kkt_residual: st.res,
            }),
            None => {
                return Ok(PathTrace {
                    samples,
                    failure: Some(lambda),
                })
            }
        }
    }
    Ok(PathTrace { samples, failure: None })
}

/// Removes the drift of `<A_i, X> - b_i` with the correction
/// `X (sum w_i A_i) X`, `<A_i, X A_j X> w_j = <A_i, X> - b_i`.
fn restore_sdp(sdp: &SdpInstance, x: &mut DMatrix<f64>) -> Option<()> {
    let d = sdp.amats.len();
    let a: Vec<DMatrix<f64>> = sdp.amats.iter().map(|a| a.to_dense()).collect();
    let xax: Vec<DMatrix<f64>> = a.iter().map(|ai| &*x * ai * &*x).collect();
    let gram = DMatrix::from_fn(d, d, |i, j| a[i].dot(&xax[j]));
    let defect = DVector::from_fn(d, |i, _| a[i].dot(x) - sdp.b[i]);
    let w = gram.cholesky()?.solve(&defect);
    for (c, wi) in xax.iter().zip(w.iter()) {
        *x -= c * *wi;
    }
    Some(())
}

fn symmetrize(x: &DMatrix<f64>) -> SymMatrix {
    SymMatrix::from_fn(x.nrows(), |i, j| x[(i, j)])
}

fn newton_sdp(sdp: &SdpInstance, x: &mut DMatrix<f64>, lambda: f64, sched: &ScheduleConfig) -> Option<SdpState> {
    let m = x.nrows();
    let mut st = sdp_state(sdp, x, lambda)?;
    for _ in 0..sched.newton_max_iters {
        if st.res < sched.newton_tol {
            return Some(st);
        }
        // U = Id - (L^T S L) / lambda, with y the least-squares multipliers,
        // satisfies <L^T A_i L, U> = 0; dX = L U L^T
        let l = &st.chol;
        let lt = l.transpose();
        let mut s = sdp.c.to_dense();
        for (a, yi) in sdp.amats.iter().zip(st.y.iter()) {
            s -= a.to_dense() * *yi;
        }
        let u = DMatrix::identity(m, m) - (&lt * s * l) / lambda;
        let dx = l * u * &lt;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let mut trial = &*x + &dx * t;
            trial = (&trial + trial.transpose()) * 0.5;
            if restore_sdp(sdp, &mut trial).is_none() {
                t *= 0.5;
                continue;
            }
            trial = (&trial + trial.transpose()) * 0.5;
            if let Some(ts) = sdp_state(sdp, &trial, lambda) {
                if ts.res < st.res {
                    *x = trial;
                    st = ts;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (st.res < sched.stall_tol).then_some(st)
}

/// `lambda,<primal coords>,<dual coords>,residual`, one row per sample, every
/// value with 17 significant digits.
pub fn to_csv(samples: &[PathSample]) -> Result<String> {
    let first = samples.first().ok_or(Error::Empty("path samples"))?;
    let mut out = String::from("lambda");
    for name in first.primal.names() {
        out.push(',');
        out.push_str(&name);
    }
    for i in 1..=first.dual.len() {
        let _ = write!(out, ",y{i}");
    }
    out.push_str(",residual\n");
    for s in samples {
        let _ = write!(out, "{:.16e}", s.lambda);
        for v in s.primal.coords().iter().chain(&s.dual) {
            let _ = write!(out, ",{v:.16e}");
        }
        let _ = writeln!(out, ",{:.16e}", s.kkt_residual);
    }
    Ok(out)
}

pub fn emit_csv(samples: &[PathSample], path: &Path) -> Result<()> {
    let text = to_csv(samples)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads back the output of [`to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<PathSample>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or(Error::Empty("csv"))?.split(',').collect();
    if header.first() != Some(&"lambda") || header.last() != Some(&"residual") {
        return Err(Error::Invalid("csv header must start with lambda and end with residual".into()));
    }
    let n_vec = header.iter().filter(|h| h.starts_with('x')).count();
    let n_mat = header.iter().filter(|h| h.starts_with('X')).count();
    let n_dual = header.iter().filter(|h| h.starts_with('y')).count();
    if header.len() != n_vec + n_mat + n_dual + 2 || (n_vec > 0 && n_mat > 0) {
        return Err(Error::Invalid("unrecognised csv columns".into()));
    }
    let m_mat = (0..=n_mat).find(|m| m * (m + 1) / 2 == n_mat);
    let mut samples = Vec::new();
    for (k, line) in lines.enumerate() {
        let vals = line
            .split(',')
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Invalid(format!("row {}: {e}", k + 1)))?;
        if vals.len() != header.len() {
            return Err(Error::DimensionMismatch {
                expected: header.len(),
                got: vals.len(),
            });
        }
        let np = n_vec + n_mat;
        let primal = if n_mat > 0 {
            let m = m_mat.ok_or_else(|| Error::Invalid("matrix columns are not a triangle".into()))?;
            Primal::Matrix(SymMatrix::from_packed(m, vals[1..1 + np].to_vec()).expect("length checked"))
        } else {
            Primal::Vector(vals[1..1 + np].to_vec())
        };
        samples.push(PathSample {
            lambda: vals[0],
            primal,
            dual: vals[1 + np..1 + np + n_dual].to_vec(),
            kkt_residual: vals[vals.len() - 1],
        });
    }
    if samples.is_empty() {
        return Err(Error::Empty("csv rows"));
    }
    Ok(samples)
}

/// `s = c + Q x - A^T y` at an LP/QP sample.
pub fn slack<P: ClearedKkt + ?Sized>(prog: &P, x: &[f64], y: &[f64]) -> Vec<f64> {
    let a = prog.constraint_matrix();
    (0..x.len())
        .map(|i| {
            let aty: f64 = (0..a.nrows()).map(|r| a[(r, i)] * y[r]).sum();
            prog.cost()[i] + prog.quadratic().map_or(0.0, |q| q[i] * x[i]) - aty
        })
        .collect()
}

/// `S = C - sum y_i A_i` at an SDP sample.
pub fn dual_slack(sdp: &SdpInstance, y: &[f64]) -> SymMatrix {
    let mut s = sdp.c.clone();
    for (a, yi) in sdp.amats.iter().zip(y) {
        s.axpy(-yi, a);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{random_lp, random_qp, random_sdp};

    fn sched(steps: usize) -> ScheduleConfig {
        ScheduleConfig {
            steps,
            ..ScheduleConfig::default()
        }
    }

    #[test]
    fn lp_samples_are_feasible_and_centered() {
        let lp = random_lp(6, 2, 1).unwrap();
        let samples = trace_lp(&lp, &sched(20)).unwrap().into_result().unwrap();
        assert_eq!(samples.len(), 20);
        for s in &samples {
            let Primal::Vector(x) = &s.primal else { panic!() };
            assert!(x.iter().all(|v| *v > 0.0));
            for r in 0..2 {
                let ax: f64 = (0..6).map(|i| lp.a[(r, i)] * x[i]).sum();
                assert!((ax - lp.b[r]).abs() < 1e-10);
            }
            let sl = slack(&lp, x, &s.dual);
            for (xi, si) in x.iter().zip(&sl) {
                assert!((xi * si / s.lambda - 1.0).abs() < 1e-8);
            }
            let gap: f64 = lp.c.iter().zip(x).map(|(c, x)| c * x).sum::<f64>()
                - lp.b.iter().zip(&s.dual).map(|(b, y)| b * y).sum::<f64>();
            assert!((gap / s.lambda - 6.0).abs() < 1e-8 * 6.0);
        }
    }

    #[test]
    fn qp_gap_law() {
        let qp = random_qp(5, 2, 2).unwrap();
        let samples = trace_qp(&qp, &sched(20)).unwrap().into_result().unwrap();
        for s in &samples {
            let x = s.primal.coords();
            let gap: f64 = x.iter().zip(slack(&qp, x, &s.dual)).map(|(a, b)| a * b).sum();
            assert!((gap / s.lambda - 5.0).abs() < 1e-6 * 5.0);
        }
    }

    #[test]
    fn sdp_gap_law_and_feasibility() {
        let sdp = random_sdp(4, 3, 3).unwrap();
        let samples = trace_sdp(&sdp, &sched(20)).unwrap().into_result().unwrap();
        for s in &samples {
            let Primal::Matrix(x) = &s.primal else { panic!() };
            assert!(x.to_dense().cholesky().is_some());
            for (a, b) in sdp.amats.iter().zip(&sdp.b) {
                assert!((a.inner(x) - b).abs() < 1e-9 * b.abs().max(1.0));
            }
            let gap = x.inner(&dual_slack(&sdp, &s.dual));
            assert!((gap / s.lambda - 4.0).abs() < 1e-6 * 4.0);
        }
    }

    #[test]
    fn lambdas_decrease_geometrically() {
        let l = ScheduleConfig::default().lambdas();
        assert_eq!(l.len(), 30);
        assert_eq!(l[0], 1.0);
        assert_eq!(l[3], 0.125);
    }

    #[test]
    fn invalid_schedules_rejected() {
        let lp = random_lp(4, 2, 1).unwrap();
        for bad in [
            ScheduleConfig { lambda_start: 0.0, ..ScheduleConfig::default() },
            ScheduleConfig { sigma: 1.0, ..ScheduleConfig::default() },
            ScheduleConfig { steps: 0, ..ScheduleConfig::default() },
        ] {
            assert!(trace_lp(&lp, &bad).is_err());
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let lp = random_lp(4, 2, 5).unwrap();
        let samples = trace_lp(&lp, &sched(10)).unwrap().into_result().unwrap();
        let text = to_csv(&samples).unwrap();
        assert_eq!(text.lines().count(), 11);
        assert_eq!(text.lines().next().unwrap(), "lambda,x1,x2,x3,x4,y1,y2,residual");
        assert_eq!(parse_csv(&text).unwrap(), samples);

        let sdp = random_sdp(3, 2, 5).unwrap();
        let samples = trace_sdp(&sdp, &sched(4)).unwrap().into_result().unwrap();
        let text = to_csv(&samples).unwrap();
        assert!(text.starts_with("lambda,X1_1,X1_2,X1_3,X2_2,X2_3,X3_3,y1,y2,residual\n"));
        assert_eq!(parse_csv(&text).unwrap(), samples);
    }

    #[test]
    fn empty_samples_are_an_error() {
        assert!(matches!(to_csv(&[]), Err(Error::Empty(_))));
        assert!(parse_csv("lambda,x1,y1,residual\n").is_err());
        assert!(parse_csv("").is_err());
    }
}
