use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::SymMatrix;
use crate::error::{Error, Result};
use crate::rng::{Sampler, STREAM_LP, STREAM_QP, STREAM_SDP};

/// `minimize c x subject to A x = b, x >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpInstance {
    pub m: usize,
    pub d: usize,
    pub seed: u64,
    #[serde(rename = "A", with = "super::json::rows")]
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// Strictly positive point with `A x0 = b`.
    #[serde(rename = "certificate")]
    pub x0: Vec<f64>,
}

/// `minimize 1/2 x^T diag(q) x + c x subject to A x = b, x >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpInstance {
    #[serde(flatten)]
    pub lp: LpInstance,
    pub q: Vec<f64>,
}

/// `minimize <C, X> subject to <A_i, X> = b_i, X psd`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpInstance {
    pub m: usize,
    pub d: usize,
    pub seed: u64,
    #[serde(rename = "A")]
    pub amats: Vec<SymMatrix>,
    pub b: Vec<f64>,
    #[serde(rename = "C")]
    pub c: SymMatrix,
    /// Positive definite matrix with `<A_i, X0> = b_i`.
    #[serde(rename = "certificate")]
    pub x0: SymMatrix,
}

/// Data of the cleared KKT equations
/// `q_i x_i^2 + c_i x_i - lambda - (y^T a_i) x_i = 0` (with `q = 0` for LP).
pub trait ClearedKkt {
    fn constraint_matrix(&self) -> &DMatrix<f64>;
    fn rhs(&self) -> &[f64];
    fn cost(&self) -> &[f64];
    fn quadratic(&self) -> Option<&[f64]>;
    fn certificate(&self) -> &[f64];
}

impl ClearedKkt for LpInstance {
    fn constraint_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }
    fn rhs(&self) -> &[f64] {
        &self.b
    }
    fn cost(&self) -> &[f64] {
        &self.c
    }
    fn quadratic(&self) -> Option<&[f64]> {
        None
    }
    fn certificate(&self) -> &[f64] {
        &self.x0
    }
}

impl ClearedKkt for QpInstance {
    fn constraint_matrix(&self) -> &DMatrix<f64> {
        &self.lp.a
    }
    fn rhs(&self) -> &[f64] {
        &self.lp.b
    }
    fn cost(&self) -> &[f64] {
        &self.lp.c
    }
    fn quadratic(&self) -> Option<&[f64]> {
        Some(&self.q)
    }
    fn certificate(&self) -> &[f64] {
        &self.lp.x0
    }
}

fn check_lp_dims(m: usize, d: usize) -> Result<()> {
    if d == 0 || d >= m {
        return Err(Error::InvalidDimensions(format!("need 1 <= d < m, got m={m}, d={d}")));
    }
    Ok(())
}

pub(crate) fn mat_vec(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..a.nrows())
        .map(|r| (0..a.ncols()).map(|c| a[(r, c)] * x[c]).sum())
        .collect()
}

pub(crate) fn numerical_rank(a: &DMatrix<f64>) -> usize {
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|s| **s > 1e-10 * max.max(1e-300)).count()
}

fn lp_with_stream(m: usize, d: usize, seed: u64, stream: u64) -> Result<(LpInstance, Sampler)> {
    check_lp_dims(m, d)?;
    let mut s = Sampler::for_problem(seed, stream, m, d);
    let mut a = DMatrix::zeros(d, m);
    for r in 0..d {
        for c in 0..m {
            a[(r, c)] = s.symmetric_unit();
        }
    }
    let x0 = s.vec(m, 0.5, 1.5);
    let b = mat_vec(&a, &x0);
    // c = A^T y0 + s0 with s0 > 0 makes the dual strictly feasible
    let y0 = s.vec(d, -1.0, 1.0);
    let s0 = s.vec(m, 0.5, 1.5);
    let c = (0..m)
        .map(|i| (0..d).map(|k| a[(k, i)] * y0[k]).sum::<f64>() + s0[i])
        .collect();
    if numerical_rank(&a) != d {
        return Err(Error::RankDeficient(format!("sampled A has rank < {d}")));
    }
    Ok((LpInstance { m, d, seed, a, b, c, x0 }, s))
}

/// Random LP with `A` uniform on `[-1, 1]`, `b = A x0` for a certificate
/// `x0` in `[0.5, 1.5]^m`, and a dual strictly feasible cost.
pub fn random_lp(m: usize, d: usize, seed: u64) -> Result<LpInstance> {
    lp_with_stream(m, d, seed, STREAM_LP).map(|(lp, _)| lp)
}

/// Random QP: LP data as in [`random_lp`] plus a diagonal `q` in `[0.5, 1.5]^m`.
pub fn random_qp(m: usize, d: usize, seed: u64) -> Result<QpInstance> {
    let (lp, mut s) = lp_with_stream(m, d, seed, STREAM_QP)?;
    let q = s.vec(m, 0.5, 1.5);
    Ok(QpInstance { lp, q })
}

fn random_sym(m: usize, s: &mut Sampler) -> SymMatrix {
    SymMatrix::from_fn(m, |_, _| s.symmetric_unit())
}

/// `G G^T + Id` for `G` uniform on `[-1, 1]`.
fn random_pd(m: usize, s: &mut Sampler) -> SymMatrix {
    let g: Vec<f64> = s.vec(m * m, -1.0, 1.0);
    SymMatrix::from_fn(m, |i, j| {
        let dot: f64 = (0..m).map(|k| g[i * m + k] * g[j * m + k]).sum();
        dot + if i == j { 1.0 } else { 0.0 }
    })
}

/// Smallest Cholesky pivot of the Gram matrix relative to its largest
/// diagonal entry; zero when the matrices are linearly dependent.
pub(crate) fn gram_independence(mats: &[&SymMatrix]) -> f64 {
    let n = mats.len();
    let g = DMatrix::from_fn(n, n, |i, j| mats[i].inner(mats[j]));
    let max_diag = (0..n).map(|i| g[(i, i)]).fold(0.0, f64::max);
    match g.cholesky() {
        Some(ch) => {
            let l = ch.l();
            (0..n).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min) / max_diag.max(1e-300)
        }
        None => 0.0,
    }
}

/// Random SDP with symmetric `A_i` uniform on `[-1, 1]`, `b_i = <A_i, X0>`
/// for `X0 = G G^T + Id`, and `C = sum y0_i A_i + S0` with `S0` positive
/// definite so the dual is strictly feasible.
pub fn random_sdp(m: usize, d: usize, seed: u64) -> Result<SdpInstance> {
    let n = m * (m + 1) / 2;
    if m == 0 || d == 0 || d >= n {
        return Err(Error::InvalidDimensions(format!(
            "need 1 <= d < m(m+1)/2 = {n}, got m={m}, d={d}"
        )));
    }
    let mut s = Sampler::for_problem(seed, STREAM_SDP, m, d);
    let amats: Vec<SymMatrix> = (0..d).map(|_| random_sym(m, &mut s)).collect();
    let x0 = random_pd(m, &mut s);
    let b = amats.iter().map(|a| a.inner(&x0)).collect();
    let y0 = s.vec(d, -1.0, 1.0);
    let mut c = random_pd(m, &mut s);
    for (a, y) in amats.iter().zip(&y0) {
        c.axpy(*y, a);
    }
    let mut all: Vec<&SymMatrix> = vec![&c];
    all.extend(amats.iter());
    if gram_independence(&all) < 1e-12 {
        return Err(Error::DependentBasis);
    }
    Ok(SdpInstance {
        m,
        d,
        seed,
        amats,
        b,
        c,
        x0,
    })
}
