use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::ml::{MlForm, MlSystem};
use crate::algebra::{small, SymMatrix, ADJ_SINGULAR_THRESHOLD};
use crate::error::{Error, Result};
use crate::homotopy::{count_torus_solutions, CountReport, Filters, SquareSystem, TrackerConfig};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const MAX_M: usize = small::MAX_DIM;
const MAX_UNKNOWNS: usize = MAX_M * (MAX_M + 1) / 2;

/// The likelihood equations of an [`MlSystem`] in covariance coordinates:
///
/// `G_j(w) = <U_j, adj Sigma(w)>`, `Sigma(w) = S + sum_j w_j U_j`,
///
/// where `U_1..U_k` span the orthogonal complement of `L = span(K_i)`, so
/// `k = m(m+1)/2 - d - 1`. A zero with `det Sigma != 0` has
/// `Sigma^{-1} in L` and `Sigma - S in L^perp`, the same solutions as the
/// concentration form, and the equations have degree `m - 1`.
#[derive(Clone, Debug)]
pub struct CovarianceSystem {
    pub m: usize,
    pub d: usize,
    pub s: SymMatrix,
    /// Orthonormal basis of `L^perp` under the trace inner product.
    pub perp: Vec<SymMatrix>,
    kbasis: Vec<SymMatrix>,
    rhs: Vec<f64>,
    dense: Vec<f64>,
}

/// Coordinates of a symmetric matrix that make the trace inner product the
/// dot product: diagonal entries, then `sqrt 2` times the upper entries.
fn iso_coords(a: &SymMatrix) -> Vec<f64> {
    let m = a.dim();
    let mut v = Vec::with_capacity(m * (m + 1) / 2);
    for i in 0..m {
        v.push(a.get(i, i));
    }
    for i in 0..m {
        for j in i + 1..m {
            v.push(std::f64::consts::SQRT_2 * a.get(i, j));
        }
    }
    v
}

fn from_iso(m: usize, v: &[f64]) -> SymMatrix {
    let mut a = SymMatrix::zeros(m);
    for i in 0..m {
        a.set(i, i, v[i]);
    }
    let mut k = m;
    for i in 0..m {
        for j in i + 1..m {
            a.set(i, j, v[k] / std::f64::consts::SQRT_2);
            k += 1;
        }
    }
    a
}

impl CovarianceSystem {
    pub fn new(ml: &MlSystem) -> Result<Self> {
        let m = ml.m;
        let n = m * (m + 1) / 2;
        let k = n - ml.kbasis.len();
        if k == 0 {
            return Err(Error::InvalidDimensions("the model is all of S^m; its ML degree is 1".into()));
        }
        // orthonormal basis of span(K), then greedy Gram-Schmidt of the unit
        // vectors against it
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
        let orth = |v: &mut Vec<f64>, q: &[Vec<f64>]| {
            for _ in 0..2 {
                for u in q {
                    let p: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
                }
            }
            v.iter().map(|x| x * x).sum::<f64>().sqrt()
        };
        for kb in &ml.kbasis {
            let mut v = iso_coords(kb);
            let norm = orth(&mut v, &q);
            if norm < 1e-12 {
                return Err(Error::DependentBasis);
            }
            v.iter_mut().for_each(|x| *x /= norm);
            q.push(v);
        }
        let mut perp = Vec::with_capacity(k);
        while perp.len() < k {
            let (mut best, mut best_norm) = (Vec::new(), 0.0);
            for e in 0..n {
                let mut v = vec![0.0; n];
                v[e] = 1.0;
                let norm = orth(&mut v, &q);
                if norm > best_norm {
                    best = v;
                    best_norm = norm;
                }
            }
            best.iter_mut().for_each(|x| *x /= best_norm);
            perp.push(from_iso(m, &best));
            q.push(best);
        }
        let mut dense = Vec::with_capacity(k * m * m);
        for u in &perp {
            for i in 0..m {
                for j in 0..m {
                    dense.push(u.get(i, j));
                }
            }
        }
        let rhs = ml.kbasis.iter().map(|kb| kb.inner(&ml.s)).collect();
        Ok(Self {
            m,
            d: ml.d,
            s: ml.s.clone(),
            perp,
            kbasis: ml.kbasis.clone(),
            rhs,
            dense,
        })
    }

    pub fn unknowns(&self) -> usize {
        self.perp.len()
    }

    fn basis(&self, j: usize) -> &[f64] {
        let mm = self.m * self.m;
        &self.dense[j * mm..(j + 1) * mm]
    }

    fn assemble(&self, w: &[C64], out: &mut [C64]) {
        let m = self.m;
        for i in 0..m {
            for j in 0..m {
                out[i * m + j] = C64::new(self.s.get(i, j), 0.0);
            }
        }
        for (j, wj) in w.iter().enumerate() {
            for (o, u) in out[..m * m].iter_mut().zip(self.basis(j)) {
                *o += wj * *u;
            }
        }
    }

    /// `Sigma(w)` as a dense complex matrix.
    pub fn covariance(&self, w: &[C64]) -> DMatrix<C64> {
        let m = self.m;
        let mut a = [ZERO; MAX_M * MAX_M];
        self.assemble(w, &mut a);
        DMatrix::from_fn(m, m, |i, j| a[i * m + j])
    }

    /// Coordinates `z` of `K = Sigma(w)^{-1}` in the basis `C, A_1..A_d`
    /// (least squares), or `None` on the determinantal locus.
    pub fn concentration_coords(&self, w: &[C64]) -> Option<Vec<C64>> {
        let sigma = self.covariance(w);
        let scale = small::max_abs(sigma.as_slice()).powi(self.m as i32);
        if !(sigma.determinant().norm() > ADJ_SINGULAR_THRESHOLD * scale) {
            return None;
        }
        let k = sigma.try_inverse()?;
        let mm = self.m * self.m;
        let b = DMatrix::from_fn(mm, self.kbasis.len(), |idx, c| {
            C64::new(self.kbasis[c].get(idx / self.m, idx % self.m), 0.0)
        });
        let rhs = DMatrix::from_fn(mm, 1, |idx, _| k[(idx / self.m, idx % self.m)]);
        let z = b.svd(true, true).solve(&rhs, 1e-14).ok()?;
        Some(z.iter().cloned().collect())
    }

    /// `(|K - sum_i z_i K_i|, max_i |<Sigma - S, K_i>|)` at `w`.
    pub fn likelihood_residual(&self, w: &[C64]) -> Option<(f64, f64)> {
        let m = self.m;
        let z = self.concentration_coords(w)?;
        let sigma = self.covariance(w);
        let k = sigma.clone().try_inverse()?;
        let mut span_res: f64 = 0.0;
        for r in 0..m {
            for c in 0..m {
                let fit: C64 = z.iter().zip(&self.kbasis).map(|(zi, kb)| zi * kb.get(r, c)).sum();
                span_res = span_res.max((k[(r, c)] - fit).norm());
            }
        }
        let mut lin_res: f64 = 0.0;
        for (kb, r) in self.kbasis.iter().zip(&self.rhs) {
            let v: C64 = (0..m * m).map(|idx| sigma[(idx / m, idx % m)] * kb.get(idx / m, idx % m)).sum();
            lin_res = lin_res.max((v - r).norm());
        }
        Some((span_res, lin_res))
    }
}

/// Total-degree path counts of the trace-reduced concentration form and of
/// the covariance form of `ml`.
pub fn ml_path_counts(ml: &MlSystem) -> (u128, u128) {
    let n = ml.m * (ml.m + 1) / 2;
    let base = ml.m as u128 - 1;
    let conc = base.checked_pow(ml.d as u32).unwrap_or(u128::MAX);
    let cov = base.checked_pow((n - ml.d - 1) as u32).unwrap_or(u128::MAX);
    (conc, cov)
}

/// Counts the solutions of the likelihood equations of `ml` off the
/// determinantal locus, in whichever coordinates need fewer paths
/// (concentration coordinates on ties).
pub fn ml_degree(ml: &MlSystem, cfg: &TrackerConfig) -> Result<CountReport> {
    let (conc, cov) = ml_path_counts(ml);
    if cov < conc {
        let sys = CovarianceSystem::new(ml)?;
        let filters = Filters {
            avoid_singular_locus: true,
            ..Filters::default()
        };
        return count_torus_solutions(&sys, &filters, cfg);
    }
    let sys = match ml.clone().with_form(MlForm::TraceReduced) {
        Ok(sys) => sys,
        Err(_) => ml.clone(),
    };
    count_torus_solutions(&sys, &Filters::likelihood(), cfg)
}

fn inner_re(a: &[f64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + y * *x)
}

impl SquareSystem for CovarianceSystem {
    fn dim(&self) -> usize {
        self.perp.len()
    }

    fn degrees(&self) -> Vec<u32> {
        vec![self.m as u32 - 1; self.perp.len()]
    }

    fn eval(&self, w: &[C64], out: &mut [C64]) {
        let mm = self.m * self.m;
        let mut a = [ZERO; MAX_M * MAX_M];
        let mut adj = [ZERO; MAX_M * MAX_M];
        self.assemble(w, &mut a);
        small::adj_cofactor(&a, self.m, &mut adj);
        for (j, o) in out.iter_mut().enumerate().take(self.perp.len()) {
            *o = inner_re(self.basis(j), &adj[..mm]);
        }
    }

    fn eval_jacobian(&self, w: &[C64], out: &mut [C64], jac: &mut [C64]) {
        let m = self.m;
        let mm = m * m;
        let k = self.perp.len();
        let mut a = [ZERO; MAX_M * MAX_M];
        let mut inv = [ZERO; MAX_M * MAX_M];
        self.assemble(w, &mut a);
        let det = small::invert(&a, m, &mut inv);

        if det.norm() > ADJ_SINGULAR_THRESHOLD * small::max_abs(&a[..mm]).powi(m as i32) {
            // B_j = Sigma^{-1} U_j: G_j = det tr(B_j),
            // dG_j / dw_l = det (tr(B_j) tr(B_l) - tr(B_j B_l))
            let mut bm = vec![ZERO; k * mm];
            let mut p = [ZERO; MAX_UNKNOWNS];
            for j in 0..k {
                let uj = self.basis(j);
                let bj = &mut bm[j * mm..(j + 1) * mm];
                for r in 0..m {
                    for c in 0..m {
                        let mut acc = ZERO;
                        for l in 0..m {
                            acc += inv[r * m + l] * uj[l * m + c];
                        }
                        bj[r * m + c] = acc;
                    }
                }
                p[j] = (0..m).fold(ZERO, |acc, r| acc + bj[r * m + r]);
                out[j] = det * p[j];
            }
            for j in 0..k {
                let bj = &bm[j * mm..(j + 1) * mm];
                for l in j..k {
                    let bl = &bm[l * mm..(l + 1) * mm];
                    let mut tr = ZERO;
                    for r in 0..m {
                        for c in 0..m {
                            tr += bj[r * m + c] * bl[c * m + r];
                        }
                    }
                    let v = det * (p[j] * p[l] - tr);
                    jac[j * k + l] = v;
                    jac[l * k + j] = v;
                }
            }
        } else {
            let mut adj = [ZERO; MAX_M * MAX_M];
            let mut dadj = [ZERO; MAX_M * MAX_M];
            let mut ul = [ZERO; MAX_M * MAX_M];
            small::adj_cofactor(&a, m, &mut adj);
            for (j, o) in out.iter_mut().enumerate().take(k) {
                *o = inner_re(self.basis(j), &adj[..mm]);
            }
            for l in 0..k {
                for (dst, src) in ul[..mm].iter_mut().zip(self.basis(l)) {
                    *dst = C64::new(*src, 0.0);
                }
                small::adj_derivative_cofactor(&a, &ul, m, &mut dadj);
                for j in 0..k {
                    jac[j * k + l] = inner_re(self.basis(j), &dadj[..mm]);
                }
            }
        }
    }

    fn term_scales(&self, w: &[C64], out: &mut [f64]) {
        let mm = self.m * self.m;
        let mut a = [ZERO; MAX_M * MAX_M];
        let mut adj = [ZERO; MAX_M * MAX_M];
        self.assemble(w, &mut a);
        small::adj_cofactor(&a, self.m, &mut adj);
        let adj_norm = small::max_abs(&adj[..mm]);
        for (j, o) in out.iter_mut().enumerate().take(self.perp.len()) {
            let lin: f64 = self.basis(j).iter().zip(&adj[..mm]).map(|(u, v)| u.abs() * v.norm()).sum();
            *o = lin.max(adj_norm);
        }
    }

    /// Hadamard ratio of `Sigma(w)`.
    fn singular_measure(&self, w: &[C64]) -> Option<f64> {
        let m = self.m;
        let mut a = [ZERO; MAX_M * MAX_M];
        self.assemble(w, &mut a);
        let rows: f64 = (0..m)
            .map(|r| a[r * m..(r + 1) * m].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
            .product();
        Some(small::det(&a, m).norm() / rows)
    }
}
