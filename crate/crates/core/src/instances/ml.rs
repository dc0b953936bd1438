use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::program::{gram_independence, SdpInstance};
use crate::algebra::{small, SymMatrix, ADJ_SINGULAR_THRESHOLD};
use crate::error::{Error, Result};
use crate::homotopy::SquareSystem;
use crate::rng::{Sampler, STREAM_ML};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const MAX_M: usize = small::MAX_DIM;
/// `d + 1 <= m(m+1)/2` for `m <= 8`.
const MAX_UNKNOWNS: usize = MAX_M * (MAX_M + 1) / 2;

/// Which square system [`MlSystem`] presents to the tracker.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MlForm {
    /// `F_0, ..., F_d`, all of degree `m`.
    #[default]
    Adjugate,
    /// `sum_i <K_i, S> z_i - m` followed by `F_i - (<K_i, S> / <K_0, S>) F_0`
    /// for `i >= 1`, of degrees `1, m-1, ..., m-1`. Off the determinantal
    /// locus it has the same zeros as the adjugate form, because
    /// `sum_i z_i F_i = det K(z) (m - sum_i <K_i, S> z_i)`.
    TraceReduced,
}

/// Likelihood equations of the linear concentration model spanned by
/// `K_0 = C, K_1 = A_1, ..., K_d = A_d`, cleared of the inverse:
///
/// `F_i(z) = <K_i, adj K(z)> - det K(z) <K_i, S>`, `K(z) = sum_i z_i K_i`.
///
/// At a zero with `det K(z) != 0`, `Sigma = K(z)^{-1}` satisfies
/// `Sigma K = Id` and `<Sigma - S, K_i> = 0` for every `i`.
#[derive(Clone, Debug)]
pub struct MlSystem {
    pub m: usize,
    pub d: usize,
    pub kbasis: Vec<SymMatrix>,
    pub s: SymMatrix,
    /// Right-hand side of the slice `<C, X> = b_{d+1}`.
    pub b_extra: f64,
    /// `<K_i, S>`: `b_extra` then `b_1..b_d`.
    rhs: Vec<f64>,
    /// Row-major dense copies of `K_i`.
    dense: Vec<f64>,
    form: MlForm,
}

/// Likelihood system of an SDP instance with the slice `B = C` and a random
/// `b_{d+1}` drawn from `seed`.
pub fn build_ml_system(sdp: &SdpInstance, seed: u64) -> Result<MlSystem> {
    build_ml_system_from_parts(&sdp.amats, &sdp.b, &sdp.c, seed)
}

pub fn build_ml_system_from_parts(amats: &[SymMatrix], b: &[f64], c: &SymMatrix, seed: u64) -> Result<MlSystem> {
    let m = c.dim();
    let d = amats.len();
    if d == 0 {
        return Err(Error::InvalidDimensions("the likelihood system needs d >= 1".into()));
    }
    if !(2..=MAX_M).contains(&m) {
        return Err(Error::InvalidDimensions(format!("need 2 <= m <= {MAX_M}, got {m}")));
    }
    if b.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: b.len() });
    }
    if let Some(a) = amats.iter().find(|a| a.dim() != m) {
        return Err(Error::DimensionMismatch { expected: m, got: a.dim() });
    }
    let mut kbasis = vec![c.clone()];
    kbasis.extend(amats.iter().cloned());
    let refs: Vec<&SymMatrix> = kbasis.iter().collect();
    if d + 1 > MAX_UNKNOWNS || gram_independence(&refs) < 1e-12 {
        return Err(Error::DependentBasis);
    }

    let b_extra = Sampler::for_problem(seed, STREAM_ML, m, d).symmetric_unit();
    let mut rhs = vec![b_extra];
    rhs.extend_from_slice(b);

    // minimum-norm S lies in span(K): S = sum alpha_j K_j with G alpha = rhs
    let n = d + 1;
    let gram = DMatrix::from_fn(n, n, |i, j| kbasis[i].inner(&kbasis[j]));
    let alpha = gram
        .cholesky()
        .ok_or(Error::DependentBasis)?
        .solve(&DVector::from_column_slice(&rhs));
    let mut s = SymMatrix::zeros(m);
    for (k, a) in kbasis.iter().zip(alpha.iter()) {
        s.axpy(*a, k);
    }

    let mut dense = Vec::with_capacity(n * m * m);
    for k in &kbasis {
        for i in 0..m {
            for j in 0..m {
                dense.push(k.get(i, j));
            }
        }
    }
    Ok(MlSystem {
        m,
        d,
        kbasis,
        s,
        b_extra,
        rhs,
        dense,
        form: MlForm::Adjugate,
    })
}

fn inner_re(a: &[f64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + y * *x)
}

impl MlSystem {
    pub fn unknowns(&self) -> usize {
        self.d + 1
    }

    pub fn form(&self) -> MlForm {
        self.form
    }

    /// The same model presented in `form`. [`MlForm::TraceReduced`] needs
    /// `b_extra != 0`.
    pub fn with_form(mut self, form: MlForm) -> Result<Self> {
        if form == MlForm::TraceReduced && self.b_extra == 0.0 {
            return Err(Error::Invalid("trace-reduced form needs a nonzero slice value".into()));
        }
        self.form = form;
        Ok(self)
    }

    /// Values of the adjugate-form equations `F_0..F_d`.
    pub fn eval_adjugate(&self, z: &[C64], out: &mut [C64]) {
        let m = self.m;
        let mm = m * m;
        let mut k = [ZERO; MAX_M * MAX_M];
        let mut adj = [ZERO; MAX_M * MAX_M];
        self.assemble(z, &mut k);
        let det = small::invert(&k, m, &mut adj);
        if det.norm() > ADJ_SINGULAR_THRESHOLD * Self::scale_pow(&k, m) {
            for v in &mut adj[..mm] {
                *v *= det;
            }
            self.finish(&adj[..mm], det, out);
        } else {
            small::adj_cofactor(&k, m, &mut adj);
            self.finish(&adj[..mm], small::det(&k, m), out);
        }
    }

    fn basis(&self, i: usize) -> &[f64] {
        let mm = self.m * self.m;
        &self.dense[i * mm..(i + 1) * mm]
    }

    fn assemble(&self, z: &[C64], k: &mut [C64]) {
        let mm = self.m * self.m;
        k[..mm].fill(ZERO);
        for (i, zi) in z.iter().enumerate() {
            for (kv, bv) in k[..mm].iter_mut().zip(self.basis(i)) {
                *kv += zi * *bv;
            }
        }
    }

    fn scale_pow(k: &[C64], m: usize) -> f64 {
        small::max_abs(&k[..m * m]).powi(m as i32)
    }

    /// `K(z)` as a dense complex matrix.
    pub fn concentration(&self, z: &[C64]) -> DMatrix<C64> {
        let m = self.m;
        let mut k = [ZERO; MAX_M * MAX_M];
        self.assemble(z, &mut k);
        DMatrix::from_fn(m, m, |i, j| k[i * m + j])
    }

    /// `Sigma = K(z)^{-1}`, or `None` on the determinantal locus.
    pub fn covariance(&self, z: &[C64]) -> Option<DMatrix<C64>> {
        let k = self.concentration(z);
        let scale = Self::scale_pow(k.as_slice(), self.m);
        let det = k.determinant();
        if !(det.norm() > ADJ_SINGULAR_THRESHOLD * scale) {
            return None;
        }
        k.try_inverse()
    }

    /// `(|Sigma K - Id|, max_i |<Sigma - S, K_i>|)` at `z`, with `Sigma`
    /// from [`MlSystem::covariance`].
    pub fn likelihood_residual(&self, z: &[C64]) -> Option<(f64, f64)> {
        let m = self.m;
        let sigma = self.covariance(z)?;
        let k = self.concentration(z);
        let id = DMatrix::<C64>::identity(m, m);
        let inv_res = (&sigma * &k - id).iter().fold(0.0f64, |a, v| a.max(v.norm()));
        let mut lin_res: f64 = 0.0;
        for (i, r) in self.rhs.iter().enumerate() {
            let kb = self.basis(i);
            let v: C64 = (0..m * m).map(|idx| sigma[(idx / m, idx % m)] * kb[idx]).sum();
            lin_res = lin_res.max((v - r).norm());
        }
        Some((inv_res, lin_res))
    }
}

impl SquareSystem for MlSystem {
    fn dim(&self) -> usize {
        self.d + 1
    }

    fn degrees(&self) -> Vec<u32> {
        match self.form {
            MlForm::Adjugate => vec![self.m as u32; self.d + 1],
            MlForm::TraceReduced => {
                let mut deg = vec![self.m as u32 - 1; self.d + 1];
                deg[0] = 1;
                deg
            }
        }
    }

    fn eval(&self, z: &[C64], out: &mut [C64]) {
        self.eval_adjugate(z, out);
        if self.form == MlForm::TraceReduced {
            self.reduce_values(z, out);
        }
    }

    fn eval_jacobian(&self, z: &[C64], out: &mut [C64], jac: &mut [C64]) {
        self.adjugate_jacobian(z, out, jac);
        if self.form == MlForm::TraceReduced {
            let n = self.d + 1;
            self.reduce_values(z, out);
            for i in 1..n {
                let c = self.rhs[i] / self.rhs[0];
                for j in 0..n {
                    let t = jac[j];
                    jac[i * n + j] -= t * c;
                }
            }
            for (j, r) in self.rhs.iter().enumerate() {
                jac[j] = C64::new(*r, 0.0);
            }
        }
    }

    fn term_scales(&self, z: &[C64], out: &mut [f64]) {
        self.adjugate_scales(z, out);
        if self.form == MlForm::TraceReduced {
            for i in 1..=self.d {
                out[i] += (self.rhs[i] / self.rhs[0]).abs() * out[0];
            }
            out[0] = self.m as f64 + z.iter().zip(&self.rhs).map(|(v, r)| v.norm() * r.abs()).sum::<f64>();
        }
    }

    /// `|det K(z)|` over the product of the row norms of `K(z)` (Hadamard
    /// ratio, in `[0, 1]`).
    fn singular_measure(&self, z: &[C64]) -> Option<f64> {
        let m = self.m;
        let mut k = [ZERO; MAX_M * MAX_M];
        self.assemble(z, &mut k);
        let rows: f64 = (0..m)
            .map(|r| k[r * m..(r + 1) * m].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
            .product();
        Some(small::det(&k, m).norm() / rows)
    }
}

impl MlSystem {
    /// Turns adjugate-form values into trace-reduced values in place.
    fn reduce_values(&self, z: &[C64], out: &mut [C64]) {
        let f0 = out[0];
        for i in 1..=self.d {
            out[i] -= f0 * (self.rhs[i] / self.rhs[0]);
        }
        out[0] = z.iter().zip(&self.rhs).fold(ZERO, |acc, (v, r)| acc + v * *r) - self.m as f64;
    }

    fn adjugate_jacobian(&self, z: &[C64], out: &mut [C64], jac: &mut [C64]) {
        let m = self.m;
        let mm = m * m;
        let n = self.d + 1;
        let mut k = [ZERO; MAX_M * MAX_M];
        let mut inv = [ZERO; MAX_M * MAX_M];
        self.assemble(z, &mut k);
        let det = small::invert(&k, m, &mut inv);

        if det.norm() > ADJ_SINGULAR_THRESHOLD * Self::scale_pow(&k, m) {
            let mut adj = [ZERO; MAX_M * MAX_M];
            for (a, v) in adj[..mm].iter_mut().zip(&inv[..mm]) {
                *a = v * det;
            }
            self.finish(&adj[..mm], det, out);
            // B_j = K^{-1} K_j; d det / dz_j = det tr(B_j) and
            // <K_i, K^{-1} K_j K^{-1}> = tr(B_i B_j)
            let mut bm = [ZERO; MAX_UNKNOWNS * MAX_M * MAX_M];
            let mut p = [ZERO; MAX_UNKNOWNS];
            for j in 0..n {
                let kj = self.basis(j);
                let bj = &mut bm[j * mm..(j + 1) * mm];
                for r in 0..m {
                    for c in 0..m {
                        let mut acc = ZERO;
                        for l in 0..m {
                            acc += inv[r * m + l] * kj[l * m + c];
                        }
                        bj[r * m + c] = acc;
                    }
                }
                p[j] = (0..m).fold(ZERO, |acc, r| acc + bj[r * m + r]);
            }
            for i in 0..n {
                let bi = &bm[i * mm..(i + 1) * mm];
                for j in i..n {
                    let bj = &bm[j * mm..(j + 1) * mm];
                    let mut tr = ZERO;
                    for r in 0..m {
                        for c in 0..m {
                            tr += bi[r * m + c] * bj[c * m + r];
                        }
                    }
                    jac[i * n + j] = det * (p[j] * p[i] - tr - p[j] * self.rhs[i]);
                    if j != i {
                        jac[j * n + i] = det * (p[i] * p[j] - tr - p[i] * self.rhs[j]);
                    }
                }
            }
        } else {
            let mut adj = [ZERO; MAX_M * MAX_M];
            let mut dadj = [ZERO; MAX_M * MAX_M];
            let mut kj = [ZERO; MAX_M * MAX_M];
            small::adj_cofactor(&k, m, &mut adj);
            let det = small::det(&k, m);
            self.finish(&adj[..mm], det, out);
            for j in 0..n {
                for (dst, src) in kj[..mm].iter_mut().zip(self.basis(j)) {
                    *dst = C64::new(*src, 0.0);
                }
                small::adj_derivative_cofactor(&k, &kj, m, &mut dadj);
                // d det / dz_j = tr(adj K_j)
                let ddet = inner_re(self.basis(j), &adj[..mm]);
                for i in 0..n {
                    jac[i * n + j] = inner_re(self.basis(i), &dadj[..mm]) - ddet * self.rhs[i];
                }
            }
        }
    }

}

impl MlSystem {
    fn adjugate_scales(&self, z: &[C64], out: &mut [f64]) {
        let m = self.m;
        let mm = m * m;
        let mut k = [ZERO; MAX_M * MAX_M];
        let mut adj = [ZERO; MAX_M * MAX_M];
        self.assemble(z, &mut k);
        small::adj_cofactor(&k, m, &mut adj);
        let det = small::det(&k, m).norm();
        for (i, o) in out.iter_mut().enumerate().take(self.d + 1) {
            let lin: f64 = self.basis(i).iter().zip(&adj[..mm]).map(|(a, b)| a.abs() * b.norm()).sum();
            *o = lin + det * self.rhs[i].abs();
        }
    }


    fn finish(&self, adj: &[C64], det: C64, out: &mut [C64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.d + 1) {
            *o = inner_re(self.basis(i), adj) - det * self.rhs[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::system_jacobian;
    use crate::instances::random_sdp;

    fn random_z(n: usize, seed: u64) -> Vec<C64> {
        let mut s = Sampler::new(seed, 99);
        (0..n).map(|_| C64::new(s.symmetric_unit(), s.symmetric_unit())).collect()
    }

    #[test]
    fn origin_is_always_a_zero() {
        for (m, d) in [(2, 1), (3, 2), (4, 3)] {
            let ml = build_ml_system(&random_sdp(m, d, 1).unwrap(), 1).unwrap();
            let mut f = vec![C64::new(1.0, 0.0); d + 1];
            ml.eval(&vec![ZERO; d + 1], &mut f);
            assert!(f.iter().all(|v| *v == ZERO));
        }
    }

    #[test]
    fn s_solves_the_linear_conditions() {
        let sdp = random_sdp(4, 3, 2).unwrap();
        let ml = build_ml_system(&sdp, 2).unwrap();
        assert!((ml.s.inner(&sdp.c) - ml.b_extra).abs() < 1e-12);
        for (a, b) in sdp.amats.iter().zip(&sdp.b) {
            assert!((ml.s.inner(a) - b).abs() < 1e-12);
        }
    }

    #[test]
    fn equations_measure_the_likelihood_defect() {
        // <Sigma - S, K_i> = F_i / det with Sigma = K^{-1}, computed through nalgebra
        let sdp = random_sdp(4, 3, 5).unwrap();
        let ml = build_ml_system(&sdp, 5).unwrap();
        let z = random_z(4, 1);
        let k = ml.concentration(&z);
        let det = k.determinant();
        let sigma = k.try_inverse().unwrap();
        let mut f = vec![ZERO; 4];
        ml.eval(&z, &mut f);
        for (i, ki) in ml.kbasis.iter().enumerate() {
            let mut lhs = ZERO;
            for r in 0..4 {
                for c in 0..4 {
                    lhs += (sigma[(r, c)] - ml.s.get(r, c)) * ki.get(r, c);
                }
            }
            assert!((lhs - f[i] / det).norm() < 1e-10 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let cases = [(3, 2, 3), (4, 3, 4), (2, 1, 6)];
        for ((m, d, seed), form) in cases.into_iter().flat_map(|c| [(c, MlForm::Adjugate), (c, MlForm::TraceReduced)]) {
            let ml = build_ml_system(&random_sdp(m, d, seed).unwrap(), seed)
                .unwrap()
                .with_form(form)
                .unwrap();
            let n = d + 1;
            let z = random_z(n, seed);
            let jac = system_jacobian(&ml, &z).unwrap();
            let h = 1e-7;
            for j in 0..n {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[j] += h;
                zm[j] -= h;
                let mut fp = vec![ZERO; n];
                let mut fm = vec![ZERO; n];
                ml.eval(&zp, &mut fp);
                ml.eval(&zm, &mut fm);
                for i in 0..n {
                    let fd = (fp[i] - fm[i]) / (2.0 * h);
                    assert!((fd - jac[(i, j)]).norm() < 1e-6 * (1.0 + fd.norm()), "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn cofactor_branch_agrees_with_inverse_branch() {
        // near-singular K: compare the two Jacobian routes on a singular matrix pencil
        let ml = build_ml_system(&random_sdp(3, 2, 8).unwrap(), 8).unwrap();
        let n = 3;
        let z = random_z(n, 8);
        let mut f1 = vec![ZERO; n];
        let mut j1 = vec![ZERO; n * n];
        ml.eval_jacobian(&z, &mut f1, &mut j1);
        // force the cofactor route by evaluating its pieces directly
        let m = 3;
        let mut k = [ZERO; MAX_M * MAX_M];
        ml.assemble(&z, &mut k);
        let mut adj = [ZERO; MAX_M * MAX_M];
        let mut dadj = [ZERO; MAX_M * MAX_M];
        small::adj_cofactor(&k, m, &mut adj);
        for j in 0..n {
            let kj: Vec<C64> = ml.basis(j).iter().map(|v| C64::new(*v, 0.0)).collect();
            small::adj_derivative_cofactor(&k, &kj, m, &mut dadj);
            let ddet = inner_re(ml.basis(j), &adj[..9]);
            for i in 0..n {
                let v = inner_re(ml.basis(i), &dadj[..9]) - ddet * ml.rhs[i];
                assert!((v - j1[i * n + j]).norm() < 1e-10 * (1.0 + v.norm()));
            }
        }
    }

    #[test]
    fn trace_identity_links_the_two_forms() {
        // sum_i z_i F_i = det K (m - sum_i <K_i, S> z_i)
        let ml = build_ml_system(&random_sdp(4, 2, 9).unwrap(), 9).unwrap();
        let z = random_z(3, 9);
        let mut f = vec![ZERO; 3];
        ml.eval(&z, &mut f);
        let lhs: C64 = z.iter().zip(&f).map(|(a, b)| a * b).sum();
        let lin: C64 = z.iter().zip(&ml.rhs).map(|(a, r)| a * *r).sum();
        let rhs = ml.concentration(&z).determinant() * (C64::new(4.0, 0.0) - lin);
        assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));

        let reduced = ml.clone().with_form(MlForm::TraceReduced).unwrap();
        assert_eq!(reduced.degrees(), vec![1, 3, 3]);
        assert_eq!(ml.degrees(), vec![4, 4, 4]);
    }

    #[test]
    fn degenerate_dimensions_rejected() {
        let c = SymMatrix::identity(2);
        assert!(build_ml_system_from_parts(&[], &[], &c, 1).is_err());
        let dependent = vec![c.scaled(2.0)];
        assert!(matches!(
            build_ml_system_from_parts(&dependent, &[1.0], &c, 1),
            Err(Error::DependentBasis)
        ));
    }

    #[test]
    fn singular_measure_vanishes_at_origin_only_in_the_limit() {
        let ml = build_ml_system(&random_sdp(3, 1, 1).unwrap(), 1).unwrap();
        let at_origin = ml.singular_measure(&[ZERO, ZERO]).unwrap();
        assert!(!(at_origin > 1e-8));
        let away = ml.singular_measure(&random_z(2, 3)).unwrap();
        assert!(away > 0.0 && away <= 1.0 + 1e-12);
    }
}
