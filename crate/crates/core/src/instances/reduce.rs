use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::program::{numerical_rank, ClearedKkt, LpInstance, QpInstance};
use crate::algebra::{Monomial, Poly, PolySystem};
use crate::error::{Error, Result};
use crate::homotopy::SquareSystem;
use crate::rng::{Sampler, STREAM_BASIS, STREAM_SLICE};

/// Generic hyperplane `e x = f` cutting the central curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub e: Vec<f64>,
    pub f: f64,
}

pub fn random_slice(m: usize, seed: u64) -> SliceSpec {
    let mut s = Sampler::for_problem(seed, STREAM_SLICE, m, 0);
    let e = s.vec(m, -1.0, 1.0);
    let f = s.symmetric_unit();
    SliceSpec { e, f }
}

/// Cleared KKT equations restricted to `{A x = b, e x = f}`.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub m: usize,
    pub d: usize,
    pub system: PolySystem,
    /// `v_0` (a particular solution) followed by an orthonormal basis
    /// `v_1..v_{m-d-1}` of the null space of `[A; e]`.
    pub basis: Vec<Vec<f64>>,
    pub degrees: Vec<u32>,
    a: DMatrix<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    q: Option<Vec<f64>>,
    slice: SliceSpec,
}

impl ReducedSystem {
    pub fn lambda_index(&self) -> usize {
        0
    }

    pub fn y_index(&self, i: usize) -> usize {
        1 + i
    }

    pub fn t_index(&self, j: usize) -> usize {
        1 + self.d + j
    }

    pub fn polys(&self) -> &[Poly] {
        self.system.polys()
    }

    /// Union of the supports of all equations, as exponent vectors.
    pub fn support(&self) -> Vec<Vec<u32>> {
        let mut all: Vec<Vec<u32>> = self
            .polys()
            .iter()
            .flat_map(|p| p.support().into_iter().map(|m| m.exponents().to_vec()))
            .collect();
        all.sort();
        all.dedup();
        all
    }

    /// `x = v_0 + sum_j t_j v_j`.
    pub fn primal(&self, sol: &[C64]) -> Vec<C64> {
        let k = self.m - self.d - 1;
        (0..self.m)
            .map(|i| {
                let mut x = C64::new(self.basis[0][i], 0.0);
                for j in 0..k {
                    x += sol[self.t_index(j)] * self.basis[j + 1][i];
                }
                x
            })
            .collect()
    }

    /// `(x, y, lambda)` for a solution of the reduced system.
    pub fn lift(&self, sol: &[C64]) -> (Vec<C64>, Vec<C64>, C64) {
        let x = self.primal(sol);
        let y = (0..self.d).map(|i| sol[self.y_index(i)]).collect();
        (x, y, sol[self.lambda_index()])
    }

    /// Largest relative residual of the unreduced system
    /// (cleared KKT equations, `A x = b`, `e x = f`) at a reduced solution.
    pub fn unreduced_residual(&self, sol: &[C64]) -> f64 {
        let (x, y, lambda) = self.lift(sol);
        let mut worst: f64 = 0.0;
        for i in 0..self.m {
            let ay: C64 = (0..self.d).map(|k| y[k] * self.a[(k, i)]).sum();
            let quad = self.q.as_ref().map_or(C64::new(0.0, 0.0), |q| x[i] * x[i] * q[i]);
            let terms = [x[i] * self.c[i], -lambda, -(ay * x[i]), quad];
            let scale: f64 = terms.iter().map(|t| t.norm()).sum();
            let r: C64 = terms.iter().sum();
            worst = worst.max(r.norm() / scale.max(1e-300));
        }
        for k in 0..self.d {
            let terms: Vec<C64> = (0..self.m).map(|i| x[i] * self.a[(k, i)]).collect();
            let scale = terms.iter().map(|t| t.norm()).sum::<f64>() + self.b[k].abs();
            let r = terms.iter().sum::<C64>() - self.b[k];
            worst = worst.max(r.norm() / scale.max(1e-300));
        }
        let terms: Vec<C64> = (0..self.m).map(|i| x[i] * self.slice.e[i]).collect();
        let scale = terms.iter().map(|t| t.norm()).sum::<f64>() + self.slice.f.abs();
        let r = terms.iter().sum::<C64>() - self.slice.f;
        worst.max(r.norm() / scale.max(1e-300))
    }
}

/// Delegates to the polynomial system. The singular measure is the smallest
/// `|x_i|` relative to the largest, so endpoints with a vanishing primal
/// coordinate leave the torus and are filtered.
impl SquareSystem for ReducedSystem {
    fn dim(&self) -> usize {
        self.m
    }

    fn degrees(&self) -> Vec<u32> {
        self.degrees.clone()
    }

    fn eval(&self, z: &[C64], out: &mut [C64]) {
        self.system.eval(z, out)
    }

    fn eval_jacobian(&self, z: &[C64], out: &mut [C64], jac: &mut [C64]) {
        self.system.eval_jacobian(z, out, jac)
    }

    fn term_scales(&self, z: &[C64], out: &mut [f64]) {
        self.system.term_scales(z, out)
    }

    fn singular_measure(&self, z: &[C64]) -> Option<f64> {
        let x = self.primal(z);
        let lo = x.iter().fold(f64::INFINITY, |a, v| a.min(v.norm()));
        let hi = x.iter().fold(1.0f64, |a, v| a.max(v.norm()));
        Some(lo / hi)
    }
}

/// Orthonormal basis of the null space of `mat` (full row rank) by
/// projecting `m` fixed pseudo-random vectors and running Gram-Schmidt,
/// always taking the remaining candidate of largest norm (lowest index on
/// ties). Projected unit vectors would leave exact zeros in the basis.
fn null_space_basis(mat: &DMatrix<f64>, mmt_inv: &DMatrix<f64>, k: usize) -> Vec<Vec<f64>> {
    let m = mat.ncols();
    // P = I - M^T (M M^T)^{-1} M
    let proj = DMatrix::<f64>::identity(m, m) - mat.transpose() * mmt_inv * mat;
    let mut s = Sampler::for_problem(0, STREAM_BASIS, m, k);
    let mut cands: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let u = DVector::from_vec(s.vec(m, -1.0, 1.0));
            (&proj * u).iter().copied().collect()
        })
        .collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut used = vec![false; m];
    for _ in 0..k {
        let mut best = None;
        let mut best_norm = -1.0;
        for (j, v) in cands.iter().enumerate() {
            if used[j] {
                continue;
            }
            let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nrm > best_norm {
                best_norm = nrm;
                best = Some(j);
            }
        }
        let j = best.expect("null space dimension");
        used[j] = true;
        let q: Vec<f64> = cands[j].iter().map(|x| x / best_norm).collect();
        for (l, v) in cands.iter_mut().enumerate() {
            if used[l] {
                continue;
            }
            let dot: f64 = v.iter().zip(&q).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(&q) {
                *vi -= dot * qi;
            }
        }
        basis.push(q);
    }
    basis
}

fn reduce<P: ClearedKkt>(prog: &P, slice: &SliceSpec) -> Result<ReducedSystem> {
    let a = prog.constraint_matrix();
    let (d, m) = (a.nrows(), a.ncols());
    if slice.e.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: slice.e.len(),
        });
    }
    let mut mat = DMatrix::zeros(d + 1, m);
    mat.view_mut((0, 0), (d, m)).copy_from(a);
    for i in 0..m {
        mat[(d, i)] = slice.e[i];
    }
    if numerical_rank(&mat) != d + 1 {
        return Err(Error::RankDeficient(format!("[A; e] must have rank {}", d + 1)));
    }
    let mmt_inv = (&mat * mat.transpose())
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient("[A; e] [A; e]^T is singular".into()))?;
    let mut rhs = DVector::from_column_slice(prog.rhs());
    rhs = rhs.push(slice.f);
    let v0 = mat.transpose() * (&mmt_inv * rhs);
    let k = m - d - 1;
    let mut basis = vec![v0.iter().copied().collect::<Vec<f64>>()];
    basis.extend(null_space_basis(&mat, &mmt_inv, k));

    let nvars = m;
    let lam = Poly::var(nvars, 0);
    let c = prog.cost();
    let q = prog.quadratic();
    let polys = (0..m)
        .map(|i| {
            let mut x = Poly::constant(nvars, basis[0][i]);
            for j in 0..k {
                x.add_term(Monomial::var(nvars, 1 + d + j), C64::new(basis[j + 1][i], 0.0));
            }
            let mut ay = Poly::zero(nvars);
            for r in 0..d {
                ay.add_term(Monomial::var(nvars, 1 + r), C64::new(a[(r, i)], 0.0));
            }
            let lin = &Poly::constant(nvars, c[i]) - &ay;
            let mut eq = &(&lin * &x) - &lam;
            if let Some(q) = q {
                eq = &eq + &(&x * &x).scale(C64::new(q[i], 0.0));
            }
            eq
        })
        .collect();
    let system = PolySystem::new(polys)?;
    let degrees = system.degrees();
    Ok(ReducedSystem {
        m,
        d,
        system,
        basis,
        degrees,
        a: a.clone(),
        b: prog.rhs().to_vec(),
        c: c.to_vec(),
        q: q.map(<[f64]>::to_vec),
        slice: slice.clone(),
    })
}

/// Cleared LP KKT system sliced by `e x = f`, in `(lambda, y, t)`.
pub fn reduce_lp(lp: &LpInstance, slice: &SliceSpec) -> Result<ReducedSystem> {
    reduce(lp, slice)
}

/// Cleared QP KKT system sliced by `e x = f`, in `(lambda, y, t)`.
pub fn reduce_qp(qp: &QpInstance, slice: &SliceSpec) -> Result<ReducedSystem> {
    reduce(qp, slice)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualLift {
    pub y: Vec<C64>,
    pub lambda: C64,
    pub residual: f64,
}

/// Recovers the unique `(y, lambda)` over a point `x` of the central curve
/// by least squares on the cleared KKT equations. When `slice` is given the
/// residual of `e x = f` is included.
pub fn lift_duals<P: ClearedKkt>(x: &[C64], prog: &P, slice: Option<&SliceSpec>) -> Result<DualLift> {
    let a = prog.constraint_matrix();
    let (d, m) = (a.nrows(), a.ncols());
    if x.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: x.len() });
    }
    if x.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::Invalid("lift_duals needs every x_i nonzero".into()));
    }
    let c = prog.cost();
    let q = prog.quadratic();
    // lambda + sum_k A_ki x_i y_k = c_i x_i + q_i x_i^2
    let mut lhs = DMatrix::<C64>::zeros(m, d + 1);
    let mut rhs = DVector::<C64>::zeros(m);
    let mut scale: f64 = 1.0;
    for i in 0..m {
        lhs[(i, 0)] = C64::new(1.0, 0.0);
        for k in 0..d {
            lhs[(i, 1 + k)] = x[i] * a[(k, i)];
        }
        let quad = q.map_or(C64::new(0.0, 0.0), |q| x[i] * x[i] * q[i]);
        rhs[i] = x[i] * c[i] + quad;
        scale = scale.max(rhs[i].norm());
    }
    let svd = lhs.clone().svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Invalid(format!("least squares failed: {e}")))?;
    let r = &lhs * &sol - &rhs;
    let mut residual = r.iter().fold(0.0f64, |mx, v| mx.max(v.norm())) / scale;
    if let Some(s) = slice {
        let ex: C64 = x.iter().zip(&s.e).map(|(xi, ei)| xi * ei).sum();
        let sc = x.iter().zip(&s.e).map(|(xi, ei)| xi.norm() * ei.abs()).sum::<f64>() + s.f.abs();
        residual = residual.max((ex - s.f).norm() / sc.max(1e-300));
    }
    if residual > 1e-6 {
        return Err(Error::OffCurve { residual });
    }
    Ok(DualLift {
        lambda: sol[0],
        y: sol.iter().skip(1).copied().collect(),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{random_lp, random_qp};

    fn lp_support_allowed(e: &[u32], d: usize) -> bool {
        // lambda, 1, t_j, y_i, y_i t_j
        let lam = e[0];
        let ydeg: u32 = e[1..=d].iter().sum();
        let tdeg: u32 = e[d + 1..].iter().sum();
        (lam == 1 && ydeg == 0 && tdeg == 0) || (lam == 0 && ydeg <= 1 && tdeg <= 1)
    }

    #[test]
    fn lp_three_one_structure() {
        let lp = random_lp(3, 1, 1).unwrap();
        let red = reduce_lp(&lp, &random_slice(3, 1)).unwrap();
        assert_eq!(red.polys().len(), 3);
        assert!(red.polys().iter().all(|p| p.nvars() == 3 && p.degree() == 2));
        assert_eq!(red.degrees, vec![2, 2, 2]);
    }

    #[test]
    fn lp_supports_are_within_the_pyramid() {
        for (m, d) in [(4, 1), (5, 2), (6, 3), (6, 1)] {
            let lp = random_lp(m, d, 3).unwrap();
            let red = reduce_lp(&lp, &random_slice(m, 3)).unwrap();
            for p in red.polys() {
                for mono in p.support() {
                    assert!(lp_support_allowed(mono.exponents(), d), "{:?}", mono);
                }
                // generic coefficients: full support (d+1)(m-d) + 1 monomials
                assert_eq!(p.len(), (d + 1) * (m - d) + 1);
            }
        }
    }

    #[test]
    fn qp_support_contains_squares_of_t() {
        let qp = random_qp(3, 1, 1).unwrap();
        let red = reduce_qp(&qp, &random_slice(3, 1)).unwrap();
        let t1_sq = Monomial::new(vec![0, 0, 2]);
        for p in red.polys() {
            assert_ne!(p.coeff(&t1_sq), C64::new(0.0, 0.0));
            assert_eq!(p.degree(), 2);
        }
    }

    #[test]
    fn basis_is_orthonormal_and_in_null_space() {
        let lp = random_lp(7, 3, 2).unwrap();
        let slice = random_slice(7, 2);
        let red = reduce_lp(&lp, &slice).unwrap();
        let k = red.basis.len() - 1;
        assert_eq!(k, 3);
        for i in 1..=k {
            for j in 1..=k {
                let dot: f64 = red.basis[i].iter().zip(&red.basis[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
            for r in 0..3 {
                let v: f64 = (0..7).map(|c| lp.a[(r, c)] * red.basis[i][c]).sum();
                assert!(v.abs() < 1e-12);
            }
            let v: f64 = (0..7).map(|c| slice.e[c] * red.basis[i][c]).sum();
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_slice_rejected() {
        let lp = random_lp(4, 2, 1).unwrap();
        let e: Vec<f64> = (0..4).map(|c| lp.a[(0, c)] * 2.0).collect();
        let slice = SliceSpec { e, f: 0.3 };
        assert!(matches!(reduce_lp(&lp, &slice), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn lift_rejects_random_points_and_is_deterministic() {
        let lp = random_lp(5, 2, 4).unwrap();
        let x: Vec<C64> = vec![0.3, -1.2, 0.7, 2.0, 0.9].into_iter().map(|v| C64::new(v, 0.1)).collect();
        assert!(matches!(lift_duals(&x, &lp, None), Err(Error::OffCurve { .. })));
        let zero = vec![C64::new(0.0, 0.0); 5];
        assert!(lift_duals(&zero, &lp, None).is_err());
    }

    #[test]
    fn lift_recovers_manufactured_duals() {
        // pick x, y, lambda; choose c so that the KKT equations hold
        let mut lp = random_lp(5, 2, 8).unwrap();
        let x = [0.7, 1.1, 0.4, 1.3, 0.9];
        let y = [0.25, -0.5];
        let lambda = 0.125;
        for i in 0..5 {
            let ay = lp.a[(0, i)] * y[0] + lp.a[(1, i)] * y[1];
            lp.c[i] = lambda / x[i] + ay;
        }
        let xs: Vec<C64> = x.iter().map(|v| C64::new(*v, 0.0)).collect();
        let l1 = lift_duals(&xs, &lp, None).unwrap();
        let l2 = lift_duals(&xs, &lp, None).unwrap();
        assert_eq!(l1, l2);
        assert!((l1.lambda.re - lambda).abs() < 1e-12);
        assert!((l1.y[0].re - y[0]).abs() < 1e-12 && (l1.y[1].re - y[1]).abs() < 1e-12);
        assert!(l1.residual < 1e-12);
    }
}
