use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::SquareSystem;

/// Exponent vector, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn eval(&self, point: &[C64]) -> C64 {
        self.0
            .iter()
            .zip(point)
            .filter(|(e, _)| **e > 0)
            .fold(C64::new(1.0, 0.0), |acc, (e, x)| acc * x.powu(*e))
    }
}

/// Sparse multivariate polynomial with complex coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, C64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: impl Into<C64>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c.into());
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, i), C64::new(1.0, 0.0));
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C64)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * mono`, merging with an existing term and dropping the result
    /// if it cancels to exactly zero.
    pub fn add_term(&mut self, mono: Monomial, c: C64) {
        assert_eq!(mono.nvars(), self.nvars, "monomial arity");
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == C64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &Monomial) -> C64 {
        self.terms.get(mono).copied().unwrap_or_default()
    }

    pub fn support(&self) -> Vec<Monomial> {
        self.terms.keys().cloned().collect()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: C64) -> Poly {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(m, v)| (m.clone(), v * c)))
    }

    /// Sum of the terms evaluated at `point`.
    pub fn eval(&self, point: &[C64]) -> Result<C64> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        Ok(self.terms.iter().map(|(m, c)| c * m.eval(point)).sum())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
struct CompiledTerm {
    coeff: C64,
    factors: Vec<(usize, u32)>,
}

/// Square system of sparse polynomials, precompiled for repeated evaluation.
#[derive(Clone, Debug)]
pub struct PolySystem {
    polys: Vec<Poly>,
    compiled: Vec<Vec<CompiledTerm>>,
    degrees: Vec<u32>,
}

impl PolySystem {
    pub fn new(polys: Vec<Poly>) -> Result<Self> {
        let n = polys.len();
        if let Some(p) = polys.iter().find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.nvars(),
            });
        }
        let compiled = polys
            .iter()
            .map(|p| {
                p.terms()
                    .map(|(m, c)| CompiledTerm {
                        coeff: *c,
                        factors: m
                            .exponents()
                            .iter()
                            .enumerate()
                            .filter(|(_, e)| **e > 0)
                            .map(|(v, e)| (v, *e))
                            .collect(),
                    })
                    .collect()
            })
            .collect();
        let degrees = polys.iter().map(|p| p.degree().max(1)).collect();
        Ok(Self {
            polys,
            compiled,
            degrees,
        })
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }
}

impl SquareSystem for PolySystem {
    fn dim(&self) -> usize {
        self.polys.len()
    }

    fn degrees(&self) -> Vec<u32> {
        self.degrees.clone()
    }

    fn eval(&self, z: &[C64], out: &mut [C64]) {
        for (i, terms) in self.compiled.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for t in terms {
                let mut v = t.coeff;
                for &(var, e) in &t.factors {
                    v *= z[var].powu(e);
                }
                acc += v;
            }
            out[i] = acc;
        }
    }

    fn eval_jacobian(&self, z: &[C64], out: &mut [C64], jac: &mut [C64]) {
        let n = self.polys.len();
        jac[..n * n].fill(C64::new(0.0, 0.0));
        for (i, terms) in self.compiled.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for t in terms {
                let mut v = t.coeff;
                for &(var, e) in &t.factors {
                    v *= z[var].powu(e);
                }
                acc += v;
                for (k, &(var, e)) in t.factors.iter().enumerate() {
                    let mut d = t.coeff * (e as f64) * z[var].powu(e - 1);
                    for (l, &(w, f)) in t.factors.iter().enumerate() {
                        if l != k {
                            d *= z[w].powu(f);
                        }
                    }
                    jac[i * n + var] += d;
                }
            }
            out[i] = acc;
        }
    }

    fn term_scales(&self, z: &[C64], out: &mut [f64]) {
        for (i, terms) in self.compiled.iter().enumerate() {
            out[i] = terms
                .iter()
                .map(|t| {
                    t.factors
                        .iter()
                        .fold(t.coeff.norm(), |acc, &(v, e)| acc * z[v].norm().powi(e as i32))
                })
                .sum();
        }
    }
}

/// Jacobian of a square system at `point`.
pub fn system_jacobian<S: SquareSystem + ?Sized>(sys: &S, point: &[C64]) -> Result<DMatrix<C64>> {
    let n = sys.dim();
    if point.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: point.len(),
        });
    }
    let mut f = vec![C64::new(0.0, 0.0); n];
    let mut jac = vec![C64::new(0.0, 0.0); n * n];
    sys.eval_jacobian(point, &mut f, &mut jac);
    Ok(DMatrix::from_row_slice(n, n, &jac))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Sampler;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_poly(nvars: usize, max_deg: u32, nterms: usize, s: &mut Sampler) -> Poly {
        let mut p = Poly::zero(nvars);
        for _ in 0..nterms {
            let mut e = vec![0u32; nvars];
            let mut budget = (s.uniform(0.0, max_deg as f64 + 0.999)) as u32;
            while budget > 0 {
                let v = (s.uniform(0.0, nvars as f64 - 1e-9)) as usize;
                e[v] += 1;
                budget -= 1;
            }
            p.add_term(Monomial::new(e), C64::new(s.symmetric_unit(), s.symmetric_unit()));
        }
        p
    }

    fn random_point(n: usize, s: &mut Sampler) -> Vec<C64> {
        (0..n).map(|_| C64::new(s.symmetric_unit(), s.symmetric_unit())).collect()
    }

    // independent evaluator: expands powers by repeated multiplication
    fn naive_eval(p: &Poly, x: &[C64]) -> C64 {
        let mut acc = c(0.0);
        for (m, coeff) in p.terms() {
            let mut v = *coeff;
            for (i, e) in m.exponents().iter().enumerate() {
                for _ in 0..*e {
                    v *= x[i];
                }
            }
            acc += v;
        }
        acc
    }

    #[test]
    fn eval_small_examples() {
        let x0 = Poly::var(2, 0);
        let x1 = Poly::var(2, 1);
        let p = &(&x0 * &x1) - &Poly::constant(2, 1.0);
        assert_eq!(p.eval(&[c(2.0), c(3.0)]).unwrap(), c(5.0));
        assert_eq!(p.eval(&[c(0.0), c(0.0)]).unwrap(), c(-1.0));
        assert!(matches!(
            p.eval(&[c(1.0)]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn eval_matches_naive_on_random_quadratics() {
        let mut s = Sampler::new(11, 1);
        for _ in 0..50 {
            let p = random_poly(4, 2, 8, &mut s);
            let x = random_point(4, &mut s);
            let a = p.eval(&x).unwrap();
            let b = naive_eval(&p, &x);
            assert!((a - b).norm() < 1e-13 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn cancellation_drops_terms() {
        let x = Poly::var(1, 0);
        let p = &x - &x;
        assert!(p.is_empty());
    }

    #[test]
    fn jacobian_examples() {
        let x0 = Poly::var(2, 0);
        let x1 = Poly::var(2, 1);
        let sys = PolySystem::new(vec![&x0 * &x0, x1.clone()]).unwrap();
        let j = system_jacobian(&sys, &[c(3.0), c(5.0)]).unwrap();
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[c(6.0), c(0.0), c(0.0), c(1.0)]));

        let lin = PolySystem::new(vec![
            &(&x0.scale(c(2.0)) + &x1) + &Poly::constant(2, 4.0),
            &x0 - &x1.scale(c(3.0)),
        ])
        .unwrap();
        let j1 = system_jacobian(&lin, &[c(0.1), c(-7.0)]).unwrap();
        let j2 = system_jacobian(&lin, &[c(10.0), c(2.5)]).unwrap();
        assert_eq!(j1, j2);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let mut s = Sampler::new(5, 2);
        for _ in 0..10 {
            let n = 3;
            let polys = (0..n).map(|_| random_poly(n, 4, 6, &mut s)).collect();
            let sys = PolySystem::new(polys).unwrap();
            let x = random_point(n, &mut s);
            let j = system_jacobian(&sys, &x).unwrap();
            let h = 1e-7;
            for v in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[v] += h;
                xm[v] -= h;
                let mut fp = vec![c(0.0); n];
                let mut fm = vec![c(0.0); n];
                sys.eval(&xp, &mut fp);
                sys.eval(&xm, &mut fm);
                for i in 0..n {
                    let fd = (fp[i] - fm[i]) / c(2.0 * h);
                    let scale = j[(i, v)].norm().max(1.0);
                    assert!((fd - j[(i, v)]).norm() / scale < 1e-6, "{fd} vs {}", j[(i, v)]);
                }
            }
        }
    }

    #[test]
    fn non_square_system_rejected() {
        let p = Poly::var(3, 0);
        assert!(PolySystem::new(vec![p.clone(), p]).is_err());
    }

    proptest! {
        #[test]
        fn eval_is_linear_in_scalar(seed in 0u64..1000, re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let mut s = Sampler::new(seed, 3);
            let p = random_poly(3, 3, 6, &mut s);
            let x = random_point(3, &mut s);
            let k = C64::new(re, im);
            let lhs = p.scale(k).eval(&x).unwrap();
            let rhs = k * p.eval(&x).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }
}
