//! Gram-matrix programs of forms: `p = [x]^T Q [x]` with `[x]` the
//! monomials of degree `D`, one linear constraint per monomial of degree
//! `2D`, and the degree of their central curves.

use serde::{Deserialize, Serialize};

use crate::algebra::{binomial_u64, SymMatrix};
use crate::error::{Error, Result};
use crate::homotopy::{CountReport, TrackerConfig};
use crate::instances::{build_ml_system_from_parts, ml_degree};
use crate::rng::{Sampler, STREAM_SOS};

/// Bezout paths per seed above which [`sos_degree`] refuses to run.
pub const PATH_BUDGET: u128 = 1 << 17;

/// Monomials of degree `D` in `n` variables, graded lexicographic with
/// `x_1 > x_2 > ...` (for `n = 3, D = 2`: `x^2, xy, xz, y^2, yz, z^2`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialBasis {
    pub n: usize,
    pub degree: usize,
    pub monos: Vec<Vec<u32>>,
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn position(&self, mono: &[u32]) -> Option<usize> {
        self.monos.iter().position(|m| m == mono)
    }
}

pub fn monomials(n: usize, degree: usize) -> Result<MonomialBasis> {
    if n == 0 || degree == 0 {
        return Err(Error::InvalidDimensions(format!("need n >= 1 and D >= 1, got n={n}, D={degree}")));
    }
    fn fill(rest: usize, i: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = rest as u32;
            out.push(cur.clone());
            return;
        }
        for e in (0..=rest).rev() {
            cur[i] = e as u32;
            fill(rest - e, i + 1, cur, out);
        }
    }
    let mut monos = Vec::new();
    fill(degree, 0, &mut vec![0; n], &mut monos);
    Ok(MonomialBasis { n, degree, monos })
}

/// One 0/1 symmetric matrix per monomial `alpha` of degree `2D`, in the order
/// of `monomials(n, 2D)`: `(A_alpha)_{beta, gamma} = 1` iff
/// `beta + gamma = alpha`, so `<A_alpha, Q>` is the coefficient of
/// `x^alpha` in `[x]^T Q [x]`.
pub fn gram_constraints(n: usize, degree: usize) -> Result<Vec<SymMatrix>> {
    let basis = monomials(n, degree)?;
    let alphas = monomials(n, 2 * degree)?;
    let m = basis.len();
    Ok(alphas
        .monos
        .iter()
        .map(|alpha| {
            SymMatrix::from_fn(m, |i, j| {
                let hit = basis.monos[i]
                    .iter()
                    .zip(&basis.monos[j])
                    .zip(alpha)
                    .all(|((b, g), a)| b + g == *a);
                if hit {
                    1.0
                } else {
                    0.0
                }
            })
        })
        .collect())
}

/// Sizes `(m, d)` of the Gram program for forms of degree `2D` in `n`
/// variables.
pub fn sos_dims(n: usize, degree: usize) -> Result<(usize, usize)> {
    if n == 0 || degree == 0 {
        return Err(Error::InvalidDimensions(format!("need n >= 1 and D >= 1, got n={n}, D={degree}")));
    }
    let m = binomial_u64((n + degree - 1) as i64, degree as i64) as usize;
    let d = binomial_u64((n + 2 * degree - 1) as i64, (2 * degree) as i64) as usize;
    Ok((m, d))
}

/// Known central-curve degrees of Gram programs, keyed by `(n, 2D)`.
pub fn sos_reference(n: usize, two_d: usize) -> Option<u64> {
    match (n, two_d) {
        (2, 6) => Some(7),
        (2, 8) => Some(45),
        (3, 4) => Some(66),
        _ => None,
    }
}

/// Gram program of a random form `p` with a random cost matrix `C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SosInstance {
    pub n: usize,
    pub degree: usize,
    pub m: usize,
    pub d: usize,
    pub seed: u64,
    pub alphas: Vec<Vec<u32>>,
    #[serde(rename = "A")]
    pub amats: Vec<SymMatrix>,
    /// Coefficients of `p` in the order of `alphas`.
    pub p: Vec<f64>,
    #[serde(rename = "C")]
    pub c: SymMatrix,
}

pub fn random_sos(n: usize, degree: usize, seed: u64) -> Result<SosInstance> {
    let (m, d) = sos_dims(n, degree)?;
    let amats = gram_constraints(n, degree)?;
    let alphas = monomials(n, 2 * degree)?.monos;
    let mut s = Sampler::for_problem(seed, STREAM_SOS, n, degree);
    let p = s.vec(d, -1.0, 1.0);
    let c = SymMatrix::from_fn(m, |_, _| s.symmetric_unit());
    Ok(SosInstance {
        n,
        degree,
        m,
        d,
        seed,
        alphas,
        amats,
        p,
        c,
    })
}

/// Degree of the central curve of the Gram program of a generic form of
/// degree `2D` in `n` variables, by counting likelihood solutions.
///
/// Refuses with [`Error::BudgetExceeded`] (naming the reference value when
/// one is known) if `m^(d+1)`, the Bezout number of the adjugate form,
/// exceeds [`PATH_BUDGET`]. The count itself runs through [`ml_degree`].
pub fn sos_degree(n: usize, degree: usize, seed: u64, cfg: &TrackerConfig) -> Result<CountReport> {
    let (m, d) = sos_dims(n, degree)?;
    let paths = (m as u128).checked_pow(d as u32 + 1).unwrap_or(u128::MAX);
    if paths > PATH_BUDGET {
        return Err(Error::BudgetExceeded {
            paths,
            budget: PATH_BUDGET,
            reference: sos_reference(n, 2 * degree),
        });
    }
    let inst = random_sos(n, degree, seed)?;
    let ml = build_ml_system_from_parts(&inst.amats, &inst.p, &inst.c, seed)?;
    Ok(ml_degree(&ml, cfg)?.labelled("sos", m, d))
}
