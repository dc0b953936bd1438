//! Closed-form degrees and genera of central curves, reference tables, and
//! exact polynomial fitting.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{binomial, factorial};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Lp,
    Qp,
    Sdp,
    Sos,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Lp => "lp",
            Family::Qp => "qp",
            Family::Sdp => "sdp",
            Family::Sos => "sos",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Polytope,
    Homotopy,
    Reference,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Formula => "formula",
            Method::Polytope => "polytope",
            Method::Homotopy => "homotopy",
            Method::Reference => "reference",
        })
    }
}

/// A degree of a central curve obtained by one method.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub family: Family,
    pub m: usize,
    pub d: usize,
    pub value: u64,
    pub method: Method,
}

fn check_program_dims(m: usize, d: usize) -> Result<()> {
    if d == 0 || d >= m {
        return Err(Error::InvalidDimensions(format!("need 1 <= d < m, got m={m}, d={d}")));
    }
    Ok(())
}

fn to_u64(v: BigInt) -> Result<u64> {
    v.to_u64()
        .ok_or_else(|| Error::InvalidDimensions(format!("value {v} does not fit in 64 bits")))
}

/// `C(m-1, d)`.
pub fn psi_lp(m: usize, d: usize) -> Result<u64> {
    check_program_dims(m, d)?;
    to_u64(binomial(m as i64 - 1, d as i64))
}

/// `C(m-1, d-1)`, the degree for diagonal linear concentration models.
pub fn phi_diag(m: usize, d: usize) -> Result<u64> {
    if d == 0 || d > m {
        return Err(Error::InvalidDimensions(format!("need 1 <= d <= m, got m={m}, d={d}")));
    }
    to_u64(binomial(m as i64 - 1, d as i64 - 1))
}

/// `sum_{k=0}^{m-d-1} C(m-k-2, d-1) 2^k`.
pub fn psi_qp(m: usize, d: usize) -> Result<u64> {
    check_program_dims(m, d)?;
    let (m, d) = (m as i64, d as i64);
    let total: BigInt = (0..m - d)
        .map(|k| binomial(m - k - 2, d - 1) << k as usize)
        .sum();
    to_u64(total)
}

/// `m(m+1)/2`, the dimension of the space of symmetric `m x m` matrices.
pub fn sym_dim(m: usize) -> usize {
    m * (m + 1) / 2
}

fn check_sdp_dims(m: usize, d: usize) -> Result<usize> {
    let n = sym_dim(m);
    if m == 0 || d == 0 || d >= n {
        return Err(Error::InvalidDimensions(format!(
            "need 1 <= d < m(m+1)/2 = {n}, got m={m}, d={d}"
        )));
    }
    Ok(n)
}

/// `m(m+1)/2 - d - 1`: SDP central curves for `d` and its partner have the
/// same degree.
pub fn sdp_symmetry_partner(m: usize, d: usize) -> Result<usize> {
    let n = check_sdp_dims(m, d)?;
    if d == n - 1 {
        return Err(Error::InvalidDimensions(format!(
            "d = m(m+1)/2 - 1 = {d} has no partner with d >= 1"
        )));
    }
    Ok(n - d - 1)
}

const SDP_TABLE: [(usize, usize, u64); 3] = [(4, 7, 9), (5, 9, 137), (6, 15, 528)];

/// Known SDP degrees: `d = 1` gives `m - 1`, `d = m(m+1)/2 - 1` gives `1`,
/// three sum-of-squares entries, and the symmetry partners of all of them.
pub fn psi_sdp_reference(m: usize, d: usize) -> Option<u64> {
    let n = check_sdp_dims(m, d).ok()?;
    let direct = |d: usize| -> Option<u64> {
        if d == 1 {
            return Some(m as u64 - 1);
        }
        if d == n - 1 {
            return Some(1);
        }
        SDP_TABLE.iter().find(|e| e.0 == m && e.1 == d).map(|e| e.2)
    };
    direct(d).or_else(|| {
        let partner = n.checked_sub(d + 1).filter(|p| *p >= 1)?;
        direct(partner)
    })
}

/// Numerator coefficients `h_0 + h_1 t + ... + h_k t^k` of a Hilbert series
/// over `(1 - t)^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HVector(Vec<u64>);

impl HVector {
    pub fn new(h: Vec<u64>) -> Result<Self> {
        if h.first() != Some(&1) {
            return Err(Error::Invalid("h-vector must start with h_0 = 1".into()));
        }
        if h.last() == Some(&0) {
            return Err(Error::Invalid("last entry of an h-vector must be nonzero".into()));
        }
        Ok(Self(h))
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }
}

/// `1 - sum_j (1 - j) h_j`.
pub fn genus_from_hvector(h: &HVector) -> i64 {
    1 - h
        .0
        .iter()
        .enumerate()
        .map(|(j, hj)| (1 - j as i64) * *hj as i64)
        .sum::<i64>()
}

/// Genus of the SDP central curve where a proposition determines it:
/// `d = 1` and `d = N - 1` give 0, `d = N - 2` gives `C(m-2, 2)` and
/// `d = N - 3` gives `1 + (m-1)^2 (m-3)`, with `N = m(m+1)/2`.
pub fn genus_sdp_special(m: usize, d: usize) -> Option<i64> {
    let n = check_sdp_dims(m, d).ok()?;
    let mi = m as i64;
    if d == 1 || d == n - 1 {
        Some(0)
    } else if d + 2 == n {
        let ones = HVector::new(vec![1; m - 1]).ok()?;
        Some(genus_from_hvector(&ones))
    } else if d + 3 == n {
        Some(1 + (mi - 1) * (mi - 1) * (mi - 3))
    } else {
        None
    }
}

/// Where a genus table entry comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenusSource {
    /// Follows from [`genus_sdp_special`].
    Proposition,
    /// Computed from a Hilbert series elsewhere; shipped as data only.
    Reference,
}

/// Genus table of SDP central curves for `m <= 5`, `(m, d, genus)`.
pub const GENUS_TABLE: [(usize, usize, i64); 21] = [
    (2, 1, 0),
    (2, 2, 0),
    (3, 1, 0),
    (3, 2, 0),
    (3, 3, 1),
    (3, 4, 0),
    (3, 5, 0),
    (4, 1, 0),
    (4, 2, 1),
    (4, 3, 10),
    (4, 4, 20),
    (4, 5, 22),
    (4, 6, 20),
    (4, 7, 10),
    (4, 8, 1),
    (4, 9, 0),
    (5, 1, 0),
    (5, 2, 3),
    (5, 12, 33),
    (5, 13, 3),
    (5, 14, 0),
];

pub fn genus_table_entry(m: usize, d: usize) -> Option<(i64, GenusSource)> {
    let (_, _, g) = GENUS_TABLE.iter().find(|e| e.0 == m && e.1 == d)?;
    let source = if genus_sdp_special(m, d) == Some(*g) {
        GenusSource::Proposition
    } else {
        GenusSource::Reference
    };
    Some((*g, source))
}

/// `1 - sum_{j=0}^d (1 - j) C(m-d+j-2, j)`.
pub fn genus_lp_sum(m: usize, d: usize) -> Result<BigInt> {
    check_program_dims(m, d)?;
    let (m, d) = (m as i64, d as i64);
    let s: BigInt = (0..=d).map(|j| (1 - j) * binomial(m - d + j - 2, j)).sum();
    Ok(BigInt::one() - s)
}

/// `1 - (m-1)! (m - m d + d^2) / ((m-d)! d!)`, exactly.
pub fn genus_lp_closed(m: usize, d: usize) -> Result<BigRational> {
    check_program_dims(m, d)?;
    let (mi, di) = (m as i64, d as i64);
    let num = factorial(m as u64 - 1) * BigInt::from(mi - mi * di + di * di);
    let den = factorial((m - d) as u64) * factorial(d as u64);
    Ok(BigRational::one() - BigRational::new(num, den))
}

/// Genus of the central curve of a generic LP. Both the binomial sum and the
/// factorial closed form are evaluated; they must agree.
pub fn genus_lp(m: usize, d: usize) -> Result<i64> {
    let sum = genus_lp_sum(m, d)?;
    let closed = genus_lp_closed(m, d)?;
    if BigRational::from_integer(sum.clone()) != closed {
        return Err(Error::Mismatch(format!(
            "LP genus at m={m}, d={d}: sum {sum} != closed form {closed}"
        )));
    }
    sum.to_i64()
        .ok_or_else(|| Error::InvalidDimensions(format!("genus {sum} does not fit in 64 bits")))
}

/// Exact interpolating polynomial through `(m, value)` points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialFit {
    /// Coefficients in increasing powers of `m`.
    pub coefficients: Vec<BigRational>,
    /// All points lie on a polynomial of degree at most `d`.
    pub fits: bool,
    /// The fitted polynomial takes integer values at every point.
    pub integer_valued: bool,
}

impl PolynomialFit {
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, m: i64) -> BigRational {
        let x = BigRational::from_integer(m.into());
        self.coefficients
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &x + c)
    }

    /// Coefficients as `p/q` strings, increasing powers.
    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coefficients.iter().map(|c| c.to_string()).collect()
    }
}

/// Fits a polynomial of degree `<= d` through the first `d + 1` points in
/// exact rationals and checks the remaining points against it.
pub fn polynomiality_check(d: usize, points: &[(i64, i64)]) -> Result<PolynomialFit> {
    let n = d + 1;
    if points.len() < n {
        return Err(Error::Invalid(format!(
            "degree {d} fit needs at least {n} points, got {}",
            points.len()
        )));
    }
    let mut xs: Vec<i64> = points.iter().map(|p| p.0).collect();
    xs.sort_unstable();
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Invalid("interpolation nodes must be distinct".into()));
    }

    // Vandermonde system by Gauss-Jordan elimination over the rationals
    let rat = |v: i64| BigRational::from_integer(v.into());
    let mut rows: Vec<Vec<BigRational>> = points[..n]
        .iter()
        .map(|&(x, y)| {
            let mut row: Vec<BigRational> = (0..n).map(|k| rat(x).pow(k as i32)).collect();
            row.push(rat(y));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !rows[r][col].is_zero())
            .ok_or_else(|| Error::Invalid("singular interpolation system".into()))?;
        rows.swap(col, piv);
        let inv = rows[col][col].recip();
        for v in rows[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..=n {
                    let t = &rows[col][c] * &f;
                    rows[r][c] -= t;
                }
            }
        }
    }
    let coefficients: Vec<BigRational> = rows.into_iter().map(|r| r[n].clone()).collect();
    let mut fit = PolynomialFit {
        coefficients,
        fits: true,
        integer_valued: true,
    };
    for &(x, y) in points {
        let v = fit.eval(x);
        if v != rat(y) {
            fit.fits = false;
        }
        if !v.is_integer() {
            fit.integer_valued = false;
        }
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_binomial(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row[k as usize]
    }

    #[test]
    fn lp_and_diagonal_degrees() {
        assert_eq!(psi_lp(4, 2).unwrap(), 3);
        assert_eq!(psi_lp(9, 8).unwrap(), 1);
        assert_eq!(phi_diag(4, 3).unwrap(), 3);
        assert_eq!(phi_diag(7, 1).unwrap(), 1);
        assert_eq!(phi_diag(5, 3).unwrap(), psi_lp(5, 2).unwrap());
        assert_eq!(psi_lp(5, 2).unwrap(), 6);
        for m in 2..=14 {
            for d in 1..m {
                assert_eq!(psi_lp(m, d).unwrap(), phi_diag(m, d + 1).unwrap());
                assert_eq!(psi_lp(m, d).unwrap(), naive_binomial(m as u64 - 1, d as u64));
            }
        }
        assert!(psi_lp(3, 3).is_err());
        assert!(psi_lp(3, 0).is_err());
    }

    #[test]
    fn qp_degrees() {
        assert_eq!(psi_qp(3, 1).unwrap(), 3);
        assert_eq!(psi_qp(4, 1).unwrap(), 7);
        assert_eq!(psi_qp(4, 2).unwrap(), 4);
        assert_eq!(psi_qp(5, 2).unwrap(), 11);
        for m in 2..=12 {
            assert_eq!(psi_qp(m, m - 1).unwrap(), 1);
            // d = 1 collapses to 2^{m-1} - 1
            assert_eq!(psi_qp(m, 1).unwrap(), (1 << (m - 1)) - 1);
        }
    }

    #[test]
    fn sdp_symmetry() {
        assert_eq!(sdp_symmetry_partner(3, 1).unwrap(), 4);
        assert_eq!(sdp_symmetry_partner(3, 2).unwrap(), 3);
        for m in 2..=7 {
            for d in 1..sym_dim(m) - 1 {
                let p = sdp_symmetry_partner(m, d).unwrap();
                assert_eq!(sdp_symmetry_partner(m, p).unwrap(), d);
            }
        }
        assert!(sdp_symmetry_partner(3, 5).is_err());
    }

    #[test]
    fn sdp_reference_table() {
        assert_eq!(psi_sdp_reference(4, 7), Some(9));
        assert_eq!(psi_sdp_reference(4, 2), Some(9));
        assert_eq!(psi_sdp_reference(5, 9), Some(137));
        assert_eq!(psi_sdp_reference(6, 15), Some(528));
        assert_eq!(psi_sdp_reference(5, 1), Some(4));
        assert_eq!(psi_sdp_reference(3, 5), Some(1));
        assert_eq!(psi_sdp_reference(3, 4), Some(2));
        assert_eq!(psi_sdp_reference(4, 4), None);
        assert_eq!(psi_sdp_reference(3, 6), None);
        for m in 2..=7 {
            for d in 1..sym_dim(m) - 1 {
                let p = sdp_symmetry_partner(m, d).unwrap();
                if let (Some(a), Some(b)) = (psi_sdp_reference(m, d), psi_sdp_reference(m, p)) {
                    assert_eq!(a, b, "m={m} d={d}");
                }
            }
        }
    }

    #[test]
    fn hvector_genus() {
        assert_eq!(genus_from_hvector(&HVector::new(vec![1, 5]).unwrap()), 0);
        assert_eq!(genus_from_hvector(&HVector::new(vec![1, 1, 1]).unwrap()), 1);
        assert_eq!(genus_from_hvector(&HVector::new(vec![1]).unwrap()), 0);
        assert!(HVector::new(vec![2, 1]).is_err());
        assert!(HVector::new(vec![1, 0]).is_err());
        for m in 2..=12 {
            let h = HVector::new(vec![1; m - 1]).unwrap();
            assert_eq!(BigInt::from(genus_from_hvector(&h)), binomial(m as i64 - 2, 2));
        }
    }

    #[test]
    fn codimension_two_numerator() {
        // (1 + t + ... + t^{m-2})^2 gives 1 + (m-1)^2 (m-3)
        for m in 3..=10usize {
            let mut h = vec![0u64; 2 * m - 3];
            for i in 0..m - 1 {
                for j in 0..m - 1 {
                    h[i + j] += 1;
                }
            }
            let g = genus_from_hvector(&HVector::new(h).unwrap());
            let n = sym_dim(m);
            assert_eq!(Some(g), genus_sdp_special(m, n - 3), "m={m}");
        }
    }

    #[test]
    fn sdp_special_genus() {
        assert_eq!(genus_sdp_special(4, 7), Some(10));
        assert_eq!(genus_sdp_special(5, 13), Some(3));
        assert_eq!(genus_sdp_special(5, 12), Some(33));
        assert_eq!(genus_sdp_special(4, 4), None);
        assert_eq!(genus_sdp_special(5, 3), None);
        for &(m, d, g) in GENUS_TABLE.iter() {
            if let Some(v) = genus_sdp_special(m, d) {
                assert_eq!(v, g, "m={m} d={d}");
            }
        }
        assert_eq!(genus_table_entry(4, 5), Some((22, GenusSource::Reference)));
        assert_eq!(genus_table_entry(4, 8), Some((1, GenusSource::Proposition)));
    }

    #[test]
    fn lp_genus() {
        assert_eq!(genus_lp(5, 2).unwrap(), 3);
        assert_eq!(genus_lp(4, 2).unwrap(), 1);
        for m in 2..=12 {
            for d in 1..m {
                assert_eq!(BigRational::from_integer(genus_lp_sum(m, d).unwrap()), genus_lp_closed(m, d).unwrap());
                assert_eq!(genus_lp(m, d).unwrap(), genus_lp(m, m - d).unwrap());
            }
            assert_eq!(genus_lp(m, 1).unwrap(), 0);
        }
    }

    #[test]
    fn polynomial_fits() {
        let fit = polynomiality_check(1, &[(3, 2), (4, 3), (5, 4)]).unwrap();
        assert!(fit.fits && fit.integer_valued);
        assert_eq!(fit.coefficient_strings(), vec!["-1", "1"]);
        assert_eq!(fit.degree(), Some(1));

        let fit = polynomiality_check(0, &[(3, 7), (4, 7), (9, 7)]).unwrap();
        assert!(fit.fits);
        assert_eq!(fit.coefficient_strings(), vec!["7"]);

        let fit = polynomiality_check(1, &[(3, 2), (4, 3), (5, 5)]).unwrap();
        assert!(!fit.fits);

        // m(m+1)/2 needs degree 2
        let tri: Vec<(i64, i64)> = (1..6).map(|m| (m, m * (m + 1) / 2)).collect();
        assert!(!polynomiality_check(1, &tri).unwrap().fits);
        let fit = polynomiality_check(2, &tri).unwrap();
        assert!(fit.fits);
        assert_eq!(fit.coefficient_strings(), vec!["0", "1/2", "1/2"]);

        assert!(polynomiality_check(2, &[(1, 1), (2, 2)]).is_err());
        assert!(polynomiality_check(1, &[(1, 1), (1, 2)]).is_err());
    }
}
