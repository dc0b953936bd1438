use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Real symmetric matrix stored as its packed upper triangle, row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    packed: Vec<f64>,
}

#[inline]
fn packed_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows r < i hold dim - r entries each
    i * dim - i * i.saturating_sub(1) / 2 + (j - i)
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            packed: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle `i <= j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut packed = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                packed.push(f(i, j));
            }
        }
        Self { dim, packed }
    }

    pub fn from_packed(dim: usize, packed: Vec<f64>) -> Option<Self> {
        (packed.len() == dim * (dim + 1) / 2).then_some(Self { dim, packed })
    }

    /// Takes the upper triangle of a square matrix; `None` if it is not
    /// square or not exactly symmetric.
    pub fn from_dense(m: &DMatrix<f64>) -> Option<Self> {
        if m.nrows() != m.ncols() {
            return None;
        }
        let n = m.nrows();
        for i in 0..n {
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return None;
                }
            }
        }
        Some(Self::from_fn(n, |i, j| m[(i, j)]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[packed_index(self.dim, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = packed_index(self.dim, i, j);
        self.packed[k] = v;
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Trace inner product `tr(self * other)`.
    pub fn inner(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut acc = 0.0;
        let mut k = 0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let w = if i == j { 1.0 } else { 2.0 };
                acc += w * self.packed[k] * other.packed[k];
                k += 1;
            }
        }
        acc
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, s: f64) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            packed: self.packed.iter().map(|v| v * s).collect(),
        }
    }

    pub fn axpy(&mut self, s: f64, other: &SymMatrix) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.packed.iter_mut().zip(&other.packed) {
            *a += s * b;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(deserializer)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom("symmetric matrix must be square"));
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(D::Error::custom("matrix is not symmetric"));
                }
            }
        }
        Ok(SymMatrix::from_fn(n, |i, j| rows[i][j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_layout_is_row_major_upper() {
        let s = SymMatrix::from_fn(3, |i, j| (10 * i + j) as f64);
        assert_eq!(s.packed(), &[0.0, 1.0, 2.0, 11.0, 12.0, 22.0]);
        assert_eq!(s.get(2, 1), 12.0);
        assert_eq!(s.get(1, 2), 12.0);
        assert_eq!(s.packed().len(), 6);
    }

    #[test]
    fn inner_matches_dense_trace() {
        let a = SymMatrix::from_fn(4, |i, j| (i as f64 + 1.0) * 0.3 - j as f64 * 0.7);
        let b = SymMatrix::from_fn(4, |i, j| ((i * 3 + j) % 5) as f64 - 2.0);
        let dense = (a.to_dense() * b.to_dense()).trace();
        assert!((a.inner(&b) - dense).abs() < 1e-12);
    }

    #[test]
    fn dense_round_trip_rejects_asymmetry() {
        let a = SymMatrix::from_fn(3, |i, j| (i + 2 * j) as f64);
        assert_eq!(SymMatrix::from_dense(&a.to_dense()).unwrap(), a);
        let mut d = a.to_dense();
        d[(0, 1)] += 1.0;
        assert!(SymMatrix::from_dense(&d).is_none());
    }
}
