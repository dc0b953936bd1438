use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Relative size of `|det|` below which the adjugate is taken from cofactors
/// instead of `det * K^{-1}`.
pub const ADJ_SINGULAR_THRESHOLD: f64 = 1e-12;

/// Dense kernels on row-major slices. These never allocate and are what the
/// path tracker calls in its inner loop.
pub mod small {
    use num_complex::Complex64 as C64;

    pub const MAX_DIM: usize = 8;

    const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
    const ONE: C64 = C64 { re: 1.0, im: 0.0 };

    /// Solves `a x = b` in place by Gaussian elimination with partial
    /// pivoting; `b` is overwritten with `x`. Returns `false` on an exactly
    /// zero or non-finite pivot.
    pub fn solve(a: &mut [C64], n: usize, b: &mut [C64]) -> bool {
        debug_assert!(a.len() >= n * n && b.len() >= n);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm_sqr();
            for r in col + 1..n {
                let v = a[r * n + col].norm_sqr();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return false;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(col * n + c, piv * n + c);
                }
                b.swap(col, piv);
            }
            let inv = ONE / a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] * inv;
                if f == ZERO {
                    continue;
                }
                for c in col..n {
                    let t = a[col * n + c];
                    a[r * n + c] -= f * t;
                }
                let t = b[col];
                b[r] -= f * t;
            }
        }
        for r in (0..n).rev() {
            let mut acc = b[r];
            for c in r + 1..n {
                acc -= a[r * n + c] * b[c];
            }
            b[r] = acc / a[r * n + r];
        }
        true
    }

    /// Determinant by elimination on a scratch copy.
    pub fn det(a: &[C64], n: usize) -> C64 {
        debug_assert!(n <= MAX_DIM);
        let mut w = [ZERO; MAX_DIM * MAX_DIM];
        w[..n * n].copy_from_slice(&a[..n * n]);
        let mut det = ONE;
        for col in 0..n {
            let mut piv = col;
            let mut best = w[col * n + col].norm_sqr();
            for r in col + 1..n {
                let v = w[r * n + col].norm_sqr();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return ZERO;
            }
            if piv != col {
                for c in 0..n {
                    w.swap(col * n + c, piv * n + c);
                }
                det = -det;
            }
            let p = w[col * n + col];
            det *= p;
            let inv = ONE / p;
            for r in col + 1..n {
                let f = w[r * n + col] * inv;
                for c in col + 1..n {
                    let t = w[col * n + c];
                    w[r * n + c] -= f * t;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse into `out`; returns the determinant (zero when
    /// singular, in which case `out` is unspecified).
    pub fn invert(a: &[C64], n: usize, out: &mut [C64]) -> C64 {
        debug_assert!(n <= MAX_DIM);
        let mut w = [ZERO; MAX_DIM * MAX_DIM];
        w[..n * n].copy_from_slice(&a[..n * n]);
        for r in 0..n {
            for c in 0..n {
                out[r * n + c] = if r == c { ONE } else { ZERO };
            }
        }
        let mut det = ONE;
        for col in 0..n {
            let mut piv = col;
            let mut best = w[col * n + col].norm_sqr();
            for r in col + 1..n {
                let v = w[r * n + col].norm_sqr();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return ZERO;
            }
            if piv != col {
                for c in 0..n {
                    w.swap(col * n + c, piv * n + c);
                    out.swap(col * n + c, piv * n + c);
                }
                det = -det;
            }
            let p = w[col * n + col];
            det *= p;
            let inv = ONE / p;
            for c in 0..n {
                w[col * n + c] *= inv;
                out[col * n + c] *= inv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = w[r * n + col];
                if f == ZERO {
                    continue;
                }
                for c in 0..n {
                    let t = w[col * n + c];
                    w[r * n + c] -= f * t;
                    let t = out[col * n + c];
                    out[r * n + c] -= f * t;
                }
            }
        }
        det
    }

    /// Copies `a` without row `skip_r` and column `skip_c` into `out`.
    pub fn minor_into(a: &[C64], n: usize, skip_r: usize, skip_c: usize, out: &mut [C64]) {
        let mut k = 0;
        for r in 0..n {
            if r == skip_r {
                continue;
            }
            for c in 0..n {
                if c == skip_c {
                    continue;
                }
                out[k] = a[r * n + c];
                k += 1;
            }
        }
    }

    /// Adjugate from cofactors: `adj[i][j] = (-1)^(i+j) det(minor(a, j, i))`.
    pub fn adj_cofactor(a: &[C64], n: usize, out: &mut [C64]) {
        if n == 1 {
            out[0] = ONE;
            return;
        }
        let mut minor = [ZERO; MAX_DIM * MAX_DIM];
        for i in 0..n {
            for j in 0..n {
                minor_into(a, n, j, i, &mut minor);
                let v = det(&minor, n - 1);
                out[i * n + j] = if (i + j) % 2 == 0 { v } else { -v };
            }
        }
    }

    /// Directional derivative of the adjugate: `d/de adj(a + e*da)` at `e = 0`,
    /// by differentiating each cofactor row by row. Valid at singular `a`.
    pub fn adj_derivative_cofactor(a: &[C64], da: &[C64], n: usize, out: &mut [C64]) {
        if n == 1 {
            out[0] = ZERO;
            return;
        }
        let m = n - 1;
        let mut minor = [ZERO; MAX_DIM * MAX_DIM];
        let mut dminor = [ZERO; MAX_DIM * MAX_DIM];
        for i in 0..n {
            for j in 0..n {
                minor_into(a, n, j, i, &mut minor);
                minor_into(da, n, j, i, &mut dminor);
                let mut acc = ZERO;
                for row in 0..m {
                    let mut work = minor;
                    work[row * m..row * m + m].copy_from_slice(&dminor[row * m..row * m + m]);
                    acc += det(&work, m);
                }
                out[i * n + j] = if (i + j) % 2 == 0 { acc } else { -acc };
            }
        }
    }

    pub fn max_abs(a: &[C64]) -> f64 {
        a.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// Determinant and adjugate of a square complex matrix, with
/// `k * adj(k) = det(k) * Id`.
///
/// Uses `det * k^{-1}` when `|det| >= 1e-12 * scale^m` (scale = largest entry
/// modulus) and cofactor expansion otherwise.
pub fn det_adj(k: &DMatrix<C64>) -> (C64, DMatrix<C64>) {
    let n = k.nrows();
    assert_eq!(n, k.ncols(), "det_adj needs a square matrix");
    if n == 0 {
        return (C64::new(1.0, 0.0), DMatrix::zeros(0, 0));
    }
    let a: Vec<C64> = (0..n * n).map(|idx| k[(idx / n, idx % n)]).collect();
    let (det, adj) = if n <= small::MAX_DIM {
        det_adj_small(&a, n)
    } else {
        det_adj_dense(k)
    };
    (det, adj)
}

fn det_adj_small(a: &[C64], n: usize) -> (C64, DMatrix<C64>) {
    let scale = small::max_abs(a);
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    let det = small::invert(a, n, &mut out);
    if scale > 0.0 && det.norm() >= ADJ_SINGULAR_THRESHOLD * scale.powi(n as i32) {
        for v in out.iter_mut() {
            *v *= det;
        }
    } else {
        small::adj_cofactor(a, n, &mut out);
    }
    (det, DMatrix::from_row_slice(n, n, &out))
}

fn det_adj_dense(k: &DMatrix<C64>) -> (C64, DMatrix<C64>) {
    let n = k.nrows();
    let lu = k.clone().lu();
    let det = lu.determinant();
    let scale = k.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if scale > 0.0 && det.norm() >= ADJ_SINGULAR_THRESHOLD * scale.powi(n as i32) {
        if let Some(inv) = lu.try_inverse() {
            return (det, inv * det);
        }
    }
    let mut adj = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let minor = k.clone().remove_row(j).remove_column(i);
            let v = minor.lu().determinant();
            adj[(i, j)] = if (i + j) % 2 == 0 { v } else { -v };
        }
    }
    (det, adj)
}
