//! Lattice polytopes: exact normalized volumes by a placing triangulation,
//! and the staircase triangulation of a product of two simplices.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ambient dimension accepted by [`normalized_volume`].
pub const MAX_DIM: usize = 7;

/// Convex hull of a finite set of integer points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePolytope {
    points: Vec<Vec<i64>>,
    dim: usize,
}

impl LatticePolytope {
    /// Sorts and deduplicates `points`; all must share one length.
    pub fn new(mut points: Vec<Vec<i64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or(Error::Empty("polytope has no points"))?;
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        points.sort();
        points.dedup();
        Ok(Self { points, dim })
    }

    pub fn from_exponents(exps: &[Vec<u32>]) -> Result<Self> {
        Self::new(exps.iter().map(|e| e.iter().map(|&v| v as i64).collect()).collect())
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the affine hull.
    pub fn affine_rank(&self) -> usize {
        let p0 = &self.points[0];
        let rows: Vec<Vec<i128>> = self.points[1..]
            .iter()
            .map(|p| p.iter().zip(p0).map(|(a, b)| (a - b) as i128).collect())
            .collect();
        rank_exact(rows, self.dim)
    }

    /// Pyramid of height one: every point gets a trailing 0, plus the apex
    /// `(0, ..., 0, 1)`.
    pub fn pyramid(&self) -> Self {
        let mut pts: Vec<Vec<i64>> = self
            .points
            .iter()
            .map(|p| {
                let mut q = p.clone();
                q.push(0);
                q
            })
            .collect();
        let mut apex = vec![0; self.dim];
        apex.push(1);
        pts.push(apex);
        Self::new(pts).expect("nonempty")
    }
}

/// Fraction-free elimination; rank of a set of integer rows.
fn rank_exact(mut rows: Vec<Vec<i128>>, ncols: usize) -> usize {
    let mut rank = 0;
    let mut prev = 1i128;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let p = rows[rank][col];
        for r in rank + 1..rows.len() {
            let f = rows[r][col];
            for c in 0..ncols {
                rows[r][c] = (p * rows[r][c] - f * rows[rank][c]) / prev;
            }
        }
        prev = p;
        rank += 1;
    }
    rank
}

/// Determinant of a square integer matrix by Bareiss elimination.
fn det_exact(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// `det [v_1 - v_0, ..., v_n - v_0]` for `n + 1` points in dimension `n`.
fn simplex_det(pts: &[&[i64]]) -> i128 {
    let v0 = pts[0];
    det_exact(
        pts[1..]
            .iter()
            .map(|p| p.iter().zip(v0).map(|(a, b)| (a - b) as i128).collect())
            .collect(),
    )
}

/// Sign of the orientation of `q` relative to the hyperplane through the
/// facet points, with `q` given as `scale * q` minus `scale * facet[0]`.
fn side(points: &[Vec<i64>], facet: &[usize], q_minus_f0: &[i128]) -> i128 {
    let f0 = &points[facet[0]];
    let mut rows: Vec<Vec<i128>> = facet[1..]
        .iter()
        .map(|&i| points[i].iter().zip(f0).map(|(a, b)| (a - b) as i128).collect())
        .collect();
    rows.push(q_minus_f0.to_vec());
    det_exact(rows).signum()
}

/// Maximal simplices of the placing triangulation: points are inserted in
/// lexicographic order, starting from the lexicographically first affinely
/// independent `dim + 1` points; each new point is joined to every boundary
/// facet it sees strictly.
pub fn placing_triangulation(poly: &LatticePolytope) -> Result<Vec<Vec<usize>>> {
    let n = poly.dim;
    let pts = &poly.points;
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidDimensions(format!("ambient dimension must be in 1..={MAX_DIM}, got {n}")));
    }
    let rank = poly.affine_rank();
    if rank < n {
        return Err(Error::Degenerate { rank, ambient: n });
    }

    // initial simplex
    let mut simplex = vec![0usize];
    let mut rows: Vec<Vec<i128>> = Vec::new();
    for (i, p) in pts.iter().enumerate().skip(1) {
        if simplex.len() == n + 1 {
            break;
        }
        let mut trial = rows.clone();
        trial.push(p.iter().zip(&pts[0]).map(|(a, b)| (a - b) as i128).collect());
        if rank_exact(trial.clone(), n) == trial.len() {
            rows = trial;
            simplex.push(i);
        }
    }
    // (n + 1) * centroid of the initial simplex, strictly inside the hull
    let interior: Vec<i128> = (0..n)
        .map(|c| simplex.iter().map(|&i| pts[i][c] as i128).sum())
        .collect();
    let rel = |facet: &[usize], q: &[i128], scale: i128| -> Vec<i128> {
        let f0 = &pts[facet[0]];
        q.iter().zip(f0).map(|(v, f)| v - scale * *f as i128).collect()
    };
    // boundary facets with the sign of the interior side
    let mut facets: Vec<(Vec<usize>, i128)> = (0..=n)
        .map(|skip| {
            let f: Vec<usize> = simplex
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .map(|(_, &i)| i)
                .collect();
            let s = side(pts, &f, &rel(&f, &interior, n as i128 + 1));
            (f, s)
        })
        .collect();
    let mut simplices = vec![simplex.clone()];

    for (p_idx, p) in pts.iter().enumerate() {
        if simplex.contains(&p_idx) {
            continue;
        }
        let p128: Vec<i128> = p.iter().map(|&v| v as i128).collect();
        let mut visible = Vec::new();
        let mut hidden = Vec::new();
        for (f, inner) in facets.drain(..) {
            let s = side(pts, &f, &rel(&f, &p128, 1));
            if s != 0 && s != inner {
                visible.push((f, inner));
            } else {
                hidden.push((f, inner));
            }
        }
        if visible.is_empty() {
            // inside or on the boundary: placing adds no cell
            facets = hidden;
            continue;
        }
        let mut ridge_count: HashMap<Vec<usize>, usize> = HashMap::new();
        for (f, _) in &visible {
            for skip in 0..f.len() {
                let mut r = f.clone();
                r.remove(skip);
                *ridge_count.entry(r).or_default() += 1;
            }
            let mut cell = f.clone();
            cell.push(p_idx);
            simplices.push(cell);
        }
        let mut horizon: Vec<Vec<usize>> = ridge_count
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(r, _)| r)
            .collect();
        horizon.sort();
        facets = hidden;
        for mut r in horizon {
            r.push(p_idx);
            let s = side(pts, &r, &rel(&r, &interior, n as i128 + 1));
            facets.push((r, s));
        }
    }
    Ok(simplices)
}

/// Euclidean volume times `dim!`, exact.
pub fn normalized_volume(poly: &LatticePolytope) -> Result<u64> {
    let cells = placing_triangulation(poly)?;
    let total: i128 = cells
        .iter()
        .map(|c| {
            let verts: Vec<&[i64]> = c.iter().map(|&i| poly.points[i].as_slice()).collect();
            simplex_det(&verts).abs()
        })
        .sum();
    u64::try_from(total).map_err(|_| Error::Invalid("volume overflow".into()))
}

/// Maximal cells of the staircase triangulation of `Delta_{m-d-1} x Delta_d`,
/// grouped by `k`, the number of east steps taken after the path reaches
/// the south edge of the grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaircaseDecomposition {
    pub m: usize,
    pub d: usize,
    pub counts_by_k: Vec<u64>,
}

impl StaircaseDecomposition {
    pub fn total(&self) -> u64 {
        self.counts_by_k.iter().sum()
    }
}

/// Monotone lattice paths with `east` east steps and `south` south steps,
/// counted by the number of east steps after the last south step.
fn enumerate_paths(east: usize, south: usize) -> Vec<u64> {
    fn walk(e: usize, s: usize, trailing: usize, counts: &mut [u64]) {
        if e == 0 && s == 0 {
            counts[trailing] += 1;
            return;
        }
        if e > 0 {
            walk(e - 1, s, trailing + 1, counts);
        }
        if s > 0 {
            walk(e, s - 1, 0, counts);
        }
    }
    let mut counts = vec![0u64; east + 1];
    walk(east, south, 0, &mut counts);
    counts
}

/// Staircase paths on the `(m - d) x (d + 1)` grid, by explicit enumeration.
pub fn staircase_counts(m: usize, d: usize) -> Result<StaircaseDecomposition> {
    if d == 0 || d >= m {
        return Err(Error::InvalidDimensions(format!("need 1 <= d < m, got m={m}, d={d}")));
    }
    Ok(StaircaseDecomposition {
        m,
        d,
        counts_by_k: enumerate_paths(m - d - 1, d),
    })
}

/// Normalized volume of `Delta_a x Delta_b` as the number of staircase cells.
pub fn product_simplex_volume(a: usize, b: usize) -> u64 {
    enumerate_paths(a, b).iter().sum()
}

/// Staircase cells of `Delta_{m-d-1} x Delta_d` weighted by `2^k`.
pub fn qp_weighted_volume(m: usize, d: usize) -> Result<u64> {
    let st = staircase_counts(m, d)?;
    Ok(st.counts_by_k.iter().enumerate().map(|(k, c)| c << k).sum())
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Exponents of `lambda, 1, t_j, y_i, y_i t_j` in the variable order
/// `(lambda, y_1..y_d, t_1..t_{m-d-1})`.
pub fn lp_support_polytope(m: usize, d: usize) -> Result<LatticePolytope> {
    if d == 0 || d >= m {
        return Err(Error::InvalidDimensions(format!("need 1 <= d < m, got m={m}, d={d}")));
    }
    let k = m - d - 1;
    let mut pts = vec![unit(m, 0), vec![0; m]];
    for j in 0..k {
        pts.push(unit(m, 1 + d + j));
    }
    for i in 0..d {
        pts.push(unit(m, 1 + i));
        for j in 0..k {
            let mut v = unit(m, 1 + i);
            v[1 + d + j] = 1;
            pts.push(v);
        }
    }
    LatticePolytope::new(pts)
}

/// [`lp_support_polytope`] together with every `t_j t_l`.
pub fn qp_support_polytope(m: usize, d: usize) -> Result<LatticePolytope> {
    let lp = lp_support_polytope(m, d)?;
    let k = m - d - 1;
    let mut pts = lp.points;
    for j in 0..k {
        for l in j..k {
            let mut v = vec![0; m];
            v[1 + d + j] += 1;
            v[1 + d + l] += 1;
            pts.push(v);
        }
    }
    LatticePolytope::new(pts)
}
