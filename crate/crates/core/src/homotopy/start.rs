use num_complex::Complex64 as C64;

use crate::rng::Sampler;

/// Start system `z_i^{d_i} - r_i = 0` with unit-modulus `r_i`.
#[derive(Clone, Debug)]
pub struct StartSystem {
    degrees: Vec<u32>,
    r: Vec<C64>,
}

impl StartSystem {
    pub fn new(degrees: Vec<u32>, r: Vec<C64>) -> Self {
        assert_eq!(degrees.len(), r.len());
        assert!(degrees.iter().all(|d| *d >= 1), "degrees must be positive");
        Self { degrees, r }
    }

    pub fn random(degrees: &[u32], sampler: &mut Sampler) -> Self {
        let r = degrees.iter().map(|_| sampler.unit_complex()).collect();
        Self::new(degrees.to_vec(), r)
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn constants(&self) -> &[C64] {
        &self.r
    }

    pub fn num_paths(&self) -> u128 {
        self.degrees.iter().map(|d| *d as u128).product()
    }

    /// The `index`-th start point in mixed radix order, first coordinate
    /// varying fastest.
    pub fn point(&self, index: u128) -> Vec<C64> {
        let mut rem = index;
        self.degrees
            .iter()
            .zip(&self.r)
            .map(|(&d, r)| {
                let k = (rem % d as u128) as f64;
                rem /= d as u128;
                let theta = (r.arg() + std::f64::consts::TAU * k) / d as f64;
                C64::from_polar(r.norm().powf(1.0 / d as f64), theta)
            })
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<C64>> {
        (0..self.num_paths()).map(|i| self.point(i)).collect()
    }

    pub fn eval(&self, z: &[C64], out: &mut [C64]) {
        for i in 0..self.degrees.len() {
            out[i] = z[i].powu(self.degrees[i]) - self.r[i];
        }
    }

    /// Diagonal of the Jacobian.
    pub fn eval_diag_jacobian(&self, z: &[C64], out: &mut [C64], diag: &mut [C64]) {
        for i in 0..self.degrees.len() {
            let d = self.degrees[i];
            let p = z[i].powu(d - 1);
            out[i] = p * z[i] - self.r[i];
            diag[i] = p * d as f64;
        }
    }
}

/// Random total-degree start system for `degrees` and all of its
/// `prod(degrees)` solutions.
pub fn total_degree_start(degrees: &[u32], seed: u64) -> (StartSystem, Vec<Vec<C64>>) {
    let mut sampler = Sampler::new(seed, crate::rng::STREAM_TRACKER);
    let start = StartSystem::random(degrees, &mut sampler);
    let points = start.points();
    (start, points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_residuals() {
        let (s, pts) = total_degree_start(&[2, 2, 2], 1);
        assert_eq!(pts.len(), 8);
        let mut out = vec![C64::new(0.0, 0.0); 3];
        for p in &pts {
            s.eval(p, &mut out);
            assert!(out.iter().all(|v| v.norm() < 1e-12));
        }
        let (s, pts) = total_degree_start(&[1], 4);
        assert_eq!(pts.len(), 1);
        assert!((pts[0][0] - s.constants()[0]).norm() < 1e-15);
    }

    #[test]
    fn start_points_are_distinct() {
        let (_, pts) = total_degree_start(&[3, 2, 4], 9);
        assert_eq!(pts.len(), 24);
        for i in 0..pts.len() {
            for j in 0..i {
                let dist: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b).norm()).sum();
                assert!(dist > 1e-3);
            }
        }
    }
}
