use num_complex::Complex64 as C64;

/// An evaluable system of `n` equations in `n` unknowns.
///
/// Implementations must be pure: the tracker evaluates the same system from
/// many paths at once.
pub trait SquareSystem: Sync {
    fn dim(&self) -> usize;

    /// Upper bounds on the total degree of each equation.
    fn degrees(&self) -> Vec<u32>;

    fn eval(&self, z: &[C64], out: &mut [C64]);

    /// Values into `out` and the row-major Jacobian into `jac`.
    fn eval_jacobian(&self, z: &[C64], out: &mut [C64], jac: &mut [C64]);

    /// Per-equation magnitude of the summands at `z`; relative residuals are
    /// measured against it.
    fn term_scales(&self, z: &[C64], out: &mut [f64]);

    /// Relative distance of `z` from a locus where solutions are spurious
    /// (for the likelihood system, `|det K(z)| / scale^m`). `None` when the
    /// system has no such locus.
    fn singular_measure(&self, _z: &[C64]) -> Option<f64> {
        None
    }

    /// Largest relative residual `|F_i(z)| / scale_i(z)`.
    fn relative_residual(&self, z: &[C64]) -> f64 {
        let n = self.dim();
        let mut f = vec![C64::new(0.0, 0.0); n];
        let mut s = vec![0.0; n];
        self.eval(z, &mut f);
        self.term_scales(z, &mut s);
        f.iter()
            .zip(&s)
            .map(|(v, sc)| if v.norm() == 0.0 { 0.0 } else { v.norm() / (sc + 1e-300) })
            .fold(0.0, f64::max)
    }
}
