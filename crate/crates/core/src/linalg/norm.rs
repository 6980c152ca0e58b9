#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use super::decomp::singular_values;
use super::matrix::{normalize, vec_norm, ComplexMatrix};
use crate::error::{Error, Result};
use crate::C64;

pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 10_000;
/// Relative eigen-residual `‖A^*A v - theta v‖ / theta` required to stop.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// A linear map known only through products with itself and its adjoint.
pub trait LinearOperator {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply(&self, x: &[C64]) -> Vec<C64>;
    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64>;
}

impl LinearOperator for ComplexMatrix {
    fn rows(&self) -> usize {
        ComplexMatrix::rows(self)
    }
    fn cols(&self) -> usize {
        ComplexMatrix::cols(self)
    }
    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.matvec(x)
    }
    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64> {
        self.adj_matvec(y)
    }
}

#[derive(Clone, Debug)]
pub struct PowerResult {
    /// Estimate of the largest singular value (a lower bound up to rounding).
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Residual-based relative error of `value`, valid when the start vector
    /// meets the dominant singular subspace.
    pub error_estimate: f64,
    /// Final right singular vector estimate.
    pub vector: Vec<C64>,
}

/// Deterministic start vector: all-ones with a small golden-ratio phase
/// perturbation so it is not orthogonal to structured singular vectors.
pub fn start_vector(n: usize) -> Vec<C64> {
    let g = 0.618_033_988_749_894_9_f64;
    let mut v: Vec<C64> = (0..n)
        .map(|j| {
            let f = ((j as f64 + 1.0) * g).fract();
            C64::new(1.0 + 0.25 * f, 0.25 * (f - 0.5))
        })
        .collect();
    normalize(&mut v);
    v
}

/// Power iteration on `A^*A`. Stops once the Rayleigh quotient change is below
/// `tol` relative and the eigen-residual is below [`RESIDUAL_TOL`], which
/// bounds the distance of the estimate to the spectrum.
pub fn power_norm<O: LinearOperator + ?Sized>(op: &O, tol: f64, max_iter: usize) -> PowerResult {
    let n = op.cols();
    let mut v = start_vector(n);
    let mut theta_prev = 0.0;
    let mut result = PowerResult {
        value: 0.0,
        iterations: 0,
        converged: false,
        error_estimate: f64::INFINITY,
        vector: v.clone(),
    };
    for it in 1..=max_iter {
        let w = op.apply(&v);
        let theta = vec_norm(&w).powi(2);
        let mut z = op.apply_adjoint(&w);
        let residual = z.iter().zip(&v).map(|(&a, &b)| (a - b * theta).norm_sqr()).sum::<f64>().sqrt();
        let zn = normalize(&mut z);
        result.iterations = it;
        result.value = theta.sqrt();
        if zn == 0.0 || theta == 0.0 {
            result.vector = v;
            return result;
        }
        let d = (theta - theta_prev).abs();
        result.error_estimate = residual / theta / 2.0;
        if it > 1 && d <= tol * theta && residual <= RESIDUAL_TOL * theta {
            result.converged = true;
            result.vector = z;
            return result;
        }
        theta_prev = theta;
        v = z;
    }
    result.vector = v;
    result
}

/// Largest singular value. Power iteration first, Jacobi SVD when it does not settle.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    if m.is_empty() {
        return Err(Error::arg("operator norm of an empty matrix"));
    }
    if m.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let p = power_norm(m, POWER_TOL, POWER_MAX_ITER);
    if p.converged {
        Ok(p.value)
    } else {
        Ok(singular_values(m)[0])
    }
}

/// Panicking shorthand for internal use on matrices known to be nonempty.
pub(crate) fn opnorm(m: &ComplexMatrix) -> f64 {
    operator_norm(m).expect("nonempty matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::decomp::haar_unitary;
    use crate::rng::{complex_normal, seeded};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn trivial_norms() {
        let d = ComplexMatrix::diag(&[c(3.0, 0.0), c(0.0, 4.0)]);
        assert!((operator_norm(&d).unwrap() - 4.0).abs() < 1e-12);
        let nil = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((operator_norm(&nil).unwrap() - 1.0).abs() < 1e-12);
        assert!(operator_norm(&ComplexMatrix::zeros(0, 0)).is_err());
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3, 2)).unwrap(), 0.0);
    }

    #[test]
    fn ones_orthogonal_top_vector() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, -1.0, -1.0, 1.0]).unwrap();
        assert!((operator_norm(&m).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn random_matches_jacobi() {
        let mut r = seeded(7);
        let m = ComplexMatrix::from_fn(8, 8, |_, _| complex_normal(&mut r));
        let a = operator_norm(&m).unwrap();
        let b = singular_values(&m)[0];
        assert!((a - b).abs() <= 1e-9 * b);
    }

    #[test]
    fn clustered_singular_values() {
        let mut r = seeded(5);
        let u = haar_unitary(6, &mut r);
        let v = haar_unitary(6, &mut r);
        let s: Vec<C64> = [1.0, 1.0 - 1e-7, 0.9, 0.5, 0.2, 0.0].iter().map(|&x| c(x, 0.0)).collect();
        let m = u.matmul(&ComplexMatrix::diag(&s)).matmul_adj(&v);
        assert!((operator_norm(&m).unwrap() - 1.0).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn unitary_invariance(seed in 0u64..10_000, n in 1usize..9) {
            let mut r = seeded(seed);
            let m = ComplexMatrix::from_fn(n, n, |_, _| complex_normal(&mut r));
            let u = haar_unitary(n, &mut r);
            let v = haar_unitary(n, &mut r);
            let a = operator_norm(&m).unwrap();
            let b = operator_norm(&u.matmul(&m).matmul(&v)).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-300));
        }
    }
}
