use alloc::vec;
use alloc::vec::Vec;

use super::decomp::hermitian_eigen;
use super::matrix::ComplexMatrix;
use super::norm::opnorm;
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::{C64, CLASS_TOL};

/// Eigenvalues closer than this are treated as one spectral point.
pub const CLUSTER_TOL: f64 = 1e-12;

/// Normal matrix `U diag(lambda) U^*` kept in spectral form.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalOperator {
    eigenvalues: Vec<C64>,
    conjugator: ComplexMatrix,
    matrix: ComplexMatrix,
}

/// Build a normal operator, rejecting conjugators that are not unitary.
pub fn make_normal(eigenvalues: Vec<C64>, conjugator: ComplexMatrix) -> Result<NormalOperator> {
    NormalOperator::new(eigenvalues, conjugator)
}

impl NormalOperator {
    pub fn new(eigenvalues: Vec<C64>, conjugator: ComplexMatrix) -> Result<Self> {
        let n = eigenvalues.len();
        if n == 0 {
            return Err(Error::arg("normal operator needs at least one eigenvalue"));
        }
        if conjugator.shape() != (n, n) {
            return Err(Error::arg(alloc::format!(
                "conjugator is {}x{}, expected {n}x{n}",
                conjugator.rows(),
                conjugator.cols()
            )));
        }
        conjugator.check_finite()?;
        if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::arg("eigenvalues must be finite"));
        }
        let defect = opnorm(&conjugator.adjoint().matmul(&conjugator).sub(&ComplexMatrix::identity(n)));
        if defect > CLASS_TOL {
            return Err(Error::Validation { what: "conjugator is not unitary".into(), defect });
        }
        let matrix = conjugate_diag(&conjugator, &eigenvalues);
        Ok(NormalOperator { eigenvalues, conjugator, matrix })
    }

    pub fn diagonal(eigenvalues: Vec<C64>) -> Self {
        let n = eigenvalues.len();
        Self::new(eigenvalues, ComplexMatrix::identity(n)).expect("identity conjugator")
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn conjugator(&self) -> &ComplexMatrix {
        &self.conjugator
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖NN^* - N^*N‖`; should be at rounding level.
    pub fn normality_defect(&self) -> f64 {
        let m = &self.matrix;
        let a = m.matmul(&m.adjoint());
        let b = m.adjoint().matmul(m);
        opnorm(&a.sub(&b))
    }

    /// Values `f(lambda_j)`, failing on the first point outside the domain of `f`.
    pub fn spectral_values(&self, f: &FunctionSpec) -> Result<Vec<C64>> {
        self.eigenvalues.iter().map(|&z| f.eval(z)).collect()
    }

    /// Same conjugator, new spectrum `f(lambda)`.
    pub fn map_spectrum(&self, f: &FunctionSpec) -> Result<NormalOperator> {
        let ev = self.spectral_values(f)?;
        let matrix = conjugate_diag(&self.conjugator, &ev);
        Ok(NormalOperator { eigenvalues: ev, conjugator: self.conjugator.clone(), matrix })
    }

    pub fn adjoint(&self) -> NormalOperator {
        let ev: Vec<C64> = self.eigenvalues.iter().map(|z| z.conj()).collect();
        NormalOperator { matrix: self.matrix.adjoint(), eigenvalues: ev, conjugator: self.conjugator.clone() }
    }

    /// Entrywise complex conjugate `conj(N)`, again normal with conjugated data.
    pub fn entrywise_conj(&self) -> NormalOperator {
        NormalOperator {
            eigenvalues: self.eigenvalues.iter().map(|z| z.conj()).collect(),
            conjugator: self.conjugator.conj(),
            matrix: self.matrix.conj(),
        }
    }

    /// `V N V^*` for a unitary `V`.
    pub fn conjugate_by(&self, v: &ComplexMatrix) -> Result<NormalOperator> {
        NormalOperator::new(self.eigenvalues.clone(), v.matmul(&self.conjugator))
    }

    /// Spectral clusters: groups of eigenvalue indices within [`CLUSTER_TOL`] (transitively).
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            let mut j = i;
            while p[j] != r {
                let next = p[j];
                p[j] = r;
                j = next;
            }
            r
        }
        for i in 0..n {
            for j in i + 1..n {
                if (self.eigenvalues[i] - self.eigenvalues[j]).norm() <= CLUSTER_TOL {
                    let a = find(&mut parent, i);
                    let b = find(&mut parent, j);
                    if a != b {
                        parent[b.max(a)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(i);
        }
        groups
    }

    /// Orthogonal projection onto the eigenspace spanned by the given indices.
    pub fn spectral_projection(&self, indices: &[usize]) -> ComplexMatrix {
        let u = &self.conjugator;
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| indices.iter().map(|&k| u[(i, k)] * u[(j, k)].conj()).sum())
    }
}

/// `U diag(d) U^*`.
pub fn conjugate_diag(u: &ComplexMatrix, d: &[C64]) -> ComplexMatrix {
    let ud = ComplexMatrix::from_fn(u.rows(), u.cols(), |i, j| u[(i, j)] * d[j]);
    ud.matmul_adj(u)
}

/// Functional calculus `f(N) = U diag(f(lambda)) U^*`.
pub fn apply_function(f: &FunctionSpec, n: &NormalOperator) -> Result<ComplexMatrix> {
    let vals = n.spectral_values(f)?;
    Ok(conjugate_diag(n.conjugator(), &vals))
}

/// `g(A)` for a self-adjoint matrix through its eigen decomposition.
pub fn hermitian_function(a: &ComplexMatrix, g: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::arg("hermitian function of a non-square matrix"));
    }
    let defect = opnorm(&a.sub(&a.adjoint()));
    if defect > CLASS_TOL * opnorm(a).max(1.0) {
        return Err(Error::Validation { what: "matrix is not self-adjoint".into(), defect });
    }
    let e = hermitian_eigen(a);
    let d: Vec<C64> = e.values.iter().map(|&x| C64::new(g(x), 0.0)).collect();
    Ok(conjugate_diag(&e.vectors, &d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::decomp::haar_unitary;
    use crate::rng::{complex_normal, seeded, uniform_disc};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_normal(n: usize, seed: u64) -> NormalOperator {
        let mut r = seeded(seed);
        let u = haar_unitary(n, &mut r);
        let ev = (0..n).map(|_| uniform_disc(&mut r, 2.0)).collect();
        NormalOperator::new(ev, u).unwrap()
    }

    #[test]
    fn diagonal_and_scalar_spectrum() {
        let n = make_normal(vec![c(1.0, 0.0), c(0.0, 1.0)], ComplexMatrix::identity(2)).unwrap();
        assert_eq!(n.matrix()[(1, 1)], c(0.0, 1.0));
        let mut r = seeded(1);
        let u = haar_unitary(2, &mut r);
        let id = make_normal(vec![c(1.0, 0.0); 2], u).unwrap();
        assert!(id.matrix().sub(&ComplexMatrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_non_unitary() {
        let bad = ComplexMatrix::from_real(2, 2, &[1.0, 0.1, 0.0, 1.0]).unwrap();
        match make_normal(vec![c(1.0, 0.0); 2], bad) {
            Err(Error::Validation { defect, .. }) => assert!(defect > 0.05),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn haar_circle_spectrum_is_normal() {
        let mut r = seeded(17);
        let u = haar_unitary(10, &mut r);
        let ev = (0..10).map(|k| C64::from_polar(1.0, 0.7 * k as f64)).collect();
        let n = NormalOperator::new(ev, u).unwrap();
        assert!(n.normality_defect() <= 1e-9 * n.norm().powi(2));
    }

    #[test]
    fn calculus_examples() {
        let n = NormalOperator::diagonal(vec![c(1.0, 1.0), c(2.0, 0.0)]);
        let sq = apply_function(&FunctionSpec::Power(2), &n).unwrap();
        assert_eq!(sq, ComplexMatrix::diag(&[c(0.0, 2.0), c(4.0, 0.0)]));
        let m = random_normal(5, 3);
        let id = apply_function(&FunctionSpec::Identity, &m).unwrap();
        assert!(id.sub(m.matrix()).max_abs() < 1e-14);
        let cj = apply_function(&FunctionSpec::Conjugate, &m).unwrap();
        assert!(cj.sub(&m.matrix().adjoint()).max_abs() < 1e-13);
    }

    #[test]
    fn domain_error_names_point() {
        let n = NormalOperator::diagonal(vec![c(1.0, 0.0), C64::new(0.0, 0.0)]);
        assert_eq!(apply_function(&FunctionSpec::Power(-1), &n), Err(Error::Domain(C64::new(0.0, 0.0))));
    }

    #[test]
    fn clusters_group_coincident_points() {
        let n = NormalOperator::diagonal(vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 1e-13), c(2.0, 0.0)]);
        let g = n.clusters();
        assert_eq!(g, vec![vec![0, 2], vec![1, 3]]);
        let total = g.iter().map(|ix| n.spectral_projection(ix)).fold(ComplexMatrix::zeros(4, 4), |a, b| a.add(&b));
        assert!(total.sub(&ComplexMatrix::identity(4)).max_abs() < 1e-14);
    }

    #[test]
    fn hermitian_sqrt() {
        let mut r = seeded(2);
        let g = ComplexMatrix::from_fn(4, 4, |_, _| complex_normal(&mut r));
        let pos = g.matmul_adj(&g);
        let s = hermitian_function(&pos, |x| x.max(0.0).sqrt()).unwrap();
        assert!(s.matmul(&s).sub(&pos).max_abs() < 1e-11 * pos.max_abs());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn multiplicative_and_adjoint(seed in 0u64..5000, n in 1usize..9) {
            let m = random_normal(n, seed);
            let fs = [FunctionSpec::Power(2), FunctionSpec::Hn(1), FunctionSpec::Conjugate, FunctionSpec::ExpAtom(C64::new(0.3, -0.4))];
            for f in &fs {
                for g in &fs {
                    let fg = apply_function(&FunctionSpec::product(f.clone(), g.clone()), &m).unwrap();
                    let prod = apply_function(f, &m).unwrap().matmul(&apply_function(g, &m).unwrap());
                    let scale = fg.frobenius_norm().max(1.0);
                    prop_assert!(fg.sub(&prod).frobenius_norm() <= 1e-9 * scale);
                }
                let a = apply_function(&FunctionSpec::conj_of(f.clone()), &m).unwrap();
                let b = apply_function(f, &m).unwrap().adjoint();
                prop_assert!(a.sub(&b).max_abs() <= 1e-13 * b.max_abs().max(1.0));
            }
        }
    }
}
