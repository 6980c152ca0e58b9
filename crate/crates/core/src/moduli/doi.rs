//! Finite-dimensional double operator integrals
//! `Σ_{λ,μ} D₀f(λ, μ) P_λ (N₁R − RN₂) Q_μ`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::linalg::normal::CLUSTER_TOL;
use crate::linalg::{ComplexMatrix, NormalOperator};
use crate::C64;

/// Representative eigenvalue of each index's spectral cluster.
fn representatives(n: &NormalOperator) -> Vec<C64> {
    let mut rep = n.eigenvalues().to_vec();
    for group in n.clusters() {
        let z = n.eigenvalues()[group[0]];
        for &i in &group {
            rep[i] = z;
        }
    }
    rep
}

/// Evaluates the double operator integral of `D₀f` against `N₁R − RN₂`,
/// summing over spectral clusters and dropping coincident pairs. In finite
/// dimension this equals `f(N₁)R − Rf(N₂)`.
pub fn doi_quasicommutator(
    f: &FunctionSpec,
    n1: &NormalOperator,
    n2: &NormalOperator,
    r: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if r.shape() != (n1.dim(), n2.dim()) {
        return Err(Error::Shape { left_rows: n1.dim(), left_cols: n1.dim(), right_rows: r.rows(), right_cols: r.cols() });
    }
    let t = ComplexMatrix::quasi_commutator(n1.matrix(), r, n2.matrix());
    let (u1, u2) = (n1.conjugator(), n2.conjugator());
    let t_eig = u1.adjoint().matmul(&t).matmul(u2);
    let l = representatives(n1);
    let m = representatives(n2);
    let fl = l.iter().map(|&z| f.eval(z)).collect::<Result<Vec<_>>>()?;
    let fm = m.iter().map(|&z| f.eval(z)).collect::<Result<Vec<_>>>()?;
    let weighted = ComplexMatrix::from_fn(l.len(), m.len(), |i, j| {
        let d = l[i] - m[j];
        if d.norm() <= CLUSTER_TOL {
            C64::new(0.0, 0.0)
        } else {
            (fl[i] - fm[j]) / d * t_eig[(i, j)]
        }
    });
    Ok(u1.matmul(&weighted).matmul_adj(u2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm::opnorm;
    use crate::linalg::{apply_function, haar_unitary};
    use crate::rng::{complex_normal, seeded, uniform_disc, SeededRng};
    use rand::Rng;

    fn direct(f: &FunctionSpec, n1: &NormalOperator, n2: &NormalOperator, r: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::quasi_commutator(&apply_function(f, n1).unwrap(), r, &apply_function(f, n2).unwrap())
    }

    fn random_normal(n: usize, rng: &mut SeededRng) -> NormalOperator {
        let u = haar_unitary(n, rng);
        NormalOperator::new((0..n).map(|_| uniform_disc(rng, 2.0)).collect(), u).unwrap()
    }

    #[test]
    fn scalar_case() {
        let (a, b, rr) = (C64::new(1.0, 2.0), C64::new(-0.5, 0.3), C64::new(0.7, -1.1));
        let f = FunctionSpec::Hn(1);
        let d = doi_quasicommutator(
            &f,
            &NormalOperator::diagonal(alloc::vec![a]),
            &NormalOperator::diagonal(alloc::vec![b]),
            &ComplexMatrix::diag(&[rr]),
        )
        .unwrap();
        let want = f.eval(a).unwrap() * rr - rr * f.eval(b).unwrap();
        assert!((d[(0, 0)] - want).norm() < 1e-14);
    }

    #[test]
    fn square_commutator_on_diagonal() {
        let mut rng = seeded(21);
        let n = NormalOperator::diagonal((0..5).map(|_| uniform_disc(&mut rng, 1.0)).collect());
        let r = ComplexMatrix::from_fn(5, 5, |_, _| complex_normal(&mut rng));
        let f = FunctionSpec::Power(2);
        let d = doi_quasicommutator(&f, &n, &n, &r).unwrap();
        assert!(d.sub(&direct(&f, &n, &n, &r)).max_abs() < 1e-12);
    }

    #[test]
    fn conjugate_on_random_pair() {
        let mut rng = seeded(22);
        let n1 = random_normal(6, &mut rng);
        let n2 = random_normal(6, &mut rng);
        let r = ComplexMatrix::from_fn(6, 6, |_, _| complex_normal(&mut rng));
        let f = FunctionSpec::Conjugate;
        let want = direct(&f, &n1, &n2, &r);
        let got = doi_quasicommutator(&f, &n1, &n2, &r).unwrap();
        assert!(opnorm(&got.sub(&want)) <= 1e-10 * opnorm(&want));
    }

    #[test]
    fn registry_functions_with_shared_and_repeated_spectra() {
        let mut rng = seeded(23);
        let fs = [
            FunctionSpec::Identity,
            FunctionSpec::Conjugate,
            FunctionSpec::Power(2),
            FunctionSpec::Hn(1),
            FunctionSpec::Hn(-2),
            FunctionSpec::AbsPower(0.5),
            FunctionSpec::Sgn(1),
            FunctionSpec::RealPart,
            FunctionSpec::Psi,
        ];
        for k in 0..60 {
            let d1 = rng.random_range(1..=16);
            let d2 = rng.random_range(1..=16);
            let pool: Vec<C64> = (0..4).map(|_| uniform_disc(&mut rng, 2.0)).collect();
            let pick = |d: usize, rng: &mut SeededRng| -> Vec<C64> {
                (0..d).map(|_| if rng.random::<bool>() { pool[rng.random_range(0..4)] } else { uniform_disc(rng, 2.0) }).collect()
            };
            let e1 = pick(d1, &mut rng);
            let e2 = pick(d2, &mut rng);
            let n1 = NormalOperator::new(e1, haar_unitary(d1, &mut rng)).unwrap();
            let n2 = NormalOperator::new(e2, haar_unitary(d2, &mut rng)).unwrap();
            let r = ComplexMatrix::from_fn(d1, d2, |_, _| complex_normal(&mut rng));
            let f = &fs[k % fs.len()];
            let want = direct(f, &n1, &n2, &r);
            let got = doi_quasicommutator(f, &n1, &n2, &r).unwrap();
            let res = opnorm(&got.sub(&want)) / (1.0 + opnorm(&want));
            assert!(res <= 1e-10, "{f}: {res:e}");
        }
    }

    #[test]
    fn shape_mismatch() {
        let n = NormalOperator::diagonal(alloc::vec![C64::new(1.0, 0.0); 2]);
        assert!(doi_quasicommutator(&FunctionSpec::Identity, &n, &n, &ComplexMatrix::zeros(2, 3)).is_err());
    }
}
