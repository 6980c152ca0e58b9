//! Block-operator constructions that move between quasicommutators,
//! commutators and the different partner classes.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use super::class::OperatorClass;
use super::matrix::ComplexMatrix;
use super::normal::{hermitian_function, NormalOperator};
use super::norm::opnorm;
use crate::error::{Error, Result};
use crate::CLASS_TOL;

/// `diag(N1, N2)`, normal with spectrum the union of both spectra.
pub fn diag2(n1: &NormalOperator, n2: &NormalOperator) -> NormalOperator {
    let mut ev: Vec<_> = n1.eigenvalues().to_vec();
    ev.extend_from_slice(n2.eigenvalues());
    let d1 = n1.dim();
    let d2 = n2.dim();
    let mut u = ComplexMatrix::zeros(d1 + d2, d1 + d2);
    u.set_block(0, 0, n1.conjugator());
    u.set_block(d1, d1, n2.conjugator());
    NormalOperator::new(ev, u).expect("block diagonal of unitaries is unitary")
}

/// `[[0, R], [R^*, 0]]`.
pub fn antidiag_sym(r: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = r.shape();
    ComplexMatrix::block2(&ComplexMatrix::zeros(m, m), r, &r.adjoint(), &ComplexMatrix::zeros(n, n)).expect("conformable")
}

/// `[[0, R], [0, 0]]`.
pub fn corner(r: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = r.shape();
    ComplexMatrix::block2(
        &ComplexMatrix::zeros(m, m),
        r,
        &ComplexMatrix::zeros(n, m),
        &ComplexMatrix::zeros(n, n),
    )
    .expect("conformable")
}

/// `[[0, I], [I, 0]]` of size `2n`.
pub fn swap(n: usize) -> ComplexMatrix {
    let i = ComplexMatrix::identity(n);
    let z = ComplexMatrix::zeros(n, n);
    ComplexMatrix::block2(&z, &i, &i, &z).expect("conformable")
}

/// `[[tA, S], [-S, tA]]` with `S = (I - t^2 A^2)^{1/2}`; unitary when `A` is
/// self-adjoint with `‖tA‖ < 1`.
pub fn unitary_dilation(a: &ComplexMatrix, tau: f64) -> Result<ComplexMatrix> {
    if !OperatorClass::SelfAdjoint.contains(a) {
        return Err(Error::Precondition("dilation needs a self-adjoint matrix".into()));
    }
    let ta = a.scale_real(tau);
    let norm = opnorm(&ta);
    if !(norm < 1.0 - 1e-12) {
        return Err(Error::Precondition(alloc::format!("‖tau A‖ = {norm} is not below 1")));
    }
    let s = hermitian_function(&ta, |x| (1.0 - x * x).max(0.0).sqrt())?;
    let u = ComplexMatrix::block2(&ta, &s, &s.scale_real(-1.0), &ta)?;
    let defect = OperatorClass::Unitary.defect(&u);
    if defect > CLASS_TOL {
        return Err(Error::Consistency(alloc::format!("dilation unitarity defect {defect:e}")));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionSpec;
    use crate::linalg::decomp::haar_unitary;
    use crate::linalg::normal::apply_function;
    use crate::rng::{complex_normal, seeded, uniform, uniform_disc};
    use crate::C64;

    fn random_normal(n: usize, r: &mut crate::rng::SeededRng) -> NormalOperator {
        let u = haar_unitary(n, r);
        let ev = (0..n).map(|_| uniform_disc(r, 1.5)).collect();
        NormalOperator::new(ev, u).unwrap()
    }

    fn random_sa(n: usize, r: &mut crate::rng::SeededRng) -> ComplexMatrix {
        let u = haar_unitary(n, r);
        let mut d: Vec<C64> = (0..n).map(|_| C64::new(uniform(r, -1.0, 1.0), 0.0)).collect();
        d[0] = C64::new(1.0, 0.0);
        super::super::normal::conjugate_diag(&u, &d)
    }

    #[test]
    fn corner_lift_preserves_quasicommutator() {
        let mut r = seeded(4);
        let f = FunctionSpec::Hn(1);
        for _ in 0..10 {
            let n1 = random_normal(3, &mut r);
            let n2 = random_normal(4, &mut r);
            let rr = ComplexMatrix::from_fn(3, 4, |_, _| complex_normal(&mut r));
            let lhs = ComplexMatrix::quasi_commutator(
                &apply_function(&f, &n1).unwrap(),
                &rr,
                &apply_function(&f, &n2).unwrap(),
            );
            let big = diag2(&n1, &n2);
            let fr = apply_function(&f, &big).unwrap();
            let c = corner(&rr);
            let rhs = ComplexMatrix::quasi_commutator(&fr, &c, &fr);
            assert!((opnorm(&lhs) - opnorm(&rhs)).abs() < 1e-10 * opnorm(&lhs));
        }
    }

    #[test]
    fn swap_lift_matches_difference() {
        let mut r = seeded(5);
        let f = FunctionSpec::Conjugate;
        let n1 = random_normal(4, &mut r);
        let n2 = random_normal(4, &mut r);
        let big = diag2(&n1, &n2);
        let fb = apply_function(&f, &big).unwrap();
        let q = swap(4);
        let lhs = opnorm(&ComplexMatrix::quasi_commutator(&fb, &q, &fb));
        let rhs = opnorm(&apply_function(&f, &n1).unwrap().sub(&apply_function(&f, &n2).unwrap()));
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
        assert!(OperatorClass::UnitarySelfAdjoint.contains(&q));
        assert!(OperatorClass::SelfAdjoint.contains(&antidiag_sym(&ComplexMatrix::from_fn(2, 3, |_, _| complex_normal(&mut r)))));
    }

    #[test]
    fn diag2_spectrum_is_union() {
        let mut r = seeded(6);
        let n1 = random_normal(2, &mut r);
        let n2 = random_normal(3, &mut r);
        let d = diag2(&n1, &n2);
        let mut want: Vec<C64> = n1.eigenvalues().to_vec();
        want.extend_from_slice(n2.eigenvalues());
        assert_eq!(d.eigenvalues(), &want[..]);
    }

    #[test]
    fn dilation_is_unitary() {
        let mut r = seeded(8);
        let a = random_sa(5, &mut r);
        let u = unitary_dilation(&a, 0.5).unwrap();
        assert!(OperatorClass::Unitary.defect(&u) <= 1e-10);
        assert!(matches!(unitary_dilation(&a, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn square_root_commutator_inequality() {
        let mut r = seeded(10);
        for _ in 0..50 {
            let n = 1 + (r.next_u32() % 8) as usize;
            let t = random_sa(n, &mut r).scale_real(uniform(&mut r, 0.0, 0.9));
            let x = ComplexMatrix::from_fn(n, n, |_, _| complex_normal(&mut r));
            let s = hermitian_function(&t, |v| (1.0 - v * v).sqrt()).unwrap();
            let tn = opnorm(&t);
            let lhs = opnorm(&s.matmul(&x).sub(&x.matmul(&s)));
            let rhs = tn * opnorm(&x.matmul(&t).sub(&t.matmul(&x))) / (1.0 - tn * tn).sqrt();
            assert!(lhs <= rhs + 1e-8);
        }
    }

    use rand::RngCore;
}
