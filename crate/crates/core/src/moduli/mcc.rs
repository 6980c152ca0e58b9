//! Randomized check of the unitary dilation sandwich between the commutator
//! modulus for self-adjoint partners and the unitary modulus.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::Result;
use crate::function::FunctionSpec;
use crate::linalg::norm::opnorm;
use crate::linalg::{apply_function, diag2, haar_unitary, hermitian_function, unitary_dilation, ComplexMatrix, NormalOperator};
use crate::moduli::witness::{swap_lift, ModulusKind, ModulusWitness, VALUE_TOL};
use crate::rng::{substream, uniform, uniform_disc};

const SLACK: f64 = 1e-8;
const TAU: f64 = 0.5;
const MAX_DIM: usize = 12;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MccReport {
    pub instances: usize,
    /// `‖SN − NS‖ ≤ ‖T‖‖NT − TN‖/√(1 − ‖T‖²)` failures, `S = (I − T²)^{1/2}`.
    pub vl_violations: usize,
    /// `‖𝒩U − U𝒩‖ ≤ (τ + τ²/√(1 − τ²))‖NA − AN‖` failures.
    pub constraint_violations: usize,
    /// `‖f(𝒩)U − Uf(𝒩)‖ ≥ τ‖f(N)A − Af(N)‖` failures.
    pub value_violations: usize,
    /// Swap lifts of `(𝒩, U*𝒩U)` that fail to revalidate or change the value.
    pub swap_violations: usize,
    pub max_vl_excess: f64,
    pub max_constraint_excess: f64,
    pub max_value_deficit: f64,
}

impl MccReport {
    pub fn passed(&self) -> bool {
        self.vl_violations + self.constraint_violations + self.value_violations + self.swap_violations == 0
    }
}

fn random_instance(rng: &mut impl Rng) -> (NormalOperator, ComplexMatrix) {
    let d = rng.random_range(1..=MAX_DIM);
    let n = NormalOperator::new((0..d).map(|_| uniform_disc(rng, 1.5)).collect(), haar_unitary(d, rng))
        .expect("Haar conjugator is unitary");
    let mut spec: Vec<f64> = (0..d).map(|_| uniform(rng, -1.0, 1.0)).collect();
    spec[0] = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let a = NormalOperator::new(spec.iter().map(|&x| x.into()).collect(), haar_unitary(d, rng))
        .expect("Haar conjugator is unitary");
    let a = a.matrix().clone();
    (n, a.add(&a.adjoint()).scale_real(0.5))
}

fn commutator(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    opnorm(&x.matmul(y).sub(&y.matmul(x)))
}

/// Runs `instances` random cases with `dim ≤ 12`, `‖A‖ = 1` and `τ = 1/2`.
pub fn mcc_sandwich_check(f: &FunctionSpec, instances: usize, seed: u64) -> Result<MccReport> {
    let mut rep = MccReport { instances, ..MccReport::default() };
    let factor = TAU + TAU * TAU / (1.0 - TAU * TAU).sqrt();
    for i in 0..instances {
        let mut rng = substream(seed, i as u64);
        let (n, a) = random_instance(&mut rng);
        let t = a.scale_real(TAU);
        let tn = opnorm(&t);
        let s = hermitian_function(&t, |x| (1.0 - x * x).max(0.0).sqrt())?;
        let lhs = commutator(&s, n.matrix());
        let rhs = tn * commutator(n.matrix(), &t) / (1.0 - tn * tn).sqrt();
        let excess = lhs - rhs;
        rep.max_vl_excess = rep.max_vl_excess.max(excess);
        if excess > SLACK {
            rep.vl_violations += 1;
        }

        let u = unitary_dilation(&a, TAU)?;
        let big = diag2(&n, &n);
        let na = commutator(n.matrix(), &a);
        let excess = commutator(big.matrix(), &u) - factor * na;
        rep.max_constraint_excess = rep.max_constraint_excess.max(excess);
        if excess > SLACK {
            rep.constraint_violations += 1;
        }

        let fbig = apply_function(f, &big)?;
        let value = commutator(&fbig, &u);
        let deficit = TAU * commutator(&apply_function(f, &n)?, &a) - value;
        rep.max_value_deficit = rep.max_value_deficit.max(deficit);
        if deficit > SLACK {
            rep.value_violations += 1;
        }

        let plain = big.conjugate_by(&u.adjoint()).and_then(|n2| {
            let delta = opnorm(&big.matrix().sub(n2.matrix())) + crate::moduli::witness::CONSTRAINT_TOL * 0.5;
            ModulusWitness::from_parts(ModulusKind::Plain, f.clone(), delta, big.clone(), Some(n2), None, seed)
        });
        let ok = match plain.and_then(|w| swap_lift(&w).map(|l| (w, l))) {
            Ok((w, l)) => (l.value - w.value).abs() <= VALUE_TOL * w.value.max(1.0)
                && (w.value - value).abs() <= VALUE_TOL * value.max(1.0),
            Err(_) => false,
        };
        if !ok {
            rep.swap_violations += 1;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sandwich_holds_for_registry_functions() {
        for f in [FunctionSpec::Conjugate, FunctionSpec::Hn(1), FunctionSpec::AbsPower(0.5), FunctionSpec::Power(2)] {
            let rep = mcc_sandwich_check(&f, 40, 5).unwrap();
            assert!(rep.passed(), "{f}: {rep:?}");
        }
    }

    #[test]
    fn report_is_deterministic() {
        let a = mcc_sandwich_check(&FunctionSpec::Sgn(1), 10, 9).unwrap();
        let b = mcc_sandwich_check(&FunctionSpec::Sgn(1), 10, 9).unwrap();
        assert_eq!(a, b);
    }
}
