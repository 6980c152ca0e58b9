use core::fmt;
use core::str::FromStr;

use super::matrix::ComplexMatrix;
use super::norm::opnorm;
use crate::error::Error;
use crate::CLASS_TOL;

/// Operator classes used as partner constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorClass {
    SelfAdjoint,
    Unitary,
    /// Unitary and self-adjoint, i.e. a symmetry `Q = Q^* = Q^{-1}`.
    UnitarySelfAdjoint,
    Projection,
    Contraction,
    Any,
}

impl OperatorClass {
    /// Largest violated identity, measured in operator norm.
    pub fn defect(self, m: &ComplexMatrix) -> f64 {
        if !m.is_square() && !matches!(self, OperatorClass::Contraction | OperatorClass::Any) {
            return f64::INFINITY;
        }
        let sa = || opnorm(&m.sub(&m.adjoint()));
        let unitary = || opnorm(&m.adjoint().matmul(m).sub(&ComplexMatrix::identity(m.cols())));
        match self {
            OperatorClass::SelfAdjoint => sa(),
            OperatorClass::Unitary => unitary(),
            OperatorClass::UnitarySelfAdjoint => sa().max(unitary()),
            OperatorClass::Projection => sa().max(opnorm(&m.matmul(m).sub(m))),
            OperatorClass::Contraction => (opnorm(m) - 1.0).max(0.0),
            OperatorClass::Any => 0.0,
        }
    }

    pub fn contains(self, m: &ComplexMatrix) -> bool {
        m.is_finite() && self.defect(m) <= CLASS_TOL
    }
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorClass::SelfAdjoint => "SA",
            OperatorClass::Unitary => "U",
            OperatorClass::UnitarySelfAdjoint => "USA",
            OperatorClass::Projection => "P",
            OperatorClass::Contraction => "CONTRACTION",
            OperatorClass::Any => "ANY",
        })
    }
}

impl FromStr for OperatorClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "SA" => OperatorClass::SelfAdjoint,
            "U" => OperatorClass::Unitary,
            "USA" => OperatorClass::UnitarySelfAdjoint,
            "P" => OperatorClass::Projection,
            "CONTRACTION" => OperatorClass::Contraction,
            "ANY" => OperatorClass::Any,
            _ => return Err(Error::Parse(alloc::format!("unknown operator class '{s}'"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn membership() {
        let swap = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(OperatorClass::UnitarySelfAdjoint.contains(&swap));
        assert!(!OperatorClass::Projection.contains(&swap));
        let p = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!(OperatorClass::Projection.contains(&p));
        assert!(OperatorClass::Contraction.contains(&p));
        let rot = ComplexMatrix::diag(&[C64::new(0.0, 1.0), C64::new(1.0, 0.0)]);
        assert!(OperatorClass::Unitary.contains(&rot));
        assert!(!OperatorClass::SelfAdjoint.contains(&rot));
        assert!(!OperatorClass::Contraction.contains(&swap.scale_real(1.01)));
    }
}
