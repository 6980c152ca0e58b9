//! JSON interchange for matrices and witnesses, and CSV number formatting.

use serde::{Deserialize, Serialize};

use opmod_core::moduli::{ModulusKind, ModulusWitness};
use opmod_core::{ComplexMatrix, FunctionSpec, NormalOperator, C64};

use crate::error::{CliError, CliResult};

pub const WITNESS_SCHEMA_VERSION: u32 = 1;

/// Row-major matrix with split real and imaginary parts. `dim` is present for square matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixJson {
            dim: m.is_square().then_some(m.rows()),
            rows: m.rows(),
            cols: m.cols(),
            re: m.as_slice().iter().map(|z| z.re).collect(),
            im: m.as_slice().iter().map(|z| z.im).collect(),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> CliResult<ComplexMatrix> {
        let n = self.rows * self.cols;
        if self.re.len() != n || self.im.len() != n {
            return Err(CliError::config(format!(
                "matrix is {}x{} but has {} real and {} imaginary entries",
                self.rows,
                self.cols,
                self.re.len(),
                self.im.len()
            )));
        }
        if let Some(d) = self.dim {
            if d != self.rows || d != self.cols {
                return Err(CliError::config(format!("dim {d} does not match {}x{}", self.rows, self.cols)));
            }
        }
        let data = self.re.iter().zip(&self.im).map(|(&a, &b)| C64::new(a, b)).collect();
        let m = ComplexMatrix::from_vec(self.rows, self.cols, data)?;
        m.check_finite()?;
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalJson {
    pub eigenvalues: VectorJson,
    pub conjugator: MatrixJson,
}

impl From<&NormalOperator> for NormalJson {
    fn from(n: &NormalOperator) -> Self {
        NormalJson {
            eigenvalues: VectorJson {
                re: n.eigenvalues().iter().map(|z| z.re).collect(),
                im: n.eigenvalues().iter().map(|z| z.im).collect(),
            },
            conjugator: n.conjugator().into(),
        }
    }
}

impl NormalJson {
    pub fn to_operator(&self) -> CliResult<NormalOperator> {
        let e = &self.eigenvalues;
        if e.re.len() != e.im.len() {
            return Err(CliError::config("eigenvalue arrays differ in length"));
        }
        let eig = e.re.iter().zip(&e.im).map(|(&a, &b)| C64::new(a, b)).collect();
        Ok(NormalOperator::new(eig, self.conjugator.to_matrix()?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessJson {
    pub schema_version: u32,
    pub kind: String,
    pub f: String,
    pub delta: f64,
    pub value: f64,
    pub seed: u64,
    pub n1: NormalJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<NormalJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<MatrixJson>,
}

impl From<&ModulusWitness> for WitnessJson {
    fn from(w: &ModulusWitness) -> Self {
        WitnessJson {
            schema_version: WITNESS_SCHEMA_VERSION,
            kind: w.kind.to_string(),
            f: w.f.to_string(),
            delta: w.delta,
            value: w.value,
            seed: w.seed,
            n1: (&w.n1).into(),
            n2: w.n2.as_ref().map(Into::into),
            partner: w.partner.as_ref().map(Into::into),
        }
    }
}

impl WitnessJson {
    /// Rebuilds the witness; the caller decides whether to validate it.
    pub fn to_witness(&self) -> CliResult<ModulusWitness> {
        if self.schema_version != WITNESS_SCHEMA_VERSION {
            return Err(CliError::config(format!("unsupported witness schema version {}", self.schema_version)));
        }
        Ok(ModulusWitness {
            kind: self.kind.parse::<ModulusKind>()?,
            f: self.f.parse::<FunctionSpec>()?,
            delta: self.delta,
            value: self.value,
            seed: self.seed,
            n1: self.n1.to_operator()?,
            n2: self.n2.as_ref().map(NormalJson::to_operator).transpose()?,
            partner: self.partner.as_ref().map(MatrixJson::to_matrix).transpose()?,
        })
    }
}

pub fn witness_to_json(w: &ModulusWitness) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&WitnessJson::from(w))?;
    out.push(b'\n');
    Ok(out)
}

/// Parses and revalidates a witness file.
pub fn witness_from_json(bytes: &[u8]) -> CliResult<ModulusWitness> {
    let w = serde_json::from_slice::<WitnessJson>(bytes)?.to_witness()?;
    w.validate().map_err(|e| CliError::Assertion(format!("witness does not revalidate: {e}")))?;
    Ok(w)
}

pub fn matrix_to_json(m: &ComplexMatrix) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&MatrixJson::from(m))?;
    out.push(b'\n');
    Ok(out)
}

pub fn matrix_from_json(bytes: &[u8]) -> CliResult<ComplexMatrix> {
    serde_json::from_slice::<MatrixJson>(bytes)?.to_matrix()
}

/// Twelve significant digits in scientific notation; `inf`, `-inf`, `nan` otherwise.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use opmod_core::moduli::{modulus_search, SearchOptions, SpectralSet};

    #[test]
    fn matrix_roundtrip_is_exact() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(i as f64 + 0.1, 1.0 / (j as f64 + 3.0)));
        let back = matrix_from_json(&matrix_to_json(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let json: MatrixJson = serde_json::from_slice(&matrix_to_json(&m).unwrap()).unwrap();
        assert_eq!(json.dim, None);
        let sq = matrix_to_json(&ComplexMatrix::identity(2)).unwrap();
        assert!(String::from_utf8(sq).unwrap().contains("\"dim\": 2"));
    }

    #[test]
    fn malformed_matrices_are_config_errors() {
        let bad = br#"{"rows": 2, "cols": 2, "re": [1, 2, 3], "im": [0, 0, 0, 0]}"#;
        assert_eq!(matrix_from_json(bad).unwrap_err().exit_code(), 2);
        let dim = br#"{"dim": 3, "rows": 1, "cols": 1, "re": [1], "im": [0]}"#;
        assert_eq!(matrix_from_json(dim).unwrap_err().exit_code(), 2);
        let extra = br#"{"rows": 1, "cols": 1, "re": [1], "im": [0], "x": 1}"#;
        assert!(matrix_from_json(extra).is_err());
    }

    #[test]
    fn witness_roundtrip_revalidates() {
        for kind in ModulusKind::ALL {
            let opts = SearchOptions { dim: 3, budget: 4, seed: 2, set: SpectralSet::Disc(1.0) };
            let w = modulus_search(kind, &FunctionSpec::Hn(1), 0.3, &opts).unwrap();
            let back = witness_from_json(&witness_to_json(&w).unwrap()).unwrap();
            assert_eq!(back, w);
        }
    }

    #[test]
    fn tampered_witness_fails_validation() {
        let opts = SearchOptions { dim: 3, budget: 4, seed: 2, set: SpectralSet::Disc(1.0) };
        let w = modulus_search(ModulusKind::Commutator, &FunctionSpec::Conjugate, 0.3, &opts).unwrap();
        let mut j = WitnessJson::from(&w);
        j.value *= 2.0;
        j.value += 1.0;
        let err = witness_from_json(&serde_json::to_vec(&j).unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn numbers_have_twelve_digits() {
        assert_eq!(num(1.0), "1.00000000000e0");
        assert_eq!(num(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(num(f64::INFINITY), "inf");
    }
}
