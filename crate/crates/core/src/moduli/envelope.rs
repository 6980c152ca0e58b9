//! Lower envelopes of a modulus on a `δ` grid, assembled from validated witnesses.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::moduli::witness::{ModulusKind, ModulusWitness};

/// Certified lower values `E(δ_k) ≤ Ω(δ_k)`, nondecreasing in `δ` with `E(δ)/δ`
/// nonincreasing. `provenance[k]` is the index of the witness that produced the
/// raw value at `δ_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulusEnvelope {
    pub kind: ModulusKind,
    pub deltas: Vec<f64>,
    pub lower_values: Vec<f64>,
    pub provenance: Vec<Option<usize>>,
}

fn check_grid(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        return Err(Error::arg("envelope grid is empty"));
    }
    if !deltas.iter().all(|d| d.is_finite() && *d > 0.0) {
        return Err(Error::arg("envelope grid points must be positive and finite"));
    }
    if deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg("envelope grid must be strictly increasing"));
    }
    Ok(())
}

impl ModulusEnvelope {
    /// Every witness is revalidated and must have the envelope's kind. For `SA` and
    /// `C` a witness at `δ_i` also bounds `Ω(δ)` from below by `v_i δ/δ_i` when `δ < δ_i`.
    pub fn from_witnesses(kind: ModulusKind, deltas: &[f64], witnesses: &[ModulusWitness]) -> Result<Self> {
        check_grid(deltas)?;
        for (i, w) in witnesses.iter().enumerate() {
            if w.kind != kind {
                return Err(Error::arg(alloc::format!("witness {i} is {} but the envelope is {kind}", w.kind)));
            }
            w.validate()?;
        }
        let mut raw = Vec::with_capacity(deltas.len());
        let mut provenance = Vec::with_capacity(deltas.len());
        for &d in deltas {
            let mut best = (0.0, None);
            for (i, w) in witnesses.iter().enumerate() {
                let v = if w.delta <= d {
                    w.value
                } else if kind.scales() {
                    w.value * (d / w.delta)
                } else {
                    continue;
                };
                if v > best.0 {
                    best = (v, Some(i));
                }
            }
            raw.push(best.0);
            provenance.push(best.1);
        }
        let lower_values = close(deltas, &raw);
        let env = ModulusEnvelope { kind, deltas: deltas.to_vec(), lower_values, provenance };
        env.verify()?;
        Ok(env)
    }

    /// Checks monotonicity of `E` and of `E(δ)/δ` exactly in floating point.
    pub fn verify(&self) -> Result<()> {
        check_grid(&self.deltas)?;
        let n = self.deltas.len();
        if self.lower_values.len() != n || self.provenance.len() != n {
            return Err(Error::arg("envelope arrays differ in length"));
        }
        if !self.lower_values.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(Error::arg("envelope values must be finite and nonnegative"));
        }
        for k in 1..n {
            let (a, b) = (self.lower_values[k - 1], self.lower_values[k]);
            if b < a {
                return Err(Error::Validation { what: alloc::format!("envelope decreases at index {k}"), defect: a - b });
            }
            let (ra, rb) = (a / self.deltas[k - 1], b / self.deltas[k]);
            if rb > ra {
                return Err(Error::Validation { what: alloc::format!("envelope ratio increases at index {k}"), defect: rb - ra });
            }
        }
        Ok(())
    }

    /// Lower bound at an arbitrary `δ`: the largest grid value at or below `δ`.
    pub fn lower_at(&self, delta: f64) -> f64 {
        self.deltas
            .iter()
            .zip(&self.lower_values)
            .filter(|(d, _)| **d <= delta)
            .map(|(_, v)| *v)
            .fold(0.0, f64::max)
    }
}

/// Largest sequence below `raw` that is nondecreasing with nonincreasing ratio to `δ`.
fn close(deltas: &[f64], raw: &[f64]) -> Vec<f64> {
    let n = deltas.len();
    let mut mono = raw.to_vec();
    for k in 1..n {
        mono[k] = mono[k].max(mono[k - 1]);
    }
    let mut e: Vec<f64> =
        (0..n).map(|k| (0..=k).map(|j| mono[j] * (deltas[k] / deltas[j])).fold(f64::INFINITY, f64::min)).collect();
    for k in 1..n {
        e[k] = e[k].max(e[k - 1]);
        let prev = e[k - 1] / deltas[k - 1];
        let mut steps = 0;
        while e[k] / deltas[k] > prev {
            e[k] = e[k].next_down();
            steps += 1;
            if e[k] <= e[k - 1] || steps > 64 {
                e[k] = e[k - 1];
                break;
            }
        }
    }
    e
}
