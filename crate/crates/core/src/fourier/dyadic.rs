//! The dyadic function `h` with `h(z) = z̄/z` on `δ ≤ |z| ≤ r`, `h(0) = 0`,
//! built from dilates of a single band `ψ(w) = (w̄/w)(φ(|w|/2) − φ(|w|))`.

use core::sync::atomic::{AtomicU64, Ordering};

#[allow(unused_imports)]
use num_traits::Float;

use super::bump;
use super::grid::{inverse_fourier_grid, GridParams};
use super::l1hat::{l1hat_norm, DecayBound, L1HatNorm};
use crate::error::{Error, Result};
use crate::C64;

/// One band, supported on `1 ≤ |w| ≤ 4`.
pub fn psi_band(w: C64) -> C64 {
    let r = w.norm();
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let a = bump(0.5 * r) - bump(r);
    if a == 0.0 {
        return C64::new(0.0, 0.0);
    }
    (w.conj() / w) * a
}

const BAND_GRID: GridParams = GridParams { half_width: 8.0, samples: 512, supersample: 2, taper: false };

static BAND_NORM: AtomicU64 = AtomicU64::new(0);
static BAND_ERR: AtomicU64 = AtomicU64::new(0);

fn compute_band_norm() -> Result<L1HatNorm> {
    // Decay constant fitted on the outer ring of a first pass.
    let g = inverse_fourier_grid(&psi_band, BAND_GRID)?;
    let r = BAND_GRID.frequency_radius();
    let p = 3.0;
    let constant = 2.0
        * g.points()
            .filter(|(z, _)| z.norm() >= 0.5 * r && z.norm() <= r)
            .map(|(z, v)| v.norm() * (1.0 + z.norm()).powf(p))
            .fold(0.0, f64::max);
    l1hat_norm(&psi_band, BAND_GRID, DecayBound { constant, exponent: p })
}

/// `‖ψ‖_{L̂¹}` with its error bound, computed once per process.
pub fn psi_band_norm() -> Result<(f64, f64)> {
    let bits = BAND_NORM.load(Ordering::Acquire);
    if bits != 0 {
        return Ok((f64::from_bits(bits), f64::from_bits(BAND_ERR.load(Ordering::Acquire))));
    }
    let n = compute_band_norm()?;
    BAND_ERR.store(n.error.to_bits(), Ordering::Release);
    BAND_NORM.store(n.value.to_bits(), Ordering::Release);
    Ok((n.value, n.error))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicH {
    pub delta: f64,
    pub r: f64,
    pub bands: usize,
    /// `bands · ‖ψ‖_{L̂¹}`, an upper bound for `‖h‖_{L̂¹}` up to `bound_error`.
    pub bound: f64,
    pub bound_error: f64,
}

impl DyadicH {
    pub fn eval(&self, z: C64) -> C64 {
        let w = z * (2.0 / self.delta);
        (0..self.bands).map(|k| psi_band(w * 0.5f64.powi(k as i32))).sum()
    }
}

/// Bands needed so that `δ·2^{n−1} ≥ r`.
pub fn band_count(delta: f64, r: f64) -> usize {
    1 + ((r / delta).log2() - 1e-12).ceil().max(0.0) as usize
}

pub fn dyadic_h(delta: f64, r: f64) -> Result<DyadicH> {
    if !(delta > 0.0 && delta < r && r.is_finite()) {
        return Err(Error::arg("dyadic_h needs 0 < delta < r"));
    }
    let bands = band_count(delta, r);
    let (norm, err) = psi_band_norm()?;
    Ok(DyadicH { delta, r, bands, bound: bands as f64 * norm, bound_error: bands as f64 * err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, uniform};

    #[test]
    fn annulus_identity() {
        let mut rng = seeded(5);
        for &(delta, r) in &[(2.0, 16.0), (0.5, 3.0), (1.0, 64.0), (1.0, 2.0)] {
            let h = dyadic_h(delta, r).unwrap();
            assert_eq!(h.eval(C64::new(0.0, 0.0)), C64::new(0.0, 0.0));
            for _ in 0..500 {
                let rho = uniform(&mut rng, delta, r);
                let z = C64::from_polar(rho, uniform(&mut rng, -3.2, 3.2));
                let v = h.eval(z) * z / z.conj();
                assert!((v - 1.0).norm() < 1e-10, "delta={delta} r={r} z={z}");
            }
        }
    }

    #[test]
    fn band_counts() {
        for n in 1..8 {
            assert_eq!(band_count(2.0, 2f64.powi(n)), n as usize);
        }
        assert_eq!(band_count(1.0, 2.0), 2);
        assert!(dyadic_h(2.0, 2.0).is_err());
    }

    #[test]
    fn bound_is_linear_in_bands() {
        let a = dyadic_h(1.0, 8.0).unwrap();
        let b = dyadic_h(1.0, 16.0).unwrap();
        assert!((b.bound / a.bound - (1.0 + 1.0 / a.bands as f64)).abs() < 1e-12);
        let (norm, err) = psi_band_norm().unwrap();
        assert!(norm > 1.0 && err < 1e-2 * norm, "{norm} {err}");
    }
}
