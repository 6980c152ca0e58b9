//! Planar Fourier analysis: Bessel functions, gridded inverse transforms,
//! `L̂¹` norms, the function Ψ with its constant, the dyadic partition
//! function `h` and band-limited smoothing.

pub mod bandlimit;
pub mod bessel;
pub mod dyadic;
pub mod fft;
pub mod grid;
pub mod identities;
pub mod l1hat;

#[allow(unused_imports)]
use num_traits::Float;

pub use bandlimit::{bandlimit_approx, Bandlimited};
pub use bessel::{bessel_j, j0, j1, j2};
pub use dyadic::{dyadic_h, psi_band_norm, DyadicH};
pub use grid::{inverse_fourier_grid, FourierGrid, GridParams, PlanarGrid};
pub use identities::{decay_statistic, formula_check, Formula, FormulaCheck};
pub use l1hat::{l1hat_norm, psi_constant, DecayBound, L1HatNorm, PsiConstant};

pub use crate::function::psi;

fn g(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// C^∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    let (a, b) = (g(t), g(1.0 - t));
    a / (a + b)
}

/// Even C^∞ bump: 1 on `[-1, 1]`, 0 outside `(-2, 2)`.
pub fn bump(x: f64) -> f64 {
    smooth_step(2.0 - x.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(-1.0), 1.0);
        assert_eq!(bump(2.0), 0.0);
        assert_eq!(bump(3.0), 0.0);
        assert!((bump(1.5) - 0.5).abs() < 1e-15);
        let mut last = 1.0;
        for i in 0..=100 {
            let v = bump(1.0 + i as f64 / 100.0);
            assert!(v <= last);
            last = v;
        }
    }
}
