//! `‖f‖_{L̂¹} = ‖ℱ⁻¹f‖_{L¹}` and the constant `c = ½‖Ψ‖_{L̂¹}`.

use core::sync::atomic::{AtomicU64, Ordering};

#[allow(unused_imports)]
use num_traits::Float;

use super::bessel::{j1, j1_zero};
use super::grid::{inverse_fourier_grid, GridParams};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, gauss_legendre_rule};
use crate::C64;

const PI: f64 = core::f64::consts::PI;

/// `|ℱ⁻¹f(ζ)| ≤ constant·(1 + |ζ|)^{−exponent}` for `|ζ|` beyond the grid radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayBound {
    pub constant: f64,
    pub exponent: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct L1HatNorm {
    pub value: f64,
    /// Grid part plus tail, each bounded; `error` covers both.
    pub grid_part: f64,
    pub tail_bound: f64,
    pub error: f64,
}

/// Riemann sum of `|ℱ⁻¹f|` over the grid disc plus the tail
/// `2πC (1+R)^{2−p}/(p−2)` from the decay bound. The tail is added to the value.
pub fn l1hat_norm(f: &dyn Fn(C64) -> C64, params: GridParams, decay: DecayBound) -> Result<L1HatNorm> {
    if !(decay.exponent > 2.0) {
        return Err(Error::Precondition("decay exponent must exceed 2 to bound the tail".into()));
    }
    if !(decay.constant >= 0.0 && decay.constant.is_finite()) {
        return Err(Error::arg("decay constant must be finite and nonnegative"));
    }
    let g = inverse_fourier_grid(f, params)?;
    let r = params.frequency_radius();
    let d = params.frequency_spacing();
    let grid_part: f64 = g.points().filter(|(z, _)| z.norm() < r).map(|(_, v)| v.norm()).sum::<f64>() * d * d;
    let p = decay.exponent;
    let tail_bound = 2.0 * PI * decay.constant * (1.0 + r).powf(2.0 - p) / (p - 2.0);
    let discretization = g.error_estimate * PI * r * r;
    Ok(L1HatNorm {
        value: grid_part + 0.5 * tail_bound,
        grid_part,
        tail_bound,
        error: 0.5 * tail_bound + discretization,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiConstant {
    pub c: f64,
    pub quadrature_error: f64,
}

static PSI_CONSTANT_BITS: AtomicU64 = AtomicU64::new(0);

const PSI_ZEROS: usize = 640;

fn compute_psi_constant() -> PsiConstant {
    let rule = gauss_legendre_rule(24);
    let f = |r: f64| j1(r).abs() / r;
    let mut total = 0.0;
    let mut a = 0.0;
    for k in 1..=PSI_ZEROS {
        let b = j1_zero(k);
        total += gauss_legendre(f, a, b, &rule);
        a = b;
    }
    // Mean value of |cos| against the leading asymptotic term sqrt(2/(πr))/r.
    let tail = (2.0 / PI) * (2.0 / PI).sqrt() * 2.0 / a.sqrt();
    PsiConstant { c: total + tail, quadrature_error: 2.0 * a.powf(-1.5) }
}

/// `c = ∫₀^∞ |J1(r)|/r dr`, so that `‖Ψ‖_{L̂¹} = 2c`. Computed once per process.
pub fn psi_constant() -> PsiConstant {
    let bits = PSI_CONSTANT_BITS.load(Ordering::Acquire);
    let err = 2.0 * j1_zero(PSI_ZEROS).powf(-1.5);
    if bits != 0 {
        return PsiConstant { c: f64::from_bits(bits), quadrature_error: err };
    }
    let v = compute_psi_constant();
    PSI_CONSTANT_BITS.store(v.c.to_bits(), Ordering::Release);
    v
}
