//! Closed-form inverse transforms used to validate the grid transform.

use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use super::bessel::{j1, j2};
use super::grid::{inverse_fourier_grid, FourierGrid, GridParams};
use crate::error::{Error, Result};
use crate::function::psi;
use crate::C64;

const PI: f64 = core::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formula {
    /// Indicator of the unit disc; `J1(|ζ|)/(2π|ζ|)`.
    ChiDisc,
    /// `Ψ`; `i J1(|ζ|)/(π ζ |ζ|)`.
    Psi,
    /// `Ψ²`; `−2 J2(|ζ|)/(π ζ²)`.
    PsiSquared,
    /// `exp(−|ξ|²/2)`; `exp(−|ζ|²/2)/(2π)`.
    Gaussian,
}

impl Formula {
    pub const ALL: [Formula; 4] = [Formula::ChiDisc, Formula::Psi, Formula::PsiSquared, Formula::Gaussian];

    pub fn id(&self) -> &'static str {
        match self {
            Formula::ChiDisc => "chi_disc",
            Formula::Psi => "psi",
            Formula::PsiSquared => "psi_sq",
            Formula::Gaussian => "gaussian",
        }
    }

    pub fn source(&self, xi: C64) -> C64 {
        match self {
            Formula::ChiDisc => C64::new(if xi.norm() <= 1.0 { 1.0 } else { 0.0 }, 0.0),
            Formula::Psi => psi(xi),
            Formula::PsiSquared => {
                let p = psi(xi);
                p * p
            }
            Formula::Gaussian => C64::new((-0.5 * xi.norm_sqr()).exp(), 0.0),
        }
    }

    pub fn exact(&self, zeta: C64) -> C64 {
        let rho = zeta.norm();
        match self {
            Formula::ChiDisc => {
                let v = if rho == 0.0 { 0.25 / PI } else { j1(rho) / (2.0 * PI * rho) };
                C64::new(v, 0.0)
            }
            Formula::Psi => {
                if rho == 0.0 {
                    C64::new(f64::NAN, f64::NAN)
                } else {
                    C64::new(0.0, j1(rho) / (PI * rho)) / zeta
                }
            }
            Formula::PsiSquared => {
                if rho == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    -(zeta * zeta).inv() * (2.0 * j2(rho) / PI)
                }
            }
            Formula::Gaussian => C64::new((-0.5 * rho * rho).exp() / (2.0 * PI), 0.0),
        }
    }

    /// Integrands that are not integrable on the plane get a smooth radial taper.
    pub fn needs_taper(&self) -> bool {
        matches!(self, Formula::Psi | Formula::PsiSquared)
    }

    /// Annulus `lo ≤ |ζ| ≤ hi` on which the error is measured.
    pub fn check_region(&self) -> (f64, f64) {
        match self {
            Formula::Psi | Formula::PsiSquared => (1.0, 10.0),
            _ => (0.0, 10.0),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Formula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Formula> {
        Formula::ALL
            .iter()
            .copied()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::Parse(alloc::format!("unknown formula id {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct FormulaCheck {
    pub formula: Formula,
    pub half_width: f64,
    pub samples: usize,
    pub max_abs_error: f64,
    pub error_estimate: f64,
}

pub fn formula_grid(formula: Formula, params: GridParams) -> Result<FourierGrid> {
    let p = GridParams { taper: params.taper || formula.needs_taper(), ..params };
    inverse_fourier_grid(&|z| formula.source(z), p)
}

pub fn formula_check(formula: Formula, params: GridParams) -> Result<FormulaCheck> {
    let g = formula_grid(formula, params)?;
    let (lo, hi) = formula.check_region();
    Ok(FormulaCheck {
        formula,
        half_width: params.half_width,
        samples: params.samples,
        max_abs_error: g.max_error(|z| formula.exact(z), lo, hi),
        error_estimate: g.error_estimate,
    })
}

/// `sup |ℱ⁻¹(Ψ²)(ζ)| (1 + |ζ|^{5/2})` over grid points with `|ζ| ≤ radius`.
pub fn decay_statistic(params: GridParams, radius: f64) -> Result<f64> {
    let g = formula_grid(Formula::PsiSquared, params)?;
    Ok(g.weighted_sup(|r| 1.0 + r.powf(2.5), radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for f in Formula::ALL {
            assert_eq!(f.id().parse::<Formula>().unwrap(), f);
        }
        assert!("nope".parse::<Formula>().is_err());
    }

    #[test]
    fn small_grid_chi_disc() {
        let p = GridParams { half_width: 4.0, samples: 256, supersample: 2, taper: false };
        let c = formula_check(Formula::ChiDisc, p).unwrap();
        assert!(c.max_abs_error < 2e-3, "{}", c.max_abs_error);
    }
}
