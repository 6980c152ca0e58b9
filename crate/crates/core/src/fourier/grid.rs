//! Sampled planar functions and the gridded inverse Fourier transform
//! `(ℱ⁻¹f)(ζ) = (1/4π²) ∫ f(ξ) exp(i Re(ξ ζ̄)) dm₂(ξ)`.

use alloc::vec;
use alloc::vec::Vec;

use super::fft::fft2;
use super::smooth_step;
use crate::error::{Error, Result};
use crate::C64;

/// Samples of a function on `[-W, W)²` at `-W + a·h`, `h = 2W/N`.
/// Layout is `values[b * N + a]` for the point `(-W + a h) + i(-W + b h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarGrid {
    pub half_width: f64,
    pub samples_per_axis: usize,
    pub values: Vec<C64>,
}

fn check_shape(half_width: f64, n: usize) -> Result<()> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::arg("grid half width must be positive and finite"));
    }
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::arg("samples per axis must be a power of two, at least 2"));
    }
    Ok(())
}

impl PlanarGrid {
    pub fn sample(f: impl Fn(C64) -> C64, half_width: f64, n: usize) -> Result<PlanarGrid> {
        check_shape(half_width, n)?;
        let h = 2.0 * half_width / n as f64;
        let mut values = Vec::with_capacity(n * n);
        for b in 0..n {
            for a in 0..n {
                let v = f(C64::new(-half_width + a as f64 * h, -half_width + b as f64 * h));
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite(values.len()));
                }
                values.push(v);
            }
        }
        Ok(PlanarGrid { half_width, samples_per_axis: n, values })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.samples_per_axis as f64
    }

    pub fn point(&self, a: usize, b: usize) -> C64 {
        let h = self.spacing();
        C64::new(-self.half_width + a as f64 * h, -self.half_width + b as f64 * h)
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.values[b * self.samples_per_axis + a]
    }
}

/// Discretization of the inverse transform. `supersample` splits every cell
/// into `s×s` sub-cells; `taper` multiplies by a smooth radial cutoff equal to 1 on
/// `|ξ| ≤ W/2` and 0 beyond `0.95 W`, for integrands that decay slowly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridParams {
    pub half_width: f64,
    pub samples: usize,
    pub supersample: usize,
    pub taper: bool,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams { half_width: 64.0, samples: 1024, supersample: 4, taper: false }
    }
}

impl GridParams {
    pub fn validate(&self) -> Result<()> {
        check_shape(self.half_width, self.samples)?;
        if self.supersample == 0 || self.supersample > 64 {
            return Err(Error::arg("supersample must be in 1..=64"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.samples as f64
    }

    /// Output spacing `Δ = π/W`.
    pub fn frequency_spacing(&self) -> f64 {
        core::f64::consts::PI / self.half_width
    }

    /// Radius of the largest disc inside the output grid.
    pub fn frequency_radius(&self) -> f64 {
        (self.samples / 2) as f64 * self.frequency_spacing()
    }

    pub fn refined(&self) -> GridParams {
        GridParams { samples: self.samples * 2, ..*self }
    }

    pub fn taper_at(&self, rho: f64) -> f64 {
        if !self.taper {
            return 1.0;
        }
        let (a, b) = (0.5 * self.half_width, 0.95 * self.half_width);
        smooth_step((b - rho) / (b - a))
    }
}

/// Values at `ζ = (i − N/2)Δ + i(j − N/2)Δ`, layout `values[j * N + i]`.
#[derive(Clone, Debug)]
pub struct FourierGrid {
    pub params: GridParams,
    pub values: Vec<C64>,
    /// Difference against the half-density sub-sum (when `supersample` is even)
    /// plus a truncation proxy from the window edge.
    pub error_estimate: f64,
}

impl FourierGrid {
    pub fn n(&self) -> usize {
        self.params.samples
    }

    pub fn zeta(&self, i: usize, j: usize) -> C64 {
        let d = self.params.frequency_spacing();
        let h = (self.n() / 2) as f64;
        C64::new((i as f64 - h) * d, (j as f64 - h) * d)
    }

    pub fn value(&self, i: usize, j: usize) -> C64 {
        self.values[j * self.n() + i]
    }

    pub fn points(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |j| (0..n).map(move |i| (self.zeta(i, j), self.value(i, j))))
    }

    /// `max |grid − exact|` over grid points with `lo ≤ |ζ| ≤ hi`.
    pub fn max_error(&self, exact: impl Fn(C64) -> C64, lo: f64, hi: f64) -> f64 {
        self.points()
            .filter(|(z, _)| z.norm() >= lo && z.norm() <= hi)
            .map(|(z, v)| (v - exact(z)).norm())
            .fold(0.0, f64::max)
    }

    /// `sup |value| · weight(|ζ|)` over `|ζ| ≤ hi`.
    pub fn weighted_sup(&self, weight: impl Fn(f64) -> f64, hi: f64) -> f64 {
        self.points()
            .filter(|(z, _)| z.norm() <= hi)
            .map(|(z, v)| v.norm() * weight(z.norm()))
            .fold(0.0, f64::max)
    }
}

fn phases(n: usize, offset: f64, delta: f64) -> Vec<C64> {
    (0..n)
        .map(|i| {
            let k = i as i64 - (n / 2) as i64;
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            C64::from_polar(sign, offset * k as f64 * delta)
        })
        .collect()
}

/// Riemann sum on the sub-sampled grid, evaluated exactly at the output
/// frequencies by one FFT per sub-cell offset.
pub fn inverse_fourier_grid(f: &dyn Fn(C64) -> C64, params: GridParams) -> Result<FourierGrid> {
    params.validate()?;
    let n = params.samples;
    let w = params.half_width;
    let s = params.supersample;
    let h = params.spacing();
    let hs = h / s as f64;
    let delta = params.frequency_spacing();
    let mut acc = vec![C64::new(0.0, 0.0); n * n];
    let mut half = if s % 2 == 0 { Some(vec![C64::new(0.0, 0.0); n * n]) } else { None };
    let mut buf = vec![C64::new(0.0, 0.0); n * n];
    let mut edge: f64 = 0.0;
    for mx in 0..s {
        for my in 0..s {
            let dx = (mx as f64 - 0.5 * (s - 1) as f64) * hs;
            let dy = (my as f64 - 0.5 * (s - 1) as f64) * hs;
            for b in 0..n {
                let y = -w + b as f64 * h + dy;
                for a in 0..n {
                    let x = -w + a as f64 * h + dx;
                    let xi = C64::new(x, y);
                    let v = f(xi) * params.taper_at(xi.norm());
                    if !(v.re.is_finite() && v.im.is_finite()) {
                        return Err(Error::NonFinite(b * n + a));
                    }
                    if a == 0 || b == 0 {
                        edge = edge.max(v.norm());
                    }
                    buf[b * n + a] = v;
                }
            }
            fft2(&mut buf, n, true)?;
            let px = phases(n, dx, delta);
            let py = phases(n, dy, delta);
            let even = mx % 2 == 0 && my % 2 == 0;
            for j in 0..n {
                let sj = (j + n / 2) % n;
                for i in 0..n {
                    let si = (i + n / 2) % n;
                    let v = px[i] * py[j] * buf[sj * n + si];
                    acc[j * n + i] += v;
                    if even {
                        if let Some(hv) = half.as_mut() {
                            hv[j * n + i] += v;
                        }
                    }
                }
            }
        }
    }
    let weight = hs * hs / (4.0 * core::f64::consts::PI * core::f64::consts::PI);
    acc.iter_mut().for_each(|v| *v *= weight);
    let mut error_estimate = edge * (2.0 * w) * (2.0 * w) / (4.0 * core::f64::consts::PI * core::f64::consts::PI);
    if let Some(hv) = half {
        let d = acc
            .iter()
            .zip(&hv)
            .map(|(a, b)| (a - b * (4.0 * weight)).norm())
            .fold(0.0, f64::max);
        error_estimate += d;
    }
    Ok(FourierGrid { params, values: acc, error_estimate })
}
