//! Band-limited smoothing `f_d` with `supp ℱf_d ⊂ {|ζ| ≤ 1/d}` on a periodic grid.

use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::fft::fft2;
use super::grid::PlanarGrid;
use super::smooth_step;
use crate::error::{Error, Result};
use crate::function::{FunctionSpec, PlanarTable};

#[derive(Clone, Debug)]
pub struct Bandlimited {
    pub d: f64,
    pub grid: PlanarGrid,
    /// Largest transform coefficient of `f_d` outside the disc, relative to the largest overall.
    pub leakage: f64,
    /// `max |f − f_d|` on the inner half of the window.
    pub sup_deviation: f64,
    /// Grid estimate of `ω_f(d)` on the inner half of the window.
    pub omega_d: f64,
}

impl Bandlimited {
    pub fn to_function(&self) -> Result<FunctionSpec> {
        let w = self.grid.half_width;
        let n = self.grid.samples_per_axis;
        let t = PlanarTable::new(-w, -w, self.grid.spacing(), n, n, self.grid.values.clone())?;
        Ok(FunctionSpec::Table(Arc::new(t)))
    }
}

/// Radial multiplier: 1 on `|ω| ≤ 1/(2d)`, smooth, 0 on `|ω| ≥ 1/d`.
pub fn vallee_poussin_multiplier(omega: f64, d: f64) -> f64 {
    smooth_step((1.0 / d - omega) * 2.0 * d)
}

fn frequencies(n: usize, half_width: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let k = if k >= n / 2 { k as f64 - n as f64 } else { k as f64 };
            k * core::f64::consts::PI / half_width
        })
        .collect()
}

fn inner(grid: &PlanarGrid, a: usize, b: usize) -> bool {
    let p = grid.point(a, b);
    p.re.abs() <= 0.5 * grid.half_width && p.im.abs() <= 0.5 * grid.half_width
}

pub fn bandlimit_approx(f: &PlanarGrid, d: f64) -> Result<Bandlimited> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::arg("bandlimit radius parameter d must be positive"));
    }
    let n = f.samples_per_axis;
    let freq = frequencies(n, f.half_width);
    let mut buf = f.values.clone();
    fft2(&mut buf, n, false)?;
    for b in 0..n {
        for a in 0..n {
            let om = (freq[a] * freq[a] + freq[b] * freq[b]).sqrt();
            buf[b * n + a] *= vallee_poussin_multiplier(om, d) / (n * n) as f64;
        }
    }
    fft2(&mut buf, n, true)?;
    let out = PlanarGrid { half_width: f.half_width, samples_per_axis: n, values: buf };

    let mut spec = out.values.clone();
    fft2(&mut spec, n, false)?;
    let (mut outside, mut overall): (f64, f64) = (0.0, 0.0);
    for b in 0..n {
        for a in 0..n {
            let v = spec[b * n + a].norm();
            overall = overall.max(v);
            if (freq[a] * freq[a] + freq[b] * freq[b]).sqrt() > 1.0 / d {
                outside = outside.max(v);
            }
        }
    }
    let leakage = if overall > 0.0 { outside / overall } else { 0.0 };

    let mut sup_deviation: f64 = 0.0;
    for b in 0..n {
        for a in 0..n {
            if inner(f, a, b) {
                sup_deviation = sup_deviation.max((f.get(a, b) - out.get(a, b)).norm());
            }
        }
    }
    let h = f.spacing();
    let reach = (d / h).floor() as isize;
    let mut omega_d: f64 = 0.0;
    for b in 0..n {
        for a in 0..n {
            if !inner(f, a, b) {
                continue;
            }
            for db in 0..=reach {
                for da in -reach..=reach {
                    if (da * da + db * db) as f64 * h * h > d * d * (1.0 + 1e-12) {
                        continue;
                    }
                    let (a2, b2) = (a as isize + da, b as isize + db);
                    if a2 < 0 || b2 < 0 || a2 >= n as isize || b2 >= n as isize {
                        continue;
                    }
                    let (a2, b2) = (a2 as usize, b2 as usize);
                    if inner(f, a2, b2) {
                        omega_d = omega_d.max((f.get(a, b) - f.get(a2, b2)).norm());
                    }
                }
            }
        }
    }
    Ok(Bandlimited { d, grid: out, leakage, sup_deviation, omega_d })
}
