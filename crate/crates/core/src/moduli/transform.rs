//! Scalar moduli of continuity and the transforms
//! `ω*(δ) = δ ∫_δ^∞ ω(t)/t² dt` and `ω**(δ) = δ ∫_δ^∞ ω(t) log(t/δ)/t² dt`.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ModulusSpec {
    /// `t^α`, `0 < α ≤ 1`.
    Power(f64),
    /// `min(t^α, cap)`.
    BoundedPower { alpha: f64, cap: f64 },
    Linear,
    /// Piecewise linear through `(0, 0)` and the samples, extended past the last
    /// sample by the power law through the last two.
    Table { t: Vec<f64>, w: Vec<f64> },
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::arg(format!("modulus exponent {alpha} outside (0, 1]")));
    }
    Ok(())
}

impl ModulusSpec {
    pub fn power(alpha: f64) -> Result<ModulusSpec> {
        check_alpha(alpha)?;
        Ok(ModulusSpec::Power(alpha))
    }

    pub fn bounded_power(alpha: f64, cap: f64) -> Result<ModulusSpec> {
        check_alpha(alpha)?;
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(Error::arg("cap must be positive"));
        }
        Ok(ModulusSpec::BoundedPower { alpha, cap })
    }

    pub fn table(t: Vec<f64>, w: Vec<f64>) -> Result<ModulusSpec> {
        if t.len() != w.len() || t.len() < 2 {
            return Err(Error::arg("table needs at least two (t, w) pairs of equal length"));
        }
        if !(t[0] > 0.0) || t.windows(2).any(|p| !(p[1] > p[0])) || t.iter().any(|x| !x.is_finite()) {
            return Err(Error::arg("table abscissae must be positive and strictly increasing"));
        }
        if !(w[0] >= 0.0) || w.windows(2).any(|p| !(p[1] >= p[0])) || w.iter().any(|x| !x.is_finite()) {
            return Err(Error::arg("table values must be nonnegative and nondecreasing"));
        }
        Ok(ModulusSpec::Table { t, w })
    }

    /// Exponent of the tail past the last table point.
    fn tail_exponent(t: &[f64], w: &[f64]) -> f64 {
        let n = t.len();
        let (w0, w1) = (w[n - 2], w[n - 1]);
        if w1 == 0.0 {
            return 0.0;
        }
        if w0 == 0.0 {
            return f64::INFINITY;
        }
        (w1 / w0).ln() / (t[n - 1] / t[n - 2]).ln()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            ModulusSpec::Power(a) => x.powf(*a),
            ModulusSpec::BoundedPower { alpha, cap } => x.powf(*alpha).min(*cap),
            ModulusSpec::Linear => x,
            ModulusSpec::Table { t, w } => {
                let n = t.len();
                if x >= t[n - 1] {
                    let b = Self::tail_exponent(t, w);
                    return w[n - 1] * (x / t[n - 1]).powf(b);
                }
                let i = t.partition_point(|&s| s <= x);
                let (t0, w0) = if i == 0 { (0.0, 0.0) } else { (t[i - 1], w[i - 1]) };
                w0 + (w[i] - w0) * (x - t0) / (t[i] - t0)
            }
        }
    }

    /// Spot check of monotonicity and `ω(x + y) ≤ ω(x) + ω(y) + 1e-10` on a grid.
    pub fn check_subadditive(&self, grid: &[f64]) -> Result<()> {
        let mut worst: f64 = 0.0;
        for (i, &x) in grid.iter().enumerate() {
            for &y in &grid[i..] {
                worst = worst.max(self.eval(x + y) - self.eval(x) - self.eval(y));
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                worst = worst.max(self.eval(lo) - self.eval(hi));
            }
        }
        if worst > 1e-10 {
            return Err(Error::Validation { what: "modulus is not monotone and subadditive".into(), defect: worst });
        }
        Ok(())
    }
}

/// `∫_1^S s^{-γ-1} log s ds`.
fn log_moment(gamma: f64, s: f64) -> f64 {
    let l = s.ln();
    if gamma == 0.0 {
        return 0.5 * l * l;
    }
    1.0 / (gamma * gamma) - s.powf(-gamma) * (l / gamma + 1.0 / (gamma * gamma))
}

/// `∫_1^S s^{-γ-1} ds`.
fn moment(gamma: f64, s: f64) -> f64 {
    if gamma == 0.0 {
        s.ln()
    } else {
        (1.0 - s.powf(-gamma)) / gamma
    }
}

fn bounded_power(alpha: f64, cap: f64, delta: f64, order: u8) -> f64 {
    let knee = cap.powf(1.0 / alpha);
    if delta >= knee {
        return cap;
    }
    let gamma = 1.0 - alpha;
    let s = knee / delta;
    let lead = delta.powf(alpha);
    let tail = cap * delta / knee;
    if order == 1 {
        lead * moment(gamma, s) + tail
    } else {
        lead * log_moment(gamma, s) + tail * (s.ln() + 1.0)
    }
}

fn table(t: &[f64], w: &[f64], delta: f64, order: u8) -> f64 {
    let n = t.len();
    let b = ModulusSpec::tail_exponent(t, w);
    if !(b < 1.0 - 1e-12) {
        return f64::INFINITY;
    }
    let gamma = 1.0 - b;
    let last = t[n - 1];
    let lg = |x: f64| (x / delta).ln();
    let mut total = 0.0;
    if delta < last {
        let mut knots = Vec::with_capacity(n + 1);
        knots.push((0.0, 0.0));
        knots.extend(t.iter().cloned().zip(w.iter().cloned()));
        for k in knots.windows(2) {
            let ((t0, w0), (t1, w1)) = (k[0], k[1]);
            if t1 <= delta {
                continue;
            }
            let a = t0.max(delta);
            let q = (w1 - w0) / (t1 - t0);
            let p = w0 - q * t0;
            total += if order == 1 {
                p * (1.0 / a - 1.0 / t1) + q * (t1 / a).ln()
            } else {
                p * ((lg(a) + 1.0) / a - (lg(t1) + 1.0) / t1) + 0.5 * q * (lg(t1) * lg(t1) - lg(a) * lg(a))
            };
        }
        let wl = w[n - 1];
        total += if order == 1 {
            wl / (last * gamma)
        } else {
            wl / last * (lg(last) / gamma + 1.0 / (gamma * gamma))
        };
        delta * total
    } else {
        let v = w[n - 1] * (delta / last).powf(b);
        if order == 1 {
            v / gamma
        } else {
            v / (gamma * gamma)
        }
    }
}

/// `ω*(δ)` for `order = 1` and `ω**(δ)` for `order = 2`; `+∞` when the integral diverges.
pub fn omega_transform(omega: &ModulusSpec, delta: f64, order: u8) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::arg("omega_transform needs delta > 0"));
    }
    if order != 1 && order != 2 {
        return Err(Error::arg(format!("transform order {order} is not 1 or 2")));
    }
    Ok(match omega {
        ModulusSpec::Linear => f64::INFINITY,
        ModulusSpec::Power(a) if *a >= 1.0 => f64::INFINITY,
        ModulusSpec::Power(a) => delta.powf(*a) / (1.0 - a).powi(order as i32),
        ModulusSpec::BoundedPower { alpha, cap } => bounded_power(*alpha, *cap, delta, order),
        ModulusSpec::Table { t, w } => table(t, w, delta, order),
    })
}
