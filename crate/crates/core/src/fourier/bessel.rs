//! Bessel functions of the first kind, orders 0, 1, 2.
//!
//! Power series for small arguments, Miller's backward recurrence up to
//! `x = 30` and the Hankel asymptotic expansion beyond.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const SERIES_MAX: f64 = 2.0;
const MILLER_MAX: f64 = 30.0;

fn series(n: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= 0.5 * x / k as f64;
    }
    let mut sum = term;
    for k in 1..60u32 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `(J0, J1, J2)` by backward recurrence normalized with `J0 + 2 Σ J_2k = 1`.
fn miller(x: f64) -> [f64; 3] {
    let start = 2 * ((x + 20.0 + 4.0 * x.cbrt() * 3.0) as usize / 2 + 1);
    let (mut jp, mut j) = (0.0, 1e-30);
    let mut out = [0.0; 3];
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let jm = 2.0 * k as f64 / x * j - jp;
        jp = j;
        j = jm;
        let order = k - 1;
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * j;
        }
        if order <= 2 {
            out[order] = j;
        }
        if j.abs() > 1e200 {
            j *= 1e-200;
            jp *= 1e-200;
            norm *= 1e-200;
            out.iter_mut().for_each(|v| *v *= 1e-200);
        }
    }
    norm += out[0];
    [out[0] / norm, out[1] / norm, out[2] / norm]
}

fn hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let (mut p, mut q) = (1.0, 0.0);
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..40u32 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() > last || a == 0.0 {
            break;
        }
        last = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            let s = if ((k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            q += s * a;
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * n as f64 + 0.25) * core::f64::consts::PI;
    (2.0 / (core::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `J_order(x)` for `order ∈ {0, 1, 2}` and `x ≥ 0`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if order > 2 {
        return Err(Error::arg("bessel_j supports orders 0, 1, 2"));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::arg("bessel_j needs a finite nonnegative argument"));
    }
    Ok(j_unchecked(order, x))
}

pub(crate) fn j_unchecked(order: u32, x: f64) -> f64 {
    if x <= SERIES_MAX {
        series(order, x)
    } else if x <= MILLER_MAX {
        miller(x)[order as usize]
    } else {
        hankel(order, x)
    }
}

pub fn j0(x: f64) -> f64 {
    j_unchecked(0, x.abs())
}

/// Odd extension for negative arguments.
pub fn j1(x: f64) -> f64 {
    j_unchecked(1, x.abs()) * x.signum()
}

pub fn j2(x: f64) -> f64 {
    j_unchecked(2, x.abs())
}

/// Constant `c` in `|J1(x)| ≤ c x^{-1/2}`; the supremum of `√x |J1(x)|` is about 0.82503, near `x = 2.166`.
pub const J1_DECAY: f64 = 0.83;

/// Bound `|J1(x)| ≤ min(x/2, J1_DECAY x^{-1/2})` for `x > 0`.
pub fn j1_envelope(x: f64) -> f64 {
    (0.5 * x).min(J1_DECAY / x.sqrt())
}

/// The `k`-th positive zero of `J1` (`k ≥ 1`), by Newton from McMahon's estimate.
pub fn j1_zero(k: usize) -> f64 {
    let beta = (k as f64 + 0.25) * core::f64::consts::PI;
    let mut x = beta - 3.0 / (8.0 * beta);
    for _ in 0..50 {
        let f = j1(x);
        let df = j0(x) - f / x;
        let step = f / df;
        x -= step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Alternating series with the remainder bounded by the first omitted term.
    fn series_oracle(n: u32, x: f64) -> (f64, f64) {
        let mut sum = 0.0;
        let mut k = 0u32;
        loop {
            let mut t = (0.5 * x).powi((2 * k + n) as i32);
            for j in 1..=k {
                t /= j as f64;
            }
            for j in 1..=(k + n) {
                t /= j as f64;
            }
            t *= if k % 2 == 0 { 1.0 } else { -1.0 };
            if t.abs() < 1e-19 && k as f64 > x {
                return (sum, t.abs());
            }
            sum += t;
            k += 1;
        }
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(2, 0.0).unwrap(), 0.0);
        assert!(bessel_j(1, -1.0).is_err());
        assert!(bessel_j(3, 1.0).is_err());
    }

    #[test]
    fn j1_at_one() {
        let (oracle, rem) = series_oracle(1, 1.0);
        assert!(rem < 1e-15);
        let v = bessel_j(1, 1.0).unwrap();
        assert!((v - oracle).abs() < 1e-10);
        assert!((v - 0.44005058574493355).abs() < 1e-15);
        assert!((bessel_j(2, 3.0).unwrap() - 0.4860912605858912).abs() < 1e-14);
    }

    #[test]
    fn miller_agrees_with_series() {
        for i in 0..=80 {
            let x = 2.0 + i as f64 * 0.1;
            let m = miller(x);
            for n in 0..3 {
                let (s, _) = series_oracle(n, x);
                assert!((m[n as usize] - s).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn hankel_agrees_with_miller_near_switch() {
        for i in 0..=50 {
            let x = 25.0 + i as f64 * 0.1;
            let m = miller(x);
            for n in 0..3 {
                assert!((hankel(n, x) - m[n as usize]).abs() < 1e-9, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn recurrence_and_envelope() {
        for i in 1..4000 {
            let x = i as f64 * 0.05;
            let r = j0(x) + j2(x) - 2.0 * j1(x) / x;
            assert!(r.abs() < 1e-9, "x={x}: {r}");
            assert!(j1(x).abs() <= j1_envelope(x) + 1e-12);
        }
    }

    #[test]
    fn zeros() {
        assert!((j1_zero(1) - 3.8317059702075125).abs() < 1e-12);
        for k in [1, 2, 10, 100, 500] {
            assert!(j1(j1_zero(k)).abs() < 1e-12);
        }
    }
}
