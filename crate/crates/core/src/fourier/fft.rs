//! Iterative radix-2 FFT, unnormalized in both directions.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::C64;

/// In place. `inverse = false` uses `exp(-2πi jk/n)`, `true` uses `exp(+2πi jk/n)`.
pub fn fft(data: &mut [C64], inverse: bool) -> Result<()> {
    let n = data.len();
    if !n.is_power_of_two() {
        return Err(Error::arg("FFT length must be a power of two"));
    }
    let bits = n.trailing_zeros();
    if bits == 0 {
        return Ok(());
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let twiddles: Vec<C64> = (0..n / 2)
        .map(|k| C64::from_polar(1.0, sign * 2.0 * core::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = twiddles[k * stride];
                let a = data[start + k];
                let b = data[start + k + len / 2] * w;
                data[start + k] = a + b;
                data[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
    Ok(())
}

/// Separable 2D transform of a row-major `n×n` array.
pub fn fft2(data: &mut [C64], n: usize, inverse: bool) -> Result<()> {
    if data.len() != n * n {
        return Err(Error::arg("fft2 expects an n×n array"));
    }
    for row in data.chunks_mut(n) {
        fft(row, inverse)?;
    }
    let mut col = alloc::vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft(&mut col, inverse)?;
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_normal, seeded};

    fn naive(x: &[C64], inverse: bool) -> Vec<C64> {
        let n = x.len();
        let s = if inverse { 1.0 } else { -1.0 };
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| x[j] * C64::from_polar(1.0, s * 2.0 * core::f64::consts::PI * (j * k) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let mut r = seeded(3);
        for n in [1, 2, 8, 64] {
            let x: Vec<C64> = (0..n).map(|_| complex_normal(&mut r)).collect();
            for inv in [false, true] {
                let mut y = x.clone();
                fft(&mut y, inv).unwrap();
                let z = naive(&x, inv);
                assert!(y.iter().zip(&z).all(|(a, b)| (a - b).norm() < 1e-11));
            }
        }
        assert!(fft(&mut [C64::new(0.0, 0.0); 3], false).is_err());
    }

    #[test]
    fn round_trip_2d() {
        let mut r = seeded(4);
        let x: Vec<C64> = (0..256).map(|_| complex_normal(&mut r)).collect();
        let mut y = x.clone();
        fft2(&mut y, 16, false).unwrap();
        fft2(&mut y, 16, true).unwrap();
        assert!(y.iter().zip(&x).all(|(a, b)| (a / 256.0 - b).norm() < 1e-13));
    }
}
