//! Divided differences on lattices `δℤ + iδℤ ∩ rD`, the two-sided logarithmic
//! bounds for `D₀z̄`, Toeplitz operators on lattice points and the ten-cell
//! partition of `ℂ²` near the diagonal.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fourier::dyadic::dyadic_h;
use crate::fourier::fft::fft2;
use crate::fourier::l1hat::psi_constant;
use crate::function::FunctionSpec;
use crate::linalg::{ComplexMatrix, LinearOperator};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSpec {
    pub delta: f64,
    pub r: f64,
    pub closed: bool,
}

impl LatticeSpec {
    pub fn new(delta: f64, r: f64, closed: bool) -> Result<LatticeSpec> {
        if !(delta > 0.0 && r.is_finite() && delta <= r) {
            return Err(Error::arg("lattice needs 0 < delta <= r"));
        }
        Ok(LatticeSpec { delta, r, closed })
    }

    pub fn closed(delta: f64, r: f64) -> Result<LatticeSpec> {
        LatticeSpec::new(delta, r, true)
    }
}

/// Integer coordinates `(m, n)` with `δ(m + in)` in the disc, ordered by modulus,
/// then argument in `(−π, π]`, then real part.
pub fn lattice_coords(spec: &LatticeSpec) -> Vec<(i64, i64)> {
    let q = spec.r / spec.delta;
    let lim = q * q * if spec.closed { 1.0 + 1e-12 } else { 1.0 - 1e-12 };
    let m_max = q.floor() as i64 + 1;
    let mut out = Vec::new();
    for m in -m_max..=m_max {
        for n in -m_max..=m_max {
            let s = (m * m + n * n) as f64;
            if s <= lim || (m == 0 && n == 0) {
                out.push((m, n));
            }
        }
    }
    out.sort_by(|a, b| {
        let ka = a.0 * a.0 + a.1 * a.1;
        let kb = b.0 * b.0 + b.1 * b.1;
        ka.cmp(&kb)
            .then_with(|| {
                let ta = (a.1 as f64).atan2(a.0 as f64);
                let tb = (b.1 as f64).atan2(b.0 as f64);
                ta.partial_cmp(&tb).unwrap_or(core::cmp::Ordering::Equal)
            })
            .then(a.0.cmp(&b.0))
    });
    out
}

pub fn lattice_points(spec: &LatticeSpec) -> Vec<C64> {
    lattice_coords(spec)
        .into_iter()
        .map(|(m, n)| C64::new(m as f64 * spec.delta, n as f64 * spec.delta))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DividedDifferenceMatrix {
    pub points_row: Vec<C64>,
    pub points_col: Vec<C64>,
    pub matrix: ComplexMatrix,
}

/// `(f(z_j) − f(w_k))/(z_j − w_k)`, and 0 where `z_j = w_k`.
pub fn divided_difference(f: &FunctionSpec, rows: &[C64], cols: &[C64]) -> Result<DividedDifferenceMatrix> {
    let fr = rows.iter().map(|&z| f.eval(z)).collect::<Result<Vec<_>>>()?;
    let fc = cols.iter().map(|&z| f.eval(z)).collect::<Result<Vec<_>>>()?;
    let matrix = ComplexMatrix::from_fn(rows.len(), cols.len(), |j, k| {
        let d = rows[j] - cols[k];
        if d.re == 0.0 && d.im == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            (fr[j] - fc[k]) / d
        }
    });
    Ok(DividedDifferenceMatrix { points_row: rows.to_vec(), points_col: cols.to_vec(), matrix })
}

/// Variant with `f'(z)` on coincident points; only for functions with a registered derivative.
pub fn divided_difference_with_derivative(f: &FunctionSpec, rows: &[C64], cols: &[C64]) -> Result<DividedDifferenceMatrix> {
    let mut d = divided_difference(f, rows, cols)?;
    for (j, &z) in rows.iter().enumerate() {
        for (k, &w) in cols.iter().enumerate() {
            if z == w {
                let v = f
                    .derivative(z)
                    .ok_or_else(|| Error::Precondition(format!("{f} has no analytic derivative")))?;
                d.matrix[(j, k)] = v;
            }
        }
    }
    Ok(d)
}

/// Toeplitz matrix `A_jk = κ(p_j − p_k)` on lattice points, applied by FFT convolution.
pub struct LatticeToeplitz {
    coords: Vec<(i64, i64)>,
    shift: i64,
    size: usize,
    hat: Vec<C64>,
    hat_adjoint: Vec<C64>,
}

impl LatticeToeplitz {
    pub fn new(coords: &[(i64, i64)], kernel: impl Fn(i64, i64) -> C64) -> Result<LatticeToeplitz> {
        if coords.is_empty() {
            return Err(Error::arg("no lattice points"));
        }
        let shift = coords.iter().map(|&(m, n)| m.abs().max(n.abs())).max().unwrap_or(0);
        let size = ((4 * shift + 1) as usize).next_power_of_two().max(2);
        let l = size as i64;
        let mut hat = vec![C64::new(0.0, 0.0); size * size];
        let mut hat_adjoint = hat.clone();
        for px in -2 * shift..=2 * shift {
            for py in -2 * shift..=2 * shift {
                let idx = (py.rem_euclid(l) as usize) * size + px.rem_euclid(l) as usize;
                hat[idx] = kernel(px, py);
                hat_adjoint[idx] = kernel(-px, -py).conj();
            }
        }
        fft2(&mut hat, size, false)?;
        fft2(&mut hat_adjoint, size, false)?;
        Ok(LatticeToeplitz { coords: coords.to_vec(), shift, size, hat, hat_adjoint })
    }

    fn convolve(&self, v: &[C64], hat: &[C64]) -> Vec<C64> {
        let n = self.size;
        let mut buf = vec![C64::new(0.0, 0.0); n * n];
        for (&(m, k), &x) in self.coords.iter().zip(v) {
            buf[((k + self.shift) as usize) * n + (m + self.shift) as usize] = x;
        }
        fft2(&mut buf, n, false).expect("power-of-two size");
        buf.iter_mut().zip(hat).for_each(|(b, h)| *b *= h);
        fft2(&mut buf, n, true).expect("power-of-two size");
        let scale = 1.0 / (n * n) as f64;
        self.coords
            .iter()
            .map(|&(m, k)| buf[((k + self.shift) as usize) * n + (m + self.shift) as usize] * scale)
            .collect()
    }

    /// `Σ_jk A_jk = ⟨A·1, 1⟩`.
    pub fn entry_sum(&self) -> C64 {
        let ones = vec![C64::new(1.0, 0.0); self.coords.len()];
        self.apply(&ones).iter().sum()
    }
}

impl LinearOperator for LatticeToeplitz {
    fn rows(&self) -> usize {
        self.coords.len()
    }
    fn cols(&self) -> usize {
        self.coords.len()
    }
    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.convolve(x, &self.hat)
    }
    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64> {
        self.convolve(y, &self.hat_adjoint)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolBound {
    /// Largest `|g|` on the sampling grid; a lower bound for `sup |g|`.
    pub sampled_max: f64,
    /// Rigorous bound for `sup_θ |g(θ)|`.
    pub upper: f64,
    pub grid: usize,
}

/// Bound for `sup_θ |g(θ)|`, `g(θ) = Σ c_p exp(i p·θ)`, which dominates the norm of
/// every compression of the Toeplitz operator with kernel `c`.
///
/// `|g|²` has exponential type `2K` along every line, `K = max |p|`, so by Bernstein's
/// inequality its second derivative is at most `4K² sup|g|²`. At a maximizer the
/// gradient vanishes, and the nearest grid point lies within the half-diagonal `ρ`, so
/// `sup|g| ≤ max_grid |g| / sqrt(1 − 2K²ρ²)`.
pub fn symbol_sup_bound(terms: &[((i64, i64), C64)], grid: usize) -> Result<SymbolBound> {
    if !grid.is_power_of_two() || grid < 4 {
        return Err(Error::arg("symbol grid must be a power of two, at least 4"));
    }
    let l = grid as i64;
    let k = terms
        .iter()
        .map(|&((px, py), _)| ((px * px + py * py) as f64).sqrt())
        .fold(0.0, f64::max);
    let rho = core::f64::consts::PI * core::f64::consts::SQRT_2 / grid as f64;
    let slack = 1.0 - 2.0 * k * k * rho * rho;
    if slack <= 0.0 {
        return Err(Error::arg("symbol grid too coarse for the kernel support"));
    }
    let mut buf = vec![C64::new(0.0, 0.0); grid * grid];
    for &((px, py), c) in terms {
        buf[(py.rem_euclid(l) as usize) * grid + px.rem_euclid(l) as usize] += c;
    }
    fft2(&mut buf, grid, true)?;
    let sampled_max = buf.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(SymbolBound { sampled_max, upper: sampled_max / slack.sqrt(), grid })
}

/// Smallest power-of-two grid (at least 256, at most 4096) with `2K²ρ² ≤ 0.02`.
pub fn symbol_grid_for(k: f64) -> usize {
    let need = (core::f64::consts::PI * core::f64::consts::SQRT_2 * k / 0.1).ceil() as usize;
    need.next_power_of_two().clamp(256, 4096)
}

/// Kernel `conj(λ(p))² = 1/p̄²` of `Λ^{[2]}`, with `λ(0) = 0`.
fn lambda2_kernel(px: i64, py: i64) -> C64 {
    if px == 0 && py == 0 {
        C64::new(0.0, 0.0)
    } else {
        let p = C64::new(px as f64, -(py as f64));
        (p * p).inv()
    }
}

fn lambda_sq_kernel(px: i64, py: i64) -> C64 {
    if px == 0 && py == 0 {
        C64::new(0.0, 0.0)
    } else {
        C64::new(1.0 / (px * px + py * py) as f64, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NizBound {
    pub r: f64,
    pub points: usize,
    /// `Σ_{j≠k} |λ(p_j − p_k)|²`.
    pub entry_sum: f64,
    /// `entry_sum / n ≤ ‖Λ_r‖`.
    pub lambda_r_norm_lb: f64,
    /// Upper bound for `‖Λ^{[2]}_r‖` from the symbol.
    pub lambda2_norm_ub: f64,
    /// Lower bound for `‖D₀z̄‖_M` on the lattice.
    pub bound: f64,
}

/// Lower bound `‖Λ_r‖ / ‖Λ^{[2]}_r‖` for `‖D₀z̄‖_M` on `ℤ + iℤ ∩ clos(rD)`, using
/// `Λ^{[1]} ⋆ Λ^{[2]} = Λ_r` with `Λ^{[1]} = D₀z̄`.
pub fn niz_lower_bound(r: f64) -> Result<NizBound> {
    if !(r >= 3.0 && r.is_finite()) {
        return Err(Error::arg("niz_lower_bound needs r >= 3"));
    }
    let spec = LatticeSpec::closed(1.0, r)?;
    let coords = lattice_coords(&spec);
    let n = coords.len();
    let op = LatticeToeplitz::new(&coords, lambda_sq_kernel)?;
    let entry_sum = op.entry_sum().re;
    let lambda_r_norm_lb = entry_sum / n as f64;
    let ub = lambda2_symbol_bound(r)?.upper;
    Ok(NizBound { r, points: n, entry_sum, lambda_r_norm_lb, lambda2_norm_ub: ub, bound: lambda_r_norm_lb / ub })
}

/// Symbol bound for the kernel `1/p̄²` over all differences `|p| ≤ 2r`.
pub fn lambda2_symbol_bound(r: f64) -> Result<SymbolBound> {
    let reach = (2.0 * r).floor() as i64;
    let lim = 4.0 * r * r * (1.0 + 1e-12);
    let mut terms = Vec::new();
    for px in -reach..=reach {
        for py in -reach..=reach {
            if (px, py) != (0, 0) && (px * px + py * py) as f64 <= lim {
                terms.push(((px, py), lambda2_kernel(px, py)));
            }
        }
    }
    symbol_sup_bound(&terms, symbol_grid_for(2.0 * r))
}

/// `Λ^{[2]}_r` as a matrix-free operator on `ℤ + iℤ ∩ clos(rD)`.
pub fn lambda2_operator(r: f64) -> Result<LatticeToeplitz> {
    let coords = lattice_coords(&LatticeSpec::closed(1.0, r)?);
    LatticeToeplitz::new(&coords, lambda2_kernel)
}

/// `Σ_{j≠k} |λ(p_j − p_k)|² / (r² log r)`.
pub fn rho_ratio(r: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::arg("rho_ratio needs r > 1"));
    }
    let coords = lattice_coords(&LatticeSpec::closed(1.0, r)?);
    let s = LatticeToeplitz::new(&coords, lambda_sq_kernel)?.entry_sum().re;
    Ok(s / (r * r * r.ln()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjUpperBound {
    pub bound: f64,
    pub bands: usize,
    pub error: f64,
}

/// Upper bound for `‖D₀z̄‖_M` on the lattice: on differences `δ ≤ |ζ| ≤ 2r`,
/// `D₀z̄(z, w) = h(z − w)` with the dyadic `h`, and `‖h(z − w)‖_M ≤ ‖h‖_{L̂¹}`.
/// The quadrature error of `‖ψ‖_{L̂¹}` is added to the bound.
pub fn conj_upper_bound(spec: &LatticeSpec) -> Result<ConjUpperBound> {
    let h = dyadic_h(spec.delta, 2.0 * spec.r)?;
    Ok(ConjUpperBound { bound: h.bound + h.bound_error, bands: h.bands, error: h.bound_error })
}

/// Offsets of the nine near-diagonal families, in cell order 1..=9.
pub const PARTITION_OFFSETS: [(i64, i64); 9] = [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)];

/// Cell of `(z, w)`: with `z' = z/(a√2)`, `w' = w/(a√2)` and half-open unit squares,
/// the offset `⌊w'⌋ − ⌊z'⌋` selects cell 1..=9 when it is one of [`PARTITION_OFFSETS`],
/// and cell 0 otherwise.
pub fn partition_cell(a: f64, z: C64, w: C64) -> Result<usize> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::arg("partition scale must be positive"));
    }
    let s = a * core::f64::consts::SQRT_2;
    let fl = |x: f64| (x / s).floor() as i64;
    let off = (fl(w.re) - fl(z.re), fl(w.im) - fl(z.im));
    Ok(PARTITION_OFFSETS.iter().position(|&o| o == off).map_or(0, |i| i + 1))
}

/// Indicator matrix of one cell on the given point sets.
pub fn cell_indicator(a: f64, cell: usize, rows: &[C64], cols: &[C64]) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(rows.len(), cols.len());
    for (j, &z) in rows.iter().enumerate() {
        for (k, &w) in cols.iter().enumerate() {
            if partition_cell(a, z, w)? == cell {
                m[(j, k)] = C64::new(1.0, 0.0);
            }
        }
    }
    Ok(m)
}

/// `‖D₀f‖_M ≤ 2 sup|f| · ‖Ψ‖_{L̂¹} / δ` on a `δ`-separated set, from
/// `1/(z − w) = δ⁻¹ Ψ((z − w)/δ)` off the diagonal.
pub fn separated_set_bound(f: &FunctionSpec, points: &[C64], delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::arg("separation must be positive"));
    }
    for j in 0..points.len() {
        for k in j + 1..points.len() {
            let d = (points[j] - points[k]).norm();
            if d < delta * (1.0 - 1e-12) {
                return Err(Error::Precondition(format!(
                    "points {j} and {k} ({} and {}) are {d} apart, below {delta}",
                    points[j], points[k]
                )));
            }
        }
    }
    let sup = points.iter().map(|&z| f.eval(z).map(|v| v.norm())).collect::<Result<Vec<_>>>()?;
    let sup = sup.into_iter().fold(0.0, f64::max);
    let p = psi_constant();
    Ok(2.0 * sup * 2.0 * (p.c + p.quadrature_error) / delta)
}

/// Power-iteration estimate of `‖Λ^{[2]}_r‖` (a lower estimate; diagnostic only).
pub fn lambda2_power_estimate(r: f64, iterations: usize) -> Result<f64> {
    let op = lambda2_operator(r)?;
    Ok(crate::linalg::power_norm(&op, 1e-10, iterations).value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator_norm;
    use crate::schur::{multiplier_lower, multiplier_upper, schur_product};
    use crate::rng::{seeded, uniform};
    use proptest::prelude::*;

    #[test]
    fn point_counts() {
        assert_eq!(lattice_points(&LatticeSpec::closed(1.0, 1.5).unwrap()).len(), 9);
        assert_eq!(lattice_points(&LatticeSpec::closed(1.0, 1.0).unwrap()).len(), 5);
        assert_eq!(lattice_points(&LatticeSpec::new(1.0, 1.0, false).unwrap()).len(), 1);
        let pts = lattice_points(&LatticeSpec::closed(0.5, 1.0).unwrap());
        let mut brute = 0;
        for m in -3i32..=3 {
            for n in -3i32..=3 {
                if (0.25 * (m * m + n * n) as f64) <= 1.0 {
                    brute += 1;
                }
            }
        }
        assert_eq!(pts.len(), brute);
        assert_eq!(pts.len(), 13);
        assert_eq!(pts[0], C64::new(0.0, 0.0));
        assert!(pts.windows(2).all(|w| w[0].norm() <= w[1].norm() + 1e-12));
        assert!(LatticeSpec::closed(2.0, 1.0).is_err());
    }

    #[test]
    fn divided_difference_examples() {
        let pts = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let d = divided_difference(&FunctionSpec::Identity, &pts, &pts).unwrap().matrix;
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(d[(j, k)], C64::new(if j == k { 0.0 } else { 1.0 }, 0.0));
            }
        }
        let d = divided_difference(&FunctionSpec::power(2), &pts, &pts).unwrap().matrix;
        assert!((d[(1, 2)] - (pts[1] + pts[2])).norm() < 1e-15);
        let d = divided_difference(&FunctionSpec::Conjugate, &pts, &pts).unwrap().matrix;
        assert!((d[(1, 2)].norm() - 1.0).abs() < 1e-15);
        assert!((d[(1, 2)] - (pts[1] - pts[2]).conj() / (pts[1] - pts[2])).norm() < 1e-15);
        let d = divided_difference_with_derivative(&FunctionSpec::power(2), &pts, &pts).unwrap().matrix;
        assert!((d[(1, 1)] - C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn toeplitz_operator_matches_dense() {
        let coords = lattice_coords(&LatticeSpec::closed(1.0, 3.0).unwrap());
        let op = LatticeToeplitz::new(&coords, lambda2_kernel).unwrap();
        let dense = ComplexMatrix::from_fn(coords.len(), coords.len(), |j, k| {
            lambda2_kernel(coords[j].0 - coords[k].0, coords[j].1 - coords[k].1)
        });
        let mut rng = seeded(2);
        let v: Vec<C64> = (0..coords.len()).map(|_| crate::rng::complex_normal(&mut rng)).collect();
        let a = op.apply(&v);
        let b = dense.matvec(&v);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-12));
        let a = op.apply_adjoint(&v);
        let b = dense.adj_matvec(&v);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-12));
        let ub = lambda2_symbol_bound(3.0).unwrap().upper;
        assert!(operator_norm(&dense).unwrap() <= ub);
    }

    #[test]
    fn schur_product_identity() {
        let pts = lattice_points(&LatticeSpec::closed(1.0, 4.0).unwrap());
        let l1 = divided_difference(&FunctionSpec::Conjugate, &pts, &pts).unwrap().matrix;
        let l2 = ComplexMatrix::from_fn(pts.len(), pts.len(), |j, k| {
            let d = pts[j] - pts[k];
            lambda2_kernel(d.re as i64, d.im as i64)
        });
        let lr = ComplexMatrix::from_fn(pts.len(), pts.len(), |j, k| {
            let d = pts[j] - pts[k];
            lambda_sq_kernel(d.re as i64, d.im as i64)
        });
        assert!(schur_product(&l1, &l2).unwrap().sub(&lr).max_abs() < 1e-12);
        assert!((lr.diagonal().iter().map(|z| z.norm()).sum::<f64>()) == 0.0);
    }

    #[test]
    fn niz_entry_sum_matches_double_loop() {
        let b = niz_lower_bound(8.0).unwrap();
        let coords = lattice_coords(&LatticeSpec::closed(1.0, 8.0).unwrap());
        let mut s = 0.0;
        for &(a, bb) in &coords {
            for &(c, d) in &coords {
                if (a, bb) != (c, d) {
                    s += 1.0 / (((a - c) * (a - c) + (bb - d) * (bb - d)) as f64);
                }
            }
        }
        assert!((b.entry_sum - s).abs() < 1e-9 * s);
        assert!((b.lambda_r_norm_lb - s / coords.len() as f64).abs() < 1e-9);
        assert!(niz_lower_bound(2.0).is_err());
    }

    #[test]
    fn niz_increases_and_symbol_dominates_power() {
        let mut last = 0.0;
        for r in [4.0, 8.0, 16.0] {
            let b = niz_lower_bound(r).unwrap();
            assert!(b.bound > last);
            last = b.bound;
            let est = lambda2_power_estimate(r, 200).unwrap();
            assert!(est <= b.lambda2_norm_ub, "r={r}: {est} vs {}", b.lambda2_norm_ub);
        }
    }

    #[test]
    fn conj_upper_examples() {
        let a = conj_upper_bound(&LatticeSpec::closed(1.0, 8.0).unwrap()).unwrap();
        let b = conj_upper_bound(&LatticeSpec::closed(1.0, 64.0).unwrap()).unwrap();
        let want = 128f64.ln() / 16f64.ln();
        assert!((b.bound / a.bound - want).abs() <= 0.3 * want);
        let s = conj_upper_bound(&LatticeSpec::closed(2.0, 4.0).unwrap()).unwrap();
        assert!(s.bound < 20.0);
        let pts = lattice_points(&LatticeSpec::closed(1.0, 2.0).unwrap());
        let d = divided_difference(&FunctionSpec::Conjugate, &pts, &pts).unwrap().matrix;
        let low = multiplier_lower(&d, 200, 1).unwrap();
        let ub = conj_upper_bound(&LatticeSpec::closed(1.0, 2.0).unwrap()).unwrap();
        assert!(low.lower <= ub.bound);
    }

    #[test]
    fn partition_examples() {
        let a = 0.7;
        let z = C64::new(0.3, -2.2);
        let c = partition_cell(a, z, z).unwrap();
        assert_eq!(c, 1);
        let far = z + C64::from_polar(3.0 * a * core::f64::consts::SQRT_2, 0.4);
        assert_eq!(partition_cell(a, z, far).unwrap(), 0);
        // Exhaustive check on a grid aligned with the square boundaries.
        let s = a * core::f64::consts::SQRT_2;
        let pts: Vec<C64> = (-4..=4)
            .flat_map(|i| (-4..=4).map(move |j| C64::new(i as f64 * s * 0.5, j as f64 * s * 0.5)))
            .collect();
        for &z in &pts {
            for &w in &pts {
                let c = partition_cell(a, z, w).unwrap();
                let fl = |x: f64| (x / s).floor() as i64;
                let off = (fl(w.re) - fl(z.re), fl(w.im) - fl(z.im));
                let hits = PARTITION_OFFSETS.iter().filter(|&&o| o == off).count();
                assert!(hits <= 1);
                assert_eq!(c == 0, hits == 0);
                if (z - w).norm() / core::f64::consts::SQRT_2 < a {
                    assert!(c >= 1);
                }
            }
        }
    }

    #[test]
    fn partition_cells_are_block_indicators() {
        let mut rng = seeded(8);
        let pts: Vec<C64> = (0..14).map(|_| C64::new(uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0))).collect();
        let a = 0.5;
        for cell in 1..=9 {
            let m = cell_indicator(a, cell, &pts, &pts).unwrap();
            if m.max_abs() == 0.0 {
                continue;
            }
            let e = multiplier_upper(&m, 400, 0).unwrap();
            assert!((e.upper - 1.0).abs() < 1e-6, "cell {cell}: {}", e.upper);
        }
        let m0 = cell_indicator(a, 0, &pts, &pts).unwrap();
        assert!(multiplier_upper(&m0, 400, 0).unwrap().upper <= 10.0);
    }

    #[test]
    fn separated_set_examples() {
        let pts = lattice_points(&LatticeSpec::closed(0.5, 1.5).unwrap());
        let b = separated_set_bound(&FunctionSpec::Constant(C64::new(0.0, 0.0)), &pts, 0.5).unwrap();
        assert_eq!(b, 0.0);
        let two = [C64::new(0.0, 0.0), C64::new(0.5, 0.0)];
        let ind = FunctionSpec::Affine { a: C64::new(0.0, 0.0), b: C64::new(1.0, 0.0), inner: alloc::boxed::Box::new(FunctionSpec::Identity) };
        let b = separated_set_bound(&ind, &two, 0.5).unwrap();
        let d = divided_difference(&FunctionSpec::Sgn(1), &pts, &pts).unwrap().matrix;
        let low = multiplier_lower(&d, 100, 3).unwrap();
        let bs = separated_set_bound(&FunctionSpec::Sgn(1), &pts, 0.5).unwrap();
        assert!(low.lower <= bs);
        assert!(b >= 0.0);
        let bad = [C64::new(0.0, 0.0), C64::new(0.1, 0.0)];
        assert!(matches!(separated_set_bound(&ind, &bad, 0.5), Err(Error::Precondition(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn ones_vector_bound(seed in 0u64..10_000, n in 1usize..12) {
            let mut rng = seeded(seed);
            let a = ComplexMatrix::from_fn(n, n, |_, _| C64::new(uniform(&mut rng, 0.0, 1.0), 0.0));
            let s: f64 = a.as_slice().iter().map(|z| z.re).sum();
            prop_assert!(s / n as f64 <= operator_norm(&a).unwrap() + 1e-8);
        }

        #[test]
        fn partition_is_total(a in 0.1f64..3.0, x in -5.0f64..5.0, y in -5.0f64..5.0, u in -5.0f64..5.0, v in -5.0f64..5.0) {
            let z = C64::new(x, y);
            let w = C64::new(u, v);
            let c = partition_cell(a, z, w).unwrap();
            prop_assert!(c <= 9);
            if (z - w).norm() < a * core::f64::consts::SQRT_2 { prop_assert!(c >= 1); }
            if (z - w).norm() >= 3.0 * a * core::f64::consts::SQRT_2 { prop_assert_eq!(c, 0); }
        }
    }
}
