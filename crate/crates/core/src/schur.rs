//! Schur (Hadamard) multipliers on finite index sets. The multiplier norm
//! `‖Φ‖_M = sup{‖Φ⋆B‖ : ‖B‖ ≤ 1}` is bracketed from below by explicit test
//! matrices `B` and from above by factorizations `Φ_jk = ⟨x_j, y_k⟩`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::norm::opnorm;
use crate::linalg::{jacobi_svd, ComplexMatrix};
use crate::rng::{complex_normal, seeded};
use crate::C64;

/// Tolerance on the entrywise reproduction error of a factorization, relative to `max(1, max|Φ|)`.
pub const FACTOR_TOL: f64 = 1e-10;

pub fn schur_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.shape() != b.shape() {
        return Err(Error::Shape {
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    Ok(a.zip(b, |x, y| x * y))
}

/// `Φ_jk = Σ_i x_ji conj(y_ki)`; rows of `x` and `y` are the factor vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
}

fn max_row_norm(m: &ComplexMatrix) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

impl Factorization {
    pub fn reproduce(&self) -> ComplexMatrix {
        self.x.matmul_adj(&self.y)
    }

    /// `max_j ‖x_j‖ · max_k ‖y_k‖`.
    pub fn value(&self) -> f64 {
        max_row_norm(&self.x) * max_row_norm(&self.y)
    }

    pub fn residual(&self, phi: &ComplexMatrix) -> f64 {
        self.reproduce().sub(phi).max_abs()
    }

    pub fn reproduces(&self, phi: &ComplexMatrix) -> bool {
        self.x.rows() == phi.rows()
            && self.y.rows() == phi.cols()
            && self.residual(phi) <= FACTOR_TOL * phi.max_abs().max(1.0)
    }

    /// Scale so that `max_j ‖x_j‖ = max_k ‖y_k‖`.
    pub fn rebalance(&mut self) {
        let a = max_row_norm(&self.x);
        let b = max_row_norm(&self.y);
        if a > 0.0 && b > 0.0 {
            let t = (b / a).sqrt();
            self.x = self.x.scale_real(t);
            self.y = self.y.scale_real(1.0 / t);
        }
    }

    /// Factorization of `Φ₁⋆Φ₂` from factorizations of each factor.
    pub fn tensor(&self, other: &Factorization) -> Factorization {
        let rowwise = |a: &ComplexMatrix, b: &ComplexMatrix| {
            let (ka, kb) = (a.cols(), b.cols());
            ComplexMatrix::from_fn(a.rows(), ka * kb, |j, c| a[(j, c / kb)] * b[(j, c % kb)])
        };
        Factorization { x: rowwise(&self.x, &other.x), y: rowwise(&self.y, &other.y) }
    }

    pub fn transpose(&self) -> Factorization {
        Factorization { x: self.y.conj(), y: self.x.conj() }
    }
}

#[derive(Clone, Debug)]
pub struct MultiplierEstimate {
    pub lower: f64,
    /// `+inf` when no certificate is available.
    pub upper: f64,
    pub lower_certificate: ComplexMatrix,
    pub upper_certificate: Option<Factorization>,
}

impl MultiplierEstimate {
    /// Combine two estimates of the same multiplier, keeping the better side of each.
    pub fn merge(self, other: MultiplierEstimate) -> MultiplierEstimate {
        let (lower, lower_certificate) = if other.lower > self.lower {
            (other.lower, other.lower_certificate)
        } else {
            (self.lower, self.lower_certificate)
        };
        let (upper, upper_certificate) = if other.upper < self.upper {
            (other.upper, other.upper_certificate)
        } else {
            (self.upper, self.upper_certificate)
        };
        MultiplierEstimate { lower, upper, lower_certificate, upper_certificate }
    }

    /// Recheck both certificates against `phi`.
    pub fn verify(&self, phi: &ComplexMatrix) -> Result<()> {
        let bn = opnorm(&self.lower_certificate);
        if bn > 1.0 + 1e-10 {
            return Err(Error::Validation { what: "lower certificate is not a contraction".into(), defect: bn - 1.0 });
        }
        let achieved = opnorm(&schur_product(phi, &self.lower_certificate)?);
        if achieved < self.lower - 1e-8 {
            return Err(Error::Validation { what: "lower certificate does not achieve the bound".into(), defect: self.lower - achieved });
        }
        if let Some(f) = &self.upper_certificate {
            if !f.reproduces(phi) {
                return Err(Error::Validation { what: "factorization does not reproduce the matrix".into(), defect: f.residual(phi) });
            }
            if f.value() > self.upper + 1e-10 {
                return Err(Error::Validation { what: "factorization value exceeds the bound".into(), defect: f.value() - self.upper });
            }
        } else if self.upper.is_finite() {
            return Err(Error::Validation { what: "finite upper bound without certificate".into(), defect: self.upper });
        }
        if self.lower > self.upper + 1e-8 {
            return Err(Error::Validation { what: "lower exceeds upper".into(), defect: self.lower - self.upper });
        }
        Ok(())
    }
}

fn unit_norm(b: ComplexMatrix) -> Option<ComplexMatrix> {
    let n = opnorm(&b);
    if n > 0.0 && n.is_finite() {
        Some(b.scale_real(1.0 / n))
    } else {
        None
    }
}

/// Best contraction against fixed unit vectors: with `K_jk = conj(u_j) Φ_jk v_k = W S Z^*`,
/// `B = (Z W^*)^T` attains `Re ⟨(Φ⋆B) v, u⟩ = ‖K‖_1`.
fn dual_contraction(phi: &ComplexMatrix, u: &[C64], v: &[C64]) -> ComplexMatrix {
    let k = ComplexMatrix::from_fn(phi.rows(), phi.cols(), |j, l| u[j].conj() * phi[(j, l)] * v[l]);
    let svd = jacobi_svd(&k);
    let r = svd.s.len();
    let tol = svd.s.first().copied().unwrap_or(0.0) * 1e-15;
    ComplexMatrix::from_fn(phi.rows(), phi.cols(), |j, l| {
        (0..r)
            .filter(|&i| svd.s[i] > tol)
            .map(|i| svd.v[(l, i)] * svd.u[(j, i)].conj())
            .sum()
    })
}

struct Search<'a> {
    phi: &'a ComplexMatrix,
    best: f64,
    best_b: ComplexMatrix,
}

impl<'a> Search<'a> {
    fn offer(&mut self, b: ComplexMatrix) -> f64 {
        let v = opnorm(&self.phi.zip(&b, |x, y| x * y));
        if v > self.best {
            self.best = v;
            self.best_b = b;
        }
        v
    }

    /// One alternating step from `b`: top singular pair of `Φ⋆B`, then the dual contraction.
    fn ascend(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let c = self.phi.zip(b, |x, y| x * y);
        let svd = jacobi_svd(&c);
        let u = svd.u.column(0);
        let v = svd.v.column(0);
        if svd.s[0] == 0.0 {
            return b.clone();
        }
        dual_contraction(self.phi, &u, &v)
    }
}

/// Lower bound for `‖Φ‖_M` by seeded search over contractions, with extra caller-supplied candidates.
pub fn multiplier_lower_with(
    phi: &ComplexMatrix,
    budget: usize,
    seed: u64,
    extra: &[ComplexMatrix],
) -> Result<MultiplierEstimate> {
    if budget == 0 {
        return Err(Error::arg("budget must be at least 1"));
    }
    if phi.is_empty() {
        return Err(Error::arg("empty multiplier"));
    }
    let (m, n) = phi.shape();
    let mut s = Search { phi, best: -1.0, best_b: ComplexMatrix::zeros(m, n) };

    let (mut jm, mut km, mut vm) = (0, 0, -1.0);
    for j in 0..m {
        for k in 0..n {
            if phi[(j, k)].norm() > vm {
                vm = phi[(j, k)].norm();
                jm = j;
                km = k;
            }
        }
    }
    let mut unit = ComplexMatrix::zeros(m, n);
    unit[(jm, km)] = C64::new(1.0, 0.0);
    s.offer(unit);
    let mut seeds: Vec<ComplexMatrix> = Vec::new();
    if let Some(b) = unit_norm(ComplexMatrix::from_fn(m, n, |_, _| C64::new(1.0, 0.0))) {
        seeds.push(b);
    }
    if let Some(b) = unit_norm(phi.map(|z| if z.is_zero() { C64::zero() } else { (z / z.norm()).conj() })) {
        seeds.push(b);
    }
    let wu = vec![C64::new(1.0 / (m as f64).sqrt(), 0.0); m];
    let wv = vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    seeds.push(dual_contraction(phi, &wu, &wv));
    for b in extra {
        if b.shape() == phi.shape() {
            if let Some(b) = unit_norm(b.clone()) {
                seeds.push(b);
            }
        }
    }
    for b in seeds {
        s.offer(b);
    }

    let mut rng = seeded(seed);
    let random_budget = (budget * 3).div_ceil(5);
    let mut pool: Vec<(f64, ComplexMatrix)> = Vec::new();
    for _ in 0..random_budget {
        if let Some(b) = unit_norm(ComplexMatrix::from_fn(m, n, |_, _| complex_normal(&mut rng))) {
            let v = s.offer(b.clone());
            pool.push((v, b));
        }
    }
    pool.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
    pool.truncate(3);
    let mut starts: Vec<ComplexMatrix> = vec![s.best_b.clone()];
    starts.extend(pool.into_iter().map(|(_, b)| b));

    let ascent_budget = budget - random_budget;
    let per_start = (ascent_budget / starts.len()).max(if ascent_budget > 0 { 1 } else { 0 });
    let mut used = 0;
    for start in starts {
        let mut b = start;
        let mut last = -1.0;
        for _ in 0..per_start {
            if used >= ascent_budget {
                break;
            }
            used += 1;
            b = s.ascend(&b);
            let v = s.offer(b.clone());
            if v <= last * (1.0 + 1e-13) {
                break;
            }
            last = v;
        }
    }
    Ok(MultiplierEstimate {
        lower: s.best.max(0.0),
        upper: f64::INFINITY,
        lower_certificate: s.best_b,
        upper_certificate: None,
    })
}

pub fn multiplier_lower(phi: &ComplexMatrix, budget: usize, seed: u64) -> Result<MultiplierEstimate> {
    multiplier_lower_with(phi, budget, seed, &[])
}

struct Weighted {
    lower: f64,
    upper: f64,
    factor: Option<Factorization>,
    a: Vec<f64>,
    b: Vec<f64>,
    dual_u: Vec<C64>,
    dual_v: Vec<C64>,
}

/// Factorization from the SVD of `D_√p Φ D_√q` on the support rows/cols.
fn weighted_step(phi: &ComplexMatrix, rows: &[usize], cols: &[usize], p: &[f64], q: &[f64]) -> Weighted {
    let (m, n) = phi.shape();
    let sub = ComplexMatrix::from_fn(rows.len(), cols.len(), |j, k| phi[(rows[j], cols[k])] * (p[j] * q[k]).sqrt());
    let svd = jacobi_svd(&sub);
    let smax = svd.s.first().copied().unwrap_or(0.0);
    let rank = svd.s.iter().take_while(|&&x| x > smax * 1e-15).count();
    let lower: f64 = svd.s[..rank].iter().sum();
    let a: Vec<f64> = (0..rows.len()).map(|j| (0..rank).map(|i| svd.u[(j, i)].norm_sqr() * svd.s[i]).sum()).collect();
    let b: Vec<f64> = (0..cols.len()).map(|k| (0..rank).map(|i| svd.v[(k, i)].norm_sqr() * svd.s[i]).sum()).collect();
    let ra = a.iter().zip(p).map(|(&x, &w)| x / w).fold(0.0, f64::max);
    let rb = b.iter().zip(q).map(|(&x, &w)| x / w).fold(0.0, f64::max);
    let upper = (ra * rb).sqrt();
    let mut x = ComplexMatrix::zeros(m, rank.max(1));
    let mut y = ComplexMatrix::zeros(n, rank.max(1));
    for (j, &rj) in rows.iter().enumerate() {
        for i in 0..rank {
            x[(rj, i)] = svd.u[(j, i)] * (svd.s[i].sqrt() / p[j].sqrt());
        }
    }
    for (k, &ck) in cols.iter().enumerate() {
        for i in 0..rank {
            y[(ck, i)] = svd.v[(k, i)] * (svd.s[i].sqrt() / q[k].sqrt());
        }
    }
    let mut f = Factorization { x, y };
    f.rebalance();
    let dual_u = {
        let mut u = vec![C64::zero(); m];
        for (j, &rj) in rows.iter().enumerate() {
            u[rj] = C64::new(p[j].sqrt(), 0.0);
        }
        u
    };
    let dual_v = {
        let mut v = vec![C64::zero(); n];
        for (k, &ck) in cols.iter().enumerate() {
            v[ck] = C64::new(q[k].sqrt(), 0.0);
        }
        v
    };
    Weighted { lower, upper, factor: Some(f).filter(|f| f.reproduces(phi)), a, b, dual_u, dual_v }
}

/// Upper bound for `‖Φ‖_M` from factorizations `X Y^*` with `X = D_√p^{-1} U S^{1/2}`,
/// `Y = D_√q^{-1} V S^{1/2}` where `D_√p Φ D_√q = U S V^*`. The weights are
/// improved by damped multiplicative updates; each sweep rebalances the factors.
/// The trace norm of the weighted matrix is a matching lower bound.
pub fn multiplier_upper(phi: &ComplexMatrix, iterations: usize, seed: u64) -> Result<MultiplierEstimate> {
    let _ = seed;
    if iterations == 0 {
        return Err(Error::arg("iterations must be at least 1"));
    }
    if phi.is_empty() {
        return Err(Error::arg("empty multiplier"));
    }
    let (m, n) = phi.shape();
    let rows: Vec<usize> = (0..m).filter(|&j| phi.row(j).iter().any(|z| !z.is_zero())).collect();
    let cols: Vec<usize> = (0..n).filter(|&k| (0..m).any(|j| !phi[(j, k)].is_zero())).collect();
    if rows.is_empty() {
        let f = Factorization { x: ComplexMatrix::zeros(m, 1), y: ComplexMatrix::zeros(n, 1) };
        return Ok(MultiplierEstimate {
            lower: 0.0,
            upper: 0.0,
            lower_certificate: ComplexMatrix::zeros(m, n),
            upper_certificate: Some(f),
        });
    }
    let mut p = vec![1.0 / rows.len() as f64; rows.len()];
    let mut q = vec![1.0 / cols.len() as f64; cols.len()];
    let mut cur = weighted_step(phi, &rows, &cols, &p, &q);
    let mut best_upper = f64::INFINITY;
    let mut best_factor: Option<Factorization> = None;
    let mut best_lower = cur.lower;
    let mut best_dual = (cur.dual_u.clone(), cur.dual_v.clone());
    let mut eta = 1.0;
    for _ in 0..iterations {
        if cur.factor.is_some() && cur.upper < best_upper {
            best_upper = cur.upper;
            best_factor = cur.factor.clone();
        }
        if cur.lower > best_lower {
            best_lower = cur.lower;
            best_dual = (cur.dual_u.clone(), cur.dual_v.clone());
        }
        if best_upper - best_lower <= 1e-13 * best_upper {
            break;
        }
        let update = |w: &[f64], g: &[f64], eta: f64| -> Vec<f64> {
            let mut out: Vec<f64> = w
                .iter()
                .zip(g)
                .map(|(&wi, &gi)| wi.powf(1.0 - eta) * gi.max(1e-300).powf(eta))
                .collect();
            let s: f64 = out.iter().sum();
            let floor = 1e-14 / out.len() as f64;
            for o in out.iter_mut() {
                *o = (*o / s).max(floor);
            }
            let s: f64 = out.iter().sum();
            out.iter_mut().for_each(|o| *o /= s);
            out
        };
        let mut accepted = false;
        while eta > 1e-3 {
            let p2 = update(&p, &cur.a, eta);
            let q2 = update(&q, &cur.b, eta);
            let next = weighted_step(phi, &rows, &cols, &p2, &q2);
            if next.lower >= cur.lower * (1.0 - 1e-15) {
                p = p2;
                q = q2;
                cur = next;
                accepted = true;
                eta = (eta * 1.5).min(1.0);
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if cur.factor.is_some() && cur.upper < best_upper {
        best_upper = cur.upper;
        best_factor = cur.factor.clone();
    }
    let lower_certificate = dual_contraction(phi, &best_dual.0, &best_dual.1);
    let achieved = opnorm(&phi.zip(&lower_certificate, |x, y| x * y));
    let upper = match &best_factor {
        Some(f) => f.value().max(best_upper),
        None => f64::INFINITY,
    };
    Ok(MultiplierEstimate {
        lower: achieved.min(upper),
        upper,
        lower_certificate,
        upper_certificate: best_factor,
    })
}

/// Both sides: weighted factorization plus contraction search.
pub fn multiplier_estimate(phi: &ComplexMatrix, budget: usize, iterations: usize, seed: u64) -> Result<MultiplierEstimate> {
    let up = multiplier_upper(phi, iterations, seed)?;
    let low = multiplier_lower_with(phi, budget, seed, core::slice::from_ref(&up.lower_certificate))?;
    Ok(up.merge(low))
}

/// Toeplitz multiplier `Φ_jk = Σ_m c_m exp(-i Re((z_j - w_k) conj(ζ_m)))`.
/// Returns `(Σ|c_m|, Φ)`; the sum is an upper bound for `‖Φ‖_M`.
pub fn toeplitz_upper(points_z: &[C64], points_w: &[C64], atoms: &[(C64, C64)]) -> Result<(f64, ComplexMatrix)> {
    if atoms.is_empty() {
        return Err(Error::arg("toeplitz_upper needs at least one atom"));
    }
    let phi = ComplexMatrix::from_fn(points_z.len(), points_w.len(), |j, k| {
        let d = points_z[j] - points_w[k];
        atoms
            .iter()
            .map(|&(c, zeta)| {
                let t = d.re * zeta.re + d.im * zeta.im;
                c * C64::new(t.cos(), -t.sin())
            })
            .sum()
    });
    Ok((atoms.iter().map(|(c, _)| c.norm()).sum(), phi))
}

/// Explicit rank-|atoms| factorization of a Toeplitz multiplier.
pub fn toeplitz_factorization(points_z: &[C64], points_w: &[C64], atoms: &[(C64, C64)]) -> Factorization {
    let e = |z: C64, zeta: C64| {
        let t = z.re * zeta.re + z.im * zeta.im;
        C64::new(t.cos(), -t.sin())
    };
    let x = ComplexMatrix::from_fn(points_z.len(), atoms.len(), |j, m| {
        let (c, zeta) = atoms[m];
        e(points_z[j], zeta) * c.norm().sqrt() * if c.is_zero() { C64::zero() } else { c / c.norm() }
    });
    let y = ComplexMatrix::from_fn(points_w.len(), atoms.len(), |k, m| {
        let (c, zeta) = atoms[m];
        e(points_w[k], zeta) * c.norm().sqrt()
    });
    Factorization { x, y }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random(m: usize, n: usize, seed: u64) -> ComplexMatrix {
        let mut r = seeded(seed);
        ComplexMatrix::from_fn(m, n, |_, _| complex_normal(&mut r))
    }

    #[test]
    fn product_examples() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = ComplexMatrix::from_real(2, 2, &[5.0, 6.0, 7.0, 8.0]).unwrap();
        assert_eq!(schur_product(&a, &b).unwrap(), ComplexMatrix::from_real(2, 2, &[5.0, 12.0, 21.0, 32.0]).unwrap());
        let x = random(3, 3, 1);
        let d = schur_product(&ComplexMatrix::identity(3), &x).unwrap();
        assert_eq!(d, ComplexMatrix::diag(&x.diagonal()));
        let ones = ComplexMatrix::from_fn(3, 3, |_, _| c(1.0, 0.0));
        assert_eq!(schur_product(&x, &ones).unwrap(), x);
        assert!(schur_product(&a, &ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn diagonal_indicator() {
        for n in [2, 5, 9] {
            let phi = ComplexMatrix::identity(n);
            let e = multiplier_estimate(&phi, 40, 30, 3).unwrap();
            e.verify(&phi).unwrap();
            assert!((e.upper - 1.0).abs() < 1e-6);
            assert!(e.lower >= 0.99 && e.lower <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn all_ones_and_off_diagonal() {
        let ones = ComplexMatrix::from_fn(4, 4, |_, _| c(1.0, 0.0));
        let e = multiplier_estimate(&ones, 20, 20, 1).unwrap();
        assert!((e.lower - 1.0).abs() < 1e-9 && (e.upper - 1.0).abs() < 1e-9);
        for n in [3, 6, 10] {
            let off = ComplexMatrix::from_fn(n, n, |i, j| if i == j { C64::zero() } else { c(1.0, 0.0) });
            let e = multiplier_estimate(&off, 40, 50, 2).unwrap();
            e.verify(&off).unwrap();
            assert!(e.upper <= 2.0 + 1e-12, "{}", e.upper);
        }
    }

    #[test]
    fn rank_one_exact() {
        let xs = [c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)];
        let ys = [c(2.0, 0.0), c(0.1, -0.1)];
        let phi = ComplexMatrix::from_fn(3, 2, |j, k| xs[j] * ys[k]);
        let e = multiplier_upper(&phi, 50, 0).unwrap();
        let want = xs.iter().map(|z| z.norm()).fold(0.0, f64::max) * ys.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!((e.upper - want).abs() < 1e-9 * want);
    }

    #[test]
    fn block_indicator_is_one() {
        let groups_r = [0, 0, 1, 2, 2, 2, 1];
        let groups_c = [1, 0, 2, 2, 0, 1];
        let phi = ComplexMatrix::from_fn(7, 6, |j, k| if groups_r[j] == groups_c[k] { c(1.0, 0.0) } else { C64::zero() });
        let e = multiplier_estimate(&phi, 20, 200, 0).unwrap();
        e.verify(&phi).unwrap();
        assert!((e.upper - 1.0).abs() < 1e-6, "{}", e.upper);
    }

    /// Dense grid over U(2) modulo phase; the supremum over contractions is attained at unitaries.
    fn grid_oracle_2x2(phi: &ComplexMatrix) -> f64 {
        let norm2 = |m: [C64; 4]| {
            let f: f64 = m.iter().map(|z| z.norm_sqr()).sum();
            let det = (m[0] * m[3] - m[1] * m[2]).norm();
            ((f + (f * f - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt()
        };
        let eval = |t: f64, a: f64, b: f64| {
            let u = C64::from_polar(t.cos(), a);
            let v = C64::from_polar(t.sin(), b);
            norm2([phi[(0, 0)] * u, phi[(0, 1)] * v, phi[(1, 0)] * (-v.conj()), phi[(1, 1)] * u.conj()])
        };
        let k = 120;
        let (mut best, mut arg) = (0.0, (0.0, 0.0, 0.0));
        for i in 0..=k {
            let t = core::f64::consts::FRAC_PI_2 * i as f64 / k as f64;
            for j in 0..k {
                let a = 2.0 * core::f64::consts::PI * j as f64 / k as f64;
                for l in 0..k {
                    let b = 2.0 * core::f64::consts::PI * l as f64 / k as f64;
                    let v = eval(t, a, b);
                    if v > best {
                        best = v;
                        arg = (t, a, b);
                    }
                }
            }
        }
        let mut h = 2.0 * core::f64::consts::PI / k as f64;
        while h > 1e-9 {
            let mut improved = false;
            for d in [(h, 0.0, 0.0), (-h, 0.0, 0.0), (0.0, h, 0.0), (0.0, -h, 0.0), (0.0, 0.0, h), (0.0, 0.0, -h)] {
                let cand = (arg.0 + d.0, arg.1 + d.1, arg.2 + d.2);
                let v = eval(cand.0, cand.1, cand.2);
                if v > best {
                    best = v;
                    arg = cand;
                    improved = true;
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        best
    }

    #[test]
    fn two_by_two_matches_grid() {
        for seed in 0..6 {
            let phi = random(2, 2, 100 + seed);
            let low = multiplier_lower(&phi, 60, seed).unwrap();
            let oracle = grid_oracle_2x2(&phi);
            assert!((low.lower - oracle).abs() < 1e-3, "seed {seed}: {} vs {oracle}", low.lower);
            let up = multiplier_upper(&phi, 200, 0).unwrap();
            assert!(up.upper >= oracle - 1e-9);
        }
    }

    #[test]
    fn tensor_certificate() {
        let a = random(4, 3, 5);
        let b = random(4, 3, 6);
        let ea = multiplier_upper(&a, 100, 0).unwrap();
        let eb = multiplier_upper(&b, 100, 0).unwrap();
        let t = ea.upper_certificate.as_ref().unwrap().tensor(eb.upper_certificate.as_ref().unwrap());
        let ab = schur_product(&a, &b).unwrap();
        assert!(t.reproduces(&ab));
        assert!(t.value() <= ea.upper * eb.upper * (1.0 + 1e-12));
    }

    #[test]
    fn toeplitz_examples() {
        let pts: Vec<C64> = (0..12).map(|k| c((k % 4) as f64, (k / 4) as f64)).collect();
        let (b, phi) = toeplitz_upper(&pts, &pts, &[(c(1.0, 0.0), c(0.3, -0.8))]).unwrap();
        assert_eq!(b, 1.0);
        assert!((multiplier_lower(&phi, 20, 0).unwrap().lower - 1.0).abs() < 1e-9);
        let (b, _) = toeplitz_upper(&pts, &pts, &[(c(0.0, -2.5), C64::zero())]).unwrap();
        assert_eq!(b, 2.5);
        let atoms = [
            (c(1.0, 0.0), c(0.2, 0.1)),
            (c(0.0, 2.0), c(-0.7, 0.4)),
            (c(0.5, 0.0), c(1.3, -0.2)),
            (c(-0.25, 0.0), c(0.0, 2.0)),
            (c(0.0, 0.25), c(-1.1, -1.9)),
        ];
        let (b, phi) = toeplitz_upper(&pts, &pts, &atoms).unwrap();
        assert!((b - 4.0).abs() < 1e-15);
        let low = multiplier_lower(&phi, 100, 9).unwrap();
        assert!(low.lower <= 4.0 + 1e-6);
        let f = toeplitz_factorization(&pts, &pts, &atoms);
        assert!(f.reproduces(&phi));
        assert!(f.value() <= 4.0 + 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let z = ComplexMatrix::zeros(3, 2);
        let e = multiplier_estimate(&z, 5, 5, 0).unwrap();
        assert_eq!((e.lower, e.upper), (0.0, 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn sandwich_and_max_entry(seed in 0u64..100_000, m in 1usize..7, n in 1usize..7) {
            let phi = random(m, n, seed);
            let e = multiplier_estimate(&phi, 30, 40, seed).unwrap();
            e.verify(&phi).unwrap();
            prop_assert!(e.lower <= e.upper + 1e-8);
            prop_assert!(phi.max_abs() <= e.upper + 1e-8);
            prop_assert!(e.lower >= phi.max_abs() - 1e-3);
        }

        #[test]
        fn transpose_symmetry(seed in 0u64..100_000, m in 1usize..6, n in 1usize..6) {
            let phi = random(m, n, seed);
            let a = multiplier_upper(&phi, 400, 0).unwrap();
            let b = multiplier_upper(&phi.transpose(), 400, 0).unwrap();
            prop_assert!((a.upper - b.upper).abs() <= 1e-6 * a.upper);
            prop_assert!((a.lower - b.lower).abs() <= 1e-6 * a.upper);
        }
    }
}
