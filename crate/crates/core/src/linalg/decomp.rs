use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use rand::Rng;

use super::matrix::ComplexMatrix;
use crate::rng::complex_normal;
use crate::C64;

const JACOBI_EPS: f64 = 1e-15;
const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `M = U diag(s) V^*`, singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let us = ComplexMatrix::from_fn(self.u.rows(), self.s.len(), |i, j| self.u[(i, j)] * self.s[j]);
        us.matmul_adj(&self.v)
    }
}

/// Rotation parameters `(c, s, phase)` diagonalizing the Hermitian 2x2 block
/// `[[alpha, beta], [conj(beta), gamma]]` via `G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]`.
fn hermitian_rotation(alpha: f64, gamma: f64, beta: C64) -> (f64, f64, C64) {
    let b = beta.norm();
    let ph = beta / b;
    let tau = (gamma - alpha) / (2.0 * b);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, ph.conj())
}

/// Column rotation `[x_p, x_q] <- [x_p, x_q] G` on a row-major matrix.
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, e: C64) {
    for k in 0..m.rows() {
        let xp = m[(k, p)];
        let xq = m[(k, q)];
        m[(k, p)] = xp * c - xq * e * s;
        m[(k, q)] = xp * s + xq * e * c;
    }
}

fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, e: C64) {
    let ec = e.conj();
    for k in 0..m.cols() {
        let xp = m[(p, k)];
        let xq = m[(q, k)];
        m[(p, k)] = xp * c - xq * ec * s;
        m[(q, k)] = xp * s + xq * ec * c;
    }
}

fn svd_tall(m: &ComplexMatrix) -> Svd {
    let (rows, n) = m.shape();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    let mut norms: Vec<f64> = (0..n)
        .map(|j| (0..rows).map(|i| a[(i, j)].norm_sqr()).sum())
        .collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let gamma = norms[q];
                if alpha == 0.0 || gamma == 0.0 {
                    continue;
                }
                let beta: C64 = (0..rows).map(|i| a[(i, p)].conj() * a[(i, q)]).sum();
                let bn = beta.norm();
                if bn <= JACOBI_EPS * (alpha * gamma).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, e) = hermitian_rotation(alpha, gamma, beta);
                rotate_columns(&mut a, p, q, c, s, e);
                rotate_columns(&mut v, p, q, c, s, e);
                norms[p] = (0..rows).map(|i| a[(i, p)].norm_sqr()).sum();
                norms[q] = (0..rows).map(|i| a[(i, q)].norm_sqr()).sum();
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(core::cmp::Ordering::Equal));
    let s: Vec<f64> = order.iter().map(|&j| norms[j].sqrt()).collect();
    let u = ComplexMatrix::from_fn(rows, n, |i, k| {
        let sk = s[k];
        if sk > 0.0 {
            a[(i, order[k])] / sk
        } else {
            C64::zero()
        }
    });
    let v = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Svd { u, s, v }
}

/// One-sided (Hestenes) Jacobi SVD. Accurate to working precision; cost O(n^3) per sweep.
pub fn jacobi_svd(m: &ComplexMatrix) -> Svd {
    if m.rows() >= m.cols() {
        svd_tall(m)
    } else {
        let t = svd_tall(&m.adjoint());
        Svd { u: t.v, s: t.s, v: t.u }
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    jacobi_svd(m).s
}

/// Eigen decomposition `H = V diag(w) V^*` of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Cyclic Jacobi eigenvalue algorithm. Only the Hermitian part of `h` is used.
pub fn hermitian_eigen(h: &ComplexMatrix) -> HermitianEigen {
    assert!(h.is_square(), "hermitian_eigen: square matrix required");
    let n = h.rows();
    let mut a = h.add(&h.adjoint()).scale_real(0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= JACOBI_EPS * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let beta = a[(p, q)];
                if beta.norm() <= 1e-300 {
                    continue;
                }
                let (c, s, e) = hermitian_rotation(a[(p, p)].re, a[(q, q)].re, beta);
                rotate_columns(&mut a, p, q, c, s, e);
                rotate_rows(&mut a, p, q, c, s, e);
                a[(p, q)] = C64::zero();
                a[(q, p)] = C64::zero();
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                rotate_columns(&mut v, p, q, c, s, e);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(core::cmp::Ordering::Equal));
    HermitianEigen {
        values: order.iter().map(|&i| a[(i, i)].re).collect(),
        vectors: ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]),
    }
}

/// QR factorization by twice-iterated modified Gram-Schmidt. Returns `(Q, diag(R))`.
pub fn qr(m: &ComplexMatrix) -> (ComplexMatrix, Vec<C64>) {
    let (rows, cols) = m.shape();
    let mut q = m.clone();
    let mut rdiag = Vec::with_capacity(cols);
    for j in 0..cols {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: C64 = (0..rows).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
                for i in 0..rows {
                    let qk = q[(i, k)];
                    q[(i, j)] -= proj * qk;
                }
            }
        }
        let nrm = (0..rows).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        let rjj: C64 = (0..rows).map(|i| q[(i, j)].conj() * m[(i, j)]).sum::<C64>();
        for i in 0..rows {
            q[(i, j)] /= nrm;
        }
        rdiag.push(if nrm > 0.0 { rjj / nrm } else { C64::zero() });
    }
    (q, rdiag)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phase of `diag(R)` removed.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let (mut q, r) = qr(&g);
    for (j, rj) in r.iter().enumerate() {
        let ph = if rj.norm() > 0.0 { *rj / rj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// `‖U^*U - I‖_F`, used as a cheap unitarity defect.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let g = u.adjoint().matmul(u);
    g.sub(&ComplexMatrix::identity(u.cols())).frobenius_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn random(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut r = seeded(seed);
        ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(&mut r))
    }

    #[test]
    fn svd_reconstructs() {
        for &(m, n) in &[(5, 5), (7, 3), (3, 7), (1, 4)] {
            let a = random(m, n, 11 + m as u64);
            let svd = jacobi_svd(&a);
            assert!(svd.reconstruct().sub(&a).max_abs() < 1e-12);
            assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
            assert!(unitarity_defect(&svd.v) < 1e-12);
        }
    }

    #[test]
    fn svd_of_rank_deficient() {
        let x = random(6, 1, 3);
        let y = random(1, 4, 4);
        let a = x.matmul(&y);
        let s = singular_values(&a);
        assert!(s[1] < 1e-12 * s[0]);
        let expect = x.frobenius_norm() * y.frobenius_norm();
        assert!((s[0] - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn hermitian_eigen_diagonalizes() {
        let g = random(6, 6, 9);
        let h = g.add(&g.adjoint());
        let e = hermitian_eigen(&h);
        let d = ComplexMatrix::diag(&e.values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let rec = e.vectors.matmul(&d).matmul_adj(&e.vectors);
        assert!(rec.sub(&h).max_abs() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn haar_is_unitary() {
        let mut r = seeded(1);
        for n in 1..10 {
            let u = haar_unitary(n, &mut r);
            assert!(unitarity_defect(&u) < 1e-13);
        }
    }
}
