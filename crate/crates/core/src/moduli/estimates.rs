//! Two-sided estimates for the commutator modulus `Ω^C_f(δ)`: an upper bound
//! through a `(δ/2)`-net and a lower bound on `cδ`-separated sets.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fourier::psi_constant;
use crate::function::FunctionSpec;
use crate::lattice::{
    conj_upper_bound, divided_difference, divided_difference_with_derivative, lattice_points, niz_lower_bound,
    separated_set_bound, LatticeSpec,
};
use crate::schur::{multiplier_lower, multiplier_upper};
use crate::C64;

/// Largest net for which a dense factorization is attempted.
const DENSE_NET_CAP: usize = 256;

/// `max |f(z) − f(w)|` over probe pairs with `|z − w| ≤ δ` in `clos(ρD)`: a lower
/// estimate of `ω_f(δ)` on the disc.
pub fn scalar_modulus_lower(f: &FunctionSpec, radius: f64, delta: f64) -> f64 {
    if !(radius > 0.0 && delta > 0.0) {
        return 0.0;
    }
    let step = delta.min(2.0 * radius);
    let lim = radius * (1.0 + 1e-12);
    let mut best: f64 = 0.0;
    let mut probe = |z: C64, w: C64| {
        if w.norm() <= lim {
            if let (Ok(a), Ok(b)) = (f.eval(z), f.eval(w)) {
                let d = (a - b).norm();
                if d.is_finite() {
                    best = best.max(d);
                }
            }
        }
    };
    const RADII: usize = 24;
    const ANGLES: usize = 48;
    const DIRECTIONS: usize = 32;
    for i in 0..=RADII {
        let rho = radius * i as f64 / RADII as f64;
        for a in 0..ANGLES {
            let z = C64::from_polar(rho, 2.0 * core::f64::consts::PI * a as f64 / ANGLES as f64);
            for k in 0..DIRECTIONS {
                let phi = 2.0 * core::f64::consts::PI * k as f64 / DIRECTIONS as f64;
                probe(z, z + C64::from_polar(step, phi));
            }
            if rho > 0.0 {
                probe(z, z - z * (step / rho));
            }
            if i == 0 {
                break;
            }
        }
    }
    best
}

fn conjugate_scale(f: &FunctionSpec) -> Option<f64> {
    match f {
        FunctionSpec::Conjugate | FunctionSpec::Hn(-1) => Some(1.0),
        FunctionSpec::Affine { a, inner, .. } => conjugate_scale(inner).map(|s| a.norm() * s),
        _ => None,
    }
}

/// Upper bound for `‖f‖_CL` on the `(δ/3)`-pitch lattice in `clos(rD)`.
fn net_cl_bound(f: &FunctionSpec, r: f64, delta: f64) -> Result<f64> {
    if let Some(c) = f.commutator_lipschitz() {
        return Ok(c);
    }
    let pitch = delta / 3.0;
    if pitch > r {
        return Ok(0.0);
    }
    let spec = LatticeSpec::closed(pitch, r)?;
    if let Some(s) = conjugate_scale(f) {
        return Ok(s * conj_upper_bound(&spec)?.bound);
    }
    let pts = lattice_points(&spec);
    if pts.len() < 2 {
        return Ok(0.0);
    }
    let mut bound = separated_set_bound(f, &pts, pitch)?;
    if pts.len() <= DENSE_NET_CAP {
        let phi = match divided_difference_with_derivative(f, &pts, &pts) {
            Ok(d) => d.matrix,
            Err(_) => divided_difference(f, &pts, &pts)?.matrix,
        };
        bound = bound.min(multiplier_upper(&phi, 300, 0)?.upper);
    }
    Ok(bound)
}

/// `2ω_f(δ/2) + 2δ‖f‖_CL(F_δ)` with `F_δ` the `(δ/3)`-pitch lattice in `clos(rD)`,
/// which is a `(δ/2)`-net of the disc.
pub fn net_upper_bound(f: &FunctionSpec, disc_radius: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::arg("net_upper_bound needs delta > 0"));
    }
    if !(disc_radius > 0.0 && disc_radius.is_finite()) {
        return Err(Error::arg("disc radius must be positive"));
    }
    if f.is_constant() {
        return Ok(0.0);
    }
    let om = f
        .modulus_upper(0.5 * delta, disc_radius)
        .ok_or_else(|| Error::Precondition(format!("no modulus of continuity bound is known for {f}")))?;
    Ok(2.0 * om + 2.0 * delta * net_cl_bound(f, disc_radius, delta)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KmeLowerBound {
    /// Probe estimate of `ω_f(δ)` on the smallest disc centred at 0 holding both sets.
    pub omega_term: f64,
    /// Lower bound for `‖D₀f‖_M` on `Λ × M`.
    pub multiplier_lower: f64,
    pub value: f64,
}

fn assemble(omega_term: f64, multiplier_lower: f64, delta: f64) -> KmeLowerBound {
    KmeLowerBound { omega_term, multiplier_lower, value: omega_term.max(0.5 * delta * multiplier_lower) }
}

/// Checks `(Λ − M) ∩ cδD ⊂ {0}`.
fn check_separation(lam: &[C64], mu: &[C64], sep: f64) -> Result<()> {
    for (j, &a) in lam.iter().enumerate() {
        for (k, &b) in mu.iter().enumerate() {
            let d = (a - b).norm();
            if d != 0.0 && d < sep * (1.0 - 1e-12) {
                return Err(Error::Precondition(format!(
                    "points {j} and {k} are {d} apart, inside the separation radius {sep}"
                )));
            }
        }
    }
    Ok(())
}

pub fn kme_lower_bound_with(
    f: &FunctionSpec,
    lam: &[C64],
    mu: &[C64],
    delta: f64,
    budget: usize,
    seed: u64,
) -> Result<KmeLowerBound> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::arg("kme_lower_bound needs delta > 0"));
    }
    if lam.is_empty() || mu.is_empty() {
        return Err(Error::arg("point sets must be nonempty"));
    }
    check_separation(lam, mu, psi_constant().c * delta)?;
    let rho = lam.iter().chain(mu).map(|z| z.norm()).fold(0.0, f64::max);
    let phi = divided_difference(f, lam, mu)?.matrix;
    let m = multiplier_lower(&phi, budget, seed)?.lower;
    Ok(assemble(scalar_modulus_lower(f, rho, delta), m, delta))
}

/// `max{ω_f(δ), (δ/2)‖D₀f‖_{M(Λ, M)}}` for `cδ`-separated `Λ`, `M`.
pub fn kme_lower_bound(f: &FunctionSpec, lam: &[C64], mu: &[C64], delta: f64) -> Result<KmeLowerBound> {
    kme_lower_bound_with(f, lam, mu, delta, 64, 0)
}

/// The bound for `z̄` with `Λ = M = cδ(ℤ + iℤ) ∩ clos(rD)`. `D₀z̄` is invariant under
/// dilation, so its multiplier norm is that of the unit lattice in radius `r/(cδ)`.
pub fn kme_lower_bound_conj_lattice(r: f64, delta: f64) -> Result<KmeLowerBound> {
    if !(delta > 0.0 && r.is_finite()) {
        return Err(Error::arg("kme lattice bound needs delta > 0 and finite r"));
    }
    let c = psi_constant().c;
    let niz = niz_lower_bound(r / (c * delta))?;
    Ok(assemble(scalar_modulus_lower(&FunctionSpec::Conjugate, r, delta), niz.bound, delta))
}

/// Lattice points of pitch `cδ` in `clos(rD)`, the sets used by [`kme_lower_bound_conj_lattice`].
pub fn separated_lattice(r: f64, delta: f64) -> Result<Vec<C64>> {
    let pitch = psi_constant().c * delta;
    Ok(lattice_points(&LatticeSpec::closed(pitch, r.max(pitch))?))
}
