//! Seeded randomized search for witnesses of each modulus kind.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use super::witness::{ModulusKind, ModulusWitness};
use crate::error::{Error, Result};
use crate::fourier::psi_constant;
use crate::function::FunctionSpec;
use crate::lattice::{lattice_points, LatticeSpec};
use crate::linalg::norm::opnorm;
use crate::linalg::{hermitian_eigen, haar_unitary, ComplexMatrix, NormalOperator};
use crate::rng::{complex_normal, log_uniform, seeded, uniform, uniform_disc, SeededRng};
use crate::schur::multiplier_lower;
use crate::C64;

/// Closed set containing every spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralSet {
    /// `clos(rD)`.
    Disc(f64),
    /// `[−r, r]`.
    Interval(f64),
    /// `pitch·(ℤ + iℤ) ∩ clos(rD)`.
    Lattice { pitch: f64, radius: f64 },
}

impl SpectralSet {
    pub fn radius(&self) -> f64 {
        match *self {
            SpectralSet::Disc(r) | SpectralSet::Interval(r) => r,
            SpectralSet::Lattice { radius, .. } => radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SpectralSet::Disc(r) | SpectralSet::Interval(r) => r > 0.0 && r.is_finite(),
            SpectralSet::Lattice { pitch, radius } => pitch > 0.0 && radius >= 0.0 && radius.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::arg("spectral set needs a positive finite radius"))
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        let r = self.radius() * (1.0 + 1e-12) + 1e-300;
        match *self {
            SpectralSet::Disc(_) => z.norm() <= r,
            SpectralSet::Interval(_) => z.im == 0.0 && z.re.abs() <= r,
            SpectralSet::Lattice { pitch, .. } => {
                let on = |x: f64| ((x / pitch).round() * pitch - x).abs() <= 1e-12 * pitch.max(x.abs());
                z.norm() <= r && on(z.re) && on(z.im)
            }
        }
    }

    fn convex(&self) -> bool {
        !matches!(self, SpectralSet::Lattice { .. })
    }

    fn sample(&self, rng: &mut SeededRng) -> C64 {
        match *self {
            SpectralSet::Disc(r) => {
                if rng.random::<f64>() < 0.3 {
                    C64::from_polar(r, uniform(rng, -core::f64::consts::PI, core::f64::consts::PI))
                } else {
                    uniform_disc(rng, r)
                }
            }
            SpectralSet::Interval(r) => C64::new(uniform(rng, -r, r), 0.0),
            SpectralSet::Lattice { .. } => self.project(uniform_disc(rng, self.radius())),
        }
    }

    pub fn project(&self, z: C64) -> C64 {
        match *self {
            SpectralSet::Disc(r) => {
                let m = z.norm();
                if m > r {
                    z * (r / m)
                } else {
                    z
                }
            }
            SpectralSet::Interval(r) => C64::new(z.re.clamp(-r, r), 0.0),
            SpectralSet::Lattice { pitch, radius } => {
                let mut p = C64::new((z.re / pitch).round(), (z.im / pitch).round());
                let toward = |x: f64| if x > 0.0 { x - 1.0 } else if x < 0.0 { x + 1.0 } else { 0.0 };
                while p.norm() * pitch > radius * (1.0 + 1e-12) {
                    p = C64::new(toward(p.re), toward(p.im));
                }
                p * pitch
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub dim: usize,
    pub budget: usize,
    pub seed: u64,
    pub set: SpectralSet,
}

/// Search state, all in the eigenbasis `u` of `N`.
///
/// `mu`: PLAIN target spectrum of `N₂`, SA/C unused, U phases, USA signs, P zeros and ones.
/// `k`: skew-Hermitian generator (PLAIN, U, USA, P), Hermitian raw partner (SA),
/// raw partner (C).
#[derive(Clone, Debug)]
struct Candidate {
    lam: Vec<C64>,
    u: ComplexMatrix,
    mu: Vec<C64>,
    k: ComplexMatrix,
}

fn gaussian(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    m.add(&m.adjoint()).scale_real(0.5)
}

fn skew_part(m: &ComplexMatrix) -> ComplexMatrix {
    m.sub(&m.adjoint()).scale_real(0.5)
}

/// `exp(tK)` for skew-Hermitian `K`, through the eigen decomposition of `iK`.
struct SkewExp {
    values: Vec<f64>,
    vectors: ComplexMatrix,
}

impl SkewExp {
    fn new(k: &ComplexMatrix) -> SkewExp {
        let e = hermitian_eigen(&k.scale(C64::new(0.0, 1.0)));
        SkewExp { values: e.values, vectors: e.vectors }
    }

    fn at(&self, t: f64) -> ComplexMatrix {
        let v = &self.vectors;
        let d: Vec<C64> = self.values.iter().map(|&w| C64::from_polar(1.0, -t * w)).collect();
        ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * d[j]).matmul_adj(v)
    }
}

fn sandwich(e: &ComplexMatrix, d: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(e.rows(), e.cols(), |i, j| e[(i, j)] * d[j]).matmul_adj(e)
}

fn weighted(x: &ComplexMatrix, a: &[C64], b: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(x.rows(), x.cols(), |i, j| (a[i] - b[j]) * x[(i, j)])
}

struct Evaluated {
    value: f64,
    n2_spectrum: Option<(Vec<C64>, ComplexMatrix)>,
    partner: Option<ComplexMatrix>,
}

struct Searcher<'a> {
    kind: ModulusKind,
    f: &'a FunctionSpec,
    delta: f64,
    set: SpectralSet,
}

impl<'a> Searcher<'a> {
    fn fvals(&self, z: &[C64]) -> Result<Vec<C64>> {
        z.iter().map(|&w| self.f.eval(w)).collect()
    }

    fn mu_path(&self, c: &Candidate, t: f64) -> Vec<C64> {
        if self.set.convex() {
            c.lam.iter().zip(&c.mu).map(|(&a, &b)| a + (b - a) * t).collect()
        } else {
            c.mu.clone()
        }
    }

    /// Fit the candidate to the constraint boundary and report the achieved value.
    fn evaluate(&self, c: &Candidate) -> Result<Option<Evaluated>> {
        let fl = self.fvals(&c.lam)?;
        match self.kind {
            ModulusKind::SelfAdjoint | ModulusKind::Commutator => {
                let x = if self.kind == ModulusKind::SelfAdjoint { hermitian_part(&c.k) } else { c.k.clone() };
                let nx = opnorm(&x);
                if nx == 0.0 {
                    return Ok(None);
                }
                let cn = opnorm(&weighted(&x, &c.lam, &c.lam));
                let scale = nx.max(cn / self.delta);
                let x = x.scale_real(1.0 / scale);
                let value = opnorm(&weighted(&x, &fl, &fl));
                Ok(Some(Evaluated { value, n2_spectrum: None, partner: Some(x) }))
            }
            ModulusKind::Plain => {
                let e = SkewExp::new(&c.k);
                let lam_m = ComplexMatrix::diag(&c.lam);
                let cons = |t: f64| opnorm(&lam_m.sub(&sandwich(&e.at(t), &self.mu_path(c, t))));
                let t = match bisect(cons, self.delta) {
                    Some(t) => t,
                    None => return Ok(None),
                };
                let mu = self.mu_path(c, t);
                let et = e.at(t);
                let fm = self.fvals(&mu)?;
                let value = opnorm(&ComplexMatrix::diag(&fl).sub(&sandwich(&et, &fm)));
                Ok(Some(Evaluated { value, n2_spectrum: Some((mu, et)), partner: None }))
            }
            _ => {
                let e = SkewExp::new(&c.k);
                let cons = |t: f64| opnorm(&weighted(&sandwich(&e.at(t), &c.mu), &c.lam, &c.lam));
                let t = match bisect(cons, self.delta) {
                    Some(t) => t,
                    None => return Ok(None),
                };
                let x = sandwich(&e.at(t), &c.mu);
                let value = opnorm(&weighted(&x, &fl, &fl));
                Ok(Some(Evaluated { value, n2_spectrum: None, partner: Some(x) }))
            }
        }
    }

    fn fresh(&self, dim: usize, rng: &mut SeededRng) -> Candidate {
        let d = if rng.random::<bool>() { dim } else { rng.random_range(1..=dim) };
        let lam: Vec<C64> = (0..d).map(|_| self.set.sample(rng)).collect();
        let u = haar_unitary(d, rng);
        let g = gaussian(d, rng);
        let (mu, k) = match self.kind {
            ModulusKind::Plain if self.set.convex() => ((0..d).map(|_| self.set.sample(rng)).collect(), skew_part(&g)),
            ModulusKind::Plain => {
                let mu = lam
                    .iter()
                    .map(|&z| if rng.random::<bool>() { z } else { self.set.project(z + complex_normal(rng) * self.delta) })
                    .collect();
                (mu, skew_part(&g))
            }
            ModulusKind::SelfAdjoint => (Vec::new(), hermitian_part(&g)),
            ModulusKind::Commutator => (Vec::new(), g),
            ModulusKind::Unitary => {
                let ph = (0..d).map(|_| C64::from_polar(1.0, uniform(rng, -3.2, 3.2))).collect();
                (ph, skew_part(&g))
            }
            ModulusKind::UnitarySelfAdjoint | ModulusKind::Projection => {
                let lo = if self.kind == ModulusKind::Projection { 0.0 } else { -1.0 };
                let s = (0..d).map(|_| C64::new(if rng.random::<bool>() { 1.0 } else { lo }, 0.0)).collect();
                (s, skew_part(&g))
            }
        };
        Candidate { lam, u, mu, k }
    }

    fn perturb(&self, c: &Candidate, rng: &mut SeededRng) -> Candidate {
        let d = c.lam.len();
        let eps = log_uniform(rng, 1e-3, 0.5);
        let r = self.set.radius().max(1e-12);
        let step = |z: C64, rng: &mut SeededRng| self.set.project(z + complex_normal(rng) * (eps * r));
        let mut lam: Vec<C64> = c.lam.iter().map(|&z| step(z, rng)).collect();
        if matches!(self.set, SpectralSet::Interval(_)) {
            lam.iter_mut().for_each(|z| z.im = 0.0);
        }
        let rot = SkewExp::new(&skew_part(&gaussian(d, rng)).scale_real(eps)).at(1.0);
        let u = c.u.matmul(&rot);
        let g = gaussian(d, rng);
        let (mu, k) = match self.kind {
            ModulusKind::Plain => (c.mu.iter().map(|&z| step(z, rng)).collect(), c.k.add(&skew_part(&g).scale_real(eps))),
            ModulusKind::SelfAdjoint | ModulusKind::Commutator => {
                let s = eps * opnorm(&c.k).max(1e-12);
                let gk = if self.kind == ModulusKind::SelfAdjoint { hermitian_part(&g) } else { g };
                (Vec::new(), c.k.add(&gk.scale_real(s)))
            }
            ModulusKind::Unitary => {
                let ph = c.mu.iter().map(|&p| p * C64::from_polar(1.0, eps * crate::rng::normal(rng))).collect();
                (ph, c.k.add(&skew_part(&g).scale_real(eps)))
            }
            ModulusKind::UnitarySelfAdjoint | ModulusKind::Projection => {
                let lo = if self.kind == ModulusKind::Projection { 0.0 } else { -1.0 };
                let mut s = c.mu.clone();
                if rng.random::<f64>() < 0.2 {
                    let i = rng.random_range(0..d);
                    s[i] = C64::new(if s[i].re == 1.0 { lo } else { 1.0 }, 0.0);
                }
                (s, c.k.add(&skew_part(&g).scale_real(eps)))
            }
        };
        Candidate { lam, u, mu, k }
    }

    fn to_witness(&self, c: &Candidate, e: Evaluated, seed: u64) -> Result<ModulusWitness> {
        let n1 = NormalOperator::new(c.lam.clone(), c.u.clone())?;
        let n2 = match e.n2_spectrum {
            Some((mu, et)) => Some(NormalOperator::new(mu, c.u.matmul(&et))?),
            None => None,
        };
        let partner = e.partner.map(|x| c.u.matmul(&x).matmul_adj(&c.u));
        ModulusWitness::from_parts(self.kind, self.f.clone(), self.delta, n1, n2, partner, seed)
    }

    /// Lattice patch of pitch `cδ` with raw partner `k₀/(λ_i − λ_j)`, `k₀` a norming
    /// contraction for `D₀f` with its diagonal removed.
    fn separated_seed(&self, dim: usize, seed: u64) -> Result<Option<Candidate>> {
        let c = psi_constant().c;
        let pitch = c * self.delta;
        let r = self.set.radius();
        if matches!(self.set, SpectralSet::Interval(_)) || r < pitch || dim < 2 {
            return Ok(None);
        }
        let mut pts = match self.set {
            SpectralSet::Lattice { pitch: p, radius } if p >= pitch => lattice_points(&LatticeSpec::closed(p, radius)?),
            SpectralSet::Lattice { .. } => return Ok(None),
            _ => lattice_points(&LatticeSpec::closed(pitch, r)?),
        };
        pts.truncate(dim);
        if pts.len() < 2 {
            return Ok(None);
        }
        let phi = crate::lattice::divided_difference(self.f, &pts, &pts)?.matrix;
        let est = multiplier_lower(&phi, 32, seed)?;
        let b = &est.lower_certificate;
        let n = pts.len();
        let k = ComplexMatrix::from_fn(n, n, |i, j| if i == j { C64::new(0.0, 0.0) } else { b[(i, j)] / (pts[i] - pts[j]) });
        Ok(Some(Candidate { lam: pts, u: ComplexMatrix::identity(n), mu: Vec::new(), k }))
    }
}

/// Largest `t ∈ [0, 1]` found with `cons(t) ≤ delta`, by bisection from `cons(0)`.
fn bisect(cons: impl Fn(f64) -> f64, delta: f64) -> Option<f64> {
    if cons(0.0) > delta {
        return None;
    }
    if cons(1.0) <= delta {
        return Some(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if cons(mid) <= delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Best witness over `budget` candidates: each is fresh with probability 1/2, otherwise
/// a perturbation of the incumbent. Ties keep the earlier candidate.
pub fn modulus_search(kind: ModulusKind, f: &FunctionSpec, delta: f64, opts: &SearchOptions) -> Result<ModulusWitness> {
    opts.set.validate()?;
    if opts.dim == 0 {
        return Err(Error::arg("search dimension must be at least 1"));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::arg("delta must be finite and nonnegative"));
    }
    if delta == 0.0 && kind != ModulusKind::Plain {
        return Err(Error::arg(alloc::format!("{kind} modulus at delta = 0 has no admissible partner")));
    }
    let s = Searcher { kind, f, delta, set: opts.set };
    let mut rng = seeded(opts.seed);
    let mut best: Option<(Candidate, ModulusWitness)> = None;
    let consider = |c: Candidate, s: &Searcher, best: &mut Option<(Candidate, ModulusWitness)>| -> Result<()> {
        if let Some(e) = s.evaluate(&c)? {
            if best.as_ref().map_or(true, |(_, w)| e.value > w.value) {
                let w = s.to_witness(&c, e, opts.seed)?;
                *best = Some((c, w));
            }
        }
        Ok(())
    };
    if kind == ModulusKind::Commutator {
        if let Some(c) = s.separated_seed(opts.dim, opts.seed)? {
            consider(c, &s, &mut best)?;
        }
    }
    for _ in 0..opts.budget.max(1) {
        let c = match &best {
            Some((inc, _)) if rng.random::<bool>() => s.perturb(inc, &mut rng),
            _ => s.fresh(opts.dim, &mut rng),
        };
        consider(c, &s, &mut best)?;
    }
    match best {
        Some((_, w)) => Ok(w),
        None => {
            let z = opts.set.project(C64::new(0.0, 0.0));
            let n = NormalOperator::diagonal(vec![z]);
            let (n2, partner) = match kind {
                ModulusKind::Plain => (Some(n.clone()), None),
                ModulusKind::Projection => (None, Some(ComplexMatrix::zeros(1, 1))),
                _ => (None, Some(ComplexMatrix::identity(1))),
            };
            ModulusWitness::from_parts(kind, f.clone(), delta, n, n2, partner, opts.seed)
        }
    }
}
