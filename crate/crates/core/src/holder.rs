//! Hölder-regime experiments: the `h_n` family, operator-Hölder ratio searches,
//! quasicommutator ratios against `(1−α)⁻²`, and lower bounds for `ĥ_α`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::function::{hn, FunctionSpec};
use crate::linalg::norm::opnorm;
use crate::linalg::{apply_function, conjugate_diag, haar_unitary, hermitian_eigen, ComplexMatrix, NormalOperator};
use crate::moduli::estimates::scalar_modulus_lower;
use crate::moduli::search::{modulus_search, SearchOptions, SpectralSet};
use crate::moduli::transform::{omega_transform, ModulusSpec};
use crate::moduli::witness::{measure, ModulusKind, ModulusWitness};
use crate::moduli::ModulusEnvelope;
use crate::rng::{complex_normal, log_uniform, seeded, substream, uniform, uniform_disc};
use crate::C64;

/// Sample pairs used when no analytic Hölder seminorm is known.
pub const SEMINORM_PAIRS: usize = 1_000_000;

/// `h_n(z) = z^{n+1}/z̄^n`, `h_n(0) = 0`.
pub fn hn_eval(n: i32, z: C64) -> C64 {
    hn(n, z)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HnReport {
    pub n: i32,
    pub instances: usize,
    /// Largest `‖h_n(N₁) − h_n(N₂)‖ / ‖N₁ − N₂‖` seen.
    pub max_ratio: f64,
    pub ratio_violations: usize,
    /// Largest residual of the telescoping sum in `sgn²ᵏ`, relative to `max(1, ‖N₁‖ + ‖N₂‖)`.
    pub max_telescoping_residual: f64,
    pub telescoping_violations: usize,
    /// Sup of the scalar difference quotient over close pairs on the unit circle.
    pub circle_ratio: f64,
}

impl HnReport {
    pub fn lipschitz_constant(&self) -> f64 {
        (2 * self.n + 1).unsigned_abs() as f64
    }

    pub fn passed(&self) -> bool {
        self.ratio_violations == 0 && self.telescoping_violations == 0
    }
}

fn random_normal(d: usize, radius: f64, rng: &mut impl Rng) -> NormalOperator {
    let mut e: Vec<C64> = (0..d).map(|_| uniform_disc(rng, radius)).collect();
    if d > 1 && rng.random::<f64>() < 0.25 {
        e[0] = C64::new(0.0, 0.0);
    }
    NormalOperator::new(e, haar_unitary(d, rng)).expect("Haar conjugator is unitary")
}

/// A normal operator near `n`: rotated by `exp(εK)` and with moved eigenvalues.
fn nearby(n: &NormalOperator, rng: &mut impl Rng) -> NormalOperator {
    let d = n.dim();
    let eps = log_uniform(rng, 1e-4, 0.5);
    let e: Vec<C64> = n.eigenvalues().iter().map(|&z| z + complex_normal(rng) * (eps * 0.5)).collect();
    let k = ComplexMatrix::from_fn(d, d, |_, _| complex_normal(rng) * eps);
    let h = k.add(&k.adjoint()).scale_real(0.5);
    let eig = hermitian_eigen(&h);
    let v = conjugate_diag(&eig.vectors, &eig.values.iter().map(|&x| C64::from_polar(1.0, -x)).collect::<Vec<_>>());
    NormalOperator::new(e, v.matmul(n.conjugator())).expect("product of unitaries")
}

fn random_pair(dim: usize, radius: f64, rng: &mut impl Rng) -> (NormalOperator, NormalOperator) {
    let d = rng.random_range(1..=dim.max(1));
    let n1 = random_normal(d, radius, rng);
    let n2 = if rng.random::<bool>() { nearby(&n1, rng) } else { random_normal(d, radius, rng) };
    (n1, n2)
}

fn sgn_power(k: i32, n: &NormalOperator) -> ComplexMatrix {
    apply_function(&FunctionSpec::Sgn(k), n).expect("sgn is total")
}

/// `Σ_{j≤m} sgn^{2m−2j}(N₁)(N₁−N₂)sgn^{2j}(N₂) + Σ_{j<m} sgn^{2m−2j}(N₁)(N₂*−N₁*)sgn^{2j+2}(N₂)`
/// for `m ≥ 0`; the adjoint of the `m = −n−1` sum when `n < 0`.
pub fn hn_telescoping_sum(n: i32, n1: &NormalOperator, n2: &NormalOperator) -> ComplexMatrix {
    if n < 0 {
        return hn_telescoping_sum(-n - 1, n1, n2).adjoint();
    }
    let m = n;
    let diff = n1.matrix().sub(n2.matrix());
    let adiff = n2.matrix().adjoint().sub(&n1.matrix().adjoint());
    let mut acc = ComplexMatrix::zeros(n1.dim(), n2.dim());
    for j in 0..=m {
        acc = acc.add(&sgn_power(2 * m - 2 * j, n1).matmul(&diff).matmul(&sgn_power(2 * j, n2)));
    }
    for j in 0..m {
        acc = acc.add(&sgn_power(2 * m - 2 * j, n1).matmul(&adiff).matmul(&sgn_power(2 * j + 2, n2)));
    }
    acc
}

/// Sup of `|h_n(e^{is}) − h_n(e^{it})| / |e^{is} − e^{it}|` over close circle pairs.
pub fn hn_circle_ratio(n: i32) -> f64 {
    let mut best: f64 = 0.0;
    for a in 0..64 {
        let t = 2.0 * core::f64::consts::PI * a as f64 / 64.0;
        for &gap in &[1e-1, 1e-2, 1e-3, 1e-4] {
            let (z, w) = (C64::from_polar(1.0, t), C64::from_polar(1.0, t + gap));
            best = best.max((hn(n, z) - hn(n, w)).norm() / (z - w).norm());
        }
    }
    best
}

/// Random normal pairs with `dim ≤ dim`: the `|2n+1|` operator Lipschitz bound, the
/// telescoping identity, and the scalar sharpness on the circle.
pub fn hn_lipschitz_check(n: i32, instances: usize, dim: usize, seed: u64) -> Result<HnReport> {
    if dim == 0 {
        return Err(Error::arg("dim must be positive"));
    }
    let f = FunctionSpec::Hn(n);
    let lip = (2 * n + 1).unsigned_abs() as f64;
    let mut rep = HnReport {
        n,
        instances,
        max_ratio: 0.0,
        ratio_violations: 0,
        max_telescoping_residual: 0.0,
        telescoping_violations: 0,
        circle_ratio: hn_circle_ratio(n),
    };
    for i in 0..instances {
        let mut rng = substream(seed, i as u64);
        let (n1, n2) = random_pair(dim, 2.0, &mut rng);
        let lhs = apply_function(&f, &n1)?.sub(&apply_function(&f, &n2)?);
        let num = opnorm(&lhs);
        let den = opnorm(&n1.matrix().sub(n2.matrix()));
        if num > lip * den + 1e-8 {
            rep.ratio_violations += 1;
        }
        if den > 0.0 {
            rep.max_ratio = rep.max_ratio.max(num / den);
        }
        let scale = (n1.norm() + n2.norm()).max(1.0);
        let res = opnorm(&lhs.sub(&hn_telescoping_sum(n, &n1, &n2))) / scale;
        rep.max_telescoping_residual = rep.max_telescoping_residual.max(res);
        if res > 1e-9 {
            rep.telescoping_violations += 1;
        }
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeminormMethod {
    /// Registry bound, exact or an upper bound.
    Analytic,
    /// Max over seeded sample pairs.
    Sampled { pairs: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeminormEstimate {
    pub value: f64,
    pub method: SeminormMethod,
}

/// Max of `|f(z) − f(w)|/|z − w|^α` over the first `pairs` pairs of a seeded stream
/// in `clos(rD)`. Extending `pairs` only adds candidates, so the estimate never decreases.
pub fn holder_seminorm_sampled(f: &FunctionSpec, alpha: f64, radius: f64, pairs: usize, seed: u64) -> f64 {
    let mut rng = seeded(seed);
    let mut best: f64 = 0.0;
    for _ in 0..pairs {
        let z = uniform_disc(&mut rng, radius);
        let w = if rng.random::<bool>() {
            uniform_disc(&mut rng, radius)
        } else {
            let t = log_uniform(&mut rng, 1e-6 * radius, 2.0 * radius);
            let w = z + C64::from_polar(t, uniform(&mut rng, 0.0, 2.0 * core::f64::consts::PI));
            if w.norm() > radius {
                w * (radius / w.norm())
            } else {
                w
            }
        };
        let d = (z - w).norm();
        if d == 0.0 {
            continue;
        }
        if let (Ok(a), Ok(b)) = (f.eval(z), f.eval(w)) {
            let q = (a - b).norm() / d.powf(alpha);
            if q.is_finite() {
                best = best.max(q);
            }
        }
    }
    best
}

/// `‖f‖_{Λ_α}` on `clos(rD)`: the registry value when known, else [`holder_seminorm_sampled`]
/// with [`SEMINORM_PAIRS`] pairs.
pub fn holder_seminorm_estimate(f: &FunctionSpec, alpha: f64, radius: f64, seed: u64) -> SeminormEstimate {
    match f.holder_seminorm(alpha, Some(radius)) {
        Some(v) => SeminormEstimate { value: v, method: SeminormMethod::Analytic },
        None => SeminormEstimate {
            value: holder_seminorm_sampled(f, alpha, radius, SEMINORM_PAIRS, seed),
            method: SeminormMethod::Sampled { pairs: SEMINORM_PAIRS, seed },
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormulaTrace {
    /// `δ` at which the witness was read.
    pub delta: f64,
    /// Modulus value from the witness or envelope at `delta`.
    pub omega: f64,
    pub seminorm: SeminormEstimate,
    /// Disc radius the seminorm refers to.
    pub radius: f64,
    /// `‖f(N₁) − f(N₂)‖ / ‖N₁ − N₂‖^α` before normalization.
    pub raw_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderConstantEstimate {
    pub alpha: f64,
    pub lower: f64,
    pub witness: ModulusWitness,
    pub formula_trace: FormulaTrace,
}

impl HolderConstantEstimate {
    /// `witness.value / (‖f‖_{Λ_α} ‖N₁ − N₂‖^α)` from the stored data.
    pub fn recompute(&self) -> Result<f64> {
        let (c, v) = measure(
            ModulusKind::Plain,
            &self.witness.f,
            &self.witness.n1,
            self.witness.n2.as_ref(),
            self.witness.partner.as_ref(),
        )?;
        if c == 0.0 || self.formula_trace.seminorm.value == 0.0 {
            return Err(Error::Degenerate("zero denominator".into()));
        }
        Ok(v / (self.formula_trace.seminorm.value * c.powf(self.alpha)))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::arg(alloc::format!("alpha = {alpha} is outside (0, 1)")))
    }
}

fn spectral_radius(w: &ModulusWitness) -> f64 {
    w.n1.eigenvalues().iter().chain(w.n2.iter().flat_map(|n| n.eigenvalues())).map(|z| z.norm()).fold(0.0, f64::max)
}

fn estimate_from(alpha: f64, w: ModulusWitness, seminorm: SeminormEstimate, radius: f64) -> Result<HolderConstantEstimate> {
    let (c, v) = measure(ModulusKind::Plain, &w.f, &w.n1, w.n2.as_ref(), None)?;
    if c == 0.0 {
        return Err(Error::Degenerate("witness operators coincide".into()));
    }
    let raw = v / c.powf(alpha);
    Ok(HolderConstantEstimate {
        alpha,
        lower: raw / seminorm.value,
        formula_trace: FormulaTrace { delta: w.delta, omega: w.value, seminorm, radius, raw_ratio: raw },
        witness: w,
    })
}

/// 1×1 witnesses on rays and diameters of the disc.
fn scalar_candidates(f: &FunctionSpec, r: f64, set: &SpectralSet) -> Vec<ModulusWitness> {
    let mut out = Vec::new();
    let mut push = |z: C64, w: C64| {
        let (z, w) = (set.project(z), set.project(w));
        if z == w {
            return;
        }
        let n1 = NormalOperator::diagonal(alloc::vec![z]);
        let n2 = NormalOperator::diagonal(alloc::vec![w]);
        let d = (z - w).norm();
        if let Ok(wit) = ModulusWitness::from_parts(ModulusKind::Plain, f.clone(), d, n1, Some(n2), None, 0) {
            out.push(wit);
        }
    };
    for k in 0..=12 {
        let t = r * 2.0.powi(-k);
        for a in 0..8 {
            let e = C64::from_polar(1.0, core::f64::consts::PI * a as f64 / 4.0);
            push(C64::new(0.0, 0.0), e * t);
            push(e * r, e * (r - t));
            push(e * (0.5 * t), -e * (0.5 * t));
        }
    }
    out
}

/// Searches PLAIN witnesses with spectra in `set` over a log grid of `δ` and
/// returns the best `‖f(N₁) − f(N₂)‖ / (‖f‖_{Λ_α} ‖N₁ − N₂‖^α)`, with the
/// seminorm taken on `clos(r D)`, `r` the radius of `set`.
pub fn holder_ratio_search(f: &FunctionSpec, alpha: f64, opts: &SearchOptions) -> Result<HolderConstantEstimate> {
    check_alpha(alpha)?;
    opts.set.validate()?;
    if f.is_constant() {
        return Err(Error::Degenerate(alloc::format!("{f} is constant, so its Hölder seminorm vanishes")));
    }
    let r = opts.set.radius();
    let seminorm = holder_seminorm_estimate(f, alpha, r, opts.seed);
    if !(seminorm.value > 0.0) {
        return Err(Error::Degenerate(alloc::format!("Hölder seminorm of {f} vanishes on the disc")));
    }
    let mut cands = scalar_candidates(f, r, &opts.set);
    const LEVELS: usize = 8;
    let per = (opts.budget / LEVELS).max(1);
    for k in 0..LEVELS {
        let delta = 2.0 * r * 10.0.powf(-3.0 * k as f64 / (LEVELS - 1) as f64);
        let o = SearchOptions { budget: per, seed: opts.seed.wrapping_add(k as u64), ..*opts };
        cands.push(modulus_search(ModulusKind::Plain, f, delta, &o)?);
    }
    let mut best: Option<HolderConstantEstimate> = None;
    for w in cands {
        if let Ok(e) = estimate_from(alpha, w, seminorm, r) {
            if best.as_ref().is_none_or(|b| e.lower > b.lower) {
                best = Some(e);
            }
        }
    }
    best.ok_or_else(|| Error::Degenerate("no witness with distinct operators".into()))
}

/// Substitution point `δ = 2 exp(−1/(1−α))`.
pub fn halpha_delta(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(2.0 * (-1.0 / (1.0 - alpha)).exp())
}

/// Reads a PLAIN envelope at `δ = 2exp(−1/(1−α))` for each `α` and turns the
/// witness behind that value into a lower bound for `ĥ_α`. `witnesses` is the
/// list the envelope was built from. Grid points above the substitution point
/// are used only when none lies below it; the trace records which `δ` was read.
pub fn halpha_lower(
    alpha_grid: &[f64],
    f: &FunctionSpec,
    envelope: &ModulusEnvelope,
    witnesses: &[ModulusWitness],
) -> Result<Vec<HolderConstantEstimate>> {
    if envelope.kind != ModulusKind::Plain {
        return Err(Error::arg("halpha_lower needs a PLAIN envelope"));
    }
    envelope.verify()?;
    for &a in alpha_grid {
        check_alpha(a)?;
    }
    let mut out = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        let target = halpha_delta(alpha)?;
        let below = envelope.deltas.iter().rposition(|&d| d <= target);
        let order: Vec<usize> = match below {
            Some(k) => (0..=k).rev().collect(),
            None => (0..envelope.deltas.len()).collect(),
        };
        let k = order
            .into_iter()
            .find(|&k| envelope.provenance[k].is_some())
            .ok_or_else(|| Error::Degenerate("envelope has no witness".into()))?;
        let i = envelope.provenance[k].unwrap_or_default();
        let w = witnesses.get(i).ok_or_else(|| Error::arg("witness list does not match the envelope"))?;
        if &w.f != f || w.kind != ModulusKind::Plain {
            return Err(Error::arg("witness does not belong to this function"));
        }
        w.validate()?;
        let radius = spectral_radius(w).max(f64::MIN_POSITIVE);
        let seminorm = holder_seminorm_estimate(f, alpha, radius, w.seed);
        let mut e = estimate_from(alpha, w.clone(), seminorm, radius)?;
        e.formula_trace.delta = envelope.deltas[k];
        e.formula_trace.omega = envelope.lower_values[k];
        out.push(e);
    }
    Ok(out)
}

/// Sampled check that `|f| ≤ 1` and `|f(z) − f(w)| ≤ |z − w|` on `clos(rD)`.
pub fn in_unit_class(f: &FunctionSpec, radius: f64, seed: u64) -> bool {
    let mut rng = seeded(seed);
    for _ in 0..20_000 {
        let z = uniform_disc(&mut rng, radius);
        let w = uniform_disc(&mut rng, radius);
        match (f.eval(z), f.eval(w)) {
            (Ok(a), Ok(b)) => {
                if a.norm() > 1.0 + 1e-12 || (a - b).norm() > (z - w).norm() * (1.0 + 1e-9) + 1e-15 {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

/// `‖f(N₁)R − Rf(N₂)‖ / (s ‖N₁R − RN₂‖^α ‖R‖^{1−α})`; `None` when numerator and
/// denominator both vanish, infinite when only the denominator does.
pub fn quasicommutator_ratio(
    f: &FunctionSpec,
    n1: &NormalOperator,
    n2: &NormalOperator,
    r: &ComplexMatrix,
    alpha: f64,
    seminorm: f64,
) -> Result<Option<f64>> {
    let (num, t, rn) = quasicommutator_parts(f, n1, n2, r)?;
    let den = seminorm * t.powf(alpha) * rn.powf(1.0 - alpha);
    Ok(ratio(num, den, rn))
}

fn quasicommutator_parts(f: &FunctionSpec, n1: &NormalOperator, n2: &NormalOperator, r: &ComplexMatrix) -> Result<(f64, f64, f64)> {
    let num = opnorm(&ComplexMatrix::quasi_commutator(&apply_function(f, n1)?, r, &apply_function(f, n2)?));
    let t = opnorm(&ComplexMatrix::quasi_commutator(n1.matrix(), r, n2.matrix()));
    Ok((num, t, opnorm(r)))
}

fn ratio(num: f64, den: f64, scale: f64) -> Option<f64> {
    if den > 0.0 {
        Some(num / den)
    } else if num <= 1e-12 * scale.max(1.0) {
        None
    } else {
        Some(f64::INFINITY)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasicommutatorReport {
    pub alpha: f64,
    pub instances: usize,
    pub seminorm: SeminormEstimate,
    /// Finite recorded ratios, sorted.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// `(1−α)⁻²`.
    pub reference: f64,
    /// Zero quasicommutator with nonzero `f`-quasicommutator.
    pub violations: usize,
    /// Max of `‖f(N₁)R − Rf(N₂)‖ / (‖R‖ ω_f**(‖N₁R − RN₂‖/‖R‖))` with a measured `ω_f`.
    pub max_ratio_omega: f64,
}

impl QuasicommutatorReport {
    pub fn quantile(&self, q: f64) -> f64 {
        if self.ratios.is_empty() {
            return 0.0;
        }
        let i = ((self.ratios.len() - 1) as f64 * q.clamp(0.0, 1.0)).round() as usize;
        self.ratios[i]
    }

    pub fn is_finite(&self) -> bool {
        self.violations == 0 && self.max_ratio.is_finite() && self.max_ratio_omega.is_finite()
    }
}

/// Probe table of `ω_f` on `clos(rD)` at `t = 2r·2^{−k}`, made nondecreasing.
pub fn measured_modulus(f: &FunctionSpec, radius: f64) -> Result<ModulusSpec> {
    let mut t: Vec<f64> = (0..=24).rev().map(|k| 2.0 * radius * 2.0.powi(-k)).collect();
    let mut w: Vec<f64> = t.iter().map(|&x| scalar_modulus_lower(f, radius, x)).collect();
    for k in 1..w.len() {
        w[k] = w[k].max(w[k - 1]);
    }
    t.push(4.0 * radius);
    w.push(*w.last().unwrap_or(&0.0));
    ModulusSpec::table(t, w)
}

/// Random `(N₁, N₂, R)` with `dim ≤ dim` and spectra in the unit disc. A third of
/// the instances use `R = I`, a third a nearby `N₂` with `R` close to the identity.
pub fn quasicommutator_experiment(
    f: &FunctionSpec,
    alpha: f64,
    instances: usize,
    dim: usize,
    seed: u64,
) -> Result<QuasicommutatorReport> {
    check_alpha(alpha)?;
    if dim == 0 {
        return Err(Error::arg("dim must be positive"));
    }
    let radius = 1.0;
    let seminorm = holder_seminorm_estimate(f, alpha, radius, seed);
    if !(seminorm.value > 0.0) {
        return Err(Error::Degenerate(alloc::format!("Hölder seminorm of {f} vanishes")));
    }
    let omega = measured_modulus(f, radius)?;
    let mut rep = QuasicommutatorReport {
        alpha,
        instances,
        seminorm,
        ratios: Vec::new(),
        max_ratio: 0.0,
        reference: (1.0 - alpha).powi(-2),
        violations: 0,
        max_ratio_omega: 0.0,
    };
    for i in 0..instances {
        let mut rng = substream(seed, i as u64);
        let d = rng.random_range(1..=dim);
        let n1 = random_normal(d, radius, &mut rng);
        let (n2, r) = match i % 3 {
            0 => (nearby(&n1, &mut rng), ComplexMatrix::identity(d)),
            1 => {
                let eps = log_uniform(&mut rng, 1e-3, 0.5);
                let r = ComplexMatrix::identity(d).add(&ComplexMatrix::from_fn(d, d, |_, _| complex_normal(&mut rng) * eps));
                (nearby(&n1, &mut rng), r)
            }
            _ => (random_normal(d, radius, &mut rng), ComplexMatrix::from_fn(d, d, |_, _| complex_normal(&mut rng))),
        };
        let (num, t, rn) = quasicommutator_parts(f, &n1, &n2, &r)?;
        match ratio(num, seminorm.value * t.powf(alpha) * rn.powf(1.0 - alpha), rn) {
            Some(q) if q.is_finite() => {
                rep.ratios.push(q);
                rep.max_ratio = rep.max_ratio.max(q);
            }
            Some(_) => rep.violations += 1,
            None => {}
        }
        if rn > 0.0 && t > 0.0 {
            let w2 = omega_transform(&omega, t / rn, 2)?;
            if let Some(q) = ratio(num, rn * w2, rn) {
                rep.max_ratio_omega = rep.max_ratio_omega.max(q);
            }
        }
    }
    rep.ratios.sort_by(f64::total_cmp);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::conjugate_witness;

    #[test]
    fn hn_examples() {
        let z = C64::new(0.3, -1.2);
        assert_eq!(hn_eval(0, z), z);
        assert!((hn_eval(-1, z) - z.conj()).norm() < 1e-15);
        assert_eq!(hn_eval(3, C64::new(0.0, 0.0)), C64::new(0.0, 0.0));
        for &t in &[0.1, 1.0, 2.5, -3.0] {
            assert!((hn_eval(1, C64::from_polar(1.0, t)) - C64::from_polar(1.0, 3.0 * t)).norm() < 1e-14);
        }
        let mut rng = seeded(1);
        for n in -4..=4 {
            for _ in 0..50 {
                let z = uniform_disc(&mut rng, 3.0);
                assert!((hn_eval(n, z).conj() - hn_eval(-n - 1, z)).norm() < 1e-12 * (1.0 + z.norm()));
            }
        }
    }

    #[test]
    fn identity_ratio_is_one() {
        let rep = hn_lipschitz_check(0, 50, 8, 3).unwrap();
        assert!(rep.passed());
        assert!(rep.max_ratio <= 1.0 + 1e-12);
        assert!((rep.circle_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hn_bounds_and_telescoping() {
        for n in -4..=4 {
            let rep = hn_lipschitz_check(n, 30, 16, 11).unwrap();
            assert!(rep.passed(), "{rep:?}");
            assert!(rep.circle_ratio >= rep.lipschitz_constant() - 1e-4, "{rep:?}");
            assert!(rep.circle_ratio <= rep.lipschitz_constant() + 1e-12);
        }
        let rep = hn_lipschitz_check(1, 200, 16, 12).unwrap();
        assert_eq!(rep.ratio_violations, 0);
    }

    #[test]
    fn constant_is_degenerate() {
        let opts = SearchOptions { dim: 3, budget: 8, seed: 0, set: SpectralSet::Disc(1.0) };
        let f = FunctionSpec::Constant(C64::new(2.0, 1.0));
        assert!(matches!(holder_ratio_search(&f, 0.5, &opts), Err(Error::Degenerate(_))));
        assert!(holder_ratio_search(&FunctionSpec::Identity, 1.0, &opts).is_err());
    }

    #[test]
    fn abs_power_reaches_one() {
        let opts = SearchOptions { dim: 3, budget: 16, seed: 4, set: SpectralSet::Disc(1.0) };
        for &a in &[0.3, 0.5, 0.8] {
            let e = holder_ratio_search(&FunctionSpec::AbsPower(a), a, &opts).unwrap();
            assert!(e.lower >= 1.0 - 1e-6, "{a}: {}", e.lower);
            assert!((e.recompute().unwrap() - e.lower).abs() <= 1e-9 * e.lower.max(1.0));
        }
    }

    #[test]
    fn identity_raw_ratio_grows_with_radius() {
        let mut last = 0.0;
        for &r in &[1.0, 4.0, 16.0] {
            let opts = SearchOptions { dim: 3, budget: 16, seed: 2, set: SpectralSet::Disc(r) };
            let e = holder_ratio_search(&FunctionSpec::Identity, 0.5, &opts).unwrap();
            assert!(e.formula_trace.raw_ratio > last);
            assert!(e.lower <= 1.0 + 1e-9 && e.lower.is_finite());
            last = e.formula_trace.raw_ratio;
        }
    }

    #[test]
    fn conjugation_symmetry_of_estimates() {
        let opts = SearchOptions { dim: 4, budget: 16, seed: 8, set: SpectralSet::Disc(1.0) };
        let f = FunctionSpec::Hn(1);
        let e = holder_ratio_search(&f, 0.6, &opts).unwrap();
        let cw = conjugate_witness(&e.witness).unwrap();
        let (_, v) = measure(ModulusKind::Plain, &cw.f, &cw.n1, cw.n2.as_ref(), None).unwrap();
        assert!((v - e.witness.value).abs() <= 1e-9 * v.max(1.0));
        let back = holder_seminorm_estimate(&cw.f, 0.6, 1.0, 8);
        assert!((back.value - e.formula_trace.seminorm.value).abs() <= 1e-9 * back.value.max(1.0));
    }

    #[test]
    fn sampled_seminorm_is_monotone_and_bounded() {
        let f = FunctionSpec::Psi;
        let mut last = 0.0;
        for &n in &[100, 1000, 10_000, 50_000] {
            let v = holder_seminorm_sampled(&f, 0.5, 2.0, n, 7);
            assert!(v >= last);
            last = v;
        }
        assert!(in_unit_class(&f, 2.0, 1));
        for &a in &[0.2, 0.5, 0.9] {
            assert!(holder_seminorm_sampled(&f, a, 2.0, 50_000, 3) <= 2.0.powf(1.0 - a) + 1e-9);
        }
    }

    #[test]
    fn quasicommutator_reductions() {
        let mut rng = seeded(5);
        let n1 = random_normal(5, 1.0, &mut rng);
        let n2 = random_normal(5, 1.0, &mut rng);
        let id = ComplexMatrix::identity(5);
        let q = quasicommutator_ratio(&FunctionSpec::Conjugate, &n1, &n2, &id, 0.4, 1.0).unwrap().unwrap();
        let d = opnorm(&n1.matrix().sub(n2.matrix()));
        assert!((q - d.powf(0.6)).abs() < 1e-10);
        let diag = NormalOperator::diagonal(alloc::vec![C64::new(0.5, 0.1), C64::new(-0.2, 0.3)]);
        let r = ComplexMatrix::diag(&[C64::new(1.0, 2.0), C64::new(0.5, 0.0)]);
        assert_eq!(quasicommutator_ratio(&FunctionSpec::Hn(2), &diag, &diag, &r, 0.5, 1.0).unwrap(), None);
    }

    #[test]
    fn experiment_is_finite() {
        for &a in &[0.5, 0.9] {
            let rep = quasicommutator_experiment(&FunctionSpec::AbsPower(a), a, 30, 6, 1).unwrap();
            assert!(rep.is_finite(), "{rep:?}");
            assert!(rep.max_ratio > 0.0 && rep.quantile(0.5) <= rep.max_ratio);
        }
    }

    #[test]
    fn halpha_substitution() {
        assert!((halpha_delta(0.5).unwrap() - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(halpha_delta(1.0).is_err() && halpha_delta(0.0).is_err());
        let f = FunctionSpec::Identity;
        let deltas = [0.01, 0.05, 0.2, 0.5];
        let ws: Vec<ModulusWitness> = deltas
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                modulus_search(ModulusKind::Plain, &f, d, &SearchOptions { dim: 2, budget: 6, seed: i as u64, set: SpectralSet::Disc(1.0) })
                    .unwrap()
            })
            .collect();
        let env = ModulusEnvelope::from_witnesses(ModulusKind::Plain, &deltas, &ws).unwrap();
        let out = halpha_lower(&[0.3, 0.5, 0.7], &f, &env, &ws).unwrap();
        for e in &out {
            assert!(e.lower > 0.0 && e.lower.is_finite());
            assert!((e.recompute().unwrap() - e.lower).abs() <= 1e-9 * e.lower.max(1.0));
        }
        assert!(halpha_lower(&[1.5], &f, &env, &ws).is_err());
    }
}
