//! Subcommand bodies. Each validates its parameters first (configuration
//! errors), computes, and returns the artifacts to write; nothing touches the
//! filesystem here except reading declared inputs.

use std::path::Path;

use rayon::prelude::*;

use opmod_core::fourier::{formula_check, Formula, GridParams};
use opmod_core::holder::{holder_ratio_search, quasicommutator_experiment};
use opmod_core::lattice::{
    conj_upper_bound, divided_difference, lattice_points, niz_lower_bound, separated_set_bound, LatticeSpec,
};
use opmod_core::linalg::{apply_function, haar_unitary, operator_norm};
use opmod_core::moduli::witness::measure;
use opmod_core::moduli::{
    doi_quasicommutator, mcc_sandwich_check, modulus_search, omega_transform, ModulusEnvelope, ModulusKind, ModulusSpec,
    ModulusWitness, SearchOptions, SpectralSet,
};
use opmod_core::rng::{complex_normal, substream, uniform_disc};
use opmod_core::schur::{multiplier_lower, multiplier_upper};
use opmod_core::{ComplexMatrix, FunctionSpec, NormalOperator};
use rand::Rng;

use crate::config::{
    DoiCheckParams, Experiment, FourierCheckParams, HolderParams, LatticeBoundParams, MccCheckParams, MultnormParams,
    OmegaParams, SearchExtremalParams,
};
use crate::error::{CliError, CliResult};
use crate::format::{matrix_from_json, matrix_to_json, num, witness_from_json, witness_to_json};

/// Largest lattice for which a dense multiplier bound is computed for a general `f`.
const DENSE_LATTICE_CAP: usize = 2000;
const DENSE_UPPER_CAP: usize = 256;

#[derive(Debug, Default)]
pub struct Artifacts {
    /// File name and contents, in write order.
    pub files: Vec<(String, Vec<u8>)>,
    /// Violated invariants; a nonempty list means exit status 1.
    pub failures: Vec<String>,
    pub summary: Vec<String>,
}

impl Artifacts {
    fn file(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn parse_f(s: &str) -> CliResult<FunctionSpec> {
    s.parse().map_err(|e| CliError::config(format!("unknown function id {s:?}: {e}")))
}

fn parse_kind(s: &str) -> CliResult<ModulusKind> {
    s.parse().map_err(|e| CliError::config(format!("unknown modulus kind {s:?}: {e}")))
}

fn parse_numbers(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::config(format!("bad number {p:?} in {what}"))))
        .collect()
}

pub fn parse_set(s: &str) -> CliResult<SpectralSet> {
    let (head, rest) = s.split_once(':').ok_or_else(|| CliError::config(format!("bad spectral set {s:?}")))?;
    let v = parse_numbers(rest, "spectral set")?;
    let set = match (head, v.as_slice()) {
        ("disc", [r]) => SpectralSet::Disc(*r),
        ("interval", [r]) => SpectralSet::Interval(*r),
        ("lattice", [pitch, r]) => SpectralSet::Lattice { pitch: *pitch, radius: *r },
        _ => return Err(CliError::config(format!("bad spectral set {s:?}; use disc:r, interval:r or lattice:pitch,r"))),
    };
    set.validate().map_err(|e| CliError::config(e.to_string()))?;
    Ok(set)
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    t: Vec<f64>,
    w: Vec<f64>,
}

pub fn parse_modulus(s: &str) -> CliResult<ModulusSpec> {
    let cfg = |e: opmod_core::Error| CliError::config(format!("bad modulus {s:?}: {e}"));
    if s == "linear" {
        return Ok(ModulusSpec::Linear);
    }
    let (head, rest) = s.split_once(':').ok_or_else(|| CliError::config(format!("bad modulus {s:?}")))?;
    match head {
        "power" => match parse_numbers(rest, "modulus")?.as_slice() {
            [a] => ModulusSpec::power(*a).map_err(cfg),
            _ => Err(CliError::config(format!("bad modulus {s:?}"))),
        },
        "bounded" => match parse_numbers(rest, "modulus")?.as_slice() {
            [a, cap] => ModulusSpec::bounded_power(*a, *cap).map_err(cfg),
            _ => Err(CliError::config(format!("bad modulus {s:?}"))),
        },
        "table" => {
            let file: TableFile = serde_json::from_slice(&read(Path::new(rest))?)
                .map_err(|e| CliError::config(format!("bad table file {rest:?}: {e}")))?;
            let grid = file.t.clone();
            let spec = ModulusSpec::table(file.t, file.w).map_err(cfg)?;
            spec.check_subadditive(&grid).map_err(cfg)?;
            Ok(spec)
        }
        _ => Err(CliError::config(format!("bad modulus {s:?}"))),
    }
}

fn positive(x: f64, what: &str) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!("{what} must be positive and finite, got {x}")))
    }
}

fn nonzero(n: usize, what: &str) -> CliResult<()> {
    if n > 0 {
        Ok(())
    } else {
        Err(CliError::config(format!("{what} must be positive")))
    }
}

fn increasing(grid: &[f64], what: &str) -> CliResult<()> {
    if grid.is_empty() {
        return Err(CliError::config(format!("{what} is empty")));
    }
    for &x in grid {
        positive(x, what)?;
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::config(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

fn norm(m: &ComplexMatrix) -> CliResult<f64> {
    Ok(operator_norm(m)?)
}

pub fn execute(e: &Experiment) -> CliResult<Artifacts> {
    match e {
        Experiment::Multnorm(p) => multnorm(p),
        Experiment::FourierCheck(p) => fourier_check(p),
        Experiment::LatticeBound(p) => lattice_bound(p),
        Experiment::Omega(p) => omega(p),
        Experiment::DoiCheck(p) => doi_check(p),
        Experiment::SearchExtremal(p) => search_extremal(p),
        Experiment::Holder(p) => holder(p),
        Experiment::MccCheck(p) => mcc_check(p),
    }
}

fn multnorm(p: &MultnormParams) -> CliResult<Artifacts> {
    let path = p.input.as_ref().ok_or_else(|| CliError::config("multnorm needs --input"))?;
    let phi = matrix_from_json(&read(path)?)?;
    if phi.is_empty() {
        return Err(CliError::config("matrix is empty"));
    }
    nonzero(p.budget, "budget")?;
    let lower = multiplier_lower(&phi, p.budget, p.seed)?;
    let upper = multiplier_upper(&phi, p.iterations, p.seed)?;
    let mut a = Artifacts::default();
    a.check(lower.lower <= upper.upper * (1.0 + 1e-12), || {
        format!("lower bound {} exceeds upper bound {}", lower.lower, upper.upper)
    });
    if let Err(e) = lower.verify(&phi) {
        a.failures.push(format!("lower certificate: {e}"));
    }
    if let Err(e) = upper.verify(&phi) {
        a.failures.push(format!("upper certificate: {e}"));
    }
    let report = serde_json::json!({
        "rows": phi.rows(),
        "cols": phi.cols(),
        "lower": lower.lower,
        "upper": upper.upper,
        "budget": p.budget,
        "iterations": p.iterations,
        "seed": p.seed,
    });
    let mut bytes = serde_json::to_vec_pretty(&report)?;
    bytes.push(b'\n');
    a.file("multnorm.json", bytes);
    a.file("multnorm.csv", csv_bytes(&["lower", "upper"], &[vec![num(lower.lower), num(upper.upper)]])?);
    a.file("multnorm_lower_certificate.json", matrix_to_json(&lower.lower_certificate)?);
    if let Some(f) = &upper.upper_certificate {
        a.file("multnorm_factor_x.json", matrix_to_json(&f.x)?);
        a.file("multnorm_factor_y.json", matrix_to_json(&f.y)?);
    }
    a.summary.push(format!("lower {} upper {}", num(lower.lower), num(upper.upper)));
    Ok(a)
}

fn fourier_check(p: &FourierCheckParams) -> CliResult<Artifacts> {
    let formulas = p
        .formula
        .iter()
        .map(|s| s.parse::<Formula>().map_err(|e| CliError::config(e.to_string())))
        .collect::<CliResult<Vec<_>>>()?;
    if formulas.is_empty() {
        return Err(CliError::config("no formulas given"));
    }
    let params = GridParams { half_width: p.half_width, samples: p.samples, supersample: p.supersample, taper: false };
    params.validate().map_err(|e| CliError::config(e.to_string()))?;
    let checks = formulas.par_iter().map(|&f| formula_check(f, params)).collect::<Result<Vec<_>, _>>()?;
    let mut a = Artifacts::default();
    let mut rows = Vec::new();
    for c in &checks {
        a.check(c.max_abs_error <= p.tolerance, || {
            format!("{} max error {} above {}", c.formula, c.max_abs_error, p.tolerance)
        });
        rows.push(vec![c.formula.to_string(), num(p.half_width), p.samples.to_string(), num(c.max_abs_error)]);
        a.summary.push(format!("{}: {}", c.formula, num(c.max_abs_error)));
    }
    a.file("fourier_check.csv", csv_bytes(&["formula_id", "grid_W", "grid_N", "max_abs_error"], &rows)?);
    Ok(a)
}

fn is_conj(f: &FunctionSpec) -> bool {
    matches!(f, FunctionSpec::Conjugate | FunctionSpec::Hn(-1))
}

fn lattice_row(f: &FunctionSpec, delta: f64, r: f64, budget: usize, seed: u64) -> CliResult<(f64, f64)> {
    let spec = LatticeSpec::closed(delta, r)?;
    if is_conj(f) {
        // D₀z̄ is dilation invariant, so the unit-lattice bound at r/δ applies.
        let lower = niz_lower_bound(r / delta)?.bound;
        return Ok((lower, conj_upper_bound(&spec)?.bound));
    }
    let pts = lattice_points(&spec);
    let phi = divided_difference(f, &pts, &pts)?.matrix;
    let lower = multiplier_lower(&phi, budget, seed)?.lower;
    let mut upper = separated_set_bound(f, &pts, delta)?;
    if pts.len() <= DENSE_UPPER_CAP {
        upper = upper.min(multiplier_upper(&phi, 300, seed)?.upper);
    }
    Ok((lower, upper))
}

fn lattice_bound(p: &LatticeBoundParams) -> CliResult<Artifacts> {
    let f = parse_f(&p.f)?;
    positive(p.delta, "delta")?;
    nonzero(p.budget, "budget")?;
    if p.r.is_empty() {
        return Err(CliError::config("no radii given"));
    }
    for &r in &p.r {
        positive(r, "r")?;
        let spec = LatticeSpec::closed(p.delta, r).map_err(|e| CliError::config(e.to_string()))?;
        if is_conj(&f) {
            if r / p.delta < 3.0 {
                return Err(CliError::config(format!("the z-bar lower bound needs r/delta >= 3, got {}", r / p.delta)));
            }
        } else if lattice_points(&spec).len() > DENSE_LATTICE_CAP {
            return Err(CliError::config(format!(
                "lattice at r = {r} has more than {DENSE_LATTICE_CAP} points; only conj has a structured bound"
            )));
        }
    }
    let vals = p.r.par_iter().map(|&r| lattice_row(&f, p.delta, r, p.budget, p.seed)).collect::<CliResult<Vec<_>>>()?;
    let mut a = Artifacts::default();
    let mut rows = Vec::new();
    for (&r, &(lo, up)) in p.r.iter().zip(&vals) {
        a.check(lo <= up, || format!("r = {r}: lower {lo} exceeds upper {up}"));
        rows.push(vec![num(r), num(p.delta), num(lo), num(up), num(up / lo)]);
        a.summary.push(format!("r={r}: {} <= {}", num(lo), num(up)));
    }
    a.file("lattice_bound.csv", csv_bytes(&["r", "delta", "lower", "upper", "ratio"], &rows)?);
    Ok(a)
}

fn omega(p: &OmegaParams) -> CliResult<Artifacts> {
    let spec = parse_modulus(&p.modulus)?;
    increasing(&p.delta_grid, "delta grid")?;
    let mut rows = Vec::new();
    let mut a = Artifacts::default();
    for &d in &p.delta_grid {
        let w = spec.eval(d);
        let w1 = omega_transform(&spec, d, 1)?;
        let w2 = omega_transform(&spec, d, 2)?;
        a.check(w <= w1 * (1.0 + 1e-12) && w1 <= w2 * (1.0 + 1e-12), || {
            format!("delta = {d}: omega {w}, omega* {w1}, omega** {w2} out of order")
        });
        rows.push(vec![num(d), num(w), num(w1), num(w2)]);
    }
    a.summary.push(format!("{} grid points for {}", rows.len(), p.modulus));
    a.file("omega.csv", csv_bytes(&["delta", "omega", "omega_star", "omega_star_star"], &rows)?);
    Ok(a)
}

fn random_normal(d: usize, rng: &mut impl Rng) -> NormalOperator {
    NormalOperator::new((0..d).map(|_| uniform_disc(rng, 2.0)).collect(), haar_unitary(d, rng)).expect("Haar conjugator")
}

fn doi_instance(fs: &[FunctionSpec], dim: usize, seed: u64, i: usize) -> CliResult<Vec<String>> {
    let mut rng = substream(seed, i as u64);
    let (d1, d2) = (rng.random_range(1..=dim), rng.random_range(1..=dim));
    let n1 = random_normal(d1, &mut rng);
    let n2 = random_normal(d2, &mut rng);
    let r = ComplexMatrix::from_fn(d1, d2, |_, _| complex_normal(&mut rng));
    let f = &fs[i % fs.len()];
    let direct = ComplexMatrix::quasi_commutator(&apply_function(f, &n1)?, &r, &apply_function(f, &n2)?);
    let doi = doi_quasicommutator(f, &n1, &n2, &r)?;
    let res = norm(&doi.sub(&direct))? / (1.0 + norm(&direct)?);
    Ok(vec![i.to_string(), f.to_string(), d1.to_string(), d2.to_string(), num(res)])
}

fn doi_check(p: &DoiCheckParams) -> CliResult<Artifacts> {
    nonzero(p.dim, "dim")?;
    nonzero(p.instances, "instances")?;
    let fs = p.f.iter().map(|s| parse_f(s)).collect::<CliResult<Vec<_>>>()?;
    if fs.is_empty() {
        return Err(CliError::config("no functions given"));
    }
    let rows = (0..p.instances).into_par_iter().map(|i| doi_instance(&fs, p.dim, p.seed, i)).collect::<CliResult<Vec<_>>>()?;
    let worst = rows.iter().map(|r| r[4].parse::<f64>().unwrap_or(f64::NAN)).fold(0.0, f64::max);
    let mut a = Artifacts::default();
    a.check(worst <= p.tolerance, || format!("max relative residual {worst} above {}", p.tolerance));
    a.summary.push(format!("max relative residual {}", num(worst)));
    a.file("doi_check.csv", csv_bytes(&["instance", "f", "rows", "cols", "residual"], &rows)?);
    Ok(a)
}

fn witness_row(w: &ModulusWitness, envelope: f64) -> CliResult<Vec<String>> {
    let (c, _) = measure(w.kind, &w.f, &w.n1, w.n2.as_ref(), w.partner.as_ref())?;
    Ok(vec![
        w.kind.to_string(),
        w.f.to_string(),
        num(w.delta),
        num(w.value),
        num(c),
        w.n1.dim().to_string(),
        w.seed.to_string(),
        num(envelope),
    ])
}

const WITNESS_HEADER: [&str; 8] = ["kind", "f", "delta", "value", "constraint", "dim", "seed", "envelope"];

fn search_extremal(p: &SearchExtremalParams) -> CliResult<Artifacts> {
    let mut a = Artifacts::default();
    if !p.input.is_empty() {
        let mut rows = Vec::new();
        for path in &p.input {
            match witness_from_json(&read(path)?) {
                Ok(w) => rows.push(witness_row(&w, f64::NAN)?),
                Err(CliError::Assertion(m)) => a.failures.push(format!("{}: {m}", path.display())),
                Err(e) => return Err(e),
            }
        }
        a.summary.push(format!("{} of {} witnesses revalidated", rows.len(), p.input.len()));
        a.file("search_extremal.csv", csv_bytes(&WITNESS_HEADER, &rows)?);
        return Ok(a);
    }
    let kind = parse_kind(&p.kind)?;
    let f = parse_f(&p.f)?;
    let set = parse_set(&p.set)?;
    nonzero(p.dim, "dim")?;
    increasing(&p.delta_grid, "delta grid")?;
    let ws = p
        .delta_grid
        .par_iter()
        .enumerate()
        .map(|(k, &d)| {
            let opts = SearchOptions { dim: p.dim, budget: p.budget, seed: p.seed.wrapping_add(k as u64), set };
            modulus_search(kind, &f, d, &opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let env = ModulusEnvelope::from_witnesses(kind, &p.delta_grid, &ws)?;
    let mut rows = Vec::new();
    for (k, w) in ws.iter().enumerate() {
        let bytes = witness_to_json(w)?;
        match witness_from_json(&bytes) {
            Ok(back) => a.check(&back == w, || format!("witness {k} changed in a JSON roundtrip")),
            Err(e) => a.failures.push(format!("witness {k}: {e}")),
        }
        a.file(format!("search_extremal_witness_{k}.json"), bytes);
        rows.push(witness_row(w, env.lower_values[k])?);
    }
    if let Err(e) = env.verify() {
        a.failures.push(format!("envelope: {e}"));
    }
    a.summary.push(format!("{kind} envelope for {f}: {:?}", env.lower_values.iter().map(|v| num(*v)).collect::<Vec<_>>()));
    a.file("search_extremal.csv", csv_bytes(&WITNESS_HEADER, &rows)?);
    Ok(a)
}

fn holder(p: &HolderParams) -> CliResult<Artifacts> {
    let f = parse_f(&p.f)?;
    if f.is_constant() {
        return Err(CliError::config(format!("{f} is constant, so its Hölder seminorm vanishes")));
    }
    if p.alpha_grid.is_empty() || p.alpha_grid.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
        return Err(CliError::config("alpha grid values must lie in (0, 1)"));
    }
    nonzero(p.dim, "dim")?;
    nonzero(p.budget, "budget")?;
    positive(p.r_cap, "r_cap")?;
    let mut a = Artifacts::default();
    let header = ["alpha", "max_ratio", "instances", "r_cap", "seed"];
    let mut rows = Vec::new();
    if p.quasi {
        nonzero(p.instances, "instances")?;
        let reps = p
            .alpha_grid
            .par_iter()
            .map(|&al| quasicommutator_experiment(&f, al, p.instances, p.dim, p.seed))
            .collect::<Result<Vec<_>, _>>()?;
        for r in &reps {
            a.check(r.is_finite(), || format!("alpha = {}: ratios not finite", r.alpha));
            rows.push(vec![num(r.alpha), num(r.max_ratio), r.instances.to_string(), num(1.0), p.seed.to_string()]);
            a.summary.push(format!(
                "alpha {}: max {} median {} reference {}",
                r.alpha,
                num(r.max_ratio),
                num(r.quantile(0.5)),
                num(r.reference)
            ));
        }
    } else {
        let set = if p.real { SpectralSet::Interval(p.r_cap) } else { SpectralSet::Disc(p.r_cap) };
        let opts = SearchOptions { dim: p.dim, budget: p.budget, seed: p.seed, set };
        let ests =
            p.alpha_grid.par_iter().map(|&al| holder_ratio_search(&f, al, &opts)).collect::<Result<Vec<_>, _>>()?;
        for (k, e) in ests.iter().enumerate() {
            let again = e.recompute()?;
            a.check((again - e.lower).abs() <= 1e-9 * e.lower.max(1.0), || {
                format!("alpha = {}: ratio {} does not recompute ({again})", e.alpha, e.lower)
            });
            rows.push(vec![num(e.alpha), num(e.lower), p.budget.to_string(), num(p.r_cap), p.seed.to_string()]);
            a.file(format!("holder_witness_{k}.json"), witness_to_json(&e.witness)?);
            a.summary.push(format!("alpha {}: {} (raw {})", e.alpha, num(e.lower), num(e.formula_trace.raw_ratio)));
        }
    }
    a.file("holder.csv", csv_bytes(&header, &rows)?);
    Ok(a)
}

fn mcc_check(p: &MccCheckParams) -> CliResult<Artifacts> {
    let fs = p.f.iter().map(|s| parse_f(s)).collect::<CliResult<Vec<_>>>()?;
    if fs.is_empty() {
        return Err(CliError::config("no functions given"));
    }
    nonzero(p.instances, "instances")?;
    let reps = fs.par_iter().map(|f| mcc_sandwich_check(f, p.instances, p.seed)).collect::<Result<Vec<_>, _>>()?;
    let mut a = Artifacts::default();
    let mut rows = Vec::new();
    for (f, r) in fs.iter().zip(&reps) {
        a.check(r.passed(), || format!("{f}: {r:?}"));
        rows.push(vec![
            f.to_string(),
            r.instances.to_string(),
            r.vl_violations.to_string(),
            r.constraint_violations.to_string(),
            r.value_violations.to_string(),
            r.swap_violations.to_string(),
            num(r.max_vl_excess),
            num(r.max_constraint_excess),
            num(r.max_value_deficit),
        ]);
        a.summary.push(format!("{f}: {} violations", r.vl_violations + r.constraint_violations + r.value_violations + r.swap_violations));
    }
    a.file(
        "mcc_check.csv",
        csv_bytes(
            &[
                "f",
                "instances",
                "vl_violations",
                "constraint_violations",
                "value_violations",
                "swap_violations",
                "max_vl_excess",
                "max_constraint_excess",
                "max_value_deficit",
            ],
            &rows,
        )?,
    );
    Ok(a)
}
