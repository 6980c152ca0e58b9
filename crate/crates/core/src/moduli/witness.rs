//! Witnesses for the operator and commutator moduli, and the exact
//! transformations between them.

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::linalg::norm::opnorm;
use crate::linalg::{apply_function, corner, diag2, swap, ComplexMatrix, NormalOperator, OperatorClass};
use crate::CLASS_TOL;

/// Slack on the constraint `‖…‖ ≤ δ`.
pub const CONSTRAINT_TOL: f64 = 1e-10;
/// Relative tolerance when a stored value is recomputed.
pub const VALUE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModulusKind {
    /// `‖f(N₁) − f(N₂)‖` under `‖N₁ − N₂‖ ≤ δ`.
    Plain,
    /// Self-adjoint contraction partner.
    SelfAdjoint,
    /// Arbitrary contraction partner, quasicommutator form.
    Commutator,
    Unitary,
    UnitarySelfAdjoint,
    Projection,
}

impl ModulusKind {
    pub const ALL: [ModulusKind; 6] = [
        ModulusKind::Plain,
        ModulusKind::SelfAdjoint,
        ModulusKind::Commutator,
        ModulusKind::Unitary,
        ModulusKind::UnitarySelfAdjoint,
        ModulusKind::Projection,
    ];

    pub fn partner_class(self) -> Option<OperatorClass> {
        match self {
            ModulusKind::Plain => None,
            ModulusKind::SelfAdjoint => Some(OperatorClass::SelfAdjoint),
            ModulusKind::Commutator => Some(OperatorClass::Contraction),
            ModulusKind::Unitary => Some(OperatorClass::Unitary),
            ModulusKind::UnitarySelfAdjoint => Some(OperatorClass::UnitarySelfAdjoint),
            ModulusKind::Projection => Some(OperatorClass::Projection),
        }
    }

    /// Kinds whose modulus obeys the scaling law `τΩ(δ/τ) ≤ Ω(δ)`.
    pub fn scales(self) -> bool {
        matches!(self, ModulusKind::SelfAdjoint | ModulusKind::Commutator)
    }

    /// Kinds that may use two different normal operators.
    fn two_sided(self) -> bool {
        matches!(self, ModulusKind::Plain | ModulusKind::SelfAdjoint | ModulusKind::Commutator)
    }
}

impl fmt::Display for ModulusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModulusKind::Plain => "PLAIN",
            ModulusKind::SelfAdjoint => "SA",
            ModulusKind::Commutator => "C",
            ModulusKind::Unitary => "U",
            ModulusKind::UnitarySelfAdjoint => "USA",
            ModulusKind::Projection => "P",
        })
    }
}

impl FromStr for ModulusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "PLAIN" => ModulusKind::Plain,
            "SA" => ModulusKind::SelfAdjoint,
            "C" => ModulusKind::Commutator,
            "U" => ModulusKind::Unitary,
            "USA" => ModulusKind::UnitarySelfAdjoint,
            "P" => ModulusKind::Projection,
            _ => return Err(Error::Parse(format!("unknown modulus kind '{s}'"))),
        })
    }
}

/// One feasible configuration, a lower bound for the modulus of its kind at `delta`.
///
/// `n2` is the second operator (required for `Plain`, optional for `SelfAdjoint`
/// and `Commutator`, absent otherwise); `partner` is absent only for `Plain`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulusWitness {
    pub kind: ModulusKind,
    pub f: FunctionSpec,
    pub delta: f64,
    pub value: f64,
    pub n1: NormalOperator,
    pub n2: Option<NormalOperator>,
    pub partner: Option<ComplexMatrix>,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessCheck {
    pub class_defect: f64,
    pub constraint: f64,
    pub value: f64,
}

fn invalid(what: impl Into<String>, defect: f64) -> Error {
    Error::Validation { what: what.into(), defect }
}

/// Constraint norm and achieved value for raw data, without any checks on the stored fields.
pub fn measure(
    kind: ModulusKind,
    f: &FunctionSpec,
    n1: &NormalOperator,
    n2: Option<&NormalOperator>,
    partner: Option<&ComplexMatrix>,
) -> Result<(f64, f64)> {
    let m = n2.unwrap_or(n1);
    let f1 = apply_function(f, n1)?;
    let f2 = if n2.is_some() { apply_function(f, m)? } else { f1.clone() };
    match (kind, partner) {
        (ModulusKind::Plain, None) => {
            if n1.dim() != m.dim() {
                return Err(Error::arg("plain witness needs operators of equal size"));
            }
            Ok((opnorm(&n1.matrix().sub(m.matrix())), opnorm(&f1.sub(&f2))))
        }
        (ModulusKind::Plain, Some(_)) => Err(Error::arg("plain witness takes no partner")),
        (_, None) => Err(Error::arg(format!("{kind} witness needs a partner"))),
        (_, Some(x)) => {
            if x.shape() != (n1.dim(), m.dim()) {
                return Err(Error::Shape { left_rows: n1.dim(), left_cols: m.dim(), right_rows: x.rows(), right_cols: x.cols() });
            }
            let mut c = opnorm(&ComplexMatrix::quasi_commutator(n1.matrix(), x, m.matrix()));
            if kind == ModulusKind::SelfAdjoint && n2.is_some() {
                let adj = ComplexMatrix::quasi_commutator(&n1.matrix().adjoint(), x, &m.matrix().adjoint());
                c = c.max(opnorm(&adj));
            }
            Ok((c, opnorm(&ComplexMatrix::quasi_commutator(&f1, x, &f2))))
        }
    }
}

impl ModulusWitness {
    /// Builds a witness whose `value` is the achieved norm; `delta` is left to the caller.
    pub fn from_parts(
        kind: ModulusKind,
        f: FunctionSpec,
        delta: f64,
        n1: NormalOperator,
        n2: Option<NormalOperator>,
        partner: Option<ComplexMatrix>,
        seed: u64,
    ) -> Result<ModulusWitness> {
        let (_, value) = measure(kind, &f, &n1, n2.as_ref(), partner.as_ref())?;
        let w = ModulusWitness { kind, f, delta, value, n1, n2, partner, seed };
        w.validate()?;
        Ok(w)
    }

    /// Partner class, constraint and value checks.
    pub fn validate(&self) -> Result<WitnessCheck> {
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::arg("witness delta must be finite and nonnegative"));
        }
        if self.n2.is_some() && !self.kind.two_sided() {
            return Err(Error::arg(format!("{} witness takes a single normal operator", self.kind)));
        }
        if self.kind == ModulusKind::Plain && self.n2.is_none() {
            return Err(Error::arg("plain witness needs two normal operators"));
        }
        let class_defect = match (self.kind, &self.partner) {
            (ModulusKind::Plain, _) | (_, None) => 0.0,
            (ModulusKind::SelfAdjoint, Some(a)) => {
                OperatorClass::SelfAdjoint.defect(a).max(OperatorClass::Contraction.defect(a))
            }
            (k, Some(x)) => k.partner_class().map_or(0.0, |c| c.defect(x)),
        };
        if class_defect > CLASS_TOL {
            return Err(invalid(format!("partner is not in the {} class", self.kind), class_defect));
        }
        let (constraint, value) = measure(self.kind, &self.f, &self.n1, self.n2.as_ref(), self.partner.as_ref())?;
        if constraint > self.delta + CONSTRAINT_TOL {
            return Err(invalid("constraint norm exceeds delta", constraint - self.delta));
        }
        let gap = (value - self.value).abs();
        if !(gap <= VALUE_TOL * value.abs().max(1.0)) {
            return Err(invalid("stored value differs from the recomputed one", gap));
        }
        Ok(WitnessCheck { class_defect, constraint, value })
    }

    fn revalidated(self) -> Result<ModulusWitness> {
        match self.validate() {
            Ok(_) => Ok(self),
            Err(e) => Err(Error::Consistency(format!("transformed {} witness: {e}", self.kind))),
        }
    }

    fn partner(&self) -> &ComplexMatrix {
        self.partner.as_ref().expect("validated commutator witness has a partner")
    }
}

/// Partner `τX`, constraint `τδ`, value `τ·value`.
pub fn witness_scale(w: &ModulusWitness, tau: f64) -> Result<ModulusWitness> {
    if !w.kind.scales() {
        return Err(Error::arg(format!("scaling applies to SA and C witnesses, not {}", w.kind)));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::arg("scale factor must lie in (0, 1]"));
    }
    if tau == 1.0 {
        return Ok(w.clone());
    }
    ModulusWitness {
        delta: w.delta * tau,
        value: w.value * tau,
        partner: Some(w.partner().scale_real(tau)),
        ..w.clone()
    }
    .revalidated()
}

/// `P` at `δ` to `Q = 2P − I` at `2δ`, value doubled.
pub fn projection_to_symmetry(w: &ModulusWitness) -> Result<ModulusWitness> {
    if w.kind != ModulusKind::Projection {
        return Err(Error::arg("expected a P witness"));
    }
    let p = w.partner();
    let q = p.scale_real(2.0).sub(&ComplexMatrix::identity(p.rows()));
    ModulusWitness {
        kind: ModulusKind::UnitarySelfAdjoint,
        delta: 2.0 * w.delta,
        value: 2.0 * w.value,
        partner: Some(q),
        ..w.clone()
    }
    .revalidated()
}

/// `Q` at `δ` to `P = (Q + I)/2` at `δ/2`, value halved.
pub fn symmetry_to_projection(w: &ModulusWitness) -> Result<ModulusWitness> {
    if w.kind != ModulusKind::UnitarySelfAdjoint {
        return Err(Error::arg("expected a USA witness"));
    }
    let q = w.partner();
    let p = q.add(&ComplexMatrix::identity(q.rows())).scale_real(0.5);
    ModulusWitness {
        kind: ModulusKind::Projection,
        delta: 0.5 * w.delta,
        value: 0.5 * w.value,
        partner: Some(p),
        ..w.clone()
    }
    .revalidated()
}

/// `(N₁, N₂)` to `N = diag(N₁, N₂)` with the swap symmetry `Q`; the value is unchanged.
pub fn swap_lift(w: &ModulusWitness) -> Result<ModulusWitness> {
    if w.kind != ModulusKind::Plain {
        return Err(Error::arg("swap lift expects a PLAIN witness"));
    }
    let n2 = w.n2.as_ref().ok_or_else(|| Error::arg("plain witness needs two operators"))?;
    ModulusWitness {
        kind: ModulusKind::UnitarySelfAdjoint,
        n1: diag2(&w.n1, n2),
        n2: None,
        partner: Some(swap(w.n1.dim())),
        ..w.clone()
    }
    .revalidated()
}

/// `(N, Q)` to `(N, QNQ)`; the value is unchanged.
pub fn symmetry_to_plain(w: &ModulusWitness) -> Result<ModulusWitness> {
    if w.kind != ModulusKind::UnitarySelfAdjoint {
        return Err(Error::arg("expected a USA witness"));
    }
    let n2 = w.n1.conjugate_by(w.partner())?;
    ModulusWitness { kind: ModulusKind::Plain, n2: Some(n2), partner: None, ..w.clone() }.revalidated()
}

/// Quasicommutator `(N₁, N₂, R)` to the commutator `(diag(N₁, N₂), [[0, R], [0, 0]])`.
pub fn corner_lift(w: &ModulusWitness) -> Result<ModulusWitness> {
    if w.kind != ModulusKind::Commutator {
        return Err(Error::arg("corner lift expects a C witness"));
    }
    let m = w.n2.as_ref().unwrap_or(&w.n1);
    ModulusWitness { n1: diag2(&w.n1, m), n2: None, partner: Some(corner(w.partner())), ..w.clone() }.revalidated()
}

/// Inverse of [`corner_lift`]: the first `split` eigenvalues and basis vectors form `N₁`.
pub fn corner_restrict(w: &ModulusWitness, split: usize) -> Result<ModulusWitness> {
    if w.kind != ModulusKind::Commutator || w.n2.is_some() {
        return Err(Error::arg("corner restriction expects a single-operator C witness"));
    }
    let n = w.n1.dim();
    if split == 0 || split >= n {
        return Err(Error::arg("split must lie strictly inside the dimension"));
    }
    let u = w.n1.conjugator();
    let x = w.partner();
    let d2 = n - split;
    let off = u.block(0, split, split, d2).max_abs().max(u.block(split, 0, d2, split).max_abs());
    let outside = x
        .block(0, 0, split, split)
        .max_abs()
        .max(x.block(split, 0, d2, split).max_abs())
        .max(x.block(split, split, d2, d2).max_abs());
    if off > 1e-12 || outside > 1e-12 * x.max_abs().max(1.0) {
        return Err(Error::Precondition("witness is not in corner form for this split".into()));
    }
    let ev = w.n1.eigenvalues();
    let n1 = NormalOperator::new(ev[..split].to_vec(), u.block(0, 0, split, split))?;
    let n2 = NormalOperator::new(ev[split..].to_vec(), u.block(split, split, d2, d2))?;
    ModulusWitness { n1, n2: Some(n2), partner: Some(x.block(0, split, split, d2)), ..w.clone() }.revalidated()
}

/// Same data for `conj ∘ f`. PLAIN and SA values are unchanged; SA swaps `N₁` and `N₂`.
pub fn conjugate_witness(w: &ModulusWitness) -> Result<ModulusWitness> {
    let (n1, n2) = match (w.kind, &w.n2) {
        (ModulusKind::Plain, _) | (ModulusKind::SelfAdjoint, None) => (w.n1.clone(), w.n2.clone()),
        (ModulusKind::SelfAdjoint, Some(m)) => (m.clone(), Some(w.n1.clone())),
        _ => return Err(Error::arg("conjugation symmetry holds for PLAIN and SA witnesses")),
    };
    ModulusWitness { f: FunctionSpec::conj_of(w.f.clone()), n1, n2, ..w.clone() }.revalidated()
}

/// Deterministic merge: larger value wins, then smaller seed.
pub fn best_witness<I: IntoIterator<Item = ModulusWitness>>(witnesses: I) -> Option<ModulusWitness> {
    witnesses.into_iter().fold(None, |best: Option<ModulusWitness>, w| match best {
        None => Some(w),
        Some(b) => {
            if w.value > b.value || (w.value == b.value && w.seed < b.seed) {
                Some(w)
            } else {
                Some(b)
            }
        }
    })
}
