//! Registry of planar functions with the analytic seminorm data that the
//! bounds need: Lipschitz constants, Hölder seminorms, scalar moduli of
//! continuity and commutator Lipschitz norms where those are known exactly.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::C64;

/// Values of a function on a uniform rectangular grid, bilinearly interpolated.
/// Evaluation outside the grid box is a domain error.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarTable {
    pub x0: f64,
    pub y0: f64,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major in y: `values[iy * nx + ix]` sits at `(x0 + ix h) + i (y0 + iy h)`.
    pub values: Vec<C64>,
}

impl PlanarTable {
    pub fn new(x0: f64, y0: f64, spacing: f64, nx: usize, ny: usize, values: Vec<C64>) -> Result<Self> {
        if nx < 2 || ny < 2 || values.len() != nx * ny || !(spacing > 0.0) {
            return Err(Error::arg("table needs at least 2x2 samples and positive spacing"));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::arg("table values must be finite"));
        }
        Ok(PlanarTable { x0, y0, spacing, nx, ny, values })
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let fx = (z.re - self.x0) / self.spacing;
        let fy = (z.im - self.y0) / self.spacing;
        let eps = 1e-9;
        if !(fx >= -eps && fy >= -eps && fx <= (self.nx - 1) as f64 + eps && fy <= (self.ny - 1) as f64 + eps) {
            return Err(Error::Domain(z));
        }
        let ix = (fx.floor().max(0.0) as usize).min(self.nx - 2);
        let iy = (fy.floor().max(0.0) as usize).min(self.ny - 2);
        let tx = (fx - ix as f64).clamp(0.0, 1.0);
        let ty = (fy - iy as f64).clamp(0.0, 1.0);
        let v = |i: usize, j: usize| self.values[j * self.nx + i];
        Ok(v(ix, iy) * ((1.0 - tx) * (1.0 - ty))
            + v(ix + 1, iy) * (tx * (1.0 - ty))
            + v(ix, iy + 1) * ((1.0 - tx) * ty)
            + v(ix + 1, iy + 1) * (tx * ty))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Identity,
    Conjugate,
    /// `z^k`; negative powers are undefined at 0.
    Power(i32),
    /// `h_n(z) = z^{n+1} / conj(z)^n`, with `h_n(0) = 0`.
    Hn(i32),
    /// `sgn(z)^k` with `sgn z = z/|z|`, `sgn 0 = 0` and `sgn^0 = 1`.
    Sgn(i32),
    /// `|z|^beta`.
    AbsPower(f64),
    RealPart,
    /// Fourier atom `exp(-i Re(z conj(zeta)))`.
    ExpAtom(C64),
    Constant(C64),
    /// `conj(z)` inside the unit disc, `1/z` outside.
    Psi,
    /// `a f + b`.
    Affine { a: C64, b: C64, inner: Box<FunctionSpec> },
    Product(Box<FunctionSpec>, Box<FunctionSpec>),
    Conj(Box<FunctionSpec>),
    /// `outer(inner(z))`.
    Compose(Box<FunctionSpec>, Box<FunctionSpec>),
    Table(Arc<PlanarTable>),
}

pub fn sgn(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::zero()
    } else {
        z / r
    }
}

pub fn psi(z: C64) -> C64 {
    if z.norm_sqr() < 1.0 {
        z.conj()
    } else {
        z.inv()
    }
}

/// `h_n(z) = z^{n+1}/conj(z)^n = |z| sgn(z)^{2n+1}`.
pub fn hn(n: i32, z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        return C64::zero();
    }
    let s = z / r;
    powi_c(s, 2 * n + 1) * r
}

fn powi_c(z: C64, k: i32) -> C64 {
    if k >= 0 {
        z.powu(k as u32)
    } else {
        z.inv().powu(k.unsigned_abs())
    }
}

impl FunctionSpec {
    pub fn power(k: i32) -> Self {
        FunctionSpec::Power(k)
    }

    pub fn affine(a: C64, b: C64, inner: FunctionSpec) -> Self {
        FunctionSpec::Affine { a, b, inner: Box::new(inner) }
    }

    pub fn product(f: FunctionSpec, g: FunctionSpec) -> Self {
        FunctionSpec::Product(Box::new(f), Box::new(g))
    }

    pub fn conj_of(f: FunctionSpec) -> Self {
        FunctionSpec::Conj(Box::new(f))
    }

    pub fn compose(outer: FunctionSpec, inner: FunctionSpec) -> Self {
        FunctionSpec::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        use FunctionSpec::*;
        Ok(match self {
            Identity => z,
            Conjugate => z.conj(),
            Power(k) => {
                if *k < 0 && z.is_zero() {
                    return Err(Error::Domain(z));
                }
                powi_c(z, *k)
            }
            Hn(n) => hn(*n, z),
            Sgn(k) => {
                if *k == 0 {
                    C64::new(1.0, 0.0)
                } else if z.is_zero() {
                    C64::zero()
                } else {
                    powi_c(sgn(z), *k)
                }
            }
            AbsPower(b) => {
                let r = z.norm();
                if r == 0.0 {
                    if *b > 0.0 {
                        C64::zero()
                    } else if *b == 0.0 {
                        C64::new(1.0, 0.0)
                    } else {
                        return Err(Error::Domain(z));
                    }
                } else {
                    C64::new(r.powf(*b), 0.0)
                }
            }
            RealPart => C64::new(z.re, 0.0),
            ExpAtom(zeta) => {
                let t = z.re * zeta.re + z.im * zeta.im;
                C64::new(t.cos(), -t.sin())
            }
            Constant(c) => *c,
            Psi => psi(z),
            Affine { a, b, inner } => *a * inner.eval(z)? + *b,
            Product(f, g) => f.eval(z)? * g.eval(z)?,
            Conj(f) => f.eval(z)?.conj(),
            Compose(outer, inner) => outer.eval(inner.eval(z)?)?,
            Table(t) => t.eval(z)?,
        })
    }

    /// Evaluation that maps domain errors to NaN, for sampling loops.
    pub fn eval_or_nan(&self, z: C64) -> C64 {
        self.eval(z).unwrap_or(C64::new(f64::NAN, f64::NAN))
    }

    pub fn is_constant(&self) -> bool {
        use FunctionSpec::*;
        match self {
            Constant(_) | Power(0) | Sgn(0) | AbsPower(0.0) => true,
            ExpAtom(z) => z.is_zero(),
            Affine { a, inner, .. } => a.is_zero() || inner.is_constant(),
            Product(f, g) => f.is_constant() && g.is_constant(),
            Conj(f) => f.is_constant(),
            Compose(o, i) => o.is_constant() || i.is_constant(),
            _ => false,
        }
    }

    /// Upper bound for `sup |f|` on the closed disc of radius `r`.
    pub fn sup_on_disc(&self, r: f64) -> Option<f64> {
        use FunctionSpec::*;
        match self {
            Identity | Conjugate | RealPart => Some(r),
            Power(k) if *k >= 0 => Some(r.powi(*k)),
            Power(_) => None,
            Hn(_) => Some(r),
            Sgn(_) | ExpAtom(_) | Psi => Some(1.0),
            AbsPower(b) if *b >= 0.0 => Some(r.powf(*b)),
            AbsPower(_) => None,
            Constant(c) => Some(c.norm()),
            Affine { a, b, inner } => inner.sup_on_disc(r).map(|s| a.norm() * s + b.norm()),
            Product(f, g) => Some(f.sup_on_disc(r)? * g.sup_on_disc(r)?),
            Conj(f) => f.sup_on_disc(r),
            Compose(o, i) => o.sup_on_disc(i.sup_on_disc(r)?),
            Table(t) => Some(t.max_abs()),
        }
    }

    /// Lipschitz constant on the closed disc of radius `r`, or on the whole
    /// plane when `r` is `None`. `None` means not Lipschitz or unknown.
    pub fn lipschitz(&self, r: Option<f64>) -> Option<f64> {
        use FunctionSpec::*;
        match self {
            Identity | Conjugate | RealPart | Psi => Some(1.0),
            Power(0) => Some(0.0),
            Power(1) => Some(1.0),
            Power(k) if *k > 1 => r.map(|r| *k as f64 * r.powi(*k - 1)),
            Power(_) => None,
            Hn(n) => Some((2 * n + 1).unsigned_abs() as f64),
            Sgn(0) => Some(0.0),
            Sgn(_) => None,
            AbsPower(b) if *b == 1.0 => Some(1.0),
            AbsPower(b) if *b == 0.0 => Some(0.0),
            AbsPower(_) => None,
            ExpAtom(z) => Some(z.norm()),
            Constant(_) => Some(0.0),
            Affine { a, inner, .. } => inner.lipschitz(r).map(|l| a.norm() * l),
            Product(f, g) => {
                let r = r?;
                Some(f.lipschitz(Some(r))? * g.sup_on_disc(r)? + g.lipschitz(Some(r))? * f.sup_on_disc(r)?)
            }
            Conj(f) => f.lipschitz(r),
            Compose(o, i) => {
                let li = i.lipschitz(r)?;
                let ro = match r {
                    Some(r) => Some(i.sup_on_disc(r)?),
                    None => None,
                };
                Some(o.lipschitz(ro)? * li)
            }
            Table(_) => None,
        }
    }

    /// Analytic upper bound for the Hölder seminorm `sup |f(z)-f(w)|/|z-w|^alpha`
    /// on the disc of radius `r` (whole plane when `None`).
    pub fn holder_seminorm(&self, alpha: f64, r: Option<f64>) -> Option<f64> {
        use FunctionSpec::*;
        if self.is_constant() {
            return Some(0.0);
        }
        let exact = match self {
            AbsPower(b) if *b == alpha => Some(1.0),
            Affine { a, inner, .. } => inner.holder_seminorm(alpha, r).map(|s| a.norm() * s),
            Conj(f) => f.holder_seminorm(alpha, r),
            _ => None,
        };
        let mut best = exact;
        let mut offer = |v: f64| {
            best = Some(match best {
                Some(b) => b.min(v),
                None => v,
            })
        };
        if let Some(r) = r {
            if let Some(l) = self.lipschitz(Some(r)) {
                offer(l * (2.0 * r).powf(1.0 - alpha));
                if let Some(m) = self.sup_on_disc(r) {
                    offer(l.powf(alpha) * (2.0 * m).powf(1.0 - alpha));
                }
            }
        } else if let (Some(l), Some(m)) = (self.lipschitz(None), self.sup_on_disc(f64::INFINITY)) {
            if m.is_finite() {
                offer(l.powf(alpha) * (2.0 * m).powf(1.0 - alpha));
            }
        }
        if let (Sgn(_) | ExpAtom(_) | Psi, Some(l)) = (self, self.lipschitz(r)) {
            offer(l.powf(alpha) * 2.0.powf(1.0 - alpha));
        }
        best
    }

    /// Upper bound for the scalar modulus of continuity `omega_f(t)` on the disc of radius `r`.
    pub fn modulus_upper(&self, t: f64, r: f64) -> Option<f64> {
        use FunctionSpec::*;
        if self.is_constant() {
            return Some(0.0);
        }
        let cap = self.sup_on_disc(r).map(|m| 2.0 * m);
        let base = match self {
            AbsPower(b) if *b > 0.0 && *b <= 1.0 => Some(t.powf(*b)),
            Affine { a, inner, .. } => inner.modulus_upper(t, r).map(|w| a.norm() * w),
            Conj(f) => f.modulus_upper(t, r),
            _ => self.lipschitz(Some(r)).map(|l| l * t),
        }?;
        Some(match cap {
            Some(c) => base.min(c),
            None => base,
        })
    }

    /// Known commutator Lipschitz norm on the whole plane (affine functions only).
    pub fn commutator_lipschitz(&self) -> Option<f64> {
        use FunctionSpec::*;
        match self {
            Identity | Power(1) => Some(1.0),
            Hn(0) => Some(1.0),
            _ if self.is_constant() => Some(0.0),
            Affine { a, inner, .. } => inner.commutator_lipschitz().map(|c| a.norm() * c),
            _ => None,
        }
    }

    /// Derivative for the registry members that are complex-analytic.
    pub fn derivative(&self, z: C64) -> Option<C64> {
        use FunctionSpec::*;
        match self {
            Identity | Hn(0) => Some(C64::new(1.0, 0.0)),
            Power(0) | Constant(_) => Some(C64::zero()),
            Power(k) => {
                if *k < 0 && z.is_zero() {
                    None
                } else {
                    Some(powi_c(z, *k - 1) * (*k as f64))
                }
            }
            Affine { a, inner, .. } => inner.derivative(z).map(|d| *a * d),
            _ => None,
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FunctionSpec::*;
        match self {
            Identity => write!(f, "z"),
            Conjugate => write!(f, "conj"),
            Power(k) => write!(f, "pow:{k}"),
            Hn(n) => write!(f, "hn:{n}"),
            Sgn(k) => write!(f, "sgn:{k}"),
            AbsPower(b) => write!(f, "abs:{b}"),
            RealPart => write!(f, "re"),
            ExpAtom(z) => write!(f, "exp:{},{}", z.re, z.im),
            Constant(c) => write!(f, "const:{},{}", c.re, c.im),
            Psi => write!(f, "psi"),
            Affine { a, b, inner } => write!(f, "affine({},{},{},{};{})", a.re, a.im, b.re, b.im, inner),
            Product(p, q) => write!(f, "prod({p};{q})"),
            Conj(p) => write!(f, "conjof({p})"),
            Compose(o, i) => write!(f, "comp({o};{i})"),
            Table(t) => write!(f, "table[{}x{}]", t.nx, t.ny),
        }
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Parse(format!("bad number '{s}'")))
}

fn parse_complex(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(C64::new(parse_f64(re)?, 0.0)),
        [re, im] => Ok(C64::new(parse_f64(re)?, parse_f64(im)?)),
        _ => Err(Error::Parse(format!("bad complex number '{s}'"))),
    }
}

/// Splits `a;b` at the top-level semicolon.
fn split_top(s: &str) -> Result<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth == 0 => return Ok((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    Err(Error::Parse(format!("expected two arguments in '{s}'")))
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(open) = s.find('(') {
            if !s.ends_with(')') {
                return Err(Error::Parse(format!("unbalanced parentheses in '{s}'")));
            }
            let head = &s[..open];
            let body = &s[open + 1..s.len() - 1];
            return match head {
                "prod" => {
                    let (a, b) = split_top(body)?;
                    Ok(FunctionSpec::product(a.parse()?, b.parse()?))
                }
                "comp" => {
                    let (a, b) = split_top(body)?;
                    Ok(FunctionSpec::compose(a.parse()?, b.parse()?))
                }
                "conjof" => Ok(FunctionSpec::conj_of(body.parse()?)),
                "affine" => {
                    let (coeffs, inner) = split_top(body)?;
                    let c: Vec<f64> = coeffs.split(',').map(parse_f64).collect::<Result<_>>()?;
                    if c.len() != 4 {
                        return Err(Error::Parse("affine needs a_re,a_im,b_re,b_im".to_string()));
                    }
                    Ok(FunctionSpec::affine(C64::new(c[0], c[1]), C64::new(c[2], c[3]), inner.parse()?))
                }
                _ => Err(Error::Parse(format!("unknown function combinator '{head}'"))),
            };
        }
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let int_arg = |a: Option<&str>| -> Result<i32> {
            a.ok_or_else(|| Error::Parse(format!("'{name}' needs an integer argument")))?
                .trim()
                .parse::<i32>()
                .map_err(|_| Error::Parse(format!("bad integer in '{s}'")))
        };
        fn need<'a>(name: &str, a: Option<&'a str>) -> Result<&'a str> {
            a.ok_or_else(|| Error::Parse(format!("'{name}' needs an argument")))
        }
        Ok(match (name, arg) {
            ("z" | "id" | "identity", None) => FunctionSpec::Identity,
            ("conj" | "zbar", None) => FunctionSpec::Conjugate,
            ("re", None) => FunctionSpec::RealPart,
            ("psi", None) => FunctionSpec::Psi,
            ("pow", a) => FunctionSpec::Power(int_arg(a)?),
            ("hn", a) => FunctionSpec::Hn(int_arg(a)?),
            ("sgn", a) => FunctionSpec::Sgn(int_arg(a)?),
            ("abs", a) => FunctionSpec::AbsPower(parse_f64(need(name, a)?)?),
            ("exp", a) => FunctionSpec::ExpAtom(parse_complex(need(name, a)?)?),
            ("const", a) => FunctionSpec::Constant(parse_complex(need(name, a)?)?),
            _ => return Err(Error::Parse(format!("unknown function id '{s}'"))),
        })
    }
}
