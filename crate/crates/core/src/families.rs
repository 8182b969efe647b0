//! Closed-form constructors for the named operad families.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functors::{functor_g_atr, functor_g_str, FunctorError};
use crate::graded_algebra::{build_bc, AlgebraError, BcType, CyclicAlgebra, DenseAlgebra, Parity};
use crate::operad::{mu_label, Action, Component, Operad, OperadError};
use crate::scalars::{prime_power_descriptor, Field};
use crate::series::HilbertSeries;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("Com^{{w}} needs w ≥ 1")]
    BadW,
    #[error("Ope^{{w}} needs an even parameter w ≥ 2, got {0}")]
    OddOpeParameter(usize),
    #[error("Lin_o needs characteristic ≠ 2")]
    LinOInCharacteristic2,
    #[error("families need horizon ≥ 1 (the identity lives in arity 1)")]
    ZeroHorizon,
    #[error("unknown family kind '{0}'")]
    UnknownKind(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Operad(#[from] OperadError),
}

/// The finite-dimensional Z/(b+1)-graded algebra B feeding the linear families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum BSource {
    /// B = k
    Trivial,
    /// k[x]/(x^{b+1})
    Truncated { b: usize },
    /// x_i x_j = 0 for i, j ≥ 1
    SquareZero { b: usize },
    /// b = 3, x1x2 = x2x1 = x3
    ExteriorType,
}

impl BSource {
    pub fn build(&self, field: &Field) -> CyclicAlgebra {
        match *self {
            BSource::Trivial => CyclicAlgebra::trivial(field),
            BSource::Truncated { b } => CyclicAlgebra::truncated_polynomial(field, b),
            BSource::SquareZero { b } => CyclicAlgebra::square_zero(field, b),
            BSource::ExteriorType => CyclicAlgebra::exterior_type(field),
        }
    }

    fn describe(&self) -> String {
        match self {
            BSource::Trivial => "k".into(),
            BSource::Truncated { b } => format!("k[x]/x^{}", b + 1),
            BSource::SquareZero { b } => format!("square-zero, b = {b}"),
            BSource::ExteriorType => "exterior type".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    Com,
    Ope,
    Mas,
    /// supported on arities ≡ 1 mod w
    ComW { w: usize },
    /// supported on arities ≡ 1 mod w, w even
    OpeW { w: usize },
    LinE { b: BSource },
    LinO { b: BSource },
}

impl FamilyKind {
    /// Parse the CLI spelling: com, ope, mas, com-w, ope-w (with `w`), lin-e / lin-o (with a B preset).
    pub fn parse(kind: &str, w: Option<usize>, b: Option<BSource>) -> Result<FamilyKind, FamilyError> {
        let b = b.unwrap_or(BSource::SquareZero { b: 1 });
        Ok(match kind.to_ascii_lowercase().as_str() {
            "com" => FamilyKind::Com,
            "ope" => FamilyKind::Ope,
            "mas" => FamilyKind::Mas,
            "com-w" | "comw" => FamilyKind::ComW { w: w.ok_or(FamilyError::BadW)? },
            "ope-w" | "opew" => FamilyKind::OpeW { w: w.ok_or(FamilyError::OddOpeParameter(0))? },
            "lin-e" | "line" => FamilyKind::LinE { b },
            "lin-o" | "lino" => FamilyKind::LinO { b },
            other => return Err(FamilyError::UnknownKind(other.into())),
        })
    }
}

#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub field: Field,
    pub horizon: usize,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, field: &Field, horizon: usize) -> FamilySpec {
        FamilySpec { kind, field: field.clone(), horizon }
    }
}

/// One basis element μ_n per supported arity, the given action, and every composition equal to
/// `coeff(n, i, m)`·μ_{n+m-1} (zero if the target arity is unsupported).
fn one_dimensional(
    field: &Field,
    name: String,
    horizon: usize,
    supported: impl Fn(usize) -> bool,
    action: Action,
    coeff: impl Fn(usize, usize, usize) -> i64,
) -> Result<Operad, OperadError> {
    let comps: Vec<Component> =
        (0..=horizon).map(|n| if n >= 1 && supported(n) { Component::new(vec![mu_label(n)], action.clone()) } else { Component::zero() }).collect();
    Operad::from_fn(field, name, comps, vec![field.one()], |n, _, i, m, _| {
        if supported(n + m - 1) {
            vec![field.from_i64(coeff(n, i, m))]
        } else {
            Vec::new()
        }
    })
}

/// μ_n ∘_i μ_m in Mas: 0 if n, m are both even; (-1)^{i-1} if n is odd and m even; 1 if m is odd.
pub fn mas_coefficient(n: usize, i: usize, m: usize) -> i64 {
    match (n % 2, m % 2) {
        (_, 1) => 1,
        (0, _) => 0,
        _ => {
            if (i - 1) % 2 == 0 {
                1
            } else {
                -1
            }
        }
    }
}

/// The algebra B{c} feeding a linear family, truncated so that its image reaches `horizon`.
pub fn linear_source(b: &BSource, field: &Field, ty: BcType, horizon: usize) -> Result<DenseAlgebra, FamilyError> {
    Ok(build_bc(&b.build(field), ty, horizon.saturating_sub(1))?)
}

pub fn make_family(spec: &FamilySpec) -> Result<Operad, FamilyError> {
    let f = &spec.field;
    let h = spec.horizon;
    if h == 0 {
        return Err(FamilyError::ZeroHorizon);
    }
    let op = match &spec.kind {
        FamilyKind::Com => one_dimensional(f, "Com".into(), h, |_| true, Action::Trivial, |_, _, _| 1)?,
        FamilyKind::Ope => one_dimensional(f, "Ope".into(), h, |n| n % 2 == 1, Action::Sign, |_, _, _| 1)?,
        FamilyKind::Mas => one_dimensional(f, "Mas".into(), h, |_| true, Action::Sign, mas_coefficient)?,
        &FamilyKind::ComW { w } => {
            if w == 0 {
                return Err(FamilyError::BadW);
            }
            one_dimensional(f, format!("Com^{{{w}}}"), h, |n| (n - 1) % w == 0, Action::Trivial, |_, _, _| 1)?
        }
        &FamilyKind::OpeW { w } => {
            if w == 0 || w % 2 == 1 {
                return Err(FamilyError::OddOpeParameter(w));
            }
            one_dimensional(f, format!("Ope^{{{w}}}"), h, |n| (n - 1) % w == 0, Action::Sign, |_, _, _| 1)?
        }
        FamilyKind::LinE { b } => {
            let mut p = functor_g_str(&linear_source(b, f, BcType::Even, h)?)?;
            p.set_name(format!("Lin_e({})", b.describe()));
            p
        }
        FamilyKind::LinO { b } => {
            if f.characteristic() == 2 {
                return Err(FamilyError::LinOInCharacteristic2);
            }
            let mut p = functor_g_atr(&linear_source(b, f, BcType::Odd, h)?)?;
            p.set_name(format!("Lin_o({})", b.describe()));
            p
        }
    };
    Ok(op)
}

/// Closed-form Hilbert series of a family (arity 0 coefficient is always 0).
pub fn family_series(kind: &FamilyKind, horizon: usize) -> HilbertSeries {
    HilbertSeries::from_fn(horizon, |n| {
        let on = match kind {
            _ if n == 0 => false,
            FamilyKind::Com | FamilyKind::Mas | FamilyKind::LinE { .. } | FamilyKind::LinO { .. } => true,
            FamilyKind::Ope => n % 2 == 1,
            FamilyKind::ComW { w } | FamilyKind::OpeW { w } => (n - 1) % w == 0,
        };
        u64::from(on)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub horizon: usize,
    pub passed: bool,
    pub mismatch: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyIdentitiesReport {
    pub horizon: usize,
    pub checks: Vec<IdentityCheck>,
    pub passed: bool,
}

fn record(checks: &mut Vec<IdentityCheck>, name: String, horizon: usize, result: Result<Option<String>, FamilyError>) {
    let mismatch = match result {
        Ok(m) => m,
        Err(e) => Some(format!("construction failed: {e}")),
    };
    checks.push(IdentityCheck { name, horizon, passed: mismatch.is_none(), mismatch });
}

/// Component-by-component comparisons of the closed-form families against functor images and
/// restrictions: G_Str(F[t], deg t = w) ≡ Com^{w} (w = 1, 2, 3), G_Atr(F[t] odd, deg t = 2m) ≡ Ope^{2m}
/// (m = 1, 2), Ope^{2w} ≡ Com^{2w} over F_2, G_Atr(B{c}) ≡ Mas, Ope ⊂ Mas as the odd arities,
/// and Com^{w} as the arity restriction of Com.
pub fn family_identities_check(horizon: usize) -> FamilyIdentitiesReport {
    let h = horizon;
    let mut checks = Vec::new();
    let q = Field::rationals();
    let f4 = Field::new(&prime_power_descriptor(4).expect("4 is a prime power")).expect("valid descriptor");
    let f9 = Field::new(&prime_power_descriptor(9).expect("9 is a prime power")).expect("valid descriptor");
    let f2 = Field::prime(2).expect("2 is prime");
    let f3 = Field::prime(3).expect("3 is prime");

    for field in [&q, &f4] {
        for w in 1..=3 {
            let res = (|| {
                let fam = make_family(&FamilySpec::new(FamilyKind::ComW { w }, field, h))?;
                let img = functor_g_str(&DenseAlgebra::polynomial(field, w, h - 1))?;
                Ok(fam.structural_mismatch(&img))
            })();
            record(&mut checks, format!("G_Str({field}[t], deg t = {w}) = Com^{{{w}}}"), h, res);
        }
    }
    // F[t] as an algebra over the prime field: Com^{w}_F = (Com^{w})_F
    for w in 1..=3 {
        let res = (|| {
            let fam = make_family(&FamilySpec::new(FamilyKind::ComW { w }, &f2, h))?.base_change(&f4)?;
            let img = functor_g_str(&DenseAlgebra::polynomial_over(&f4, w, h - 1))?;
            Ok(fam.structural_mismatch(&img))
        })();
        record(&mut checks, format!("G_Str({f4}[t] over {f2}, deg t = {w}) = Com^{{{w}}}_{f4}"), h, res);
    }
    for field in [&q, &f9] {
        for m in 1..=2 {
            let res = (|| {
                let fam = make_family(&FamilySpec::new(FamilyKind::OpeW { w: 2 * m }, field, h))?;
                let img = functor_g_atr(&DenseAlgebra::polynomial(field, 2 * m, h - 1).with_uniform_parity(Parity::Odd))?;
                Ok(fam.structural_mismatch(&img))
            })();
            record(&mut checks, format!("G_Atr({field}[t] odd, deg t = {}) = Ope^{{{}}}", 2 * m, 2 * m), h, res);
        }
    }
    for m in 1..=2 {
        let res = (|| {
            let fam = make_family(&FamilySpec::new(FamilyKind::OpeW { w: 2 * m }, &f3, h))?.base_change(&f9)?;
            let img = functor_g_atr(&DenseAlgebra::polynomial_over(&f9, 2 * m, h - 1).with_uniform_parity(Parity::Odd))?;
            Ok(fam.structural_mismatch(&img))
        })();
        record(&mut checks, format!("G_Atr({f9}[t] odd over {f3}, deg t = {}) = Ope^{{{}}}_{f9}", 2 * m, 2 * m), h, res);
    }
    for w in 1..=3 {
        let res = (|| {
            let ope = make_family(&FamilySpec::new(FamilyKind::OpeW { w: 2 * w }, &f2, h))?;
            let com = make_family(&FamilySpec::new(FamilyKind::ComW { w: 2 * w }, &f2, h))?;
            Ok(ope.structural_mismatch(&com))
        })();
        record(&mut checks, format!("Ope^{{{}}} = Com^{{{}}} over {f2}", 2 * w, 2 * w), h, res);
    }
    let hm = h.min(11);
    for field in [&q, &f3] {
        let res = (|| {
            let mas = make_family(&FamilySpec::new(FamilyKind::Mas, field, hm))?;
            let img = functor_g_atr(&linear_source(&BSource::SquareZero { b: 1 }, field, BcType::Odd, hm)?)?;
            Ok(mas.structural_mismatch(&img))
        })();
        record(&mut checks, format!("G_Atr(B{{c}}, B = k ⊕ kx1, x1² = 0, odd) = Mas over {field}"), hm, res);
        let res = (|| {
            let mas = make_family(&FamilySpec::new(FamilyKind::Mas, field, hm))?;
            let ope = make_family(&FamilySpec::new(FamilyKind::Ope, field, hm))?;
            Ok(ope.structural_mismatch(&mas.restrict_arities(|n| n % 2 == 1, "odd part of Mas")?))
        })();
        record(&mut checks, format!("Ope = odd-arity suboperad of Mas over {field}"), hm, res);
    }
    for w in 1..=4 {
        let res = (|| {
            let com = make_family(&FamilySpec::new(FamilyKind::Com, &q, h))?;
            let cw = make_family(&FamilySpec::new(FamilyKind::ComW { w }, &q, h))?;
            Ok(cw.structural_mismatch(&com.restrict_arities(|n| (n - 1) % w == 0, "restriction")?))
        })();
        record(&mut checks, format!("Com^{{{w}}} = arity restriction of Com"), h, res);
    }
    let passed = checks.iter().all(|c| c.passed);
    FamilyIdentitiesReport { horizon: h, checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{check_axioms, classify_triviality, Triviality};

    fn fam(kind: FamilyKind, h: usize) -> Operad {
        make_family(&FamilySpec::new(kind, &Field::rationals(), h)).unwrap()
    }

    #[test]
    fn series_shapes() {
        assert_eq!(fam(FamilyKind::Com, 6).hilbert_series().coeffs(), &[0, 1, 1, 1, 1, 1, 1]);
        assert_eq!(fam(FamilyKind::Ope, 6).hilbert_series().coeffs(), &[0, 1, 0, 1, 0, 1, 0]);
        let c3 = fam(FamilyKind::ComW { w: 3 }, 10);
        assert_eq!(c3.hilbert_series().coeffs(), &[0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1]);
        for kind in [FamilyKind::Com, FamilyKind::Ope, FamilyKind::Mas, FamilyKind::OpeW { w: 4 }, FamilyKind::LinE { b: BSource::ExteriorType }] {
            assert_eq!(fam(kind.clone(), 10).hilbert_series(), family_series(&kind, 10), "{kind:?}");
        }
    }

    #[test]
    fn families_pass_axioms() {
        for kind in [
            FamilyKind::Com,
            FamilyKind::Ope,
            FamilyKind::Mas,
            FamilyKind::ComW { w: 2 },
            FamilyKind::OpeW { w: 2 },
            FamilyKind::LinE { b: BSource::Truncated { b: 2 } },
            FamilyKind::LinO { b: BSource::SquareZero { b: 3 } },
        ] {
            let p = fam(kind.clone(), 7);
            let r = check_axioms(&p, 7);
            assert!(r.passed, "{kind:?}: {:?}", r.violations.first());
        }
    }

    #[test]
    fn mas_signs_and_classification() {
        assert_eq!(mas_coefficient(3, 2, 2), -1);
        assert_eq!(mas_coefficient(2, 1, 2), 0);
        assert_eq!(mas_coefficient(4, 3, 3), 1);
        let o = fam(FamilyKind::Ope, 7);
        assert_eq!(classify_triviality(&o, 5), Triviality::SSigned);
        assert_eq!(classify_triviality(&o, 4), Triviality::Zero);
        assert_eq!(classify_triviality(&fam(FamilyKind::Com, 7), 5), Triviality::STrivial);
    }

    #[test]
    fn invalid_specs() {
        let q = Field::rationals();
        assert!(matches!(make_family(&FamilySpec::new(FamilyKind::OpeW { w: 3 }, &q, 5)), Err(FamilyError::OddOpeParameter(3))));
        let f2 = Field::prime(2).unwrap();
        assert!(matches!(make_family(&FamilySpec::new(FamilyKind::LinO { b: BSource::SquareZero { b: 1 } }, &f2, 5)), Err(FamilyError::LinOInCharacteristic2)));
        assert!(FamilyKind::parse("bogus", None, None).is_err());
    }

    #[test]
    fn identities_hold_at_small_horizon() {
        let r = family_identities_check(9);
        for c in &r.checks {
            assert!(c.passed, "{}: {:?}", c.name, c.mismatch);
        }
    }
}
