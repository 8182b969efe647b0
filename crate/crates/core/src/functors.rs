//! The functor F from operads to graded algebras (A_i = P(i+1), x·y = x∘_1y) and the
//! constructions G_Str (commutative algebras → S-trivial operads) and G_Atr
//! (PGC algebras → A-trivial operads).

use serde::Serialize;
use thiserror::Error;

use crate::graded_algebra::{self, check_pgc, commutativity_witness, DenseAlgebra, GradedAlgebra, Parity};
use crate::linalg::{self, Vector};
use crate::operad::{Action, Component, Operad, OperadError};
use crate::series::HilbertSeries;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctorError {
    #[error("G_Str needs a commutative algebra; {0} and {1} do not commute")]
    NotCommutative(String, String),
    #[error("G_Atr needs characteristic ≠ 2; use G_Str instead")]
    CharacteristicTwo,
    #[error("G_Atr needs even/odd type labels on every positive-degree basis element")]
    MissingTypes,
    #[error("not a PGC algebra at the horizon: {0}")]
    NotPgc(String),
    #[error(transparent)]
    Operad(#[from] OperadError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctorKind {
    F,
    GStr,
    GAtr,
}

/// Records which construction produced an object and from what; never affects algebraic content.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctorImageTag {
    pub functor: FunctorKind,
    pub source: String,
    pub source_horizon: usize,
}

/// A_P: degree i is P(i+1) (up to the operad's horizon), product x∘_1y, unit 1_P.
/// Type labels are read off the action: basis elements fixed by every s_k are even, negated ones odd.
pub fn functor_f(p: &Operad) -> DenseAlgebra {
    let h = p.horizon().saturating_sub(1);
    let labels: Vec<Vec<String>> = (0..=h).map(|d| p.component(d + 1).labels.clone()).collect();
    let mut a = DenseAlgebra::from_fn(p.field(), format!("F({})", p.name()), labels, p.identity().coeffs, |d1, i1, d2, i2| {
        p.compose_basis(d1 + 1, i1, 1, d2 + 1, i2)
    });
    let f = p.field();
    let parities: Option<Vec<Vec<Parity>>> = (0..=h)
        .map(|d| {
            let n = d + 1;
            (0..p.dim(n))
                .map(|j| {
                    if n == 1 {
                        return Some(Parity::Even);
                    }
                    let e = p.basis_element(n, j);
                    let imgs: Vec<Vector> = (1..n).map(|k| p.act_adjacent(&e, k).coeffs).collect();
                    let neg: Vector = e.coeffs.iter().map(|c| f.neg(c)).collect();
                    if imgs.iter().all(|v| *v == e.coeffs) {
                        Some(Parity::Even)
                    } else if imgs.iter().all(|v| *v == neg) {
                        Some(Parity::Odd)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    if let Some(ps) = parities {
        a = a.with_parities(ps).expect("shape matches");
    }
    a
}

fn components_from(a: &dyn GradedAlgebra, action: impl Fn(usize) -> Action) -> Vec<Component> {
    let h = a.horizon() + 1;
    (0..=h)
        .map(|n| if n == 0 { Component::zero() } else { Component::new((0..a.dim(n - 1)).map(|i| a.label(n - 1, i)).collect(), action(n)) })
        .collect()
}

/// G_Str(A): P(n) = A_{n-1}, trivial action, x∘_iy = x·y for every slot.
pub fn functor_g_str(a: &dyn GradedAlgebra) -> Result<Operad, FunctorError> {
    if let Some((d1, i1, d2, i2)) = commutativity_witness(a, a.horizon(), false) {
        return Err(FunctorError::NotCommutative(a.label(d1, i1), a.label(d2, i2)));
    }
    let comps = components_from(a, |_| Action::Trivial);
    Ok(Operad::from_fn(a.field(), format!("G_Str({})", a.name()), comps, a.unit(), |m, x, _, n, y| a.mul_basis(m - 1, x, n - 1, y))?)
}

/// The slot sign of G_Atr: ((-1)^{(i-1)(Ar(y)+1)})^{t(x)}.
pub fn g_atr_slot_sign(i: usize, inner_arity: usize, outer_type: Parity) -> i64 {
    if outer_type == Parity::Odd && ((i - 1) * (inner_arity + 1)) % 2 == 1 {
        -1
    } else {
        1
    }
}

/// G_Atr(A): P(n) = A_{n-1}; even-type basis elements act trivially, odd-type ones by the sign;
/// x∘_1y = x·y and x∘_iy = s·(x·y) with the slot sign above.
pub fn functor_g_atr(a: &dyn GradedAlgebra) -> Result<Operad, FunctorError> {
    let f = a.field();
    if f.characteristic() == 2 {
        return Err(FunctorError::CharacteristicTwo);
    }
    let rep = check_pgc(a, a.horizon()).map_err(|_| FunctorError::MissingTypes)?;
    if !rep.passed() {
        return Err(FunctorError::NotPgc(rep.violations.first().cloned().unwrap_or_default()));
    }
    let parity = |d: usize, i: usize| if d == 0 { Parity::Even } else { a.parity(d, i).expect("checked by check_pgc") };
    let comps = components_from(a, |n| {
        let ps: Vec<Parity> = (0..a.dim(n - 1)).map(|i| parity(n - 1, i)).collect();
        if n == 1 || ps.iter().all(|&p| p == Parity::Even) {
            Action::Trivial
        } else if ps.iter().all(|&p| p == Parity::Odd) {
            Action::Sign
        } else {
            let d = ps.len();
            let rows: Vec<Vector> = ps
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    let mut v = linalg::unit_vec(f, d, j);
                    if *p == Parity::Odd {
                        v[j] = f.neg(&v[j]);
                    }
                    v
                })
                .collect();
            Action::Matrices(vec![rows; n - 1])
        }
    });
    Ok(Operad::from_fn(f, format!("G_Atr({})", a.name()), comps, a.unit(), |m, x, i, n, y| {
        let v = a.mul_basis(m - 1, x, n - 1, y);
        if g_atr_slot_sign(i, n, parity(m - 1, x)) < 0 {
            v.iter().map(|c| f.neg(c)).collect()
        } else {
            v
        }
    })?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Str,
    Atr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundTripReport {
    pub direction: Direction,
    pub horizon: usize,
    pub tag: FunctorImageTag,
    /// F(G(A)) ≅ A component by component
    pub algebra_recovered: bool,
    /// H_{G(A)}(t) = t·H_A(t)
    pub series_shifted: bool,
    pub mismatch: Option<String>,
    pub passed: bool,
}

fn g(a: &dyn GradedAlgebra, direction: Direction) -> Result<Operad, FunctorError> {
    match direction {
        Direction::Str => functor_g_str(a),
        Direction::Atr => functor_g_atr(a),
    }
}

/// F(G(A)) ≅ A at the algebra's horizon, and the Hilbert series shift.
pub fn roundtrip_check(a: &dyn GradedAlgebra, direction: Direction) -> Result<RoundTripReport, FunctorError> {
    let p = g(a, direction)?;
    let back = functor_f(&p);
    let mismatch = graded_algebra::structural_mismatch(a, &back, a.horizon());
    let series_shifted = series_shift_matches(&p.hilbert_series(), &graded_algebra::hilbert_series(a));
    let tag = FunctorImageTag {
        functor: if direction == Direction::Str { FunctorKind::GStr } else { FunctorKind::GAtr },
        source: a.name(),
        source_horizon: a.horizon(),
    };
    Ok(RoundTripReport {
        direction,
        horizon: a.horizon(),
        tag,
        algebra_recovered: mismatch.is_none(),
        series_shifted,
        passed: mismatch.is_none() && series_shifted,
        mismatch,
    })
}

/// G(F(P)) ≅ P for an S-trivial (Str) or A-trivial linear-type (Atr) operad.
pub fn operad_roundtrip(p: &Operad, direction: Direction) -> Result<Option<String>, FunctorError> {
    let q = g(&functor_f(p), direction)?;
    Ok(p.structural_mismatch(&q))
}

/// H_P(t) = t·H_{A_P}(t), coefficient by coefficient.
pub fn hilbert_shift_holds(p: &Operad) -> bool {
    let a = functor_f(p);
    series_shift_matches(&p.hilbert_series(), &graded_algebra::hilbert_series(&a))
}

/// Hilbert series of G_Str(A) or G_Atr(A) through arity horizon+1, read off the components
/// (dim P(n) = dim A_{n-1}) without building composition tables.
pub fn image_series(a: &dyn GradedAlgebra) -> HilbertSeries {
    HilbertSeries::from_fn(a.horizon() + 1, |n| if n == 0 { 0 } else { a.dim(n - 1) as u64 })
}

/// h_P = t·h_A on the common range (h_P reaches one arity beyond A's horizon).
fn series_shift_matches(hp: &HilbertSeries, ha: &HilbertSeries) -> bool {
    let h = hp.horizon().min(ha.horizon() + 1);
    (0..=h).all(|n| hp.coefficient(n) == if n == 0 { 0 } else { ha.coefficient(n - 1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_algebra::{build_bc, BcType, CyclicAlgebra, NormalWordAlgebra};
    use crate::operad::{check_axioms, classify_triviality, Triviality};
    use crate::scalars::Field;

    #[test]
    fn g_str_of_polynomial_ring() {
        let q = Field::rationals();
        let a = DenseAlgebra::polynomial(&q, 1, 8);
        let p = functor_g_str(&a).unwrap();
        assert_eq!(p.horizon(), 9);
        assert!(check_axioms(&p, 9).passed);
        assert_eq!(classify_triviality(&p, 4), Triviality::STrivial);
        assert!(roundtrip_check(&a, Direction::Str).unwrap().passed);
        assert!(hilbert_shift_holds(&p));
    }

    #[test]
    fn g_atr_of_mas_source_has_mas_signs() {
        let q = Field::rationals();
        let a = build_bc(&CyclicAlgebra::square_zero(&q, 1), BcType::Odd, 8).unwrap();
        let p = functor_g_atr(&a).unwrap();
        assert!(check_axioms(&p, 9).passed);
        // μ_3 ∘_2 μ_2 = -μ_4, μ_2 ∘_1 μ_2 = 0
        assert_eq!(p.compose_basis(3, 0, 2, 2, 0), vec![q.from_i64(-1)]);
        assert_eq!(p.compose_basis(2, 0, 1, 2, 0), vec![q.zero()]);
        assert_eq!(classify_triviality(&p, 5), Triviality::SSigned);
        assert!(roundtrip_check(&a, Direction::Atr).unwrap().passed);
        assert_eq!(operad_roundtrip(&p, Direction::Atr).unwrap(), None);
    }

    #[test]
    fn rejections() {
        let f2 = Field::prime(2).unwrap();
        let a = DenseAlgebra::polynomial(&f2, 2, 6).with_uniform_parity(Parity::Odd);
        assert_eq!(functor_g_atr(&a).unwrap_err(), FunctorError::CharacteristicTwo);
        let q = Field::rationals();
        let free = NormalWordAlgebra::new(&q, vec![crate::graded_algebra::Generator::new("x", 1), crate::graded_algebra::Generator::new("y", 1)], &[], 3).unwrap();
        assert!(matches!(functor_g_str(&free), Err(FunctorError::NotCommutative(_, _))));
    }

    #[test]
    fn example_squarefree_image_passes_axioms() {
        let q = Field::rationals();
        let a = NormalWordAlgebra::binary_squarefree(&q, 8);
        let p = functor_g_str(&a).unwrap();
        assert!(check_axioms(&p, 9).passed);
    }
}
