//! Locally finite reduced symmetric operads given by structure constants up to
//! a maximal arity (the horizon): partial compositions ∘_i, the right
//! S_n-action, axiom checking, constructions and ideals.

mod axioms;
mod constructions;
mod ideals;

pub use axioms::{check_axioms, Axiom, AxiomReport, AxiomViolation};
pub use ideals::{
    classify_triviality, describe_basis, ideal_generated_by, ideal_product, is_central, prime_at_horizon, CentralVerdict, IdealAtHorizon, PrimeVerdict,
    Triviality, DEFAULT_PRIME_DIM_CAP,
};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, add_scaled, is_zero_vec, Vector};
use crate::scalars::{CoeffRepr, Field, FieldDescriptor, FieldError};
use crate::series::HilbertSeries;
use crate::symmetry::{PermError, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperadError {
    #[error("slot {slot} out of range for an element of arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("result arity {arity} exceeds the horizon {horizon}")]
    BeyondHorizon { arity: usize, horizon: usize },
    #[error("permutation on {got} letters applied to an element of arity {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("element of arity {arity} has {got} coefficients, component has dimension {expected}")]
    BadLength { arity: usize, expected: usize, got: usize },
    #[error("operad must be reduced: P(0) = 0")]
    NotReduced,
    #[error("operads live over different fields")]
    FieldMismatch,
    #[error("subcollection is not closed at arity {arity}: {detail}")]
    NotClosed { arity: usize, detail: String },
    #[error("malformed operad data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// How S_n acts on a component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    /// x∗σ = x
    Trivial,
    /// x∗σ = sgn(σ)x
    Sign,
    /// `matrices[k-1][j]` = coefficients of e_j ∗ s_k, s_k = (k k+1).
    Matrices(Vec<Vec<Vector>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub labels: Vec<String>,
    pub action: Action,
}

impl Component {
    pub fn new(labels: Vec<String>, action: Action) -> Component {
        Component { labels, action }
    }

    pub fn zero() -> Component {
        Component { labels: Vec::new(), action: Action::Trivial }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// ν ∈ P(n): arity and coefficients over the component basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperadElement {
    pub arity: usize,
    pub coeffs: Vector,
}

pub(crate) type CompKey = (usize, usize, usize, usize, usize);

/// Structure-constant operad truncated at a maximal arity.
#[derive(Clone, Debug)]
pub struct Operad {
    field: Field,
    name: String,
    components: Vec<Component>,
    identity: Vector,
    /// (m, a, i, n, b) ↦ e_a ∘_i e_b for e_a ∈ P(m), e_b ∈ P(n), 1-based slot i; nonzero entries only
    table: HashMap<CompKey, Vector>,
}

impl Operad {
    /// Build from a composition function on basis elements: `compose(m, a, i, n, b)` must return
    /// a vector of length dim P(m+n-1). Components are indexed by arity 0..=horizon.
    pub fn from_fn(
        field: &Field,
        name: impl Into<String>,
        components: Vec<Component>,
        identity: Vector,
        mut compose: impl FnMut(usize, usize, usize, usize, usize) -> Vector,
    ) -> Result<Operad, OperadError> {
        let h = components.len().saturating_sub(1);
        let mut table = HashMap::new();
        for m in 1..=h {
            for n in 1..=h + 1 - m {
                for a in 0..components[m].dim() {
                    for b in 0..components[n].dim() {
                        for i in 1..=m {
                            let v = compose(m, a, i, n, b);
                            if v.len() != components[m + n - 1].dim() {
                                return Err(OperadError::BadLength { arity: m + n - 1, expected: components[m + n - 1].dim(), got: v.len() });
                            }
                            if !is_zero_vec(field, &v) {
                                table.insert((m, a, i, n, b), v);
                            }
                        }
                    }
                }
            }
        }
        Operad::from_parts(field, name, components, identity, table)
    }

    pub(crate) fn from_parts(
        field: &Field,
        name: impl Into<String>,
        components: Vec<Component>,
        identity: Vector,
        table: HashMap<CompKey, Vector>,
    ) -> Result<Operad, OperadError> {
        if components.len() < 2 {
            return Err(OperadError::Malformed("need components through arity 1".into()));
        }
        if components[0].dim() != 0 {
            return Err(OperadError::NotReduced);
        }
        if identity.len() != components[1].dim() {
            return Err(OperadError::BadLength { arity: 1, expected: components[1].dim(), got: identity.len() });
        }
        for (n, c) in components.iter().enumerate() {
            if let Action::Matrices(ms) = &c.action {
                if ms.len() != n.saturating_sub(1) || ms.iter().any(|m| m.len() != c.dim() || m.iter().any(|r| r.len() != c.dim())) {
                    return Err(OperadError::Malformed(format!("action matrices at arity {n} have the wrong shape")));
                }
            }
        }
        Ok(Operad { field: field.clone(), name: name.into(), components, identity, table })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn horizon(&self) -> usize {
        self.components.len() - 1
    }

    pub fn dim(&self, arity: usize) -> usize {
        self.components.get(arity).map_or(0, Component::dim)
    }

    pub fn component(&self, arity: usize) -> &Component {
        &self.components[arity]
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn label(&self, arity: usize, index: usize) -> &str {
        &self.components[arity].labels[index]
    }

    pub fn identity(&self) -> OperadElement {
        OperadElement { arity: 1, coeffs: self.identity.clone() }
    }

    pub fn hilbert_series(&self) -> HilbertSeries {
        HilbertSeries::from_fn(self.horizon(), |n| self.dim(n) as u64)
    }

    pub fn basis_element(&self, arity: usize, index: usize) -> OperadElement {
        OperadElement { arity, coeffs: linalg::unit_vec(&self.field, self.dim(arity), index) }
    }

    pub fn zero_element(&self, arity: usize) -> OperadElement {
        OperadElement { arity, coeffs: linalg::zero_vec(&self.field, self.dim(arity)) }
    }

    pub fn element(&self, arity: usize, coeffs: Vector) -> Result<OperadElement, OperadError> {
        self.check_element(&OperadElement { arity, coeffs: coeffs.clone() })?;
        Ok(OperadElement { arity, coeffs })
    }

    fn check_element(&self, x: &OperadElement) -> Result<(), OperadError> {
        if x.arity > self.horizon() {
            return Err(OperadError::BeyondHorizon { arity: x.arity, horizon: self.horizon() });
        }
        let expected = self.dim(x.arity);
        if x.coeffs.len() != expected {
            return Err(OperadError::BadLength { arity: x.arity, expected, got: x.coeffs.len() });
        }
        Ok(())
    }

    /// e_a ∘_i e_b (unchecked indices; zero if beyond the horizon).
    pub fn compose_basis(&self, m: usize, a: usize, i: usize, n: usize, b: usize) -> Vector {
        match self.table.get(&(m, a, i, n, b)) {
            Some(v) => v.clone(),
            None => linalg::zero_vec(&self.field, self.dim(m + n - 1)),
        }
    }

    /// Bilinear partial composition x ∘_i y.
    pub fn compose(&self, x: &OperadElement, i: usize, y: &OperadElement) -> Result<OperadElement, OperadError> {
        if i == 0 || i > x.arity {
            return Err(OperadError::SlotOutOfRange { slot: i, arity: x.arity });
        }
        if y.arity == 0 {
            return Err(OperadError::NotReduced);
        }
        let arity = x.arity + y.arity - 1;
        if arity > self.horizon() {
            return Err(OperadError::BeyondHorizon { arity, horizon: self.horizon() });
        }
        self.check_element(x)?;
        self.check_element(y)?;
        let f = &self.field;
        let mut out = linalg::zero_vec(f, self.dim(arity));
        for (a, ca) in x.coeffs.iter().enumerate() {
            if f.is_zero(ca) {
                continue;
            }
            for (b, cb) in y.coeffs.iter().enumerate() {
                if f.is_zero(cb) {
                    continue;
                }
                if let Some(v) = self.table.get(&(x.arity, a, i, y.arity, b)) {
                    add_scaled(f, &mut out, &f.mul(ca, cb), v);
                }
            }
        }
        Ok(OperadElement { arity, coeffs: out })
    }

    /// x ∗ s_k for the adjacent transposition s_k = (k k+1), 1 ≤ k < arity.
    pub fn act_adjacent(&self, x: &OperadElement, k: usize) -> OperadElement {
        let f = &self.field;
        let coeffs = match &self.components[x.arity].action {
            Action::Trivial => x.coeffs.clone(),
            Action::Sign => x.coeffs.iter().map(|c| f.neg(c)).collect(),
            Action::Matrices(ms) => {
                let rows = &ms[k - 1];
                let mut out = linalg::zero_vec(f, x.coeffs.len());
                for (c, row) in x.coeffs.iter().zip(rows) {
                    add_scaled(f, &mut out, c, row);
                }
                out
            }
        };
        OperadElement { arity: x.arity, coeffs }
    }

    /// Right action x ∗ σ, through an adjacent-transposition word of σ.
    pub fn act(&self, x: &OperadElement, sigma: &Permutation) -> Result<OperadElement, OperadError> {
        if sigma.degree() != x.arity {
            return Err(OperadError::ArityMismatch { expected: x.arity, got: sigma.degree() });
        }
        self.check_element(x)?;
        let f = &self.field;
        match &self.components[x.arity].action {
            Action::Trivial => Ok(x.clone()),
            Action::Sign => Ok(if sigma.sign() < 0 { OperadElement { arity: x.arity, coeffs: x.coeffs.iter().map(|c| f.neg(c)).collect() } } else { x.clone() }),
            Action::Matrices(_) => Ok(sigma.adjacent_word().into_iter().fold(x.clone(), |acc, k| self.act_adjacent(&acc, k))),
        }
    }

    pub fn format_element(&self, x: &OperadElement) -> String {
        let f = &self.field;
        let terms: Vec<String> = x
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(i, c)| {
                let label = self.label(x.arity, i);
                if f.is_one(c) {
                    label.to_string()
                } else if f.is_one(&f.neg(c)) {
                    format!("-{label}")
                } else {
                    format!("({})·{label}", f.format(c))
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Copy with one composition entry replaced (for mutation tests).
    pub fn with_composition(&self, key: (usize, usize, usize, usize, usize), value: Vector) -> Result<Operad, OperadError> {
        let (m, a, i, n, b) = key;
        if m + n - 1 > self.horizon() || a >= self.dim(m) || b >= self.dim(n) || i == 0 || i > m {
            return Err(OperadError::Malformed(format!("composition key {key:?} out of range")));
        }
        if value.len() != self.dim(m + n - 1) {
            return Err(OperadError::BadLength { arity: m + n - 1, expected: self.dim(m + n - 1), got: value.len() });
        }
        let mut out = self.clone();
        if is_zero_vec(&self.field, &value) {
            out.table.remove(&key);
        } else {
            out.table.insert(key, value);
        }
        Ok(out)
    }

    /// Action matrix of s_k on a component (rows = images of basis vectors).
    pub fn action_matrix(&self, arity: usize, k: usize) -> Vec<Vector> {
        (0..self.dim(arity)).map(|j| self.act_adjacent(&self.basis_element(arity, j), k).coeffs).collect()
    }

    /// First structural difference from `other` (dimensions, action, identity, structure constants),
    /// ignoring labels and names; None if the two agree at every arity.
    pub fn structural_mismatch(&self, other: &Operad) -> Option<String> {
        if self.field != other.field {
            return Some("different base fields".into());
        }
        if self.horizon() != other.horizon() {
            return Some(format!("horizons {} and {}", self.horizon(), other.horizon()));
        }
        for n in 1..=self.horizon() {
            if self.dim(n) != other.dim(n) {
                return Some(format!("dim P({n}) = {} vs {}", self.dim(n), other.dim(n)));
            }
            for k in 1..n {
                if self.action_matrix(n, k) != other.action_matrix(n, k) {
                    return Some(format!("action of s_{k} differs at arity {n}"));
                }
            }
        }
        if self.identity != other.identity {
            return Some("identities differ".into());
        }
        let keys: std::collections::BTreeSet<&CompKey> = self.table.keys().chain(other.table.keys()).collect();
        for &(m, a, i, n, b) in keys {
            let (x, y) = (self.compose_basis(m, a, i, n, b), other.compose_basis(m, a, i, n, b));
            if x != y {
                let fx = self.format_element(&OperadElement { arity: m + n - 1, coeffs: x });
                let fy = other.format_element(&OperadElement { arity: m + n - 1, coeffs: y });
                return Some(format!("{} ∘_{i} {} = {fx} vs {fy}", self.label(m, a), self.label(n, b)));
            }
        }
        None
    }

    pub(crate) fn table(&self) -> &HashMap<CompKey, Vector> {
        &self.table
    }

    pub fn to_file(&self) -> OperadFile {
        let f = &self.field;
        let repr = |v: &Vector| v.iter().map(|c| f.to_repr(c)).collect::<Vec<_>>();
        let components = self
            .components
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| ComponentFile {
                arity: n,
                dim: c.dim(),
                labels: c.labels.clone(),
                action: match &c.action {
                    Action::Trivial => ActionFile::Tag("trivial".into()),
                    Action::Sign => ActionFile::Tag("sign".into()),
                    Action::Matrices(ms) => ActionFile::Matrices { matrices: ms.iter().map(|m| m.iter().map(repr).collect()).collect() },
                },
            })
            .collect();
        let sorted: BTreeMap<&CompKey, &Vector> = self.table.iter().collect();
        let compositions = sorted
            .into_iter()
            .map(|(&(m, a, i, n, b), v)| CompositionEntry { outer: [m, a], slot: i, inner: [n, b], value: repr(v) })
            .collect();
        OperadFile {
            schema_version: 1,
            name: self.name.clone(),
            field: f.descriptor().clone(),
            horizon: self.horizon(),
            components,
            identity: repr(&self.identity),
            compositions,
        }
    }

    pub fn from_file(file: &OperadFile) -> Result<Operad, OperadError> {
        let field = Field::new(&file.field)?;
        let h = file.horizon;
        let mut components = vec![Component::zero(); h + 1];
        let parse = |v: &[CoeffRepr], len: usize| -> Result<Vector, OperadError> {
            if v.len() != len {
                return Err(OperadError::Malformed(format!("expected {len} coefficients, found {}", v.len())));
            }
            v.iter().map(|c| field.from_repr(c).map_err(OperadError::from)).collect()
        };
        for c in &file.components {
            if c.arity == 0 || c.arity > h {
                return Err(OperadError::Malformed(format!("component arity {} outside 1..={h}", c.arity)));
            }
            if c.labels.len() != c.dim {
                return Err(OperadError::Malformed(format!("arity {}: {} labels for dimension {}", c.arity, c.labels.len(), c.dim)));
            }
            let action = match &c.action {
                ActionFile::Tag(t) if t == "trivial" => Action::Trivial,
                ActionFile::Tag(t) if t == "sign" => Action::Sign,
                ActionFile::Tag(t) => return Err(OperadError::Malformed(format!("unknown action tag {t:?}"))),
                ActionFile::Matrices { matrices } => Action::Matrices(
                    matrices.iter().map(|m| m.iter().map(|r| parse(r, c.dim)).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?,
                ),
            };
            components[c.arity] = Component::new(c.labels.clone(), action);
        }
        let identity = parse(&file.identity, components[1].dim())?;
        let mut table = HashMap::new();
        for e in &file.compositions {
            let [m, a] = e.outer;
            let [n, b] = e.inner;
            if m == 0 || n == 0 || m + n - 1 > h || a >= components[m].dim() || b >= components[n].dim() || e.slot == 0 || e.slot > m {
                return Err(OperadError::Malformed(format!("composition entry {:?} ∘_{} {:?} out of range", e.outer, e.slot, e.inner)));
            }
            let v = parse(&e.value, components[m + n - 1].dim())?;
            if !is_zero_vec(&field, &v) {
                table.insert((m, a, e.slot, n, b), v);
            }
        }
        Operad::from_parts(&field, file.name.clone(), components, identity, table)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionFile {
    /// "trivial" or "sign"
    Tag(String),
    Matrices { matrices: Vec<Vec<Vec<CoeffRepr>>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentFile {
    pub arity: usize,
    pub dim: usize,
    pub labels: Vec<String>,
    pub action: ActionFile,
}

/// One nonzero structure constant: basis `outer` = [arity, index] composed at `slot` with `inner`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionEntry {
    pub outer: [usize; 2],
    pub slot: usize,
    pub inner: [usize; 2],
    pub value: Vec<CoeffRepr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperadFile {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub field: FieldDescriptor,
    pub horizon: usize,
    pub components: Vec<ComponentFile>,
    pub identity: Vec<CoeffRepr>,
    pub compositions: Vec<CompositionEntry>,
}

/// Canonical label of the single basis element of a linear component.
pub fn mu_label(n: usize) -> String {
    format!("mu_{n}")
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The associative operad: basis μ_w of As(n) indexed by w ∈ S_n, read as the monomial a_{w(1)}..a_{w(n)}.
    /// With the right action convention, μ_w ∗ σ = μ_{σ⁻¹∘w}.
    pub fn associative(field: &Field, horizon: usize) -> Operad {
        let perms: Vec<Vec<Permutation>> = (0..=horizon).map(|n| if n == 0 { Vec::new() } else { Permutation::all(n) }).collect();
        let index: Vec<HashMap<Permutation, usize>> =
            perms.iter().map(|ps| ps.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect()).collect();
        let components: Vec<Component> = perms
            .iter()
            .enumerate()
            .map(|(n, ps)| {
                if n == 0 {
                    return Component::zero();
                }
                let labels = ps.iter().map(|p| format!("a{}", p.images().iter().map(|x| x.to_string()).collect::<Vec<_>>().join("a"))).collect();
                let mats = (1..n)
                    .map(|k| {
                        let s = Permutation::adjacent(n, k).unwrap();
                        ps.iter().map(|w| linalg::unit_vec(field, ps.len(), index[n][&s.inverse().compose(w)])).collect()
                    })
                    .collect();
                Component::new(labels, Action::Matrices(mats))
            })
            .collect();
        Operad::from_fn(field, "As", components, vec![field.one()], |m, a, i, n, b| {
            let u = perms[m][a].images();
            let v = perms[n][b].images();
            let mut word = Vec::new();
            for &x in &u {
                if x < i {
                    word.push(x);
                } else if x == i {
                    word.extend(v.iter().map(|&y| i - 1 + y));
                } else {
                    word.push(x + n - 1);
                }
            }
            let w = Permutation::from_images(&word).unwrap();
            linalg::unit_vec(field, perms[m + n - 1].len(), index[m + n - 1][&w])
        })
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_sign(field: &Field, h: usize) -> Operad {
        let comps = (0..=h).map(|n| if n == 0 { Component::zero() } else { Component::new(vec![mu_label(n)], Action::Sign) }).collect();
        Operad::from_fn(field, "test", comps, vec![field.one()], |_, _, _, _, _| vec![field.one()]).unwrap()
    }

    #[test]
    fn compose_errors_are_distinct() {
        let q = Field::rationals();
        let p = linear_sign(&q, 5);
        let x = p.basis_element(3, 0);
        assert_eq!(p.compose(&x, 4, &x).unwrap_err(), OperadError::SlotOutOfRange { slot: 4, arity: 3 });
        assert_eq!(p.compose(&x, 1, &p.basis_element(4, 0)).unwrap_err(), OperadError::BeyondHorizon { arity: 6, horizon: 5 });
        let s = Permutation::identity(2);
        assert_eq!(p.act(&x, &s).unwrap_err(), OperadError::ArityMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn associative_fixture_action_is_functorial() {
        let q = Field::rationals();
        let p = fixtures::associative(&q, 4);
        for n in 1..=4 {
            for s in Permutation::all(n) {
                for t in Permutation::all(n) {
                    let x = p.basis_element(n, 1 % p.dim(n));
                    let lhs = p.act(&p.act(&x, &s).unwrap(), &t).unwrap();
                    let rhs = p.act(&x, &s.compose(&t)).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let q = Field::rationals();
        let p = fixtures::associative(&q, 3);
        let text = serde_json::to_string(&p.to_file()).unwrap();
        let back = Operad::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.to_file(), p.to_file());
    }
}
