use std::collections::HashMap;

use super::{Action, CompKey, Component, Operad, OperadError, OperadElement};
use crate::linalg::{self, Subspace, Vector};
use crate::scalars::Field;

impl Operad {
    /// The sub-collection spanned by the given subspaces (one per arity 0..=horizon), with structure
    /// constants re-expressed in the subspace bases. Fails if it is not closed under ∘_i or ∗σ.
    pub fn restrict_to_subspaces(&self, spaces: &[Subspace], name: impl Into<String>) -> Result<Operad, OperadError> {
        let h = self.horizon();
        if spaces.len() != h + 1 {
            return Err(OperadError::Malformed(format!("expected {} subspaces, got {}", h + 1, spaces.len())));
        }
        let f = self.field().clone();
        let bases: Vec<Vec<Vector>> = spaces.iter().map(|s| s.basis().to_vec()).collect();
        let mut components = Vec::with_capacity(h + 1);
        for n in 0..=h {
            let labels = bases[n]
                .iter()
                .map(|v| {
                    let x = OperadElement { arity: n, coeffs: v.clone() };
                    self.format_element(&x)
                })
                .collect();
            let action = match &self.component(n).action {
                Action::Trivial => Action::Trivial,
                Action::Sign => Action::Sign,
                Action::Matrices(_) => {
                    let mut mats = Vec::new();
                    for k in 1..n {
                        let mut rows = Vec::new();
                        for v in &bases[n] {
                            let img = self.act_adjacent(&OperadElement { arity: n, coeffs: v.clone() }, k);
                            rows.push(spaces[n].coordinates(&img.coeffs).ok_or_else(|| OperadError::NotClosed {
                                arity: n,
                                detail: format!("not stable under s_{k}"),
                            })?);
                        }
                        mats.push(rows);
                    }
                    Action::Matrices(mats)
                }
            };
            components.push(Component::new(labels, action));
        }
        let identity = spaces[1].coordinates(&self.identity().coeffs).ok_or(OperadError::NotClosed {
            arity: 1,
            detail: "identity not contained".into(),
        })?;
        let mut table: HashMap<CompKey, Vector> = HashMap::new();
        for m in 1..=h {
            for n in 1..=h + 1 - m {
                for (a, va) in bases[m].iter().enumerate() {
                    let x = OperadElement { arity: m, coeffs: va.clone() };
                    for (b, vb) in bases[n].iter().enumerate() {
                        let y = OperadElement { arity: n, coeffs: vb.clone() };
                        for i in 1..=m {
                            let r = self.compose(&x, i, &y)?;
                            let coords = spaces[m + n - 1].coordinates(&r.coeffs).ok_or_else(|| OperadError::NotClosed {
                                arity: m + n - 1,
                                detail: format!("{} ∘_{i} {} = {} leaves the subcollection", self.format_element(&x), self.format_element(&y), self.format_element(&r)),
                            })?;
                            if !linalg::is_zero_vec(&f, &coords) {
                                table.insert((m, a, i, n, b), coords);
                            }
                        }
                    }
                }
            }
        }
        Operad::from_parts(&f, name, components, identity, table)
    }

    /// Keep only the arities selected by `keep` (arity 1 always kept).
    pub fn restrict_arities(&self, keep: impl Fn(usize) -> bool, name: impl Into<String>) -> Result<Operad, OperadError> {
        let f = self.field();
        let spaces: Vec<Subspace> =
            (0..=self.horizon()).map(|n| if n == 1 || (n > 0 && keep(n)) { Subspace::full(f, self.dim(n)) } else { Subspace::new(f, self.dim(n)) }).collect();
        self.restrict_to_subspaces(&spaces, name)
    }

    /// P_{w}: arity 1 cut to span(1_P), arities 2..w-1 zero, arities ≥ w unchanged.
    pub fn truncate(&self, w: usize) -> Result<Operad, OperadError> {
        if w < 2 {
            return Err(OperadError::Malformed("truncation needs w ≥ 2".into()));
        }
        let f = self.field();
        let spaces: Vec<Subspace> = (0..=self.horizon())
            .map(|n| match n {
                1 => Subspace::spanned_by(f, self.dim(1), [self.identity().coeffs]),
                n if n >= w => Subspace::full(f, self.dim(n)),
                _ => Subspace::new(f, self.dim(n)),
            })
            .collect();
        let mut out = self.restrict_to_subspaces(&spaces, format!("{}_{{{w}}}", self.name()))?;
        // keep original labels on unchanged components
        for n in w..=self.horizon() {
            out.components[n].labels = self.component(n).labels.clone();
        }
        Ok(out)
    }

    /// P ⊕ Q componentwise, cross compositions zero, identity (1_P, 1_Q); horizon = min of the two.
    pub fn direct_sum(&self, other: &Operad) -> Result<Operad, OperadError> {
        if self.field() != other.field() {
            return Err(OperadError::FieldMismatch);
        }
        let f = self.field().clone();
        let h = self.horizon().min(other.horizon());
        let mut components = Vec::with_capacity(h + 1);
        for n in 0..=h {
            let (cp, cq) = (self.component(n), other.component(n));
            let labels: Vec<String> =
                cp.labels.iter().map(|l| format!("({l}, 0)")).chain(cq.labels.iter().map(|l| format!("(0, {l})"))).collect();
            let action = match (&cp.action, &cq.action) {
                _ if cq.dim() == 0 => cp.action.clone(),
                _ if cp.dim() == 0 => cq.action.clone(),
                (Action::Trivial, Action::Trivial) => Action::Trivial,
                (Action::Sign, Action::Sign) => Action::Sign,
                _ => {
                    let (dp, dq) = (cp.dim(), cq.dim());
                    let mats = (1..n)
                        .map(|k| {
                            let mut rows: Vec<Vector> = self.action_matrix(n, k).into_iter().map(|mut r| {
                                r.extend(linalg::zero_vec(&f, dq));
                                r
                            }).collect();
                            rows.extend(other.action_matrix(n, k).into_iter().map(|r| {
                                let mut z = linalg::zero_vec(&f, dp);
                                z.extend(r);
                                z
                            }));
                            rows
                        })
                        .collect();
                    Action::Matrices(mats)
                }
            };
            components.push(Component::new(labels, action));
        }
        let mut identity = self.identity().coeffs;
        identity.extend(other.identity().coeffs);
        let mut table = HashMap::new();
        for (&(m, a, i, n, b), v) in self.table() {
            if m + n - 1 <= h {
                let mut w = v.clone();
                w.extend(linalg::zero_vec(&f, other.dim(m + n - 1)));
                table.insert((m, a, i, n, b), w);
            }
        }
        for (&(m, a, i, n, b), v) in other.table() {
            if m + n - 1 <= h {
                let mut w = linalg::zero_vec(&f, self.dim(m + n - 1));
                w.extend(v.iter().cloned());
                table.insert((m, a + self.dim(m), i, n, b + self.dim(n)), w);
            }
        }
        Operad::from_parts(&f, format!("{} ⊕ {}", self.name(), other.name()), components, identity, table)
    }

    /// P_R = P ⊗ R as an operad over the base field k, for a finite extension R of k (k a prime field):
    /// (x⊗r)∗σ = (x∗σ)⊗r, (x⊗r)∘_i(y⊗s) = (x∘_iy)⊗rs, identity 1_P⊗1_R.
    pub fn base_change(&self, ext: &Field) -> Result<Operad, OperadError> {
        let k = self.field();
        if !k.is_prime_field() || ext.prime_field() != *k {
            return Err(OperadError::FieldMismatch);
        }
        let e = ext.degree();
        let h = self.horizon();
        // structure constants of R over k
        let mut rmul: Vec<Vec<Vector>> = vec![vec![Vec::new(); e]; e];
        for (r, row) in rmul.iter_mut().enumerate() {
            for (s, slot) in row.iter_mut().enumerate() {
                *slot = ext.prime_coordinates(&ext.mul(&ext.basis_element(r), &ext.basis_element(s)));
            }
        }
        let mut components = Vec::with_capacity(h + 1);
        for n in 0..=h {
            let c = self.component(n);
            let labels = c
                .labels
                .iter()
                .flat_map(|l| (0..e).map(move |r| (l.clone(), r)))
                .map(|(l, r)| if e == 1 { l } else { format!("{l} ⊗ {}", ext.basis_label(r)) })
                .collect();
            let action = match &c.action {
                Action::Trivial => Action::Trivial,
                Action::Sign => Action::Sign,
                Action::Matrices(ms) => Action::Matrices(
                    ms.iter()
                        .map(|m| {
                            let mut rows = Vec::new();
                            for row in m {
                                for r in 0..e {
                                    let mut v = linalg::zero_vec(k, row.len() * e);
                                    for (j, cj) in row.iter().enumerate() {
                                        v[j * e + r] = cj.clone();
                                    }
                                    rows.push(v);
                                }
                            }
                            rows
                        })
                        .collect(),
                ),
            };
            components.push(Component::new(labels, action));
        }
        let mut identity = linalg::zero_vec(k, self.dim(1) * e);
        for (j, c) in self.identity().coeffs.iter().enumerate() {
            identity[j * e] = c.clone();
        }
        let mut table = HashMap::new();
        for (&(m, a, i, n, b), v) in self.table() {
            let t = m + n - 1;
            for r in 0..e {
                for s in 0..e {
                    let mut w = linalg::zero_vec(k, self.dim(t) * e);
                    for (cidx, cv) in v.iter().enumerate() {
                        if k.is_zero(cv) {
                            continue;
                        }
                        for (q, rq) in rmul[r][s].iter().enumerate() {
                            if !k.is_zero(rq) {
                                w[cidx * e + q] = k.add(&w[cidx * e + q], &k.mul(cv, rq));
                            }
                        }
                    }
                    if !linalg::is_zero_vec(k, &w) {
                        table.insert((m, a * e + r, i, n, b * e + s), w);
                    }
                }
            }
        }
        Operad::from_parts(k, format!("{} ⊗ {}", self.name(), ext), components, identity, table)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{check_axioms, fixtures::associative, mu_label};
    use super::*;
    use crate::scalars::prime_power_descriptor;

    fn com(field: &Field, h: usize) -> Operad {
        let comps = (0..=h).map(|n| if n == 0 { Component::zero() } else { Component::new(vec![mu_label(n)], Action::Trivial) }).collect();
        Operad::from_fn(field, "Com", comps, vec![field.one()], |_, _, _, _, _| vec![field.one()]).unwrap()
    }

    #[test]
    fn truncation_shapes() {
        let q = Field::rationals();
        let p = com(&q, 9).truncate(3).unwrap();
        assert_eq!(p.hilbert_series().coeffs(), &[0, 1, 0, 1, 1, 1, 1, 1, 1, 1]);
        assert!(check_axioms(&p, 9).passed);
        assert_eq!(p.label(5, 0), "mu_5");
    }

    #[test]
    fn sums_and_base_change_keep_axioms() {
        let q = Field::rationals();
        let a = associative(&q, 4);
        let s = com(&q, 5).direct_sum(&a).unwrap();
        assert_eq!(s.horizon(), 4);
        assert_eq!(s.dim(3), 7);
        assert!(check_axioms(&s, 4).passed);

        let f2 = Field::prime(2).unwrap();
        let f4 = Field::new(&prime_power_descriptor(4).unwrap()).unwrap();
        let b = com(&f2, 6).base_change(&f4).unwrap();
        assert_eq!(b.dim(5), 2);
        assert!(check_axioms(&b, 6).passed);
        let ab = associative(&f2, 4).base_change(&f4).unwrap();
        assert!(check_axioms(&ab, 4).passed);
    }

    #[test]
    fn non_closed_restriction_rejected() {
        let q = Field::rationals();
        let p = com(&q, 6);
        // arity 2 but not arity 3 is not closed (μ_2∘μ_2 = μ_3)
        assert!(matches!(p.restrict_arities(|n| n != 3, "bad"), Err(OperadError::NotClosed { arity: 3, .. })));
        assert!(p.restrict_arities(|n| n % 2 == 1, "odd").is_ok());
    }
}
