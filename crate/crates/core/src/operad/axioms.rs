use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{Operad, OperadElement};
use crate::symmetry::{inflate_inner, inflate_outer, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// θ ∘_i 1 = θ
    IdentityRight,
    /// 1 ∘_1 θ = θ
    IdentityLeft,
    /// (λ∘_iμ)∘_{i-1+j}ν = λ∘_i(μ∘_jν)
    Sequential,
    /// (λ∘_iμ)∘_{k-1+m}ν = (λ∘_kν)∘_iμ, i < k
    Parallel,
    /// μ∘_i(ν∗σ) = (μ∘_iν)∗σ'
    EquivarianceInner,
    /// (μ∗φ)∘_iν = (μ∘_{φ(i)}ν)∗φ''
    EquivarianceOuter,
    /// s_k² = 1, braid and commutation relations of the generator actions
    CoxeterRelations,
    /// (x∗σ)∗τ = x∗(στ) over the whole group (small arities)
    FullGroupAction,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    /// arities of λ, μ, ν (as many as the axiom involves)
    pub arities: Vec<usize>,
    /// basis indices (0-based) matching `arities`
    pub basis: Vec<usize>,
    /// slots i (and k / j where present)
    pub slots: Vec<usize>,
    /// the permutation involved, if any
    pub permutation: Option<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub horizon: usize,
    pub passed: bool,
    /// instances checked per axiom
    pub checked: BTreeMap<Axiom, u64>,
    pub violation_count: usize,
    /// the first violations in instance order
    pub violations: Vec<AxiomViolation>,
}

const MAX_REPORTED: usize = 50;
const FULL_GROUP_ARITY: usize = 4;

#[derive(Clone, Copy)]
enum Job {
    Identity(usize),
    Sequential(usize, usize, usize),
    Parallel(usize, usize, usize),
    Equivariance(usize, usize),
    Coxeter(usize),
    FullGroup(usize),
}

struct Ctx<'a> {
    p: &'a Operad,
    found: Vec<AxiomViolation>,
    checked: BTreeMap<Axiom, u64>,
}

impl Ctx<'_> {
    fn tally(&mut self, axiom: Axiom) {
        *self.checked.entry(axiom).or_default() += 1;
    }

    fn compare(&mut self, axiom: Axiom, lhs: &OperadElement, rhs: &OperadElement, what: impl FnOnce() -> AxiomViolation) {
        self.tally(axiom);
        if lhs.coeffs != rhs.coeffs {
            let mut v = what();
            v.axiom = axiom;
            v.detail = format!("{} ≠ {}", self.p.format_element(lhs), self.p.format_element(rhs));
            self.found.push(v);
        }
    }
}

fn violation(arities: &[usize], basis: &[usize], slots: &[usize], permutation: Option<&Permutation>) -> AxiomViolation {
    AxiomViolation {
        axiom: Axiom::Sequential,
        arities: arities.to_vec(),
        basis: basis.to_vec(),
        slots: slots.to_vec(),
        permutation: permutation.map(|p| p.to_cycle_string()),
        detail: String::new(),
    }
}

fn run_job(p: &Operad, job: Job) -> Ctx<'_> {
    let mut cx = Ctx { p, found: Vec::new(), checked: BTreeMap::new() };
    let c = |x: &OperadElement, i: usize, y: &OperadElement| p.compose(x, i, y).expect("arity within horizon");
    let e = |n: usize, a: usize| p.basis_element(n, a);
    match job {
        Job::Identity(n) => {
            let one = p.identity();
            for a in 0..p.dim(n) {
                let x = e(n, a);
                for i in 1..=n {
                    cx.compare(Axiom::IdentityRight, &c(&x, i, &one), &x, || violation(&[n], &[a], &[i], None));
                }
                cx.compare(Axiom::IdentityLeft, &c(&one, 1, &x), &x, || violation(&[n], &[a], &[1], None));
            }
        }
        Job::Sequential(l, m, n) => {
            for la in 0..p.dim(l) {
                let lam = e(l, la);
                for ma in 0..p.dim(m) {
                    let mu = e(m, ma);
                    for na in 0..p.dim(n) {
                        let nu = e(n, na);
                        for j in 1..=m {
                            let mn = c(&mu, j, &nu);
                            for i in 1..=l {
                                let lhs = c(&c(&lam, i, &mu), i - 1 + j, &nu);
                                let rhs = c(&lam, i, &mn);
                                cx.compare(Axiom::Sequential, &lhs, &rhs, || violation(&[l, m, n], &[la, ma, na], &[i, j], None));
                            }
                        }
                    }
                }
            }
        }
        Job::Parallel(l, m, n) => {
            for la in 0..p.dim(l) {
                let lam = e(l, la);
                for ma in 0..p.dim(m) {
                    let mu = e(m, ma);
                    for na in 0..p.dim(n) {
                        let nu = e(n, na);
                        for i in 1..=l {
                            let lm = c(&lam, i, &mu);
                            for k in i + 1..=l {
                                let lhs = c(&lm, k - 1 + m, &nu);
                                let rhs = c(&c(&lam, k, &nu), i, &mu);
                                cx.compare(Axiom::Parallel, &lhs, &rhs, || violation(&[l, m, n], &[la, ma, na], &[i, k], None));
                            }
                        }
                    }
                }
            }
        }
        Job::Equivariance(m, n) => {
            for ma in 0..p.dim(m) {
                let mu = e(m, ma);
                for na in 0..p.dim(n) {
                    let nu = e(n, na);
                    for i in 1..=m {
                        let base = c(&mu, i, &nu);
                        for k in 1..n {
                            let s = Permutation::adjacent(n, k).expect("valid generator");
                            let lhs = c(&mu, i, &p.act_adjacent(&nu, k));
                            let rhs = p.act(&base, &inflate_inner(m, i, &s).expect("valid block")).expect("arity matches");
                            cx.compare(Axiom::EquivarianceInner, &lhs, &rhs, || violation(&[m, n], &[ma, na], &[i], Some(&s)));
                        }
                        for k in 1..m {
                            let s = Permutation::adjacent(m, k).expect("valid generator");
                            let lhs = c(&p.act_adjacent(&mu, k), i, &nu);
                            let rhs = p.act(&c(&mu, s.apply(i), &nu), &inflate_outer(&s, i, n).expect("valid block")).expect("arity matches");
                            cx.compare(Axiom::EquivarianceOuter, &lhs, &rhs, || violation(&[m, n], &[ma, na], &[i], Some(&s)));
                        }
                    }
                }
            }
        }
        Job::Coxeter(n) => {
            for a in 0..p.dim(n) {
                let x = e(n, a);
                let s = |y: &OperadElement, k: usize| p.act_adjacent(y, k);
                for k in 1..n {
                    cx.compare(Axiom::CoxeterRelations, &s(&s(&x, k), k), &x, || violation(&[n], &[a], &[k], None));
                    if k + 1 < n {
                        let lhs = s(&s(&s(&x, k), k + 1), k);
                        let rhs = s(&s(&s(&x, k + 1), k), k + 1);
                        cx.compare(Axiom::CoxeterRelations, &lhs, &rhs, || violation(&[n], &[a], &[k, k + 1], None));
                    }
                    for j in k + 2..n {
                        let lhs = s(&s(&x, k), j);
                        let rhs = s(&s(&x, j), k);
                        cx.compare(Axiom::CoxeterRelations, &lhs, &rhs, || violation(&[n], &[a], &[k, j], None));
                    }
                }
            }
        }
        Job::FullGroup(n) => {
            let perms = Permutation::all(n);
            for a in 0..p.dim(n) {
                let x = e(n, a);
                for s in &perms {
                    let xs = p.act(&x, s).expect("arity matches");
                    for t in &perms {
                        let lhs = p.act(&xs, t).expect("arity matches");
                        let st = s.compose(t);
                        let rhs = p.act(&x, &st).expect("arity matches");
                        cx.compare(Axiom::FullGroupAction, &lhs, &rhs, || violation(&[n], &[a], &[], Some(&st)));
                    }
                }
            }
        }
    }
    cx
}

/// Exhaustive check of the operad axioms on basis elements with every arity involved ≤ horizon:
/// identity laws, sequential and parallel associativity, equivariance for adjacent transpositions,
/// Coxeter relations of the generator actions, and a full-group cross-check at arities ≤ 4.
pub fn check_axioms(p: &Operad, horizon: usize) -> AxiomReport {
    let h = horizon.min(p.horizon());
    let mut jobs = Vec::new();
    for n in 1..=h {
        jobs.push(Job::Identity(n));
        jobs.push(Job::Coxeter(n));
        if n <= FULL_GROUP_ARITY {
            jobs.push(Job::FullGroup(n));
        }
    }
    for l in 1..=h {
        for m in 1..=h {
            for n in 1..=h {
                if l + m + n - 2 <= h {
                    jobs.push(Job::Sequential(l, m, n));
                    if l >= 2 {
                        jobs.push(Job::Parallel(l, m, n));
                    }
                }
            }
        }
    }
    for m in 1..=h {
        for n in 1..=h + 1 - m {
            jobs.push(Job::Equivariance(m, n));
        }
    }
    let results: Vec<(Vec<AxiomViolation>, BTreeMap<Axiom, u64>)> = jobs
        .par_iter()
        .map(|&j| {
            let cx = run_job(p, j);
            (cx.found, cx.checked)
        })
        .collect();
    let mut checked: BTreeMap<Axiom, u64> = BTreeMap::new();
    let mut violations = Vec::new();
    for (v, c) in results {
        violations.extend(v);
        for (k, n) in c {
            *checked.entry(k).or_default() += n;
        }
    }
    violations.sort();
    let violation_count = violations.len();
    violations.truncate(MAX_REPORTED);
    AxiomReport { horizon: h, passed: violation_count == 0, checked, violation_count, violations }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::associative;
    use super::*;
    use crate::scalars::Field;

    #[test]
    fn associative_operad_satisfies_axioms() {
        let q = Field::rationals();
        let p = associative(&q, 5);
        let rep = check_axioms(&p, 5);
        assert!(rep.passed, "{:?}", rep.violations.first());
        assert!(rep.checked[&Axiom::EquivarianceOuter] > 0);
    }

    #[test]
    fn wrong_action_convention_is_caught() {
        // μ_w ∗ σ = μ_{σ∘w} is a left action in disguise; the checker must reject it
        let q = Field::rationals();
        let p = associative(&q, 4);
        let comps: Vec<_> = p
            .components()
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n == 0 {
                    return c.clone();
                }
                // replace s_k by s_{n-k}: conjugation by the longest element, not an operad automorphism
                let mats = (1..n).map(|k| p.action_matrix(n, n - k)).collect();
                super::super::Component::new(c.labels.clone(), super::super::Action::Matrices(mats))
            })
            .collect();
        let table = p.table().clone();
        let bad = Operad::from_parts(&q, "bad", comps, p.identity().coeffs, table).unwrap();
        assert!(!check_axioms(&bad, 4).passed);
    }
}
