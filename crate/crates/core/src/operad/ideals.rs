use rayon::prelude::*;
use serde::Serialize;

use super::{Operad, OperadElement};
use crate::linalg::{Subspace, Vector};

/// Dimension above which `prime_at_horizon` refuses to search.
pub const DEFAULT_PRIME_DIM_CAP: usize = 64;

/// An arity-indexed family of subspaces, closed (up to the horizon) under the action and
/// under composition with arbitrary elements on both sides.
#[derive(Clone, Debug)]
pub struct IdealAtHorizon {
    pub horizon: usize,
    spaces: Vec<Subspace>,
}

impl IdealAtHorizon {
    pub fn dim(&self, arity: usize) -> usize {
        self.spaces.get(arity).map_or(0, Subspace::dim)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(Subspace::dim).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.spaces.iter().all(Subspace::is_zero)
    }

    pub fn basis(&self, arity: usize) -> &[Vector] {
        self.spaces[arity].basis()
    }

    pub fn space(&self, arity: usize) -> &Subspace {
        &self.spaces[arity]
    }

    pub fn contains_element(&self, x: &OperadElement) -> bool {
        self.spaces.get(x.arity).is_some_and(|s| s.contains(&x.coeffs))
    }

    /// self ⊆ other at every arity
    pub fn is_contained_in(&self, other: &IdealAtHorizon) -> bool {
        self.spaces.iter().zip(&other.spaces).all(|(a, b)| b.contains_subspace(a))
    }
}

/// Insert a batch of candidate vectors, returning those that enlarged their subspace (in order).
fn absorb(spaces: &mut [Subspace], batch: Vec<OperadElement>) -> Vec<OperadElement> {
    let mut fresh = Vec::new();
    for x in batch {
        if spaces[x.arity].insert(x.coeffs.clone()) {
            fresh.push(x);
        }
    }
    fresh
}

fn action_images(p: &Operad, x: &OperadElement) -> Vec<OperadElement> {
    (1..x.arity).map(|k| p.act_adjacent(x, k)).collect()
}

fn composition_images(p: &Operad, x: &OperadElement, h: usize) -> Vec<OperadElement> {
    let mut out = Vec::new();
    let n = x.arity;
    for m in 1..=h + 1 - n {
        for b in 0..p.dim(m) {
            let y = p.basis_element(m, b);
            for i in 1..=m {
                out.push(p.compose(&y, i, x).expect("within horizon"));
            }
            for j in 1..=n {
                out.push(p.compose(x, j, &y).expect("within horizon"));
            }
        }
    }
    out
}

fn saturate(p: &Operad, h: usize, seeds: Vec<OperadElement>, two_sided: bool) -> IdealAtHorizon {
    let f = p.field();
    let mut spaces: Vec<Subspace> = (0..=h).map(|n| Subspace::new(f, p.dim(n))).collect();
    let seeds: Vec<OperadElement> = seeds.into_iter().filter(|x| x.arity >= 1 && x.arity <= h).collect();
    let mut frontier = absorb(&mut spaces, seeds);
    while !frontier.is_empty() {
        let batch: Vec<OperadElement> = frontier
            .par_iter()
            .flat_map_iter(|x| {
                let mut imgs = action_images(p, x);
                if two_sided {
                    imgs.extend(composition_images(p, x, h));
                }
                imgs
            })
            .collect();
        frontier = absorb(&mut spaces, batch);
    }
    IdealAtHorizon { horizon: h, spaces }
}

/// Smallest ideal (at the horizon) containing the generators.
pub fn ideal_generated_by(p: &Operad, gens: &[OperadElement], horizon: usize) -> IdealAtHorizon {
    saturate(p, horizon.min(p.horizon()), gens.to_vec(), true)
}

/// I∘J: the S-submodule spanned by all x∘_i y, x ∈ I, y ∈ J.
pub fn ideal_product(p: &Operad, i_ideal: &IdealAtHorizon, j_ideal: &IdealAtHorizon, horizon: usize) -> IdealAtHorizon {
    let h = horizon.min(i_ideal.horizon).min(j_ideal.horizon);
    let mut seeds = Vec::new();
    for m in 1..=h {
        for xa in i_ideal.basis(m) {
            let x = OperadElement { arity: m, coeffs: xa.clone() };
            for n in 1..=h + 1 - m {
                for yb in j_ideal.basis(n) {
                    let y = OperadElement { arity: n, coeffs: yb.clone() };
                    for i in 1..=m {
                        seeds.push(p.compose(&x, i, &y).expect("within horizon"));
                    }
                }
            }
        }
    }
    saturate(p, h, seeds, false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PrimeVerdict {
    /// No annihilating pair among the candidate ideals — a necessary condition only.
    NoViolationFound { horizon: usize, ideals_tried: usize, pairs_checked: usize },
    /// Nonzero ideals I = (left), J = (right) with I∘J = 0 at the horizon.
    Witness { horizon: usize, left_generator: String, right_generator: String, left_dims: Vec<usize>, right_dims: Vec<usize> },
    Inconclusive { reason: String },
}

impl PrimeVerdict {
    pub fn has_witness(&self) -> bool {
        matches!(self, PrimeVerdict::Witness { .. })
    }
}

/// Search for nonzero ideals I, J with I∘J = 0 (and lowest arities a, b with a + b − 1 ≤ horizon) among ideals generated by single basis elements and,
/// for components of dimension ≤ 3, by sums of basis elements over every subset.
pub fn prime_at_horizon(p: &Operad, horizon: usize, dim_cap: usize) -> PrimeVerdict {
    let h = horizon.min(p.horizon());
    let f = p.field();
    if let Some(n) = (1..=h).find(|&n| p.dim(n) > dim_cap) {
        return PrimeVerdict::Inconclusive { reason: format!("inconclusive: too large (dim P({n}) = {} exceeds the cap {dim_cap})", p.dim(n)) };
    }
    let mut gens = Vec::new();
    for n in 1..=h {
        let d = p.dim(n);
        for a in 0..d {
            gens.push(p.basis_element(n, a));
        }
        if d <= 3 {
            for mask in 1usize..(1 << d) {
                if mask.count_ones() >= 2 {
                    let coeffs = (0..d).map(|a| if mask >> a & 1 == 1 { f.one() } else { f.zero() }).collect();
                    gens.push(OperadElement { arity: n, coeffs });
                }
            }
        }
    }
    let ideals: Vec<IdealAtHorizon> = gens.par_iter().map(|g| ideal_generated_by(p, std::slice::from_ref(g), h)).collect();
    // a pair only says something when its lowest arities compose inside the horizon;
    // otherwise I∘J vanishes for truncation reasons alone
    let low: Vec<Option<usize>> = ideals.iter().map(|i| (1..=h).find(|&n| i.dim(n) > 0)).collect();
    let pairs: Vec<(usize, usize)> = (0..ideals.len())
        .flat_map(|a| (0..ideals.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| matches!((low[a], low[b]), (Some(x), Some(y)) if x + y - 1 <= h))
        .collect();
    let hit = pairs.par_iter().find_first(|&&(a, b)| ideal_product(p, &ideals[a], &ideals[b], h).is_zero());
    match hit {
        Some(&(a, b)) => PrimeVerdict::Witness {
            horizon: h,
            left_generator: p.format_element(&gens[a]),
            right_generator: p.format_element(&gens[b]),
            left_dims: ideals[a].dims(),
            right_dims: ideals[b].dims(),
        },
        None => PrimeVerdict::NoViolationFound { horizon: h, ideals_tried: ideals.len(), pairs_checked: pairs.len() },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralVerdict {
    pub horizon: usize,
    pub central_at_horizon: bool,
    pub checked: usize,
    /// "x ∘_i ν ≠ ν ∘_j x" for the first failing basis element ν
    pub witness: Option<String>,
}

/// x∘_iν = ν∘_jx for every basis element ν with Ar(x)+Ar(ν)-1 ≤ horizon and all slots i, j.
pub fn is_central(p: &Operad, x: &OperadElement, horizon: usize) -> CentralVerdict {
    let h = horizon.min(p.horizon());
    let mut checked = 0;
    if x.arity >= 1 && x.arity <= h {
        for n in 1..=h + 1 - x.arity {
            for b in 0..p.dim(n) {
                let nu = p.basis_element(n, b);
                for i in 1..=x.arity {
                    let lhs = p.compose(x, i, &nu).expect("within horizon");
                    for j in 1..=n {
                        checked += 1;
                        let rhs = p.compose(&nu, j, x).expect("within horizon");
                        if lhs != rhs {
                            return CentralVerdict {
                                horizon: h,
                                central_at_horizon: false,
                                checked,
                                witness: Some(format!(
                                    "x ∘_{i} {} = {} but {} ∘_{j} x = {}",
                                    p.label(n, b),
                                    p.format_element(&lhs),
                                    p.label(n, b),
                                    p.format_element(&rhs)
                                )),
                            };
                        }
                    }
                }
            }
        }
    }
    CentralVerdict { horizon: h, central_at_horizon: true, checked, witness: None }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Triviality {
    Zero,
    /// every element fixed by S_n
    STrivial,
    /// S_n acts by the sign
    SSigned,
    /// fixed by A_n but not of the two kinds above
    ATrivialOnly,
    None,
}

/// Classify the action on P(n) from the generators s_k and the 3-cycles s_k s_{k+1}.
pub fn classify_triviality(p: &Operad, n: usize) -> Triviality {
    let f = p.field();
    let d = p.dim(n);
    if d == 0 {
        return Triviality::Zero;
    }
    let basis: Vec<OperadElement> = (0..d).map(|a| p.basis_element(n, a)).collect();
    let all_gens = |pred: &dyn Fn(&OperadElement, &OperadElement) -> bool| (1..n).all(|k| basis.iter().all(|x| pred(x, &p.act_adjacent(x, k))));
    if all_gens(&|x, y| x == y) {
        return Triviality::STrivial;
    }
    if all_gens(&|x, y| y.coeffs == x.coeffs.iter().map(|c| f.neg(c)).collect::<Vec<_>>()) {
        return Triviality::SSigned;
    }
    let a_trivial = (1..n.saturating_sub(1)).all(|k| basis.iter().all(|x| p.act_adjacent(&p.act_adjacent(x, k), k + 1) == *x));
    if a_trivial {
        Triviality::ATrivialOnly
    } else {
        Triviality::None
    }
}

/// Coefficient vectors of an ideal at one arity, as formatted elements.
pub fn describe_basis(p: &Operad, ideal: &IdealAtHorizon, arity: usize) -> Vec<String> {
    ideal.basis(arity).iter().map(|v| p.format_element(&OperadElement { arity, coeffs: v.clone() })).collect()
}
