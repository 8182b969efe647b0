use std::collections::HashMap;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use super::{AlgebraError, GradedAlgebra, Parity};
use crate::linalg::{self, Vector};
use crate::scalars::{Field, FieldDescriptor};

const WORD_CAP: usize = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: usize,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<Parity>,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: usize) -> Generator {
        Generator { name: name.into(), degree, parity: None }
    }
}

/// Supported monomial relation families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    /// x_i² = 0 for every generator.
    Square,
    /// x_s·u·x_s = 0 whenever every letter of u has smaller index than s (u may be empty).
    NestedRepeat,
    /// All generators commute.
    Commute,
}

/// JSON presentation: generators with degrees and a rule set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresentationFile {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub field: FieldDescriptor,
    pub horizon: usize,
    pub generators: Vec<Generator>,
    pub rules: Vec<serde_json::Value>,
}

fn default_schema() -> u32 {
    1
}

/// Monomial algebra whose basis is the set of normal words (words avoiding all rule patterns).
/// With `Commute`, words are stored as nondecreasing index sequences.
#[derive(Debug)]
pub struct NormalWordAlgebra {
    field: Field,
    generators: Vec<Generator>,
    rules: Vec<Rule>,
    horizon: usize,
    commutative: bool,
    square_free: bool,
    nested: bool,
    words: Vec<Vec<Vec<usize>>>,
    index: HashMap<Vec<usize>, usize>,
    counts: RwLock<HashMap<(usize, usize), u64>>,
}

impl NormalWordAlgebra {
    pub fn new(field: &Field, generators: Vec<Generator>, rules: &[Rule], horizon: usize) -> Result<NormalWordAlgebra, AlgebraError> {
        if let Some(g) = generators.iter().find(|g| g.degree == 0) {
            return Err(AlgebraError::Parse(format!("generator {} has degree 0", g.name)));
        }
        let commutative = rules.contains(&Rule::Commute);
        let nested = rules.contains(&Rule::NestedRepeat);
        // in a commutative algebra x_s u x_s = x_s² u, so the nested rule reduces to squares
        let square_free = rules.contains(&Rule::Square) || (commutative && nested);
        let mut a = NormalWordAlgebra {
            field: field.clone(),
            generators,
            rules: rules.to_vec(),
            horizon,
            commutative,
            square_free,
            nested: nested && !commutative,
            words: vec![Vec::new(); horizon + 1],
            index: HashMap::new(),
            counts: RwLock::new(HashMap::new()),
        };
        let mut buckets: Vec<Vec<Vec<usize>>> = vec![Vec::new(); horizon + 1];
        let mut total = 0usize;
        let mut word = Vec::new();
        a.enumerate(&mut word, 0, a.generators.len(), horizon, &mut |w, d| {
            total += 1;
            buckets[d].push(w.to_vec());
            total <= WORD_CAP
        })?;
        for b in buckets.iter_mut() {
            b.sort();
        }
        for b in &buckets {
            for (i, w) in b.iter().enumerate() {
                a.index.insert(w.clone(), i);
            }
        }
        a.words = buckets;
        Ok(a)
    }

    pub fn from_file(file: &PresentationFile) -> Result<NormalWordAlgebra, AlgebraError> {
        let field = Field::new(&file.field)?;
        let rules = file
            .rules
            .iter()
            .map(|v| serde_json::from_value::<Rule>(v.clone()).map_err(|_| AlgebraError::UnsupportedRule(v.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        NormalWordAlgebra::new(&field, file.generators.clone(), &rules, file.horizon)
    }

    /// Generators x_0, x_1, .. with deg x_i = 2^i (as many as fit under the horizon), x_i² = 0, commutative.
    pub fn binary_squarefree(field: &Field, horizon: usize) -> NormalWordAlgebra {
        let mut gens = Vec::new();
        let mut d = 1usize;
        while d <= horizon.max(1) {
            gens.push(Generator::new(format!("x{}", gens.len()), d));
            d *= 2;
        }
        NormalWordAlgebra::new(field, gens, &[Rule::Commute, Rule::Square], horizon).expect("small basis")
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    /// Normal words of a degree, as index sequences, in basis order.
    pub fn words(&self, degree: usize) -> &[Vec<usize>] {
        self.words.get(degree).map_or(&[], Vec::as_slice)
    }

    pub fn word_degree(&self, w: &[usize]) -> usize {
        w.iter().map(|&g| self.generators[g].degree).sum()
    }

    pub fn word_label(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut out = String::new();
        let mut k = 0;
        while k < w.len() {
            let mut r = 1;
            while k + r < w.len() && w[k + r] == w[k] {
                r += 1;
            }
            out.push_str(&self.generators[w[k]].name);
            if r > 1 {
                out.push_str(&format!("^{r}"));
            }
            k += r;
        }
        out
    }

    /// Normal-form test for an arbitrary word (in stored orientation for commutative algebras).
    pub fn is_normal(&self, w: &[usize]) -> bool {
        if self.commutative && w.windows(2).any(|p| p[0] > p[1]) {
            return false;
        }
        if self.square_free && w.windows(2).any(|p| p[0] == p[1]) {
            return false;
        }
        if self.nested {
            for q in 0..w.len() {
                if self.nested_violation_ending_at(w, q) {
                    return false;
                }
            }
        }
        true
    }

    /// Does a pattern x_s u x_s (u over indices < s) end at position q?
    fn nested_violation_ending_at(&self, w: &[usize], q: usize) -> bool {
        let s = w[q];
        for p in (0..q).rev() {
            if w[p] >= s {
                return w[p] == s;
            }
        }
        false
    }

    /// Can `g` be appended to a normal word while staying normal?
    fn may_append(&self, w: &[usize], g: usize) -> bool {
        if let Some(&last) = w.last() {
            if self.commutative && g < last {
                return false;
            }
            if self.square_free && g == last {
                return false;
            }
        }
        if self.nested {
            for p in (0..w.len()).rev() {
                if w[p] >= g {
                    return w[p] != g;
                }
            }
        }
        true
    }

    /// DFS over normal words with letters < bound and degree ≤ max_degree; the callback returns false to abort.
    fn enumerate(
        &self,
        word: &mut Vec<usize>,
        degree: usize,
        bound: usize,
        max_degree: usize,
        visit: &mut dyn FnMut(&[usize], usize) -> bool,
    ) -> Result<(), AlgebraError> {
        if !visit(word, degree) {
            return Err(AlgebraError::TooLarge(format!("more than {WORD_CAP} normal words")));
        }
        for g in 0..bound {
            let d = degree + self.generators[g].degree;
            if d > max_degree || !self.may_append(word, g) {
                continue;
            }
            word.push(g);
            let r = self.enumerate(word, d, bound, max_degree, visit);
            word.pop();
            r?;
        }
        Ok(())
    }

    /// Number of normal words of a degree using only the first `bound` generators (memoized).
    pub fn count_words(&self, bound: usize, degree: usize) -> u64 {
        let bound = bound.min(self.generators.len());
        if let Some(&c) = self.counts.read().expect("lock").get(&(bound, degree)) {
            return c;
        }
        let c = if degree <= self.horizon && bound == self.generators.len() {
            self.words[degree].len() as u64
        } else {
            let mut n = 0u64;
            let mut word = Vec::new();
            self.enumerate(&mut word, 0, bound, degree, &mut |_, d| {
                if d == degree {
                    n += 1;
                }
                true
            })
            .expect("unbounded counter");
            n
        };
        self.counts.write().expect("lock").insert((bound, degree), c);
        c
    }

    /// All normal words over the first `bound` generators, with no degree cap.
    /// Only finite when the rule set forces it (e.g. the nested-repeat rule); `limit` guards runaway enumeration.
    pub fn all_words(&self, bound: usize, limit: usize) -> Result<Vec<Vec<usize>>, AlgebraError> {
        let bound = bound.min(self.generators.len());
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut word = Vec::new();
        let total_degree: usize = usize::MAX / 2;
        self.enumerate(&mut word, 0, bound, total_degree, &mut |w, _| {
            if out.len() >= limit {
                return false;
            }
            out.push(w.to_vec());
            true
        })
        .map_err(|_| AlgebraError::TooLarge(format!("more than {limit} normal words")))?;
        out.sort_by_key(|w| (self.word_degree(w), w.clone()));
        Ok(out)
    }

    /// Same presentation restricted to the first `s` generators.
    pub fn restrict(&self, s: usize) -> Result<NormalWordAlgebra, AlgebraError> {
        NormalWordAlgebra::new(&self.field, self.generators[..s.min(self.generators.len())].to_vec(), &self.rules, self.horizon)
    }

    /// Quotient by the ideal generated by some generators: for a monomial algebra this just drops them.
    pub fn quotient_by_generators(&self, drop: &[usize]) -> Result<NormalWordAlgebra, AlgebraError> {
        let gens = self.generators.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, g)| g.clone()).collect();
        NormalWordAlgebra::new(&self.field, gens, &self.rules, self.horizon)
    }

    /// Product of two words, reduced to a normal word or None (zero).
    pub fn multiply_words(&self, u: &[usize], v: &[usize]) -> Option<Vec<usize>> {
        let w = if self.commutative {
            let mut w = [u, v].concat();
            w.sort_unstable();
            w
        } else {
            [u, v].concat()
        };
        self.is_normal(&w).then_some(w)
    }

    pub fn to_file(&self) -> PresentationFile {
        PresentationFile {
            schema_version: 1,
            field: self.field.descriptor().clone(),
            horizon: self.horizon,
            generators: self.generators.clone(),
            rules: self.rules.iter().map(|r| serde_json::to_value(r).expect("serializable")).collect(),
        }
    }
}

impl GradedAlgebra for NormalWordAlgebra {
    fn field(&self) -> &Field {
        &self.field
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn dim(&self, degree: usize) -> usize {
        self.words(degree).len()
    }
    fn label(&self, degree: usize, index: usize) -> String {
        self.word_label(&self.words[degree][index])
    }
    fn mul_basis(&self, d1: usize, i1: usize, d2: usize, i2: usize) -> Vector {
        let d = d1 + d2;
        let mut v = linalg::zero_vec(&self.field, self.dim(d));
        if let Some(w) = self.multiply_words(&self.words[d1][i1], &self.words[d2][i2]) {
            v[self.index[&w]] = self.field.one();
        }
        v
    }
    fn unit(&self) -> Vector {
        vec![self.field.one()]
    }
    fn parity(&self, degree: usize, index: usize) -> Option<Parity> {
        let w = self.words.get(degree)?.get(index)?;
        let first = self.generators[*w.first()?].parity?;
        w.iter().all(|&g| self.generators[g].parity == Some(first)).then_some(first)
    }
    fn name(&self) -> String {
        "normal-word algebra".into()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{cancellation_check, check_associativity, hilbert_series, saturation_condition_check, torsion_elements, basis_element, Side};
    use super::*;

    #[test]
    fn two_commuting_squarefree_generators() {
        let q = Field::rationals();
        let a = NormalWordAlgebra::new(&q, vec![Generator::new("x0", 1), Generator::new("x1", 2)], &[Rule::Commute, Rule::Square], 8).unwrap();
        assert_eq!(hilbert_series(&a).coeffs(), &[1, 1, 1, 1, 0, 0, 0, 0, 0]);
        assert!(check_associativity(&a, 8).is_empty());
    }

    #[test]
    fn nested_rule_one_generator() {
        let q = Field::rationals();
        let a = NormalWordAlgebra::new(&q, vec![Generator::new("x1", 1)], &[Rule::NestedRepeat], 5).unwrap();
        assert_eq!(a.all_words(1, 100).unwrap(), vec![vec![], vec![0]]);
        let b = NormalWordAlgebra::new(&q, vec![Generator::new("x1", 1), Generator::new("x2", 3)], &[Rule::NestedRepeat], 10).unwrap();
        // 1, x1, x2, x1x2, x2x1, x1x2x1
        assert_eq!(b.all_words(2, 100).unwrap().len(), 6);
        assert!(!b.is_normal(&[1, 0, 1]));
        assert!(b.is_normal(&[0, 1, 0]));
        assert!(check_associativity(&b, 10).is_empty());
    }

    #[test]
    fn binary_squarefree_is_one_dimensional() {
        let q = Field::rationals();
        let a = NormalWordAlgebra::binary_squarefree(&q, 512);
        assert!(hilbert_series(&a).coeffs().iter().all(|&c| c == 1));
        assert_eq!(a.word_label(&a.words(11)[0]), "x0x1x3");
        let small = NormalWordAlgebra::binary_squarefree(&q, 128);
        assert!(torsion_elements(&small, Side::Right, 128, None).torsion_free());
        for l in 0..=5 {
            let x = basis_element(&small, 1 << l, 0);
            assert!(cancellation_check(&small, &x, (1 << l) - 1).unwrap().passed);
            assert!(!cancellation_check(&small, &x, 1 << l).unwrap().passed);
        }
        let alphas: Vec<_> = (1..=6).map(|t| basis_element(&small, 1 << t, 0)).collect();
        let rep = saturation_condition_check(&small, &alphas, 1).unwrap();
        assert!(rep.passed);
    }

    #[test]
    fn unknown_rule_rejected() {
        let f = PresentationFile {
            schema_version: 1,
            field: FieldDescriptor::rationals(),
            horizon: 4,
            generators: vec![Generator::new("x", 1)],
            rules: vec![serde_json::json!({"kind": "groebner"})],
        };
        assert!(matches!(NormalWordAlgebra::from_file(&f), Err(AlgebraError::UnsupportedRule(_))));
    }
}
