//! Permutations of {1..n}, signs, adjacent-transposition words, and the block
//! permutations that appear in the equivariance axioms.
//!
//! Conventions. Letters are 1-based at the API boundary and 0-based inside.
//! The product `σ.compose(τ)` is the map k ↦ σ(τ(k)). Operads act on the right:
//! (μ∗σ)(a_1..a_n) = μ(a_{σ⁻¹(1)}, .., a_{σ⁻¹(n)}), so (μ∗σ)∗τ = μ∗(στ).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("image list is not a permutation of 1..{0}")]
    NotBijective(usize),
    #[error("letter {letter} out of range 1..{n}")]
    OutOfRange { letter: usize, n: usize },
    #[error("block index {index} out of range 1..{m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("cannot parse permutation {0:?}")]
    Parse(String),
}

/// A bijection of {1..n}.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = PermError;
    fn try_from(v: Vec<usize>) -> Result<Self, PermError> {
        Permutation::from_images(&v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.images()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycle_string())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycle_string())
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation { images: (0..n).collect() }
    }

    /// From 1-based images: `images[k-1] = σ(k)`.
    pub fn from_images(images: &[usize]) -> Result<Permutation, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &x in images {
            if x == 0 || x > n || seen[x - 1] {
                return Err(PermError::NotBijective(n));
            }
            seen[x - 1] = true;
            out.push(x - 1);
        }
        Ok(Permutation { images: out })
    }

    /// The transposition (a b) on n letters.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Permutation, PermError> {
        for letter in [a, b] {
            if letter == 0 || letter > n {
                return Err(PermError::OutOfRange { letter, n });
            }
        }
        let mut p = Self::identity(n);
        p.images.swap(a - 1, b - 1);
        Ok(p)
    }

    /// The adjacent transposition (k k+1), 1 ≤ k < n.
    pub fn adjacent(n: usize, k: usize) -> Result<Permutation, PermError> {
        Self::transposition(n, k, k + 1)
    }

    /// Parse cycle notation such as `(1 2)(3 4 5)` or `(1,2)`; `()` or `id` is the identity.
    pub fn parse_cycles(n: usize, text: &str) -> Result<Permutation, PermError> {
        let t = text.trim();
        let mut p = Self::identity(n);
        if t.is_empty() || t == "id" || t == "()" {
            return Ok(p);
        }
        let bad = || PermError::Parse(text.to_string());
        let mut rest = t;
        let mut seen = vec![false; n];
        while !rest.is_empty() {
            rest = rest.trim_start();
            let body_end = rest.find(')').ok_or_else(bad)?;
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let body = &body[..body_end - 1];
            rest = &rest[body_end + 1..];
            let letters: Vec<usize> = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            for &x in &letters {
                if x == 0 || x > n {
                    return Err(PermError::OutOfRange { letter: x, n });
                }
                if seen[x - 1] {
                    return Err(bad());
                }
                seen[x - 1] = true;
            }
            for w in 0..letters.len() {
                let from = letters[w];
                let to = letters[(w + 1) % letters.len()];
                p.images[from - 1] = to - 1;
            }
        }
        Ok(p)
    }

    /// Parse either cycle notation or a JSON image list like `[2,3,1]`.
    pub fn parse(n: Option<usize>, text: &str) -> Result<Permutation, PermError> {
        let t = text.trim();
        if t.starts_with('[') {
            let v: Vec<usize> = serde_json::from_str(t).map_err(|_| PermError::Parse(text.to_string()))?;
            let p = Self::from_images(&v)?;
            if let Some(n) = n {
                if p.degree() != n {
                    return Err(PermError::SizeMismatch(format!("expected {n} letters, got {}", p.degree())));
                }
            }
            return Ok(p);
        }
        let n = match n {
            Some(n) => n,
            None => t
                .split(|c: char| !c.is_ascii_digit())
                .filter_map(|s| s.parse::<usize>().ok())
                .max()
                .unwrap_or(0),
        };
        Self::parse_cycles(n, t)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// 1-based image list.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|x| x + 1).collect()
    }

    /// σ(k) for 1-based k.
    pub fn apply(&self, k: usize) -> usize {
        self.images[k - 1] + 1
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// The product σ∘τ (apply `other` first).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "composing permutations of different degrees");
        Permutation { images: other.images.iter().map(|&k| self.images[k]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    pub fn inversions(&self) -> usize {
        let n = self.degree();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.images[i] > self.images[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// +1 or -1.
    pub fn sign(&self) -> i64 {
        if self.inversions() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// The sign as an element of `field`.
    pub fn sign_scalar(&self, field: &crate::scalars::Field) -> crate::scalars::Scalar {
        crate::scalars::Scalar::from_i64(field, self.sign())
    }

    /// A word k_1..k_r with σ = s_{k_1}∘..∘s_{k_r}, s_k = (k k+1), of length inversions(σ).
    /// For a right action, x∗σ is obtained by applying s_{k_1} first, then s_{k_2}, and so on.
    pub fn adjacent_word(&self) -> Vec<usize> {
        let mut imgs = self.images.clone();
        let mut swaps = Vec::new();
        let n = imgs.len();
        // bubble sort; swapping positions k,k+1 is right multiplication by s_k
        for pass in 0..n {
            for k in 0..n.saturating_sub(1 + pass) {
                if imgs[k] > imgs[k + 1] {
                    imgs.swap(k, k + 1);
                    swaps.push(k + 1);
                }
            }
        }
        swaps.reverse();
        swaps
    }

    pub fn to_cycle_string(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                cycle.push((k + 1).to_string());
                k = self.images[k];
            }
            out.push('(');
            out.push_str(&cycle.join(" "));
            out.push(')');
        }
        if out.is_empty() {
            "()".into()
        } else {
            out
        }
    }

    /// All n! permutations in lexicographic order of image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }
}

/// Outer arity together with the block sizes substituted into each input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockShape {
    sizes: Vec<usize>,
}

impl BlockShape {
    pub fn new(sizes: Vec<usize>) -> Result<BlockShape, PermError> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(PermError::SizeMismatch("block sizes must be positive and non-empty".into()));
        }
        Ok(BlockShape { sizes })
    }

    /// All blocks singletons except block `i` (1-based) of size `n`.
    pub fn single(m: usize, i: usize, n: usize) -> Result<BlockShape, PermError> {
        if i == 0 || i > m {
            return Err(PermError::IndexOutOfRange { index: i, m });
        }
        let mut sizes = vec![1; m];
        sizes[i - 1] = n;
        Self::new(sizes)
    }

    pub fn outer_arity(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// Apply each `inner[j]` inside block j, then move block j to block position φ(j).
///
/// In the result, the block sitting at position p has size `sizes[φ⁻¹(p)]`, so
/// ϑ(φψ; s) = ϑ(φ; ψ·s)∘ϑ(ψ; s) where (ψ·s)_{ψ(j)} = s_j.
pub fn block_permutation(phi: &Permutation, shape: &BlockShape, inner: &[Permutation]) -> Result<Permutation, PermError> {
    let m = shape.outer_arity();
    if phi.degree() != m {
        return Err(PermError::SizeMismatch(format!("outer permutation on {} letters, {m} blocks", phi.degree())));
    }
    if inner.len() != m {
        return Err(PermError::SizeMismatch(format!("{} inner permutations for {m} blocks", inner.len())));
    }
    for (j, (p, &s)) in inner.iter().zip(&shape.sizes).enumerate() {
        if p.degree() != s {
            return Err(PermError::SizeMismatch(format!("inner permutation {} has {} letters, block has {s}", j + 1, p.degree())));
        }
    }
    let inv = phi.inverse();
    // start offsets of blocks in source and target orders
    let mut src_start = vec![0; m];
    for j in 1..m {
        src_start[j] = src_start[j - 1] + shape.sizes[j - 1];
    }
    let mut tgt_start = vec![0; m];
    for p in 1..m {
        tgt_start[p] = tgt_start[p - 1] + shape.sizes[inv.images[p - 1]];
    }
    let mut images = vec![0; shape.total()];
    for j in 0..m {
        for r in 0..shape.sizes[j] {
            images[src_start[j] + r] = tgt_start[phi.images[j]] + inner[j].images[r];
        }
    }
    Ok(Permutation { images })
}

/// σ acting on the letters i..i+n-1 of {1..m+n-1}, identity elsewhere.
pub fn inflate_inner(m: usize, i: usize, sigma: &Permutation) -> Result<Permutation, PermError> {
    let n = sigma.degree();
    let shape = BlockShape::single(m, i, n)?;
    let inner: Vec<Permutation> = (1..=m).map(|j| if j == i { sigma.clone() } else { Permutation::identity(1) }).collect();
    block_permutation(&Permutation::identity(m), &shape, &inner)
}

/// φ with its letter i blown up to a block of n letters.
pub fn inflate_outer(phi: &Permutation, i: usize, n: usize) -> Result<Permutation, PermError> {
    let m = phi.degree();
    let shape = BlockShape::single(m, i, n)?;
    let inner: Vec<Permutation> = shape.sizes.iter().map(|&s| Permutation::identity(s)).collect();
    block_permutation(phi, &shape, &inner)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(images: &[usize]) -> Permutation {
        Permutation::from_images(images).unwrap()
    }

    /// Oracle: lay out the blocks as explicit letter lists, permute the list of blocks, read off positions.
    fn naive_block(phi: &Permutation, sizes: &[usize], inner: &[Permutation]) -> Permutation {
        let m = sizes.len();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut next = 1;
        for j in 0..m {
            let letters: Vec<usize> = (next..next + sizes[j]).collect();
            next += sizes[j];
            blocks.push(letters);
        }
        // target arrangement: position p holds block φ⁻¹(p)
        let mut order: Vec<(usize, usize)> = Vec::new(); // (source letter, target position)
        let mut target_blocks: Vec<Option<usize>> = vec![None; m];
        for j in 0..m {
            target_blocks[phi.apply(j + 1) - 1] = Some(j);
        }
        let mut pos = 1;
        let mut start_of = vec![0; m];
        for slot in target_blocks.iter() {
            let j = slot.unwrap();
            start_of[j] = pos;
            pos += sizes[j];
        }
        for j in 0..m {
            for (r, &letter) in blocks[j].iter().enumerate() {
                order.push((letter, start_of[j] + inner[j].apply(r + 1) - 1));
            }
        }
        order.sort();
        p(&order.iter().map(|&(_, t)| t).collect::<Vec<_>>())
    }

    #[test]
    fn signs() {
        assert_eq!(Permutation::identity(5).sign(), 1);
        assert_eq!(Permutation::parse_cycles(3, "(1 2)").unwrap().sign(), -1);
        let c = Permutation::parse_cycles(3, "(1 2 3)").unwrap();
        assert_eq!(c.inversions(), 2);
        assert_eq!(c.sign(), 1);
    }

    #[test]
    fn block_examples() {
        let id1 = Permutation::identity(1);
        let id2 = Permutation::identity(2);
        let b = block_permutation(&Permutation::identity(3), &BlockShape::new(vec![1, 1, 1]).unwrap(), &[id1.clone(), id1.clone(), id1.clone()]).unwrap();
        assert!(b.is_identity());
        let swap = p(&[2, 1]);
        let b = block_permutation(&swap, &BlockShape::new(vec![2, 1]).unwrap(), &[id2, id1.clone()]).unwrap();
        assert_eq!(b.images(), vec![2, 3, 1]);
        assert_eq!(inflate_outer(&swap, 1, 2).unwrap().images(), vec![2, 3, 1]);
        assert_eq!(inflate_inner(2, 2, &swap).unwrap(), Permutation::parse_cycles(3, "(2 3)").unwrap());
        assert_eq!(inflate_inner(3, 1, &swap).unwrap(), Permutation::parse_cycles(4, "(1 2)").unwrap());
        assert!(inflate_inner(3, 2, &Permutation::identity(4)).unwrap().is_identity());
        assert!(inflate_outer(&Permutation::identity(4), 2, 3).unwrap().is_identity());
        assert_eq!(inflate_outer(&swap, 1, 3).unwrap().sign(), -1);
        assert!(inflate_outer(&swap, 3, 3).is_err());
        assert!(matches!(
            block_permutation(&swap, &BlockShape::new(vec![2, 1]).unwrap(), &[id1.clone(), id1]),
            Err(PermError::SizeMismatch(_))
        ));
    }

    #[test]
    fn block_swap_sign() {
        let swap = p(&[2, 1]);
        for a in 1..=5 {
            for b in 1..=5 {
                let shape = BlockShape::new(vec![a, b]).unwrap();
                let perm = block_permutation(&swap, &shape, &[Permutation::identity(a), Permutation::identity(b)]).unwrap();
                assert_eq!(perm.sign(), if (a * b) % 2 == 0 { 1 } else { -1 });
            }
        }
    }

    fn size_vectors(m: usize, max: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|v| (1..=max).map(move |s| {
                    let mut w = v.clone();
                    w.push(s);
                    w
                }))
                .collect();
        }
        out
    }

    #[test]
    fn block_matches_naive_oracle() {
        for m in 1..=3 {
            for sizes in size_vectors(m, 3) {
                let inners: Vec<Vec<Permutation>> = sizes.iter().map(|&s| Permutation::all(s)).collect();
                for phi in Permutation::all(m) {
                    // sample inner choices: all-identity plus the last permutation of each block
                    for pick in 0..2 {
                        let inner: Vec<Permutation> = inners.iter().map(|v| if pick == 0 { v[0].clone() } else { v[v.len() - 1].clone() }).collect();
                        let shape = BlockShape::new(sizes.clone()).unwrap();
                        assert_eq!(block_permutation(&phi, &shape, &inner).unwrap(), naive_block(&phi, &sizes, &inner));
                    }
                }
            }
        }
    }

    #[test]
    fn block_homomorphism_with_transported_sizes() {
        for m in 1..=4 {
            for sizes in size_vectors(m, 3) {
                let shape = BlockShape::new(sizes.clone()).unwrap();
                let trivial = |s: &[usize]| s.iter().map(|&k| Permutation::identity(k)).collect::<Vec<_>>();
                for phi in Permutation::all(m) {
                    for psi in Permutation::all(m) {
                        let mut moved = vec![0; m];
                        for j in 0..m {
                            moved[psi.apply(j + 1) - 1] = sizes[j];
                        }
                        let moved_shape = BlockShape::new(moved.clone()).unwrap();
                        let lhs = block_permutation(&phi.compose(&psi), &shape, &trivial(&sizes)).unwrap();
                        let rhs = block_permutation(&phi, &moved_shape, &trivial(&moved))
                            .unwrap()
                            .compose(&block_permutation(&psi, &shape, &trivial(&sizes)).unwrap());
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn inflate_outer_sign_formula() {
        // sign of φ'' = (-1)^{inv(φ) + (n-1)·c}, c = number of letters j ≠ i strictly between
        // the positions whose relative order with i flips: c ≡ i + φ(i) (mod 2)
        for m in 1..=5 {
            for phi in Permutation::all(m) {
                for i in 1..=m {
                    for n in 1..=4 {
                        let inflated = inflate_outer(&phi, i, n).unwrap();
                        let crossing = (1..=m).filter(|&j| j != i && ((j < i) != (phi.apply(j) < phi.apply(i)))).count();
                        assert_eq!(crossing % 2, (i + phi.apply(i)) % 2);
                        let expected = if (phi.inversions() + (n - 1) * crossing) % 2 == 0 { 1 } else { -1 };
                        assert_eq!(inflated.sign(), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn adjacent_words_reconstruct() {
        for n in 1..=5 {
            for sigma in Permutation::all(n) {
                let word = sigma.adjacent_word();
                assert_eq!(word.len(), sigma.inversions());
                let mut acc = Permutation::identity(n);
                for &k in &word {
                    acc = acc.compose(&Permutation::adjacent(n, k).unwrap());
                }
                assert_eq!(acc, sigma);
            }
        }
    }

    #[test]
    fn cycle_round_trip() {
        for sigma in Permutation::all(4) {
            assert_eq!(Permutation::parse_cycles(4, &sigma.to_cycle_string()).unwrap(), sigma);
        }
        assert_eq!(Permutation::parse(None, "[2,3,1]").unwrap(), Permutation::parse_cycles(3, "(1 2 3)").unwrap());
        assert_eq!(Permutation::parse(Some(3), "(1,2)").unwrap().images(), vec![2, 1, 3]);
        assert!(Permutation::from_images(&[1, 1]).is_err());
    }
}
