//! Permutations: cycle notation, products, signs and block permutations.
use operadkit::symmetry::{block_permutation, BlockShape, Permutation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = Permutation::parse(Some(4), "(1 2 3)")?;
    let t = Permutation::adjacent(4, 3)?;
    println!("s = {s}, t = {t}, st = {}, sign(st) = {}", s.compose(&t), s.compose(&t).sign());
    println!("s as adjacent word: {:?}", s.adjacent_word());
    let shape = BlockShape::new(vec![2, 1, 3])?;
    let phi = Permutation::parse(Some(3), "(1 3)")?;
    let inner = vec![Permutation::adjacent(2, 1)?, Permutation::identity(1), Permutation::identity(3)];
    println!("block permutation: {}", block_permutation(&phi, &shape, &inner)?);
    Ok(())
}
