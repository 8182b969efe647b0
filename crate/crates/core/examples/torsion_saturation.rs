//! Torsion and the saturation condition on small graded algebras.
use operadkit::graded_algebra::{basis_element, saturation_condition_check, torsion_elements, AlgElement, DenseAlgebra, Side};
use operadkit::scalars::Field;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = Field::rationals();
    let poly = DenseAlgebra::polynomial(&q, 1, 24);
    let alphas: Vec<AlgElement> = (1..=12).map(|s| basis_element(&poly, s, 0)).collect();
    let rep = saturation_condition_check(&poly, &alphas, 10)?;
    println!("Q[t]: passed = {}, t_d = {:?}", rep.passed, rep.t_d);
    println!("Q[t] torsion free: {}", torsion_elements(&poly, Side::Left, 24, None).torsion_free());

    let dual = DenseAlgebra::dual_numbers(&q, 1, 6);
    let rep = saturation_condition_check(&dual, &[basis_element(&dual, 1, 0)], 1)?;
    println!("k ⊕ kx: passed = {}, witness = {:?}", rep.passed, rep.outcomes[0].witness);
    Ok(())
}
