//! G_Str, G_Atr and F, with round trips.
use operadkit::functors::{functor_f, functor_g_atr, functor_g_str, roundtrip_check, Direction};
use operadkit::graded_algebra::{build_bc, hilbert_series, BcType, CyclicAlgebra, DenseAlgebra};
use operadkit::scalars::Field;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = Field::rationals();
    let poly = DenseAlgebra::polynomial(&q, 2, 10);
    let p = functor_g_str(&poly)?;
    println!("{}: {:?}", p.name(), p.hilbert_series().coeffs());
    println!("round trip: {:?}", roundtrip_check(&poly, Direction::Str)?.passed);

    let source = build_bc(&CyclicAlgebra::square_zero(&q, 1), BcType::Odd, 8)?;
    let mas = functor_g_atr(&source)?;
    println!("μ_3 ∘_2 μ_2 = {}", mas.format_element(&mas.compose(&mas.basis_element(3, 0), 2, &mas.basis_element(2, 0))?));
    let back = functor_f(&mas);
    println!("F(G_Atr(B{{c}})) series: {:?}", hilbert_series(&back).coeffs());
    Ok(())
}
