//! Ideals: annihilating pairs, centrality and action types.
use operadkit::families::{make_family, FamilyKind, FamilySpec};
use operadkit::operad::{classify_triviality, is_central, prime_at_horizon, DEFAULT_PRIME_DIM_CAP};
use operadkit::scalars::Field;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = Field::rationals();
    for kind in [FamilyKind::Com, FamilyKind::Mas] {
        let p = make_family(&FamilySpec::new(kind, &q, 8))?;
        let v = prime_at_horizon(&p, 8, DEFAULT_PRIME_DIM_CAP);
        println!("{}: {}", p.name(), serde_json::to_string(&v)?);
        let c = is_central(&p, &p.basis_element(2, 0), 8);
        println!("  μ_2 central at horizon: {}", c.central_at_horizon);
        println!("  action types: {:?}", (1..=5).map(|n| classify_triviality(&p, n)).collect::<Vec<_>>());
    }
    Ok(())
}
