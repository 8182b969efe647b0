//! Subalgebra of F_{2^{2^s}}[t] with dimensions stepping up at λ(dim F_s).
use operadkit::worked_examples::{field_tower_series, lambda_certificate, FieldTowerConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for m in [2, 4, 8, 16] {
        let c = lambda_certificate(m)?;
        println!("λ({m}) = {}  (f(λ) ≥ {}, f(λ−1) ≤ {:?})", c.lambda, c.f_lambda_lower, c.f_previous_upper);
    }
    let r = field_tower_series(&FieldTowerConfig::binary(4, 5000)?)?;
    println!("bound holds: {}, GK ≈ {:.4}, passed: {}", r.sum_bound.passed, r.gk.value(), r.passed);
    Ok(())
}
