//! Multiplicity of operads and a strictly subadditive direct sum.
use operadkit::worked_examples::multiplicity_example;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = multiplicity_example(40)?;
    println!("m(P) = {:?}, m(Q) = {:?}, m(P ⊕ Q) = {:?}", r.m_p, r.m_q, r.m_sum);
    for row in &r.com_f {
        println!("m(Com over F, [F:k] = {}) = {:?}", row.extension_degree, row.multiplicity);
    }
    Ok(())
}
