//! The binary squarefree algebra: cancellation, quotients and its G_Str image.
use operadkit::worked_examples::squarefree_pipeline;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = squarefree_pipeline(256)?;
    for c in &r.cancellation {
        println!("x_{}: cancels below 2^{} = {}, fails at 2^{} = {}", c.l, c.l, c.passes_below, c.l, c.fails_at);
    }
    for row in &r.quotients {
        println!("quotient by x_0..x_{}: torsion free = {}", row.i, row.left_torsion_free && row.right_torsion_free);
    }
    println!("image GK ≈ {:.4}, series = {:?}, passed = {}", r.image_gk.value(), r.image_rational, r.passed);
    Ok(())
}
