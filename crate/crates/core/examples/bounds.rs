//! Certified comparisons of a series against a symbolic bound.
use operadkit::interval;
use operadkit::series::{series_bound_check, BoundExpr, HilbertSeries};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = HilbertSeries::from_fn(2000, |n| if n < 3 { 1 } else { 2 });
    let bound = BoundExpr::parse("3 + (n+1)*ln(n+1)")?;
    let rep = series_bound_check(&h, &bound, (1, 2000))?;
    println!("partial sums ≤ {}: {} ({} degrees)", rep.bound, rep.passed, rep.checked);
    let e = interval::exp(&num_rational::BigRational::from_integer(72.into()), 128);
    println!("⌊e^72⌋ = {:?}", e.floor());
    Ok(())
}
