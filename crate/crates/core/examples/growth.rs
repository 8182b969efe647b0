//! Hilbert series invariants: GK estimate, growth class, rational closed form.
use operadkit::families::{family_series, FamilyKind};
use operadkit::series::{classify_growth, fit_rational, HilbertSeries};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let com2 = family_series(&FamilyKind::ComW { w: 2 }, 400);
    let rep = classify_growth(&com2)?;
    println!("Com^(2): {:?}, GK ≈ {:.4}", rep.class, rep.estimate.value());
    if let Some(r) = fit_rational(&com2, None)? {
        println!("closed form: {r}");
    }
    let quadratic = HilbertSeries::from_fn(400, |n| n as u64);
    println!("coeff n = n: {:?}", classify_growth(&quadratic)?.class);
    Ok(())
}
