//! Axiom checking, including a sign-mutated Mas that must fail.
use operadkit::families::{make_family, FamilyKind, FamilySpec};
use operadkit::operad::check_axioms;
use operadkit::scalars::Field;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = Field::rationals();
    let mas = make_family(&FamilySpec::new(FamilyKind::Mas, &q, 7))?;
    let rep = check_axioms(&mas, 7);
    println!("Mas: passed = {}, instances = {}", rep.passed, rep.checked.values().sum::<u64>());

    let bad = mas.with_composition((3, 0, 2, 2, 0), vec![q.one()])?;
    let rep = check_axioms(&bad, 7);
    println!("mutated: passed = {}, {} violations", rep.passed, rep.violation_count);
    if let Some(v) = rep.violations.first() {
        println!("  first: {:?} {:?} slots {:?}: {}", v.axiom, v.arities, v.slots, v.detail);
    }
    Ok(())
}
