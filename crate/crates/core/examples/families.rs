//! The named one-dimensional families and their Hilbert series.
use operadkit::families::{make_family, BSource, FamilyKind, FamilySpec};
use operadkit::scalars::Field;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = Field::rationals();
    let kinds = [
        FamilyKind::Com,
        FamilyKind::Ope,
        FamilyKind::Mas,
        FamilyKind::ComW { w: 3 },
        FamilyKind::OpeW { w: 4 },
        FamilyKind::LinE { b: BSource::Truncated { b: 2 } },
        FamilyKind::LinO { b: BSource::SquareZero { b: 1 } },
    ];
    for kind in kinds {
        let p = make_family(&FamilySpec::new(kind, &q, 9))?;
        println!("{:<24} {:?}", p.name(), p.hilbert_series().coeffs());
    }
    Ok(())
}
