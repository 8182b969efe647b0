//! Arithmetic in Q, F_p and a quadratic tower over F_2.
use operadkit::scalars::Field;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = Field::rationals();
    let x = q.from_ratio(3, 4)?;
    println!("Q: (3/4)^-1 = {}", q.format(&q.inv(&x)?));

    let f7 = Field::prime(7)?;
    println!("F7: 3 * 5 = {}", f7.format(&f7.mul(&f7.from_i64(3), &f7.from_i64(5))));

    let f4 = Field::prime(2)?.adjoin_quadratic_standard()?;
    let f16 = f4.adjoin_quadratic_standard()?;
    let t = f16.basis_element(1);
    println!("F16: degree {} over F2, t^15 = {}", f16.degree(), f16.format(&f16.pow(&t, 15)));
    Ok(())
}
