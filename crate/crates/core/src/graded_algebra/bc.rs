use serde::{Deserialize, Serialize};

use super::{AlgebraError, DenseAlgebra, GradedAlgebra, Parity};
use crate::linalg;
use crate::scalars::{Elem, Field};

/// Whether B{c} is built as a commutative (even type) or graded commutative (odd type) algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcType {
    Even,
    Odd,
}

/// A Z/(b+1)-graded algebra with one basis element x_i in each degree 0..=b (x_0 = 1):
/// x_i ⋆ x_j = table[i][j] · x_{(i+j) mod (b+1)}.
#[derive(Clone, Debug)]
pub struct CyclicAlgebra {
    field: Field,
    b: usize,
    table: Vec<Vec<Elem>>,
}

impl CyclicAlgebra {
    pub fn new(field: &Field, table: Vec<Vec<Elem>>) -> Result<CyclicAlgebra, AlgebraError> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n) {
            return Err(AlgebraError::InvalidCyclic("structure table must be square and nonempty".into()));
        }
        let b = n - 1;
        for i in 0..n {
            if !field.is_one(&table[0][i]) || !field.is_one(&table[i][0]) {
                return Err(AlgebraError::InvalidCyclic(format!("x_0 must act as the unit (fails at x_{i})")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs = field.mul(&table[i][j], &table[(i + j) % n][k]);
                    let rhs = field.mul(&table[j][k], &table[i][(j + k) % n]);
                    if lhs != rhs {
                        return Err(AlgebraError::InvalidCyclic(format!("not associative on (x_{i}, x_{j}, x_{k})")));
                    }
                }
            }
        }
        Ok(CyclicAlgebra { field: field.clone(), b, table })
    }

    /// B = k (b = 0).
    pub fn trivial(field: &Field) -> CyclicAlgebra {
        CyclicAlgebra::new(field, vec![vec![field.one()]]).expect("valid")
    }

    /// k[x]/(x^{b+1}), deg x = 1.
    pub fn truncated_polynomial(field: &Field, b: usize) -> CyclicAlgebra {
        let n = b + 1;
        let table = (0..n).map(|i| (0..n).map(|j| if i + j <= b { field.one() } else { field.zero() }).collect()).collect();
        CyclicAlgebra::new(field, table).expect("valid")
    }

    /// All products of positive-degree elements vanish.
    pub fn square_zero(field: &Field, b: usize) -> CyclicAlgebra {
        let n = b + 1;
        let table = (0..n).map(|i| (0..n).map(|j| if i == 0 || j == 0 { field.one() } else { field.zero() }).collect()).collect();
        CyclicAlgebra::new(field, table).expect("valid")
    }

    /// b = 3 with x_1 x_2 = x_2 x_1 = x_3 and all other positive products zero (graded commutative).
    pub fn exterior_type(field: &Field) -> CyclicAlgebra {
        let mut c = CyclicAlgebra::square_zero(field, 3);
        c.table[1][2] = field.one();
        c.table[2][1] = field.one();
        CyclicAlgebra::new(field, c.table).expect("valid")
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coefficient(&self, i: usize, j: usize) -> &Elem {
        &self.table[i][j]
    }

    /// x_i ⋆ x_j = ε x_j ⋆ x_i with ε = (-1)^{ij} when `graded`, else 1.
    pub fn is_commutative(&self, graded: bool) -> bool {
        let f = &self.field;
        (0..=self.b).all(|i| {
            (0..=self.b).all(|j| {
                let rev = if graded && (i * j) % 2 == 1 { f.neg(&self.table[j][i]) } else { self.table[j][i].clone() };
                self.table[i][j] == rev
            })
        })
    }

    /// ⊕_{i≥1} B_i is nilpotent: every product of b+1 positive-degree basis elements vanishes.
    pub fn is_nilpotent(&self) -> bool {
        let f = &self.field;
        let n = self.b + 1;
        // current[i] = set of (degree, nonzero) reachable as products of r positive elements
        let mut reach: Vec<bool> = (0..n).map(|i| i > 0).collect();
        for _ in 0..n {
            let mut next = vec![false; n];
            for (i, &r) in reach.iter().enumerate() {
                if !r {
                    continue;
                }
                for j in 1..n {
                    if !f.is_zero(&self.table[i][j]) {
                        next[(i + j) % n] = true;
                    }
                }
            }
            reach = next;
        }
        reach.iter().all(|r| !r)
    }
}

fn bc_label(i: usize, j: usize) -> String {
    let c = match j {
        0 => String::new(),
        1 => "c".into(),
        _ => format!("c^{j}"),
    };
    match (i, c.is_empty()) {
        (0, true) => "1".into(),
        (0, false) => c,
        (_, true) => format!("x{i}"),
        (_, false) => format!("x{i}·{c}"),
    }
}

/// B{c}: N-graded, degree n = i + j(b+1) has basis x_i c^j, and
/// x_{i1}c^{j1} · x_{i2}c^{j2} = (x_{i1}⋆x_{i2}) c^{j1+j2+[i1+i2 ≥ b+1]}.
/// Positive-degree basis elements are all of the requested type.
pub fn build_bc(b_alg: &CyclicAlgebra, ty: BcType, horizon: usize) -> Result<DenseAlgebra, AlgebraError> {
    let f = b_alg.field();
    let b = b_alg.b();
    let n = b + 1;
    match ty {
        BcType::Even => {
            if !b_alg.is_commutative(false) {
                return Err(AlgebraError::NotCommutative("even type needs a commutative B".into()));
            }
        }
        BcType::Odd => {
            if b % 2 == 0 {
                return Err(AlgebraError::OddTypeNeedsOddB(b));
            }
            if f.characteristic() == 2 {
                return Err(AlgebraError::OddTypeInCharacteristic2);
            }
            if !b_alg.is_commutative(true) {
                return Err(AlgebraError::NotCommutative("odd type needs a graded commutative B".into()));
            }
        }
    }
    let labels: Vec<Vec<String>> = (0..=horizon).map(|d| vec![bc_label(d % n, d / n)]).collect();
    let name = format!("B{{c}}, b = {b}, {} type", if ty == BcType::Even { "even" } else { "odd" });
    let a = DenseAlgebra::from_fn(f, name, labels, vec![f.one()], |d1, _, d2, _| vec![b_alg.coefficient(d1 % n, d2 % n).clone()]);
    let p = match ty {
        BcType::Even => Parity::Even,
        BcType::Odd => Parity::Odd,
    };
    let a = a.with_uniform_parity(p);
    if b_alg.is_nilpotent() && horizon >= n {
        // c = x_0 c^1 must be a nonzerodivisor; products past the horizon are truncated, not zero
        for d in 0..=horizon - n {
            let prod = a.mul_basis(n, 0, d, 0);
            if linalg::is_zero_vec(f, &prod) {
                return Err(AlgebraError::InvalidCyclic(format!("c annihilates the degree-{d} basis element")));
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::super::{check_associativity, check_pgc, hilbert_series, torsion_elements, Side};
    use super::*;

    #[test]
    fn horizon_below_deg_c_is_not_torsion() {
        let q = Field::rationals();
        let a = build_bc(&CyclicAlgebra::truncated_polynomial(&q, 2), BcType::Even, 1).unwrap();
        assert_eq!(a.horizon(), 1);
    }

    #[test]
    fn b_equal_k_gives_polynomial_ring() {
        let q = Field::rationals();
        let a = build_bc(&CyclicAlgebra::trivial(&q), BcType::Even, 10).unwrap();
        assert_eq!(a.label(3, 0), "c^3");
        assert!(hilbert_series(&a).coeffs().iter().all(|&c| c == 1));
        assert!(check_pgc(&a, 10).unwrap().passed());
    }

    #[test]
    fn truncated_polynomial_products() {
        let q = Field::rationals();
        let b = CyclicAlgebra::truncated_polynomial(&q, 2);
        assert!(b.is_nilpotent());
        let a = build_bc(&b, BcType::Even, 12).unwrap();
        // x1·x1 = x2 (degree 2), x1·x2 = 0 (degree 3 = c)
        assert_eq!(a.mul_basis(1, 0, 1, 0), vec![q.one()]);
        assert_eq!(a.mul_basis(1, 0, 2, 0), vec![q.zero()]);
        assert_eq!(a.label(7, 0), "x1·c^2");
        assert!(check_associativity(&a, 12).is_empty());
        assert!(torsion_elements(&a, Side::Right, 12, None).torsion_free());
    }

    #[test]
    fn odd_type_validation() {
        let f5 = Field::prime(5).unwrap();
        let mas_source = CyclicAlgebra::square_zero(&f5, 1);
        let a = build_bc(&mas_source, BcType::Odd, 12).unwrap();
        assert!(check_pgc(&a, 12).unwrap().passed());
        let mut bad = a.clone();
        bad.relabel(1, 0, Parity::Even).unwrap();
        assert!(!check_pgc(&bad, 12).unwrap().passed());

        let ext = build_bc(&CyclicAlgebra::exterior_type(&f5), BcType::Odd, 16).unwrap();
        assert!(check_pgc(&ext, 16).unwrap().passed());
        assert!(check_associativity(&ext, 16).is_empty());

        assert_eq!(build_bc(&CyclicAlgebra::truncated_polynomial(&f5, 2), BcType::Odd, 5).unwrap_err(), AlgebraError::OddTypeNeedsOddB(2));
        let f2 = Field::prime(2).unwrap();
        assert_eq!(build_bc(&CyclicAlgebra::square_zero(&f2, 1), BcType::Odd, 5).unwrap_err(), AlgebraError::OddTypeInCharacteristic2);
        // x1·x1 = x2 ≠ -x1·x1
        let t3 = CyclicAlgebra::truncated_polynomial(&f5, 3);
        assert!(matches!(build_bc(&t3, BcType::Odd, 5), Err(AlgebraError::NotCommutative(_))));
    }
}
