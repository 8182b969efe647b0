use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{AlgebraError, GradedAlgebra, Parity};
use crate::linalg::{self, is_zero_vec, Vector};
use crate::scalars::{CoeffRepr, Field, FieldDescriptor};

/// Algebra given by explicit structure constants on every degree up to the horizon.
#[derive(Clone, Debug)]
pub struct DenseAlgebra {
    field: Field,
    name: String,
    labels: Vec<Vec<String>>,
    parities: Option<Vec<Vec<Parity>>>,
    unit: Vector,
    /// nonzero basis products only
    table: HashMap<(usize, usize, usize, usize), Vector>,
}

fn power_label(var: &str, j: usize) -> String {
    match j {
        0 => "1".into(),
        1 => var.into(),
        _ => format!("{var}^{j}"),
    }
}

impl DenseAlgebra {
    /// Build from a basis-product function; products landing beyond the last degree are dropped.
    pub fn from_fn(
        field: &Field,
        name: impl Into<String>,
        labels: Vec<Vec<String>>,
        unit: Vector,
        mut product: impl FnMut(usize, usize, usize, usize) -> Vector,
    ) -> DenseAlgebra {
        let h = labels.len().saturating_sub(1);
        let mut table = HashMap::new();
        for d1 in 0..=h {
            for d2 in 0..=h - d1 {
                for i1 in 0..labels[d1].len() {
                    for i2 in 0..labels[d2].len() {
                        let v = product(d1, i1, d2, i2);
                        debug_assert_eq!(v.len(), labels[d1 + d2].len());
                        if !is_zero_vec(field, &v) {
                            table.insert((d1, i1, d2, i2), v);
                        }
                    }
                }
            }
        }
        DenseAlgebra { field: field.clone(), name: name.into(), labels, parities: None, unit, table }
    }

    /// Copy of any algebra up to `horizon` (including its type labels, if complete).
    pub fn materialize(a: &dyn GradedAlgebra, horizon: usize) -> DenseAlgebra {
        let h = horizon.min(a.horizon());
        let labels: Vec<Vec<String>> = (0..=h).map(|d| (0..a.dim(d)).map(|i| a.label(d, i)).collect()).collect();
        let mut out = DenseAlgebra::from_fn(a.field(), a.name(), labels, a.unit(), |d1, i1, d2, i2| a.mul_basis(d1, i1, d2, i2));
        let parities: Option<Vec<Vec<Parity>>> = (0..=h)
            .map(|d| (0..a.dim(d)).map(|i| if d == 0 { Some(Parity::Even) } else { a.parity(d, i) }).collect::<Option<Vec<_>>>())
            .collect();
        out.parities = parities;
        out
    }

    /// k[t] with deg t = w.
    pub fn polynomial(field: &Field, w: usize, horizon: usize) -> DenseAlgebra {
        assert!(w >= 1, "generator degree must be positive");
        let labels: Vec<Vec<String>> =
            (0..=horizon).map(|d| if d % w == 0 { vec![power_label("t", d / w)] } else { Vec::new() }).collect();
        let one = field.one();
        DenseAlgebra::from_fn(field, format!("k[t], deg t = {w}"), labels, vec![one.clone()], |_, _, _, _| vec![one.clone()])
    }

    /// F[t] (deg t = w) viewed as an algebra over the prime field of F: degree jw has basis θ-monomials · t^j.
    pub fn polynomial_over(ext: &Field, w: usize, horizon: usize) -> DenseAlgebra {
        assert!(w >= 1, "generator degree must be positive");
        let k = ext.prime_field();
        let e = ext.degree();
        let labels: Vec<Vec<String>> = (0..=horizon)
            .map(|d| {
                if d % w != 0 {
                    return Vec::new();
                }
                (0..e)
                    .map(|b| {
                        let theta = ext.basis_label(b);
                        match (theta.as_str(), d / w) {
                            ("1", j) => power_label("t", j),
                            (th, 0) => th.to_string(),
                            (th, j) => format!("{th}·{}", power_label("t", j)),
                        }
                    })
                    .collect()
            })
            .collect();
        let unit = linalg::unit_vec(&k, e, 0);
        DenseAlgebra::from_fn(&k, format!("F[t] over the prime field, [F:k] = {e}, deg t = {w}"), labels, unit, |_, i1, _, i2| {
            let p = ext.mul(&ext.basis_element(i1), &ext.basis_element(i2));
            ext.prime_coordinates(&p)
        })
    }

    /// k ⊕ kx with x² = 0, deg x = w (finite dimensional).
    pub fn dual_numbers(field: &Field, w: usize, horizon: usize) -> DenseAlgebra {
        assert!(w >= 1, "generator degree must be positive");
        let labels: Vec<Vec<String>> = (0..=horizon)
            .map(|d| match d {
                0 => vec!["1".to_string()],
                d if d == w => vec!["x".to_string()],
                _ => Vec::new(),
            })
            .collect();
        let one = field.one();
        DenseAlgebra::from_fn(field, format!("k ⊕ kx, x² = 0, deg x = {w}"), labels, vec![one.clone()], |d1, _, d2, _| {
            if d1 == 0 || d2 == 0 {
                vec![one.clone()]
            } else {
                Vec::new()
            }
        })
    }

    /// k[x] ⊕ ⊕_r a_r·k[x] with deg x = w, deg a_r = module_degrees[r], and a_r·a_s = 0.
    pub fn square_zero_extension(field: &Field, w: usize, module_degrees: &[usize], horizon: usize) -> DenseAlgebra {
        assert!(w >= 1 && module_degrees.iter().all(|&m| m >= 1), "degrees must be positive");
        // basis entries: None = x^j, Some(r) = a_r x^j
        let mut keys: Vec<Vec<(Option<usize>, usize)>> = vec![Vec::new(); horizon + 1];
        let mut labels: Vec<Vec<String>> = vec![Vec::new(); horizon + 1];
        for d in 0..=horizon {
            if d % w == 0 {
                keys[d].push((None, d / w));
                labels[d].push(power_label("x", d / w));
            }
            for (r, &m) in module_degrees.iter().enumerate() {
                if d >= m && (d - m) % w == 0 {
                    let j = (d - m) / w;
                    keys[d].push((Some(r), j));
                    let a = format!("a{}", r + 1);
                    labels[d].push(if j == 0 { a } else { format!("{a}·{}", power_label("x", j)) });
                }
            }
        }
        let unit = linalg::unit_vec(field, labels[0].len(), 0);
        DenseAlgebra::from_fn(field, "square-zero extension of k[x]", labels, unit, |d1, i1, d2, i2| {
            let (m1, j1) = keys[d1][i1];
            let (m2, j2) = keys[d2][i2];
            let d = d1 + d2;
            let mut v = linalg::zero_vec(field, keys[d].len());
            let key = match (m1, m2) {
                (Some(_), Some(_)) => return v,
                (m, None) | (None, m) => (m, j1 + j2),
            };
            let pos = keys[d].iter().position(|k| *k == key).expect("basis closed under products");
            v[pos] = field.one();
            v
        })
    }

    /// Attach type labels; `parities[d][i]` for every degree (degree-0 entries are ignored).
    pub fn with_parities(mut self, parities: Vec<Vec<Parity>>) -> Result<DenseAlgebra, AlgebraError> {
        if parities.len() != self.labels.len() || parities.iter().zip(&self.labels).any(|(p, l)| p.len() != l.len()) {
            return Err(AlgebraError::Parse("type labels do not match the basis".into()));
        }
        self.parities = Some(parities);
        Ok(self)
    }

    /// All positive-degree basis elements get the same type.
    pub fn with_uniform_parity(self, p: Parity) -> DenseAlgebra {
        let parities = self.labels.iter().map(|l| vec![p; l.len()]).collect();
        self.with_parities(parities).expect("shape matches")
    }

    /// Change one type label (used for negative controls).
    pub fn relabel(&mut self, degree: usize, index: usize, p: Parity) -> Result<(), AlgebraError> {
        let ps = self.parities.as_mut().ok_or(AlgebraError::MissingTypes)?;
        let slot = ps.get_mut(degree).and_then(|v| v.get_mut(index)).ok_or(AlgebraError::BeyondHorizon { degree, horizon: self.labels.len() - 1 })?;
        *slot = p;
        Ok(())
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn to_file(&self) -> AlgebraFile {
        let f = &self.field;
        let mut products: Vec<ProductEntry> = self
            .table
            .iter()
            .map(|(&(d1, i1, d2, i2), v)| ProductEntry { left: [d1, i1], right: [d2, i2], value: v.iter().map(|c| f.to_repr(c)).collect() })
            .collect();
        products.sort_by_key(|p| (p.left, p.right));
        AlgebraFile {
            schema_version: 1,
            name: self.name.clone(),
            field: f.descriptor().clone(),
            horizon: self.labels.len() - 1,
            basis: self.labels.clone(),
            types: self.parities.clone(),
            unit: self.unit.iter().map(|c| f.to_repr(c)).collect(),
            products,
        }
    }

    pub fn from_file(file: &AlgebraFile) -> Result<DenseAlgebra, AlgebraError> {
        let field = Field::new(&file.field)?;
        if file.basis.len() != file.horizon + 1 {
            return Err(AlgebraError::Parse(format!("expected {} basis lists, found {}", file.horizon + 1, file.basis.len())));
        }
        let parse_vec = |v: &[CoeffRepr], len: usize, what: &str| -> Result<Vector, AlgebraError> {
            if v.len() != len {
                return Err(AlgebraError::Parse(format!("{what}: expected {len} coefficients, found {}", v.len())));
            }
            v.iter().map(|c| field.from_repr(c).map_err(AlgebraError::from)).collect()
        };
        let unit = parse_vec(&file.unit, file.basis[0].len(), "unit")?;
        let mut table = HashMap::new();
        for p in &file.products {
            let [d1, i1] = p.left;
            let [d2, i2] = p.right;
            let d = d1 + d2;
            if d > file.horizon || i1 >= file.basis[d1].len() || i2 >= file.basis[d2].len() {
                return Err(AlgebraError::Parse(format!("product entry {:?}·{:?} out of range", p.left, p.right)));
            }
            let v = parse_vec(&p.value, file.basis[d].len(), "product")?;
            if !is_zero_vec(&field, &v) {
                table.insert((d1, i1, d2, i2), v);
            }
        }
        let out = DenseAlgebra { field, name: file.name.clone(), labels: file.basis.clone(), parities: None, unit, table };
        match &file.types {
            Some(t) => out.with_parities(t.clone()),
            None => Ok(out),
        }
    }
}

impl GradedAlgebra for DenseAlgebra {
    fn field(&self) -> &Field {
        &self.field
    }
    fn horizon(&self) -> usize {
        self.labels.len() - 1
    }
    fn dim(&self, degree: usize) -> usize {
        self.labels.get(degree).map_or(0, Vec::len)
    }
    fn label(&self, degree: usize, index: usize) -> String {
        self.labels[degree][index].clone()
    }
    fn mul_basis(&self, d1: usize, i1: usize, d2: usize, i2: usize) -> Vector {
        match self.table.get(&(d1, i1, d2, i2)) {
            Some(v) => v.clone(),
            None => linalg::zero_vec(&self.field, self.dim(d1 + d2)),
        }
    }
    fn unit(&self) -> Vector {
        self.unit.clone()
    }
    fn parity(&self, degree: usize, index: usize) -> Option<Parity> {
        self.parities.as_ref().and_then(|p| p.get(degree)).and_then(|v| v.get(index)).copied()
    }
    fn name(&self) -> String {
        self.name.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductEntry {
    pub left: [usize; 2],
    pub right: [usize; 2],
    pub value: Vec<CoeffRepr>,
}

/// JSON dump of a dense algebra: basis labels per degree, unit, nonzero basis products.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub field: FieldDescriptor,
    pub horizon: usize,
    pub basis: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub types: Option<Vec<Vec<Parity>>>,
    pub unit: Vec<CoeffRepr>,
    pub products: Vec<ProductEntry>,
}

#[cfg(test)]
mod tests {
    use super::super::{check_associativity, check_unit, commutativity_witness, hilbert_series};
    use super::*;

    #[test]
    fn presets_are_associative_unital() {
        let q = Field::rationals();
        let f4 = Field::new(&crate::scalars::prime_power_descriptor(4).unwrap()).unwrap();
        let algs = vec![
            DenseAlgebra::polynomial(&q, 2, 12),
            DenseAlgebra::polynomial_over(&f4, 1, 8),
            DenseAlgebra::dual_numbers(&q, 1, 6),
            DenseAlgebra::square_zero_extension(&q, 2, &[1, 1, 1], 9),
        ];
        for a in &algs {
            assert!(check_associativity(a, 12).is_empty(), "{}", a.name());
            assert!(check_unit(a).is_empty(), "{}", a.name());
            assert!(commutativity_witness(a, 12, false).is_none(), "{}", a.name());
        }
        assert_eq!(hilbert_series(&algs[1]).coeffs(), &[2, 2, 2, 2, 2, 2, 2, 2, 2]);
        assert_eq!(hilbert_series(&algs[3]).coeffs(), &[1, 3, 1, 3, 1, 3, 1, 3, 1, 3]);
    }

    #[test]
    fn json_round_trip() {
        let q = Field::rationals();
        let a = DenseAlgebra::square_zero_extension(&q, 2, &[1], 7).with_uniform_parity(Parity::Even);
        let text = serde_json::to_string(&a.to_file()).unwrap();
        let back = DenseAlgebra::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.to_file(), a.to_file());
        assert_eq!(back.parity(3, 0), Some(Parity::Even));
    }
}
