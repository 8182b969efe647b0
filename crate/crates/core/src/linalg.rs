//! Dense exact linear algebra over a [`Field`]: incremental echelon subspaces,
//! ranks and kernels. Vectors are plain `Vec<Elem>`.

use crate::scalars::{Elem, Field};

pub type Vector = Vec<Elem>;

pub fn zero_vec(field: &Field, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn unit_vec(field: &Field, n: usize, k: usize) -> Vector {
    let mut v = zero_vec(field, n);
    v[k] = field.one();
    v
}

pub fn is_zero_vec(field: &Field, v: &[Elem]) -> bool {
    v.iter().all(|c| field.is_zero(c))
}

/// acc += c·v
pub fn add_scaled(field: &Field, acc: &mut [Elem], c: &Elem, v: &[Elem]) {
    if field.is_zero(c) {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !field.is_zero(x) {
            *a = field.add(a, &field.mul(c, x));
        }
    }
}

pub fn scale(field: &Field, c: &Elem, v: &[Elem]) -> Vector {
    v.iter().map(|x| field.mul(c, x)).collect()
}

pub fn sub_vec(field: &Field, a: &[Elem], b: &[Elem]) -> Vector {
    a.iter().zip(b).map(|(x, y)| field.sub(x, y)).collect()
}

/// Σ coeffs_j · vectors_j
pub fn combine(field: &Field, coeffs: &[Elem], vectors: &[Vector], dim: usize) -> Vector {
    let mut acc = zero_vec(field, dim);
    for (c, v) in coeffs.iter().zip(vectors) {
        add_scaled(field, &mut acc, c, v);
    }
    acc
}

/// A subspace kept in echelon form, remembering how each echelon row was
/// obtained from the independent vectors that were inserted.
#[derive(Clone, Debug)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
    /// rows[k] = Σ_j combos[k][j] · basis[j]
    combos: Vec<Vector>,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn new(field: &Field, ambient: usize) -> Subspace {
        Subspace { field: field.clone(), ambient, rows: Vec::new(), pivots: Vec::new(), combos: Vec::new(), basis: Vec::new() }
    }

    pub fn spanned_by(field: &Field, ambient: usize, vectors: impl IntoIterator<Item = Vector>) -> Subspace {
        let mut s = Subspace::new(field, ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn full(field: &Field, ambient: usize) -> Subspace {
        Self::spanned_by(field, ambient, (0..ambient).map(|k| unit_vec(field, ambient, k)))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    /// The inserted independent vectors.
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Reduce `v` against the echelon rows: returns (residual, multipliers per row).
    fn reduce(&self, v: &[Elem]) -> (Vector, Vector) {
        let f = &self.field;
        let mut r = v.to_vec();
        let mut mult = zero_vec(f, self.rows.len());
        for (k, (row, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if !f.is_zero(&r[p]) {
                let c = r[p].clone();
                add_scaled(f, &mut r, &f.neg(&c), row);
                mult[k] = c;
            }
        }
        (r, mult)
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        is_zero_vec(&self.field, &self.reduce(v).0)
    }

    /// Add `v`; returns true if it enlarged the subspace.
    pub fn insert(&mut self, v: Vector) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length does not match ambient dimension");
        let f = self.field.clone();
        let (mut r, mult) = self.reduce(&v);
        let Some(p) = r.iter().position(|c| !f.is_zero(c)) else {
            return false;
        };
        let inv = f.inv(&r[p]).expect("pivot is nonzero");
        r = scale(&f, &inv, &r);
        // r = (v - Σ mult_k rows_k)·inv
        let n = self.basis.len();
        let mut combo = zero_vec(&f, n + 1);
        for (k, m) in mult.iter().enumerate() {
            if !f.is_zero(m) {
                let mut c = self.combos[k].clone();
                c.push(f.zero());
                add_scaled(&f, &mut combo, &f.neg(m), &c);
            }
        }
        combo[n] = f.one();
        let combo = scale(&f, &inv, &combo);
        for c in self.combos.iter_mut() {
            c.push(f.zero());
        }
        self.rows.push(r);
        self.pivots.push(p);
        self.combos.push(combo);
        self.basis.push(v);
        true
    }

    /// Coordinates of `v` with respect to [`Subspace::basis`], if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Elem]) -> Option<Vector> {
        let f = &self.field;
        let (r, mult) = self.reduce(v);
        if !is_zero_vec(f, &r) {
            return None;
        }
        let mut out = zero_vec(f, self.basis.len());
        for (m, c) in mult.iter().zip(&self.combos) {
            add_scaled(f, &mut out, m, c);
        }
        Some(out)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// A standard basis vector outside the subspace, if any.
    pub fn missing_unit(&self) -> Option<usize> {
        (0..self.ambient).find(|&k| !self.contains(&unit_vec(&self.field, self.ambient, k)))
    }
}

pub fn rank(field: &Field, vectors: &[Vector], ambient: usize) -> usize {
    Subspace::spanned_by(field, ambient, vectors.iter().cloned()).dim()
}

/// Basis of { c : Σ_j c_j · images_j = 0 }.
pub fn kernel(field: &Field, images: &[Vector], target_dim: usize) -> Vec<Vector> {
    let n = images.len();
    // augmented rows [image_j | e_j]; rows whose image part vanishes after elimination span the kernel
    let mut sub = Subspace::new(field, target_dim + n);
    let mut kernel_rows = Vec::new();
    for (j, img) in images.iter().enumerate() {
        let mut row = img.clone();
        row.extend(unit_vec(field, n, j));
        let (r, _) = sub.reduce(&row);
        if is_zero_vec(field, &r[..target_dim]) {
            kernel_rows.push(r[target_dim..].to_vec());
        } else {
            sub.insert(row);
        }
    }
    kernel_rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    fn v(f: &Field, xs: &[i64]) -> Vector {
        xs.iter().map(|&x| f.from_i64(x)).collect()
    }

    #[test]
    fn coordinates_recover_combination() {
        let f = q();
        let b = vec![v(&f, &[1, 2, 0]), v(&f, &[0, 1, 1])];
        let s = Subspace::spanned_by(&f, 3, b.clone());
        let target = v(&f, &[3, 4, -2]); // 3·b0 - 2·b1
        assert_eq!(s.coordinates(&target).unwrap(), v(&f, &[3, -2]));
        assert!(s.coordinates(&v(&f, &[0, 0, 1])).is_none());
        assert_eq!(s.missing_unit(), Some(0));
    }

    #[test]
    fn kernel_of_dependent_images() {
        let f = q();
        let imgs = vec![v(&f, &[1, 1]), v(&f, &[2, 2]), v(&f, &[0, 1])];
        let k = kernel(&f, &imgs, 2);
        assert_eq!(k.len(), 1);
        let back = combine(&f, &k[0], &imgs, 2);
        assert!(is_zero_vec(&f, &back));
        assert_eq!(rank(&f, &imgs, 2), 2);
    }

    #[test]
    fn mod_p_rank() {
        let f = Field::prime(3).unwrap();
        // rows (1,1) and (1,-2): equal mod 3
        let imgs = vec![v(&f, &[1, 1]), v(&f, &[1, -2])];
        assert_eq!(rank(&f, &imgs, 2), 1);
    }
}
