//! Exact field arithmetic: Q, prime fields F_p, and towers of finite
//! extensions presented by monic defining polynomials.
//!
//! An element of a tower field of total degree D over its prime field is a
//! flat vector of D prime-field coordinates. The flattening is recursive:
//! an element of level L is a polynomial of degree < d_L in the level-L
//! generator whose coefficients are elements of level L-1, stored one after
//! another. So a level-(L-1) element embeds into level L by zero padding.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest prime characteristic accepted (products must fit in u128 before reduction).
pub const MAX_CHARACTERISTIC: u64 = u64::MAX >> 1;

/// Caps for the brute-force irreducibility search.
const ROOT_SEARCH_CAP: u128 = 1 << 22;
const TRIAL_DIVISION_CAP: u128 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is neither 0 nor a prime")]
    BadCharacteristic(u64),
    #[error("characteristic {0} exceeds the supported machine-word range")]
    CharacteristicTooLarge(u64),
    #[error("tower step {step}: {reason}")]
    MalformedStep { step: usize, reason: String },
    #[error("tower step {step}: defining polynomial is reducible ({witness})")]
    Reducible { step: usize, witness: String },
    #[error("tower step {step}: irreducibility cannot be decided here: {reason}")]
    Unsupported { step: usize, reason: String },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
    #[error("element has {got} coordinates, field needs {expected}")]
    BadLength { expected: usize, got: usize },
}

/// JSON form of a coefficient: an integer, a rational string such as `"-3/4"`,
/// or a nested list giving an element of the previous tower level in its
/// power basis (needed once the tower has two or more steps).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffRepr {
    Int(i64),
    Str(String),
    List(Vec<CoeffRepr>),
}

/// Serializable description of a field: `{"char": p, "tower": [[c0, c1, ...], ...]}`.
/// Each tower entry lists the coefficients of a defining polynomial, low degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    #[serde(rename = "char")]
    pub characteristic: u64,
    #[serde(default)]
    pub tower: Vec<Vec<CoeffRepr>>,
}

impl FieldDescriptor {
    pub fn rationals() -> Self {
        FieldDescriptor { characteristic: 0, tower: Vec::new() }
    }

    pub fn prime(p: u64) -> Self {
        FieldDescriptor { characteristic: p, tower: Vec::new() }
    }

    /// Parse the compact CLI notation: `Q`, `F7`, `GF(4)`, or a JSON descriptor.
    pub fn parse(text: &str) -> Result<Self, FieldError> {
        let t = text.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| FieldError::Parse(e.to_string()));
        }
        let upper = t.to_ascii_uppercase();
        if upper == "Q" || upper == "QQ" {
            return Ok(Self::rationals());
        }
        let digits = upper
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| upper.strip_prefix('F'))
            .or_else(|| upper.strip_prefix("GF"))
            .ok_or_else(|| FieldError::Parse(text.to_string()))?;
        let q: u64 = digits.parse().map_err(|_| FieldError::Parse(text.to_string()))?;
        prime_power_descriptor(q).ok_or_else(|| FieldError::Parse(text.to_string()))
    }
}

/// A standard descriptor for F_q, q = p^e with e ∈ {1, 2, 4, 8, ...} built as stacked quadratics
/// of the shape y² + y + a (char 2) or y² - a (odd char).
pub fn prime_power_descriptor(q: u64) -> Option<FieldDescriptor> {
    if q < 2 {
        return None;
    }
    let p = smallest_prime_factor(q);
    let mut e = 0u32;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    if r != 1 || !e.is_power_of_two() {
        return None;
    }
    let mut field = Field::prime(p).ok()?;
    while field.degree() < e as usize {
        field = field.adjoin_quadratic_standard().ok()?;
    }
    Some(field.descriptor().clone())
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

/// A prime-field coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Rat(BigRational),
    Mod(u64),
}

/// Field element as a flat coordinate vector over the prime field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub Vec<Coord>);

#[derive(Debug)]
struct Step {
    degree: usize,
    /// Dimension of the level below (over the prime field).
    below: usize,
    /// Low coefficients c_0..c_{d-1} of the monic defining polynomial, as level-below elements.
    low: Vec<Elem>,
}

#[derive(Debug)]
struct FieldInner {
    descriptor: FieldDescriptor,
    characteristic: u64,
    steps: Vec<Step>,
    dim: usize,
}

/// A validated field. Cheap to clone, safe to share across threads.
#[derive(Clone, Debug)]
pub struct Field {
    inner: Arc<FieldInner>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        self.inner.characteristic == other.inner.characteristic
            && self.inner.steps.len() == other.inner.steps.len()
            && self
                .inner
                .steps
                .iter()
                .zip(&other.inner.steps)
                .all(|(a, b)| a.degree == b.degree && a.low == b.low)
    }
}
impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = if self.inner.characteristic == 0 {
            "Q".to_string()
        } else {
            format!("F{}", self.inner.characteristic)
        };
        if self.inner.steps.is_empty() {
            write!(f, "{base}")
        } else if let Some(size) = self.size() {
            write!(f, "GF({size})")
        } else {
            write!(f, "{base}(degree {})", self.degree())
        }
    }
}

impl Field {
    pub fn rationals() -> Field {
        Field::new(&FieldDescriptor::rationals()).expect("Q is always valid")
    }

    pub fn prime(p: u64) -> Result<Field, FieldError> {
        Field::new(&FieldDescriptor::prime(p))
    }

    /// Validate a descriptor. Every tower step is checked for irreducibility.
    pub fn new(desc: &FieldDescriptor) -> Result<Field, FieldError> {
        let p = desc.characteristic;
        if p != 0 {
            if p > MAX_CHARACTERISTIC {
                return Err(FieldError::CharacteristicTooLarge(p));
            }
            if !is_prime(p) {
                return Err(FieldError::BadCharacteristic(p));
            }
        }
        let mut field = Field {
            inner: Arc::new(FieldInner {
                descriptor: FieldDescriptor::prime(p),
                characteristic: p,
                steps: Vec::new(),
                dim: 1,
            }),
        };
        for (idx, poly) in desc.tower.iter().enumerate() {
            let coeffs = poly
                .iter()
                .map(|c| field.from_repr(c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| FieldError::MalformedStep { step: idx + 1, reason: e.to_string() })?;
            field = field.adjoin_checked(&coeffs, idx + 1)?;
        }
        // keep the caller's spelling of the descriptor for round trips
        let inner = Arc::get_mut(&mut field.inner).expect("fresh field is uniquely owned");
        inner.descriptor = desc.clone();
        Ok(field)
    }

    /// Adjoin a root of `coeffs` (low degree first, elements of `self`).
    pub fn adjoin(&self, coeffs: &[Elem]) -> Result<Field, FieldError> {
        self.adjoin_checked(coeffs, self.inner.steps.len() + 1)
    }

    fn adjoin_checked(&self, coeffs: &[Elem], step: usize) -> Result<Field, FieldError> {
        let mut poly: Vec<Elem> = coeffs.to_vec();
        while poly.last().is_some_and(|c| self.is_zero(c)) {
            poly.pop();
        }
        if poly.len() < 2 {
            return Err(FieldError::MalformedStep {
                step,
                reason: "defining polynomial must have degree at least 1".into(),
            });
        }
        let lead_inv = self.inv(poly.last().unwrap())?;
        let monic: Vec<Elem> = poly.iter().map(|c| self.mul(c, &lead_inv)).collect();
        check_irreducible(self, &monic, step)?;
        let degree = monic.len() - 1;
        let mut steps: Vec<Step> = self
            .inner
            .steps
            .iter()
            .map(|s| Step { degree: s.degree, below: s.below, low: s.low.clone() })
            .collect();
        steps.push(Step { degree, below: self.inner.dim, low: monic[..degree].to_vec() });
        let mut descriptor = self.inner.descriptor.clone();
        descriptor.tower.push(poly.iter().map(|c| self.to_repr(c)).collect());
        Ok(Field {
            inner: Arc::new(FieldInner {
                descriptor,
                characteristic: self.inner.characteristic,
                steps,
                dim: self.inner.dim * degree,
            }),
        })
    }

    /// Adjoin a root of the first irreducible y² + y + a (char 2) or y² − a (odd char),
    /// scanning a over the field's elements in enumeration order.
    pub fn adjoin_quadratic_standard(&self) -> Result<Field, FieldError> {
        let elements = self.elements().ok_or_else(|| FieldError::Unsupported {
            step: self.inner.steps.len() + 1,
            reason: "standard quadratic search needs a small finite field".into(),
        })?;
        let one = self.one();
        for a in elements {
            let coeffs = if self.characteristic() == 2 {
                vec![a, one.clone(), one.clone()]
            } else {
                vec![self.neg(&a), self.zero(), one.clone()]
            };
            if let Ok(f) = self.adjoin(&coeffs) {
                return Ok(f);
            }
        }
        Err(FieldError::Unsupported {
            step: self.inner.steps.len() + 1,
            reason: "no irreducible quadratic of the standard shape".into(),
        })
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.inner.descriptor
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.characteristic
    }

    /// Dimension over the prime field.
    pub fn degree(&self) -> usize {
        self.inner.dim
    }

    /// Degrees of the individual tower steps.
    pub fn step_degrees(&self) -> Vec<usize> {
        self.inner.steps.iter().map(|s| s.degree).collect()
    }

    pub fn is_prime_field(&self) -> bool {
        self.inner.steps.is_empty()
    }

    pub fn prime_field(&self) -> Field {
        Field::prime_or_q(self.inner.characteristic)
    }

    fn prime_or_q(p: u64) -> Field {
        if p == 0 {
            Field::rationals()
        } else {
            Field::prime(p).expect("characteristic already validated")
        }
    }

    /// Number of elements, for finite fields.
    pub fn size(&self) -> Option<BigUint> {
        if self.inner.characteristic == 0 {
            None
        } else {
            Some(num_traits::pow(BigUint::from(self.inner.characteristic), self.inner.dim))
        }
    }

    /// The subfield obtained by dropping the top tower step.
    pub fn parent(&self) -> Option<Field> {
        let n = self.inner.steps.len();
        if n == 0 {
            return None;
        }
        let mut desc = self.inner.descriptor.clone();
        desc.tower.truncate(n - 1);
        Some(Field {
            inner: Arc::new(FieldInner {
                descriptor: desc,
                characteristic: self.inner.characteristic,
                steps: self.inner.steps[..n - 1]
                    .iter()
                    .map(|s| Step { degree: s.degree, below: s.below, low: s.low.clone() })
                    .collect(),
                dim: self.inner.steps[n - 1].below,
            }),
        })
    }

    // ---- prime-field coordinate arithmetic ----

    fn c_zero(&self) -> Coord {
        if self.inner.characteristic == 0 {
            Coord::Rat(BigRational::zero())
        } else {
            Coord::Mod(0)
        }
    }

    fn c_from_i64(&self, v: i64) -> Coord {
        let p = self.inner.characteristic;
        if p == 0 {
            Coord::Rat(BigRational::from_integer(BigInt::from(v)))
        } else {
            Coord::Mod(v.rem_euclid(p as i64) as u64)
        }
    }

    fn c_is_zero(c: &Coord) -> bool {
        match c {
            Coord::Rat(r) => r.is_zero(),
            Coord::Mod(v) => *v == 0,
        }
    }

    fn c_add(&self, a: &Coord, b: &Coord) -> Coord {
        match (a, b) {
            (Coord::Rat(x), Coord::Rat(y)) => Coord::Rat(x + y),
            (Coord::Mod(x), Coord::Mod(y)) => {
                let p = self.inner.characteristic as u128;
                Coord::Mod(((*x as u128 + *y as u128) % p) as u64)
            }
            _ => unreachable!("coordinate kinds agree within one field"),
        }
    }

    fn c_neg(&self, a: &Coord) -> Coord {
        match a {
            Coord::Rat(x) => Coord::Rat(-x),
            Coord::Mod(x) => {
                let p = self.inner.characteristic;
                Coord::Mod(if *x == 0 { 0 } else { p - x })
            }
        }
    }

    fn c_mul(&self, a: &Coord, b: &Coord) -> Coord {
        match (a, b) {
            (Coord::Rat(x), Coord::Rat(y)) => Coord::Rat(x * y),
            (Coord::Mod(x), Coord::Mod(y)) => {
                let p = self.inner.characteristic as u128;
                Coord::Mod(((*x as u128 * *y as u128) % p) as u64)
            }
            _ => unreachable!("coordinate kinds agree within one field"),
        }
    }

    fn c_inv(&self, a: &Coord) -> Result<Coord, FieldError> {
        if Self::c_is_zero(a) {
            return Err(FieldError::ZeroInverse);
        }
        Ok(match a {
            Coord::Rat(x) => Coord::Rat(x.recip()),
            Coord::Mod(x) => {
                let p = self.inner.characteristic;
                Coord::Mod(mod_pow(*x, p - 2, p))
            }
        })
    }

    // ---- element arithmetic ----

    pub fn zero(&self) -> Elem {
        Elem(vec![self.c_zero(); self.inner.dim])
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Elem {
        let mut e = self.zero();
        e.0[0] = self.c_from_i64(v);
        e
    }

    /// The rational number num/den, reduced into the prime field.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Elem, FieldError> {
        if den == 0 {
            return Err(FieldError::ZeroInverse);
        }
        if self.inner.characteristic == 0 {
            let mut e = self.zero();
            e.0[0] = Coord::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)));
            Ok(e)
        } else {
            let d = self.c_inv(&self.c_from_i64(den))?;
            let mut e = self.zero();
            e.0[0] = self.c_mul(&self.c_from_i64(num), &d);
            Ok(e)
        }
    }

    pub fn from_rational(&self, r: &BigRational) -> Result<Elem, FieldError> {
        let mut e = self.zero();
        let p = self.inner.characteristic;
        if p == 0 {
            e.0[0] = Coord::Rat(r.clone());
        } else {
            let pb = BigInt::from(p);
            let n = r.numer().mod_floor(&pb).to_u64().unwrap();
            let d = r.denom().mod_floor(&pb).to_u64().unwrap();
            e.0[0] = self.c_mul(&Coord::Mod(n), &self.c_inv(&Coord::Mod(d))?);
        }
        Ok(e)
    }

    /// Coordinate basis vector (flattened power basis).
    pub fn basis_element(&self, idx: usize) -> Elem {
        let mut e = self.zero();
        e.0[idx] = self.c_from_i64(1);
        e
    }

    /// Name of a flattened basis vector, e.g. `1`, `θ1`, `θ1θ2^2`.
    pub fn basis_label(&self, idx: usize) -> String {
        let mut rest = idx;
        let mut parts = Vec::new();
        for (level, st) in self.inner.steps.iter().enumerate().rev() {
            let exp = rest / st.below;
            rest %= st.below;
            match exp {
                0 => {}
                1 => parts.push(format!("θ{}", level + 1)),
                e => parts.push(format!("θ{}^{}", level + 1, e)),
            }
        }
        parts.reverse();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("")
        }
    }

    /// The generator of tower level `level` (1-based), embedded in the top field.
    pub fn generator(&self, level: usize) -> Elem {
        assert!(level >= 1 && level <= self.inner.steps.len());
        self.basis_element(self.inner.steps[level - 1].below)
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.0.iter().all(Self::c_is_zero)
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn check(&self, a: &Elem) -> Result<(), FieldError> {
        if a.0.len() != self.inner.dim {
            return Err(FieldError::BadLength { expected: self.inner.dim, got: a.0.len() });
        }
        let p = self.inner.characteristic;
        for c in &a.0 {
            let ok = match c {
                Coord::Rat(_) => p == 0,
                Coord::Mod(v) => p != 0 && *v < p,
            };
            if !ok {
                return Err(FieldError::FieldMismatch);
            }
        }
        Ok(())
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        Elem(a.0.iter().zip(&b.0).map(|(x, y)| self.c_add(x, y)).collect())
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        Elem(a.0.iter().map(|x| self.c_neg(x)).collect())
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        Elem(self.mul_level(self.inner.steps.len(), &a.0, &b.0))
    }

    /// Multiply by an element of the prime field given as an integer.
    pub fn scale_i64(&self, a: &Elem, k: i64) -> Elem {
        let c = self.c_from_i64(k);
        Elem(a.0.iter().map(|x| self.c_mul(x, &c)).collect())
    }

    fn mul_level(&self, level: usize, a: &[Coord], b: &[Coord]) -> Vec<Coord> {
        if level == 0 {
            return vec![self.c_mul(&a[0], &b[0])];
        }
        let st = &self.inner.steps[level - 1];
        let (d, sub) = (st.degree, st.below);
        let zero_sub = vec![self.c_zero(); sub];
        let mut prod: Vec<Vec<Coord>> = vec![zero_sub.clone(); 2 * d - 1];
        for i in 0..d {
            let ai = &a[i * sub..(i + 1) * sub];
            if ai.iter().all(Self::c_is_zero) {
                continue;
            }
            for j in 0..d {
                let bj = &b[j * sub..(j + 1) * sub];
                if bj.iter().all(Self::c_is_zero) {
                    continue;
                }
                let term = self.mul_level(level - 1, ai, bj);
                for (acc, t) in prod[i + j].iter_mut().zip(&term) {
                    *acc = self.c_add(acc, t);
                }
            }
        }
        // θ^d = -Σ c_j θ^j
        for k in (d..2 * d - 1).rev() {
            let top = std::mem::replace(&mut prod[k], zero_sub.clone());
            if top.iter().all(Self::c_is_zero) {
                continue;
            }
            for (j, cj) in st.low.iter().enumerate() {
                let term = self.mul_level(level - 1, &top, &cj.0);
                for (acc, t) in prod[k - d + j].iter_mut().zip(&term) {
                    *acc = self.c_add(acc, &self.c_neg(t));
                }
            }
        }
        prod.truncate(d);
        prod.into_iter().flatten().collect()
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by solving the multiplication-by-a linear system over the prime field.
    pub fn inv(&self, a: &Elem) -> Result<Elem, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::ZeroInverse);
        }
        let n = self.inner.dim;
        if n == 1 {
            return Ok(Elem(vec![self.c_inv(&a.0[0])?]));
        }
        // augmented matrix rows: unknown x with a·x = 1; column j of M is a·e_j
        let cols: Vec<Vec<Coord>> = (0..n).map(|j| self.mul(a, &self.basis_element(j)).0).collect();
        let mut m: Vec<Vec<Coord>> = (0..n)
            .map(|r| {
                let mut row: Vec<Coord> = (0..n).map(|j| cols[j][r].clone()).collect();
                row.push(if r == 0 { self.c_from_i64(1) } else { self.c_zero() });
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !Self::c_is_zero(&m[r][col]))
                .expect("multiplication by a nonzero field element is invertible");
            m.swap(col, piv);
            let pinv = self.c_inv(&m[col][col])?;
            for x in m[col].iter_mut() {
                *x = self.c_mul(x, &pinv);
            }
            for r in 0..n {
                if r != col && !Self::c_is_zero(&m[r][col]) {
                    let f = m[r][col].clone();
                    for c in col..=n {
                        let t = self.c_mul(&f, &m[col][c]);
                        m[r][c] = self.c_add(&m[r][c], &self.c_neg(&t));
                    }
                }
            }
        }
        Ok(Elem(m.into_iter().map(|mut r| r.pop().unwrap()).collect()))
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Coordinates of `a` over the prime field, each as a prime-field element.
    pub fn prime_coordinates(&self, a: &Elem) -> Vec<Elem> {
        a.0.iter().map(|c| Elem(vec![c.clone()])).collect()
    }

    /// Embed a prime-field element (single coordinate) into this field.
    pub fn embed_prime(&self, c: &Elem) -> Elem {
        let mut e = self.zero();
        e.0[0] = c.0[0].clone();
        e
    }

    /// Embed an element of a lower tower level (shorter coordinate vector) by zero padding.
    pub fn embed_lower(&self, a: &Elem) -> Elem {
        let mut v = a.0.clone();
        v.resize(self.inner.dim, self.c_zero());
        Elem(v)
    }

    /// All elements, in lexicographic coordinate order, when the field has at most 2^20 elements.
    pub fn elements(&self) -> Option<Vec<Elem>> {
        let size = self.size()?.to_u64()?;
        if size > 1 << 20 {
            return None;
        }
        let p = self.inner.characteristic;
        let n = self.inner.dim;
        let mut out = Vec::with_capacity(size as usize);
        for mut k in 0..size {
            let mut coords = Vec::with_capacity(n);
            for _ in 0..n {
                coords.push(Coord::Mod(k % p));
                k /= p;
            }
            out.push(Elem(coords));
        }
        Some(out)
    }

    /// Integer value when `a` is (the image of) an integer in the prime subfield.
    pub fn as_integer(&self, a: &Elem) -> Option<BigInt> {
        if !a.0[1..].iter().all(Self::c_is_zero) {
            return None;
        }
        match &a.0[0] {
            Coord::Rat(r) if r.is_integer() => Some(r.to_integer()),
            Coord::Rat(_) => None,
            Coord::Mod(v) => Some(BigInt::from(*v)),
        }
    }

    // ---- serialization ----

    /// Nested representation (see [`CoeffRepr`]).
    pub fn to_repr(&self, a: &Elem) -> CoeffRepr {
        self.repr_level(self.inner.steps.len(), &a.0)
    }

    fn repr_level(&self, level: usize, coords: &[Coord]) -> CoeffRepr {
        if level == 0 {
            return match &coords[0] {
                Coord::Rat(r) => match (r.is_integer(), r.to_integer().to_i64()) {
                    (true, Some(v)) => CoeffRepr::Int(v),
                    _ => CoeffRepr::Str(r.to_string()),
                },
                Coord::Mod(v) => match i64::try_from(*v) {
                    Ok(x) => CoeffRepr::Int(x),
                    Err(_) => CoeffRepr::Str(v.to_string()),
                },
            };
        }
        let st = &self.inner.steps[level - 1];
        CoeffRepr::List(
            (0..st.degree)
                .map(|i| self.repr_level(level - 1, &coords[i * st.below..(i + 1) * st.below]))
                .collect(),
        )
    }

    /// Parse a coefficient. Integers and rationals land in the prime subfield;
    /// a list is read as an element of the top level in its power basis.
    pub fn from_repr(&self, r: &CoeffRepr) -> Result<Elem, FieldError> {
        let coords = self.parse_level(self.inner.steps.len(), r)?;
        Ok(Elem(coords))
    }

    fn parse_level(&self, level: usize, r: &CoeffRepr) -> Result<Vec<Coord>, FieldError> {
        let dim = if level == 0 { 1 } else { self.inner.steps[level - 1].below * self.inner.steps[level - 1].degree };
        match r {
            CoeffRepr::Int(v) => {
                let mut out = vec![self.c_zero(); dim];
                out[0] = self.c_from_i64(*v);
                Ok(out)
            }
            CoeffRepr::Str(s) => {
                let q = parse_rational(s)?;
                let e = self.from_rational(&q)?;
                let mut out = vec![self.c_zero(); dim];
                out[0] = e.0[0].clone();
                Ok(out)
            }
            CoeffRepr::List(items) => {
                if level == 0 {
                    if items.len() == 1 {
                        return self.parse_level(0, &items[0]);
                    }
                    return Err(FieldError::Parse(format!("{items:?} in the prime field")));
                }
                let st = &self.inner.steps[level - 1];
                if items.len() > st.degree {
                    return Err(FieldError::Parse(format!(
                        "{} coefficients exceed level degree {}",
                        items.len(),
                        st.degree
                    )));
                }
                let mut out = Vec::with_capacity(dim);
                for i in 0..st.degree {
                    match items.get(i) {
                        Some(item) => out.extend(self.parse_level(level - 1, item)?),
                        None => out.extend(vec![self.c_zero(); st.below]),
                    }
                }
                Ok(out)
            }
        }
    }

    /// Human-readable form: `3`, `-1/2`, `θ1+1`, ...
    pub fn format(&self, a: &Elem) -> String {
        let mut terms = Vec::new();
        for (idx, c) in a.0.iter().enumerate() {
            if Self::c_is_zero(c) {
                continue;
            }
            let coef = match c {
                Coord::Rat(r) => r.to_string(),
                Coord::Mod(v) => v.to_string(),
            };
            let label = self.basis_label(idx);
            terms.push(match (label.as_str(), coef.as_str()) {
                ("1", _) => coef,
                (_, "1") => label,
                _ => format!("{coef}·{label}"),
            });
        }
        if terms.is_empty() {
            return "0".into();
        }
        terms.reverse();
        terms.join("+")
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let s = s.trim();
    let bad = || FieldError::Parse(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

fn mod_pow(b: u64, mut e: u64, p: u64) -> u64 {
    let p128 = p as u128;
    let mut acc: u128 = 1 % p128;
    let mut base = b as u128 % p128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p128;
        }
        base = base * base % p128;
        e >>= 1;
    }
    acc as u64
}

// ---- univariate polynomials over a field (irreducibility support) ----

fn poly_trim(field: &Field, p: &mut Vec<Elem>) {
    while p.last().is_some_and(|c| field.is_zero(c)) {
        p.pop();
    }
}

fn poly_rem(field: &Field, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let mut r = a.to_vec();
    poly_trim(field, &mut r);
    let db = b.len() - 1;
    let lead_inv = field.inv(&b[db]).expect("divisor has nonzero leading coefficient");
    while r.len() > db {
        let k = r.len() - 1;
        let q = field.mul(&r[k], &lead_inv);
        for j in 0..=db {
            let t = field.mul(&q, &b[j]);
            r[k - db + j] = field.sub(&r[k - db + j], &t);
        }
        poly_trim(field, &mut r);
    }
    r
}

fn poly_eval(field: &Field, p: &[Elem], x: &Elem) -> Elem {
    let mut acc = field.zero();
    for c in p.iter().rev() {
        acc = field.add(&field.mul(&acc, x), c);
    }
    acc
}

fn check_irreducible(base: &Field, monic: &[Elem], step: usize) -> Result<(), FieldError> {
    let d = monic.len() - 1;
    if d == 1 {
        return Ok(());
    }
    if let Some(size) = base.size() {
        let q = size.to_u128().unwrap_or(u128::MAX);
        if d <= 3 {
            // reducible iff it has a root
            if q > ROOT_SEARCH_CAP {
                return Err(FieldError::Unsupported {
                    step,
                    reason: format!("root search over {q} elements exceeds the cap"),
                });
            }
            for x in base.elements().expect("small finite field") {
                if base.is_zero(&poly_eval(base, monic, &x)) {
                    return Err(FieldError::Reducible { step, witness: format!("root {}", base.format(&x)) });
                }
            }
            return Ok(());
        }
        let half = d / 2;
        let count = (1..=half).try_fold(0u128, |acc, k| q.checked_pow(k as u32).and_then(|v| acc.checked_add(v)));
        match count {
            Some(c) if c <= TRIAL_DIVISION_CAP => {}
            _ => {
                return Err(FieldError::Unsupported {
                    step,
                    reason: format!("trial division up to degree {half} over a field of size {q} exceeds the cap"),
                })
            }
        }
        let elems = base.elements().expect("small finite field");
        for k in 1..=half {
            // monic divisors t^k + Σ_{j<k} a_j t^j, enumerated in mixed radix
            let total = (q as usize).pow(k as u32);
            for code in 0..total {
                let mut c = code;
                let mut div: Vec<Elem> = Vec::with_capacity(k + 1);
                for _ in 0..k {
                    div.push(elems[c % q as usize].clone());
                    c /= q as usize;
                }
                div.push(base.one());
                if poly_rem(base, monic, &div).is_empty() {
                    let names: Vec<String> = div.iter().map(|e| base.format(e)).collect();
                    return Err(FieldError::Reducible { step, witness: format!("factor with coefficients [{}]", names.join(", ")) });
                }
            }
        }
        return Ok(());
    }
    // characteristic zero
    if !base.is_prime_field() || d > 3 {
        return Err(FieldError::Unsupported {
            step,
            reason: "over characteristic 0 only extensions of Q of degree ≤ 3 are checked".into(),
        });
    }
    let rats: Vec<BigRational> = monic
        .iter()
        .map(|e| match &e.0[0] {
            Coord::Rat(r) => r.clone(),
            Coord::Mod(_) => unreachable!(),
        })
        .collect();
    if let Some(root) = rational_root(&rats) {
        return Err(FieldError::Reducible { step, witness: format!("rational root {root}") });
    }
    Ok(())
}

/// A rational root of Σ c_i t^i, if one exists.
fn rational_root(coeffs: &[BigRational]) -> Option<BigRational> {
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    if ints[0].is_zero() {
        return Some(BigRational::zero());
    }
    let eval = |x: &BigRational| -> bool {
        let mut acc = BigRational::zero();
        for c in ints.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc.is_zero()
    };
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.abs();
        let mut out = Vec::new();
        let mut k = BigInt::one();
        while &k * &k <= n {
            if (&n % &k).is_zero() {
                out.push(k.clone());
                out.push(&n / &k);
            }
            k += 1;
        }
        out
    };
    let lead = ints.last().unwrap();
    for p in divisors(&ints[0]) {
        for q in divisors(lead) {
            for sign in [1, -1] {
                let x = BigRational::new(&p * BigInt::from(sign), q.clone());
                if eval(&x) {
                    return Some(x);
                }
            }
        }
    }
    None
}

/// Dimension over the prime field of the field described by `desc` (validated first).
pub fn field_extension_degree(desc: &FieldDescriptor) -> Result<usize, FieldError> {
    Ok(Field::new(desc)?.degree())
}

/// A field element bundled with its field, with checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    field: Field,
    value: Elem,
}

impl Scalar {
    pub fn new(field: &Field, value: Elem) -> Result<Scalar, FieldError> {
        field.check(&value)?;
        Ok(Scalar { field: field.clone(), value })
    }

    pub fn from_i64(field: &Field, v: i64) -> Scalar {
        Scalar { field: field.clone(), value: field.from_i64(v) }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> &Elem {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero(&self.value)
    }

    fn same(&self, other: &Scalar) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same(other)?;
        Ok(Scalar { field: self.field.clone(), value: self.field.add(&self.value, &other.value) })
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same(other)?;
        Ok(Scalar { field: self.field.clone(), value: self.field.sub(&self.value, &other.value) })
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same(other)?;
        Ok(Scalar { field: self.field.clone(), value: self.field.mul(&self.value, &other.value) })
    }

    pub fn neg(&self) -> Scalar {
        Scalar { field: self.field.clone(), value: self.field.neg(&self.value) }
    }

    pub fn inv(&self) -> Result<Scalar, FieldError> {
        Ok(Scalar { field: self.field.clone(), value: self.field.inv(&self.value)? })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(&self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Field {
        Field::new(&FieldDescriptor { characteristic: 2, tower: vec![vec![CoeffRepr::Int(1), CoeffRepr::Int(1), CoeffRepr::Int(1)]] }).unwrap()
    }

    fn f16_stacked() -> Field {
        f4().adjoin_quadratic_standard().unwrap()
    }

    #[test]
    fn degrees() {
        assert_eq!(Field::prime(2).unwrap().degree(), 1);
        assert_eq!(f4().degree(), 2);
        let f16 = f16_stacked();
        assert_eq!(f16.degree(), 4);
        assert_eq!(f16.elements().unwrap().len(), 16);
        assert_eq!(field_extension_degree(f16.descriptor()).unwrap(), 4);
    }

    #[test]
    fn half_plus_half() {
        let q = Field::rationals();
        let h = Scalar::new(&q, q.from_ratio(1, 2).unwrap()).unwrap();
        assert_eq!(h.add(&h).unwrap(), Scalar::from_i64(&q, 1));
    }

    #[test]
    fn x_squared_in_f4() {
        // oracle: x^2 = x + 1 mod x^2 + x + 1 over F_2
        let f = f4();
        let x = f.generator(1);
        assert_eq!(f.mul(&x, &x), f.add(&x, &f.one()));
    }

    #[test]
    fn zero_inverse_is_error() {
        let q = Field::rationals();
        assert_eq!(Scalar::from_i64(&q, 0).inv(), Err(FieldError::ZeroInverse));
        assert_eq!(f4().inv(&f4().zero()), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn mismatch_is_error() {
        let a = Scalar::from_i64(&Field::rationals(), 1);
        let b = Scalar::from_i64(&Field::prime(5).unwrap(), 1);
        assert_eq!(a.add(&b), Err(FieldError::FieldMismatch));
    }

    #[test]
    fn reducible_rejected() {
        // x^2 + 1 = (x + 1)^2 over F_2
        let d = FieldDescriptor { characteristic: 2, tower: vec![vec![CoeffRepr::Int(1), CoeffRepr::Int(0), CoeffRepr::Int(1)]] };
        assert!(matches!(Field::new(&d), Err(FieldError::Reducible { .. })));
        // x^2 - 4 over Q
        let d = FieldDescriptor { characteristic: 0, tower: vec![vec![CoeffRepr::Int(-4), CoeffRepr::Int(0), CoeffRepr::Int(1)]] };
        assert!(matches!(Field::new(&d), Err(FieldError::Reducible { .. })));
        let d = FieldDescriptor { characteristic: 6, tower: vec![] };
        assert_eq!(Field::new(&d).unwrap_err(), FieldError::BadCharacteristic(6));
    }

    #[test]
    fn quartic_trial_division() {
        // x^4 + x + 1 irreducible over F_2; x^4 + x^2 + 1 = (x^2+x+1)^2 is not
        let ok = FieldDescriptor { characteristic: 2, tower: vec![[1, 1, 0, 0, 1].iter().map(|&v| CoeffRepr::Int(v)).collect()] };
        assert_eq!(Field::new(&ok).unwrap().degree(), 4);
        let bad = FieldDescriptor { characteristic: 2, tower: vec![[1, 0, 1, 0, 1].iter().map(|&v| CoeffRepr::Int(v)).collect()] };
        assert!(matches!(Field::new(&bad), Err(FieldError::Reducible { .. })));
    }

    #[test]
    fn sqrt2_over_q() {
        let d = FieldDescriptor { characteristic: 0, tower: vec![vec![CoeffRepr::Int(-2), CoeffRepr::Int(0), CoeffRepr::Int(1)]] };
        let f = Field::new(&d).unwrap();
        let r = f.generator(1);
        assert_eq!(f.mul(&r, &r), f.from_i64(2));
        let s = f.add(&r, &f.one());
        let si = f.inv(&s).unwrap();
        assert!(f.is_one(&f.mul(&s, &si)));
    }

    #[test]
    fn every_nonzero_element_inverts() {
        for f in [Field::prime(7).unwrap(), f4(), f16_stacked(), Field::new(&FieldDescriptor::parse("F9").unwrap()).unwrap()] {
            for a in f.elements().unwrap() {
                if f.is_zero(&a) {
                    continue;
                }
                let ai = f.inv(&a).unwrap();
                assert!(f.is_one(&f.mul(&a, &ai)), "{} in {}", f.format(&a), f);
            }
        }
    }

    #[test]
    fn f16_is_a_field_by_enumeration() {
        // multiplicative group of order 15 is cyclic: some element has order 15
        let f = f16_stacked();
        let els = f.elements().unwrap();
        let has_gen = els.iter().any(|a| {
            !f.is_zero(a) && (1..15).all(|k| !f.is_one(&f.pow(a, k))) && f.is_one(&f.pow(a, 15))
        });
        assert!(has_gen);
    }

    #[test]
    fn descriptor_round_trip() {
        let f = f16_stacked();
        let json = serde_json::to_string(f.descriptor()).unwrap();
        let back: FieldDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(Field::new(&back).unwrap(), f);
        assert_eq!(FieldDescriptor::parse("Q").unwrap().characteristic, 0);
        assert_eq!(Field::new(&FieldDescriptor::parse("GF(256)").unwrap()).unwrap().degree(), 8);
        for a in f.elements().unwrap() {
            assert_eq!(f.from_repr(&f.to_repr(&a)).unwrap(), a);
        }
    }

    #[test]
    fn from_ratio_mod_p() {
        let f = Field::prime(7).unwrap();
        // 1/2 = 4 mod 7
        assert_eq!(f.from_ratio(1, 2).unwrap(), f.from_i64(4));
        assert_eq!(f.from_i64(-1), f.from_i64(6));
    }
}
