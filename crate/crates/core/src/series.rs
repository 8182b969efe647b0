//! Hilbert series: dense and sparse coefficient data, GK-dimension estimates,
//! growth classification, multiplicity, rational closed forms and certified
//! partial-sum bound checks.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{self, Interval};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("horizon {horizon} too small: need at least {needed} coefficients")]
    HorizonTooSmall { horizon: usize, needed: usize },
    #[error("degree {n} is beyond the horizon {horizon}")]
    BeyondHorizon { n: usize, horizon: usize },
    #[error("degree must be at least 2 for a GK estimate, got {0}")]
    DegreeTooSmall(usize),
    #[error("cannot evaluate bound: {0}")]
    BadBound(String),
    #[error("malformed series input: {0}")]
    Parse(String),
}

/// Dense truncated Hilbert series: `coeffs[n]` = dimension in degree n, for n = 0..=horizon.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HilbertSeries {
    coeffs: Vec<u64>,
}

impl HilbertSeries {
    pub fn new(coeffs: Vec<u64>) -> HilbertSeries {
        assert!(!coeffs.is_empty(), "a series has at least the degree-0 coefficient");
        HilbertSeries { coeffs }
    }

    pub fn from_fn(horizon: usize, f: impl Fn(usize) -> u64) -> HilbertSeries {
        HilbertSeries { coeffs: (0..=horizon).map(f).collect() }
    }

    pub fn zero(horizon: usize) -> HilbertSeries {
        Self::from_fn(horizon, |_| 0)
    }

    pub fn horizon(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coefficient(&self, n: usize) -> u64 {
        self.coeffs.get(n).copied().unwrap_or(0)
    }

    /// Σ_{i ≤ n} coeff_i.
    pub fn partial_sum(&self, n: usize) -> u128 {
        self.coeffs[..=n.min(self.horizon())].iter().map(|&c| c as u128).sum()
    }

    pub fn partial_sums(&self) -> Vec<u128> {
        let mut acc = 0u128;
        self.coeffs
            .iter()
            .map(|&c| {
                acc += c as u128;
                acc
            })
            .collect()
    }

    /// Coefficientwise sum, truncated to the smaller horizon.
    pub fn add(&self, other: &HilbertSeries) -> HilbertSeries {
        let h = self.horizon().min(other.horizon());
        Self::from_fn(h, |n| self.coeffs[n] + other.coeffs[n])
    }

    /// Multiplication by t^k (keeps the horizon).
    pub fn shift(&self, k: usize) -> HilbertSeries {
        Self::from_fn(self.horizon(), |n| if n >= k { self.coeffs[n - k] } else { 0 })
    }

    pub fn truncate(&self, horizon: usize) -> HilbertSeries {
        Self::from_fn(horizon.min(self.horizon()), |n| self.coeffs[n])
    }

    pub fn to_csv(&self, index_name: &str) -> String {
        let mut out = format!("{index_name},dim\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{n},{c}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<HilbertSeries, SeriesError> {
        let mut coeffs: Vec<u64> = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (k == 0 && line.chars().next().is_some_and(|c| c.is_alphabetic())) {
                continue;
            }
            let (n, d) = line.split_once(',').ok_or_else(|| SeriesError::Parse(line.into()))?;
            let n: usize = n.trim().parse().map_err(|_| SeriesError::Parse(line.into()))?;
            let d: u64 = d.trim().parse().map_err(|_| SeriesError::Parse(line.into()))?;
            if n >= coeffs.len() {
                coeffs.resize(n + 1, 0);
            }
            coeffs[n] = d;
        }
        if coeffs.is_empty() {
            return Err(SeriesError::Parse("no rows".into()));
        }
        Ok(HilbertSeries { coeffs })
    }

    pub fn to_file(&self) -> SeriesFile {
        SeriesFile::Dense { horizon: self.horizon(), coefficients: self.coeffs.clone() }
    }
}

/// Sparse series with arbitrary-precision degrees; absent degrees have dimension 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSeries {
    horizon: BigUint,
    terms: BTreeMap<BigUint, BigUint>,
}

impl SparseSeries {
    pub fn new(horizon: BigUint) -> SparseSeries {
        SparseSeries { horizon, terms: BTreeMap::new() }
    }

    pub fn from_dense(h: &HilbertSeries) -> SparseSeries {
        let mut s = SparseSeries::new(BigUint::from(h.horizon()));
        for (n, &c) in h.coeffs.iter().enumerate() {
            s.add_term(BigUint::from(n), BigUint::from(c));
        }
        s
    }

    pub fn horizon(&self) -> &BigUint {
        &self.horizon
    }

    pub fn add_term(&mut self, degree: BigUint, dim: BigUint) {
        if dim.is_zero() {
            return;
        }
        assert!(degree <= self.horizon, "term beyond horizon");
        *self.terms.entry(degree).or_insert_with(BigUint::zero) += dim;
    }

    pub fn coefficient(&self, degree: &BigUint) -> BigUint {
        self.terms.get(degree).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &BigUint)> {
        self.terms.iter()
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn partial_sum(&self, degree: &BigUint) -> BigUint {
        self.terms.range(..=degree.clone()).map(|(_, v)| v).sum()
    }

    pub fn add(&self, other: &SparseSeries) -> SparseSeries {
        let h = self.horizon.clone().min(other.horizon.clone());
        let mut out = SparseSeries::new(h.clone());
        for (d, v) in self.terms.iter().chain(other.terms.iter()) {
            if *d <= h {
                out.add_term(d.clone(), v.clone());
            }
        }
        out
    }

    pub fn to_file(&self) -> SeriesFile {
        SeriesFile::Sparse {
            horizon: self.horizon.to_string(),
            terms: self.terms.iter().map(|(d, v)| [d.to_string(), v.to_string()]).collect(),
        }
    }
}

/// JSON form of a series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SeriesFile {
    Dense { horizon: usize, coefficients: Vec<u64> },
    Sparse { horizon: String, terms: Vec<[String; 2]> },
}

impl SeriesFile {
    pub fn to_dense(&self) -> Result<HilbertSeries, SeriesError> {
        match self {
            SeriesFile::Dense { horizon, coefficients } => {
                if coefficients.len() != horizon + 1 {
                    return Err(SeriesError::Parse(format!("{} coefficients for horizon {horizon}", coefficients.len())));
                }
                Ok(HilbertSeries::new(coefficients.clone()))
            }
            SeriesFile::Sparse { .. } => {
                let s = self.to_sparse()?;
                let h = s.horizon.to_usize().filter(|&h| h <= 10_000_000).ok_or_else(|| SeriesError::Parse("sparse horizon too large to densify".into()))?;
                let mut coeffs = vec![0u64; h + 1];
                for (d, v) in s.terms() {
                    coeffs[d.to_usize().unwrap()] = v.to_u64().ok_or_else(|| SeriesError::Parse("dimension exceeds 64 bits".into()))?;
                }
                Ok(HilbertSeries::new(coeffs))
            }
        }
    }

    pub fn to_sparse(&self) -> Result<SparseSeries, SeriesError> {
        match self {
            SeriesFile::Dense { .. } => Ok(SparseSeries::from_dense(&self.to_dense()?)),
            SeriesFile::Sparse { horizon, terms } => {
                let parse = |s: &str| s.parse::<BigUint>().map_err(|_| SeriesError::Parse(s.into()));
                let mut out = SparseSeries::new(parse(horizon)?);
                let mut last: Option<BigUint> = None;
                for [d, v] in terms {
                    let d = parse(d)?;
                    if last.as_ref().is_some_and(|l| *l >= d) {
                        return Err(SeriesError::Parse("sparse degrees must be strictly increasing".into()));
                    }
                    if d > out.horizon {
                        return Err(SeriesError::Parse("term beyond horizon".into()));
                    }
                    last = Some(d.clone());
                    out.add_term(d, parse(v)?);
                }
                Ok(out)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// GK-dimension estimates

// estimates are floating point by nature; certified logs are reserved for bound checks
fn ln_f64(v: u128) -> f64 {
    (v as f64).ln()
}

/// log_n(Σ_{i≤n} coeff_i) and a dyadic-increment extrapolation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GkEstimate {
    pub n: usize,
    /// log_n of the partial sum (0 when the partial sum is 0).
    pub raw: f64,
    /// raw values at n/8, n/4, n/2, n (those ≥ 2).
    pub samples: Vec<(usize, f64)>,
    /// log_2 of (Σ_n − Σ_{n/2}) / (Σ_{n/2} − Σ_{n/4}); removes the constant term of Σ.
    pub extrapolated: Option<f64>,
    /// The partial sum is zero (or the tail above n/2 vanishes).
    pub zero: bool,
}

impl GkEstimate {
    /// The reported estimate: the extrapolation when defined, else the raw value; 0 for a vanishing tail.
    pub fn value(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.extrapolated.unwrap_or(self.raw)
        }
    }
}

fn raw_log(sums: &[u128], n: usize) -> f64 {
    let s = sums[n];
    if s <= 1 {
        return 0.0;
    }
    ln_f64(s) / ln_f64(n as u128)
}

pub fn gk_estimate(h: &HilbertSeries, n: usize) -> Result<GkEstimate, SeriesError> {
    if n < 2 {
        return Err(SeriesError::DegreeTooSmall(n));
    }
    if n > h.horizon() {
        return Err(SeriesError::BeyondHorizon { n, horizon: h.horizon() });
    }
    let sums = h.partial_sums();
    let raw = raw_log(&sums, n);
    let samples: Vec<(usize, f64)> = [n / 8, n / 4, n / 2, n].iter().filter(|&&k| k >= 2).map(|&k| (k, raw_log(&sums, k))).collect();
    let (half, quarter) = (n / 2, n / 4);
    let upper = sums[n] - sums[half];
    let lower = sums[half] - sums[quarter];
    let zero = sums[n] == 0 || upper == 0;
    let extrapolated = if zero || lower == 0 || quarter == 0 {
        None
    } else {
        Some((upper as f64 / lower as f64).log2())
    };
    Ok(GkEstimate { n, raw, samples, extrapolated, zero })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum GrowthClass {
    FiniteDimensional,
    /// GK-dimension ≈ 1.
    Linear,
    /// Estimate strictly between 1 and 2, which no finitely generated symmetric operad can realize.
    GapRegion { estimate: f64 },
    /// GK-dimension ≈ d for an integer d ≥ 2.
    Polynomial { degree: u32 },
    Unclassified { estimate: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub class: GrowthClass,
    pub estimate: GkEstimate,
    /// (n, raw, extrapolated) at dyadic n up to the horizon.
    pub sequence: Vec<(usize, f64, Option<f64>)>,
    /// max over the last half of the horizon of Σ_{i≤n}/n².
    pub tail_sum_over_n2: f64,
    pub gap_flag: bool,
}

/// Tolerance for calling an estimate an integer GK-dimension.
pub const GROWTH_TOLERANCE: f64 = 0.1;

pub fn classify_growth(h: &HilbertSeries) -> Result<GrowthReport, SeriesError> {
    let n = h.horizon();
    if n < 100 {
        return Err(SeriesError::HorizonTooSmall { horizon: n, needed: 100 });
    }
    let estimate = gk_estimate(h, n)?;
    let mut sequence = Vec::new();
    let mut k = 4;
    while k < n {
        let e = gk_estimate(h, k)?;
        sequence.push((k, e.raw, e.extrapolated));
        k *= 2;
    }
    sequence.push((n, estimate.raw, estimate.extrapolated));
    let sums = h.partial_sums();
    let tail_sum_over_n2 = (n / 2..=n).filter(|&k| k > 0).map(|k| sums[k] as f64 / (k as f64 * k as f64)).fold(0.0, f64::max);
    let tail_zero = h.coeffs[n / 2..].iter().all(|&c| c == 0);
    let value = estimate.value();
    let class = if tail_zero {
        GrowthClass::FiniteDimensional
    } else if (value - 1.0).abs() < GROWTH_TOLERANCE {
        GrowthClass::Linear
    } else if value > 1.0 && value < 2.0 && (value - 2.0).abs() >= GROWTH_TOLERANCE {
        GrowthClass::GapRegion { estimate: value }
    } else if value >= 2.0 - GROWTH_TOLERANCE && (value - value.round()).abs() < GROWTH_TOLERANCE {
        GrowthClass::Polynomial { degree: value.round() as u32 }
    } else {
        GrowthClass::Unclassified { estimate: value }
    };
    let gap_flag = matches!(class, GrowthClass::GapRegion { .. });
    Ok(GrowthReport { class, estimate, sequence, tail_sum_over_n2, gap_flag })
}

// ---------------------------------------------------------------------------
// multiplicity

/// Which degrees count as the stable tail: [start_fraction·N, N], compared with the preceding window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailWindow {
    pub start_fraction: f64,
}

impl Default for TailWindow {
    fn default() -> Self {
        TailWindow { start_fraction: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    Finite(u64),
    /// Coefficients still growing across the tail window.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityReport {
    pub value: Multiplicity,
    pub window: (usize, usize),
    pub window_max: u64,
    pub previous_window_max: u64,
}

/// Limsup of the coefficients, read off the tail window (0 for a vanishing tail);
/// flagged unbounded when the tail maximum exceeds the maximum of the preceding window of equal length.
pub fn multiplicity(h: &HilbertSeries, policy: TailWindow) -> MultiplicityReport {
    let n = h.horizon();
    let start = ((n as f64) * policy.start_fraction).ceil() as usize;
    let start = start.min(n);
    let len = n - start + 1;
    let prev_start = start.saturating_sub(len);
    let window_max = h.coeffs[start..=n].iter().copied().max().unwrap_or(0);
    let previous_window_max = h.coeffs[prev_start..start].iter().copied().max().unwrap_or(0);
    let value = if window_max == 0 {
        Multiplicity::Finite(0)
    } else if window_max > previous_window_max {
        Multiplicity::Unbounded
    } else {
        Multiplicity::Finite(window_max)
    };
    MultiplicityReport { value, window: (start, n), window_max, previous_window_max }
}

// ---------------------------------------------------------------------------
// rational closed forms

/// Numerator / denominator over Q, low degree first, denominator(0) = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalForm {
    pub numerator: Vec<BigRational>,
    pub denominator: Vec<BigRational>,
}

impl Serialize for RationalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            numerator: Vec<String>,
            denominator: Vec<String>,
            display: String,
        }
        Out {
            numerator: self.numerator.iter().map(|c| c.to_string()).collect(),
            denominator: self.denominator.iter().map(|c| c.to_string()).collect(),
            display: self.to_string(),
        }
        .serialize(s)
    }
}

fn poly_trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db).max(1)];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1;
        let c = &r[k] / &b[db];
        for j in 0..=db {
            let t = &c * &b[j];
            r[k - db + j] -= t;
        }
        q[k - db] = c;
        poly_trim(&mut r);
    }
    (q, r)
}

fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
    }
    x
}

impl RationalForm {
    /// First `len` Taylor coefficients.
    pub fn expand(&self, len: usize) -> Vec<BigRational> {
        let d0 = &self.denominator[0];
        let mut out: Vec<BigRational> = Vec::with_capacity(len);
        for n in 0..len {
            let mut v = self.numerator.get(n).cloned().unwrap_or_else(BigRational::zero);
            for j in 1..self.denominator.len().min(n + 1) {
                v -= &self.denominator[j] * &out[n - j];
            }
            out.push(v / d0);
        }
        out
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator.len() == 1
    }
}

fn format_poly(p: &[BigRational]) -> String {
    let mut out = String::new();
    for (k, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push(if neg { '-' } else { '+' });
        }
        let coef = if mag.is_integer() { mag.to_integer().to_string() } else { format!("({mag})") };
        match k {
            0 => out.push_str(&coef),
            _ => {
                if !mag.is_one() {
                    out.push_str(&coef);
                }
                out.push('t');
                if k > 1 {
                    out.push_str(&format!("^{k}"));
                }
            }
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

impl fmt::Display for RationalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = |p: &[BigRational]| p.iter().filter(|c| !c.is_zero()).count();
        let num = format_poly(&self.numerator);
        if self.is_polynomial() {
            return write!(f, "{num}");
        }
        let num = if terms(&self.numerator) > 1 { format!("({num})") } else { num };
        let den = format_poly(&self.denominator);
        let den = if terms(&self.denominator) > 1 { format!("({den})") } else { den };
        write!(f, "{num}/{den}")
    }
}

/// Minimal connection polynomial C (C(0) = 1) and linear complexity L.
fn berlekamp_massey(s: &[BigRational]) -> (Vec<BigRational>, usize) {
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = BigRational::one();
    for n in 0..s.len() {
        let mut d = s[n].clone();
        for i in 1..=l.min(c.len() - 1) {
            d += &c[i] * &s[n - i];
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = &d / &bd;
        let prev = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, BigRational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + m] -= &coef * bi;
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = prev;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    poly_trim(&mut c);
    (c, l)
}

/// Find the minimal constant-coefficient recurrence satisfied by the stored data and return the
/// reduced rational function. `Ok(None)` means no recurrence short enough to be certified by the data.
pub fn fit_rational(h: &HilbertSeries, max_den_degree: Option<usize>) -> Result<Option<RationalForm>, SeriesError> {
    let len = h.coeffs.len();
    if let Some(d) = max_den_degree {
        if len < 2 * d {
            return Err(SeriesError::HorizonTooSmall { horizon: h.horizon(), needed: 2 * d });
        }
    }
    let s: Vec<BigRational> = h.coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
    let (conn, l) = berlekamp_massey(&s);
    if 2 * l > len || max_den_degree.is_some_and(|d| conn.len() - 1 > d) {
        return Ok(None);
    }
    // numerator = (H · C) mod t^L
    let mut num = vec![BigRational::zero(); l];
    for (n, slot) in num.iter_mut().enumerate() {
        for (j, cj) in conn.iter().enumerate().take(n + 1) {
            *slot += cj * &s[n - j];
        }
    }
    poly_trim(&mut num);
    let mut den = conn;
    if num.is_empty() {
        den = vec![BigRational::one()];
    } else {
        let g = poly_gcd(&num, &den);
        if g.len() > 1 {
            num = poly_divrem(&num, &g).0;
            den = poly_divrem(&den, &g).0;
            poly_trim(&mut num);
            poly_trim(&mut den);
        }
        let d0 = den[0].clone();
        for c in num.iter_mut().chain(den.iter_mut()) {
            *c /= &d0;
        }
    }
    let form = RationalForm { numerator: num, denominator: den };
    if form.expand(len) != s {
        return Ok(None);
    }
    Ok(Some(form))
}

// ---------------------------------------------------------------------------
// certified bounds

/// Closed-form bound in the variable n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundExpr {
    Const(BigRational),
    N,
    Add(Box<BoundExpr>, Box<BoundExpr>),
    Sub(Box<BoundExpr>, Box<BoundExpr>),
    Mul(Box<BoundExpr>, Box<BoundExpr>),
    Ln(Box<BoundExpr>),
    Exp(Box<BoundExpr>),
}

impl BoundExpr {
    pub fn int(v: i64) -> BoundExpr {
        BoundExpr::Const(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn plus(self, o: BoundExpr) -> BoundExpr {
        BoundExpr::Add(Box::new(self), Box::new(o))
    }

    pub fn times(self, o: BoundExpr) -> BoundExpr {
        BoundExpr::Mul(Box::new(self), Box::new(o))
    }

    pub fn ln(self) -> BoundExpr {
        BoundExpr::Ln(Box::new(self))
    }

    /// c + (n+1)·ln(n+1)
    pub fn entropy_bound(c: BigRational) -> BoundExpr {
        let n1 = BoundExpr::N.plus(BoundExpr::int(1));
        BoundExpr::Const(c).plus(n1.clone().times(n1.ln()))
    }

    pub fn eval(&self, n: &BigRational, bits: u64) -> Result<Interval, SeriesError> {
        Ok(match self {
            BoundExpr::Const(c) => Interval::point(c.clone()),
            BoundExpr::N => Interval::point(n.clone()),
            BoundExpr::Add(a, b) => a.eval(n, bits)?.add(&b.eval(n, bits)?),
            BoundExpr::Sub(a, b) => a.eval(n, bits)?.sub(&b.eval(n, bits)?),
            BoundExpr::Mul(a, b) => a.eval(n, bits)?.mul(&b.eval(n, bits)?).round(bits),
            BoundExpr::Ln(a) => {
                let x = a.eval(n, bits)?;
                if !x.lo.is_positive() {
                    return Err(SeriesError::BadBound(format!("ln of a non-positive value at n = {n}")));
                }
                interval::ln_interval(&x, bits)
            }
            BoundExpr::Exp(a) => interval::exp_interval(&a.eval(n, bits)?, bits),
        })
    }

    /// Parse expressions built from numbers, `n`, `+ - *`, parentheses, `ln(..)`, `exp(..)`.
    pub fn parse(text: &str) -> Result<BoundExpr, SeriesError> {
        let tokens: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let e = parse_sum(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(SeriesError::BadBound(format!("unexpected input at position {pos} in {text:?}")));
        }
        Ok(e)
    }
}

fn parse_sum(t: &[char], pos: &mut usize) -> Result<BoundExpr, SeriesError> {
    let mut acc = parse_product(t, pos)?;
    while *pos < t.len() && (t[*pos] == '+' || t[*pos] == '-') {
        let op = t[*pos];
        *pos += 1;
        let rhs = parse_product(t, pos)?;
        acc = if op == '+' { BoundExpr::Add(Box::new(acc), Box::new(rhs)) } else { BoundExpr::Sub(Box::new(acc), Box::new(rhs)) };
    }
    Ok(acc)
}

fn parse_product(t: &[char], pos: &mut usize) -> Result<BoundExpr, SeriesError> {
    let mut acc = parse_atom(t, pos)?;
    while *pos < t.len() && t[*pos] == '*' {
        *pos += 1;
        let rhs = parse_atom(t, pos)?;
        acc = BoundExpr::Mul(Box::new(acc), Box::new(rhs));
    }
    Ok(acc)
}

fn parse_atom(t: &[char], pos: &mut usize) -> Result<BoundExpr, SeriesError> {
    let bad = |p: usize| SeriesError::BadBound(format!("cannot parse bound at position {p}"));
    if *pos >= t.len() {
        return Err(bad(*pos));
    }
    let rest: String = t[*pos..].iter().collect();
    for (name, wrap) in [("ln(", 0), ("exp(", 1)] {
        if rest.starts_with(name) {
            *pos += name.len();
            let inner = parse_sum(t, pos)?;
            if *pos >= t.len() || t[*pos] != ')' {
                return Err(bad(*pos));
            }
            *pos += 1;
            return Ok(if wrap == 0 { BoundExpr::Ln(Box::new(inner)) } else { BoundExpr::Exp(Box::new(inner)) });
        }
    }
    match t[*pos] {
        '(' => {
            *pos += 1;
            let inner = parse_sum(t, pos)?;
            if *pos >= t.len() || t[*pos] != ')' {
                return Err(bad(*pos));
            }
            *pos += 1;
            Ok(inner)
        }
        'n' => {
            *pos += 1;
            Ok(BoundExpr::N)
        }
        '-' => {
            *pos += 1;
            let inner = parse_atom(t, pos)?;
            Ok(BoundExpr::Sub(Box::new(BoundExpr::int(0)), Box::new(inner)))
        }
        c if c.is_ascii_digit() => {
            let start = *pos;
            while *pos < t.len() && (t[*pos].is_ascii_digit() || t[*pos] == '/') {
                *pos += 1;
            }
            let lit: String = t[start..*pos].iter().collect();
            let q = crate::scalars::parse_rational(&lit).map_err(|_| bad(start))?;
            Ok(BoundExpr::Const(q))
        }
        _ => Err(bad(*pos)),
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundExpr::Const(c) => write!(f, "{c}"),
            BoundExpr::N => write!(f, "n"),
            BoundExpr::Add(a, b) => write!(f, "({a}+{b})"),
            BoundExpr::Sub(a, b) => write!(f, "({a}-{b})"),
            BoundExpr::Mul(a, b) => write!(f, "{a}*{b}"),
            BoundExpr::Ln(a) => write!(f, "ln({a})"),
            BoundExpr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundFailure {
    pub n: usize,
    pub partial_sum: String,
    pub bound_lower: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub bound: String,
    pub range: (usize, usize),
    pub checked: usize,
    pub passed: bool,
    /// Sampled degrees where the partial sum certainly exceeds the bound (first few).
    pub failures: Vec<BoundFailure>,
    /// Degrees where the comparison could not be certified even at the maximal precision.
    pub inconclusive: Vec<usize>,
}

const BOUND_BITS: [u64; 5] = [48, 96, 192, 384, 768];

/// Certify Σ_{i≤n} coeff_i ≤ bound(n) for every n in `range` (inclusive).
pub fn series_bound_check(h: &HilbertSeries, bound: &BoundExpr, range: (usize, usize)) -> Result<BoundReport, SeriesError> {
    let (lo, hi) = range;
    if hi > h.horizon() {
        return Err(SeriesError::BeyondHorizon { n: hi, horizon: h.horizon() });
    }
    let sums = h.partial_sums();
    let outcomes: Vec<Result<(usize, Option<bool>, String), SeriesError>> = (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let lhs = Interval::point(BigRational::from_integer(BigInt::from(sums[n])));
            let nr = BigRational::from_integer(BigInt::from(n));
            let mut last = String::new();
            for bits in BOUND_BITS {
                let rhs = bound.eval(&nr, bits)?;
                last = format!("{:.6}", rhs.lo.to_f64().unwrap_or(f64::NAN));
                if let Some(v) = lhs.certainly_le(&rhs) {
                    return Ok((n, Some(v), last));
                }
            }
            Ok((n, None, last))
        })
        .collect();
    let mut failures = Vec::new();
    let mut inconclusive = Vec::new();
    for o in outcomes {
        let (n, verdict, rhs) = o?;
        match verdict {
            Some(true) => {}
            Some(false) => {
                if failures.len() < 10 {
                    failures.push(BoundFailure { n, partial_sum: sums[n].to_string(), bound_lower: rhs });
                }
            }
            None => inconclusive.push(n),
        }
    }
    let passed = failures.is_empty() && inconclusive.is_empty();
    Ok(BoundReport { bound: bound.to_string(), range, checked: hi + 1 - lo.min(hi + 1), passed, failures, inconclusive })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(h: usize) -> HilbertSeries {
        HilbertSeries::from_fn(h, |_| 1)
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn gk_all_ones() {
        let h = ones(2000);
        let e = gk_estimate(&h, 1000).unwrap();
        // oracle: log_1000(1001)
        let truth = (1001f64).ln() / (1000f64).ln();
        assert!((e.raw - truth).abs() < 1e-12);
        assert!((e.raw - 1.0).abs() < 0.001);
        assert_eq!(e.extrapolated, Some(1.0));
        let e2 = gk_estimate(&h, 2000).unwrap();
        assert!((e.raw - e2.raw).abs() < 0.01);
    }

    #[test]
    fn gk_linear_coefficients() {
        let h = HilbertSeries::from_fn(1000, |n| n as u64);
        let e = gk_estimate(&h, 1000).unwrap();
        assert!((e.value() - 2.0).abs() < 0.05, "{e:?}");
        assert!(e.raw < 2.0);
    }

    #[test]
    fn gk_finite_support() {
        let h = HilbertSeries::from_fn(1000, |n| if n <= 7 { 1 } else { 0 });
        let a = gk_estimate(&h, 100).unwrap();
        let b = gk_estimate(&h, 1000).unwrap();
        assert!(a.zero && b.zero);
        assert!(b.raw < a.raw);
        assert_eq!(b.value(), 0.0);
        assert!(gk_estimate(&h, 1).is_err());
    }

    #[test]
    fn growth_classes() {
        assert_eq!(classify_growth(&ones(200)).unwrap().class, GrowthClass::Linear);
        let fin = HilbertSeries::from_fn(200, |n| if n <= 7 { 3 } else { 0 });
        assert_eq!(classify_growth(&fin).unwrap().class, GrowthClass::FiniteDimensional);
        let lin = HilbertSeries::from_fn(200, |n| n as u64);
        assert_eq!(classify_growth(&lin).unwrap().class, GrowthClass::Polynomial { degree: 2 });
        // coefficients ~ sqrt(n): Σ ~ n^{1.5}
        let gap = HilbertSeries::from_fn(4000, |n| (n as f64).sqrt() as u64);
        assert!(classify_growth(&gap).unwrap().gap_flag);
        assert!(classify_growth(&ones(50)).is_err());
    }

    #[test]
    fn multiplicities() {
        let p = HilbertSeries::from_fn(200, |n| (n % 2) as u64);
        let qq = HilbertSeries::from_fn(200, |n| if n == 0 { 0 } else if n % 2 == 1 { 1 } else { 3 });
        let pol = TailWindow::default();
        assert_eq!(multiplicity(&p, pol).value, Multiplicity::Finite(1));
        assert_eq!(multiplicity(&qq, pol).value, Multiplicity::Finite(3));
        assert_eq!(multiplicity(&p.add(&qq), pol).value, Multiplicity::Finite(3));
        let fin = HilbertSeries::from_fn(200, |n| if n < 5 { 2 } else { 0 });
        assert_eq!(multiplicity(&fin, pol).value, Multiplicity::Finite(0));
        let grow = HilbertSeries::from_fn(200, |n| n as u64);
        assert_eq!(multiplicity(&grow, pol).value, Multiplicity::Unbounded);
    }

    #[test]
    fn rational_fits() {
        let h = HilbertSeries::from_fn(20, |n| if n == 0 { 0 } else { 1 });
        let f = fit_rational(&h, None).unwrap().unwrap();
        assert_eq!(f.to_string(), "t/(1-t)");
        let h = HilbertSeries::from_fn(20, |n| (n % 2) as u64);
        assert_eq!(fit_rational(&h, None).unwrap().unwrap().to_string(), "t/(1-t^2)");
        let h = HilbertSeries::from_fn(20, |n| [1, 3, 0, 2].get(n).copied().unwrap_or(0));
        let f = fit_rational(&h, None).unwrap().unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f.to_string(), "1+3t+2t^3");
        assert!(fit_rational(&HilbertSeries::from_fn(5, |_| 1), Some(4)).is_err());
        let zero = fit_rational(&HilbertSeries::zero(10), None).unwrap().unwrap();
        assert_eq!(zero.to_string(), "0");
    }

    #[test]
    fn fibonacci_fit_round_trips() {
        let mut fib = vec![0u64, 1];
        for k in 2..40 {
            fib.push(fib[k - 1] + fib[k - 2]);
        }
        let h = HilbertSeries::new(fib.clone());
        let f = fit_rational(&h, Some(4)).unwrap().unwrap();
        assert_eq!(f.to_string(), "t/(1-t-t^2)");
        let back: Vec<u64> = f.expand(40).iter().map(|c| c.to_integer().to_u64().unwrap()).collect();
        assert_eq!(back, fib);
    }

    #[test]
    fn bound_checks() {
        let bound = BoundExpr::parse("2*(n+1)*ln(n+1)+2").unwrap();
        let r = series_bound_check(&ones(10_000), &bound, (2, 10_000)).unwrap();
        assert!(r.passed, "{r:?}");
        let lin = HilbertSeries::from_fn(100, |n| n as u64);
        let r = series_bound_check(&lin, &bound, (2, 100)).unwrap();
        assert!(!r.passed);
        assert!(!r.failures.is_empty());
        let r = series_bound_check(&HilbertSeries::zero(50), &BoundExpr::int(1), (0, 50)).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn bound_parse_and_eval() {
        let e = BoundExpr::parse("3+(n+1)*ln(n+1)").unwrap();
        assert_eq!(e, BoundExpr::entropy_bound(q(3)));
        let v = e.eval(&q(9), 64).unwrap().midpoint_f64();
        assert!((v - (3.0 + 10.0 * 10f64.ln())).abs() < 1e-12);
        assert!(BoundExpr::parse("ln(n").is_err());
        let v = BoundExpr::parse("exp(1)-1/2").unwrap().eval(&q(0), 64).unwrap().midpoint_f64();
        assert!((v - (std::f64::consts::E - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let h = HilbertSeries::from_fn(20, |n| (n * n % 7) as u64);
        assert_eq!(HilbertSeries::from_csv(&h.to_csv("degree")).unwrap(), h);
        let json = serde_json::to_string(&h.to_file()).unwrap();
        let back: SeriesFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_dense().unwrap(), h);
        let sparse = SparseSeries::from_dense(&h);
        let json = serde_json::to_string(&sparse.to_file()).unwrap();
        let back: SeriesFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_sparse().unwrap(), sparse);
        assert_eq!(sparse.partial_sum(&BigUint::from(20u32)), BigUint::from(h.partial_sum(20) as u64));
    }
}
