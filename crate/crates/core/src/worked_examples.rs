//! End-to-end pipelines: the field-tower algebra with logarithmic partial sums, the
//! nested-repeat algebra with its degree schedule, the binary squarefree algebra, and the
//! direct-sum multiplicity example.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::families::{make_family, FamilyError, FamilyKind, FamilySpec};
use crate::functors::{self, functor_g_str, FunctorError};
use crate::graded_algebra::{
    self, cancellation_check, hilbert_series, saturation_condition_check, torsion_elements, AlgebraError, DenseAlgebra, Generator,
    GradedAlgebra, MultiplicationWitness, NormalWordAlgebra, Rule, SaturationReport, Side,
};
use crate::interval::{self, entropy_gap_big, Interval};
use crate::operad::{check_axioms, is_central, OperadError};
use crate::scalars::{Field, FieldError};
use crate::series::{
    self, fit_rational, gk_estimate, series_bound_check, BoundExpr, BoundReport, GkEstimate, HilbertSeries, Multiplicity, SeriesError,
    SeriesFile, SparseSeries, TailWindow,
};

#[derive(Debug, Error)]
pub enum ExampleError {
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("could not decide {0} within the precision limit")]
    Precision(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Operad(#[from] OperadError),
}

const CERT_BITS: [u64; 7] = [64, 128, 256, 512, 1024, 2048, 4096];

/// Run `decide` at increasing precision until it returns a verdict.
fn refine(what: impl FnOnce() -> String, decide: impl Fn(u64) -> Option<bool>) -> Result<bool, ExampleError> {
    for bits in CERT_BITS {
        if let Some(v) = decide(bits) {
            return Ok(v);
        }
    }
    Err(ExampleError::Precision(what()))
}

fn rat(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

// ---------------------------------------------------------------------------
// field tower algebra

/// f(x) = (x+1)ln(x+1) − x ln x ≥ m, decided with certified intervals.
fn entropy_at_least(x: &BigUint, m: u64) -> Result<bool, ExampleError> {
    let target = BigRational::from_integer(BigInt::from(m));
    refine(
        || format!("f({x}) ≥ {m}"),
        |bits| {
            let v = entropy_gap_big(x, bits);
            if v.lo >= target {
                Some(true)
            } else if v.hi < target {
                Some(false)
            } else {
                None
            }
        },
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaCertificate {
    pub m: u64,
    pub lambda: String,
    /// lower end of the interval enclosing f(λ)
    pub f_lambda_lower: String,
    /// upper end of the interval enclosing f(λ−1), absent when λ = 1
    pub f_previous_upper: Option<String>,
}

/// λ(m): the smallest positive integer with f(λ) ≥ m, certified by f(λ−1) < m ≤ f(λ).
pub fn lambda_of(m: u64) -> Result<BigUint, ExampleError> {
    if m == 0 {
        return Err(ExampleError::BadConfig("λ(m) needs m ≥ 1".into()));
    }
    let one = BigUint::one();
    if entropy_at_least(&one, m)? {
        return Ok(one);
    }
    // f(lo) < m ≤ f(hi)
    let mut lo = one.clone();
    let mut hi = BigUint::from(2u32);
    while !entropy_at_least(&hi, m)? {
        lo = hi.clone();
        hi <<= 1;
    }
    while &hi - &lo > one {
        let mid = (&lo + &hi) >> 1;
        if entropy_at_least(&mid, m)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn lambda_certificate(m: u64) -> Result<LambdaCertificate, ExampleError> {
    let lambda = lambda_of(m)?;
    let fmt = |v: &BigRational| format!("{:.9}", v.to_f64().unwrap_or(f64::NAN));
    let at = entropy_gap_big(&lambda, 64);
    let prev = (lambda > BigUint::one()).then(|| entropy_gap_big(&(&lambda - 1u32), 64));
    Ok(LambdaCertificate { m, lambda: lambda.to_string(), f_lambda_lower: fmt(&at.lo), f_previous_upper: prev.map(|p| fmt(&p.hi)) })
}

/// F_2 ⊂ F_4 ⊂ F_16 ⊂ … (each step a quadratic extension), `levels` steps above F_2.
pub fn binary_tower(levels: usize) -> Result<Vec<Field>, ExampleError> {
    let mut out = Vec::with_capacity(levels);
    let mut f = Field::prime(2)?;
    for _ in 0..levels {
        f = f.adjoin_quadratic_standard()?;
        out.push(f.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FieldTowerConfig {
    /// dim F_1 < dim F_2 < … over the base field
    pub tower_dims: Vec<u64>,
    pub n_max: usize,
}

impl FieldTowerConfig {
    /// Dimensions read off the F_{2^{2^s}} tower over F_2.
    pub fn binary(levels: usize, n_max: usize) -> Result<FieldTowerConfig, ExampleError> {
        let dims = binary_tower(levels)?.iter().map(|f| f.degree() as u64).collect();
        Ok(FieldTowerConfig { tower_dims: dims, n_max })
    }

    fn validate(&self) -> Result<(), ExampleError> {
        match self.tower_dims.first() {
            None => return Err(ExampleError::BadConfig("empty tower".into())),
            Some(&d) if d <= 1 => return Err(ExampleError::BadConfig("dim F_1 must exceed 1".into())),
            _ => {}
        }
        if self.tower_dims.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ExampleError::BadConfig("tower dimensions must strictly increase".into()));
        }
        if self.n_max < 2 {
            return Err(ExampleError::BadConfig("n_max must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerWindow {
    pub dim: u64,
    pub start: String,
    /// exclusive end (λ of the next dimension), absent for the last tower level
    pub end: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldTowerReport {
    pub n_max: usize,
    pub tower_dims: Vec<u64>,
    pub windows: Vec<TowerWindow>,
    pub series: SeriesFile,
    /// dim A_i ≤ f(i) at every 1 ≤ i ≤ n_max (certified)
    pub per_degree_bound: bool,
    pub per_degree_failures: Vec<usize>,
    pub constant_a: u64,
    pub sum_bound: BoundReport,
    pub gk: GkEstimate,
    /// maximum dimension seen on each window that meets the horizon
    pub window_maxima: Vec<u64>,
    pub unbounded_dims: bool,
    pub passed: bool,
}

/// dim A_i: 1 below λ(dim F_1), then dim F_s on [λ(dim F_s), λ(dim F_{s+1})).
pub fn field_tower_dims(config: &FieldTowerConfig) -> Result<(HilbertSeries, Vec<TowerWindow>), ExampleError> {
    config.validate()?;
    let lambdas: Vec<BigUint> = config.tower_dims.iter().map(|&d| lambda_of(d)).collect::<Result<_, _>>()?;
    let n = config.n_max;
    if lambdas.last().is_some_and(|l| *l <= BigUint::from(n)) {
        return Err(ExampleError::BadConfig(format!(
            "tower too short: λ({}) = {} ≤ n_max = {n}",
            config.tower_dims.last().unwrap(),
            lambdas.last().unwrap()
        )));
    }
    let windows = config
        .tower_dims
        .iter()
        .enumerate()
        .map(|(s, &dim)| TowerWindow { dim, start: lambdas[s].to_string(), end: lambdas.get(s + 1).map(|l| l.to_string()) })
        .collect();
    let h = HilbertSeries::from_fn(n, |i| {
        let i = BigUint::from(i);
        match lambdas.iter().rposition(|l| *l <= i) {
            None => 1,
            Some(s) => config.tower_dims[s],
        }
    });
    Ok((h, windows))
}

pub fn field_tower_series(config: &FieldTowerConfig) -> Result<FieldTowerReport, ExampleError> {
    let (h, windows) = field_tower_dims(config)?;
    let n = config.n_max;
    let checks: Vec<Result<(usize, bool), ExampleError>> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let dim = h.coefficient(i);
            // dim ≤ f(i) ⇔ ¬(f(i) < dim); f(i) ≥ dim is what we certify
            Ok((i, entropy_at_least(&BigUint::from(i), dim)?))
        })
        .collect();
    let mut per_degree_failures = Vec::new();
    for c in checks {
        let (i, ok) = c?;
        if !ok {
            per_degree_failures.push(i);
        }
    }
    let constant_a = lambda_of(config.tower_dims[0])?.to_u64().expect("small λ(dim F_1)");
    let bound = BoundExpr::entropy_bound(BigRational::from_integer(BigInt::from(constant_a)));
    let sum_bound = series_bound_check(&h, &bound, (1, n))?;
    let gk = gk_estimate(&h, n)?;
    let mut window_maxima = Vec::new();
    for w in &windows {
        let start: usize = w.start.parse().unwrap_or(usize::MAX);
        if start <= n {
            window_maxima.push(w.dim);
        }
    }
    let unbounded_dims = window_maxima.windows(2).all(|p| p[1] > p[0]) && window_maxima.len() >= 2;
    let gk_ok = (0.9..=1.05).contains(&gk.value());
    let passed = per_degree_failures.is_empty() && sum_bound.passed && gk_ok && unbounded_dims;
    Ok(FieldTowerReport {
        n_max: n,
        tower_dims: config.tower_dims.clone(),
        windows,
        series: h.to_file(),
        per_degree_bound: per_degree_failures.is_empty(),
        per_degree_failures,
        constant_a,
        sum_bound,
        gk,
        window_maxima,
        unbounded_dims,
        passed,
    })
}

/// The algebra itself as a subalgebra of F_top[t] over F_2, up to `horizon`: A_i = F_{s(i)}·t^i,
/// with F_{s(i)} the tower level active in degree i (F_2 below λ(dim F_1)).
/// The tower fields have nested coordinates, so F_s is spanned by the first dim F_s basis vectors of the top field.
pub fn field_tower_algebra(tower: &[Field], horizon: usize) -> Result<DenseAlgebra, ExampleError> {
    let top = tower.last().ok_or_else(|| ExampleError::BadConfig("empty tower".into()))?;
    let k = top.prime_field();
    let config = FieldTowerConfig { tower_dims: tower.iter().map(|f| f.degree() as u64).collect(), n_max: horizon.max(2) };
    let (h, _) = field_tower_dims(&config)?;
    let labels: Vec<Vec<String>> = (0..=horizon).map(|i| (0..h.coefficient(i) as usize).map(|r| format!("{}·t^{i}", top.basis_label(r))).collect()).collect();
    let mut unit = vec![k.one()];
    unit.truncate(h.coefficient(0) as usize);
    let a = DenseAlgebra::from_fn(&k, "field-tower algebra", labels, unit, |d1, i1, d2, i2| {
        let prod = top.mul(&top.basis_element(i1), &top.basis_element(i2));
        let coords = top.prime_coordinates(&prod);
        let target = h.coefficient(d1 + d2) as usize;
        debug_assert!(coords[target..].iter().all(|c| k.is_zero(c)));
        coords[..target].to_vec()
    });
    Ok(a)
}

// ---------------------------------------------------------------------------
// nested-repeat algebra

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleMode {
    /// d_{s+1} = 1 + ⌊exp(2α_s²(1+2β_s)²)⌋ starting from d_1
    Exponential { d1: u64 },
    /// explicit strictly increasing degrees d_1 < d_2 < …
    Custom(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct NestedRepeatConfig {
    pub mode: ScheduleMode,
    pub s_max: usize,
}

impl NestedRepeatConfig {
    pub fn custom(degrees: Vec<usize>) -> NestedRepeatConfig {
        let s = degrees.len();
        NestedRepeatConfig { mode: ScheduleMode::Custom(degrees), s_max: s }
    }

    pub fn exponential(s_max: usize) -> NestedRepeatConfig {
        NestedRepeatConfig { mode: ScheduleMode::Exponential { d1: 1 }, s_max }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowReport {
    /// the window is d_{s+1} ≤ i ≤ β_{s+1}
    pub start_degree: String,
    pub dims: Vec<String>,
    /// α_s²
    pub max_allowed: String,
    pub within_bound: bool,
    /// dims equal the self-convolution of A^{⟨s⟩}'s profile shifted by d_{s+1}
    pub matches_convolution: Option<bool>,
    /// every window word is f·x_{s+1}·g with f, g normal words in x_1..x_s
    pub unique_factorization: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMethod {
    /// d_{s+1} computed exactly and ln d_{s+1} enclosed by a certified interval
    Interval,
    /// d_{s+1} = 1 + ⌊e^E⌋ > e^E, so ln d_{s+1} > E without materializing d_{s+1}
    FloorBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleCertificate {
    /// E = 2α_s²(1+2β_s)²
    pub exponent: String,
    pub method: CertificateMethod,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub s: usize,
    pub d: String,
    pub d_exact: bool,
    pub alpha: String,
    pub beta: String,
    pub beta_exact: bool,
    /// β_s = d_s + 2β_{s-1} (s ≥ 2)
    pub beta_recurrence: Option<bool>,
    /// window d_{s+1} ≤ i ≤ β_{s+1}, when d_{s+1} is known
    pub window: Option<WindowReport>,
    pub schedule_certificate: Option<ScheduleCertificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NestedRepeatReport {
    pub mode: String,
    pub stages: Vec<Stage>,
    /// A_i = 0 strictly between β_s and d_{s+1}
    pub gaps_vanish: bool,
    /// dim S_A(i) = i·dim A_{i−1}, sparse (big degrees allowed)
    pub s_a_series: SeriesFile,
    /// the S_A dimensions from enumeration agree with those propagated from the profiles
    pub s_a_consistent: Option<bool>,
    /// smallest integer C with Σ_{i≤n} dim S_A(i) ≤ C·n·ln n on the materialized range (custom mode)
    pub log_bound_constant: Option<u64>,
    pub log_bound: Option<BoundReport>,
    pub passed: bool,
}

type Profile = BTreeMap<BigUint, BigUint>;

/// h_{s+1} = h_s + t^{d} h_s²: normal words use x_{s+1} at most once, as f·x_{s+1}·g.
fn square_shift(h: &Profile, d: &BigUint) -> Profile {
    let mut out = Profile::new();
    for (a, ca) in h {
        for (b, cb) in h {
            *out.entry(d + a + b).or_default() += ca * cb;
        }
    }
    out
}

fn next_profile(h: &Profile, d: &BigUint) -> Profile {
    let mut out = h.clone();
    for (k, v) in square_shift(h, d) {
        *out.entry(k).or_default() += v;
    }
    out
}

fn profile_total(h: &Profile) -> BigUint {
    h.values().sum()
}

fn profile_top(h: &Profile) -> BigUint {
    h.keys().next_back().cloned().unwrap_or_default()
}

fn window_dims(h: &Profile, d: &BigUint) -> Vec<BigUint> {
    let sq = square_shift(h, d);
    let top = profile_top(&sq);
    let mut out = Vec::new();
    let mut i = d.clone();
    while i <= top {
        out.push(sq.get(&i).cloned().unwrap_or_default());
        i += 1u32;
    }
    out
}

/// The nested-repeat presentation on generators x_1..x_k of the given degrees.
pub fn nested_repeat_algebra(field: &Field, degrees: &[usize], horizon: usize) -> Result<NormalWordAlgebra, ExampleError> {
    let gens = degrees.iter().enumerate().map(|(i, &d)| Generator::new(format!("x{}", i + 1), d)).collect();
    Ok(NormalWordAlgebra::new(field, gens, &[Rule::NestedRepeat], horizon)?)
}

const WORD_LIMIT: usize = 5_000_000;

fn custom_pipeline(degrees: &[usize]) -> Result<NestedRepeatReport, ExampleError> {
    if degrees.is_empty() || degrees[0] == 0 {
        return Err(ExampleError::BadConfig("custom schedule needs d_1 ≥ 1".into()));
    }
    if degrees.len() > 4 {
        return Err(ExampleError::BadConfig("custom mode supports s_max ≤ 4".into()));
    }
    if let Some(k) = degrees.windows(2).position(|w| w[1] <= w[0]) {
        return Err(ExampleError::BadConfig(format!("degrees must strictly increase (d_{} ≤ d_{})", k + 2, k + 1)));
    }
    // profiles first, to validate the schedule before enumerating anything
    let mut profiles: Vec<Profile> = vec![Profile::from([(BigUint::zero(), BigUint::one()), (BigUint::from(degrees[0]), BigUint::one())])];
    for s in 1..degrees.len() {
        let beta = profile_top(&profiles[s - 1]);
        if BigUint::from(degrees[s]) <= beta {
            return Err(ExampleError::BadConfig(format!("d_{} = {} must exceed β_{s} = {beta} (windows would overlap)", s + 1, degrees[s])));
        }
        profiles.push(next_profile(&profiles[s - 1], &BigUint::from(degrees[s])));
    }
    let horizon = profile_top(profiles.last().unwrap()).to_usize().ok_or_else(|| ExampleError::BadConfig("top degree too large".into()))?;
    let q = Field::rationals();
    let a = nested_repeat_algebra(&q, degrees, horizon)?;
    let h = hilbert_series(&a);
    let mut stages = Vec::new();
    let mut all_ok = true;
    for s in 1..=degrees.len() {
        let words = a.all_words(s, WORD_LIMIT)?;
        let alpha = words.len();
        let beta = words.iter().map(|w| a.word_degree(w)).max().unwrap_or(0);
        let h_s = &profiles[s - 1];
        let profile_ok = profile_total(h_s) == BigUint::from(alpha) && profile_top(h_s) == BigUint::from(beta);
        let beta_recurrence = (s >= 2).then(|| {
            let prev = profile_top(&profiles[s - 2]).to_usize().unwrap_or(usize::MAX);
            beta == degrees[s - 1] + 2 * prev
        });
        let window = degrees.get(s).map(|&d_next| {
            let conv = window_dims(h_s, &BigUint::from(d_next));
            let top = profiles[s].keys().next_back().and_then(|k| k.to_usize()).unwrap_or(0);
            let actual: Vec<u64> = (d_next..=top).map(|i| h.coefficient(i)).collect();
            let bound = (alpha * alpha) as u64;
            let matches = actual.len() == conv.len() && actual.iter().zip(&conv).all(|(x, y)| BigUint::from(*x) == *y);
            let unique = (s <= 2).then(|| {
                (d_next..=top).all(|i| {
                    a.words(i).iter().all(|w| {
                        let hits: Vec<usize> = w.iter().enumerate().filter(|(_, &l)| l == s).map(|(p, _)| p).collect();
                        hits.len() == 1
                            && w.iter().all(|&l| l <= s)
                            && a.is_normal(&w[..hits[0]])
                            && a.is_normal(&w[hits[0] + 1..])
                    })
                })
            });
            WindowReport {
                start_degree: d_next.to_string(),
                dims: actual.iter().map(u64::to_string).collect(),
                max_allowed: bound.to_string(),
                within_bound: actual.iter().all(|&x| x <= bound),
                matches_convolution: Some(matches),
                unique_factorization: unique,
            }
        });
        all_ok &= profile_ok;
        all_ok &= beta_recurrence.unwrap_or(true);
        if let Some(w) = &window {
            all_ok &= w.within_bound && w.matches_convolution == Some(true) && w.unique_factorization.unwrap_or(true);
        }
        stages.push(Stage {
            s,
            d: degrees[s - 1].to_string(),
            d_exact: true,
            alpha: alpha.to_string(),
            beta: beta.to_string(),
            beta_exact: true,
            beta_recurrence,
            window,
            schedule_certificate: None,
        });
    }
    // gaps β_s < i < d_{s+1}
    let mut gaps_vanish = true;
    for s in 1..degrees.len() {
        let beta = profile_top(&profiles[s - 1]).to_usize().unwrap_or(0);
        gaps_vanish &= (beta + 1..degrees[s]).all(|i| h.coefficient(i) == 0);
    }
    // S_A from enumeration and from the propagated profile
    let s_dims = HilbertSeries::from_fn(horizon + 1, |i| if i == 0 { 0 } else { i as u64 * h.coefficient(i - 1) });
    let full = profiles.last().unwrap();
    let s_consistent = (1..=horizon + 1).all(|i| {
        let from_profile = full.get(&BigUint::from(i - 1)).cloned().unwrap_or_default() * BigUint::from(i);
        BigUint::from(s_dims.coefficient(i)) == from_profile
    });
    let start = degrees[0] + 1;
    let sums = s_dims.partial_sums();
    let c_fit = (start.max(2)..=horizon + 1).map(|n| sums[n] as f64 / (n as f64 * (n as f64).ln())).fold(1.0, f64::max).ceil() as u64;
    let c_fit = c_fit.max(2);
    let expr = BoundExpr::int(c_fit as i64).times(BoundExpr::N).times(BoundExpr::N.ln());
    let log_bound = series_bound_check(&s_dims, &expr, (start.max(2), horizon + 1))?;
    let passed = all_ok && gaps_vanish && s_consistent && log_bound.passed;
    Ok(NestedRepeatReport {
        mode: "custom".into(),
        stages,
        gaps_vanish,
        s_a_series: SparseSeries::from_dense(&s_dims).to_file(),
        s_a_consistent: Some(s_consistent),
        log_bound_constant: Some(c_fit),
        log_bound: Some(log_bound),
        passed,
    })
}

/// 2α²(1+2β)²
fn schedule_exponent(alpha: &BigUint, beta: &BigUint) -> BigUint {
    let t: BigUint = BigUint::one() + beta * 2u32;
    BigUint::from(2u32) * alpha * alpha * &t * &t
}

/// 1 + ⌊e^E⌋, exactly.
fn one_plus_floor_exp(e: &BigUint) -> Result<BigUint, ExampleError> {
    let x = rat(e);
    for bits in CERT_BITS {
        if let Some(fl) = interval::exp(&x, bits).floor() {
            return Ok(fl.to_biguint().expect("positive") + 1u32);
        }
    }
    Err(ExampleError::Precision(format!("⌊e^{e}⌋")))
}

/// ln(d) ≥ E with d an exact integer, by interval enclosure.
fn ln_at_least(d: &BigUint, e: &BigUint) -> Result<bool, ExampleError> {
    let target = rat(e);
    let di = BigInt::from(d.clone());
    refine(
        || format!("ln({d}) ≥ {e}"),
        |bits| {
            let v: Interval = interval::ln_int(&di, bits);
            if v.lo >= target {
                Some(true)
            } else if v.hi < target {
                Some(false)
            } else {
                None
            }
        },
    )
}

/// Exponential schedule: degrees grow like towers of exponentials, so only (α_s, β_s, window profiles)
/// are propagated. d_2 is computed exactly; later d_s are carried as 1 + ⌊e^E⌋ with E exact when possible.
fn exponential_pipeline(d1: u64, s_max: usize) -> Result<NestedRepeatReport, ExampleError> {
    if d1 == 0 {
        return Err(ExampleError::BadConfig("d_1 must be positive".into()));
    }
    if s_max == 0 || s_max > 3 {
        return Err(ExampleError::BadConfig("exponential mode supports 1 ≤ s_max ≤ 3".into()));
    }
    let mut stages = Vec::new();
    let mut passed = true;
    // exact data while degrees are materializable
    let d1b = BigUint::from(d1);
    let mut profile: Profile = Profile::from([(BigUint::zero(), BigUint::one()), (d1b.clone(), BigUint::one())]);
    let mut alpha = BigUint::from(2u32);
    let mut beta: Option<BigUint> = Some(d1b.clone());
    let mut beta_text = d1b.to_string();
    let mut d_exact: Option<BigUint> = Some(d1b.clone());
    let mut d_text = d1b.to_string();
    let mut prev_beta: Option<BigUint> = None;
    let mut s_a = SparseSeries::new(BigUint::zero());
    let mut s_a_done = false;
    for s in 1..=s_max {
        let beta_recurrence = match (&prev_beta, &d_exact, &beta) {
            (Some(pb), Some(d), Some(b)) if s >= 2 => Some(*b == d + pb * 2u32),
            _ => None,
        };
        let (certificate, next_d, next_d_text) = match &beta {
            Some(b) => {
                let e = schedule_exponent(&alpha, b);
                if e.bits() <= 24 {
                    let dn = one_plus_floor_exp(&e)?;
                    let holds = ln_at_least(&dn, &e)?;
                    (ScheduleCertificate { exponent: e.to_string(), method: CertificateMethod::Interval, holds }, Some(dn.clone()), dn.to_string())
                } else {
                    let text = format!("1 + ⌊e^{e}⌋");
                    (ScheduleCertificate { exponent: e.to_string(), method: CertificateMethod::FloorBound, holds: true }, None, text)
                }
            }
            None => {
                let e = format!("2·{}·(1 + 2β_{s})²", &alpha * &alpha);
                let text = format!("1 + ⌊e^({e})⌋");
                (ScheduleCertificate { exponent: e, method: CertificateMethod::FloorBound, holds: true }, None, text)
            }
        };
        passed &= certificate.holds;
        let window = next_d.as_ref().map(|dn| {
            let dims = window_dims(&profile, dn);
            let bound = &alpha * &alpha;
            WindowReport {
                start_degree: dn.to_string(),
                within_bound: dims.iter().all(|x| *x <= bound),
                dims: dims.iter().map(BigUint::to_string).collect(),
                max_allowed: bound.to_string(),
                matches_convolution: None,
                unique_factorization: None,
            }
        });
        if let Some(w) = &window {
            passed &= w.within_bound;
        }
        passed &= beta_recurrence.unwrap_or(true);
        stages.push(Stage {
            s,
            d: d_text.clone(),
            d_exact: d_exact.is_some(),
            alpha: alpha.to_string(),
            beta: beta_text.clone(),
            beta_exact: beta.is_some(),
            beta_recurrence,
            window,
            schedule_certificate: Some(certificate),
        });
        // S_A terms i·dim A_{i−1} for the last exactly known profile
        if !s_a_done && (next_d.is_none() || s == s_max) {
            let top = profile_top(&profile) + 1u32;
            s_a = SparseSeries::new(top);
            for (deg, c) in &profile {
                s_a.add_term(deg + 1u32, c * (deg + 1u32));
            }
            s_a_done = true;
        }
        // advance to s + 1
        prev_beta = beta.clone();
        let new_alpha = &alpha + &alpha * &alpha;
        match (&next_d, &beta) {
            (Some(dn), Some(b)) => {
                profile = next_profile(&profile, dn);
                let nb = dn + b * 2u32;
                debug_assert_eq!(profile_top(&profile), nb);
                beta_text = nb.to_string();
                beta = Some(nb);
            }
            _ => {
                beta_text = format!("d_{} + 2β_{s}", s + 1);
                beta = None;
            }
        }
        d_exact = next_d;
        d_text = next_d_text;
        alpha = new_alpha;
    }
    Ok(NestedRepeatReport {
        mode: "exponential".into(),
        stages,
        gaps_vanish: true,
        s_a_series: s_a.to_file(),
        s_a_consistent: None,
        log_bound_constant: None,
        log_bound: None,
        passed,
    })
}

pub fn nested_repeat_pipeline(config: &NestedRepeatConfig) -> Result<NestedRepeatReport, ExampleError> {
    match &config.mode {
        ScheduleMode::Custom(d) => {
            if config.s_max != d.len() {
                return Err(ExampleError::BadConfig(format!("s_max = {} but {} degrees given", config.s_max, d.len())));
            }
            custom_pipeline(d)
        }
        ScheduleMode::Exponential { d1 } => exponential_pipeline(*d1, config.s_max),
    }
}

// ---------------------------------------------------------------------------
// binary squarefree algebra

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CancellationRow {
    pub l: usize,
    /// cancellation by x_l for degrees < 2^l
    pub passes_below: bool,
    /// cancellation by x_l fails once degree 2^l is allowed
    pub fails_at: bool,
    pub witness: Option<MultiplicationWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientRow {
    /// quotient by the ideal of x_0..x_i
    pub i: usize,
    pub left_torsion_free: bool,
    pub right_torsion_free: bool,
    /// dim = 1 exactly at multiples of 2^{i+1}
    pub dims_as_expected: bool,
    pub saturation_passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SquarefreeReport {
    pub horizon: usize,
    pub dims_all_one: bool,
    pub left_torsion_free: bool,
    pub cancellation: Vec<CancellationRow>,
    /// thresholds t_d for d = 0..=saturation_max_d with α_t = x_t
    pub saturation_thresholds: Vec<Option<usize>>,
    pub saturation_max_d: usize,
    pub saturation: SaturationReport,
    pub quotients: Vec<QuotientRow>,
    /// check_axioms on G_Str(A) at arity 9
    pub image_axioms: bool,
    pub image_gk: GkEstimate,
    pub image_rational: Option<String>,
    pub image_every_element_central: bool,
    pub passed: bool,
}

fn generator_element(a: &NormalWordAlgebra, g: usize) -> Option<graded_algebra::AlgElement> {
    let d = a.generators()[g].degree;
    if d > a.horizon() {
        return None;
    }
    let idx = a.words(d).iter().position(|w| w == &[g])?;
    Some(graded_algebra::basis_element(a, d, idx))
}

fn saturation_sequence(a: &NormalWordAlgebra, first: usize) -> Vec<graded_algebra::AlgElement> {
    (first..a.generators().len()).filter_map(|g| generator_element(a, g)).collect()
}

pub fn squarefree_pipeline(horizon: usize) -> Result<SquarefreeReport, ExampleError> {
    if !horizon.is_power_of_two() || !(16..=1024).contains(&horizon) {
        return Err(ExampleError::BadConfig("horizon must be a power of two between 16 and 1024".into()));
    }
    let q = Field::rationals();
    let a = NormalWordAlgebra::binary_squarefree(&q, horizon);
    let h = hilbert_series(&a);
    let dims_all_one = h.coeffs().iter().all(|&c| c == 1);
    let left_torsion_free = torsion_elements(&a, Side::Left, horizon, None).torsion_free();
    let mut cancellation = Vec::new();
    for l in 0..=5usize {
        let deg = 1usize << l;
        if 2 * deg > horizon {
            break;
        }
        let x = generator_element(&a, l).expect("generator within horizon");
        let below = cancellation_check(&a, &x, deg - 1)?;
        let at = cancellation_check(&a, &x, deg)?;
        cancellation.push(CancellationRow { l, passes_below: below.passed, fails_at: !at.passed, witness: at.witness });
    }
    let alphas = saturation_sequence(&a, 1);
    let saturation_max_d = 31.min(horizon / 2 - 1);
    let mut saturation_thresholds = Vec::new();
    let mut saturation = None;
    for d in 0..=saturation_max_d {
        let rep = saturation_condition_check(&a, &alphas, d)?;
        saturation_thresholds.push(rep.t_d);
        saturation = Some(rep);
    }
    let saturation = saturation.expect("at least d = 0");
    let mut quotients = Vec::new();
    for i in 0..=2usize {
        let c = a.quotient_by_generators(&(0..=i).collect::<Vec<_>>())?;
        let hc = hilbert_series(&c);
        let step = 1usize << (i + 1);
        let dims_as_expected = (0..=horizon).all(|n| hc.coefficient(n) == u64::from(n % step == 0));
        let left = torsion_elements(&c, Side::Left, horizon, None).torsion_free();
        let right = torsion_elements(&c, Side::Right, horizon, None).torsion_free();
        let alphas = saturation_sequence(&c, 0);
        let d = saturation_max_d.min(horizon / 2 - 1);
        let saturation_passed = saturation_condition_check(&c, &alphas, d)?.passed;
        quotients.push(QuotientRow { i, left_torsion_free: left, right_torsion_free: right, dims_as_expected, saturation_passed });
    }
    // G_Str image: compositions materialized at a small horizon, the series read off the components
    let small = DenseAlgebra::materialize(&a, 8);
    let p = functor_g_str(&small)?;
    let image_axioms = check_axioms(&p, 9).passed;
    let image_every_element_central = (1..=9).all(|n| (0..p.dim(n)).all(|b| is_central(&p, &p.basis_element(n, b), 9).central_at_horizon));
    let series = functors::image_series(&a);
    let image_gk = gk_estimate(&series, horizon)?;
    let image_rational = fit_rational(&series, None)?.map(|r| r.to_string());
    let rational_ok = image_rational.as_deref() == Some("t/(1-t)");
    let passed = dims_all_one
        && left_torsion_free
        && cancellation.iter().all(|c| c.passes_below && c.fails_at)
        && saturation_thresholds.iter().all(Option::is_some)
        && quotients.iter().all(|r| r.left_torsion_free && r.right_torsion_free && r.dims_as_expected && r.saturation_passed)
        && image_axioms
        && image_every_element_central
        && (image_gk.value() - 1.0).abs() <= 0.05
        && rational_ok;
    Ok(SquarefreeReport {
        horizon,
        dims_all_one,
        left_torsion_free,
        cancellation,
        saturation_thresholds,
        saturation_max_d,
        saturation,
        quotients,
        image_axioms,
        image_gk,
        image_rational,
        image_every_element_central,
        passed,
    })
}

// ---------------------------------------------------------------------------
// multiplicity of direct sums

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComFRow {
    pub extension_degree: usize,
    pub multiplicity: Multiplicity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityExampleReport {
    pub horizon: usize,
    /// P = G_Str(k[x]), deg x = 2
    pub m_p: Multiplicity,
    /// Q = G_Str(k[x] ⊕ a_1k[x] ⊕ a_2k[x] ⊕ a_3k[x]), deg a_i = 1, a_ia_j = 0
    pub m_q: Multiplicity,
    pub m_sum: Multiplicity,
    pub strictly_subadditive: bool,
    /// m(Com ⊕ Com^{2}) = m(Com) + m(Com^{2}) for the prime pair
    pub prime_pair_additive: bool,
    pub com_f: Vec<ComFRow>,
    pub passed: bool,
}

fn finite(m: &Multiplicity) -> Option<u64> {
    match m {
        Multiplicity::Finite(v) => Some(*v),
        Multiplicity::Unbounded => None,
    }
}

pub fn multiplicity_example(horizon: usize) -> Result<MultiplicityExampleReport, ExampleError> {
    if horizon < 8 {
        return Err(ExampleError::BadConfig("multiplicity example needs horizon ≥ 8".into()));
    }
    let q = Field::rationals();
    let m = |h: &HilbertSeries| series::multiplicity(h, TailWindow::default()).value;
    let p = functor_g_str(&DenseAlgebra::polynomial(&q, 2, horizon - 1))?;
    let qq = functor_g_str(&DenseAlgebra::square_zero_extension(&q, 2, &[1, 1, 1], horizon - 1))?;
    let sum = p.direct_sum(&qq)?;
    let (m_p, m_q, m_sum) = (m(&p.hilbert_series()), m(&qq.hilbert_series()), m(&sum.hilbert_series()));
    let strictly_subadditive = match (finite(&m_p), finite(&m_q), finite(&m_sum)) {
        (Some(a), Some(b), Some(c)) => c < a + b,
        _ => false,
    };
    let com = make_family(&FamilySpec::new(FamilyKind::Com, &q, horizon))?;
    let com2 = make_family(&FamilySpec::new(FamilyKind::ComW { w: 2 }, &q, horizon))?;
    let pair = m(&com.direct_sum(&com2)?.hilbert_series());
    let prime_pair_additive = finite(&pair) == Some(2);
    let f2 = Field::prime(2)?;
    let com_f2 = make_family(&FamilySpec::new(FamilyKind::Com, &f2, horizon))?;
    let mut com_f = vec![ComFRow { extension_degree: 1, multiplicity: m(&com_f2.hilbert_series()) }];
    for ext in binary_tower(2)? {
        let b = com_f2.base_change(&ext)?;
        com_f.push(ComFRow { extension_degree: ext.degree(), multiplicity: m(&b.hilbert_series()) });
    }
    let passed = m_p == Multiplicity::Finite(1)
        && m_q == Multiplicity::Finite(3)
        && m_sum == Multiplicity::Finite(3)
        && strictly_subadditive
        && prime_pair_additive
        && com_f.iter().all(|r| r.multiplicity == Multiplicity::Finite(r.extension_degree as u64));
    Ok(MultiplicityExampleReport { horizon, m_p, m_q, m_sum, strictly_subadditive, prime_pair_additive, com_f, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_small_values() {
        assert_eq!(lambda_of(1).unwrap(), BigUint::one());
        assert_eq!(lambda_of(2).unwrap(), BigUint::from(3u32));
        let c = lambda_certificate(4).unwrap();
        // f(x) ≈ ln x + 1 + 1/(2x): λ(4) = 20
        assert_eq!(c.lambda, "20");
        let mut prev = BigUint::one();
        for m in 1..=12 {
            let l = lambda_of(m).unwrap();
            assert!(l >= prev);
            prev = l;
        }
    }

    #[test]
    fn field_tower_series_small() {
        let cfg = FieldTowerConfig::binary(4, 2000).unwrap();
        assert_eq!(cfg.tower_dims, vec![2, 4, 8, 16]);
        let r = field_tower_series(&cfg).unwrap();
        assert!(r.per_degree_bound && r.sum_bound.passed, "{:?}", r.per_degree_failures);
        assert_eq!(r.window_maxima, vec![2, 4, 8]);
    }

    #[test]
    fn field_tower_algebra_image() {
        let tower = binary_tower(3).unwrap();
        let a = field_tower_algebra(&tower, 24).unwrap();
        assert_eq!(a.dim(2), 1);
        assert_eq!(a.dim(3), 2);
        assert_eq!(a.dim(20), 4);
        assert!(graded_algebra::check_associativity(&a, 24).is_empty());
        let p = functor_g_str(&DenseAlgebra::materialize(&a, 6)).unwrap();
        assert!(check_axioms(&p, 7).passed);
        assert!(is_central(&p, &p.basis_element(4, 1), 7).central_at_horizon);
    }

    #[test]
    fn custom_schedule() {
        let r = nested_repeat_pipeline(&NestedRepeatConfig::custom(vec![1, 5, 40])).unwrap();
        assert!(r.passed, "{r:#?}");
        assert_eq!(r.stages[0].alpha, "2");
        assert_eq!(r.stages[0].beta, "1");
        assert_eq!(r.stages[0].window.as_ref().unwrap().dims, vec!["1", "2", "1"]);
        assert_eq!(r.stages[1].beta, "7");
        assert_eq!(r.stages[2].alpha, "42");
        let err = nested_repeat_pipeline(&NestedRepeatConfig::custom(vec![1, 2, 3])).unwrap_err();
        assert!(matches!(err, ExampleError::BadConfig(_)));
    }

    #[test]
    fn exponential_schedule() {
        let r = nested_repeat_pipeline(&NestedRepeatConfig::exponential(3)).unwrap();
        assert!(r.passed);
        let c1 = r.stages[0].schedule_certificate.as_ref().unwrap();
        assert_eq!(c1.exponent, "72");
        assert_eq!(c1.method, CertificateMethod::Interval);
        assert!(r.stages[1].d_exact);
        assert_eq!(r.stages[1].d.len(), 32);
        assert_eq!(r.stages[0].window.as_ref().unwrap().dims, vec!["1", "2", "1"]);
        assert_eq!(r.stages[1].beta_recurrence, Some(true));
        assert!(!r.stages[2].d_exact);
    }

    #[test]
    fn squarefree_pipeline_small() {
        let r = squarefree_pipeline(64).unwrap();
        assert!(r.dims_all_one && r.image_axioms);
        assert!(r.cancellation.iter().all(|c| c.passes_below && c.fails_at));
        assert_eq!(r.image_rational.as_deref(), Some("t/(1-t)"));
    }

    #[test]
    fn direct_sum_multiplicity() {
        let r = multiplicity_example(40).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
