//! Certified interval arithmetic over exact rationals.
//!
//! Endpoints are exact rationals; transcendental functions round outward to
//! a grid of spacing 2^-bits, so every returned interval contains the true value.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow2(bits: u64) -> BigInt {
    BigInt::one() << bits
}

/// Largest multiple of 2^-bits that is ≤ q.
pub fn round_down(q: &BigRational, bits: u64) -> BigRational {
    let scaled = q.numer() << bits;
    BigRational::new(scaled.div_floor(q.denom()), pow2(bits))
}

/// Smallest multiple of 2^-bits that is ≥ q.
pub fn round_up(q: &BigRational, bits: u64) -> BigRational {
    let scaled = q.numer() << bits;
    BigRational::new(num_integer::Integer::div_ceil(&scaled, q.denom()), pow2(bits))
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Interval {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(q: BigRational) -> Interval {
        Interval { lo: q.clone(), hi: q }
    }

    pub fn from_int(n: i64) -> Interval {
        Interval::point(rat(n))
    }

    pub fn from_bigint(n: &BigInt) -> Interval {
        Interval::point(BigRational::from_integer(n.clone()))
    }

    pub fn round(&self, bits: u64) -> Interval {
        Interval { lo: round_down(&self.lo, bits), hi: round_up(&self.hi, bits) }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, o: &Interval) -> Option<Interval> {
        Some(self.mul(&o.recip()?))
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / rat(2)).to_f64().unwrap_or(f64::NAN)
    }

    /// Certified ordering, or `None` when the intervals overlap (and are not equal points).
    pub fn compare(&self, o: &Interval) -> Option<Ordering> {
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if self.lo > o.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && o.lo == o.hi && self.lo == o.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Some(true) if certainly self ≤ o, Some(false) if certainly self > o.
    pub fn certainly_le(&self, o: &Interval) -> Option<bool> {
        if self.hi <= o.lo {
            Some(true)
        } else if self.lo > o.hi {
            Some(false)
        } else {
            None
        }
    }

    /// Floor of the contained value when it is determined by the enclosure.
    pub fn floor(&self) -> Option<BigInt> {
        let a = self.lo.floor().to_integer();
        let b = self.hi.floor().to_integer();
        (a == b).then_some(a)
    }
}

/// Fixed-point helpers: an integer X stands for X·2^-g.
fn fx_floor(q: &BigRational, g: u64) -> BigInt {
    (q.numer() << g).div_floor(q.denom())
}

fn fx_ceil(q: &BigRational, g: u64) -> BigInt {
    num_integer::Integer::div_ceil(&(q.numer() << g), q.denom())
}

fn fx_mul_floor(a: &BigInt, b: &BigInt, g: u64) -> BigInt {
    (a * b) >> g
}

fn fx_mul_ceil(a: &BigInt, b: &BigInt, g: u64) -> BigInt {
    -((-(a * b)) >> g)
}

fn fx_to_rat(x: BigInt, g: u64) -> BigRational {
    BigRational::new(x, pow2(g))
}

/// atanh(z) for rational 0 ≤ z ≤ 1/2.
fn atanh_small(z: &BigRational, bits: u64) -> Interval {
    assert!(!z.is_negative() && *z <= BigRational::new(BigInt::one(), BigInt::from(2)));
    if z.is_zero() {
        return Interval::from_int(0);
    }
    let g = bits + 24;
    let zl = fx_floor(z, g);
    let zh = fx_ceil(z, g);
    let z2l = fx_mul_floor(&zl, &zl, g);
    let z2h = fx_mul_ceil(&zh, &zh, g);
    let (mut powl, mut powh) = (zl, zh);
    let (mut suml, mut sumh) = (BigInt::zero(), BigInt::zero());
    let mut j: i64 = 0;
    loop {
        let den = BigInt::from(2 * j + 1);
        suml += powl.div_floor(&den);
        sumh += num_integer::Integer::div_ceil(&powh, &den);
        powl = fx_mul_floor(&powl, &z2l, g);
        powh = fx_mul_ceil(&powh, &z2h, g);
        j += 1;
        if powh <= BigInt::one() {
            break;
        }
    }
    // tail Σ_{i≥j} z^{2i+1}/(2i+1) ≤ z^{2j+1} / ((2j+1)(1 - z²)) ≤ 2·z^{2j+1} since z² ≤ 1/4
    sumh += powh * 2 + 1;
    Interval { lo: fx_to_rat(suml, g), hi: fx_to_rat(sumh, g) }.round(bits)
}

fn ln2(bits: u64) -> Interval {
    atanh_small(&BigRational::new(BigInt::one(), BigInt::from(3)), bits + 2).mul(&Interval::from_int(2)).round(bits)
}

/// ln(x) for rational x > 0.
pub fn ln(x: &BigRational, bits: u64) -> Interval {
    assert!(x.is_positive(), "logarithm of a non-positive number");
    if x.is_one() {
        return Interval::from_int(0);
    }
    let mut k: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let shift = |q: &BigRational, k: i64| -> BigRational {
        if k >= 0 {
            q / BigRational::from_integer(pow2(k as u64))
        } else {
            q * BigRational::from_integer(pow2((-k) as u64))
        }
    };
    let mut y = shift(x, k);
    let two = rat(2);
    while y >= two {
        y /= &two;
        k += 1;
    }
    while y < BigRational::one() {
        y *= &two;
        k -= 1;
    }
    let g = bits + 8 + 64 - (k.unsigned_abs().leading_zeros() as u64);
    let z = (&y - BigRational::one()) / (&y + BigRational::one());
    let main = atanh_small(&z, g).mul(&Interval::from_int(2));
    let scaled = ln2(g).mul(&Interval::from_int(k));
    main.add(&scaled).round(bits)
}

pub fn ln_int(n: &BigInt, bits: u64) -> Interval {
    ln(&BigRational::from_integer(n.clone()), bits)
}

/// ln over an interval of positive numbers.
pub fn ln_interval(x: &Interval, bits: u64) -> Interval {
    Interval { lo: ln(&x.lo, bits).lo, hi: ln(&x.hi, bits).hi }
}

/// e^x for rational x.
pub fn exp(x: &BigRational, bits: u64) -> Interval {
    if x.is_negative() {
        let pos = exp(&-x, bits + 8);
        return pos.recip().expect("exp is positive").round(bits);
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut k: u64 = 0;
    let mut y = x.clone();
    while y > half {
        y /= rat(2);
        k += 1;
    }
    // each squaring doubles the relative error; the value itself needs ~1.45·x bits above the point
    let magnitude = (x.to_f64().unwrap_or(f64::MAX) * 1.4427).ceil().max(0.0) as u64;
    let g = bits + k + magnitude + 24;
    let yl = fx_floor(&y, g);
    let yh = fx_ceil(&y, g);
    let unit = BigInt::one() << g;
    let (mut suml, mut sumh) = (BigInt::zero(), BigInt::zero());
    let (mut terml, mut termh) = (unit.clone(), unit);
    let mut j: i64 = 1;
    loop {
        suml += &terml;
        sumh += &termh;
        let den = BigInt::from(j);
        terml = fx_mul_floor(&terml, &yl, g).div_floor(&den);
        termh = num_integer::Integer::div_ceil(&fx_mul_ceil(&termh, &yh, g), &den);
        j += 1;
        if termh <= BigInt::one() {
            break;
        }
    }
    // remaining terms ≤ term·(1 + 1/2 + 1/4 + ..) since y ≤ 1/2
    sumh += termh * 2 + 1;
    for _ in 0..k {
        suml = fx_mul_floor(&suml, &suml, g);
        sumh = fx_mul_ceil(&sumh, &sumh, g);
    }
    Interval { lo: fx_to_rat(suml, g), hi: fx_to_rat(sumh, g) }.round(bits)
}

pub fn exp_interval(x: &Interval, bits: u64) -> Interval {
    Interval { lo: exp(&x.lo, bits).lo, hi: exp(&x.hi, bits).hi }
}

/// The function x ↦ (x+1)ln(x+1) − x ln x at a non-negative integer, evaluated as
/// ln(x+1) + 2x·atanh(1/(2x+1)) to avoid cancellation.
pub fn entropy_gap(x: u64, bits: u64) -> Interval {
    entropy_gap_big(&BigUint::from(x), bits)
}

pub fn entropy_gap_big(x: &BigUint, bits: u64) -> Interval {
    let g = bits + 8 + x.bits();
    let xr = BigRational::from_integer(BigInt::from(x.clone()));
    let first = ln(&(&xr + BigRational::one()), g);
    if x.is_zero() {
        return first.round(bits);
    }
    let z = BigRational::new(BigInt::one(), BigInt::from(x.clone()) * 2 + 1);
    let second = atanh_small(&z, g).mul(&Interval::point(xr * rat(2)));
    first.add(&second).round(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ln_encloses_f64_values() {
        for (n, d) in [(2, 1), (3, 1), (1, 3), (10, 1), (12345, 7), (1, 1000), (1_000_001, 1)] {
            let x = r(n, d);
            let iv = ln(&x, 80);
            let truth = (n as f64 / d as f64).ln();
            assert!((iv.midpoint_f64() - truth).abs() < 1e-12, "ln({n}/{d})");
            assert!(iv.width() < r(1, 1 << 40));
        }
    }

    #[test]
    fn exp_encloses_f64_values() {
        for (n, d) in [(0, 1), (1, 1), (-1, 1), (5, 2), (72, 1), (-20, 3)] {
            let x = r(n, d);
            let iv = exp(&x, 60);
            let truth = (n as f64 / d as f64).exp();
            assert!(((iv.midpoint_f64() - truth) / truth).abs() < 1e-12, "exp({n}/{d})");
        }
    }

    #[test]
    fn exp_ln_round_trip() {
        let x = r(7, 3);
        let y = exp(&x, 80);
        let back = ln_interval(&y, 80);
        assert!(back.lo <= x.clone() + r(1, 1 << 30) && back.hi >= x - r(1, 1 << 30));
    }

    #[test]
    fn entropy_gap_values() {
        // f(1) = 2 ln 2
        let f1 = entropy_gap(1, 64);
        assert!((f1.midpoint_f64() - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(entropy_gap(0, 64), Interval::from_int(0));
        for x in [2u64, 10, 1000, 123456] {
            let xf = x as f64;
            let truth = (xf + 1.0) * (xf + 1.0).ln() - xf * xf.ln();
            assert!((entropy_gap(x, 64).midpoint_f64() - truth).abs() < 1e-6 * truth);
        }
    }

    #[test]
    fn e72_floor_is_determined() {
        let e = exp(&r(72, 1), 32);
        let fl = e.floor().unwrap();
        assert_eq!(fl.to_string().len(), 32);
        assert!(fl.to_string().starts_with("18586717452841279"));
    }

    #[test]
    fn rounding_is_outward() {
        let q = r(1, 3);
        assert!(round_down(&q, 10) <= q && q <= round_up(&q, 10));
        let neg = r(-1, 3);
        assert!(round_down(&neg, 10) <= neg && neg <= round_up(&neg, 10));
    }
}
