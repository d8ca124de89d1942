//! Directed-rounded dyadic interval arithmetic.
//!
//! This is the only bridge from exact rational data to the reals. Every
//! endpoint is a dyadic rational `mantissa * 2^exponent` with an arbitrary
//! precision mantissa, every operation rounds outward, and `exp`/`log` carry
//! explicit series remainder bounds, so each emitted interval is a true
//! enclosure of the exact real result regardless of platform rounding modes.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Rounding direction: toward minus or plus infinity.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RoundDir {
    Down,
    Up,
}

impl RoundDir {
    fn flip(self) -> RoundDir {
        match self {
            RoundDir::Down => RoundDir::Up,
            RoundDir::Up => RoundDir::Down,
        }
    }
}

/// An exact dyadic rational `mantissa * 2^exponent`.
///
/// Normalized so the mantissa is odd (or zero with exponent zero), which
/// makes equality structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Dyadic {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    pub fn zero() -> Dyadic {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Dyadic {
        Dyadic { mantissa: BigInt::one(), exponent: 0 }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Dyadic {
        Dyadic::new(n.into(), 0)
    }

    /// 2^e.
    pub fn pow2(e: i64) -> Dyadic {
        Dyadic { mantissa: BigInt::one(), exponent: e }
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let shift = self.mantissa.trailing_zeros().unwrap_or(0);
        if shift > 0 {
            self.mantissa >>= shift;
            self.exponent += shift as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Position of the most significant bit: |value| is in
    /// [2^(msb-1), 2^msb). Undefined for zero.
    fn msb(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.exponent + self.mantissa.bits() as i64
    }

    pub fn negate(&self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Exact multiplication by 2^delta.
    pub fn scale_pow2(&self, delta: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + delta }
    }

    /// Round to at most `prec` significant bits toward `dir`.
    pub fn round(&self, prec: u32, dir: RoundDir) -> Dyadic {
        let prec = prec.max(4) as u64;
        if self.is_zero() || self.mantissa.bits() <= prec {
            return self.clone();
        }
        let shift = self.mantissa.bits() - prec;
        let q = shift_right_dir(&self.mantissa, shift, dir);
        Dyadic::new(q, self.exponent + shift as i64)
    }

    /// Exact sum. Alignment cost is proportional to the exponent gap, so this
    /// is only for arguments known to be close; `add_dir` guards the gap.
    fn add_exact(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        Dyadic::new(a + b, e)
    }

    /// Directed sum at `prec` bits. When the magnitudes are wildly different
    /// the small operand is absorbed into a one-ulp nudge instead of paying
    /// for a huge mantissa alignment.
    pub fn add_dir(&self, other: &Dyadic, prec: u32, dir: RoundDir) -> Dyadic {
        if self.is_zero() {
            return other.round(prec, dir);
        }
        if other.is_zero() {
            return self.round(prec, dir);
        }
        let (big, small) = if self.msb() >= other.msb() {
            (self, other)
        } else {
            (other, self)
        };
        let gap = big.msb() - small.msb();
        if gap > i64::from(prec) + 8 {
            // |small| < 2^(msb_big - prec - 9) <= ulp/2 of the rounded big.
            let rounded = big.round(prec, dir);
            let ulp = Dyadic::pow2(big.msb() - i64::from(prec));
            let nudge = match dir {
                RoundDir::Down => ulp.negate(),
                RoundDir::Up => ulp,
            };
            return rounded.add_exact(&nudge).round(prec, dir);
        }
        self.add_exact(other).round(prec, dir)
    }

    pub fn sub_dir(&self, other: &Dyadic, prec: u32, dir: RoundDir) -> Dyadic {
        self.add_dir(&other.negate(), prec, dir)
    }

    pub fn mul_exact(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &other.mantissa, self.exponent + other.exponent)
    }

    pub fn mul_dir(&self, other: &Dyadic, prec: u32, dir: RoundDir) -> Dyadic {
        self.mul_exact(other).round(prec, dir)
    }

    /// Directed quotient with a `prec`-bit mantissa. `other` must be nonzero.
    pub fn div_dir(&self, other: &Dyadic, prec: u32, dir: RoundDir) -> Dyadic {
        assert!(!other.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let prec = prec.max(4) as u64;
        let na = self.mantissa.bits();
        let nb = other.mantissa.bits();
        let shift = (prec + 2 + nb).saturating_sub(na);
        let scaled = &self.mantissa << shift;
        let exponent = self.exponent - other.exponent - shift as i64;
        let q = int_div_dir(&scaled, &other.mantissa, dir);
        Dyadic::new(q, exponent).round(prec as u32, dir)
    }

    pub fn from_rational_dir(q: &BigRational, prec: u32, dir: RoundDir) -> Dyadic {
        let numer = Dyadic::from_integer(q.numer().clone());
        let denom = Dyadic::from_integer(q.denom().clone());
        numer.div_dir(&denom, prec, dir)
    }

    /// Exact conversion when the denominator is a power of two.
    pub fn from_rational_exact(q: &BigRational) -> Option<Dyadic> {
        let denom = q.denom();
        if denom.is_one() {
            return Some(Dyadic::from_integer(q.numer().clone()));
        }
        let bits = denom.bits();
        if denom == &(BigInt::one() << (bits - 1)) {
            return Some(Dyadic::new(q.numer().clone(), -((bits - 1) as i64)));
        }
        None
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::one() << (-self.exponent) as u64)
        }
    }

    /// Approximate f64 value, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let keep = self.round(60, RoundDir::Down);
        let m_f64 = keep.mantissa.to_string().parse::<f64>().unwrap_or(f64::NAN);
        m_f64 * (keep.exponent as f64).exp2()
    }

    /// Decimal rendering with `frac_digits` digits after the point, rounded
    /// toward `dir` so printed bounds stay sound.
    pub fn to_decimal(&self, frac_digits: usize, dir: RoundDir) -> String {
        let ten_s = BigInt::from(10u32).pow(frac_digits as u32);
        let scaled_mant = &self.mantissa * &ten_s;
        let n = if self.exponent >= 0 {
            scaled_mant << self.exponent as u64
        } else {
            int_div_dir(&scaled_mant, &(BigInt::one() << (-self.exponent) as u64), dir)
        };
        let neg = n.is_negative();
        let digits = n.abs().to_string();
        let padded = if digits.len() <= frac_digits {
            format!("{}{}", "0".repeat(frac_digits + 1 - digits.len()), digits)
        } else {
            digits
        };
        let split = padded.len() - frac_digits;
        format!(
            "{}{}.{}",
            if neg { "-" } else { "" },
            &padded[..split],
            &padded[split..]
        )
    }

    /// Exact `m*2^e` form.
    pub fn to_dyadic_string(&self) -> String {
        format!("{}*2^{}", self.mantissa, self.exponent)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let sa = self.mantissa.sign();
        let sb = other.mantissa.sign();
        let sign_cmp = sign_rank(sa).cmp(&sign_rank(sb));
        if sign_cmp != Ordering::Equal {
            return sign_cmp;
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same nonzero sign: compare magnitudes by msb first to avoid huge
        // alignments, falling back to an exact aligned comparison.
        let mag = match self.msb().cmp(&other.msb()) {
            Ordering::Equal => {
                let e = self.exponent.min(other.exponent);
                let a = self.mantissa.magnitude() << (self.exponent - e) as u64;
                let b = other.mantissa.magnitude() << (other.exponent - e) as u64;
                a.cmp(&b)
            }
            ord => ord,
        };
        if sa == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{})", self.to_dyadic_string(), self.to_f64())
    }
}

/// Floor (Down) or ceiling (Up) shift-right of a signed integer.
fn shift_right_dir(n: &BigInt, shift: u64, dir: RoundDir) -> BigInt {
    match dir {
        // num-bigint's BigInt shr is arithmetic: it rounds toward -inf.
        RoundDir::Down => n >> shift,
        RoundDir::Up => -((-n) >> shift),
    }
}

/// Directed integer division.
fn int_div_dir(a: &BigInt, b: &BigInt, dir: RoundDir) -> BigInt {
    use num_integer::Integer;
    let b_pos = b.is_positive();
    let dir = if b_pos { dir } else { dir.flip() };
    match dir {
        RoundDir::Down => a.div_floor(b),
        RoundDir::Up => a.div_ceil(b),
    }
}

/// An outward-rounded enclosure `[lo, hi]` of a real number, with a working
/// mantissa precision used by derived operations.
#[derive(Clone, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Result<DyadicInterval> {
        if lo > hi {
            return Err(Error::Invalid(format!(
                "interval endpoints out of order: {:?} > {:?}",
                lo, hi
            )));
        }
        Ok(DyadicInterval { lo, hi, prec })
    }

    pub fn point(d: Dyadic, prec: u32) -> DyadicInterval {
        DyadicInterval { lo: d.clone(), hi: d, prec }
    }

    pub fn from_integer(n: impl Into<BigInt>, prec: u32) -> DyadicInterval {
        DyadicInterval::point(Dyadic::from_integer(n), prec)
    }

    pub fn zero(prec: u32) -> DyadicInterval {
        DyadicInterval::point(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> DyadicInterval {
        DyadicInterval::point(Dyadic::one(), prec)
    }

    /// Tight enclosure of an exact rational.
    pub fn from_rational(q: &BigRational, prec: u32) -> DyadicInterval {
        if let Some(d) = Dyadic::from_rational_exact(q) {
            return DyadicInterval::point(d, prec);
        }
        DyadicInterval {
            lo: Dyadic::from_rational_dir(q, prec, RoundDir::Down),
            hi: Dyadic::from_rational_dir(q, prec, RoundDir::Up),
            prec,
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(&self, prec: u32) -> DyadicInterval {
        DyadicInterval {
            lo: self.lo.round(prec, RoundDir::Down),
            hi: self.hi.round(prec, RoundDir::Up),
            prec,
        }
    }

    fn join_prec(&self, other: &DyadicInterval) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn add(&self, other: &DyadicInterval) -> DyadicInterval {
        let p = self.join_prec(other);
        DyadicInterval {
            lo: self.lo.add_dir(&other.lo, p, RoundDir::Down),
            hi: self.hi.add_dir(&other.hi, p, RoundDir::Up),
            prec: p,
        }
    }

    pub fn neg(&self) -> DyadicInterval {
        DyadicInterval {
            lo: self.hi.negate(),
            hi: self.lo.negate(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &DyadicInterval) -> DyadicInterval {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &DyadicInterval) -> DyadicInterval {
        let p = self.join_prec(other);
        let products = [
            self.lo.mul_exact(&other.lo),
            self.lo.mul_exact(&other.hi),
            self.hi.mul_exact(&other.lo),
            self.hi.mul_exact(&other.hi),
        ];
        let lo = products.iter().min().unwrap().round(p, RoundDir::Down);
        let hi = products.iter().max().unwrap().round(p, RoundDir::Up);
        DyadicInterval { lo, hi, prec: p }
    }

    pub fn div(&self, other: &DyadicInterval) -> Result<DyadicInterval> {
        if !(other.lo.is_positive() || other.hi.is_negative()) {
            return Err(Error::DivisionByZero);
        }
        let p = self.join_prec(other);
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let down = a.div_dir(b, p, RoundDir::Down);
                let up = a.div_dir(b, p, RoundDir::Up);
                lo = Some(match lo {
                    Some(cur) => cur.min(down),
                    None => down,
                });
                hi = Some(match hi {
                    Some(cur) => cur.max(up),
                    None => up,
                });
            }
        }
        Ok(DyadicInterval { lo: lo.unwrap(), hi: hi.unwrap(), prec: p })
    }

    /// Division by a positive integer.
    pub fn div_uint(&self, k: u64) -> DyadicInterval {
        assert!(k > 0);
        let d = Dyadic::from_integer(k);
        DyadicInterval {
            lo: self.lo.div_dir(&d, self.prec, RoundDir::Down),
            hi: self.hi.div_dir(&d, self.prec, RoundDir::Up),
            prec: self.prec,
        }
    }

    pub fn mul_rational(&self, q: &BigRational) -> DyadicInterval {
        self.mul(&DyadicInterval::from_rational(q, self.prec))
    }

    pub fn scale_pow2(&self, delta: i64) -> DyadicInterval {
        DyadicInterval {
            lo: self.lo.scale_pow2(delta),
            hi: self.hi.scale_pow2(delta),
            prec: self.prec,
        }
    }

    pub fn intersect(&self, other: &DyadicInterval) -> Result<DyadicInterval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        DyadicInterval::new(lo, hi, self.join_prec(other))
    }

    pub fn intersects(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &DyadicInterval) -> DyadicInterval {
        DyadicInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            prec: self.join_prec(other),
        }
    }

    pub fn contains_dyadic(&self, d: &Dyadic) -> bool {
        self.lo <= *d && *d <= self.hi
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        self.lo.to_rational() <= *q && *q <= self.hi.to_rational()
    }

    pub fn contains_interval(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo.to_f64() <= x && x <= self.hi.to_f64()
    }

    /// Upper bound on the interval width.
    pub fn width_upper(&self) -> Dyadic {
        self.hi.sub_dir(&self.lo, self.prec, RoundDir::Up)
    }

    pub fn width_f64(&self) -> f64 {
        self.width_upper().to_f64()
    }

    /// max(|lo|, |hi|) — a bound on the magnitude of anything enclosed.
    pub fn abs_upper(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.lo.is_negative()
    }

    pub fn midpoint_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    /// `lo <= x <= hi` in decimals, outward rounded.
    pub fn to_decimal_string(&self, frac_digits: usize) -> String {
        format!(
            "{} <= x <= {}",
            self.lo.to_decimal(frac_digits, RoundDir::Down),
            self.hi.to_decimal(frac_digits, RoundDir::Up)
        )
    }
}

impl fmt::Debug for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]@{}", self.lo.to_f64(), self.hi.to_f64(), self.prec)
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(15))
    }
}

/// Enclosure of e^x for a dyadic point, by halving until |y| <= 1/2, a Taylor
/// sum with an explicit tail bound, and repeated interval squaring.
fn exp_point(x: &Dyadic, prec: u32) -> DyadicInterval {
    if x.is_zero() {
        return DyadicInterval::one(prec);
    }
    let squarings = (x.msb() + 1).max(0) as u32;
    let work = prec + 2 * squarings + 16;
    let y = DyadicInterval::point(x.scale_pow2(-i64::from(squarings)), work);
    debug_assert!(y.abs_upper() <= Dyadic::pow2(-1));

    let threshold = Dyadic::pow2(-i64::from(work) - 4);
    let mut sum = DyadicInterval::one(work);
    let mut term = DyadicInterval::one(work);
    let mut j: u64 = 1;
    loop {
        term = term.mul(&y).div_uint(j);
        sum = sum.add(&term);
        if term.abs_upper() < threshold {
            break;
        }
        j += 1;
    }
    // |y| <= 1/2, so the dropped tail is below twice the last term bound.
    let tail = Dyadic::pow2(-i64::from(work) - 3);
    sum = sum.add(
        &DyadicInterval::new(tail.negate(), tail, work).expect("tail interval is ordered"),
    );
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum.with_precision(prec)
}

/// Enclosure of e^x over an interval (monotone in the endpoints).
pub fn exp_interval(x: &DyadicInterval, prec: u32) -> DyadicInterval {
    let lo = exp_point(&x.lo, prec).lo;
    let hi = exp_point(&x.hi, prec).hi;
    DyadicInterval { lo, hi, prec }
}

/// Enclosure of e^q for an exact rational.
pub fn exp_rational(q: &BigRational, prec: u32) -> DyadicInterval {
    exp_interval(&DyadicInterval::from_rational(q, prec + 8), prec)
}

/// Enclosure of ln 2 at the given working precision, cached.
fn ln2_enclosure(prec: u32) -> DyadicInterval {
    static CACHE: OnceLock<Mutex<HashMap<u32, DyadicInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&prec) {
        return hit.clone();
    }
    // ln 2 = 2 atanh(1/3).
    let third = DyadicInterval::from_rational(
        &BigRational::new(BigInt::one(), BigInt::from(3)),
        prec + 8,
    );
    let value = atanh_series(&third, prec + 8).scale_pow2(1).with_precision(prec);
    cache.lock().unwrap().insert(prec, value.clone());
    value
}

/// atanh(z) for 0 <= z <= 1/3, with the geometric tail enclosed.
fn atanh_series(z: &DyadicInterval, work: u32) -> DyadicInterval {
    let threshold = Dyadic::pow2(-i64::from(work) - 4);
    let zsq = z.mul(z);
    let mut power = z.clone();
    let mut sum = z.clone();
    let mut k: u64 = 1;
    loop {
        power = power.mul(&zsq);
        let term = power.div_uint(2 * k + 1);
        sum = sum.add(&term);
        if power.abs_upper() < threshold {
            break;
        }
        k += 1;
    }
    // Remaining terms are positive and below the last power bound.
    let tail = Dyadic::pow2(-i64::from(work) - 4);
    sum.add(&DyadicInterval::new(Dyadic::zero(), tail, work).expect("ordered"))
}

/// Enclosure of ln x for a positive dyadic point.
fn ln_point(x: &Dyadic, prec: u32) -> Result<DyadicInterval> {
    if !x.is_positive() {
        return Err(Error::NonpositiveLog);
    }
    let work = prec + 16;
    // x = m_hat * 2^j with m_hat in [1, 2).
    let bits = x.mantissa().bits() as i64;
    let j = x.exponent() + bits - 1;
    let m_hat = x.scale_pow2(-j);
    // z = (m-1)/(m+1) in [0, 1/3).
    let num = DyadicInterval::point(m_hat.add_exact(&Dyadic::one().negate()), work);
    let den = DyadicInterval::point(m_hat.add_exact(&Dyadic::one()), work);
    let z = num.div(&den)?;
    let series = atanh_series(&z, work).scale_pow2(1);
    let ln2 = ln2_enclosure(work);
    let j_term = ln2.mul(&DyadicInterval::from_integer(j, work));
    Ok(series.add(&j_term).with_precision(prec))
}

/// Enclosure of ln over an interval with positive lower bound.
pub fn ln_interval(x: &DyadicInterval, prec: u32) -> Result<DyadicInterval> {
    if !x.lo.is_positive() {
        return Err(Error::NonpositiveLog);
    }
    let lo = ln_point(&x.lo, prec)?.lo;
    let hi = ln_point(&x.hi, prec)?.hi;
    Ok(DyadicInterval { lo, hi, prec })
}

/// Enclosure of ln n for a positive integer.
pub fn ln_integer(n: u64, prec: u32) -> Result<DyadicInterval> {
    ln_interval(&DyadicInterval::from_integer(n, prec), prec)
}

/// Directed k-th root of a nonnegative dyadic, via exp(ln(x)/k).
fn kth_root_dir(x: &Dyadic, k: u64, prec: u32, dir: RoundDir) -> Result<Dyadic> {
    debug_assert!(k >= 1);
    if x.is_zero() {
        return Ok(Dyadic::zero());
    }
    if !x.is_positive() {
        return Err(Error::NonpositiveLog);
    }
    let work = prec + 16;
    let ln = ln_point(x, work)?;
    let kd = Dyadic::from_integer(k);
    Ok(match dir {
        RoundDir::Down => {
            let t = ln.lo.div_dir(&kd, work, RoundDir::Down);
            exp_point(&t, prec).lo
        }
        RoundDir::Up => {
            let t = ln.hi.div_dir(&kd, work, RoundDir::Up);
            exp_point(&t, prec).hi
        }
    })
}

/// A square matrix of intervals with a canonical index ordering. Labels for
/// the indices (pattern names) are kept for diagnostics.
#[derive(Clone)]
pub struct IntervalMatrix {
    dim: usize,
    entries: Vec<DyadicInterval>,
    labels: Option<Vec<String>>,
}

impl IntervalMatrix {
    pub fn new(dim: usize, entries: Vec<DyadicInterval>) -> Result<IntervalMatrix> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Invalid(format!(
                "matrix needs {}x{} entries, got {}",
                dim,
                dim,
                entries.len()
            )));
        }
        Ok(IntervalMatrix { dim, entries, labels: None })
    }

    pub fn identity(dim: usize, prec: u32) -> IntervalMatrix {
        let mut entries = vec![DyadicInterval::zero(prec); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = DyadicInterval::one(prec);
        }
        IntervalMatrix { dim, entries, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> IntervalMatrix {
        assert_eq!(labels.len(), self.dim);
        self.labels = Some(labels);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn get(&self, row: usize, col: usize) -> &DyadicInterval {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: DyadicInterval) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| e.is_nonnegative())
    }

    pub fn matmul(&self, other: &IntervalMatrix, prec: u32) -> Result<IntervalMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = DyadicInterval::zero(prec);
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)).with_precision(prec));
                }
                entries.push(acc);
            }
        }
        Ok(IntervalMatrix { dim: n, entries, labels: self.labels.clone() })
    }

    /// Binary exponentiation; `power` = 0 yields the identity.
    pub fn matpow(&self, power: u64, prec: u32) -> Result<IntervalMatrix> {
        let mut result = IntervalMatrix::identity(self.dim, prec);
        let mut base = self.clone();
        let mut k = power;
        while k > 0 {
            if k & 1 == 1 {
                result = result.matmul(&base, prec)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.matmul(&base, prec)?;
            }
        }
        result.labels = self.labels.clone();
        Ok(result)
    }

    pub fn matvec(&self, v: &[DyadicInterval], prec: u32) -> Vec<DyadicInterval> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let mut acc = DyadicInterval::zero(prec);
                for k in 0..self.dim {
                    acc = acc.add(&self.get(i, k).mul(&v[k]).with_precision(prec));
                }
                acc
            })
            .collect()
    }

    pub fn row_sums(&self, prec: u32) -> Vec<DyadicInterval> {
        (0..self.dim)
            .map(|i| {
                let mut acc = DyadicInterval::zero(prec);
                for k in 0..self.dim {
                    acc = acc.add(&self.get(i, k).with_precision(prec));
                }
                acc
            })
            .collect()
    }

    pub fn sum_entries(&self, prec: u32) -> DyadicInterval {
        let mut acc = DyadicInterval::zero(prec);
        for e in &self.entries {
            acc = acc.add(&e.with_precision(prec));
        }
        acc
    }
}

impl fmt::Debug for IntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntervalMatrix {}x{}", self.dim, self.dim)?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                write!(f, " {:?}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Spectral radius bounds for a nonnegative interval matrix.
#[derive(Clone, Debug)]
pub struct SpectralBounds {
    /// Enclosure of the Perron root (the lower endpoint is 0 and meaningless
    /// when `certified_lower` is false).
    pub bounds: DyadicInterval,
    /// False when some row sum of the k-th power could be zero, in which case
    /// only the upper bound is certified.
    pub certified_lower: bool,
}

/// Perron root enclosure from the row sums of `m^k`.
///
/// With v = m^k 1 strictly positive, min_i (m v)_i / v_i <= rho(m) <=
/// max_i (m v)_i / v_i, and the classical k-th-root row-sum bounds
/// [min_i v_i^(1/k), max_i v_i^(1/k)] also hold; the result intersects both.
/// For primitive matrices the enclosure narrows as k grows.
pub fn spectral_radius_bounds(
    m: &IntervalMatrix,
    k: u64,
    prec: u32,
) -> Result<SpectralBounds> {
    if !m.is_nonnegative() {
        return Err(Error::Invalid(
            "spectral radius bounds need a nonnegative matrix".to_string(),
        ));
    }
    if k == 0 {
        return Err(Error::Invalid("power must be positive".to_string()));
    }
    let power = m.matpow(k, prec)?;
    let v = power.row_sums(prec);

    let min_sum = v.iter().map(|x| x.lo.clone()).min().unwrap();
    let max_sum = v.iter().map(|x| x.hi.clone()).max().unwrap();
    if max_sum.is_zero() {
        // Nilpotent within k steps: the spectral radius is exactly zero.
        return Ok(SpectralBounds {
            bounds: DyadicInterval::zero(prec),
            certified_lower: true,
        });
    }
    let root_lo = kth_root_dir(&min_sum, k, prec, RoundDir::Down)?;
    let root_hi = kth_root_dir(&max_sum, k, prec, RoundDir::Up)?;

    if v.iter().any(|x| !x.lo.is_positive()) {
        // Some power has a (possibly) zero row: treat as non-primitive and
        // certify only from above.
        return Ok(SpectralBounds {
            bounds: DyadicInterval::new(Dyadic::zero(), root_hi, prec)?,
            certified_lower: false,
        });
    }

    let w = m.matvec(&v, prec);
    let mut quot_lo: Option<Dyadic> = None;
    let mut quot_hi: Option<Dyadic> = None;
    for i in 0..v.len() {
        let lo_i = w[i].lo.div_dir(&v[i].hi, prec, RoundDir::Down);
        let hi_i = w[i].hi.div_dir(&v[i].lo, prec, RoundDir::Up);
        quot_lo = Some(match quot_lo {
            Some(cur) => cur.min(lo_i),
            None => lo_i,
        });
        quot_hi = Some(match quot_hi {
            Some(cur) => cur.max(hi_i),
            None => hi_i,
        });
    }
    let quotient = DyadicInterval::new(
        quot_lo.unwrap().max(Dyadic::zero()),
        quot_hi.unwrap(),
        prec,
    )?;
    let roots = DyadicInterval::new(root_lo, root_hi, prec)?;
    let bounds = quotient.intersect(&roots)?;
    Ok(SpectralBounds { bounds, certified_lower: true })
}
