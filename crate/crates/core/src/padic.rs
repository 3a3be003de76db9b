//! Exact rationals with a fixed prime, their p-adic valuations, and
//! log-scale values measured in units of `log p`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime `p` fixing the absolute value `|x| = p^(-v_p(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PrimeContext {
    p: u64,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Self { p })
        } else {
            Err(Error::BadPrime(p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    pub fn ln_p(&self) -> f64 {
        (self.p as f64).ln()
    }

    /// `p^k` as an exact rational; `k` may be negative.
    pub fn power(&self, k: i64) -> BigRational {
        let base = num_traits::pow(self.p_big(), k.unsigned_abs() as usize);
        if k >= 0 {
            BigRational::from_integer(base)
        } else {
            BigRational::new(BigInt::one(), base)
        }
    }

    pub(crate) fn check(&self, other: &PrimeContext) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::ContextMismatch(self.p, other.p))
        }
    }
}

impl<'de> Deserialize<'de> for PrimeContext {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = u64::deserialize(d)?;
        PrimeContext::new(p).map_err(serde::de::Error::custom)
    }
}

/// Deterministic trial division; adequate for the desk-scale primes used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut f = 3u64;
    while f.saturating_mul(f) <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// `v_p(n)` for a nonzero integer.
pub(crate) fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut v = 0;
    let mut n = n.clone();
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Valuation of a field element: an integer, or `Infinite` for zero.
///
/// `Finite(_) < Infinite`, so `min` over valuations is the sup-norm rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// An exact rational number tied to a prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicRational {
    value: BigRational,
    ctx: PrimeContext,
}

impl PadicRational {
    pub fn new(ctx: PrimeContext, value: BigRational) -> Self {
        // Ratio keeps itself reduced with a positive denominator.
        Self { value, ctx }
    }

    pub fn from_int(ctx: PrimeContext, n: impl Into<BigInt>) -> Self {
        Self::new(ctx, BigRational::from_integer(n.into()))
    }

    pub fn from_frac(ctx: PrimeContext, num: i64, den: i64) -> Self {
        Self::new(ctx, BigRational::new(num.into(), den.into()))
    }

    pub fn zero(ctx: PrimeContext) -> Self {
        Self::new(ctx, BigRational::zero())
    }

    pub fn parse(ctx: PrimeContext, s: &str) -> Result<Self> {
        parse_rational(s).map(|v| Self::new(ctx, v))
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn context(&self) -> PrimeContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn valuation(&self) -> Valuation {
        rational_valuation(&self.value, self.ctx.p)
    }

    /// `log|x|`, i.e. `-v_p(x) log p`.
    pub fn abs_log(&self) -> Result<LogValue> {
        match self.valuation() {
            Valuation::Finite(v) => Ok(LogValue::from_int(self.ctx, -v)),
            Valuation::Infinite => Err(Error::ZeroArgument),
        }
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(self.ctx, &self.value * self.ctx.power(k))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(Self::new(self.ctx, self.value.recip()))
    }

    pub fn pow(&self, e: u32) -> Self {
        Self::new(self.ctx, num_traits::pow(self.value.clone(), e as usize))
    }
}

/// `v_p` of a rational, `Infinite` at zero.
pub fn rational_valuation(value: &BigRational, p: u64) -> Valuation {
    if value.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    Valuation::Finite(int_valuation(value.numer(), &p) - int_valuation(value.denom(), &p))
}

impl fmt::Display for PadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a PadicRational> for &'a PadicRational {
            type Output = PadicRational;

            fn $method(self, rhs: &'a PadicRational) -> PadicRational {
                assert_eq!(self.ctx, rhs.ctx, "mixed primes in p-adic arithmetic");
                PadicRational::new(self.ctx, &self.value $op &rhs.value)
            }
        }

        impl $tr for PadicRational {
            type Output = PadicRational;

            fn $method(self, rhs: PadicRational) -> PadicRational {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for PadicRational {
    type Output = PadicRational;

    fn neg(self) -> PadicRational {
        PadicRational::new(self.ctx, -self.value)
    }
}

/// `min_i v(x_i)`, so that `||x|| = p^(-result)`.
pub fn sup_norm_valuation(x: &[PadicRational]) -> Valuation {
    x.iter()
        .map(PadicRational::valuation)
        .min()
        .unwrap_or(Valuation::Infinite)
}

/// Rescale `x` by `p^(-m)`, `m = sup_norm_valuation(x)`, returning the
/// rescaled vector and `m`.
pub fn normalize_lift(x: &[PadicRational]) -> Result<(Vec<PadicRational>, i64)> {
    let m = sup_norm_valuation(x).finite().ok_or(Error::ZeroVector)?;
    Ok((x.iter().map(|c| c.shift(-m)).collect(), m))
}

/// The real number `coeff * log p`, kept as an exact rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogValue {
    coeff: BigRational,
    ctx: PrimeContext,
}

impl LogValue {
    pub fn new(ctx: PrimeContext, coeff: BigRational) -> Self {
        Self { coeff, ctx }
    }

    pub fn zero(ctx: PrimeContext) -> Self {
        Self::new(ctx, BigRational::zero())
    }

    pub fn from_int(ctx: PrimeContext, n: i64) -> Self {
        Self::new(ctx, BigRational::from_integer(n.into()))
    }

    pub fn from_frac(ctx: PrimeContext, num: i64, den: i64) -> Self {
        Self::new(ctx, BigRational::new(num.into(), den.into()))
    }

    pub fn coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn context(&self) -> PrimeContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.coeff.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.coeff.is_positive()
    }

    pub fn abs(&self) -> LogValue {
        LogValue::new(self.ctx, self.coeff.abs())
    }

    pub fn scale(&self, by: &BigRational) -> LogValue {
        LogValue::new(self.ctx, &self.coeff * by)
    }

    /// Floating rendering `coeff * ln p`; for output only.
    pub fn approx(&self) -> f64 {
        self.coeff.to_f64().unwrap_or(f64::NAN) * self.ctx.ln_p()
    }
}

impl<'a> Add<&'a LogValue> for &'a LogValue {
    type Output = LogValue;

    fn add(self, rhs: &'a LogValue) -> LogValue {
        assert_eq!(self.ctx, rhs.ctx, "mixed primes in log arithmetic");
        LogValue::new(self.ctx, &self.coeff + &rhs.coeff)
    }
}

impl<'a> Sub<&'a LogValue> for &'a LogValue {
    type Output = LogValue;

    fn sub(self, rhs: &'a LogValue) -> LogValue {
        assert_eq!(self.ctx, rhs.ctx, "mixed primes in log arithmetic");
        LogValue::new(self.ctx, &self.coeff - &rhs.coeff)
    }
}

impl Add for LogValue {
    type Output = LogValue;

    fn add(self, rhs: LogValue) -> LogValue {
        &self + &rhs
    }
}

impl Sub for LogValue {
    type Output = LogValue;

    fn sub(self, rhs: LogValue) -> LogValue {
        &self - &rhs
    }
}

impl Neg for LogValue {
    type Output = LogValue;

    fn neg(self) -> LogValue {
        LogValue::new(self.ctx, -self.coeff)
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.ctx == other.ctx).then(|| self.coeff.cmp(&other.coeff))
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) log {}", self.coeff, self.ctx.p)
    }
}

impl Serialize for LogValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LogValue", 3)?;
        st.serialize_field("coeff", &self.coeff.to_string())?;
        st.serialize_field("p", &self.ctx.p)?;
        st.serialize_field("approx", &round_sig(self.approx()))?;
        st.end()
    }
}

/// Parse `"a/b"` or `"a"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => BigInt::from_str(s)
            .map(BigRational::from_integer)
            .map_err(|_| bad()),
    }
}

/// Round to 12 significant digits for JSON/text rendering.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    fn q(p: u64, n: i64, d: i64) -> PadicRational {
        PadicRational::from_frac(ctx(p), n, d)
    }

    #[test]
    fn rejects_composites() {
        assert_eq!(PrimeContext::new(1), Err(Error::BadPrime(1)));
        assert_eq!(PrimeContext::new(91), Err(Error::BadPrime(91)));
        assert!(PrimeContext::new(97).is_ok());
        assert!(PrimeContext::new(999_983).is_ok());
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(q(3, 9, 2).valuation(), Valuation::Finite(2));
        assert_eq!(q(5, 0, 1).valuation(), Valuation::Infinite);
        assert_eq!(q(5, 1, 25).valuation(), Valuation::Finite(-2));
    }

    #[test]
    fn abs_log_examples() {
        assert!(q(3, 1, 1).abs_log().unwrap().is_zero());
        assert_eq!(q(3, 3, 1).abs_log().unwrap(), LogValue::from_int(ctx(3), -1));
        assert_eq!(q(7, 2, 49).abs_log().unwrap(), LogValue::from_int(ctx(7), 2));
        assert_eq!(q(7, 0, 1).abs_log(), Err(Error::ZeroArgument));
    }

    #[test]
    fn sup_norm_examples() {
        let v = |p, xs: &[i64]| {
            sup_norm_valuation(&xs.iter().map(|&n| q(p, n, 1)).collect::<Vec<_>>())
        };
        assert_eq!(v(3, &[1, 3, 9]), Valuation::Finite(0));
        assert_eq!(v(3, &[3, 9]), Valuation::Finite(1));
        assert_eq!(v(3, &[0, 0]), Valuation::Infinite);
    }

    #[test]
    fn normalize_examples() {
        let (x, m) = normalize_lift(&[q(3, 3, 1), q(3, 9, 1)]).unwrap();
        assert_eq!((x, m), (vec![q(3, 1, 1), q(3, 3, 1)], 1));
        let (x, m) = normalize_lift(&[q(5, 1, 1), q(5, 0, 1)]).unwrap();
        assert_eq!((x, m), (vec![q(5, 1, 1), q(5, 0, 1)], 0));
        let (x, m) = normalize_lift(&[q(2, 1, 2), q(2, 4, 1)]).unwrap();
        assert_eq!(m, -1);
        assert_eq!(sup_norm_valuation(&x), Valuation::Finite(0));
        assert_eq!(x, vec![q(2, 1, 1), q(2, 8, 1)]);
        assert_eq!(
            normalize_lift(&[q(2, 0, 1), q(2, 0, 1)]),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("-6/4").unwrap(), BigRational::new((-3).into(), 2.into()));
        assert_eq!(parse_rational(" 7 ").unwrap(), BigRational::from_integer(7.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn log_value_serializes_with_approx() {
        let v = LogValue::from_frac(ctx(3), -1, 2);
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["coeff"], "-1/2");
        assert_eq!(json["p"], 3);
        assert!((json["approx"].as_f64().unwrap() + 0.5 * 3f64.ln()).abs() < 1e-11);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rat(p: u64) -> impl Strategy<Value = PadicRational> {
            (-5000i64..5000, 1i64..5000, 0u32..4, any::<bool>()).prop_map(move |(n, d, k, up)| {
                let scale = (p as i64).pow(k);
                if up {
                    q(p, n * scale, d)
                } else {
                    q(p, n, d * scale)
                }
            })
        }

        proptest! {
            #[test]
            fn ultrametric_scalars(a in rat(3), b in rat(3)) {
                let va = a.valuation();
                let vb = b.valuation();
                let vs = (&a + &b).valuation();
                prop_assert!(vs >= va.min(vb));
                if va != vb {
                    prop_assert_eq!(vs, va.min(vb));
                }
            }

            #[test]
            fn valuation_is_multiplicative(a in rat(5), b in rat(5)) {
                prop_assume!(!a.is_zero() && !b.is_zero());
                prop_assert_eq!((&a * &b).valuation(), a.valuation() + b.valuation());
            }

            #[test]
            fn normalize_is_idempotent(xs in proptest::collection::vec(rat(2), 1..5)) {
                prop_assume!(xs.iter().any(|x| !x.is_zero()));
                let (once, _) = normalize_lift(&xs).unwrap();
                let (twice, m) = normalize_lift(&once).unwrap();
                prop_assert_eq!(m, 0);
                prop_assert_eq!(once, twice);
            }

            #[test]
            fn log_arithmetic_is_exact(an in -10_000i64..10_000, ad in 1i64..10_000,
                                       bn in -10_000i64..10_000, bd in 1i64..10_000) {
                let a = LogValue::from_frac(ctx(7), an, ad);
                let b = LogValue::from_frac(ctx(7), bn, bd);
                prop_assert_eq!(&(&a + &b) - &b, a);
            }
        }
    }
}
