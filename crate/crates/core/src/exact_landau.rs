//! Exact Landau constants in arbitrary-precision rational arithmetic.
//!
//! Everything is kept over the denominator `16^n`: the central binomials
//! follow `C(2k,k) = C(2k-2,k-1) * (4k-2)/k` in integers, partial sums are
//! accumulated as `16^n G_n`, and results are reduced by stripping shared
//! powers of two.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`landau_sequence`] unless a caller overrides it.
pub const DEFAULT_N_CAP: u64 = 100_000;

/// Canonical arbitrary-precision fraction: positive denominator, reduced.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    /// Builds `numer / denom`, reducing to lowest terms.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Self(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    /// Nearest `f64`. Values outside the `f64` range saturate to infinity.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            if self.0.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(value: f64) -> Result<Self> {
        BigRational::from_float(value)
            .map(Self)
            .ok_or_else(|| Error::Domain(format!("{value} is not finite")))
    }

    /// Decimal rendering with exactly `digits` fractional digits, rounded
    /// half to even.
    pub fn to_decimal(&self, digits: usize) -> String {
        to_decimal(self, digits)
    }
}

impl From<BigRational> for ExactRational {
    fn from(value: BigRational) -> Self {
        Self(value)
    }
}

impl From<i64> for ExactRational {
    fn from(value: i64) -> Self {
        Self::from_integer(value)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `p/q`, an integer, or a plain decimal literal such as
/// `-0.97463516` or `9.7924E-9`. Decimal literals are converted exactly.
impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Domain(format!("cannot parse {s:?} as a rational"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return Self::new(n, d);
        }
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (negative, unsigned) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = unsigned.split_once('.').unwrap_or((unsigned, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits: BigInt = format!("{int_part}{frac_part}0")
            .parse()
            .map_err(|_| bad())?;
        // the appended "0" guards against an empty digit string
        let scale = exponent - frac_part.len() as i32 - 1;
        let ten = BigInt::from(10u32);
        let mut value = if scale >= 0 {
            BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
        };
        if negative {
            value = -value;
        }
        Ok(Self(value))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

/// Prefix sums `G_0, G_1, ..., G_{n_max}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LandauSequence {
    values: Vec<ExactRational>,
}

impl LandauSequence {
    pub fn values(&self) -> &[ExactRational] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<&ExactRational> {
        self.values.get(n)
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `numer / 2^exp2` in lowest terms, without a gcd.
fn dyadic(numer: BigInt, exp2: u64) -> ExactRational {
    let shift = numer.trailing_zeros().map_or(0, |tz| tz.min(exp2));
    ExactRational(BigRational::new_raw(
        numer >> shift,
        BigInt::one() << (exp2 - shift),
    ))
}

/// Iterator over the summands `C(2k,k)^2 / 16^k`, starting at `k = 0`.
#[derive(Clone, Debug)]
pub struct LandauTerms {
    k: u64,
    /// `C(2k, k)`
    central: BigInt,
}

impl LandauTerms {
    pub fn new() -> Self {
        Self {
            k: 0,
            central: BigInt::one(),
        }
    }
}

impl Default for LandauTerms {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for LandauTerms {
    type Item = ExactRational;

    fn next(&mut self) -> Option<ExactRational> {
        let out = dyadic(&self.central * &self.central, 4 * self.k);
        self.k += 1;
        self.central = &self.central * (4 * self.k - 2) / self.k;
        Some(out)
    }
}

/// `16^n G_n` for `n = 0..`, by `N_n = 16 N_{n-1} + C(2n, n)^2`.
fn scaled_partial_sums() -> impl Iterator<Item = BigInt> {
    let mut central = BigInt::one();
    let mut acc = BigInt::zero();
    (0u64..).map(move |k| {
        if k > 0 {
            central = &central * (4 * k - 2) / k;
        }
        acc = (&acc << 4) + &central * &central;
        acc.clone()
    })
}

/// The single summand `C(2k,k)^2 / 16^k`.
pub fn landau_term(k: u64) -> ExactRational {
    LandauTerms::new()
        .nth(k as usize)
        .expect("term iterator is infinite")
}

/// `G_n`, the sum of the first `n + 1` terms.
pub fn landau_constant(n: u64) -> ExactRational {
    let numer = scaled_partial_sums()
        .nth(n as usize)
        .expect("partial sums are infinite");
    dyadic(numer, 4 * n)
}

/// `G_0..=G_{n_max}` using [`DEFAULT_N_CAP`].
pub fn landau_sequence(n_max: u64) -> Result<LandauSequence> {
    landau_sequence_capped(n_max, DEFAULT_N_CAP)
}

pub fn landau_sequence_capped(n_max: u64, cap: u64) -> Result<LandauSequence> {
    if n_max > cap {
        return Err(Error::ResourceLimit {
            what: "n_max",
            requested: n_max,
            cap,
        });
    }
    let values = scaled_partial_sums()
        .take(n_max as usize + 1)
        .enumerate()
        .map(|(n, numer)| dyadic(numer, 4 * n as u64))
        .collect();
    Ok(LandauSequence { values })
}

/// Round-half-even decimal expansion with exactly `digits` fractional digits.
pub fn to_decimal(x: &ExactRational, digits: usize) -> String {
    let numer = x.numer();
    let denom = x.denom();
    let scaled = numer.abs() * num_traits::pow(BigInt::from(10u32), digits);
    let (mut q, r) = scaled.div_rem(denom);
    let twice = r * 2u32;
    if twice > *denom || (twice == *denom && q.is_odd()) {
        q += 1u32;
    }
    let negative = numer.sign() == Sign::Minus && !q.is_zero();
    let mut body = q.to_string();
    if body.len() <= digits {
        body = format!("{}{body}", "0".repeat(digits + 1 - body.len()));
    }
    let split = body.len() - digits;
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{body}")
    } else {
        format!("{sign}{}.{}", &body[..split], &body[split..])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d).unwrap()
    }

    /// `C(2k,k)^2 / 16^k` straight from factorials.
    fn factorial_term(k: u64) -> ExactRational {
        let fact = |m: u64| (1..=m).fold(BigInt::one(), |acc, i| acc * i);
        let binom = fact(2 * k) / (fact(k) * fact(k));
        ExactRational::new(
            &binom * &binom,
            num_traits::pow(BigInt::from(16u32), k as usize),
        )
        .unwrap()
    }

    #[test]
    fn terms_match_examples() {
        assert_eq!(landau_term(0), q(1, 1));
        assert_eq!(landau_term(1), q(1, 4));
        assert_eq!(landau_term(2), q(9, 64));
        assert_eq!(landau_term(3), q(25, 256));
        assert_eq!(landau_term(3), factorial_term(3));
    }

    #[test]
    fn constants_match_examples() {
        assert_eq!(landau_constant(0), q(1, 1));
        assert_eq!(landau_constant(1), q(5, 4));
        assert_eq!(landau_constant(2), q(89, 64));
        assert_eq!(landau_constant(3), q(381, 256));
    }

    #[test]
    fn sequence_examples() {
        assert_eq!(landau_sequence(0).unwrap().values(), &[q(1, 1)]);
        assert_eq!(
            landau_sequence(2).unwrap().values(),
            &[q(1, 1), q(5, 4), q(89, 64)]
        );
        let oracle = (0..=19)
            .map(factorial_term)
            .fold(ExactRational::zero(), |a, t| a + t);
        assert_eq!(landau_sequence(19).unwrap().values()[19], oracle);
    }

    #[test]
    fn sequence_cap() {
        let err = landau_sequence_capped(11, 10).unwrap_err();
        assert!(matches!(
            err,
            Error::ResourceLimit {
                requested: 11,
                cap: 10,
                ..
            }
        ));
        assert!(landau_sequence_capped(10, 10).is_ok());
        assert!(matches!(
            landau_sequence(DEFAULT_N_CAP + 1),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn decimal_examples() {
        assert_eq!(to_decimal(&q(89, 64), 8), "1.39062500");
        assert_eq!(to_decimal(&q(1, 1), 3), "1.000");
        assert_eq!(to_decimal(&q(5, 4), 2), "1.25");
    }

    #[test]
    fn decimal_half_even() {
        assert_eq!(to_decimal(&q(5, 4), 1), "1.2");
        assert_eq!(to_decimal(&q(7, 4), 1), "1.8");
        assert_eq!(to_decimal(&q(-5, 4), 1), "-1.2");
        assert_eq!(to_decimal(&q(1, 3), 4), "0.3333");
        assert_eq!(to_decimal(&q(2, 3), 4), "0.6667");
        assert_eq!(to_decimal(&q(-1, 1000), 2), "0.00");
        assert_eq!(to_decimal(&q(1, 200), 2), "0.00");
        assert_eq!(to_decimal(&q(3, 200), 2), "0.02");
    }

    #[test]
    fn parse_decimal_literals() {
        assert_eq!("0.25".parse::<ExactRational>().unwrap(), q(1, 4));
        assert_eq!("-1.5".parse::<ExactRational>().unwrap(), q(-3, 2));
        assert_eq!(
            "9.7924E-9".parse::<ExactRational>().unwrap(),
            q(97924, 10_000_000_000_000)
        );
        assert_eq!("89/64".parse::<ExactRational>().unwrap(), q(89, 64));
        assert_eq!("12".parse::<ExactRational>().unwrap(), q(12, 1));
        assert_eq!("1e3".parse::<ExactRational>().unwrap(), q(1000, 1));
        assert!("abc".parse::<ExactRational>().is_err());
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!(".".parse::<ExactRational>().is_err());
    }

    #[test]
    fn term_recurrence_and_differences() {
        let seq = landau_sequence(500).unwrap();
        let terms: Vec<_> = LandauTerms::new().take(502).collect();
        for (pair, term) in seq.values().windows(2).zip(&terms[1..]) {
            assert_eq!(&pair[1] - &pair[0], *term);
        }
        for k in 0..=200u64 {
            assert!(terms[k as usize].is_positive());
            let ratio = q(2 * k as i64 + 1, 2 * k as i64 + 2);
            assert_eq!(&terms[k as usize + 1] / &terms[k as usize], &ratio * &ratio);
        }
    }

    #[test]
    fn denominator_divides_power_of_16() {
        let seq = landau_sequence(120).unwrap();
        for (n, g) in seq.values().iter().enumerate() {
            let pow = num_traits::pow(BigInt::from(16u32), n);
            assert!((pow % g.denom()).is_zero(), "n = {n}");
        }
    }

    #[test]
    fn prefix_consistency() {
        let seq = landau_sequence(60).unwrap();
        for i in 0..=60u64 {
            assert_eq!(seq.values()[i as usize], landau_constant(i));
        }
        assert_eq!(seq.n_max(), 60);
    }
}
