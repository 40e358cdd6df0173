//! Boubaker polynomials: construction, exact calculus, and minimal roots.
//!
//! The family follows `B_0 = 1`, `B_1 = x`, `B_2 = x^2 + 2` and
//! `B_m = x B_{m-1} - B_{m-2}` for `m >= 3`. Orders `4k` satisfy
//! `B_{4k}(0) = -2` and `B'_{4k}(0) = 0`, which is what the expansion
//! scheme relies on.
//!
//! Root isolation never touches floating point for sign decisions: scan
//! points and bisection midpoints are dyadic rationals and the polynomial
//! is evaluated exactly, so the sign change found is the true one.

use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_landau::ExactRational;

pub const DEFAULT_MAX_ORDER: usize = 400;
pub const DEFAULT_ROOT_TOL: f64 = 1e-14;
pub const DEFAULT_PRECISION_DIGITS: u32 = 30;
pub const DEFAULT_SCAN_BOUND: f64 = 10.0;

/// Dense polynomial with arbitrary-precision integer coefficients.
/// `coeffs[i]` multiplies `x^i`; trailing zeros are trimmed, so the zero
/// polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new<I, T>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut coeffs: Vec<BigInt> = coeffs.into_iter().map(Into::into).collect();
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::new([1])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::new([0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Exact value at a rational point.
    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        let (numer, denom_pow) = self.eval_homogeneous(x.numer(), x.denom());
        ExactRational::from(BigRational::new(numer, denom_pow))
    }

    /// Sign of the value at `x`, decided exactly.
    pub fn sign_at(&self, x: &ExactRational) -> i8 {
        let (numer, _) = self.eval_homogeneous(x.numer(), x.denom());
        signum(&numer)
    }

    /// Horner evaluation in `f64`. Coefficients are rounded first, so
    /// high orders lose accuracy through cancellation; use [`eval`](Self::eval)
    /// when the result matters.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// For `x = u/v` with `v > 0` returns `(N, v^d)` with `p(x) = N / v^d`,
    /// `d` the degree. No gcd work is done along the way.
    fn eval_homogeneous(&self, u: &BigInt, v: &BigInt) -> (BigInt, BigInt) {
        let Some(degree) = self.degree() else {
            return (BigInt::zero(), BigInt::one());
        };
        let mut acc = self.coeffs[degree].clone();
        let mut v_pow = BigInt::one();
        for c in self.coeffs[..degree].iter().rev() {
            v_pow *= v;
            acc = acc * u + c * &v_pow;
        }
        (acc, v_pow)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i)),
        )
    }

    /// `x * self`.
    pub fn shift_up(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigInt::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|i| self.coeff(i) - other.coeff(i)))
    }

    /// `integral_a^b p(x) dx`, evaluated through the exact antiderivative.
    pub fn definite_integral(&self, a: &ExactRational, b: &ExactRational) -> Result<ExactRational> {
        if a > b {
            return Err(Error::Domain(format!(
                "integration bounds out of order: {a} > {b}"
            )));
        }
        let anti = |x: &BigRational| -> BigRational {
            let mut acc = BigRational::zero();
            for (i, c) in self.coeffs.iter().enumerate().rev() {
                acc = (acc + BigRational::new(c.clone(), BigInt::from(i + 1))) * x;
            }
            acc
        };
        Ok(ExactRational::from(anti(b.as_ratio()) - anti(a.as_ratio())))
    }
}

impl fmt::Display for IntPolynomial {
    /// Comma-separated coefficients in ascending powers; `0` for the zero
    /// polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial[{self}]")
    }
}

fn signum(value: &BigInt) -> i8 {
    if value.is_positive() {
        1
    } else if value.is_negative() {
        -1
    } else {
        0
    }
}

/// Memoized Boubaker family up to a fixed maximum order.
///
/// Readers share the cache; extending it takes the write lock.
#[derive(Debug)]
pub struct BoubakerFamily {
    max_order: usize,
    cache: RwLock<Vec<Arc<IntPolynomial>>>,
}

impl BoubakerFamily {
    pub fn new(max_order: usize) -> Self {
        let seed = vec![
            Arc::new(IntPolynomial::one()),
            Arc::new(IntPolynomial::x()),
            Arc::new(IntPolynomial::new([2, 0, 1])),
        ];
        Self {
            max_order,
            cache: RwLock::new(seed),
        }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// `B_m`.
    pub fn get(&self, m: usize) -> Result<Arc<IntPolynomial>> {
        if m > self.max_order {
            return Err(Error::ResourceLimit {
                what: "Boubaker order",
                requested: m as u64,
                cap: self.max_order as u64,
            });
        }
        {
            let cache = self.cache.read().expect("poisoned Boubaker cache");
            if let Some(p) = cache.get(m) {
                return Ok(Arc::clone(p));
            }
        }
        let mut cache = self.cache.write().expect("poisoned Boubaker cache");
        while cache.len() <= m {
            let n = cache.len();
            let next = cache[n - 1].shift_up().sub(&cache[n - 2]);
            cache.push(Arc::new(next));
        }
        Ok(Arc::clone(&cache[m]))
    }
}

impl Default for BoubakerFamily {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_ORDER)
    }
}

fn shared_family() -> &'static BoubakerFamily {
    static FAMILY: OnceLock<BoubakerFamily> = OnceLock::new();
    FAMILY.get_or_init(BoubakerFamily::default)
}

/// `B_m` from the process-wide memoized family (max order
/// [`DEFAULT_MAX_ORDER`]).
pub fn boubaker_poly(m: usize) -> Result<Arc<IntPolynomial>> {
    shared_family().get(m)
}

pub fn eval_poly(p: &IntPolynomial, x: &ExactRational) -> ExactRational {
    p.eval(x)
}

pub fn derivative(p: &IntPolynomial) -> IntPolynomial {
    p.derivative()
}

pub fn definite_integral(
    p: &IntPolynomial,
    a: &ExactRational,
    b: &ExactRational,
) -> Result<ExactRational> {
    p.definite_integral(a, b)
}

/// Tuning for [`minimal_positive_root_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct RootConfig {
    /// Final bracket width, and upper bound on the recorded residual.
    pub tol: f64,
    /// Significant decimal digits kept by the derivative polish.
    pub precision_digits: u32,
    /// The forward scan gives up beyond this abscissa.
    pub scan_bound: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_ROOT_TOL,
            precision_digits: DEFAULT_PRECISION_DIGITS,
            scan_bound: DEFAULT_SCAN_BOUND,
        }
    }
}

impl RootConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    fn precision_bits(&self) -> u32 {
        // log2(10) < 3.33
        (self.precision_digits as f64 * 3.33).ceil() as u32 + 8
    }
}

/// The minimal positive root of `B_order` with its isolating bracket.
#[derive(Clone, Debug, PartialEq)]
pub struct RootRecord {
    pub order: usize,
    /// Root rounded to the working precision (a dyadic rational).
    pub root: ExactRational,
    /// `|B_order(root)|`.
    pub residual: f64,
    /// `lo < root < hi`, with `B_order` of opposite signs at the ends.
    pub bracket: (ExactRational, ExactRational),
}

impl RootRecord {
    pub fn root_f64(&self) -> f64 {
        self.root.to_f64()
    }

    pub fn bracket_f64(&self) -> (f64, f64) {
        (self.bracket.0.to_f64(), self.bracket.1.to_f64())
    }

    pub fn bracket_width(&self) -> f64 {
        (&self.bracket.1 - &self.bracket.0).to_f64()
    }
}

/// Minimal positive root of `B_m` with the default configuration and the
/// given tolerance.
pub fn minimal_positive_root(m: usize, tol: f64) -> Result<RootRecord> {
    minimal_positive_root_with(m, &RootConfig::with_tol(tol))
}

/// Forward scan from `0+` for the first sign change, bisection down to
/// `config.tol`, then Newton polishing at `config.precision_digits`.
pub fn minimal_positive_root_with(m: usize, config: &RootConfig) -> Result<RootRecord> {
    if m < 3 {
        return Err(Error::Domain(format!(
            "minimal root requires order >= 3, got {m}"
        )));
    }
    if !(config.tol.is_finite() && config.tol > 0.0) {
        return Err(Error::Domain(format!(
            "root tolerance must be positive, got {}",
            config.tol
        )));
    }
    let p = boubaker_poly(m)?;
    let dp = p.derivative();
    let (lo, hi) = match scan_first_sign_change(&p, &dp, m, config.scan_bound)? {
        Scan::Bracket(lo, hi) => (lo, hi),
        Scan::ExactRoot(x) => return exact_root_record(m, &p, x),
    };
    let lo_sign = p.sign_at(&lo);

    let (mut lo, mut hi) = (lo, hi);
    let half = ExactRational::new(1, 2)?;
    let width = |lo: &ExactRational, hi: &ExactRational| (hi - lo).to_f64();
    while width(&lo, &hi) > config.tol {
        let mid = (&lo + &hi) * &half;
        match p.sign_at(&mid) {
            0 => return exact_root_record(m, &p, mid),
            s if s == lo_sign => lo = mid,
            _ => hi = mid,
        }
    }

    let bits = config.precision_bits();
    let mut root = polish(&p, &dp, &lo, &hi, bits);
    let mut residual = p.eval(&root).abs();
    // Newton can stall on a badly conditioned bracket; finish by bisection.
    let tol_exact = ExactRational::from_f64(config.tol)?;
    let floor = ExactRational::new(1, num_traits::pow(BigInt::from(2u32), bits as usize))?;
    while residual > tol_exact && &hi - &lo > floor {
        let mid = (&lo + &hi) * &half;
        match p.sign_at(&mid) {
            0 => return exact_root_record(m, &p, mid),
            s if s == lo_sign => lo = mid,
            _ => hi = mid,
        }
        root = (&lo + &hi) * &half;
        residual = p.eval(&root).abs();
    }

    Ok(RootRecord {
        order: m,
        root,
        residual: residual.to_f64(),
        bracket: (lo, hi),
    })
}

enum Scan {
    Bracket(ExactRational, ExactRational),
    ExactRoot(ExactRational),
}

/// Walks right from 0 on a dyadic grid. The step is capped at the largest
/// power of two not above `1/(2m)` and shrinks towards 1/64 of that as the
/// Newton distance `|p/p'|` gets small.
fn scan_first_sign_change(
    p: &IntPolynomial,
    dp: &IntPolynomial,
    m: usize,
    bound: f64,
) -> Result<Scan> {
    let cap_exp = (2.0 * m as f64).log2().ceil() as u32;
    let grid_exp = cap_exp + 6;
    let grid = 2f64.powi(-(grid_exp as i32));
    let max_units: u64 = 64;
    let denom = num_traits::pow(BigInt::from(2u32), grid_exp as usize);
    let at = |units: u64| ExactRational::new(BigInt::from(units), denom.clone()).expect("nonzero");

    // sign immediately right of 0 is the sign of the lowest nonzero coefficient
    let mut prev_sign = match p.coeffs().iter().find(|c| !c.is_zero()) {
        Some(c) => signum(c),
        None => {
            return Err(Error::Domain(
                "zero polynomial has no isolated roots".into(),
            ))
        }
    };
    let mut units: u64 = 0;
    loop {
        let x = at(units);
        let step = if units == 0 {
            1
        } else {
            let newton = (p.eval(&x).to_f64() / dp.eval(&x).to_f64()).abs();
            let wanted = (0.5 * newton / grid).floor();
            let wanted = if wanted.is_nan() {
                max_units
            } else {
                wanted.clamp(1.0, max_units as f64) as u64
            };
            1u64 << (63 - wanted.leading_zeros())
        };
        let next = units + step;
        if next as f64 * grid > bound {
            return Err(Error::NoRoot { order: m, bound });
        }
        let x_next = at(next);
        let s = p.sign_at(&x_next);
        if s == 0 {
            return Ok(Scan::ExactRoot(x_next));
        }
        if s != prev_sign {
            return Ok(Scan::Bracket(at(units), x_next));
        }
        prev_sign = s;
        units = next;
    }
}

fn round_to_grid(x: &ExactRational, bits: u32) -> ExactRational {
    let scale = num_traits::pow(BigInt::from(2u32), bits as usize);
    let scaled = x.numer() * &scale;
    let (q, r) = scaled.div_mod_floor(x.denom());
    let q = if r * 2u32 >= *x.denom() { q + 1u32 } else { q };
    ExactRational::new(q, scale).expect("nonzero scale")
}

/// Newton iteration from the bracket midpoint, rounded to `bits` binary
/// digits each step; iterates leaving `(lo, hi)` are rejected.
fn polish(
    p: &IntPolynomial,
    dp: &IntPolynomial,
    lo: &ExactRational,
    hi: &ExactRational,
    bits: u32,
) -> ExactRational {
    let half = ExactRational::new(1, 2).expect("nonzero");
    let mut x = round_to_grid(&((lo + hi) * &half), bits);
    if !(&x > lo && &x < hi) {
        x = (lo + hi) * &half;
    }
    let mut fx = p.eval(&x);
    for _ in 0..64 {
        let slope = dp.eval(&x);
        if slope.is_zero() || fx.is_zero() {
            break;
        }
        let candidate = round_to_grid(&(&x - &(&fx / &slope)), bits);
        if !(&candidate > lo && &candidate < hi) || candidate == x {
            break;
        }
        let f_candidate = p.eval(&candidate);
        if f_candidate.abs() >= fx.abs() {
            break;
        }
        x = candidate;
        fx = f_candidate;
    }
    x
}

/// A scan or bisection point hit the root exactly. Builds a bracket by
/// halving a symmetric interval until the ends straddle the root.
fn exact_root_record(m: usize, p: &IntPolynomial, root: ExactRational) -> Result<RootRecord> {
    let mut delta = ExactRational::new(1, 1024)?;
    let half = ExactRational::new(1, 2)?;
    for _ in 0..256 {
        let lo = &root - &delta;
        let hi = &root + &delta;
        let (sl, sh) = (p.sign_at(&lo), p.sign_at(&hi));
        if lo.is_positive() && sl != 0 && sh != 0 && sl != sh {
            return Ok(RootRecord {
                order: m,
                root,
                residual: 0.0,
                bracket: (lo, hi),
            });
        }
        delta = delta * &half;
    }
    Err(Error::Domain(format!(
        "root {root} of B_{m} has even multiplicity"
    )))
}

/// `sum_{k=1..N} B_{4k}(0)`, exact.
pub fn zero_sum_property(n: usize) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    (1..=n).try_fold(BigInt::zero(), |acc, k| {
        Ok(acc + boubaker_poly(4 * k)?.coeff(0))
    })
}

/// `sum_{k=1..N} B'_{4k}(0)`, exact.
pub fn derivative_sum_at_zero(n: usize) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    (1..=n).try_fold(BigInt::zero(), |acc, k| {
        Ok(acc + boubaker_poly(4 * k)?.coeff(1))
    })
}

/// `sum_{k=1..N} |B_{4k}(r_k)|`, each term taken at its own minimal root.
pub fn root_sum_residual(n: usize, tol: f64) -> Result<f64> {
    (1..=n).try_fold(0.0, |acc, k| {
        Ok(acc + minimal_positive_root(4 * k, tol)?.residual)
    })
}

/// `B'_{4k}(r_k)` at the minimal positive root `r_k` of `B_{4k}`.
pub fn derivative_at_root(k: usize, tol: f64) -> Result<ExactRational> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let record = minimal_positive_root(4 * k, tol)?;
    Ok(boubaker_poly(4 * k)?.derivative().eval(&record.root))
}
