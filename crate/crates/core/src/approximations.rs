//! Closed-form approximations to `G_n`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::bpes_fit::MathConstants;
use crate::error::{Error, Result};

/// Offset of the Brutman-style column, the mean of
/// `value - ln(n + 3/4)/pi` over the 20 rows of the published table.
pub const BRUTMAN_OFFSET: f64 = 1.066_270_000_783_339;

/// `(gamma + ln 16) / pi`, the constant term shared by every form here.
pub fn log_law_offset() -> f64 {
    let k = MathConstants::get();
    (k.euler_gamma + k.ln16) / k.pi
}

/// `(ln(n + 3/4) + gamma + ln 16) / pi`.
pub fn falaleev(n: u64) -> f64 {
    let k = MathConstants::get();
    ((n as f64 + 0.75).ln() + k.euler_gamma + k.ln16) / k.pi
}

/// `ln(n + 3/4)/pi + offset`.
pub fn brutman(n: u64, offset: f64) -> f64 {
    (n as f64 + 0.75).ln() / PI + offset
}

/// `ln(n + a)/pi + (gamma + ln 16)/pi - b/(n + c)`.
pub fn fitted_form(n: u64, a: f64, b: f64, c: f64) -> Result<f64> {
    check_evaluable(n as f64, a, c)?;
    let k = MathConstants::get();
    let x = n as f64;
    Ok((x + a).ln() / k.pi + (k.euler_gamma + k.ln16) / k.pi - b / (x + c))
}

/// `n + a > 0` and `n + c != 0`, otherwise a domain error.
pub(crate) fn check_evaluable(n: f64, a: f64, c: f64) -> Result<()> {
    if (n + a).partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Domain(format!("n + a = {} is not positive", n + a)));
    }
    if n + c == 0.0 || !(n + c).is_finite() {
        return Err(Error::Domain(format!(
            "n + c = {} is not a valid divisor",
            n + c
        )));
    }
    Ok(())
}

/// One member of the approximation registry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ApproxSpec {
    Falaleev,
    Brutman { offset: f64 },
    Fitted { a: f64, b: f64, c: f64 },
}

impl ApproxSpec {
    pub fn brutman_default() -> Self {
        ApproxSpec::Brutman {
            offset: BRUTMAN_OFFSET,
        }
    }

    pub fn fitted(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::Domain("fitted parameters must be finite".into()));
        }
        Ok(ApproxSpec::Fitted { a, b, c })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ApproxSpec::Falaleev => "falaleev",
            ApproxSpec::Brutman { .. } => "brutman",
            ApproxSpec::Fitted { .. } => "fitted",
        }
    }

    pub fn eval(&self, n: u64) -> Result<f64> {
        match *self {
            ApproxSpec::Falaleev => Ok(falaleev(n)),
            ApproxSpec::Brutman { offset } => Ok(brutman(n, offset)),
            ApproxSpec::Fitted { a, b, c } => fitted_form(n, a, b, c),
        }
    }
}

impl fmt::Display for ApproxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `falaleev` and `brutman` (default offset). `fitted` has no
/// parameters of its own and must be built with [`ApproxSpec::fitted`].
impl FromStr for ApproxSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "falaleev" => Ok(ApproxSpec::Falaleev),
            "brutman" => Ok(ApproxSpec::brutman_default()),
            other => Err(Error::Domain(format!("unknown approximation {other:?}"))),
        }
    }
}
