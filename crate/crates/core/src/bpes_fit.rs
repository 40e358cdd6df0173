//! Estimation of `(A, B, C)` in
//! `omega_n = G_n - ln(n+A)/pi - (gamma + ln 16)/pi + B/(n+C)`.
//!
//! Two routes are provided:
//!
//! - the Boubaker polynomial expansion scheme (BPES): weights `xi^A`,
//!   `xi^B`, `xi^C` on the basis `B_{4k}(x r_k)` are chosen to cancel the
//!   scalar conditions `Delta` and `Delta'`, and the estimators average the
//!   weighted basis over `x in [0, 1]`;
//! - a damped Gauss-Newton fit driving `omega_n` to zero on a range of `n`
//!   against the exact constants ([`fit_direct`]) or an arbitrary column of
//!   values ([`recover_parameters`]).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::approximations::check_evaluable;
use crate::boubaker::{boubaker_poly, minimal_positive_root_with, RootConfig};
use crate::error::{Error, Result};
use crate::exact_landau::{landau_sequence, ExactRational};

/// Constants of the logarithmic law, in working (`f64`) precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MathConstants {
    pub euler_gamma: f64,
    pub ln16: f64,
    pub pi: f64,
}

impl MathConstants {
    pub const fn get() -> Self {
        Self {
            euler_gamma: 0.577_215_664_901_532_9,
            ln16: 4.0 * std::f64::consts::LN_2,
            pi: PI,
        }
    }

    /// `(gamma + ln 16) / pi`.
    pub fn log_offset(&self) -> f64 {
        (self.euler_gamma + self.ln16) / self.pi
    }
}

/// `omega_n` for the parameters `(a, b, c)`; `g_exact` is `G_n`.
pub fn omega(n: u64, a: f64, b: f64, c: f64, g_exact: &ExactRational) -> Result<f64> {
    omega_against(n as f64, g_exact.to_f64(), a, b, c)
}

fn omega_against(n: f64, target: f64, a: f64, b: f64, c: f64) -> Result<f64> {
    check_evaluable(n, a, c)?;
    let k = MathConstants::get();
    Ok(target - (n + a).ln() / k.pi - k.log_offset() + b / (n + c))
}

// ---------------------------------------------------------------------------
// BPES protocol

/// Basis integrals and expansion weights for one choice of `N_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BpesCoefficients {
    pub n0: usize,
    /// Minimal positive roots `r_k` of `B_{4k}`, at working precision.
    pub roots: Vec<ExactRational>,
    /// `(3/4) int_0^1 x B_{4k}(x r_k) dx`.
    pub lambda_k: Vec<ExactRational>,
    /// `lambda_k / pi`; not rational, so kept in `f64`.
    pub x_k: Vec<f64>,
    /// `int_0^1 B_{4k}(x r_k) dx`.
    pub y_k: Vec<ExactRational>,
    /// Equal to `y_k`.
    pub z_k: Vec<ExactRational>,
    pub xi_a: Vec<f64>,
    pub xi_b: Vec<f64>,
    pub xi_c: Vec<f64>,
}

impl BpesCoefficients {
    fn half_mean(&self, weights: &[f64], basis: impl Iterator<Item = f64>) -> f64 {
        let sum: f64 = weights.iter().zip(basis).map(|(w, v)| w * v).sum();
        sum / (2 * self.n0) as f64
    }

    fn lambda_f64(&self) -> Vec<f64> {
        self.lambda_k.iter().map(ExactRational::to_f64).collect()
    }

    fn y_f64(&self) -> Vec<f64> {
        self.y_k.iter().map(ExactRational::to_f64).collect()
    }
}

/// `int_0^1 x^power B_m(x r) dx = sum_j c_j r^j / (j + power + 1)`.
fn scaled_moment(m: usize, r: &ExactRational, power: usize) -> Result<ExactRational> {
    let p = boubaker_poly(m)?;
    let mut r_pow = ExactRational::one();
    let mut acc = ExactRational::zero();
    for (j, c) in p.coeffs().iter().enumerate() {
        if !c.is_zero() {
            let term = ExactRational::new(c.clone(), j + power + 1)?;
            acc = acc + term * &r_pow;
        }
        r_pow = r_pow * r;
    }
    Ok(acc)
}

/// Roots and basis integrals for `k = 1..=n0`; weights are left empty.
pub fn basis_integrals(n0: usize) -> Result<BpesCoefficients> {
    basis_integrals_with(n0, &RootConfig::default())
}

pub fn basis_integrals_with(n0: usize, config: &RootConfig) -> Result<BpesCoefficients> {
    if n0 == 0 {
        return Err(Error::Domain("N0 must be at least 1".into()));
    }
    let three_quarters = ExactRational::new(3, 4)?;
    let per_k: Vec<(ExactRational, ExactRational, ExactRational)> = (1..=n0)
        .into_par_iter()
        .map(|k| {
            let root = minimal_positive_root_with(4 * k, config)?.root;
            let lambda = &three_quarters * &scaled_moment(4 * k, &root, 1)?;
            let y = scaled_moment(4 * k, &root, 0)?;
            Ok((root, lambda, y))
        })
        .collect::<Result<_>>()?;
    let mut out = BpesCoefficients {
        n0,
        roots: Vec::with_capacity(n0),
        lambda_k: Vec::with_capacity(n0),
        x_k: Vec::with_capacity(n0),
        y_k: Vec::with_capacity(n0),
        z_k: Vec::with_capacity(n0),
        xi_a: Vec::new(),
        xi_b: Vec::new(),
        xi_c: Vec::new(),
    };
    for (root, lambda, y) in per_k {
        out.x_k.push(lambda.to_f64() / PI);
        out.roots.push(root);
        out.lambda_k.push(lambda);
        out.z_k.push(y.clone());
        out.y_k.push(y);
    }
    Ok(out)
}

/// `Delta = |(1/2N0) sum xi_k Lambda_k - (gamma + ln 16)/pi|`.
pub fn delta(basis: &BpesCoefficients, xi_a: &[f64]) -> f64 {
    let k = MathConstants::get().log_offset();
    (basis.half_mean(xi_a, basis.lambda_f64().into_iter()) - k).abs()
}

/// `Delta'` with the `X`, `Y`, `Z` weights.
pub fn delta_prime(basis: &BpesCoefficients, xi_a: &[f64], xi_b: &[f64], xi_c: &[f64]) -> f64 {
    let k = MathConstants::get().log_offset();
    let s_ax = basis.half_mean(xi_a, basis.x_k.iter().copied());
    let s_by = basis.half_mean(xi_b, basis.y_f64().into_iter());
    let s_cz = basis.half_mean(xi_c, basis.z_k.iter().map(ExactRational::to_f64));
    (s_ax - k + s_by * (1.0 - s_cz)).abs()
}

/// Minimum-norm `xi^A` with `Delta = 0`: `xi_k = lambda Lambda_k`,
/// `lambda = 2 N0 (gamma + ln 16) / (pi sum Lambda_j^2)`. Returns the
/// weights and the achieved `Delta`.
pub fn solve_xi_a(basis: &BpesCoefficients) -> Result<(Vec<f64>, f64)> {
    let lambdas = basis.lambda_f64();
    let norm_sq: f64 = lambdas.iter().map(|l| l * l).sum();
    if norm_sq == 0.0 {
        return Err(Error::DegenerateBasis("every Lambda_k vanishes"));
    }
    let scale = 2.0 * basis.n0 as f64 * MathConstants::get().log_offset() / norm_sq;
    let xi: Vec<f64> = lambdas.iter().map(|l| scale * l).collect();
    let achieved = delta(basis, &xi);
    Ok((xi, achieved))
}

/// `xi^B`, `xi^C` and the achieved `Delta'`.
#[derive(Clone, Debug, PartialEq)]
pub struct XiBcSolution {
    pub xi_b: Vec<f64>,
    pub xi_c: Vec<f64>,
    pub delta_prime: f64,
}

/// Cancels `Delta'` for the given `xi^A`.
///
/// With `S_B = (1/2N0) sum xi^B_k Y_k` and `S_C` likewise over `Z_k`, the
/// condition is `S_B (1 - S_C) = t`. The smallest weights realising given
/// sums are multiples of `Y`, and since `Y = Z` the combined norm is
/// proportional to `S_B^2 + S_C^2`. Minimising that on the hyperbola gives
/// `S_C (1 - S_C)^3 = -t^2`, solved by bisection on `[-t^2, 0]`.
pub fn solve_xi_bc(basis: &BpesCoefficients, xi_a: &[f64]) -> Result<XiBcSolution> {
    let ys = basis.y_f64();
    let norm_sq: f64 = ys.iter().map(|y| y * y).sum();
    if norm_sq == 0.0 {
        return Err(Error::DegenerateBasis("every Y_k vanishes"));
    }
    if xi_a.len() != basis.n0 {
        return Err(Error::Domain(format!(
            "xi^A has {} entries, expected {}",
            xi_a.len(),
            basis.n0
        )));
    }
    let k = MathConstants::get().log_offset();
    let target = k - basis.half_mean(xi_a, basis.x_k.iter().copied());

    let s_c = if target == 0.0 {
        0.0
    } else {
        let t2 = target * target;
        let f = |v: f64| v * (1.0 - v).powi(3) + t2;
        let (mut lo, mut hi) = (-t2, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let s_b = target / (1.0 - s_c);

    let two_n0 = (2 * basis.n0) as f64;
    let xi_b: Vec<f64> = ys.iter().map(|y| s_b * two_n0 * y / norm_sq).collect();
    let xi_c: Vec<f64> = ys.iter().map(|y| s_c * two_n0 * y / norm_sq).collect();
    let achieved = delta_prime(basis, xi_a, &xi_b, &xi_c);
    Ok(XiBcSolution {
        xi_b,
        xi_c,
        delta_prime: achieved,
    })
}

/// `(A^, B^, C^)`: each estimator is `(1/2N0) sum xi_k B_{4k}(x r_k)`
/// averaged over `x in [0, 1]`, i.e. weighted against `Y_k`.
pub fn estimators_from_xi(coeffs: &BpesCoefficients) -> (f64, f64, f64) {
    let ys = coeffs.y_f64();
    let est = |xi: &[f64]| coeffs.half_mean(xi, ys.iter().copied());
    (est(&coeffs.xi_a), est(&coeffs.xi_b), est(&coeffs.xi_c))
}

/// Result of the full BPES pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct BpesRun {
    pub coefficients: BpesCoefficients,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
    pub delta_prime: f64,
    /// `Delta'` at `xi^B = xi^C = 0`.
    pub delta_prime_baseline: f64,
}

pub fn bpes_pipeline(n0: usize) -> Result<BpesRun> {
    bpes_pipeline_with(n0, &RootConfig::default())
}

pub fn bpes_pipeline_with(n0: usize, config: &RootConfig) -> Result<BpesRun> {
    let mut coefficients = basis_integrals_with(n0, config)?;
    let (xi_a, achieved) = solve_xi_a(&coefficients)?;
    let bc = solve_xi_bc(&coefficients, &xi_a)?;
    let zeros = vec![0.0; n0];
    let baseline = delta_prime(&coefficients, &xi_a, &zeros, &zeros);
    coefficients.xi_a = xi_a;
    coefficients.xi_b = bc.xi_b;
    coefficients.xi_c = bc.xi_c;
    let (a, b, c) = estimators_from_xi(&coefficients);
    Ok(BpesRun {
        coefficients,
        a,
        b,
        c,
        delta: achieved,
        delta_prime: bc.delta_prime,
        delta_prime_baseline: baseline,
    })
}

impl BpesRun {
    /// Packages the estimators as a [`FitResult`] scored on `n_lo..=n_hi`.
    /// `converged` reports whether both protocol conditions hold to 1e-12.
    pub fn to_fit_result(&self, n_lo: u64, n_hi: u64) -> Result<FitResult> {
        let targets = exact_targets(n_lo, n_hi)?;
        let sum_sq = sum_of_squares(&targets, [self.a, self.b, self.c])?;
        Ok(FitResult {
            a: self.a,
            b: self.b,
            c: self.c,
            objective: (sum_sq / targets.len() as f64).sqrt(),
            iterations: 0,
            converged: self.delta <= 1e-12 && self.delta_prime <= 1e-12,
            method: FitMethod::Bpes,
            n_lo,
            n_hi,
            jacobian_rank: jacobian_rank(&targets, [self.a, self.b, self.c]),
        })
    }
}

// ---------------------------------------------------------------------------
// Direct least squares

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Direct,
    Bpes,
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMethod::Direct => "direct",
            FitMethod::Bpes => "bpes",
        })
    }
}

impl FromStr for FitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(FitMethod::Direct),
            "bpes" => Ok(FitMethod::Bpes),
            other => Err(Error::Domain(format!("unknown fit method {other:?}"))),
        }
    }
}

/// Fitted parameters and the quality of the fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// RMSE of `omega_n` over `n_lo..=n_hi`.
    pub objective: f64,
    pub iterations: u32,
    pub converged: bool,
    pub method: FitMethod,
    pub n_lo: u64,
    pub n_hi: u64,
    /// Numerical rank of the residual Jacobian at the returned point.
    #[serde(skip)]
    pub jacobian_rank: usize,
}

impl FitResult {
    pub fn params(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn identifiable(&self) -> bool {
        self.jacobian_rank == 3
    }
}

/// Controls for the damped Gauss-Newton iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussNewtonConfig {
    pub max_iterations: u32,
    /// Rejected trial steps allowed per iteration before giving up.
    pub max_rejections: u32,
    pub gradient_tol: f64,
    pub step_tol: f64,
    /// Initial Marquardt damping factor.
    pub initial_damping: f64,
}

impl Default for GaussNewtonConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            max_rejections: 60,
            gradient_tol: 1e-12,
            step_tol: 1e-14,
            initial_damping: 1e-3,
        }
    }
}

/// The Falaleev point, where the three-parameter form reduces to
/// `(ln(n + 3/4) + gamma + ln 16)/pi`.
pub const FALALEEV_SEED: [f64; 3] = [0.75, 0.0, 1.0];

type Targets = Vec<(f64, f64)>;

fn exact_targets(n_lo: u64, n_hi: u64) -> Result<Targets> {
    let seq = landau_sequence(n_hi)?;
    Ok((n_lo..=n_hi)
        .map(|n| (n as f64, seq.values()[n as usize].to_f64()))
        .collect())
}

fn residuals(targets: &[(f64, f64)], [a, b, c]: [f64; 3]) -> Result<Vec<f64>> {
    targets
        .par_iter()
        .map(|&(n, y)| omega_against(n, y, a, b, c))
        .collect()
}

/// Sum of squared residuals, accumulated in index order.
fn sum_of_squares(targets: &[(f64, f64)], params: [f64; 3]) -> Result<f64> {
    Ok(residuals(targets, params)?.iter().map(|r| r * r).sum())
}

/// Analytic partials of `omega_n` in `(a, b, c)`.
pub fn omega_gradient(n: f64, [a, b, c]: [f64; 3]) -> [f64; 3] {
    [
        -1.0 / (PI * (n + a)),
        1.0 / (n + c),
        -b / ((n + c) * (n + c)),
    ]
}

fn jacobian(targets: &[(f64, f64)], params: [f64; 3]) -> DMatrix<f64> {
    DMatrix::from_fn(targets.len(), 3, |i, j| {
        omega_gradient(targets[i].0, params)[j]
    })
}

fn jacobian_rank(targets: &[(f64, f64)], params: [f64; 3]) -> usize {
    let sv = jacobian(targets, params).singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > top * 1e-10).count()
}

struct Descent {
    trace: Vec<[f64; 3]>,
    params: [f64; 3],
    sum_sq: f64,
    iterations: u32,
    converged: bool,
}

/// Minimises `sum omega_n^2` over the given `(n, target)` pairs.
///
/// Each trial step solves `(J^T J + mu diag(J^T J)) d = -J^T r`. A trial
/// is accepted only if it is evaluable and strictly lowers the sum of
/// squares, so the objective never increases; rejections raise `mu`, which
/// shortens and rotates the step towards steepest descent. When `a` and `c`
/// meet, the `a` and `b` columns of `J` become proportional and the
/// undamped step blows up along that direction, which is why the damping
/// is scaled rather than a plain step halving.
fn gauss_newton(
    targets: &[(f64, f64)],
    seed: [f64; 3],
    config: &GaussNewtonConfig,
) -> Result<Descent> {
    let mut x = seed;
    let mut r = residuals(targets, x)?;
    let mut sum_sq: f64 = r.iter().map(|v| v * v).sum();
    let mut trace = vec![x];
    let mut iterations = 0;
    let mut converged = false;
    let mut mu = config.initial_damping;

    while iterations < config.max_iterations {
        let jac = jacobian(targets, x);
        let rv = DVector::from_column_slice(&r);
        let jtr = jac.tr_mul(&rv);
        if 2.0 * jtr.amax() < config.gradient_tol {
            converged = true;
            break;
        }
        let jtj = jac.tr_mul(&jac);
        let scale_floor = jtj.diagonal().max() * 1e-14;

        let mut accepted = None;
        let mut any_evaluable = false;
        let mut last_step_norm = f64::INFINITY;
        for _ in 0..=config.max_rejections {
            let mut lhs = jtj.clone();
            for i in 0..3 {
                lhs[(i, i)] += mu * jtj[(i, i)].max(scale_floor);
            }
            let step = lhs
                .lu()
                .solve(&(-&jtr))
                .filter(|s| s.iter().all(|v| v.is_finite()));
            let Some(step) = step else {
                mu *= 4.0;
                continue;
            };
            let candidate = [x[0] + step[0], x[1] + step[1], x[2] + step[2]];
            last_step_norm = step.amax();
            if let Ok(r_new) = residuals(targets, candidate) {
                any_evaluable = true;
                let s_new: f64 = r_new.iter().map(|v| v * v).sum();
                if s_new < sum_sq {
                    accepted = Some((candidate, r_new, s_new));
                    break;
                }
            }
            mu *= 4.0;
        }
        match accepted {
            Some((candidate, r_new, s_new)) => {
                iterations += 1;
                x = candidate;
                r = r_new;
                sum_sq = s_new;
                trace.push(x);
                mu = (mu / 8.0).max(1e-12);
                if last_step_norm < config.step_tol {
                    converged = true;
                    break;
                }
            }
            None if !any_evaluable => {
                return Err(Error::Domain(
                    "no evaluable Gauss-Newton step from the current iterate".into(),
                ));
            }
            None => {
                converged = last_step_norm < config.step_tol;
                break;
            }
        }
    }
    Ok(Descent {
        trace,
        params: x,
        sum_sq,
        iterations,
        converged,
    })
}

fn fit_targets(
    targets: &[(f64, f64)],
    seed: [f64; 3],
    config: &GaussNewtonConfig,
    n_lo: u64,
    n_hi: u64,
) -> Result<FitResult> {
    let run = gauss_newton(targets, seed, config)?;
    let x = run.params;
    Ok(FitResult {
        a: x[0],
        b: x[1],
        c: x[2],
        objective: (run.sum_sq / targets.len() as f64).sqrt(),
        iterations: run.iterations,
        converged: run.converged,
        method: FitMethod::Direct,
        n_lo,
        n_hi,
        jacobian_rank: jacobian_rank(targets, x),
    })
}

/// Damped Gauss-Newton fit of `(a, b, c)` against exact `G_n` on
/// `n_lo..=n_hi`.
pub fn fit_direct(n_lo: u64, n_hi: u64, seed: [f64; 3]) -> Result<FitResult> {
    fit_direct_with(n_lo, n_hi, seed, &GaussNewtonConfig::default())
}

pub fn fit_direct_with(
    n_lo: u64,
    n_hi: u64,
    seed: [f64; 3],
    config: &GaussNewtonConfig,
) -> Result<FitResult> {
    if n_lo >= n_hi {
        return Err(Error::Domain(format!("empty fit range {n_lo}:{n_hi}")));
    }
    let targets = exact_targets(n_lo, n_hi)?;
    fit_targets(&targets, seed, config, n_lo, n_hi)
}

/// Objective values of every accepted iterate of a direct fit, in order.
pub fn fit_direct_trace(n_lo: u64, n_hi: u64, seed: [f64; 3]) -> Result<Vec<f64>> {
    if n_lo >= n_hi {
        return Err(Error::Domain(format!("empty fit range {n_lo}:{n_hi}")));
    }
    let targets = exact_targets(n_lo, n_hi)?;
    let run = gauss_newton(&targets, seed, &GaussNewtonConfig::default())?;
    run.trace
        .into_iter()
        .map(|p| rmse_on(&targets, p))
        .collect()
}

fn rmse_on(targets: &[(f64, f64)], params: [f64; 3]) -> Result<f64> {
    Ok((sum_of_squares(targets, params)? / targets.len() as f64).sqrt())
}

/// RMSE of `omega_n` against exact `G_n` on `n_lo..=n_hi`.
pub fn rmse_exact(n_lo: u64, n_hi: u64, params: [f64; 3]) -> Result<f64> {
    rmse_on(&exact_targets(n_lo, n_hi)?, params)
}

fn column_targets(column: &[f64]) -> Targets {
    column
        .iter()
        .enumerate()
        .map(|(n, &y)| (n as f64, y))
        .collect()
}

/// Fits the three-parameter form to `column[n]`, `n = 0, 1, ...`, seeded at
/// the Falaleev point.
pub fn recover_parameters(column: &[f64]) -> Result<FitResult> {
    if column.len() < 4 {
        return Err(Error::Domain(format!(
            "need at least 4 values to fit 3 parameters, got {}",
            column.len()
        )));
    }
    let targets = column_targets(column);
    fit_targets(
        &targets,
        FALALEEV_SEED,
        &GaussNewtonConfig::default(),
        0,
        column.len() as u64 - 1,
    )
}

/// RMSE of the three-parameter form against `column`.
pub fn column_rmse(column: &[f64], params: [f64; 3]) -> Result<f64> {
    rmse_on(&column_targets(column), params)
}

/// True when no coordinate perturbation of `+-delta` lowers the RMSE
/// against `column`.
pub fn is_local_minimum(column: &[f64], params: [f64; 3], delta: f64) -> Result<bool> {
    let targets = column_targets(column);
    let base = rmse_on(&targets, params)?;
    for i in 0..3 {
        for sign in [-1.0, 1.0] {
            let mut p = params;
            p[i] += sign * delta;
            if let Ok(v) = rmse_on(&targets, p) {
                if v < base {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Best `ln(n + 3/4)/pi + offset` model for `column`: returns the offset
/// (the mean residual) and the RMSE it achieves.
pub fn pure_log_fit(column: &[f64]) -> (f64, f64) {
    let base: Vec<f64> = column
        .iter()
        .enumerate()
        .map(|(n, y)| y - (n as f64 + 0.75).ln() / PI)
        .collect();
    let offset = base.iter().sum::<f64>() / base.len() as f64;
    let mse = base.iter().map(|v| (v - offset).powi(2)).sum::<f64>() / base.len() as f64;
    (offset, mse.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximations::{falaleev, fitted_form};
    use crate::exact_landau::landau_constant;

    /// gamma from an exact harmonic number and an Euler-Maclaurin tail.
    fn gamma_oracle() -> f64 {
        let n = 100i64;
        let harmonic = (1..=n).fold(ExactRational::zero(), |acc, k| {
            acc + ExactRational::new(1, k).unwrap()
        });
        let x = n as f64;
        let tail = -1.0 / (2.0 * x) + 1.0 / (12.0 * x * x) - 1.0 / (120.0 * x.powi(4))
            + 1.0 / (252.0 * x.powi(6));
        harmonic.to_f64() - x.ln() + tail
    }

    #[test]
    fn constants() {
        let k = MathConstants::get();
        assert!(
            (k.euler_gamma - gamma_oracle()).abs() < 2e-15,
            "{}",
            gamma_oracle()
        );
        assert!((k.euler_gamma - 0.577_215_664_901_532_9).abs() < 1e-16);
        assert!((k.ln16 - 16f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn omega_examples() {
        let w2 = omega(2, 0.75, 0.0, 1.0, &landau_constant(2)).unwrap();
        assert!((w2 - 0.002_346_575_731_290).abs() < 1e-14, "{w2}");
        let w0 = omega(0, 0.75, 0.0, 1.0, &landau_constant(0)).unwrap();
        assert!((w0 - 0.025_296_194_530_329).abs() < 1e-14, "{w0}");
        for n in 0..40 {
            let g = landau_constant(n);
            let w = omega(n, 0.75, 0.0, 3.0, &g).unwrap();
            assert!((w - (g.to_f64() - falaleev(n))).abs() <= 1e-15);
        }
    }

    #[test]
    fn omega_domain() {
        let g = landau_constant(0);
        assert!(matches!(omega(0, 0.0, 0.0, 1.0, &g), Err(Error::Domain(_))));
        assert!(matches!(omega(0, 0.5, 0.0, 0.0, &g), Err(Error::Domain(_))));
    }

    #[test]
    fn omega_linear_in_b() {
        let g = landau_constant(7);
        for (b1, b2) in [(0.3, -0.2), (1.5, 0.0), (-4.0, 2.5)] {
            let d = omega(7, 0.9, b1, 1.7, &g).unwrap() - omega(7, 0.9, b2, 1.7, &g).unwrap();
            assert!((d - (b1 - b2) / 8.7).abs() < 1e-14);
        }
    }

    #[test]
    fn basis_integral_examples() {
        let basis = basis_integrals(1).unwrap();
        let l1 = basis.lambda_k[0].to_f64();
        assert!((l1 + 0.5).abs() < 1e-14, "{l1}");
        assert!((basis.x_k[0] - l1 / PI).abs() < 1e-16);
        assert!((basis.x_k[0] + 0.1591549).abs() < 1e-7);
        assert!((basis.y_k[0].to_f64() + 1.6).abs() < 1e-14);
        assert_eq!(basis.y_k, basis.z_k);
        assert!(basis_integrals(0).is_err());
    }

    #[test]
    fn xi_a_examples() {
        let basis = basis_integrals(1).unwrap();
        let (xi, d) = solve_xi_a(&basis).unwrap();
        assert!((xi[0] + 4.265_103_412_835_657).abs() < 1e-13, "{}", xi[0]);
        assert!(d <= 1e-12);

        let basis3 = basis_integrals(3).unwrap();
        let (xi3, d3) = solve_xi_a(&basis3).unwrap();
        assert!(d3 <= 1e-12);
        let l: Vec<f64> = basis3.lambda_k.iter().map(ExactRational::to_f64).collect();
        let ratio = xi3[0] / l[0];
        for i in 1..3 {
            assert!((xi3[i] / l[i] - ratio).abs() < 1e-12 * ratio.abs());
        }
    }

    #[test]
    fn xi_a_degenerate() {
        let mut basis = basis_integrals(2).unwrap();
        basis.lambda_k = vec![ExactRational::zero(); 2];
        assert!(matches!(solve_xi_a(&basis), Err(Error::DegenerateBasis(_))));
    }

    #[test]
    fn xi_bc_examples() {
        for n0 in [1, 2, 4] {
            let basis = basis_integrals(n0).unwrap();
            let (xi_a, _) = solve_xi_a(&basis).unwrap();
            let sol = solve_xi_bc(&basis, &xi_a).unwrap();
            assert!(sol.delta_prime <= 1e-12, "n0 = {n0}: {}", sol.delta_prime);
            let zeros = vec![0.0; n0];
            let baseline = delta_prime(&basis, &xi_a, &zeros, &zeros);
            let k = MathConstants::get().log_offset();
            let s_ax = basis.half_mean(&xi_a, basis.x_k.iter().copied());
            assert!((baseline - (s_ax - k).abs()).abs() < 1e-15);
            assert!(sol.delta_prime <= baseline);
        }
    }

    #[test]
    fn xi_bc_is_min_norm_on_the_constraint() {
        let basis = basis_integrals(2).unwrap();
        let (xi_a, _) = solve_xi_a(&basis).unwrap();
        let sol = solve_xi_bc(&basis, &xi_a).unwrap();
        let norm = |b: &[f64], c: &[f64]| b.iter().chain(c).map(|v| v * v).sum::<f64>();
        let best = norm(&sol.xi_b, &sol.xi_c);
        // other exact minimisers: same direction, different split of S_B (1 - S_C)
        let ys: Vec<f64> = basis.y_k.iter().map(ExactRational::to_f64).collect();
        let ny: f64 = ys.iter().map(|y| y * y).sum();
        let target =
            MathConstants::get().log_offset() - basis.half_mean(&xi_a, basis.x_k.iter().copied());
        for s_c in [-0.5, -0.3, -0.1, 0.0, 0.2] {
            let s_b = target / (1.0 - s_c);
            let b: Vec<f64> = ys.iter().map(|y| s_b * 4.0 * y / ny).collect();
            let c: Vec<f64> = ys.iter().map(|y| s_c * 4.0 * y / ny).collect();
            assert!(delta_prime(&basis, &xi_a, &b, &c) < 1e-12);
            assert!(norm(&b, &c) >= best - 1e-12);
        }
    }

    #[test]
    fn estimator_examples() {
        let mut basis = basis_integrals(1).unwrap();
        let (xi_a, _) = solve_xi_a(&basis).unwrap();
        basis.xi_a = vec![0.0];
        basis.xi_b = vec![0.0];
        basis.xi_c = vec![0.0];
        assert_eq!(estimators_from_xi(&basis).0, 0.0);

        basis.xi_a = xi_a.clone();
        let (a_hat, ..) = estimators_from_xi(&basis);
        assert!((a_hat - xi_a[0] * basis.y_k[0].to_f64() / 2.0).abs() < 1e-14);
        assert!((a_hat - 3.412_082_730_268_526).abs() < 1e-13, "{a_hat}");

        basis.xi_a = xi_a.iter().map(|v| 2.0 * v).collect();
        assert!((estimators_from_xi(&basis).0 - 2.0 * a_hat).abs() < 1e-14);
    }

    #[test]
    fn pipeline_packages_fit_result() {
        let run = bpes_pipeline(2).unwrap();
        assert!(run.delta <= 1e-12 && run.delta_prime <= 1e-12);
        let fit = run.to_fit_result(0, 19).unwrap();
        assert_eq!(fit.method, FitMethod::Bpes);
        assert!(fit.converged);
        assert!(fit.objective.is_finite());
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let h = 1e-6;
        let points = [
            (0.0, [0.75, 0.1, 1.0]),
            (3.0, [1.2, -0.4, 2.5]),
            (10.0, [0.3, 2.0, 0.7]),
            (1.0, [2.0, 0.05, 4.0]),
            (50.0, [0.9, -1.5, 3.3]),
            (7.0, [0.55, 0.8, 1.1]),
            (2.0, [1.7, 0.3, 0.9]),
            (19.0, [0.8, 0.05, 2.0]),
            (5.0, [3.0, -0.7, 6.0]),
            (100.0, [0.6, 4.0, 10.0]),
        ];
        for (n, p) in points {
            let analytic = omega_gradient(n, p);
            for j in 0..3 {
                let mut up = p;
                let mut down = p;
                up[j] += h;
                down[j] -= h;
                let fd = (omega_against(n, 1.5, up[0], up[1], up[2]).unwrap()
                    - omega_against(n, 1.5, down[0], down[1], down[2]).unwrap())
                    / (2.0 * h);
                let scale = analytic[j].abs().max(1e-8);
                assert!(
                    (fd - analytic[j]).abs() <= 1e-6 * scale,
                    "n={n} p={p:?} j={j}: {fd} vs {}",
                    analytic[j]
                );
            }
        }
    }

    #[test]
    fn direct_fit_examples() {
        let fit = fit_direct(0, 200, FALALEEV_SEED).unwrap();
        let falaleev_rmse = rmse_exact(0, 200, FALALEEV_SEED).unwrap();
        assert!(fit.objective <= falaleev_rmse);
        assert!(fit.converged, "{fit:?}");
        let seq = landau_sequence(200).unwrap();
        let max_abs = (0..=200u64)
            .map(|n| {
                omega(n, fit.a, fit.b, fit.c, &seq.values()[n as usize])
                    .unwrap()
                    .abs()
            })
            .fold(0.0, f64::max);
        assert!(max_abs < 1e-2, "{max_abs}");

        let tail = fit_direct(10, 200, FALALEEV_SEED).unwrap();
        assert!(tail.objective < fit.objective);
    }

    #[test]
    fn direct_fit_is_monotone() {
        let trace = fit_direct_trace(0, 200, FALALEEV_SEED).unwrap();
        assert!(trace.len() > 1);
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn direct_fit_rejects_bad_input() {
        assert!(fit_direct(5, 4, FALALEEV_SEED).is_err());
        assert!(fit_direct(0, 10, [-1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn recover_synthetic() {
        let column: Vec<f64> = (0..20)
            .map(|n| fitted_form(n, 0.8, 0.05, 2.0).unwrap())
            .collect();
        let fit = recover_parameters(&column).unwrap();
        assert!(fit.converged);
        for (got, want) in fit.params().iter().zip([0.8, 0.05, 2.0]) {
            assert!((got - want).abs() < 1e-6, "{:?}", fit.params());
        }
        assert!(fit.identifiable());
    }

    #[test]
    fn recover_needs_four_values() {
        assert!(recover_parameters(&[1.0, 1.2, 1.3]).is_err());
    }

    #[test]
    fn recover_constant_column() {
        let fit = recover_parameters(&[1.5; 12]).unwrap();
        assert!(fit.objective.is_finite());
        assert!(fit.jacobian_rank <= 3);
        assert_eq!(fit.identifiable(), fit.jacobian_rank == 3);
    }

    #[test]
    fn fit_result_serializes_flat() {
        let fit = FitResult {
            a: 0.5,
            b: 0.25,
            c: 1.0,
            objective: 0.125,
            iterations: 3,
            converged: true,
            method: FitMethod::Direct,
            n_lo: 0,
            n_hi: 19,
            jacobian_rank: 3,
        };
        let v = serde_json::to_value(&fit).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            [
                "a",
                "b",
                "c",
                "converged",
                "iterations",
                "method",
                "n_hi",
                "n_lo",
                "objective"
            ]
        );
        assert_eq!(v["method"], "direct");
    }
}
