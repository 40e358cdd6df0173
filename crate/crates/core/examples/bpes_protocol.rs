//! The polynomial-expansion estimator: basis integrals over B_4k(x r_k),
//! the min-norm xi^A, the xi^B/xi^C pair, and the resulting (A, B, C).

use landau::bpes_fit::{bpes_pipeline, estimators_from_xi};

fn main() -> landau::Result<()> {
    for n0 in [1, 2, 4, 8] {
        let run = bpes_pipeline(n0)?;
        let coeffs = &run.coefficients;
        println!("N0 = {n0}");
        for k in 0..n0 {
            println!(
                "  k={:<2} r={:.12} Lambda={:+.6e} Y={:+.6e} xiA={:+.6e} xiB={:+.6e} xiC={:+.6e}",
                k + 1,
                coeffs.roots[k].to_f64(),
                coeffs.lambda_k[k].to_f64(),
                coeffs.y_k[k].to_f64(),
                coeffs.xi_a[k],
                coeffs.xi_b[k],
                coeffs.xi_c[k],
            );
        }
        let (a, b, c) = estimators_from_xi(coeffs);
        println!("  A={a:.10} B={b:.10} C={c:.10}");
        println!(
            "  delta={:.3e} delta'={:.3e} (baseline {:.3e})\n",
            run.delta, run.delta_prime, run.delta_prime_baseline
        );
    }
    Ok(())
}
