//! Damped Gauss-Newton fit of ln(n+A)/pi + (gamma+ln16)/pi - B/(n+C) to the
//! exact constants, plus recovery of parameters from a tabulated column.

use landau::analysis::PaperTable;
use landau::approximations::fitted_form;
use landau::bpes_fit::{
    fit_direct, is_local_minimum, pure_log_fit, recover_parameters, rmse_exact, FALALEEV_SEED,
};

fn main() -> landau::Result<()> {
    for (lo, hi) in [(0, 200), (10, 200)] {
        let fit = fit_direct(lo, hi, FALALEEV_SEED)?;
        let seed_rmse = rmse_exact(lo, hi, FALALEEV_SEED)?;
        println!(
            "[{lo},{hi}] a={:.10} b={:.10} c={:.10} rmse={:.4e} (seed {:.4e}) iters={} converged={} rank={}",
            fit.a, fit.b, fit.c, fit.objective, seed_rmse, fit.iterations, fit.converged, fit.jacobian_rank
        );
    }

    let synthetic: Vec<f64> = (0..20)
        .map(|n| fitted_form(n, 0.8, 0.05, 2.0))
        .collect::<Result<_, _>>()?;
    let back = recover_parameters(&synthetic)?;
    println!(
        "\nsynthetic (0.8, 0.05, 2.0) -> ({:.9}, {:.9}, {:.9})",
        back.a, back.b, back.c
    );

    let column = PaperTable::embedded().bpes_column();
    let fit = recover_parameters(&column)?;
    let (offset, log_rmse) = pure_log_fit(&column);
    println!(
        "published BPES column -> a={:.6} b={:.6e} c={:.6e} rmse={:.4e} identifiable={} local_min={}",
        fit.a,
        fit.b,
        fit.c,
        fit.objective,
        fit.identifiable(),
        is_local_minimum(&column, fit.params(), 1e-3)?
    );
    println!("best pure-log model: offset={offset:.8} rmse={log_rmse:.4e}");
    Ok(())
}
