//! Plot data: exact G_n against every approximation, written as CSV to
//! stdout, followed by the estimated convergence order on stderr.
//!
//!     cargo run --example error_table > errors.csv

use std::io::Write;

use landau::analysis::{convergence_order, emit, error_table, FloatStyle, OutputFormat};
use landau::approximations::ApproxSpec;
use landau::bpes_fit::{fit_direct, FALALEEV_SEED};

fn main() -> landau::Result<()> {
    let [a, b, c] = fit_direct(0, 200, FALALEEV_SEED)?.params();
    let specs = [
        ApproxSpec::Falaleev,
        ApproxSpec::brutman_default(),
        ApproxSpec::fitted(a, b, c)?,
    ];
    let report = error_table(200, &specs)?;
    std::io::stdout().write_all(&emit(&report, OutputFormat::Csv, FloatStyle::Machine))?;

    let ns = [10u64, 20, 40, 80, 160];
    for (i, spec) in specs.iter().enumerate() {
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| report.rows[n as usize].entries[i].abs_error)
            .collect();
        match convergence_order(&ns, &errs) {
            Ok(p) => eprintln!("{spec}: error ~ (n+3/4)^-{p:.4}"),
            Err(e) => eprintln!("{spec}: {e}"),
        }
    }
    Ok(())
}
