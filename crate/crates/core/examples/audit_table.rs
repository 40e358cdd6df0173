//! Audit of the published comparison table: which column relationships
//! hold, and by how much. Pass a CSV path to audit another copy.

use landau::analysis::{audit_paper_table, PaperTable};

fn main() -> landau::Result<()> {
    let table = match std::env::args().nth(1) {
        Some(path) => PaperTable::from_path(path)?,
        None => PaperTable::embedded(),
    };
    let report = audit_paper_table(&table)?;
    for c in &report.checks {
        println!(
            "{:<6} {:<40} {:>12.4e} {:<2} {:<10.3e}{}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.deviation,
            c.relation.symbol(),
            c.threshold,
            if c.informational { " (info)" } else { "" }
        );
    }
    println!("verdict: {}", if report.passed() { "pass" } else { "fail" });
    Ok(())
}
