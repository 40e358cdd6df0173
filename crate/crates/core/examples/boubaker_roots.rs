//! Boubaker polynomials B_4k: coefficients, minimal positive roots, the
//! value and slope identities at zero, and the slope at each root.

use landau::boubaker::{
    boubaker_poly, derivative_at_root, derivative_sum_at_zero, minimal_positive_root,
    zero_sum_property,
};

fn main() -> landau::Result<()> {
    println!("B_8 coefficients (constant first): {}", boubaker_poly(8)?);

    println!(
        "\n{:>5} {:>20} {:>10} {:>14}",
        "order", "root", "residual", "B'(root)"
    );
    for k in 1..=8 {
        let rec = minimal_positive_root(4 * k, 1e-14)?;
        let slope = derivative_at_root(k, 1e-14)?;
        println!(
            "{:>5} {:>20} {:>10.2e} {:>14.8}",
            4 * k,
            rec.root.to_decimal(16),
            rec.residual,
            slope.to_f64()
        );
    }

    println!("\n{:>3} {:>12} {:>14}", "N", "sum B_4k(0)", "sum B'_4k(0)");
    for n in [1, 2, 5, 10, 50] {
        println!(
            "{n:>3} {:>12} {:>14}",
            zero_sum_property(n)?,
            derivative_sum_at_zero(n)?
        );
    }
    Ok(())
}
