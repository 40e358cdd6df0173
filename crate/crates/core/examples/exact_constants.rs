//! Exact Landau constants as rationals and rounded decimals.
//!
//!     cargo run --example exact_constants -- 12

use landau::exact_landau::{landau_sequence, landau_term};

fn main() -> landau::Result<()> {
    let n_max: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("n_max must be a non-negative integer"))
        .unwrap_or(10);

    let seq = landau_sequence(n_max)?;
    println!("{:>4}  {:<32}  term", "n", "G_n (30 decimals)");
    for (n, g) in seq.values().iter().enumerate() {
        println!(
            "{n:>4}  {:<32}  {}",
            g.to_decimal(30),
            landau_term(n as u64)
        );
    }
    let last = &seq.values()[n_max as usize];
    println!("\nG_{n_max} = {last}");
    Ok(())
}
