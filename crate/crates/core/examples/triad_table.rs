//! Builds the triad coupling table, compares it against grid quadrature
//! and checks the non-resonance identity on the zonal-output triads.
//!
//! `cargo run --release --example triad_table -- [K]`

use std::time::Instant;

use zonalsphere::triads::{calibrate_lemma_sign, compare_with_oracle, QuadratureOracle};
use zonalsphere::TriadTable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k_max: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(8);
    let clock = Instant::now();
    let table = TriadTable::build(k_max);
    let s = table.summary();
    println!(
        "K = {k_max}: {} triads, {} resonant, {} with zonal output ({:.2}s)",
        s.total,
        s.resonant,
        s.zonal_output,
        clock.elapsed().as_secs_f64()
    );

    println!("\nfirst entries with zonal output:");
    for e in table.lemma_domain().take(6) {
        println!(
            "  j={}  k={}  l={}  J={:+.10}i  B={:+.10}i  resonant={}",
            e.j, e.k, e.l, e.jacobian.im, e.b.im, e.resonant
        );
    }

    let clock = Instant::now();
    let cmp = compare_with_oracle(&QuadratureOracle::new(k_max), |j, k, l| table.jacobian(j, k, l));
    println!(
        "\nquadrature: {} triads, sign {:+}, max error {:.2e} ({:.2}s)",
        cmp.compared,
        cmp.sign,
        cmp.max_abs_error,
        clock.elapsed().as_secs_f64()
    );
    let (sign, worst) = calibrate_lemma_sign(&table);
    println!("non-resonance identity: sign {sign:+}, worst residual {worst:.2e}");

    let corrupted = table.with_corrupted_sign();
    let bad = compare_with_oracle(&QuadratureOracle::new(k_max), |j, k, l| corrupted.jacobian(j, k, l));
    println!("with one sign flipped: max error {:.2e}", bad.max_abs_error);
    Ok(())
}
