//! Exact 3j symbols as signed square roots of rationals, and their
//! floating-point values.
//!
//! `cargo run --example wigner_symbols`

use zonalsphere::wigner::{column_swap_sign, wigner3j, wigner3j_exact, ThreeJArgs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        (1, 1, 0, 0, 0, 0),
        (1, 1, 2, 0, 0, 0),
        (1, 1, 2, 1, -1, 0),
        (2, 1, 1, 0, 0, 0),
        (4, 2, 2, 0, 0, 0),
        (3, 4, 5, 2, -3, 1),
        (10, 12, 7, -4, 6, -2),
        (30, 30, 31, 5, -17, 12),
    ];
    println!("{:<28} {:>26} {:>22}", "(j1 j2 j3; m1 m2 m3)", "value", "exact square");
    for (j1, j2, j3, m1, m2, m3) in cases {
        let args = ThreeJArgs::new(j1, j2, j3, m1, m2, m3)?;
        let exact = wigner3j_exact(args);
        let sign = if exact.sign < 0 { "-" } else { "+" };
        println!(
            "{:<28} {:>26.17e} {:>22}",
            format!("({j1} {j2} {j3}; {m1} {m2} {m3})"),
            wigner3j(args),
            format!("{sign}sqrt({})", exact.square)
        );
    }
    let args = ThreeJArgs::new(3, 4, 5, 2, -3, 1)?;
    println!(
        "\nswapping two columns of (3 4 5; 2 -3 1) multiplies by {}: {:+.15} -> {:+.15}",
        column_swap_sign(3, 4, 5),
        wigner3j(args),
        wigner3j(args.swapped(0, 1))
    );
    Ok(())
}
