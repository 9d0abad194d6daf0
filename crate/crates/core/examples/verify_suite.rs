//! Runs the full property suite used by `zonalsphere verify`, once with the
//! calibrated conventions and once with a deliberately flipped sign.
//!
//! `cargo run --release --example verify_suite -- [K]`

use zonalsphere::verify::{run_suite, VerifyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k_max: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(8);
    let report = run_suite(&VerifyOptions::new(k_max))?;
    print!("{report}");
    println!("all passed: {}\n", report.passed());

    let mut opts = VerifyOptions::new(k_max);
    opts.corrupt_sign = true;
    let broken = run_suite(&opts)?;
    for c in broken.failures() {
        println!("with flipped sign, fails: {}", c.name);
    }
    Ok(())
}
