//! Spherical harmonics on the Gauss grid: point values, a transform round
//! trip and Parseval's identity for a random real field.
//!
//! `cargo run --release --example harmonics -- [K]`

use zonalsphere::solver::random_field;
use zonalsphere::spharm::{evaluate_harmonic, make_grid, SphericalTransform};
use zonalsphere::WaveVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k_max: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(15);

    println!("Y_k^m at theta = 1, phi = 0.5");
    for (k, m) in [(0, 0), (1, 0), (1, 1), (1, -1), (3, 2), (3, -2)] {
        let y = evaluate_harmonic(WaveVector::new(k, m)?, 1.0, 0.5);
        println!("  ({k},{m:>2})  {:+.12} {:+.12}i", y.re, y.im);
    }

    let grid = make_grid(k_max);
    println!("\nK = {k_max}: {} x {} Gauss grid, weights sum to {:.15}", grid.n_theta, grid.n_phi, grid.weights.iter().sum::<f64>());
    let t = SphericalTransform::new(k_max, grid);
    let f = random_field(k_max, 1.0, -1.0, 42);
    let g = t.synthesize(&f);
    let back = t.analyze(&g);
    println!("round trip max error  {:.2e}", (&back - &f).max_abs());
    println!("imaginary part on grid {:.2e}", g.max_imag());
    let grid_norm = g.mul(&g.conj()).integrate().re;
    println!("Parseval: grid {grid_norm:.15}  spectral {:.15}", f.norm_sq());
    Ok(())
}
