//! Unforced decay from a random initial condition, with and without
//! rotation, against the Poincaré bound |w(t)|² <= |w(0)|² exp(-4 mu t).
//!
//! `cargo run --release --example spin_down -- [t_end]`

use zonalsphere::solver::ForcingSpec;
use zonalsphere::{Solver, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t_end: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(20.0);
    for eps in [f64::INFINITY, 0.05] {
        let cfg = SolverConfig {
            t_end,
            record_every: 200,
            forcing: ForcingSpec::steady(vec![]),
            ..SolverConfig::headline(eps)
        };
        let rec = Solver::new(cfg.clone())?.run()?;
        let e0 = rec.rows[0].energy;
        println!("epsilon = {eps}");
        println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "t", "|w|^2", "bound", "|w~|^2", "zonal %");
        for r in &rec.rows {
            println!(
                "{:>6.1} {:>12.5e} {:>12.5e} {:>12.5e} {:>10.2}",
                r.t,
                r.energy,
                e0 * (-4.0 * cfg.mu * r.t).exp(),
                r.nonzonal_energy,
                100.0 * r.zonal_energy / r.energy.max(f64::MIN_POSITIVE)
            );
        }
        println!();
    }
    Ok(())
}
