//! Sweeps the rotation parameter at the default forcing and fits the
//! scaling of the late-time non-zonal energy against ε.
//!
//! `cargo run --release --example zonalization_scan -- [t_end] [eps,eps,...]`
//!
//! The last column is the energy the forced `(3,±2)` pair would hold with
//! the nonlinear term switched off, `2/((12μ)² + (Ω/ε)²)` with `Ω = -1/3`.

use std::time::Instant;

use rayon::prelude::*;
use zonalsphere::diagnostics::{fit_epsilon_slope, tail_statistics, ScanEntry, ScanResult, TailWindow};
use zonalsphere::solver::parse_epsilon;
use zonalsphere::{Solver, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let t_end: f64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(200.0);
    let epsilons: Vec<f64> = match args.get(1) {
        Some(list) => list.split(',').map(parse_epsilon).collect::<Result<_, _>>()?,
        None => vec![1.0, 0.25, 1.0 / 16.0, 1.0 / 64.0, f64::INFINITY],
    };
    let clock = Instant::now();
    let mut entries: Vec<ScanEntry> = epsilons
        .par_iter()
        .map(|&eps| {
            let mut cfg = SolverConfig::headline(eps);
            cfg.t_end = t_end;
            let rec = Solver::new(cfg.clone()).and_then(|s| s.run().map_err(|f| f.error)).expect("run failed");
            let window = TailWindow::new(cfg.mu, cfg.t_start, cfg.t_end).expect("window");
            let (sup, avg) = tail_statistics(&rec.rows, cfg.mu, &window).expect("tail");
            ScanEntry {
                epsilon: eps,
                sup_tail_nonzonal: sup,
                avg_mu_grad_nonzonal: avg,
                included: eps.is_finite(),
            }
        })
        .collect();
    entries.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    let scan = ScanResult {
        mu: 0.1,
        window: TailWindow::new(0.1, 0.0, t_end)?,
        entries,
    };
    println!("{:>12} {:>14} {:>16} {:>14}", "epsilon", "sup |w~|^2", "<mu|grad w~|^2>", "linear");
    for e in &scan.entries {
        let rot = if e.epsilon.is_finite() { 1.0 / (3.0 * e.epsilon) } else { 0.0 };
        let linear = 2.0 / ((12.0 * scan.mu).powi(2) + rot * rot);
        println!(
            "{:>12.6} {:>14.6e} {:>16.6e} {:>14.6e}",
            e.epsilon, e.sup_tail_nonzonal, e.avg_mu_grad_nonzonal, linear
        );
    }
    let fit = fit_epsilon_slope(&scan)?;
    println!("slope {:.4}  r^2 {:.4}  ({:.1}s)", fit.slope, fit.r_squared, clock.elapsed().as_secs_f64());
    Ok(())
}
