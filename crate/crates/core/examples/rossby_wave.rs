//! A single Rossby–Haurwitz mode is an exact solution: B(Y, Y) = 0 for a
//! pure spherical harmonic, so the coefficient only rotates at Omega/eps
//! and decays at mu k(k+1).
//!
//! `cargo run --release --example rossby_wave`

use zonalsphere::solver::{linear_rate, ForcingSpec, InitialConditionSpec, ModeAmplitude};
use zonalsphere::triads::frequency;
use zonalsphere::{Solver, SolverConfig, WaveVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mode = WaveVector::new(4, 3)?;
    let cfg = SolverConfig {
        epsilon: 0.1,
        t_end: 5.0,
        record_every: 100,
        forcing: ForcingSpec::steady(vec![]),
        ic: InitialConditionSpec::Modes {
            modes: vec![ModeAmplitude::new(4, 3, 0.8, 0.0)],
        },
        ..SolverConfig::headline(0.1)
    };
    let solver = Solver::new(cfg.clone())?;
    let w0 = solver.initial_state()?;
    let rec = solver.run()?;
    let exact = w0.get(mode) * (-linear_rate(mode, cfg.mu, cfg.epsilon) * rec.final_time).exp();
    let got = rec.final_state.get(mode);
    println!("mode {mode}: Omega = {:.6}, phase speed Omega/eps = {:.6}", frequency(mode), frequency(mode) / cfg.epsilon);
    println!("t = {}: computed {got:.12}, exact {exact:.12}", rec.final_time);
    println!("error {:.2e}", (got - exact).norm());
    let others = rec
        .final_state
        .modes()
        .filter(|(m, _)| *m != mode && *m != mode.mirror())
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    println!("largest coefficient elsewhere {others:.2e}");
    Ok(())
}
