//! The algebraic identities behind the energy estimates, evaluated on
//! random real fields: the abc identity, (B(w,w),w) = 0, (Lw,w) = 0,
//! B(zonal, zonal) = 0, and the two routes to the nonlinear term.
//!
//! `cargo run --release --example operator_identities -- [K]`

use std::sync::Arc;

use zonalsphere::diagnostics::sobolev_norm_sq;
use zonalsphere::operators::{coriolis_l, nonzonal_project, zonal_project, NonlinearPath, OperatorContext, PairingPath};
use zonalsphere::solver::random_field;
use zonalsphere::TriadTable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k_max: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(8);
    let ctx = OperatorContext::new(k_max).with_triads(Arc::new(TriadTable::build(k_max)))?;
    let (a, b, c) = (
        random_field(k_max, 1.0, -1.0, 1),
        random_field(k_max, 1.0, -1.0, 2),
        random_field(k_max, 1.0, -1.0, 3),
    );

    let p = [
        ctx.jacobian_pairing(&a, &b, &c)?,
        ctx.jacobian_pairing(&b, &c, &a)?,
        ctx.jacobian_pairing(&c, &a, &b)?,
    ];
    println!("(d(a,b),c) (d(b,c),a) (d(c,a),b):");
    for x in p {
        println!("  {:+.15e}", x.re);
    }

    let grad = sobolev_norm_sq(&a, 1.0);
    let bw = ctx.nonlinear_b(&a, NonlinearPath::Pseudospectral)?;
    println!("(B(w,w),w) / |grad w|^2   {:.2e}", bw.inner(&a).norm() / grad);
    println!("(Lw,w) / |grad w|^2       {:.2e}", coriolis_l(&a).inner(&a).norm() / grad);
    let wbar = zonal_project(&b);
    println!("max |B(wbar,wbar)|        {:.2e}", ctx.nonlinear_b(&wbar, NonlinearPath::Pseudospectral)?.max_abs());

    let bt = ctx.nonlinear_b(&a, NonlinearPath::TriadOracle)?;
    println!("|B_grid - B_triads| / |B| {:.2e}", (&bw - &bt).norm_sq().sqrt() / bw.norm_sq().sqrt());

    let wt = nonzonal_project(&c);
    let sum = ctx.b_omega_pairing(&wt, &wbar, PairingPath::SpectralSum, -1.0)?;
    let jac = ctx.b_omega_pairing(&wt, &wbar, PairingPath::JacobianForm, -1.0)?;
    let shell = ctx.resonant_shell_pairing(&wt, &wbar)?;
    println!("(B_Omega(w~,w~), wbar): triad sum {:+.12e}, Jacobian form {:+.12e}", sum.re, jac.re);
    println!("  same-degree part removed from the Jacobian form: {:+.6e}", shell.re);
    Ok(())
}
