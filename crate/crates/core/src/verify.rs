//! Property suite behind the `verify` command: transform round trips, the
//! closed-form coefficients against quadrature, the non-resonance identity,
//! operator identities and the two dual-route evaluations.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::sobolev_norm_sq;
use crate::error::Result;
use crate::operators::{
    coriolis_l, nonzonal_project, stokes, zonal_project, NonlinearPath, OperatorContext, PairingPath,
};
use crate::spharm::{SpectralField, WaveVector};
use crate::triads::{calibrate_lemma_sign, compare_with_oracle, QuadratureOracle, SignConvention, TriadTable};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &str, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            max_residual,
            tolerance,
            passed: max_residual.is_finite() && max_residual <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub truncation: usize,
    pub sign_convention: SignConvention,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "K = {}  sign convention: jacobian {:+}, lemma {:+}",
            self.truncation, self.sign_convention.jacobian, self.sign_convention.lemma
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<4} {:<32} max residual {:.3e}  (tolerance {:.0e})",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.max_residual,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

pub struct VerifyOptions {
    pub truncation: usize,
    /// Flip the sign of `J` and `B` for `ĵ > 0` before checking.
    pub corrupt_sign: bool,
    pub random_fields: usize,
    pub seed: u64,
}

impl VerifyOptions {
    pub fn new(truncation: usize) -> Self {
        Self {
            truncation,
            corrupt_sign: false,
            random_fields: 5,
            seed: 2024,
        }
    }
}

fn random_real(truncation: usize, rng: &mut ChaCha8Rng) -> SpectralField {
    let mut f = SpectralField::zeros(truncation, true);
    for k in 1..=truncation {
        for m in 0..=k as isize {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            f.set_symmetric(WaveVector::new(k, m).unwrap(), c);
        }
    }
    f
}

fn rel(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / scale.max(f64::MIN_POSITIVE)
}

pub fn run_suite(opts: &VerifyOptions) -> Result<VerifyReport> {
    let k_max = opts.truncation;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();

    let clean = TriadTable::build(k_max);
    let table = Arc::new(if opts.corrupt_sign { clean.with_corrupted_sign() } else { clean });
    let ctx = OperatorContext::new(k_max).with_triads(table.clone())?;
    let transform = ctx.transform();

    // transforms
    let mut round = 0.0f64;
    let mut parseval = 0.0f64;
    for _ in 0..opts.random_fields {
        let f = random_real(k_max, &mut rng);
        let g = transform.synthesize(&f);
        round = round.max((&transform.analyze(&g) - &f).max_abs());
        let grid_norm = g.mul(&g.conj()).integrate().re;
        parseval = parseval.max((grid_norm - f.norm_sq()).abs() / f.norm_sq());
    }
    checks.push(CheckResult::new("transform round trip", round, 1e-12));
    checks.push(CheckResult::new("Parseval", parseval, 1e-12));

    let mut ortho = 0.0f64;
    let all: Vec<WaveVector> = WaveVector::all(k_max).collect();
    let grids: Vec<_> = all
        .iter()
        .map(|&wv| transform.synthesize(&SpectralField::unit(k_max, wv)))
        .collect();
    for (a, ga) in all.iter().zip(&grids) {
        for (b, gb) in all.iter().zip(&grids) {
            if a.order() != b.order() {
                continue;
            }
            let ip = ga.mul(&gb.conj()).integrate();
            let expect = if a == b { 1.0 } else { 0.0 };
            ortho = ortho.max((ip - expect).norm());
        }
    }
    checks.push(CheckResult::new("orthonormality", ortho, 1e-12));

    // closed-form coefficients against quadrature
    let oracle = QuadratureOracle::new(k_max);
    let cmp = compare_with_oracle(&oracle, |j, k, l| table.jacobian(j, k, l));
    let sign_residual = if cmp.sign > 0.0 { cmp.max_abs_error } else { f64::INFINITY };
    checks.push(CheckResult::new("J formula vs quadrature", sign_residual, 1e-10));

    let mut anti = 0.0f64;
    for e in table.entries() {
        anti = anti.max((table.jacobian(e.k, e.j, e.l) + e.jacobian).norm());
    }
    checks.push(CheckResult::new("J antisymmetry", anti, 1e-12));

    // non-resonance identity
    let mut free = 0.0f64;
    let mut resonant = 0.0f64;
    for e in table.lemma_domain() {
        let sum = e.b + table.b(e.k, e.j, e.l);
        let expect = -e.jacobian * (1.0 / e.j.eigenvalue() - 1.0 / e.k.eigenvalue());
        free = free.max((sum - expect).norm());
        if e.resonant {
            resonant = resonant.max(sum.norm());
        }
    }
    let (lemma_sign, lemma_residual) = calibrate_lemma_sign(&table);
    checks.push(CheckResult::new("lemma, convention-free form", free, 1e-12));
    checks.push(CheckResult::new("lemma, calibrated sign", lemma_residual, 1e-12));
    checks.push(CheckResult::new("resonant cancellation", resonant, 1e-14));

    // operator identities
    let mut abc = 0.0f64;
    let mut energy = 0.0f64;
    let mut coriolis = 0.0f64;
    let mut zonal_b = 0.0f64;
    let mut dual = 0.0f64;
    let mut pairing = 0.0f64;
    for _ in 0..opts.random_fields {
        let a = random_real(k_max, &mut rng);
        let b = random_real(k_max, &mut rng);
        let c = random_real(k_max, &mut rng);
        let p1 = ctx.jacobian_pairing(&a, &b, &c)?;
        let p2 = ctx.jacobian_pairing(&b, &c, &a)?;
        let p3 = ctx.jacobian_pairing(&c, &a, &b)?;
        let scale = p1.norm().max(p2.norm()).max(p3.norm());
        abc = abc.max(rel(p1, p2, scale)).max(rel(p1, p3, scale));

        let w = a;
        let grad_scale = sobolev_norm_sq(&w, 1.0);
        let bw = ctx.nonlinear_b(&w, NonlinearPath::Pseudospectral)?;
        energy = energy.max(bw.inner(&w).norm() / grad_scale);
        coriolis = coriolis.max(coriolis_l(&w).inner(&w).norm() / sobolev_norm_sq(&w, 1.0));

        let wbar = zonal_project(&b);
        zonal_b = zonal_b.max(ctx.nonlinear_b(&wbar, NonlinearPath::Pseudospectral)?.max_abs());

        let bt = ctx.nonlinear_b(&w, NonlinearPath::TriadOracle)?;
        dual = dual.max((&bw - &bt).norm_sq().sqrt() / bw.norm_sq().sqrt());

        let wt = nonzonal_project(&c);
        let s = ctx.b_omega_pairing(&wt, &wbar, PairingPath::SpectralSum, lemma_sign)?;
        let j = ctx.b_omega_pairing(&wt, &wbar, PairingPath::JacobianForm, lemma_sign)?;
        pairing = pairing.max(rel(s, j, s.norm().max(j.norm())));
    }
    checks.push(CheckResult::new("abc identity", abc, 1e-11));
    checks.push(CheckResult::new("(B(w,w),w) = 0", energy, 1e-11));
    checks.push(CheckResult::new("(Lw,w) = 0", coriolis, 1e-11));
    checks.push(CheckResult::new("B(zonal,zonal) = 0", zonal_b, 1e-13));
    checks.push(CheckResult::new("B pseudospectral vs triad sum", dual, 1e-9));
    checks.push(CheckResult::new("B_Omega sum vs Jacobian form", pairing, 1e-9));

    let l_commute = WaveVector::all(k_max)
        .map(|wv| {
            let y = SpectralField::unit(k_max, wv);
            (&stokes(&coriolis_l(&y)) - &coriolis_l(&stokes(&y))).max_abs()
        })
        .fold(0.0, f64::max);
    checks.push(CheckResult::new("AL = LA", l_commute, 0.0));

    Ok(VerifyReport {
        truncation: k_max,
        sign_convention: SignConvention {
            jacobian: cmp.sign,
            lemma: lemma_sign,
        },
        checks,
    })
}
