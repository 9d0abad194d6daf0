//! Coupling coefficients of the spherical Jacobian and of the nonlinear
//! vorticity term, resonance classification, and the identities relating
//! `B_jkl + B_kjl` to the Rossby frequencies.
//!
//! `J_jkl = (∂(Y_j, Y_k), Y_l)` and `B_jkl = (∂(Δ⁻¹Y_j, Y_k), Y_l) = -J_jkl/|j|²`,
//! with the inner product conjugate-linear in the second slot.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spharm::{jet_from_column, make_grid, GridSpec, HarmonicJet, LegendreColumn, WaveVector};
use crate::wigner::{threej_zero_row, triangle_ok, wigner3j, ThreeJArgs};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Rossby–Haurwitz frequency `Ω_k = -2k̂/|k|²`; zero for the constant mode.
pub fn frequency(wv: WaveVector) -> f64 {
    if wv.degree() == 0 {
        0.0
    } else {
        -2.0 * wv.order() as f64 / wv.eigenvalue()
    }
}

/// `Ω_k` as an exact fraction `(numerator, denominator)` with positive denominator.
fn frequency_fraction(wv: WaveVector) -> (i64, i64) {
    if wv.degree() == 0 {
        (0, 1)
    } else {
        let k = wv.degree() as i64;
        (-2 * wv.order() as i64, k * (k + 1))
    }
}

/// `S_jkl`; symmetric in `j, k`. Zero when `j + k < l`.
pub fn s_factor(j: usize, k: usize, l: usize) -> f64 {
    if j + k < l {
        return 0.0;
    }
    let (j, k, l) = (j as f64, k as f64, l as f64);
    let radicand = (2.0 * j + 1.0) * (2.0 * k + 1.0) * (2.0 * l + 1.0) * (j + k + l + 1.0) * (j + k - l);
    radicand.sqrt() / (4.0 * PI.sqrt())
}

/// `J_jkl` from the closed 3j formula. Exact zero whenever a selection rule
/// fails: order sum, parity of `j + k + l`, or either triangle.
pub fn jacobian_coeff(j: WaveVector, k: WaveVector, l: WaveVector) -> Complex64 {
    if j.order() + k.order() != l.order() {
        return ZERO;
    }
    let (jd, kd, ld) = (j.degree() as i64, k.degree() as i64, l.degree() as i64);
    if jd == 0 || kd == 0 || (jd + kd + ld) % 2 == 0 {
        return ZERO;
    }
    if !triangle_ok(ld, jd, kd - 1) || !triangle_ok(ld, kd, jd) {
        return ZERO;
    }
    let radicand = (ld + kd - jd) * (ld + 1 + jd - kd);
    if radicand <= 0 {
        return ZERO;
    }
    let zero_row = threej_zero_row(ld, jd, kd - 1);
    let orders = wigner3j(
        ThreeJArgs::new(ld, kd, jd, -l.order() as i64, k.order() as i64, j.order() as i64)
            .expect("orders bounded by degrees"),
    );
    if zero_row == 0.0 || orders == 0.0 {
        return ZERO;
    }
    let sign = if l.order() % 2 == 0 { 1.0 } else { -1.0 };
    let magnitude = (radicand as f64).sqrt() * zero_row * orders * s_factor(j.degree(), k.degree(), l.degree());
    I * (sign * magnitude)
}

/// `B_jkl = -J_jkl / |j|²`.
pub fn b_coeff(j: WaveVector, k: WaveVector, l: WaveVector) -> Result<Complex64> {
    if j.degree() == 0 {
        return Err(Error::ConstantModeInverse);
    }
    Ok(-jacobian_coeff(j, k, l) / j.eigenvalue())
}

/// `Ω_j + Ω_k = 0`, tested exactly on the integer fractions.
pub fn is_resonant(j: WaveVector, k: WaveVector) -> bool {
    let (a, b) = frequency_fraction(j);
    let (c, d) = frequency_fraction(k);
    a * d + c * b == 0
}

fn check_lemma_domain(j: WaveVector, k: WaveVector, l: WaveVector) -> Result<()> {
    if j.order() == 0 || k.order() == 0 || l.order() != 0 {
        Err(Error::LemmaDomain)
    } else {
        Ok(())
    }
}

/// The non-resonance identity in the form stated with Rossby frequencies:
/// `(B_jkl + B_kjl) - sign · (-1/(2ĵ)) J_jkl (Ω_j + Ω_k)`.
///
/// With the conventions used here the identity holds for `sign = -1`; see
/// [`calibrate_lemma_sign`].
pub fn lemma_residual(j: WaveVector, k: WaveVector, l: WaveVector, sign: f64) -> Result<Complex64> {
    check_lemma_domain(j, k, l)?;
    let lhs = b_coeff(j, k, l)? + b_coeff(k, j, l)?;
    Ok(lhs - sign * lemma_rhs(j, l, k))
}

/// `-(1/(2ĵ)) J_jkl (Ω_j + Ω_k)`.
fn lemma_rhs(j: WaveVector, l: WaveVector, k: WaveVector) -> Complex64 {
    let jac = jacobian_coeff(j, k, l);
    jac * (-(frequency(j) + frequency(k)) / (2.0 * j.order() as f64))
}

/// `(B_jkl + B_kjl) + J_jkl (1/|j|² - 1/|k|²)`, which vanishes identically
/// given `B = -J/|j|²` and `J_kjl = -J_jkl`.
pub fn lemma_convention_free_residual(j: WaveVector, k: WaveVector, l: WaveVector) -> Result<Complex64> {
    check_lemma_domain(j, k, l)?;
    let lhs = b_coeff(j, k, l)? + b_coeff(k, j, l)?;
    Ok(lhs + jacobian_coeff(j, k, l) * (1.0 / j.eigenvalue() - 1.0 / k.eigenvalue()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriadCoefficient {
    pub j: WaveVector,
    pub k: WaveVector,
    pub l: WaveVector,
    pub jacobian: Complex64,
    pub b: Complex64,
    pub resonant: bool,
}

/// All triads with nonzero `J_jkl` up to a truncation, lexicographic in
/// `(j, k, l)`. Immutable once built.
#[derive(Clone, Debug)]
pub struct TriadTable {
    truncation: usize,
    entries: Vec<TriadCoefficient>,
    lookup: HashMap<(WaveVector, WaveVector, WaveVector), usize>,
}

impl TriadTable {
    pub fn build(truncation: usize) -> Self {
        assert!(truncation >= 1, "truncation must be at least 1");
        let firsts: Vec<WaveVector> = WaveVector::all(truncation).filter(|w| w.degree() > 0).collect();
        let chunks: Vec<Vec<TriadCoefficient>> = firsts
            .par_iter()
            .map(|&j| {
                let mut out = Vec::new();
                for k in WaveVector::all(truncation).filter(|w| w.degree() > 0) {
                    let lo = j.order() + k.order();
                    let min_degree = lo.unsigned_abs().max(1);
                    for ld in min_degree..=truncation {
                        let l = WaveVector::new(ld, lo).unwrap();
                        let jac = jacobian_coeff(j, k, l);
                        if jac == ZERO {
                            continue;
                        }
                        out.push(TriadCoefficient {
                            j,
                            k,
                            l,
                            jacobian: jac,
                            b: -jac / j.eigenvalue(),
                            resonant: is_resonant(j, k),
                        });
                    }
                }
                out
            })
            .collect();
        Self::from_entries(truncation, chunks.into_iter().flatten().collect())
    }

    pub(crate) fn from_entries(truncation: usize, entries: Vec<TriadCoefficient>) -> Self {
        let lookup = entries.iter().enumerate().map(|(n, e)| ((e.j, e.k, e.l), n)).collect();
        Self {
            truncation,
            entries,
            lookup,
        }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn entries(&self) -> &[TriadCoefficient] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, j: WaveVector, k: WaveVector, l: WaveVector) -> Option<&TriadCoefficient> {
        self.lookup.get(&(j, k, l)).map(|&n| &self.entries[n])
    }

    /// `J_jkl`, zero when not stored.
    pub fn jacobian(&self, j: WaveVector, k: WaveVector, l: WaveVector) -> Complex64 {
        self.get(j, k, l).map_or(ZERO, |e| e.jacobian)
    }

    /// `B_jkl`, zero when not stored.
    pub fn b(&self, j: WaveVector, k: WaveVector, l: WaveVector) -> Complex64 {
        self.get(j, k, l).map_or(ZERO, |e| e.b)
    }

    /// Entries in the lemma's domain: `l̂ = 0`, `ĵ k̂ ≠ 0`.
    pub fn lemma_domain(&self) -> impl Iterator<Item = &TriadCoefficient> {
        self.entries
            .iter()
            .filter(|e| e.l.order() == 0 && e.j.order() != 0 && e.k.order() != 0)
    }

    pub fn summary(&self) -> TableSummary {
        TableSummary {
            truncation: self.truncation,
            total: self.entries.len(),
            resonant: self.entries.iter().filter(|e| e.resonant).count(),
            zonal_output: self.entries.iter().filter(|e| e.l.order() == 0).count(),
        }
    }

    /// Negates `J` and `B` on every entry with `ĵ > 0`. Fault injection
    /// for exercising the verification suite.
    pub fn with_corrupted_sign(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let mut e = *e;
                if e.j.order() > 0 {
                    e.jacobian = -e.jacobian;
                    e.b = -e.b;
                }
                e
            })
            .collect();
        Self::from_entries(self.truncation, entries)
    }

    pub const CSV_HEADER: &'static str = "j,jhat,k,khat,l,lhat,J_re,J_im,B_re,B_im,resonant";

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                e.j.degree(),
                e.j.order(),
                e.k.degree(),
                e.k.order(),
                e.l.degree(),
                e.l.order(),
                e.jacobian.re + 0.0,
                e.jacobian.im + 0.0,
                e.b.re + 0.0,
                e.b.im + 0.0,
                e.resonant
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSummary {
    pub truncation: usize,
    pub total: usize,
    pub resonant: usize,
    pub zonal_output: usize,
}

/// Jacobian coefficients by direct grid quadrature of
/// `∂(Y_j, Y_k) conj(Y_l)`, with `∂_θ Y` and `(1/sinθ)∂_φ Y` taken from the
/// analytic Legendre derivatives. Shares nothing with the 3j route.
pub struct QuadratureOracle {
    truncation: usize,
    grid: Arc<GridSpec>,
    jets: Vec<Vec<HarmonicJet>>,
}

impl QuadratureOracle {
    pub fn new(truncation: usize) -> Self {
        let grid = Arc::new(make_grid(truncation.max(1)));
        let columns: Vec<LegendreColumn> = (0..grid.n_theta)
            .map(|i| LegendreColumn::new(truncation, grid.nodes[i], grid.sin_theta[i]))
            .collect();
        let jets = WaveVector::all(truncation)
            .map(|wv| {
                let mut v = Vec::with_capacity(grid.n_theta * grid.n_phi);
                for col in &columns {
                    for jp in 0..grid.n_phi {
                        v.push(jet_from_column(col, wv, grid.phi(jp)));
                    }
                }
                v
            })
            .collect();
        Self { truncation, grid, jets }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Grid values of `∂(Y_j, Y_k)`, already multiplied by the area weights.
    pub fn weighted_jacobian(&self, j: WaveVector, k: WaveVector) -> Vec<Complex64> {
        let a = &self.jets[j.index()];
        let b = &self.jets[k.index()];
        let np = self.grid.n_phi;
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(p, (a, b))| {
                let w = self.grid.area_weight(p / np);
                (a.dtheta * b.dphi_over_sin - a.dphi_over_sin * b.dtheta) * w
            })
            .collect()
    }

    /// `Σ w · g · conj(Y_l)` for a weighted grid function `g`.
    pub fn project(&self, weighted: &[Complex64], l: WaveVector) -> Complex64 {
        weighted.iter().zip(&self.jets[l.index()]).map(|(g, y)| g * y.value.conj()).sum()
    }

    pub fn jacobian(&self, j: WaveVector, k: WaveVector, l: WaveVector) -> Complex64 {
        self.project(&self.weighted_jacobian(j, k), l)
    }

    /// `(∂(Δ⁻¹Y_j, Y_k), Y_l)`.
    pub fn b(&self, j: WaveVector, k: WaveVector, l: WaveVector) -> Result<Complex64> {
        if j.degree() == 0 {
            return Err(Error::ConstantModeInverse);
        }
        Ok(-self.jacobian(j, k, l) / j.eigenvalue())
    }
}

/// Global sign choices fixed against the quadrature oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignConvention {
    /// `J_quadrature = jacobian · J_formula`.
    pub jacobian: f64,
    /// Sign under which the frequency form of the non-resonance identity holds.
    pub lemma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub sign: f64,
    pub compared: usize,
    pub max_abs_error: f64,
}

/// Compares every order-admissible triad up to the oracle's truncation
/// against `formula`, after fixing the global sign from the data.
pub fn compare_with_oracle(
    oracle: &QuadratureOracle,
    formula: impl Fn(WaveVector, WaveVector, WaveVector) -> Complex64 + Sync,
) -> OracleComparison {
    let k_max = oracle.truncation();
    let wvs: Vec<WaveVector> = WaveVector::all(k_max).collect();
    let rows: Vec<(Complex64, Complex64)> = wvs
        .par_iter()
        .flat_map_iter(|&j| {
            let mut out = Vec::new();
            for &k in &wvs {
                let weighted = oracle.weighted_jacobian(j, k);
                let lo = j.order() + k.order();
                for ld in lo.unsigned_abs()..=k_max {
                    let l = WaveVector::new(ld, lo).unwrap();
                    out.push((oracle.project(&weighted, l), formula(j, k, l)));
                }
            }
            out
        })
        .collect();
    let dot: f64 = rows.iter().map(|(q, f)| (q * f.conj()).re).sum();
    let sign = if dot < 0.0 { -1.0 } else { 1.0 };
    let max_abs_error = rows.iter().map(|(q, f)| (q - f * sign).norm()).fold(0.0, f64::max);
    OracleComparison {
        sign,
        compared: rows.len(),
        max_abs_error,
    }
}

/// Sign under which `B_jkl + B_kjl = sign · (-1/(2ĵ)) J_jkl (Ω_j + Ω_k)`
/// best fits the table, with the worst residual at that sign.
pub fn calibrate_lemma_sign(table: &TriadTable) -> (f64, f64) {
    let mut dot = 0.0;
    let mut pairs = Vec::new();
    for e in table.lemma_domain() {
        let lhs = e.b + table.b(e.k, e.j, e.l);
        let rhs = e.jacobian * (-(frequency(e.j) + frequency(e.k)) / (2.0 * e.j.order() as f64));
        dot += (lhs * rhs.conj()).re;
        pairs.push((lhs, rhs));
    }
    let sign = if dot < 0.0 { -1.0 } else { 1.0 };
    let worst = pairs.iter().map(|(l, r)| (l - r * sign).norm()).fold(0.0, f64::max);
    (sign, worst)
}
