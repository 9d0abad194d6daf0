//! Spectral operators of the vorticity equation: `Δ`, `Δ⁻¹`, the Coriolis
//! operator `L`, `∂_φ` and its inverse, the zonal projector, the Jacobian and
//! the nonlinear term `B(ω, ω) = ∂(Δ⁻¹ω, ω)`.
//!
//! Diagonal operators are free functions. The Jacobian needs a grid and
//! lives on [`OperatorContext`], which can also carry a [`TriadTable`] for
//! the slow coefficient-sum route.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spharm::{make_grid, FieldKind, GridField, GridSpec, SpectralField, SphericalTransform, WaveVector};
use crate::triads::{frequency, TriadTable};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Tolerance on "zero mean" and "purely (non-)zonal" preconditions.
pub const PRECONDITION_TOL: f64 = 1e-13;

/// Applies a diagonal symbol. The symbols used here all satisfy
/// `s(k, -m) = conj(s(k, m))`, so real fields stay real.
fn diagonal(f: &SpectralField, symbol: impl FnMut(WaveVector) -> Complex64) -> SpectralField {
    let mut out = f.map_diagonal(symbol);
    out.set_real_flag(f.is_real_field());
    out
}

/// `Δω`: multiplies by `-k(k+1)`.
pub fn laplacian(w: &SpectralField) -> SpectralField {
    diagonal(w, |k| Complex64::new(-k.eigenvalue(), 0.0))
}

/// `Δ⁻¹ω` with zero integral.
pub fn inv_laplacian(w: &SpectralField) -> Result<SpectralField> {
    if w.mean_coeff().norm() > PRECONDITION_TOL {
        return Err(Error::NonZeroMean);
    }
    Ok(diagonal(w, |k| {
        if k.degree() == 0 {
            ZERO
        } else {
            Complex64::new(-1.0 / k.eigenvalue(), 0.0)
        }
    }))
}

/// `Aω = -Δω`.
pub fn stokes(w: &SpectralField) -> SpectralField {
    diagonal(w, |k| Complex64::new(k.eigenvalue(), 0.0))
}

/// `Lω = 2∂_φΔ⁻¹ω`, i.e. multiplication by `iΩ_k`.
pub fn coriolis_l(w: &SpectralField) -> SpectralField {
    diagonal(w, |k| Complex64::new(0.0, frequency(k)))
}

/// `∂_φ ω`: multiplication by `i k̂`.
pub fn dphi(w: &SpectralField) -> SpectralField {
    diagonal(w, |k| Complex64::new(0.0, k.order() as f64))
}

/// `∂_φ⁻¹ ω̃` on a purely non-zonal field.
pub fn inv_dphi(w: &SpectralField) -> Result<SpectralField> {
    if zonal_project(w).max_abs() > PRECONDITION_TOL {
        return Err(Error::ZonalInverseDphi);
    }
    Ok(diagonal(w, |k| {
        if k.is_zonal() {
            ZERO
        } else {
            Complex64::new(0.0, -1.0 / k.order() as f64)
        }
    }))
}

/// `P̄ω`: keeps the `k̂ = 0` coefficients.
pub fn zonal_project(w: &SpectralField) -> SpectralField {
    diagonal(w, |k| if k.is_zonal() { Complex64::new(1.0, 0.0) } else { ZERO })
}

/// `ω - P̄ω`.
pub fn nonzonal_project(w: &SpectralField) -> SpectralField {
    diagonal(w, |k| if k.is_zonal() { ZERO } else { Complex64::new(1.0, 0.0) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonlinearPath {
    Pseudospectral,
    TriadOracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingPath {
    SpectralSum,
    JacobianForm,
}

/// Grid, transform tables and an optional triad table for one truncation.
#[derive(Clone, Debug)]
pub struct OperatorContext {
    truncation: usize,
    transform: SphericalTransform,
    triads: Option<Arc<TriadTable>>,
}

impl OperatorContext {
    pub fn new(truncation: usize) -> Self {
        Self {
            truncation,
            transform: SphericalTransform::new(truncation, make_grid(truncation)),
            triads: None,
        }
    }

    /// Context on a caller-supplied grid, which must resolve quadratic
    /// products at this truncation.
    pub fn with_grid(truncation: usize, grid: GridSpec) -> Result<Self> {
        grid.check_supports(truncation)?;
        Ok(Self {
            truncation,
            transform: SphericalTransform::new(truncation, grid),
            triads: None,
        })
    }

    pub fn with_triads(mut self, table: Arc<TriadTable>) -> Result<Self> {
        if table.truncation() < self.truncation {
            return Err(Error::TruncationMismatch {
                left: self.truncation,
                right: table.truncation(),
            });
        }
        self.triads = Some(table);
        Ok(self)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn transform(&self) -> &SphericalTransform {
        &self.transform
    }

    pub fn triads(&self) -> Option<&Arc<TriadTable>> {
        self.triads.as_ref()
    }

    fn table(&self) -> Result<&TriadTable> {
        self.triads.as_deref().ok_or(Error::MissingTriadTable)
    }

    fn check(&self, f: &SpectralField) -> Result<()> {
        if f.truncation() == self.truncation {
            Ok(())
        } else {
            Err(Error::TruncationMismatch {
                left: self.truncation,
                right: f.truncation(),
            })
        }
    }

    /// Pointwise `∂(f, g)` on the grid.
    pub fn jacobian_on_grid(&self, f: &SpectralField, g: &SpectralField) -> GridField {
        let t = &self.transform;
        let grid = t.grid().clone();
        if f.is_real_field() && g.is_real_field() {
            let ft = t.synthesize_real(f, FieldKind::DTheta);
            let fp = t.synthesize_real(f, FieldKind::DPhiOverSin);
            let gt = t.synthesize_real(g, FieldKind::DTheta);
            let gp = t.synthesize_real(g, FieldKind::DPhiOverSin);
            let values: Vec<f64> = (0..ft.len()).map(|n| ft[n] * gp[n] - fp[n] * gt[n]).collect();
            return GridField::from_real(grid, &values);
        }
        let ft = t.synthesize_kind(f, FieldKind::DTheta);
        let fp = t.synthesize_kind(f, FieldKind::DPhiOverSin);
        let gt = t.synthesize_kind(g, FieldKind::DTheta);
        let gp = t.synthesize_kind(g, FieldKind::DPhiOverSin);
        let values = (0..ft.values().len())
            .map(|n| ft.values()[n] * gp.values()[n] - fp.values()[n] * gt.values()[n])
            .collect();
        GridField::new(grid, values)
    }

    /// `∂(f, g)` projected back onto degrees `≤ K`.
    pub fn jacobian_grid(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.transform.analyze(&self.jacobian_on_grid(f, g)))
    }

    /// `(∂(f, g), h)` by grid quadrature, without truncating the Jacobian.
    pub fn jacobian_pairing(&self, f: &SpectralField, g: &SpectralField, h: &SpectralField) -> Result<Complex64> {
        self.check(f)?;
        self.check(g)?;
        self.check(h)?;
        let jac = self.jacobian_on_grid(f, g);
        let hv = self.transform.synthesize(h);
        Ok(jac.mul(&hv.conj()).integrate())
    }

    /// `B(ω, ω) = ∂(Δ⁻¹ω, ω)`. The mean of the result is set to exactly zero.
    pub fn nonlinear_b(&self, w: &SpectralField, path: NonlinearPath) -> Result<SpectralField> {
        self.nonlinear_b_pair(w, w, path)
    }

    /// `B(a, b) = ∂(Δ⁻¹a, b)`.
    pub fn nonlinear_b_pair(&self, a: &SpectralField, b: &SpectralField, path: NonlinearPath) -> Result<SpectralField> {
        self.check(a)?;
        self.check(b)?;
        let psi = inv_laplacian(a)?;
        let mut out = match path {
            NonlinearPath::Pseudospectral => self.jacobian_grid(&psi, b)?,
            NonlinearPath::TriadOracle => self.triad_sum(a, b)?,
        };
        out.coeffs_mut()[0] = ZERO;
        Ok(out)
    }

    fn triad_sum(&self, a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
        let table = self.table()?;
        let k_max = self.truncation;
        let mut out = SpectralField::zeros(k_max, false);
        for e in table.entries() {
            if e.j.degree() > k_max || e.k.degree() > k_max || e.l.degree() > k_max {
                continue;
            }
            let c = out.coeffs()[e.l.index()] + e.b * a.get(e.j) * b.get(e.k);
            out.coeffs_mut()[e.l.index()] = c;
        }
        if a.is_real_field() && b.is_real_field() {
            out.set_real_flag(true);
        }
        Ok(out)
    }

    /// `(B_Ω(ω̃, ω̃), ω̄)`.
    ///
    /// `SpectralSum` evaluates the defining sum over non-resonant triads with
    /// `(B̄_jkl + B̄_kjl)/(Ω_j + Ω_k)`. `JacobianForm` evaluates
    /// `lemma_sign · ¼ (∂(∂_φ⁻¹ω̃, ω̃), ω̄)` by quadrature with the resonant
    /// same-degree interactions `Σ_n (∂(∂_φ⁻¹ω̃_n, ω̃_n), ω̄)` removed, where
    /// `ω̃_n` is the degree-`n` part of `ω̃`. Those interactions carry nonzero
    /// `J` but are absent from the defining sum.
    pub fn b_omega_pairing(
        &self,
        w_tilde: &SpectralField,
        w_bar: &SpectralField,
        path: PairingPath,
        lemma_sign: f64,
    ) -> Result<Complex64> {
        self.check(w_tilde)?;
        self.check(w_bar)?;
        if zonal_project(w_tilde).max_abs() > PRECONDITION_TOL || nonzonal_project(w_bar).max_abs() > PRECONDITION_TOL
        {
            return Err(Error::PairingDomain);
        }
        match path {
            PairingPath::SpectralSum => self.b_omega_sum(w_tilde, w_bar),
            PairingPath::JacobianForm => {
                let full = self.jacobian_pairing(&inv_dphi(w_tilde)?, w_tilde, w_bar)?;
                let resonant = self.resonant_shell_pairing(w_tilde, w_bar)?;
                Ok((full - resonant) * (0.25 * lemma_sign))
            }
        }
    }

    /// `Σ_n (∂(∂_φ⁻¹ω̃_n, ω̃_n), ω̄)`: the same-degree part of the Jacobian
    /// form, which the non-resonant sum leaves out.
    pub fn resonant_shell_pairing(&self, w_tilde: &SpectralField, w_bar: &SpectralField) -> Result<Complex64> {
        let mut total = ZERO;
        for n in 1..=self.truncation {
            let shell = w_tilde.degree_shell(n);
            if shell.max_abs() == 0.0 {
                continue;
            }
            total += self.jacobian_pairing(&inv_dphi(&shell)?, &shell, w_bar)?;
        }
        Ok(total)
    }

    fn b_omega_sum(&self, w_tilde: &SpectralField, w_bar: &SpectralField) -> Result<Complex64> {
        let table = self.table()?;
        let k_max = self.truncation;
        let half_i = Complex64::new(0.0, 0.5);
        let mut total = ZERO;
        for e in table.lemma_domain() {
            if e.resonant || e.j.degree() > k_max || e.k.degree() > k_max || e.l.degree() > k_max {
                continue;
            }
            let sym = e.b + table.b(e.k, e.j, e.l);
            let denom = frequency(e.j) + frequency(e.k);
            total += half_i * sym / denom * w_tilde.get(e.j) * w_tilde.get(e.k) * w_bar.get(e.l).conj();
        }
        Ok(total)
    }
}
