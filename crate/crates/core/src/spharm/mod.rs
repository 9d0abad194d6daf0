//! Spherical-harmonic basis, Gauss–Legendre grids and the transforms
//! between grid values and triangularly truncated spectral coefficients.

mod field;
pub mod legendre;
pub mod snapshot;
mod transform;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use field::SpectralField;
pub use legendre::{gauss_legendre, LegendreColumn};
pub use transform::{FieldKind, GridField, SphericalTransform};

/// Spherical-harmonic index `(k, k̂)` with `|k̂| <= k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(usize, isize)", into = "(usize, isize)")]
pub struct WaveVector {
    degree: usize,
    order: isize,
}

impl WaveVector {
    pub fn new(degree: usize, order: isize) -> Result<Self> {
        if order.unsigned_abs() > degree {
            return Err(Error::InvalidWaveVector {
                degree: degree as i64,
                order: order as i64,
            });
        }
        Ok(Self { degree, order })
    }

    #[inline]
    pub fn degree(self) -> usize {
        self.degree
    }

    #[inline]
    pub fn order(self) -> isize {
        self.order
    }

    /// `|k|² = k(k+1)`, minus the Laplacian eigenvalue.
    #[inline]
    pub fn eigenvalue(self) -> f64 {
        eigenvalue(self)
    }

    #[inline]
    pub fn is_zonal(self) -> bool {
        self.order == 0
    }

    /// Position in the dense `(K+1)²` triangle, `k² + k + k̂`.
    #[inline]
    pub fn index(self) -> usize {
        (self.degree * self.degree + self.degree).wrapping_add_signed(self.order)
    }

    pub fn from_index(index: usize) -> Self {
        let degree = (index as f64).sqrt() as usize;
        // guard against rounding in the square root
        let degree = if (degree + 1) * (degree + 1) <= index {
            degree + 1
        } else if degree * degree > index {
            degree - 1
        } else {
            degree
        };
        let order = index as isize - (degree * degree + degree) as isize;
        Self { degree, order }
    }

    /// `(k, -k̂)`.
    #[inline]
    pub fn mirror(self) -> Self {
        Self {
            degree: self.degree,
            order: -self.order,
        }
    }

    /// All wavevectors with degree `<= truncation`, in index order.
    pub fn all(truncation: usize) -> impl Iterator<Item = WaveVector> {
        (0..=truncation).flat_map(|k| {
            (-(k as isize)..=k as isize).map(move |m| WaveVector {
                degree: k,
                order: m,
            })
        })
    }
}

impl TryFrom<(usize, isize)> for WaveVector {
    type Error = Error;
    fn try_from((k, m): (usize, isize)) -> Result<Self> {
        Self::new(k, m)
    }
}

impl From<WaveVector> for (usize, isize) {
    fn from(wv: WaveVector) -> Self {
        (wv.degree, wv.order)
    }
}

impl std::fmt::Display for WaveVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.degree, self.order)
    }
}

/// `k(k+1)`.
#[inline]
pub fn eigenvalue(wv: WaveVector) -> f64 {
    let k = wv.degree as f64;
    k * (k + 1.0)
}

/// Gauss–Legendre colatitudes crossed with equispaced longitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    /// `cos θ` at each colatitude node, decreasing.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub sin_theta: Vec<f64>,
}

impl GridSpec {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        assert!(n_theta >= 1 && n_phi >= 1, "empty grid");
        let (nodes, weights) = gauss_legendre(n_theta);
        let sin_theta = nodes.iter().map(|x| (1.0 - x * x).max(0.0).sqrt()).collect();
        Self {
            n_theta,
            n_phi,
            nodes,
            weights,
            sin_theta,
        }
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.nodes[i].acos()
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_phi as f64
    }

    /// Area weight of grid point `(i, j)`; the weights sum to `4π`.
    pub fn area_weight(&self, i: usize) -> f64 {
        self.weights[i] * 2.0 * PI / self.n_phi as f64
    }

    /// Minimum sizes that keep triple products of degree-`K` fields free of
    /// aliasing (the 3/2 rule).
    pub fn dealiased_size(truncation: usize) -> (usize, usize) {
        ((3 * truncation + 2) / 2, 3 * truncation + 1)
    }

    pub fn supports(&self, truncation: usize) -> bool {
        let (nt, np) = Self::dealiased_size(truncation);
        self.n_theta >= nt && self.n_phi >= np
    }

    pub fn check_supports(&self, truncation: usize) -> Result<()> {
        if self.supports(truncation) {
            Ok(())
        } else {
            let (need_theta, need_phi) = Self::dealiased_size(truncation);
            Err(Error::GridTooCoarse {
                truncation,
                need_theta,
                need_phi,
            })
        }
    }

    /// Quadrature of `u` over the sphere.
    pub fn integrate(&self, u: &[Complex64]) -> Complex64 {
        assert_eq!(u.len(), self.n_theta * self.n_phi);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.n_theta {
            let row: Complex64 = u[i * self.n_phi..(i + 1) * self.n_phi].iter().sum();
            acc += row * self.area_weight(i);
        }
        acc
    }
}

/// Dealiased grid for truncation `K`: `n_theta = ceil((3K+1)/2)`, `n_phi = 3K+1`.
pub fn make_grid(truncation: usize) -> GridSpec {
    assert!(truncation >= 1, "truncation must be at least 1");
    let (nt, np) = GridSpec::dealiased_size(truncation);
    GridSpec::new(nt, np)
}

/// `Y_k(θ, φ)`, orthonormal with the Condon–Shortley phase.
pub fn evaluate_harmonic(wv: WaveVector, theta: f64, phi: f64) -> Complex64 {
    harmonic_jet(wv, theta, phi).value
}

/// A harmonic together with `∂_θ Y` and `(1/sinθ) ∂_φ Y`.
#[derive(Clone, Copy, Debug)]
pub struct HarmonicJet {
    pub value: Complex64,
    pub dtheta: Complex64,
    pub dphi_over_sin: Complex64,
}

pub fn harmonic_jet(wv: WaveVector, theta: f64, phi: f64) -> HarmonicJet {
    let col = LegendreColumn::new(wv.degree, theta.cos(), theta.sin());
    jet_from_column(&col, wv, phi)
}

pub(crate) fn jet_from_column(col: &LegendreColumn, wv: WaveVector, phi: f64) -> HarmonicJet {
    let l = wv.degree;
    let m = wv.order.unsigned_abs();
    let parity = if wv.order < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
    let phase = Complex64::from_polar(1.0, wv.order as f64 * phi);
    let value = parity * col.value(l, m);
    let dtheta = parity * col.dtheta(l, m);
    // m Λ/sinθ carries the sign of the order
    let weighted = parity * col.order_weighted(l, m) * (wv.order.signum() as f64);
    HarmonicJet {
        value: phase * value,
        dtheta: phase * dtheta,
        dphi_over_sin: phase * Complex64::new(0.0, weighted),
    }
}

/// `Σ_k f_k Y_k` on `grid`.
pub fn synthesize(f: &SpectralField, grid: &GridSpec) -> GridField {
    SphericalTransform::new(f.truncation(), grid.clone()).synthesize(f)
}

/// Quadrature projection of `u` onto all `Y_k` with `k <= truncation`.
pub fn analyze(u: &GridField, truncation: usize) -> SpectralField {
    SphericalTransform::with_shared_grid(truncation, u.grid().clone()).analyze(u)
}
