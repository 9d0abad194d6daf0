use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::legendre::LegendreColumn;
use super::{GridSpec, SpectralField, WaveVector};

/// Which function of the coefficients to put on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Value,
    /// `∂_θ u`
    DTheta,
    /// `(1/sinθ) ∂_φ u`, built from the order-weighted Legendre functions.
    DPhiOverSin,
}

/// Grid values, row-major `n_theta × n_phi`.
#[derive(Clone, Debug)]
pub struct GridField {
    values: Vec<Complex64>,
    grid: Arc<GridSpec>,
}

impl GridField {
    pub fn new(grid: Arc<GridSpec>, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.n_theta * grid.n_phi, "grid shape mismatch");
        Self { values, grid }
    }

    pub fn from_real(grid: Arc<GridSpec>, values: &[f64]) -> Self {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f(θ, φ)` at every grid point.
    pub fn from_fn(grid: Arc<GridSpec>, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.n_theta * grid.n_phi);
        for i in 0..grid.n_theta {
            let theta = grid.theta(i);
            for j in 0..grid.n_phi {
                values.push(f(theta, grid.phi(j)));
            }
        }
        Self { values, grid }
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n_phi + j]
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn integrate(&self) -> Complex64 {
        self.grid.integrate(&self.values)
    }

    /// Quadrature mean over the sphere.
    pub fn mean(&self) -> Complex64 {
        self.integrate() / (4.0 * PI)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GridField) -> GridField {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        GridField::new(self.grid.clone(), values)
    }

    pub fn conj(&self) -> GridField {
        GridField::new(self.grid.clone(), self.values.iter().map(|v| v.conj()).collect())
    }

    /// Longitude average at each colatitude.
    pub fn zonal_mean(&self) -> Vec<Complex64> {
        let n = self.grid.n_phi;
        self.values.chunks(n).map(|row| row.iter().sum::<Complex64>() / n as f64).collect()
    }
}

/// Cached Legendre and Fourier tables for one truncation on one grid.
///
/// Immutable after construction and freely shared between threads.
#[derive(Clone, Debug)]
pub struct SphericalTransform {
    truncation: usize,
    grid: Arc<GridSpec>,
    packed_len: usize,
    value: Vec<f64>,
    dtheta: Vec<f64>,
    weighted: Vec<f64>,
    cos_table: Vec<f64>,
    sin_table: Vec<f64>,
}

impl SphericalTransform {
    pub fn new(truncation: usize, grid: GridSpec) -> Self {
        Self::with_shared_grid(truncation, Arc::new(grid))
    }

    pub fn with_shared_grid(truncation: usize, grid: Arc<GridSpec>) -> Self {
        let k = truncation;
        let packed_len = (k + 1) * (k + 2) / 2;
        let mut value = vec![0.0; grid.n_theta * packed_len];
        let mut dtheta = vec![0.0; grid.n_theta * packed_len];
        let mut weighted = vec![0.0; grid.n_theta * packed_len];
        for i in 0..grid.n_theta {
            let col = LegendreColumn::new(k, grid.nodes[i], grid.sin_theta[i]);
            for m in 0..=k {
                for l in m..=k {
                    let p = i * packed_len + packed(k, m, l);
                    value[p] = col.value(l, m);
                    dtheta[p] = col.dtheta(l, m);
                    weighted[p] = col.order_weighted(l, m);
                }
            }
        }
        let mut cos_table = vec![0.0; grid.n_phi * (k + 1)];
        let mut sin_table = vec![0.0; grid.n_phi * (k + 1)];
        for j in 0..grid.n_phi {
            for m in 0..=k {
                let a = m as f64 * grid.phi(j);
                cos_table[j * (k + 1) + m] = a.cos();
                sin_table[j * (k + 1) + m] = a.sin();
            }
        }
        Self {
            truncation,
            grid,
            packed_len,
            value,
            dtheta,
            weighted,
            cos_table,
            sin_table,
        }
    }

    #[inline]
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    #[inline]
    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    fn table(&self, kind: FieldKind) -> &[f64] {
        match kind {
            FieldKind::Value => &self.value,
            FieldKind::DTheta => &self.dtheta,
            FieldKind::DPhiOverSin => &self.weighted,
        }
    }

    #[inline]
    fn lat_table<'a>(&self, table: &'a [f64], i: usize) -> &'a [f64] {
        &table[i * self.packed_len..(i + 1) * self.packed_len]
    }

    /// `Σ_l f_{l,m} T_l^{|m|}` at one colatitude, with sign and `i` factors
    /// for negative orders and the `∂_φ` kind applied.
    #[inline]
    fn latitude_sum(&self, f: &SpectralField, lat: &[f64], m: isize, kind: FieldKind) -> Complex64 {
        let k = self.truncation;
        let am = m.unsigned_abs();
        let base = packed(k, am, am);
        let mut acc = Complex64::new(0.0, 0.0);
        let coeffs = f.coeffs();
        for l in am..=k.min(f.truncation()) {
            let idx = (l * l + l).wrapping_add_signed(m);
            acc += coeffs[idx] * lat[base + l - am];
        }
        let parity = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
        match kind {
            FieldKind::DPhiOverSin => Complex64::new(0.0, parity * m.signum() as f64) * acc,
            _ => acc * parity,
        }
    }

    pub fn synthesize(&self, f: &SpectralField) -> GridField {
        self.synthesize_kind(f, FieldKind::Value)
    }

    /// Grid values of `u`, `∂_θ u` or `(1/sinθ)∂_φ u`. Real fields take a
    /// half-spectrum path and produce exactly zero imaginary parts.
    pub fn synthesize_kind(&self, f: &SpectralField, kind: FieldKind) -> GridField {
        if f.is_real_field() {
            let re = self.synthesize_real(f, kind);
            return GridField::from_real(self.grid.clone(), &re);
        }
        let k = self.truncation as isize;
        let (nt, np) = (self.grid.n_theta, self.grid.n_phi);
        let kk = self.truncation + 1;
        let table = self.table(kind);
        let mut values = vec![Complex64::new(0.0, 0.0); nt * np];
        let mut lat_coeffs = vec![Complex64::new(0.0, 0.0); 2 * self.truncation + 1];
        for i in 0..nt {
            let lat = self.lat_table(table, i);
            for m in -k..=k {
                lat_coeffs[(m + k) as usize] = self.latitude_sum(f, lat, m, kind);
            }
            for j in 0..np {
                let mut acc = lat_coeffs[k as usize];
                for m in 1..=self.truncation {
                    let e = Complex64::new(self.cos_table[j * kk + m], self.sin_table[j * kk + m]);
                    acc += lat_coeffs[k as usize + m] * e + lat_coeffs[k as usize - m] * e.conj();
                }
                values[i * np + j] = acc;
            }
        }
        GridField::new(self.grid.clone(), values)
    }

    /// Real grid values of a real-symmetric field. Only `m >= 0` is read.
    pub fn synthesize_real(&self, f: &SpectralField, kind: FieldKind) -> Vec<f64> {
        let (nt, np) = (self.grid.n_theta, self.grid.n_phi);
        let kk = self.truncation + 1;
        let table = self.table(kind);
        let mut out = vec![0.0; nt * np];
        let mut lat_coeffs = vec![Complex64::new(0.0, 0.0); kk];
        for i in 0..nt {
            let lat = self.lat_table(table, i);
            for m in 0..kk {
                lat_coeffs[m] = self.latitude_sum(f, lat, m as isize, kind);
            }
            let row = &mut out[i * np..(i + 1) * np];
            for (j, r) in row.iter_mut().enumerate() {
                let cs = &self.cos_table[j * kk..(j + 1) * kk];
                let sn = &self.sin_table[j * kk..(j + 1) * kk];
                let mut acc = 0.0;
                for m in 1..kk {
                    acc += lat_coeffs[m].re * cs[m] - lat_coeffs[m].im * sn[m];
                }
                *r = lat_coeffs[0].re + 2.0 * acc;
            }
        }
        out
    }

    /// Quadrature projection onto every `Y_k`, `k <= truncation`. Real grid
    /// fields produce real-symmetric coefficients.
    pub fn analyze(&self, u: &GridField) -> SpectralField {
        assert!(Arc::ptr_eq(u.grid(), &self.grid) || **u.grid() == *self.grid, "grid mismatch");
        if u.is_real() {
            let re: Vec<f64> = u.values().iter().map(|v| v.re).collect();
            return self.analyze_real(&re);
        }
        let k = self.truncation;
        let (nt, np) = (self.grid.n_theta, self.grid.n_phi);
        let kk = k + 1;
        let mut out = SpectralField::zeros(k, false);
        let dphi = 2.0 * PI / np as f64;
        for i in 0..nt {
            let row = &u.values()[i * np..(i + 1) * np];
            let lat = self.lat_table(&self.value, i);
            for m in -(k as isize)..=k as isize {
                let am = m.unsigned_abs();
                let mut h = Complex64::new(0.0, 0.0);
                for (j, v) in row.iter().enumerate() {
                    let s = if m < 0 { -1.0 } else { 1.0 };
                    let e = Complex64::new(self.cos_table[j * kk + am], -s * self.sin_table[j * kk + am]);
                    h += v * e;
                }
                let parity = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
                let h = h * (dphi * self.grid.weights[i] * parity);
                let base = packed(k, am, am);
                for l in am..=k {
                    let wv = WaveVector::new(l, m).unwrap();
                    out.coeffs_mut()[wv.index()] += h * lat[base + l - am];
                }
            }
        }
        out
    }

    /// Analysis of real grid values; only `m >= 0` is computed and the
    /// negative orders are filled by symmetry.
    pub fn analyze_real(&self, u: &[f64]) -> SpectralField {
        let k = self.truncation;
        let (nt, np) = (self.grid.n_theta, self.grid.n_phi);
        assert_eq!(u.len(), nt * np);
        let kk = k + 1;
        let mut out = SpectralField::zeros(k, true);
        let dphi = 2.0 * PI / np as f64;
        let mut h = vec![Complex64::new(0.0, 0.0); kk];
        for i in 0..nt {
            let row = &u[i * np..(i + 1) * np];
            h.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for (j, &v) in row.iter().enumerate() {
                let cs = &self.cos_table[j * kk..(j + 1) * kk];
                let sn = &self.sin_table[j * kk..(j + 1) * kk];
                for m in 0..kk {
                    h[m].re += v * cs[m];
                    h[m].im -= v * sn[m];
                }
            }
            let lat = self.lat_table(&self.value, i);
            let w = dphi * self.grid.weights[i];
            for m in 0..kk {
                let hm = h[m] * w;
                let base = packed(k, m, m);
                for l in m..=k {
                    let idx = l * l + l + m;
                    out.coeffs_mut()[idx] += hm * lat[base + l - m];
                }
            }
        }
        for l in 0..=k {
            out.coeffs_mut()[l * l + l].im = 0.0;
            for m in 1..=l {
                let c = out.coeffs()[l * l + l + m];
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                out.coeffs_mut()[l * l + l - m] = sign * c.conj();
            }
        }
        out
    }
}

/// Offset of `(l, m)` in the order-major packing used by the tables.
#[inline]
fn packed(k: usize, m: usize, l: usize) -> usize {
    m * (k + 1) - (m * m - m) / 2 + (l - m)
}
