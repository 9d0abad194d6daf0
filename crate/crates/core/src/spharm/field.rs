use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::WaveVector;
use crate::error::{Error, Result};

/// Dense coefficients over the `(K+1)²` triangle, indexed by
/// [`WaveVector::index`].
///
/// Real fields satisfy `c(k, -m) = (-1)^m conj(c(k, m))`. The flag records
/// the intent; [`SpectralField::enforce_real_symmetry`] makes it true.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    truncation: usize,
    coeffs: Vec<Complex64>,
    is_real_field: bool,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[inline]
fn mirror_sign(order: isize) -> f64 {
    if order.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl SpectralField {
    pub fn zeros(truncation: usize, is_real_field: bool) -> Self {
        Self {
            truncation,
            coeffs: vec![ZERO; (truncation + 1) * (truncation + 1)],
            is_real_field,
        }
    }

    pub fn from_coeffs(truncation: usize, coeffs: Vec<Complex64>, is_real_field: bool) -> Self {
        assert_eq!(coeffs.len(), (truncation + 1) * (truncation + 1));
        Self {
            truncation,
            coeffs,
            is_real_field,
        }
    }

    /// Field with coefficient `f(k)` at every wavevector.
    pub fn from_fn(
        truncation: usize,
        is_real_field: bool,
        mut f: impl FnMut(WaveVector) -> Complex64,
    ) -> Self {
        let coeffs = WaveVector::all(truncation).map(&mut f).collect();
        Self {
            truncation,
            coeffs,
            is_real_field,
        }
    }

    /// A single harmonic with unit coefficient (not real unless zonal).
    pub fn unit(truncation: usize, wv: WaveVector) -> Self {
        let mut f = Self::zeros(truncation, wv.is_zonal());
        f.set(wv, Complex64::new(1.0, 0.0));
        f
    }

    #[inline]
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    #[inline]
    pub fn is_real_field(&self) -> bool {
        self.is_real_field
    }

    pub fn set_real_flag(&mut self, flag: bool) {
        self.is_real_field = flag;
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at `wv`; zero beyond the truncation.
    #[inline]
    pub fn get(&self, wv: WaveVector) -> Complex64 {
        if wv.degree() > self.truncation {
            ZERO
        } else {
            self.coeffs[wv.index()]
        }
    }

    #[inline]
    pub fn set(&mut self, wv: WaveVector, value: Complex64) {
        assert!(
            wv.degree() <= self.truncation,
            "{wv} beyond truncation {}",
            self.truncation
        );
        self.coeffs[wv.index()] = value;
    }

    /// Sets `wv` and its mirror so the real-field symmetry holds for this pair.
    pub fn set_symmetric(&mut self, wv: WaveVector, value: Complex64) {
        if wv.is_zonal() {
            self.set(wv, Complex64::new(value.re, 0.0));
        } else {
            self.set(wv, value);
            self.set(wv.mirror(), mirror_sign(wv.order()) * value.conj());
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (WaveVector, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (WaveVector::from_index(i), *c))
    }

    /// Projects onto the real-field subspace and sets the flag.
    pub fn enforce_real_symmetry(&mut self) {
        for k in 0..=self.truncation {
            let zonal = WaveVector::new(k, 0).unwrap().index();
            self.coeffs[zonal].im = 0.0;
            for m in 1..=k as isize {
                let pos = WaveVector::new(k, m).unwrap();
                let a = self.coeffs[pos.index()];
                let b = mirror_sign(m) * self.coeffs[pos.mirror().index()].conj();
                let avg = 0.5 * (a + b);
                self.coeffs[pos.index()] = avg;
                self.coeffs[pos.mirror().index()] = mirror_sign(m) * avg.conj();
            }
        }
        self.is_real_field = true;
    }

    /// Largest violation of the real-field symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        self.modes()
            .map(|(wv, c)| (c - mirror_sign(wv.order()) * self.get(wv.mirror()).conj()).norm())
            .fold(0.0, f64::max)
    }

    #[inline]
    pub fn mean_coeff(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `Σ a_k conj(b_k)`, the L² inner product with conjugation on the
    /// second slot.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.truncation, other.truncation, "truncation mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Coefficient-wise multiplication by a diagonal symbol `s(k)`.
    pub fn map_diagonal(&self, mut symbol: impl FnMut(WaveVector) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * symbol(WaveVector::from_index(i)))
            .collect();
        Self {
            truncation: self.truncation,
            coeffs,
            is_real_field: false,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            truncation: self.truncation,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            is_real_field: self.is_real_field,
        }
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &Self) {
        assert_eq!(self.truncation, x.truncation, "truncation mismatch");
        for (y, x) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += x * a;
        }
        self.is_real_field &= x.is_real_field;
    }

    /// Copy restricted (or zero-padded) to another truncation.
    pub fn retruncate(&self, truncation: usize) -> Self {
        Self::from_fn(truncation, self.is_real_field, |wv| self.get(wv))
    }

    /// Coefficients of degree exactly `degree`, everything else zero.
    pub fn degree_shell(&self, degree: usize) -> Self {
        Self::from_fn(self.truncation, self.is_real_field, |wv| {
            if wv.degree() == degree {
                self.get(wv)
            } else {
                ZERO
            }
        })
    }

    pub fn check_same_truncation(&self, other: &Self) -> Result<()> {
        if self.truncation == other.truncation {
            Ok(())
        } else {
            Err(Error::TruncationMismatch {
                left: self.truncation,
                right: other.truncation,
            })
        }
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: Self) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: Self) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<Complex64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: Complex64) -> SpectralField {
        SpectralField {
            truncation: self.truncation,
            coeffs: self.coeffs.iter().map(|c| c * rhs).collect(),
            is_real_field: self.is_real_field && rhs.im == 0.0,
        }
    }
}
