#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zonalsphere::{SpectralField, WaveVector};

pub fn wv(k: usize, m: isize) -> WaveVector {
    WaveVector::new(k, m).unwrap()
}

/// Real-symmetric zero-mean field with independent uniform coefficients.
pub fn random_real(truncation: usize, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(truncation, true);
    for k in 1..=truncation {
        for m in 0..=k as isize {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            f.set_symmetric(wv(k, m), c);
        }
    }
    f
}

/// Complex field (no symmetry), zero mean.
pub fn random_complex(truncation: usize, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::from_fn(truncation, false, |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    f.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    f
}

pub fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    (a - b).norm_sq().sqrt() / a.norm_sq().sqrt().max(b.norm_sq().sqrt()).max(f64::MIN_POSITIVE)
}

/// Harmonic values and derivatives built from the explicit power series of
/// the Legendre polynomials, on a Gauss grid found by Newton iteration on
/// Bonnet's recurrence.
/// Nothing here goes through the library's recurrences or quadrature.
pub mod explicit {
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    fn binomial(n: usize, k: usize) -> f64 {
        factorial(n) / (factorial(k) * factorial(n - k))
    }

    /// Power-series coefficients of `P_l(x)`, lowest order first.
    fn legendre_poly(l: usize) -> Vec<f64> {
        let mut c = vec![0.0; l + 1];
        for k in 0..=l / 2 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            c[l - 2 * k] = sign * binomial(l, k) * binomial(2 * l - 2 * k, l) / 2f64.powi(l as i32);
        }
        c
    }

    fn derive(c: &[f64]) -> Vec<f64> {
        if c.len() <= 1 {
            return vec![0.0];
        }
        (1..c.len()).map(|i| i as f64 * c[i]).collect()
    }

    fn eval(c: &[f64], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    /// `(P_n(x), P_n'(x))` from Bonnet's recurrence.
    fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
        let (mut p0, mut p1) = (1.0, x);
        if n == 0 {
            return (1.0, 0.0);
        }
        for k in 2..=n {
            let k = k as f64;
            let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
    }

    /// Gauss–Legendre nodes (decreasing) and weights by Newton iteration.
    pub fn gauss(n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * d * d));
        }
        (nodes, weights)
    }

    #[derive(Clone, Copy, Debug)]
    pub struct Jet {
        pub value: Complex64,
        pub dtheta: Complex64,
        pub dphi_over_sin: Complex64,
    }

    /// `Y_l^m` (orthonormal, Condon–Shortley) with its θ derivative and
    /// `(1/sinθ)∂_φ`, at `x = cosθ`, `s = sinθ > 0`.
    pub fn jet(l: usize, m: isize, x: f64, s: f64, phi: f64) -> Jet {
        let ma = m.unsigned_abs();
        let mut q = legendre_poly(l);
        for _ in 0..ma {
            q = derive(&q);
        }
        let dq = derive(&q);
        let cs = if ma % 2 == 0 { 1.0 } else { -1.0 };
        let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - ma) / factorial(l + ma)).sqrt();
        // P_l^m(cosθ) = (-1)^m sin^m θ Q(cosθ)
        let p = cs * s.powi(ma as i32) * eval(&q, x);
        let dp = cs * (ma as f64 * s.powi(ma as i32 - 1) * x * eval(&q, x) - s.powi(ma as i32 + 1) * eval(&dq, x));
        let e = Complex64::from_polar(1.0, ma as f64 * phi);
        let mut value = e * (norm * p);
        let mut dtheta = e * (norm * dp);
        let mut dphi = Complex64::new(0.0, ma as f64) * value / s;
        if m < 0 {
            value = value.conj() * cs;
            dtheta = dtheta.conj() * cs;
            dphi = dphi.conj() * cs;
        }
        Jet {
            value,
            dtheta,
            dphi_over_sin: dphi,
        }
    }

    /// Tabulated jets on a tensor grid that integrates polynomials of
    /// degree `≤ 4K + 3` in `cosθ` and trigonometric degree `≤ 3K + 1`.
    pub struct Oracle {
        pub truncation: usize,
        pub weights: Vec<f64>,
        pub n_phi: usize,
        modes: Vec<(usize, isize)>,
        jets: Vec<Vec<Jet>>,
    }

    impl Oracle {
        pub fn new(truncation: usize) -> Self {
            let (nodes, gw) = gauss(2 * truncation + 2);
            let n_phi = 3 * truncation + 2;
            let dphi = 2.0 * PI / n_phi as f64;
            let mut modes = Vec::new();
            for l in 0..=truncation {
                for m in -(l as isize)..=l as isize {
                    modes.push((l, m));
                }
            }
            let jets = modes
                .iter()
                .map(|&(l, m)| {
                    let mut v = Vec::new();
                    for &x in &nodes {
                        let s = (1.0 - x * x).sqrt();
                        for p in 0..n_phi {
                            v.push(jet(l, m, x, s, p as f64 * dphi));
                        }
                    }
                    v
                })
                .collect();
            let weights = gw.iter().flat_map(|&w| std::iter::repeat(w * dphi).take(n_phi)).collect();
            Self {
                truncation,
                weights,
                n_phi,
                modes,
                jets,
            }
        }

        fn idx(&self, l: usize, m: isize) -> usize {
            self.modes.iter().position(|&x| x == (l, m)).unwrap()
        }

        /// `∫ ∂(Y_j, Y_k) conj(Y_l)`.
        pub fn jacobian(&self, j: (usize, isize), k: (usize, isize), l: (usize, isize)) -> Complex64 {
            let (a, b, c) = (&self.jets[self.idx(j.0, j.1)], &self.jets[self.idx(k.0, k.1)], &self.jets[self.idx(l.0, l.1)]);
            (0..self.weights.len())
                .map(|n| {
                    let jac = a[n].dtheta * b[n].dphi_over_sin - a[n].dphi_over_sin * b[n].dtheta;
                    jac * c[n].value.conj() * self.weights[n]
                })
                .sum()
        }

        /// `∫ Y_a conj(Y_b)`.
        pub fn inner(&self, a: (usize, isize), b: (usize, isize)) -> Complex64 {
            let (x, y) = (&self.jets[self.idx(a.0, a.1)], &self.jets[self.idx(b.0, b.1)]);
            (0..self.weights.len()).map(|n| x[n].value * y[n].value.conj() * self.weights[n]).sum()
        }
    }
}
