//! Orthonormal associated Legendre functions and Gauss–Legendre nodes.
//!
//! Functions are stored for non-negative orders only, normalised so that
//! `Y_l^m(θ, φ) = Λ_l^m(cos θ) e^{imφ}` is orthonormal on the unit sphere,
//! with the Condon–Shortley phase folded into `Λ`. Negative orders follow
//! from `Λ_l^{-m} = (-1)^m Λ_l^m`.

use std::f64::consts::PI;

/// Index of `(l, m)` with `0 <= m <= l` in a packed lower triangle.
#[inline]
pub fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

#[inline]
pub fn tri_len(k_max: usize) -> usize {
    (k_max + 1) * (k_max + 2) / 2
}

/// `Λ_l^m`, `∂_θ Λ_l^m` and `Λ_l^m / sin θ` at a single colatitude, for all
/// `0 <= m <= l <= k_max`.
///
/// `Λ/sinθ` is produced by running the degree recurrence from the sectoral
/// seed with one fewer power of `sinθ`, so nothing is ever divided by
/// `sinθ` and the poles are handled exactly. The `m = 0` entries of the
/// `over_sin` table are unused and left at zero.
#[derive(Clone, Debug)]
pub struct LegendreColumn {
    pub k_max: usize,
    pub value: Vec<f64>,
    pub dtheta: Vec<f64>,
    pub over_sin: Vec<f64>,
}

impl LegendreColumn {
    pub fn new(k_max: usize, cos_theta: f64, sin_theta: f64) -> Self {
        let n = tri_len(k_max);
        let mut value = vec![0.0; n];
        let mut over_sin = vec![0.0; n];
        let x = cos_theta;

        // sectoral seeds Λ_m^m, and Λ_m^m / sinθ for m >= 1
        let mut sectoral = 1.0 / (4.0 * PI).sqrt();
        value[0] = sectoral;
        for m in 1..=k_max {
            let factor = -((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
            over_sin[tri_index(m, m)] = factor * sectoral;
            sectoral *= factor * sin_theta;
            value[tri_index(m, m)] = sectoral;
        }

        for m in 0..=k_max {
            upward(&mut value, k_max, m, x);
            if m > 0 {
                upward(&mut over_sin, k_max, m, x);
            }
        }

        let mut dtheta = vec![0.0; n];
        for l in 1..=k_max {
            let lf = l as f64;
            dtheta[tri_index(l, 0)] = (lf * (lf + 1.0)).sqrt() * value[tri_index(l, 1)];
            for m in 1..=l {
                let mf = m as f64;
                let lower = if l > m {
                    ((lf * lf - mf * mf) * (2.0 * lf + 1.0) / (2.0 * lf - 1.0)).sqrt()
                        * over_sin[tri_index(l - 1, m)]
                } else {
                    0.0
                };
                dtheta[tri_index(l, m)] = lf * x * over_sin[tri_index(l, m)] - lower;
            }
        }

        Self {
            k_max,
            value,
            dtheta,
            over_sin,
        }
    }

    #[inline]
    pub fn value(&self, l: usize, m: usize) -> f64 {
        self.value[tri_index(l, m)]
    }

    #[inline]
    pub fn dtheta(&self, l: usize, m: usize) -> f64 {
        self.dtheta[tri_index(l, m)]
    }

    /// `m Λ_l^m / sin θ`, the order-weighted function behind `(1/sinθ) ∂_φ`.
    #[inline]
    pub fn order_weighted(&self, l: usize, m: usize) -> f64 {
        m as f64 * self.over_sin[tri_index(l, m)]
    }
}

/// Three-term recurrence in degree at fixed order, seeded from the sectoral
/// entry already stored at `(m, m)`. Linear, so it applies unchanged to the
/// `1/sinθ`-scaled sequence.
fn upward(table: &mut [f64], k_max: usize, m: usize, x: f64) {
    if m + 1 > k_max {
        return;
    }
    let mf = m as f64;
    let seed = table[tri_index(m, m)];
    table[tri_index(m + 1, m)] = (2.0 * mf + 3.0).sqrt() * x * seed;
    for l in (m + 2)..=k_max {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let lm1 = lf - 1.0;
        let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
        table[tri_index(l, m)] =
            a * (x * table[tri_index(l - 1, m)] - b * table[tri_index(l - 2, m)]);
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes in decreasing order
/// (increasing colatitude). Newton iteration on `P_n` from the usual
/// asymptotic initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_and_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
