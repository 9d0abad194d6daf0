//! Scalar functionals of states and trajectories: Sobolev norms, the
//! zonal/non-zonal split, the Grashof number, the attractor dimension bound
//! and the ε-scaling fit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::nonzonal_project;
use crate::solver::RecordRow;
use crate::spharm::SpectralField;

/// `Σ (k(k+1))ˢ |ω_k|²`. The constant mode only counts for `s = 0`.
pub fn sobolev_norm_sq(w: &SpectralField, s: f64) -> f64 {
    w.modes()
        .filter(|(wv, _)| s == 0.0 || wv.degree() > 0)
        .map(|(wv, c)| {
            let weight = if s == 0.0 { 1.0 } else { wv.eigenvalue().powf(s) };
            weight * c.norm_sqr()
        })
        .sum()
}

/// `|ω|_{Hˢ}`, for any real `s` (spectral interpolation).
pub fn sobolev_norm(w: &SpectralField, s: f64) -> f64 {
    sobolev_norm_sq(w, s).sqrt()
}

/// `(|ω̄|², |ω̃|²)`.
pub fn zonal_energy_split(w: &SpectralField) -> (f64, f64) {
    let mut zonal = 0.0;
    let mut rest = 0.0;
    for (wv, c) in w.modes() {
        if wv.is_zonal() {
            zonal += c.norm_sqr();
        } else {
            rest += c.norm_sqr();
        }
    }
    (zonal, rest)
}

/// `G = |∇⁻¹f| / μ²`.
pub fn grashof(f: &SpectralField, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::NonPositiveViscosity(mu));
    }
    Ok(sobolev_norm_sq(f, -1.0).sqrt() / (mu * mu))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionBound {
    pub value: f64,
    pub c_s: f64,
    /// `G < 1` was replaced by `G = 1`.
    pub clamped: bool,
}

/// `c_S G^{2/3} (1 + ln G)^{1/3}`, evaluated at `G = 1` when `G < 1`.
pub fn attractor_dim_bound(g: f64, c_s: f64) -> DimensionBound {
    let clamped = g < 1.0;
    let g = g.max(1.0);
    DimensionBound {
        value: c_s * g.powf(2.0 / 3.0) * (1.0 + g.ln()).cbrt(),
        c_s,
        clamped,
    }
}

/// Where `sup_{t ≥ T₀}` is taken: the last half of the trajectory after a
/// transient of `max(10, 5/(2μ))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailWindow {
    pub transient: f64,
    pub start: f64,
    pub end: f64,
}

impl TailWindow {
    pub fn new(mu: f64, t_start: f64, t_end: f64) -> Result<Self> {
        let transient = t_start + f64::max(10.0, 5.0 / (2.0 * mu));
        if !(t_end > transient) {
            return Err(Error::DegenerateScan(format!(
                "trajectory ends at t={t_end}, before the transient cutoff t={transient}"
            )));
        }
        Ok(Self {
            transient,
            start: transient + 0.5 * (t_end - transient),
            end: t_end,
        })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

/// `(sup |ω̃|², time average of μ|∇ω̃|²)` over the window, from recorded
/// rows. The average uses the trapezoid rule on the record times.
pub fn tail_statistics(rows: &[RecordRow], mu: f64, window: &TailWindow) -> Result<(f64, f64)> {
    let tail: Vec<&RecordRow> = rows.iter().filter(|r| window.contains(r.t)).collect();
    if tail.len() < 2 {
        return Err(Error::DegenerateScan("fewer than two records in the tail window".into()));
    }
    let sup = tail.iter().map(|r| r.nonzonal_energy).fold(0.0, f64::max);
    let mut integral = 0.0;
    for p in tail.windows(2) {
        integral += 0.5 * (p[1].t - p[0].t) * (p[0].h1_nonzonal + p[1].h1_nonzonal);
    }
    let span = tail[tail.len() - 1].t - tail[0].t;
    Ok((sup, mu * integral / span))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    #[serde(with = "crate::solver::epsilon_format")]
    pub epsilon: f64,
    pub sup_tail_nonzonal: f64,
    pub avg_mu_grad_nonzonal: f64,
    /// Finite ε runs enter the fit; the no-rotation control does not.
    pub included: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
    pub span_decades: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub mu: f64,
    pub window: TailWindow,
    pub entries: Vec<ScanEntry>,
}

impl ScanResult {
    pub const CSV_HEADER: &'static str = "epsilon,sup_tail_nonzonal_enstrophy,avg_mu_grad_nonzonal,slope_included";

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for e in &self.entries {
            let eps = if e.epsilon.is_infinite() {
                "inf".to_string()
            } else {
                format!("{:.16e}", e.epsilon)
            };
            writeln!(
                out,
                "{eps},{:.16e},{:.16e},{}",
                e.sup_tail_nonzonal, e.avg_mu_grad_nonzonal, e.included
            )?;
        }
        Ok(())
    }

    /// Pairs where a smaller ε gave a larger tail supremum by more than
    /// `tolerance` (relative), among the fitted entries.
    pub fn monotonicity_violations(&self, tolerance: f64) -> Vec<(f64, f64)> {
        let mut fitted: Vec<&ScanEntry> = self.entries.iter().filter(|e| e.included).collect();
        fitted.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
        fitted
            .windows(2)
            .filter(|p| p[1].sup_tail_nonzonal > p[0].sup_tail_nonzonal * (1.0 + tolerance))
            .map(|p| (p[0].epsilon, p[1].epsilon))
            .collect()
    }
}

/// Least-squares slope of `ln(sup tail |ω̃|²)` against `ln ε` over the
/// included entries. Needs at least three distinct ε.
pub fn fit_epsilon_slope(scan: &ScanResult) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = scan
        .entries
        .iter()
        .filter(|e| e.included && e.epsilon.is_finite())
        .map(|e| (e.epsilon, e.sup_tail_nonzonal))
        .collect();
    fit_log_log(&pts)
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_log_log(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.iter().any(|&(x, y)| !(x > 0.0) || !(y > 0.0)) {
        return Err(Error::DegenerateScan("log-log fit needs positive data".into()));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::DegenerateScan(format!("need at least 3 distinct epsilons, got {}", xs.len())));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = points.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        points: points.len(),
        span_decades: (xs[xs.len() - 1] / xs[0]).log10(),
    })
}

/// `|∇ω̃|²` of a state.
pub fn nonzonal_enstrophy(w: &SpectralField) -> f64 {
    sobolev_norm_sq(&nonzonal_project(w), 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spharm::WaveVector;

    fn wv(k: usize, m: isize) -> WaveVector {
        WaveVector::new(k, m).unwrap()
    }

    #[test]
    fn norm_examples() {
        let f = SpectralField::unit(3, wv(1, 1));
        assert!((sobolev_norm(&f, 1.0) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(sobolev_norm(&f, 0.0), 1.0);
        assert_eq!(zonal_energy_split(&SpectralField::unit(4, wv(3, 2))), (0.0, 1.0));
    }

    #[test]
    fn grashof_examples() {
        let f = SpectralField::unit(3, wv(1, 0));
        assert!((grashof(&f, 1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((grashof(&f, 0.5).unwrap() - 4.0 * grashof(&f, 1.0).unwrap()).abs() < 1e-14);
        assert_eq!(grashof(&SpectralField::zeros(3, true), 1.0).unwrap(), 0.0);
        assert!(grashof(&f, 0.0).is_err());
    }

    #[test]
    fn dimension_bound() {
        assert_eq!(attractor_dim_bound(1.0, 1.0).value, 1.0);
        let e = attractor_dim_bound(std::f64::consts::E, 1.0).value;
        assert!((e - 2.453991117921591).abs() < 1e-12);
        let low = attractor_dim_bound(0.3, 1.0);
        assert!(low.clamped && low.value == 1.0);
    }

    #[test]
    fn window_lies_after_transient() {
        let w = TailWindow::new(0.1, 0.0, 200.0).unwrap();
        assert_eq!(w.transient, 25.0);
        assert_eq!(w.start, 112.5);
        assert!(TailWindow::new(0.1, 0.0, 20.0).is_err());
    }

    #[test]
    fn synthetic_fits() {
        let eps = [1.0, 0.25, 1.0 / 16.0, 1.0 / 64.0];
        let lin: Vec<(f64, f64)> = eps.iter().map(|&e| (e, 3.0 * e)).collect();
        let fit = fit_log_log(&lin).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12 && (fit.r_squared - 1.0).abs() < 1e-12);
        let flat: Vec<(f64, f64)> = eps.iter().map(|&e| (e, 2.0)).collect();
        assert!(fit_log_log(&flat).unwrap().slope.abs() < 1e-12);
        assert!(fit_log_log(&[(0.1, 1.0), (0.1, 2.0), (0.1, 3.0)]).is_err());
    }
}
