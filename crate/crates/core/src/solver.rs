//! Time integration of
//! `∂_t ω + B(ω, ω) + (1/ε) Lω + μAω = f`
//! by integrating-factor RK4: the diagonal part `μ|k|² + iΩ_k/ε` is
//! propagated exactly and classical RK4 is applied to the remainder in the
//! rotating, decaying frame.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diagnostics::{sobolev_norm_sq, zonal_energy_split};
use crate::error::{Error, Result};
use crate::operators::{nonzonal_project, NonlinearPath, OperatorContext};
use crate::spharm::snapshot::load_snapshot;
use crate::spharm::{SpectralField, WaveVector};
use crate::triads::frequency;

/// One spectral amplitude in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeAmplitude {
    pub k: usize,
    pub khat: isize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl ModeAmplitude {
    pub fn new(k: usize, khat: isize, re: f64, im: f64) -> Self {
        Self { k, khat, re, im }
    }

    fn wave_vector(&self) -> Result<WaveVector> {
        WaveVector::new(self.k, self.khat)
    }
}

/// Builds a real-symmetric field from listed amplitudes. A mode listed with
/// both orders takes its value from the non-negative order; a mode listed
/// with one order gets its mirror filled in.
fn symmetric_field(truncation: usize, modes: &[ModeAmplitude], what: &str) -> Result<SpectralField> {
    let mut field = SpectralField::zeros(truncation, true);
    let mut listed = Vec::new();
    for m in modes {
        let wv = m.wave_vector()?;
        if wv.degree() > truncation {
            return Err(Error::Config(format!("{what} mode {wv} beyond truncation {truncation}")));
        }
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::Config(format!("{what} amplitude at {wv} is not finite")));
        }
        if wv.is_zonal() && m.im != 0.0 {
            return Err(Error::Config(format!("{what} amplitude at zonal mode {wv} must be real")));
        }
        listed.push(wv);
    }
    for (m, &wv) in modes.iter().zip(&listed) {
        let mirror_listed = listed.contains(&wv.mirror());
        if wv.order() >= 0 || !mirror_listed {
            field.set_symmetric(wv, Complex64::new(m.re, m.im));
        }
    }
    Ok(field)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeProfile {
    #[default]
    Steady,
    /// Zero before `t0`, linear up to full strength at `t1`.
    Ramp { t0: f64, t1: f64 },
}

impl TimeProfile {
    pub fn factor(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Steady => 1.0,
            TimeProfile::Ramp { t0, t1 } => ((t - t0) / (t1 - t0)).clamp(0.0, 1.0),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSpec {
    pub modes: Vec<ModeAmplitude>,
    #[serde(default)]
    pub profile: TimeProfile,
}

impl ForcingSpec {
    pub fn steady(modes: Vec<ModeAmplitude>) -> Self {
        Self {
            modes,
            profile: TimeProfile::Steady,
        }
    }

    /// Spatial pattern of the forcing, real-symmetric and zero-mean.
    pub fn field(&self, truncation: usize) -> Result<SpectralField> {
        if self.modes.iter().any(|m| m.k == 0) {
            return Err(Error::Config("forcing must have zero mean: no (0,0) entry".into()));
        }
        if let TimeProfile::Ramp { t0, t1 } = self.profile {
            if !(t1 > t0) {
                return Err(Error::Config(format!("ramp needs t1 > t0, got t0={t0}, t1={t1}")));
            }
        }
        symmetric_field(truncation, &self.modes, "forcing")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConditionSpec {
    #[default]
    Zero,
    Modes {
        modes: Vec<ModeAmplitude>,
    },
    /// Coefficient magnitudes `∝ k^slope` with random phases, scaled so
    /// that `|ω|² = energy`.
    Random {
        energy: f64,
        #[serde(default = "default_slope")]
        slope: f64,
    },
    /// A saved spectral snapshot, zero-padded or truncated to `K`.
    Snapshot {
        path: PathBuf,
    },
}

fn default_slope() -> f64 {
    -2.0
}

impl InitialConditionSpec {
    pub fn build(&self, truncation: usize, seed: u64) -> Result<SpectralField> {
        match self {
            InitialConditionSpec::Zero => Ok(SpectralField::zeros(truncation, true)),
            InitialConditionSpec::Modes { modes } => {
                if modes.iter().any(|m| m.k == 0) {
                    return Err(Error::Config("initial condition must have zero mean".into()));
                }
                symmetric_field(truncation, modes, "initial condition")
            }
            InitialConditionSpec::Random { energy, slope } => {
                if !(*energy >= 0.0) || !slope.is_finite() {
                    return Err(Error::Config("random initial condition needs energy >= 0 and finite slope".into()));
                }
                Ok(random_field(truncation, *energy, *slope, seed))
            }
            InitialConditionSpec::Snapshot { path } => {
                let mut f = load_snapshot(path)?.retruncate(truncation);
                if f.mean_coeff().norm() > 1e-13 {
                    return Err(Error::Config(format!("snapshot {} has nonzero mean", path.display())));
                }
                if f.symmetry_defect() > 1e-12 {
                    return Err(Error::Config(format!("snapshot {} is not a real field", path.display())));
                }
                f.enforce_real_symmetry();
                Ok(f)
            }
        }
    }
}

/// Real-symmetric zero-mean random field with `|c_k| ∝ k^slope`, uniform
/// phases, normalized to `Σ|c_k|² = energy`.
pub fn random_field(truncation: usize, energy: f64, slope: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(truncation, true);
    for k in 1..=truncation {
        let amp = (k as f64).powf(slope);
        for m in 0..=k as isize {
            let wv = WaveVector::new(k, m).unwrap();
            let phase: f64 = rng.gen_range(0.0..2.0 * PI);
            let c = if m == 0 {
                Complex64::new(amp * phase.cos().signum(), 0.0)
            } else {
                Complex64::from_polar(amp, phase)
            };
            f.set_symmetric(wv, c);
        }
    }
    let norm = f.norm_sq();
    if norm > 0.0 {
        f = f.scale((energy / norm).sqrt());
    }
    f
}

pub(crate) mod epsilon_format {
    use super::*;

    pub fn serialize<S: Serializer>(eps: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if eps.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*eps)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Number(x) => Ok(x),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("epsilon must be a number or \"inf\", got {t:?}"))),
        }
    }
}

/// Parses `1e-3`, `0.25`, `1/64` or `inf`.
pub fn parse_epsilon(text: &str) -> Result<f64> {
    let t = text.trim();
    if matches!(t, "inf" | "infinity" | "Infinity") {
        return Ok(f64::INFINITY);
    }
    let value = match t.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| Error::Config(format!("bad epsilon {t:?}")))?;
            let b: f64 = b.trim().parse().map_err(|_| Error::Config(format!("bad epsilon {t:?}")))?;
            a / b
        }
        None => t.parse().map_err(|_| Error::Config(format!("bad epsilon {t:?}")))?,
    };
    if !(value > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {t:?}")));
    }
    Ok(value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(rename = "K")]
    pub truncation: usize,
    pub mu: f64,
    /// Rotation parameter; `f64::INFINITY` switches rotation off.
    #[serde(with = "epsilon_format")]
    pub epsilon: f64,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub t_start: f64,
    pub forcing: ForcingSpec,
    pub ic: InitialConditionSpec,
    pub record_every: usize,
    pub seed: u64,
}

impl SolverConfig {
    /// `K=15`, `μ=0.1`, `dt=0.01`, `t_end=200`, steady forcing on
    /// `(3,±2)` with amplitude 1 and `(4,0)` with amplitude 0.5, random
    /// initial condition of energy 1.
    pub fn headline(epsilon: f64) -> Self {
        Self {
            truncation: 15,
            mu: 0.1,
            epsilon,
            dt: 0.01,
            t_end: 200.0,
            t_start: 0.0,
            forcing: ForcingSpec::steady(vec![
                ModeAmplitude::new(3, 2, 1.0, 0.0),
                ModeAmplitude::new(3, -2, 1.0, 0.0),
                ModeAmplitude::new(4, 0, 0.5, 0.0),
            ]),
            ic: InitialConditionSpec::Random {
                energy: 1.0,
                slope: -2.0,
            },
            record_every: 10,
            seed: 1,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation < 1 {
            return Err(Error::Config("K must be at least 1".into()));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::NonPositiveViscosity(self.mu));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.t_start) || !self.t_end.is_finite() || !self.t_start.is_finite() {
            return Err(Error::Config(format!(
                "need finite t_end >= t_start, got t_start={}, t_end={}",
                self.t_start, self.t_end
            )));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        self.forcing.field(self.truncation)?;
        if let InitialConditionSpec::Modes { modes } = &self.ic {
            symmetric_field(self.truncation, modes, "initial condition")?;
        }
        Ok(())
    }

    pub fn effective_dt(&self) -> f64 {
        effective_dt(self.dt, self.epsilon)
    }
}

/// `dt` halved until it no longer exceeds `ε`.
pub fn effective_dt(dt: f64, epsilon: f64) -> f64 {
    let mut h = dt;
    while epsilon < h {
        h *= 0.5;
    }
    h
}

/// `μ|k|² + iΩ_k/ε`.
pub fn linear_rate(wv: WaveVector, mu: f64, epsilon: f64) -> Complex64 {
    let rot = if epsilon.is_infinite() { 0.0 } else { frequency(wv) / epsilon };
    Complex64::new(mu * wv.eigenvalue(), rot)
}

/// Diagnostics of one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub t: f64,
    /// `|ω|²`
    pub energy: f64,
    /// `|∇ω|²`
    pub enstrophy: f64,
    /// `|ω̄|²`
    pub zonal_energy: f64,
    /// `|ω̃|²`
    pub nonzonal_energy: f64,
    /// `|∇ω̃|²`
    pub h1_nonzonal: f64,
    /// `|ω|²_{H²}`
    pub h2: f64,
    /// `|ω|²_{H³}`
    pub h3: f64,
}

impl RecordRow {
    pub const CSV_HEADER: &'static str = "t,energy,enstrophy,zonal_energy,nonzonal_energy,h1_nonzonal,h2,h3";

    pub fn from_state(t: f64, w: &SpectralField) -> Self {
        let (zonal, nonzonal) = zonal_energy_split(w);
        Self {
            t,
            energy: sobolev_norm_sq(w, 0.0),
            enstrophy: sobolev_norm_sq(w, 1.0),
            zonal_energy: zonal,
            nonzonal_energy: nonzonal,
            h1_nonzonal: sobolev_norm_sq(&nonzonal_project(w), 1.0),
            h2: sobolev_norm_sq(w, 2.0),
            h3: sobolev_norm_sq(w, 3.0),
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.t,
            self.energy,
            self.enstrophy,
            self.zonal_energy,
            self.nonzonal_energy,
            self.h1_nonzonal,
            self.h2,
            self.h3
        )
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub rows: Vec<RecordRow>,
    /// States at the record times, when requested.
    pub states: Vec<(f64, SpectralField)>,
    pub final_state: SpectralField,
    pub final_time: f64,
    pub steps: usize,
    pub dt: f64,
}

impl TrajectoryRecord {
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", RecordRow::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(out, "{}", r.csv_line())?;
        }
        Ok(())
    }
}

/// A run that stopped early, with everything recorded up to the last
/// finite state.
#[derive(Debug)]
pub struct RunFailure {
    pub partial: TrajectoryRecord,
    pub error: Error,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (last finite state at t={})", self.error, self.partial.final_time)
    }
}

impl std::error::Error for RunFailure {}

pub struct Solver {
    cfg: SolverConfig,
    ctx: Arc<OperatorContext>,
    dt: f64,
    forcing: SpectralField,
    e_full: Vec<Complex64>,
    e_half: Vec<Complex64>,
    nonlinear: bool,
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        let ctx = Arc::new(OperatorContext::new(cfg.truncation));
        Self::with_context(cfg, ctx)
    }

    /// Shares a prebuilt context, e.g. across the members of a scan.
    pub fn with_context(cfg: SolverConfig, ctx: Arc<OperatorContext>) -> Result<Self> {
        cfg.validate()?;
        if ctx.truncation() != cfg.truncation {
            return Err(Error::TruncationMismatch {
                left: cfg.truncation,
                right: ctx.truncation(),
            });
        }
        let dt = cfg.effective_dt();
        let forcing = cfg.forcing.field(cfg.truncation)?;
        let rates: Vec<Complex64> = WaveVector::all(cfg.truncation)
            .map(|wv| linear_rate(wv, cfg.mu, cfg.epsilon))
            .collect();
        let e_full = rates.iter().map(|r| (-r * dt).exp()).collect();
        let e_half = rates.iter().map(|r| (-r * (0.5 * dt)).exp()).collect();
        Ok(Self {
            cfg,
            ctx,
            dt,
            forcing,
            e_full,
            e_half,
            nonlinear: true,
        })
    }

    /// Drops `B(ω, ω)`, leaving the linear forced problem.
    pub fn without_nonlinear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn context(&self) -> &Arc<OperatorContext> {
        &self.ctx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn forcing(&self) -> &SpectralField {
        &self.forcing
    }

    pub fn initial_state(&self) -> Result<SpectralField> {
        self.cfg.ic.build(self.cfg.truncation, self.cfg.seed)
    }

    /// `-B(ω, ω) + f(t)`.
    pub fn rhs(&self, w: &SpectralField, t: f64) -> Result<SpectralField> {
        let mut out = if self.nonlinear {
            self.ctx.nonlinear_b(w, NonlinearPath::Pseudospectral)?.scale(-1.0)
        } else {
            SpectralField::zeros(self.cfg.truncation, w.is_real_field())
        };
        let r = self.cfg.forcing.profile.factor(t);
        if r != 0.0 {
            out.axpy(r, &self.forcing);
        }
        Ok(out)
    }

    fn apply(factors: &[Complex64], f: &SpectralField) -> SpectralField {
        let coeffs = f.coeffs().iter().zip(factors).map(|(c, e)| c * e).collect();
        SpectralField::from_coeffs(f.truncation(), coeffs, f.is_real_field())
    }

    /// One integrating-factor RK4 step from `t` to `t + dt`.
    pub fn step(&self, w: &SpectralField, t: f64) -> Result<SpectralField> {
        let h = self.dt;
        let ew = Self::apply(&self.e_full, w);
        let e2w = Self::apply(&self.e_half, w);

        let k1 = self.rhs(w, t)?;
        let mut a = w.clone();
        a.axpy(0.5 * h, &k1);
        let a = Self::apply(&self.e_half, &a);
        let k2 = self.rhs(&a, t + 0.5 * h)?;

        let mut b = e2w;
        b.axpy(0.5 * h, &k2);
        let k3 = self.rhs(&b, t + 0.5 * h)?;

        let mut c = ew.clone();
        c.axpy(h, &Self::apply(&self.e_half, &k3));
        let k4 = self.rhs(&c, t + h)?;

        let mut k23 = k2;
        k23.axpy(1.0, &k3);
        let mut out = ew;
        out.axpy(h / 6.0, &Self::apply(&self.e_full, &k1));
        out.axpy(h / 3.0, &Self::apply(&self.e_half, &k23));
        out.axpy(h / 6.0, &k4);
        if out.is_real_field() {
            out.enforce_real_symmetry();
        }
        if !out.is_finite() {
            return Err(Error::BlowUp { t: t + h });
        }
        Ok(out)
    }

    pub fn step_count(&self) -> usize {
        let span = self.cfg.t_end - self.cfg.t_start;
        ((span / self.dt) - 1e-9).ceil().max(0.0) as usize
    }

    /// Integrates from the configured initial condition.
    pub fn run(&self) -> std::result::Result<TrajectoryRecord, RunFailure> {
        let w0 = self.initial_state().map_err(|error| RunFailure {
            partial: self.empty_record(SpectralField::zeros(self.cfg.truncation, true)),
            error,
        })?;
        self.run_from(w0, false)
    }

    fn empty_record(&self, state: SpectralField) -> TrajectoryRecord {
        TrajectoryRecord {
            rows: Vec::new(),
            states: Vec::new(),
            final_state: state,
            final_time: self.cfg.t_start,
            steps: 0,
            dt: self.dt,
        }
    }

    /// Integrates from `w0` over `[t_start, t_end]`, recording every
    /// `record_every` steps and at the end. With `keep_states` the recorded
    /// states are kept as well.
    pub fn run_from(&self, w0: SpectralField, keep_states: bool) -> std::result::Result<TrajectoryRecord, RunFailure> {
        let n = self.step_count();
        let t0 = self.cfg.t_start;
        let mut rec = self.empty_record(w0.clone());
        let mut w = w0;
        let push = |rec: &mut TrajectoryRecord, t: f64, w: &SpectralField| {
            rec.rows.push(RecordRow::from_state(t, w));
            if keep_states {
                rec.states.push((t, w.clone()));
            }
        };
        push(&mut rec, t0, &w);
        for i in 0..n {
            let t = t0 + i as f64 * self.dt;
            match self.step(&w, t) {
                Ok(next) => w = next,
                Err(error) => {
                    rec.final_state = w;
                    rec.final_time = t;
                    rec.steps = i;
                    return Err(RunFailure { partial: rec, error });
                }
            }
            let done = i + 1;
            if done % self.cfg.record_every == 0 || done == n {
                push(&mut rec, t0 + done as f64 * self.dt, &w);
            }
        }
        rec.final_time = t0 + n as f64 * self.dt;
        rec.final_state = w;
        rec.steps = n;
        Ok(rec)
    }
}

/// Two trajectories advanced in lockstep, with their L² distance at every
/// record time.
#[derive(Clone, Debug)]
pub struct PairRecord {
    pub distance: Vec<(f64, f64)>,
    pub a: TrajectoryRecord,
    pub b: TrajectoryRecord,
}

impl PairRecord {
    pub fn final_distance(&self) -> f64 {
        self.distance.last().map_or(0.0, |d| d.1)
    }

    /// First record time at which the distance is below `threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<f64> {
        self.distance.iter().find(|d| d.1 < threshold).map(|d| d.0)
    }
}

/// Runs two solvers with identical time grids side by side from their
/// configured initial conditions.
pub fn run_pair(a: &Solver, b: &Solver) -> Result<PairRecord> {
    if a.dt != b.dt || a.cfg.t_start != b.cfg.t_start || a.cfg.t_end != b.cfg.t_end || a.cfg.record_every != b.cfg.record_every
    {
        return Err(Error::Config("paired runs need the same time grid".into()));
    }
    let mut wa = a.initial_state()?;
    let mut wb = b.initial_state()?;
    let n = a.step_count();
    let t0 = a.cfg.t_start;
    let mut ra = a.empty_record(wa.clone());
    let mut rb = b.empty_record(wb.clone());
    let mut dist = Vec::new();
    let mut record = |t: f64, wa: &SpectralField, wb: &SpectralField, ra: &mut TrajectoryRecord, rb: &mut TrajectoryRecord| -> Result<()> {
        ra.rows.push(RecordRow::from_state(t, wa));
        rb.rows.push(RecordRow::from_state(t, wb));
        dist.push((t, distance(wa, wb, 0.0)?));
        Ok(())
    };
    record(t0, &wa, &wb, &mut ra, &mut rb)?;
    for i in 0..n {
        let t = t0 + i as f64 * a.dt;
        let (na, nb) = rayon::join(|| a.step(&wa, t), || b.step(&wb, t));
        wa = na?;
        wb = nb?;
        let done = i + 1;
        if done % a.cfg.record_every == 0 || done == n {
            record(t0 + done as f64 * a.dt, &wa, &wb, &mut ra, &mut rb)?;
        }
    }
    for (r, w) in [(&mut ra, wa), (&mut rb, wb)] {
        r.final_time = t0 + n as f64 * a.dt;
        r.final_state = w;
        r.steps = n;
    }
    Ok(PairRecord { distance: dist, a: ra, b: rb })
}

/// Serializes as a number, or `"inf"` for the no-rotation sentinel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Epsilon(#[serde(with = "epsilon_format")] pub f64);

/// `(Σ (k(k+1))ˢ |a_k - b_k|²)^{1/2}`.
pub fn distance(a: &SpectralField, b: &SpectralField, s: f64) -> Result<f64> {
    a.check_same_truncation(b)?;
    Ok(sobolev_norm_sq(&(a - b), s).sqrt())
}
