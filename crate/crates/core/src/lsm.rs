//! Liquid state machines over refractory spike trains.
//!
//! A decay filter maps a spike train `u` to
//! `(B u)_t = Σ_{s ∈ u, s <= t} b(s - t) e^{s - t}`, the delta-train form of
//! the exponential-decay integral. The kernel is read on the lag `s - t`, so
//! the filter is time invariant; at `t = 0` the lag is the spike time itself.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rng::Rng;
use crate::signals::FadingFunction;

/// Strictly increasing spike times in `[-horizon, 0]` with gaps above the
/// refractory period.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrain {
    times: Vec<f64>,
    refractory: f64,
    horizon: f64,
}

pub fn validate_spike_train(times: Vec<f64>, refractory: f64, horizon: f64) -> Result<SpikeTrain> {
    if !(refractory > 0.0 && refractory.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "refractory period must be positive, got {refractory}"
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if let Some(&t) = times.iter().find(|&&t| !(t <= 0.0 && t >= -horizon)) {
        return Err(Error::OutOfRange(format!(
            "spike at {t} lies outside [-{horizon}, 0]"
        )));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[1] - w[0] > refractory)) {
        return Err(Error::Refractory {
            earlier: w[0],
            later: w[1],
            refractory,
        });
    }
    Ok(SpikeTrain {
        times,
        refractory,
        horizon,
    })
}

impl SpikeTrain {
    pub fn new(times: Vec<f64>, refractory: f64, horizon: f64) -> Result<Self> {
        validate_spike_train(times, refractory, horizon)
    }

    pub fn empty(refractory: f64, horizon: f64) -> Result<Self> {
        validate_spike_train(Vec::new(), refractory, horizon)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn refractory(&self) -> f64 {
        self.refractory
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Every spike moved by `delta`, keeping refractory period and horizon.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        validate_spike_train(
            self.times.iter().map(|t| t + delta).collect(),
            self.refractory,
            self.horizon,
        )
    }

    /// Seeded train: each slot of width `slot` (which must exceed the
    /// refractory period) holds at most one spike, placed uniformly in the
    /// middle half of the slot with probability `rate`.
    pub fn random(
        rng: &mut Rng,
        refractory: f64,
        horizon: f64,
        slot: f64,
        rate: f64,
    ) -> Result<Self> {
        if slot <= 2.0 * refractory {
            return Err(Error::Invalid(format!(
                "slot width {slot} must exceed twice the refractory period {refractory}"
            )));
        }
        let slots = (horizon / slot).floor() as usize;
        let mut times = Vec::new();
        for k in (0..slots).rev() {
            if rng.random::<f64>() < rate {
                let start = -((k + 1) as f64) * slot;
                times.push(start + slot * rng.random_range(0.25..0.75));
            }
        }
        validate_spike_train(times, refractory, horizon)
    }

    /// `# delta=<Δ> horizon=<T_h>` followed by one spike time per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("# delta={} horizon={}\n", self.refractory, self.horizon);
        for t in &self.times {
            let _ = writeln!(s, "{t}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty spike file".into()))?;
        let rest = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("line 1: expected `# delta=<Δ> horizon=<T_h>`".into()))?;
        let (mut delta, mut horizon) = (None, None);
        for field in rest.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line 1: malformed field `{field}`")))?;
            let value: f64 = value
                .parse()
                .map_err(|e| Error::Parse(format!("line 1: {key}: {e}")))?;
            match key {
                "delta" => delta = Some(value),
                "horizon" => horizon = Some(value),
                _ => return Err(Error::Parse(format!("line 1: unknown field `{key}`"))),
            }
        }
        let delta = delta.ok_or_else(|| Error::Parse("line 1: missing delta".into()))?;
        let horizon = horizon.ok_or_else(|| Error::Parse("line 1: missing horizon".into()))?;
        let mut times = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            times.push(
                line.parse()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?,
            );
        }
        validate_spike_train(times, delta, horizon)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// Bounded kernel `b` of a decay filter, evaluated on the lag `s - t <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    Constant {
        value: f64,
    },
    /// `amplitude · cos(freq · lag + phase)`.
    Cosine {
        freq: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Piecewise-linear through `(lag, value)` knots sorted by lag, held
    /// constant outside.
    Table {
        knots: Vec<(f64, f64)>,
    },
}

fn one() -> f64 {
    1.0
}

impl Kernel {
    pub fn eval(&self, lag: f64) -> f64 {
        match self {
            Kernel::Constant { value } => *value,
            Kernel::Cosine {
                freq,
                amplitude,
                phase,
            } => amplitude * (freq * lag + phase).cos(),
            Kernel::Table { knots } => {
                let (first, last) = match (knots.first(), knots.last()) {
                    (Some(f), Some(l)) => (f, l),
                    _ => return 0.0,
                };
                if lag <= first.0 {
                    return first.1;
                }
                if lag >= last.0 {
                    return last.1;
                }
                let i = knots.partition_point(|k| k.0 <= lag);
                let (a, b) = (knots[i - 1], knots[i]);
                a.1 + (lag - a.0) / (b.0 - a.0) * (b.1 - a.1)
            }
        }
    }

    /// `‖b‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Kernel::Constant { value } => value.abs(),
            Kernel::Cosine { amplitude, .. } => amplitude.abs(),
            Kernel::Table { knots } => knots.iter().fold(0.0, |m, k| m.max(k.1.abs())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFilter {
    pub kernel: Kernel,
}

impl DecayFilter {
    pub fn new(kernel: Kernel) -> Result<Self> {
        if let Kernel::Table { knots } = &kernel {
            if knots.is_empty() || knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::Invalid(
                    "table kernel needs knots with strictly increasing lags".into(),
                ));
            }
        }
        Ok(Self { kernel })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            kernel: Kernel::Constant { value },
        }
    }

    pub fn cosine(freq: f64, phase: f64) -> Self {
        Self {
            kernel: Kernel::Cosine {
                freq,
                amplitude: 1.0,
                phase,
            },
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.kernel.sup_norm()
    }

    pub fn eval(&self, u: &SpikeTrain, t: f64) -> f64 {
        u.times
            .iter()
            .take_while(|&&s| s <= t)
            .map(|&s| {
                let lag = s - t;
                self.kernel.eval(lag) * lag.exp()
            })
            .sum()
    }
}

pub fn decay_filter_eval(u: &SpikeTrain, b: &DecayFilter, t: f64) -> f64 {
    b.eval(u, t)
}

/// Half-width of the triangular bump placed on each spike.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpWidth {
    /// `min(1, Δ/2)`: bumps of one train never overlap.
    #[default]
    HalfRefractory,
    /// Support radius 1 regardless of Δ.
    Unit,
}

impl BumpWidth {
    pub fn half_width(self, refractory: f64) -> f64 {
        match self {
            BumpWidth::HalfRefractory => (refractory / 2.0).min(1.0),
            BumpWidth::Unit => 1.0,
        }
    }
}

/// Samples of a function on the uniform grid `t_k = -(n - k)·dt`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl SampledSignal {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.values.len() - 1;
        (0..=n).map(move |k| -((n - k) as f64) * self.dt)
    }

    /// Value at grid time `t`, when `t` is a grid point.
    pub fn at(&self, t: f64) -> Option<f64> {
        let n = self.values.len() - 1;
        let steps = -t / self.dt;
        let k = steps.round();
        ((steps - k).abs() < 1e-9 && k >= 0.0 && (k as usize) <= n)
            .then(|| self.values[n - k as usize])
    }
}

/// Grid and bump choices for smoothing and for `d^c_ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct Smoothing {
    pub dt: f64,
    pub bump: BumpWidth,
}

impl Smoothing {
    /// `dt = Δ/10` with non-overlapping bumps.
    pub fn for_refractory(refractory: f64) -> Self {
        Self {
            dt: refractory / 10.0,
            bump: BumpWidth::default(),
        }
    }

    fn grid_len(&self, horizon: f64) -> Result<usize> {
        if !(self.dt > 0.0) {
            return Err(Error::GridMismatch(format!(
                "step must be positive, got {}",
                self.dt
            )));
        }
        let n = horizon / self.dt;
        let rounded = n.round();
        if (n - rounded).abs() > 1e-9 * n.max(1.0) {
            return Err(Error::GridMismatch(format!(
                "horizon {horizon} is not a multiple of the step {}",
                self.dt
            )));
        }
        Ok(rounded as usize)
    }

    /// `f_u(t) = Σ_s T_s(t)` with triangular bumps.
    pub fn bump_sum(&self, u: &SpikeTrain, t: f64) -> f64 {
        let w = self.bump.half_width(u.refractory);
        u.times
            .iter()
            .map(|&s| (1.0 - (t - s).abs() / w).max(0.0))
            .sum()
    }

    pub fn smooth(&self, u: &SpikeTrain) -> Result<SampledSignal> {
        if self.dt > u.refractory / 4.0 {
            return Err(Error::GridMismatch(format!(
                "step {} does not resolve bumps for refractory period {}",
                self.dt, u.refractory
            )));
        }
        let n = self.grid_len(u.horizon)?;
        let values = (0..=n)
            .map(|k| self.bump_sum(u, -((n - k) as f64) * self.dt))
            .collect();
        Ok(SampledSignal {
            dt: self.dt,
            values,
        })
    }

    /// Trapezoidal `∫_{-T_h}^0 |f_u - f_v| ω dt`.
    pub fn distance(&self, u: &SpikeTrain, v: &SpikeTrain, omega: &FadingFunction) -> Result<f64> {
        if u.horizon != v.horizon || u.refractory != v.refractory {
            return Err(Error::GridMismatch(format!(
                "trains with (Δ, T_h) = ({}, {}) and ({}, {})",
                u.refractory, u.horizon, v.refractory, v.horizon
            )));
        }
        let fu = self.smooth(u)?;
        let fv = self.smooth(v)?;
        let n = fu.values.len() - 1;
        let integrand = |k: usize| {
            (fu.values[k] - fv.values[k]).abs() * omega.weight_at(-((n - k) as f64) * self.dt)
        };
        let mut acc = 0.5 * (integrand(0) + integrand(n));
        for k in 1..n {
            acc += integrand(k);
        }
        Ok(acc * self.dt)
    }
}

pub fn smooth_spike_train(u: &SpikeTrain) -> Result<SampledSignal> {
    Smoothing::for_refractory(u.refractory).smooth(u)
}

/// `d^c_ω` with the default grid.
pub fn spike_distance(u: &SpikeTrain, v: &SpikeTrain, omega: &FadingFunction) -> Result<f64> {
    Smoothing::for_refractory(u.refractory).distance(u, v, omega)
}

/// Decay filters read out by a polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsmSystem {
    pub filters: Vec<DecayFilter>,
    pub readout: Polynomial,
    pub dt: f64,
}

impl LsmSystem {
    pub fn new(filters: Vec<DecayFilter>, readout: Polynomial, dt: f64) -> Result<Self> {
        if filters.is_empty() {
            return Err(Error::Dimension("an LSM needs at least one filter".into()));
        }
        if readout.nvars() != filters.len() {
            return Err(Error::Dimension(format!(
                "readout has {} variables for {} filters",
                readout.nvars(),
                filters.len()
            )));
        }
        if !(dt > 0.0) {
            return Err(Error::OutOfRange(format!(
                "sample step must be positive, got {dt}"
            )));
        }
        Ok(Self {
            filters,
            readout,
            dt,
        })
    }

    /// Filter outputs at time `t`.
    pub fn state(&self, u: &SpikeTrain, t: f64) -> Vec<f64> {
        self.filters.iter().map(|b| b.eval(u, t)).collect()
    }

    /// Readout at each requested time.
    pub fn run(&self, u: &SpikeTrain, times: &[f64]) -> Result<Vec<f64>> {
        if let Some(&t) = times.iter().find(|&&t| !(t <= 0.0 && t >= -u.horizon)) {
            return Err(Error::OutOfRange(format!(
                "sample time {t} outside [-{}, 0]",
                u.horizon
            )));
        }
        Ok(times
            .iter()
            .map(|&t| self.readout.eval(&self.state(u, t)))
            .collect())
    }

    /// Readout on the grid `-T_h, -T_h + dt, ..., 0`.
    pub fn run_on_grid(&self, u: &SpikeTrain) -> Result<Vec<f64>> {
        let n = (u.horizon / self.dt).floor() as usize;
        let times: Vec<f64> = (0..=n).map(|k| -((n - k) as f64) * self.dt).collect();
        self.run(u, &times)
    }
}

pub fn run_lsm(sys: &LsmSystem, u: &SpikeTrain, times: &[f64]) -> Result<Vec<f64>> {
    sys.run(u, times)
}

/// A kernel whose filter tells `u` and `v` apart at `t = 0`, with the gap it
/// achieves. `None` when the trains coincide.
pub fn separation_witness(u: &SpikeTrain, v: &SpikeTrain) -> Option<(DecayFilter, f64)> {
    if u.times == v.times {
        return None;
    }
    let scale = u
        .times
        .iter()
        .chain(&v.times)
        .map(|s| s.exp())
        .fold(0.0, f64::max);
    let tiny = 1e-12 * scale;
    let mut candidates = vec![DecayFilter::constant(1.0)];
    for i in 1..=64 {
        let freq = 0.37 * i as f64;
        candidates.push(DecayFilter::cosine(freq, 0.0));
        candidates.push(DecayFilter::cosine(freq, std::f64::consts::FRAC_PI_2));
    }
    candidates.into_iter().find_map(|b| {
        let gap = (b.eval(u, 0.0) - b.eval(v, 0.0)).abs();
        (gap > tiny).then_some((b, gap))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn refractory_validation() {
        assert!(SpikeTrain::new(vec![], 0.5, 50.0).is_ok());
        assert!(SpikeTrain::new(vec![-3.0, -1.0], 0.5, 50.0).is_ok());
        match SpikeTrain::new(vec![-1.0, -0.7], 0.5, 50.0) {
            Err(Error::Refractory { earlier, later, .. }) => {
                assert_eq!((earlier, later), (-1.0, -0.7));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(SpikeTrain::new(vec![-1.0, -2.0], 0.5, 50.0).is_err());
        assert!(SpikeTrain::new(vec![0.5], 0.5, 50.0).is_err());
        assert!(SpikeTrain::new(vec![-60.0], 0.5, 50.0).is_err());
        // Gap exactly equal to Δ violates u(t) + u(s) < 2 for |t - s| <= Δ.
        assert!(SpikeTrain::new(vec![-1.0, -0.5], 0.5, 50.0).is_err());
    }

    #[test]
    fn decay_filter_examples() {
        let b = DecayFilter::constant(1.0);
        let empty = SpikeTrain::empty(0.5, 50.0).unwrap();
        assert_eq!(b.eval(&empty, 0.0), 0.0);
        let one = SpikeTrain::new(vec![-2.0], 0.5, 50.0).unwrap();
        assert_eq!(b.eval(&one, -2.0), 1.0);
        let two = SpikeTrain::new(vec![-2.0, -1.0], 0.5, 50.0).unwrap();
        // e^{-2} + e^{-1}
        assert!((b.eval(&two, 0.0) - 0.503_214_724_408_055).abs() < 1e-14);
    }

    #[test]
    fn later_spikes_are_ignored() {
        let b = DecayFilter::cosine(1.3, 0.2);
        let u = SpikeTrain::new(vec![-5.0, -3.0], 0.5, 50.0).unwrap();
        let v = SpikeTrain::new(vec![-5.0, -3.0, -1.0], 0.5, 50.0).unwrap();
        assert_eq!(b.eval(&u, -2.0), b.eval(&v, -2.0));
    }

    #[test]
    fn table_kernel_interpolates() {
        let k = Kernel::Table {
            knots: vec![(-2.0, 0.0), (0.0, 2.0)],
        };
        assert_eq!(k.eval(-1.0), 1.0);
        assert_eq!(k.eval(-5.0), 0.0);
        assert_eq!(k.sup_norm(), 2.0);
        assert!(DecayFilter::new(Kernel::Table {
            knots: vec![(0.0, 1.0), (-1.0, 1.0)]
        })
        .is_err());
    }

    #[test]
    fn smoothing_examples() {
        let s = Smoothing::for_refractory(1.0);
        let empty = SpikeTrain::empty(1.0, 10.0).unwrap();
        assert!(s.smooth(&empty).unwrap().values.iter().all(|&v| v == 0.0));

        let one = SpikeTrain::new(vec![-2.0], 1.0, 10.0).unwrap();
        let f = s.smooth(&one).unwrap();
        assert_eq!(f.at(-2.0), Some(1.0));
        assert_eq!(f.at(-3.5), Some(0.0));

        let two = SpikeTrain::new(vec![-4.0, -1.0], 1.0, 10.0).unwrap();
        let f = s.smooth(&two).unwrap();
        for (t, v) in f.times().zip(&f.values) {
            let hat = |c: f64| (1.0 - (t - c).abs() / 0.5).max(0.0);
            assert!((v - (hat(-4.0) + hat(-1.0))).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn smoothing_requires_resolving_grid() {
        let u = SpikeTrain::new(vec![-1.0], 1.0, 10.0).unwrap();
        let coarse = Smoothing {
            dt: 0.5,
            bump: BumpWidth::HalfRefractory,
        };
        assert!(matches!(coarse.smooth(&u), Err(Error::GridMismatch(_))));
        let misaligned = Smoothing {
            dt: 0.15,
            bump: BumpWidth::HalfRefractory,
        };
        assert!(matches!(misaligned.smooth(&u), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn unit_bumps_use_radius_one() {
        let s = Smoothing {
            dt: 0.125,
            bump: BumpWidth::Unit,
        };
        let u = SpikeTrain::new(vec![-3.0], 0.5, 10.0).unwrap();
        assert_eq!(s.bump_sum(&u, -3.5), 0.5);
        assert_eq!(s.bump_sum(&u, -2.0), 0.0);
    }

    #[test]
    fn distance_examples() {
        let omega = FadingFunction::exponential(1.0).unwrap();
        let u = SpikeTrain::new(vec![-7.0, -2.0], 1.0, 20.0).unwrap();
        assert_eq!(spike_distance(&u, &u, &omega).unwrap(), 0.0);

        let e = SpikeTrain::empty(1.0, 20.0).unwrap();
        let near = SpikeTrain::new(vec![-1.0], 1.0, 20.0).unwrap();
        let far = SpikeTrain::new(vec![-10.0], 1.0, 20.0).unwrap();
        let d_near = spike_distance(&near, &e, &omega).unwrap();
        let d_far = spike_distance(&far, &e, &omega).unwrap();
        assert!(d_near > d_far);

        let other = SpikeTrain::new(vec![-1.0], 1.0, 30.0).unwrap();
        assert!(matches!(
            spike_distance(&near, &other, &omega),
            Err(Error::GridMismatch(_))
        ));
    }

    /// `∫ hat_w(t + T) e^{t} dt` in closed form.
    fn hat_exp_integral(center: f64, w: f64) -> f64 {
        // ∫_{-w}^{w} (1 - |x|/w) e^{x} dx = (e^{w} + e^{-w} - 2) / w
        center.exp() * (w.exp() + (-w).exp() - 2.0) / w
    }

    #[test]
    fn single_spike_distance_matches_closed_form() {
        let omega = FadingFunction::exponential(1.0).unwrap();
        let e = SpikeTrain::empty(1.0, 30.0).unwrap();
        for big_t in [2.0, 5.0, 10.0, 20.0] {
            let u = SpikeTrain::new(vec![-big_t], 1.0, 30.0).unwrap();
            let d = spike_distance(&u, &e, &omega).unwrap();
            let exact = hat_exp_integral(-big_t, 0.5);
            assert!(
                (d - exact).abs() <= 5e-3 * exact,
                "T = {big_t}: {d} vs {exact}"
            );
            assert!(d <= 0.5 * (1.0 - big_t).exp());
        }
    }

    #[test]
    fn lsm_examples() {
        let empty = SpikeTrain::empty(0.5, 20.0).unwrap();
        let readout = Polynomial::from_terms(2, [(0.25, vec![0, 0]), (1.0, vec![1, 1])]).unwrap();
        let sys = LsmSystem::new(
            vec![DecayFilter::constant(1.0), DecayFilter::cosine(1.0, 0.0)],
            readout,
            0.5,
        )
        .unwrap();
        assert!(sys.run_on_grid(&empty).unwrap().iter().all(|&y| y == 0.25));

        let mut rng = rng::stream(9, 0, 0);
        let u = SpikeTrain::random(&mut rng, 0.5, 20.0, 1.5, 0.6).unwrap();
        let times: Vec<f64> = (0..40).map(|k| -0.5 * k as f64).collect();
        let ident = LsmSystem::new(
            vec![DecayFilter::constant(1.0)],
            Polynomial::variable(1, 0).unwrap(),
            0.5,
        )
        .unwrap();
        let out = run_lsm(&ident, &u, &times).unwrap();
        for (t, y) in times.iter().zip(&out) {
            assert_eq!(*y, decay_filter_eval(&u, &DecayFilter::constant(1.0), *t));
        }

        let prod = LsmSystem::new(
            vec![DecayFilter::constant(1.0), DecayFilter::cosine(1.0, 0.0)],
            Polynomial::monomial(vec![1, 1], 1.0),
            0.5,
        )
        .unwrap();
        let out = run_lsm(&prod, &u, &times).unwrap();
        for (t, y) in times.iter().zip(&out) {
            let a = DecayFilter::constant(1.0).eval(&u, *t);
            let b = DecayFilter::cosine(1.0, 0.0).eval(&u, *t);
            assert!((y - a * b).abs() < 1e-12);
        }
        assert!(run_lsm(&prod, &u, &[1.0]).is_err());
    }

    #[test]
    fn witness_separates_distinct_trains() {
        let u = SpikeTrain::new(vec![-3.0, -1.0], 0.5, 20.0).unwrap();
        assert!(separation_witness(&u, &u).is_none());
        let v = SpikeTrain::new(vec![-3.0, -1.5], 0.5, 20.0).unwrap();
        let (_, gap) = separation_witness(&u, &v).unwrap();
        assert!(gap > 0.0);
    }

    #[test]
    fn spike_file_round_trip() {
        let u = SpikeTrain::new(vec![-3.25, -1.0], 0.5, 50.0).unwrap();
        let text = u.to_text();
        assert_eq!(text, "# delta=0.5 horizon=50\n-3.25\n-1\n");
        assert_eq!(SpikeTrain::parse(&text).unwrap(), u);
        assert!(SpikeTrain::parse("-1.0\n").is_err());
        assert!(matches!(
            SpikeTrain::parse("# delta=0.5 horizon=50\n-1.0\n-0.7\n"),
            Err(Error::Refractory { .. })
        ));
    }
}
