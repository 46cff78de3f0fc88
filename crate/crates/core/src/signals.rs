//! Time series, fading-memory metrics and the filter/functional duality.
//!
//! An [`Orbit`] is a finite window of a discrete-time signal whose last sample
//! sits at `t = 0`; position `k` of an orbit of length `L` is time
//! `t = k - (L - 1)`. Everything downstream (reservoirs, targets, metrics)
//! consumes orbits.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// A uniformly bounded multivariate time series ending at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    data: Vec<f64>,
    dim: usize,
    bound: f64,
}

impl Orbit {
    /// Builds an orbit from rows ordered oldest first, checking every
    /// component against `bound`.
    pub fn new(rows: Vec<Vec<f64>>, bound: f64) -> Result<Self> {
        let dim = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Length("an orbit needs at least one sample".into()))?;
        if let Some((k, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::Dimension(format!(
                "sample {k} has dimension {}, expected {dim}",
                row.len()
            )));
        }
        Self::from_flat(rows.into_iter().flatten().collect(), dim, bound)
    }

    /// Builds an orbit from row-major flat storage.
    pub fn from_flat(data: Vec<f64>, dim: usize, bound: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("orbit dimension must be positive".into()));
        }
        if data.is_empty() {
            return Err(Error::Length("an orbit needs at least one sample".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::Dimension(format!(
                "{} values do not split into rows of {dim}",
                data.len()
            )));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "bound must be positive, got {bound}"
            )));
        }
        let len = data.len() / dim;
        if let Some(pos) = data.iter().position(|x| !x.is_finite() || x.abs() > bound) {
            let t = (pos / dim) as i64 - (len as i64 - 1);
            return Err(Error::OutOfRange(format!(
                "component {} at t={t} is {} which exceeds the bound {bound}",
                pos % dim,
                data[pos]
            )));
        }
        Ok(Self { data, dim, bound })
    }

    /// Rows with the bound set to the largest magnitude present (or 1 for an
    /// all-zero orbit).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let bound = tight_bound(rows.iter().flatten().copied());
        Self::new(rows, bound)
    }

    /// A scalar orbit with the given bound.
    pub fn scalar(values: Vec<f64>, bound: f64) -> Result<Self> {
        Self::from_flat(values, 1, bound)
    }

    /// A scalar orbit whose bound is the largest magnitude present.
    pub fn scalar_tight(values: Vec<f64>) -> Result<Self> {
        let bound = tight_bound(values.iter().copied());
        Self::from_flat(values, 1, bound)
    }

    /// Seeded i.i.d. uniform samples in `[-bound, bound]`.
    pub fn random_uniform(rng: &mut rng::Rng, len: usize, dim: usize, bound: f64) -> Result<Self> {
        let data = (0..len * dim)
            .map(|_| rng.random_range(-bound..=bound))
            .collect();
        Self::from_flat(data, dim, bound)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Earliest time index, `-(L - 1)`.
    pub fn start(&self) -> i64 {
        -(self.len() as i64 - 1)
    }

    /// Sample at position `k` (oldest first).
    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    /// Sample at time `t <= 0`, if inside the window.
    pub fn at(&self, t: i64) -> Option<&[f64]> {
        let k = t - self.start();
        (t <= 0 && k >= 0).then(|| self.row(k as usize))
    }

    /// Scalar value at position `k`; reads component 0.
    pub fn value(&self, k: usize) -> f64 {
        self.data[k * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Time index of every position.
    pub fn times(&self) -> impl Iterator<Item = i64> {
        self.start()..=0
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// First component of every sample.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.rows().map(|r| r[c]).collect()
    }

    /// The window ending at position `k`, re-anchored so that `k` becomes
    /// `t = 0`.
    pub fn prefix(&self, k: usize) -> Orbit {
        Orbit {
            data: self.data[..(k + 1) * self.dim].to_vec(),
            dim: self.dim,
            bound: self.bound,
        }
    }

    /// Drops the first `n` samples.
    pub fn skip(&self, n: usize) -> Result<Orbit> {
        if n >= self.len() {
            return Err(Error::Length(format!(
                "cannot discard {n} samples of an orbit of length {}",
                self.len()
            )));
        }
        Ok(Orbit {
            data: self.data[n * self.dim..].to_vec(),
            dim: self.dim,
            bound: self.bound,
        })
    }

    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        let data = std::mem::take(&mut self.data);
        Self::from_flat(data, self.dim, bound)
    }

    /// Writes the `t,x1,...,xn` CSV form.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim).map(|i| format!("x{i}")));
        w.write_record(&header).map_err(csv_err)?;
        for (t, row) in self.times().zip(self.rows()) {
            let mut rec = vec![t.to_string()];
            rec.extend(row.iter().map(|x| x.to_string()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }

    /// Reads the `t,x1,...,xn` CSV form. Times must be consecutive and end at
    /// zero. The bound is the largest magnitude present.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let header = r.headers().map_err(csv_err)?.clone();
        if header.get(0) != Some("t") || header.len() < 2 {
            return Err(Error::Parse(
                "orbit CSV header must be `t,x1,...,xn`".into(),
            ));
        }
        for (i, name) in header.iter().skip(1).enumerate() {
            if name != format!("x{}", i + 1) {
                return Err(Error::Parse(format!(
                    "orbit CSV column {} is `{name}`, expected `x{}`",
                    i + 2,
                    i + 1
                )));
            }
        }
        let dim = header.len() - 1;
        let mut times = Vec::new();
        let mut data = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let lineno = line + 2;
            let field = |i: usize| -> Result<&str> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse(format!("line {lineno}: missing column {}", i + 1)))
            };
            let t: i64 = field(0)?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {lineno}: bad time: {e}")))?;
            times.push(t);
            for i in 1..=dim {
                let x: f64 = field(i)?
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("line {lineno}: bad value: {e}")))?;
                data.push(x);
            }
        }
        if times.last() != Some(&0) {
            return Err(Error::Parse("orbit CSV must end at t=0".into()));
        }
        if times.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::Parse(
                "orbit CSV times must be consecutive and ascending".into(),
            ));
        }
        let bound = tight_bound(data.iter().copied());
        Self::from_flat(data, dim, bound)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(f)
    }
}

fn tight_bound(values: impl Iterator<Item = f64>) -> f64 {
    let m = values.fold(0.0_f64, |m, x| m.max(x.abs()));
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// `(u^τ)_t = u_{t-τ}`, re-anchored so the last index is 0.
pub fn time_delay(u: &Orbit, tau: usize) -> Result<Orbit> {
    if tau >= u.len() {
        return Err(Error::Length(format!(
            "delay {tau} needs an orbit longer than {}",
            u.len()
        )));
    }
    Ok(u.prefix(u.len() - 1 - tau))
}

/// Weight function on non-positive times defining the fading metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FadingFunction {
    /// `ω(t) = e^{rate·t}`.
    #[serde(rename = "exp")]
    Exponential { rate: f64 },
    /// `ω(t) = (1 + |t|)^{-exponent}`.
    Power { exponent: f64 },
    /// `ω(0), ω(-1), ...`; extended geometrically past the end of the table.
    Table { values: Vec<f64> },
}

impl Default for FadingFunction {
    fn default() -> Self {
        FadingFunction::Exponential { rate: 0.1 }
    }
}

impl FadingFunction {
    pub fn exponential(rate: f64) -> Result<Self> {
        let f = FadingFunction::Exponential { rate };
        f.validate()?;
        Ok(f)
    }

    pub fn power(exponent: f64) -> Result<Self> {
        let f = FadingFunction::Power { exponent };
        f.validate()?;
        Ok(f)
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        let f = FadingFunction::Table { values };
        f.validate()?;
        Ok(f)
    }

    /// Checks ω(0) = 1, monotonicity and decay.
    pub fn validate(&self) -> Result<()> {
        match self {
            FadingFunction::Exponential { rate } if !(*rate > 0.0 && rate.is_finite()) => Err(
                Error::OutOfRange(format!("exponential rate must be positive, got {rate}")),
            ),
            FadingFunction::Power { exponent } if !(*exponent > 0.0 && exponent.is_finite()) => {
                Err(Error::OutOfRange(format!(
                    "power exponent must be positive, got {exponent}"
                )))
            }
            FadingFunction::Table { values } => {
                if values.first() != Some(&1.0) {
                    return Err(Error::Invalid("fading table must start with 1".into()));
                }
                if values.iter().any(|w| !(*w > 0.0 && *w <= 1.0)) {
                    return Err(Error::OutOfRange(
                        "fading table values must lie in (0, 1]".into(),
                    ));
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::Invalid(
                        "fading table must be non-increasing into the past".into(),
                    ));
                }
                if values.len() < 2 || values[values.len() - 1] >= 1.0 {
                    return Err(Error::Invalid("fading table must decay below 1".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `ω(t)` for `t <= 0`.
    pub fn weight(&self, t: i64) -> f64 {
        self.weight_at(t as f64)
    }

    /// `ω(t)` on continuous time, `t <= 0`.
    pub fn weight_at(&self, t: f64) -> f64 {
        let lag = (-t).max(0.0);
        match self {
            FadingFunction::Exponential { rate } => (-rate * lag).exp(),
            FadingFunction::Power { exponent } => (1.0 + lag).powf(-exponent),
            FadingFunction::Table { values } => {
                let last = values.len() - 1;
                let k = lag.floor() as usize;
                if k < last {
                    let frac = lag - k as f64;
                    values[k] + frac * (values[k + 1] - values[k])
                } else {
                    let ratio = values[last].powf(1.0 / last as f64);
                    values[last] * ratio.powf(lag - last as f64)
                }
            }
        }
    }
}

/// Max-norm of the difference of two equally sized samples.
fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// `d_ω(u, v) = sup_t |u_t - v_t|·ω(t)` over the shared window, with the
/// max-norm on samples.
pub fn fading_distance(u: &Orbit, v: &Orbit, omega: &FadingFunction) -> Result<f64> {
    if u.dim() != v.dim() || u.len() != v.len() {
        return Err(Error::Dimension(format!(
            "orbits of shape {}x{} and {}x{}",
            u.len(),
            u.dim(),
            v.len(),
            v.dim()
        )));
    }
    Ok(u.times()
        .zip(u.rows().zip(v.rows()))
        .map(|(t, (a, b))| max_abs_diff(a, b) * omega.weight(t))
        .fold(0.0, f64::max))
}

/// A map from orbits to equally long real sequences.
pub trait Filter {
    fn apply(&self, u: &Orbit) -> Result<Vec<f64>>;

    /// Output bound given the input bound.
    fn output_bound(&self, input_bound: f64) -> f64;

    fn is_causal(&self) -> bool {
        true
    }

    fn is_time_invariant(&self) -> bool {
        true
    }
}

/// A map from orbits to real numbers.
pub trait Functional {
    fn eval(&self, u: &Orbit) -> f64;
}

impl<F: Fn(&Orbit) -> f64> Functional for F {
    fn eval(&self, u: &Orbit) -> f64 {
        self(u)
    }
}

/// `H_B(u) = (B u)_0`.
#[derive(Debug, Clone)]
pub struct FilterFunctional<B>(pub B);

impl<B: Filter> Functional for FilterFunctional<B> {
    fn eval(&self, u: &Orbit) -> f64 {
        // A filter rejects only malformed orbits; those have no value at 0.
        match self.0.apply(u) {
            Ok(out) => out[out.len() - 1],
            Err(_) => f64::NAN,
        }
    }
}

/// `(B_H u)_t = H(u^{-t})`: the functional evaluated on each prefix.
#[derive(Debug, Clone)]
pub struct FunctionalFilter<H> {
    pub functional: H,
    pub bound: f64,
}

impl<H: Functional> Filter for FunctionalFilter<H> {
    fn apply(&self, u: &Orbit) -> Result<Vec<f64>> {
        Ok((0..u.len())
            .map(|k| self.functional.eval(&u.prefix(k)))
            .collect())
    }

    fn output_bound(&self, _input_bound: f64) -> f64 {
        self.bound
    }
}

pub fn filter_to_functional<B: Filter>(filter: B) -> FilterFunctional<B> {
    FilterFunctional(filter)
}

/// The filter of a functional. `bound` is the functional's bound on the input
/// class, which the filter inherits.
pub fn functional_to_filter<H: Functional>(functional: H, bound: f64) -> FunctionalFilter<H> {
    FunctionalFilter { functional, bound }
}

/// Causal, time-invariant scalar filters. Samples before the window start are
/// read as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BuiltinFilter {
    Identity,
    Delay {
        lag: usize,
    },
    MovingAverage {
        window: usize,
    },
    /// `y_t = (1 - a) Σ_k a^k u_{t-k}`.
    ExpSmoothing {
        decay: f64,
    },
    /// `y_t = u_t · u_{t-lag}`.
    LagProduct {
        lag: usize,
    },
}

impl BuiltinFilter {
    pub fn all_examples() -> Vec<BuiltinFilter> {
        vec![
            BuiltinFilter::Identity,
            BuiltinFilter::Delay { lag: 1 },
            BuiltinFilter::MovingAverage { window: 3 },
            BuiltinFilter::ExpSmoothing { decay: 0.5 },
            BuiltinFilter::LagProduct { lag: 2 },
        ]
    }
}

fn require_scalar(u: &Orbit) -> Result<()> {
    if u.dim() != 1 {
        return Err(Error::Dimension(format!(
            "scalar filter applied to an orbit of dimension {}",
            u.dim()
        )));
    }
    Ok(())
}

impl Filter for BuiltinFilter {
    fn apply(&self, u: &Orbit) -> Result<Vec<f64>> {
        require_scalar(u)?;
        let x = u.as_flat();
        let back = |k: usize, lag: usize| if k >= lag { x[k - lag] } else { 0.0 };
        let out = match *self {
            BuiltinFilter::Identity => x.to_vec(),
            BuiltinFilter::Delay { lag } => (0..x.len()).map(|k| back(k, lag)).collect(),
            BuiltinFilter::MovingAverage { window } => {
                if window == 0 {
                    return Err(Error::Invalid(
                        "moving average window must be positive".into(),
                    ));
                }
                (0..x.len())
                    .map(|k| (0..window).map(|j| back(k, j)).sum::<f64>() / window as f64)
                    .collect()
            }
            BuiltinFilter::ExpSmoothing { decay } => {
                if !(0.0..1.0).contains(&decay) {
                    return Err(Error::OutOfRange(format!(
                        "smoothing decay must lie in [0, 1), got {decay}"
                    )));
                }
                let mut acc = 0.0;
                x.iter()
                    .map(|&v| {
                        acc = decay * acc + (1.0 - decay) * v;
                        acc
                    })
                    .collect()
            }
            BuiltinFilter::LagProduct { lag } => {
                (0..x.len()).map(|k| x[k] * back(k, lag)).collect()
            }
        };
        Ok(out)
    }

    fn output_bound(&self, k: f64) -> f64 {
        match self {
            BuiltinFilter::LagProduct { .. } => k * k,
            _ => k,
        }
    }
}

/// One probed orbit pair: its fading distance and the functional gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusSample {
    pub distance: f64,
    pub gap: f64,
}

/// Empirical continuity table of a functional under `d_ω`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct FadingModulus {
    pub samples: Vec<ModulusSample>,
}

impl FadingModulus {
    /// Largest gap among pairs closer than `radius`.
    pub fn envelope(&self, radius: f64) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.distance <= radius)
            .map(|s| s.gap)
            .fold(0.0, f64::max)
    }

    /// A functional whose envelope at `radius` is still above `threshold`
    /// reacts to perturbations the metric considers negligible.
    pub fn is_slow_fading(&self, radius: f64, threshold: f64) -> bool {
        self.envelope(radius) > threshold
    }
}

/// Shape of the orbits used by [`estimate_fading_modulus`].
#[derive(Debug, Clone, Copy)]
pub struct ModulusProbe {
    pub length: usize,
    pub bound: f64,
}

impl Default for ModulusProbe {
    fn default() -> Self {
        Self {
            length: 32,
            bound: 1.0,
        }
    }
}

impl ModulusProbe {
    /// Pairs `(u, v)` that differ in one sample. The perturbed time sweeps the
    /// whole window so distances span from `2K` down to `2K·ω(-(L-1))`.
    pub fn run<H: Functional>(
        &self,
        functional: &H,
        omega: &FadingFunction,
        samples: usize,
        seed: u64,
    ) -> Result<FadingModulus> {
        if samples == 0 {
            return Err(Error::Invalid("at least one sample is required".into()));
        }
        if self.length == 0 {
            return Err(Error::Length("probe orbits need a positive length".into()));
        }
        let mut rng = rng::stream(seed, rng::label::PROBE, 0);
        let mut out = Vec::with_capacity(samples);
        for i in 0..samples {
            let u = Orbit::random_uniform(&mut rng, self.length, 1, self.bound)?;
            let k = (self.length - 1) - (i % self.length);
            let mut data = u.as_flat().to_vec();
            data[k] = rng.random_range(-self.bound..=self.bound);
            let v = Orbit::scalar(data, self.bound)?;
            out.push(ModulusSample {
                distance: fading_distance(&u, &v, omega)?,
                gap: (functional.eval(&u) - functional.eval(&v)).abs(),
            });
        }
        Ok(FadingModulus { samples: out })
    }
}

pub fn estimate_fading_modulus<H: Functional>(
    functional: &H,
    omega: &FadingFunction,
    samples: usize,
    seed: u64,
) -> Result<FadingModulus> {
    ModulusProbe::default().run(functional, omega, samples, seed)
}
