use std::path::PathBuf;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::{feature_count, polynomial_features};
use super::ridge::{nrmse, ridge_train_multi};
use super::targets::TargetFilter;
use crate::error::{Error, Result};
use crate::esn::EsnBuilder;
use crate::lsm::{DecayFilter, SpikeTrain};
use crate::qrc::{HamiltonianSpec, QrcSystem};
use crate::rng::{self, label};
use crate::signals::Orbit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Esn,
    Qrc,
    Lsm,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Esn => "esn",
            Family::Qrc => "qrc",
            Family::Lsm => "lsm",
        }
    }
}

/// Training and test orbits. Random orbits are uniform on `[-K, K]` for the
/// classical families and on `[0, 1]` for quantum registers; input files
/// replace them and are used whole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSpec {
    pub train_len: usize,
    pub test_len: usize,
    pub washout: usize,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_input: Option<PathBuf>,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            train_len: 2000,
            test_len: 500,
            washout: 100,
            bound: 1.0,
            train_input: None,
            test_input: None,
        }
    }
}

/// Registers of `qubits` qubits with random Ising Hamiltonians. The ladder
/// counts registers; level `n` reuses the registers of every smaller level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QrcFamily {
    pub qubits: usize,
    pub tau: f64,
    pub field: f64,
}

impl Default for QrcFamily {
    fn default() -> Self {
        Self {
            qubits: 2,
            tau: 1.0,
            field: 1.0,
        }
    }
}

/// Decay-filter liquids sampled once per slot. The ladder counts filters:
/// a constant kernel, then cosine and sine kernels at multiples of
/// `base_frequency`. The input orbit fed to targets is the per-slot spike
/// indicator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LsmFamily {
    pub refractory: f64,
    pub slot: f64,
    pub rate: f64,
    pub base_frequency: f64,
}

impl Default for LsmFamily {
    fn default() -> Self {
        Self {
            refractory: 0.25,
            slot: 1.0,
            rate: 0.5,
            base_frequency: 0.5,
        }
    }
}

impl LsmFamily {
    pub fn filters(&self, count: usize) -> Vec<DecayFilter> {
        (0..count)
            .map(|i| match i {
                0 => DecayFilter::constant(1.0),
                _ => {
                    let freq = self.base_frequency * i.div_ceil(2) as f64;
                    let phase = if i % 2 == 1 {
                        0.0
                    } else {
                        std::f64::consts::FRAC_PI_2
                    };
                    DecayFilter::cosine(freq, phase)
                }
            })
            .collect()
    }
}

/// What a readout is fitted to.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSource {
    Filter(TargetFilter),
    /// The reservoir's own output: `x₁` for echo state networks, the summed
    /// unit-weight readout of all registers, or the constant-kernel filter.
    SelfRealizable,
}

/// A named target with an optional regularization override. In JSON this is
/// a target filter object, or `{"kind": "self_realizable"}`, plus the
/// optional `name` and `ridge` keys.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub name: String,
    pub ridge: Option<f64>,
    pub source: TargetSource,
}

impl TargetSpec {
    pub fn filter(name: &str, filter: TargetFilter) -> Self {
        Self {
            name: name.into(),
            ridge: None,
            source: TargetSource::Filter(filter),
        }
    }

    pub fn self_realizable(name: &str) -> Self {
        Self {
            name: name.into(),
            ridge: None,
            source: TargetSource::SelfRealizable,
        }
    }

    pub fn with_ridge(mut self, ridge: f64) -> Self {
        self.ridge = Some(ridge);
        self
    }
}

impl Serialize for TargetSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut value = match &self.source {
            TargetSource::Filter(f) => {
                serde_json::to_value(f).map_err(serde::ser::Error::custom)?
            }
            TargetSource::SelfRealizable => serde_json::json!({ "kind": "self_realizable" }),
        };
        let map = value.as_object_mut().expect("targets serialize to objects");
        map.insert("name".into(), self.name.clone().into());
        if let Some(r) = self.ridge {
            map.insert("ridge".into(), r.into());
        }
        value.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TargetSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let mut map = serde_json::Map::deserialize(d)?;
        let name = match map.remove("name") {
            None => None,
            Some(serde_json::Value::String(s)) => Some(s),
            Some(_) => return Err(D::Error::custom("target name must be a string")),
        };
        let ridge = match map.remove("ridge") {
            None => None,
            Some(v) => Some(
                v.as_f64()
                    .ok_or_else(|| D::Error::custom("target ridge must be a number"))?,
            ),
        };
        let kind = map
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| D::Error::missing_field("kind"))?
            .to_string();
        let source = if kind == "self_realizable" {
            if map.len() > 1 {
                return Err(D::Error::custom(
                    "self_realizable targets take no parameters",
                ));
            }
            TargetSource::SelfRealizable
        } else {
            TargetSource::Filter(
                TargetFilter::deserialize(serde_json::Value::Object(map))
                    .map_err(D::Error::custom)?,
            )
        };
        Ok(Self {
            name: name.unwrap_or(kind),
            ridge,
            source,
        })
    }
}

/// Run a single quantum register on an input orbit and record its
/// trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub system: crate::qrc::QrcDoc,
    /// Orbit CSV; a seeded uniform `[0, 1]` orbit of `length` samples when
    /// absent.
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default = "default_sim_len")]
    pub length: usize,
    #[serde(default)]
    pub washout: usize,
}

fn default_sim_len() -> usize {
    100
}

fn default_degree() -> usize {
    2
}

fn default_ridge() -> f64 {
    1e-6
}

fn default_repeats() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub family: Family,
    /// Reservoir sizes, register counts or filter counts, increasing.
    pub ladder: Vec<usize>,
    #[serde(default = "default_degree")]
    pub degree: usize,
    pub targets: Vec<TargetSpec>,
    #[serde(default)]
    pub data: DataSpec,
    #[serde(default = "default_ridge")]
    pub ridge: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub esn: EsnBuilder,
    #[serde(default)]
    pub qrc: QrcFamily,
    #[serde(default)]
    pub lsm: LsmFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulationSpec>,
}

impl ExperimentSpec {
    pub fn new(family: Family, ladder: Vec<usize>, targets: Vec<TargetSpec>) -> Self {
        Self {
            family,
            ladder,
            degree: default_degree(),
            targets,
            data: DataSpec::default(),
            ridge: default_ridge(),
            seed: 0,
            repeats: 1,
            esn: EsnBuilder::default(),
            qrc: QrcFamily::default(),
            lsm: LsmFamily::default(),
            simulate: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("{field}: {msg}")));
        if self.ladder.is_empty() {
            return bad("ladder", "must not be empty".into());
        }
        if self.ladder.windows(2).any(|w| w[1] <= w[0]) || self.ladder[0] == 0 {
            return bad(
                "ladder",
                format!("must be positive and increasing, got {:?}", self.ladder),
            );
        }
        if self.targets.is_empty() {
            return bad("targets", "must not be empty".into());
        }
        for (i, t) in self.targets.iter().enumerate() {
            if let TargetSource::Filter(f) = &t.source {
                f.validate()
                    .or_else(|e| bad(&format!("targets[{i}]"), e.to_string()))?;
            }
            if let Some(r) = t.ridge {
                if !(r >= 0.0 && r.is_finite()) {
                    return bad(
                        &format!("targets[{i}].ridge"),
                        format!("must be >= 0, got {r}"),
                    );
                }
            }
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return bad("ridge", format!("must be >= 0, got {}", self.ridge));
        }
        if self.repeats == 0 {
            return bad("repeats", "must be positive".into());
        }
        let d = &self.data;
        if d.train_input.is_none() && d.train_len == 0 || d.test_input.is_none() && d.test_len == 0
        {
            return bad("data", "train and test lengths must be positive".into());
        }
        if !(d.bound > 0.0 && d.bound.is_finite()) {
            return bad("data.bound", format!("must be positive, got {}", d.bound));
        }
        let features = feature_count(self.max_nodes(), self.degree);
        if features > super::features::MAX_FEATURES {
            return bad("degree", format!("{features} features exceed the limit"));
        }
        if self.family == Family::Lsm && self.lsm.slot <= 2.0 * self.lsm.refractory {
            return bad("lsm.slot", "must exceed twice the refractory period".into());
        }
        Ok(())
    }

    fn nodes_at(&self, level: usize) -> usize {
        match self.family {
            Family::Esn | Family::Lsm => level,
            Family::Qrc => level * self.qrc.qubits,
        }
    }

    fn max_nodes(&self) -> usize {
        self.ladder.last().map_or(0, |&l| self.nodes_at(l))
    }

    /// Every input file the spec refers to.
    pub fn input_paths(&self) -> Vec<(&'static str, &PathBuf)> {
        let mut out = Vec::new();
        if let Some(p) = &self.data.train_input {
            out.push(("data.train_input", p));
        }
        if let Some(p) = &self.data.test_input {
            out.push(("data.test_input", p));
        }
        if let Some(p) = self.simulate.as_ref().and_then(|s| s.input.as_ref()) {
            out.push(("simulate.input", p));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Capacity {
    /// Ladder value: state size, register count or filter count.
    pub size: usize,
    pub nodes: usize,
    pub degree: usize,
    pub features: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub family: Family,
    pub target: String,
    pub capacity: Capacity,
    pub repeat: usize,
    pub seed: u64,
    pub train_nrmse: f64,
    pub test_nrmse: f64,
    pub weight_norm: f64,
}

/// Node trajectories after the washout plus the reservoir's own output.
struct Drive {
    nodes: Orbit,
    own: Vec<f64>,
}

struct Split {
    train_input: Orbit,
    test_input: Orbit,
    /// Spike trains behind the indicator orbits, for liquids.
    trains: Option<(SpikeTrain, SpikeTrain)>,
}

fn load_or_draw(
    spec: &ExperimentSpec,
    path: &Option<PathBuf>,
    len: usize,
    seed: u64,
    which: u64,
) -> Result<Orbit> {
    if let Some(p) = path {
        return Orbit::load(p);
    }
    let total = len + spec.data.washout;
    let mut rng = rng::stream(seed, which, 0);
    match spec.family {
        Family::Esn => Orbit::random_uniform(&mut rng, total, 1, spec.data.bound),
        Family::Qrc => {
            let raw = Orbit::random_uniform(&mut rng, total, 1, 1.0)?;
            Orbit::scalar(raw.as_flat().iter().map(|x| 0.5 * (x + 1.0)).collect(), 1.0)
        }
        Family::Lsm => unreachable!("liquids draw spike trains"),
    }
}

fn draw_train(fam: &LsmFamily, len: usize, seed: u64, which: u64) -> Result<(SpikeTrain, Orbit)> {
    let mut rng = rng::stream(seed, which, 0);
    let horizon = len as f64 * fam.slot;
    let train = SpikeTrain::random(&mut rng, fam.refractory, horizon, fam.slot, fam.rate)?;
    let mut bins = vec![0.0; len];
    for &s in train.times() {
        // Slot j covers (-(j+1)·slot, -j·slot); sample k sits at -(len-1-k)·slot.
        let j = (-s / fam.slot).floor() as usize;
        if j < len {
            bins[len - 1 - j] = 1.0;
        }
    }
    Ok((train, Orbit::scalar(bins, 1.0)?))
}

fn split(spec: &ExperimentSpec, seed: u64) -> Result<Split> {
    let d = &spec.data;
    if spec.family == Family::Lsm {
        if d.train_input.is_some() || d.test_input.is_some() {
            return Err(Error::Config(
                "data: liquids do not take orbit input files".into(),
            ));
        }
        let (a, ua) = draw_train(&spec.lsm, d.train_len + d.washout, seed, label::TRAIN_DATA)?;
        let (b, ub) = draw_train(&spec.lsm, d.test_len + d.washout, seed, label::TEST_DATA)?;
        return Ok(Split {
            train_input: ua,
            test_input: ub,
            trains: Some((a, b)),
        });
    }
    Ok(Split {
        train_input: load_or_draw(spec, &d.train_input, d.train_len, seed, label::TRAIN_DATA)?,
        test_input: load_or_draw(spec, &d.test_input, d.test_len, seed, label::TEST_DATA)?,
        trains: None,
    })
}

/// Lags beyond which `e^{lag}` no longer changes a sum.
const LSM_MEMORY: f64 = 40.0;

fn drive_lsm(
    filters: &[DecayFilter],
    train: &SpikeTrain,
    len: usize,
    slot: f64,
    washout: usize,
) -> Result<Drive> {
    let times = train.times();
    let mut nodes = Vec::with_capacity((len - washout) * filters.len());
    let mut own = Vec::with_capacity(len - washout);
    let mut lo = 0;
    for k in washout..len {
        let t = -((len - 1 - k) as f64) * slot;
        while lo < times.len() && times[lo] < t - LSM_MEMORY {
            lo += 1;
        }
        let hi = times.partition_point(|&s| s <= t);
        for (i, b) in filters.iter().enumerate() {
            let x: f64 = times[lo..hi]
                .iter()
                .map(|&s| b.kernel.eval(s - t) * (s - t).exp())
                .sum();
            if i == 0 {
                own.push(x);
            }
            nodes.push(x);
        }
    }
    let bound = nodes.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    Ok(Drive {
        nodes: Orbit::from_flat(nodes, filters.len(), bound)?,
        own,
    })
}

fn registers(spec: &ExperimentSpec, count: usize, seed: u64) -> Result<Vec<QrcSystem>> {
    (0..count)
        .map(|j| {
            let mut rng = rng::stream(seed, label::RESERVOIR, j as u64);
            let h = HamiltonianSpec::random_ising(
                spec.qrc.qubits,
                spec.qrc.field,
                spec.qrc.tau,
                &mut rng,
            );
            QrcSystem::new(spec.qrc.qubits, h, vec![1.0; spec.qrc.qubits])
        })
        .collect()
}

fn drive(
    spec: &ExperimentSpec,
    level: usize,
    level_index: usize,
    seed: u64,
    data: &Split,
) -> Result<(Drive, Drive)> {
    let w = spec.data.washout;
    match spec.family {
        Family::Esn => {
            let builder = EsnBuilder {
                state_dim: level,
                input_dim: 1,
                ..spec.esn.clone()
            };
            let sys =
                builder.build(&mut rng::stream(seed, label::RESERVOIR, level_index as u64))?;
            let x0 = vec![0.0; level];
            let run = |u: &Orbit| -> Result<Drive> {
                let r = sys.run(u, w, &x0)?;
                Ok(Drive {
                    nodes: r.states,
                    own: r.outputs.as_flat().to_vec(),
                })
            };
            Ok((run(&data.train_input)?, run(&data.test_input)?))
        }
        Family::Qrc => {
            let regs = registers(spec, level, seed)?;
            let run = |u: &Orbit| -> Result<Drive> {
                let runs = regs
                    .iter()
                    .map(|q| q.run(u, w))
                    .collect::<Result<Vec<_>>>()?;
                let own = (0..runs[0].outputs.len())
                    .map(|k| runs.iter().map(|r| r.outputs.value(k)).sum())
                    .collect();
                Ok(Drive {
                    nodes: crate::qrc::concat_nodes(&runs)?,
                    own,
                })
            };
            Ok((run(&data.train_input)?, run(&data.test_input)?))
        }
        Family::Lsm => {
            let filters = spec.lsm.filters(level);
            let (a, b) = data
                .trains
                .as_ref()
                .expect("liquid splits carry spike trains");
            Ok((
                drive_lsm(&filters, a, data.train_input.len(), spec.lsm.slot, w)?,
                drive_lsm(&filters, b, data.test_input.len(), spec.lsm.slot, w)?,
            ))
        }
    }
}

fn feature_matrix(nodes: &Orbit, degree: usize) -> Result<DMatrix<f64>> {
    let m = nodes.len();
    let mut flat = Vec::new();
    for row in nodes.rows() {
        flat.extend(polynomial_features(row, degree)?);
    }
    let f = flat.len() / m.max(1);
    Ok(DMatrix::from_row_slice(m, f, &flat))
}

fn targets_for(spec: &ExperimentSpec, u: &Orbit, own: &[f64]) -> Result<Vec<Vec<f64>>> {
    let w = spec.data.washout;
    spec.targets
        .iter()
        .map(|t| match &t.source {
            TargetSource::Filter(f) => Ok(f.eval(u)?[w..].to_vec()),
            TargetSource::SelfRealizable => Ok(own.to_vec()),
        })
        .collect()
}

fn run_point(spec: &ExperimentSpec, level_index: usize, repeat: usize) -> Result<Vec<TrainReport>> {
    let seed = rng::derive_seed(spec.seed, repeat as u64);
    let level = spec.ladder[level_index];
    let data = split(spec, seed)?;
    for (what, u) in [("training", &data.train_input), ("test", &data.test_input)] {
        if u.len() <= spec.data.washout {
            return Err(Error::Length(format!(
                "{what} orbit of length {} does not outlast the washout {}",
                u.len(),
                spec.data.washout
            )));
        }
    }
    let (train, test) = drive(spec, level, level_index, seed, &data)?;
    let phi = feature_matrix(&train.nodes, spec.degree)?;
    let phi_test = feature_matrix(&test.nodes, spec.degree)?;
    let y_train = targets_for(spec, &data.train_input, &train.own)?;
    let y_test = targets_for(spec, &data.test_input, &test.own)?;

    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, t) in spec.targets.iter().enumerate() {
        let lambda = t.ridge.unwrap_or(spec.ridge);
        match groups
            .iter_mut()
            .find(|g| g.0.to_bits() == lambda.to_bits())
        {
            Some(g) => g.1.push(i),
            None => groups.push((lambda, vec![i])),
        }
    }
    let capacity = Capacity {
        size: level,
        nodes: train.nodes.dim(),
        degree: spec.degree,
        features: phi.ncols(),
    };
    let mut reports: Vec<Option<TrainReport>> = vec![None; spec.targets.len()];
    for (lambda, members) in groups {
        let y = DMatrix::from_fn(phi.nrows(), members.len(), |r, c| y_train[members[c]][r]);
        let fit = ridge_train_multi(&phi, &y, lambda)?;
        let pred_train = &phi * &fit.weights;
        let pred_test = &phi_test * &fit.weights;
        for (c, &i) in members.iter().enumerate() {
            let col = |m: &DMatrix<f64>| m.column(c).iter().copied().collect::<Vec<_>>();
            reports[i] = Some(TrainReport {
                family: spec.family,
                target: spec.targets[i].name.clone(),
                capacity: capacity.clone(),
                repeat,
                seed,
                train_nrmse: nrmse(&col(&pred_train), &y_train[i]),
                test_nrmse: nrmse(&col(&pred_test), &y_test[i]),
                weight_norm: fit.weights.column(c).norm(),
            });
        }
    }
    Ok(reports.into_iter().flatten().collect())
}

/// Every `(level, repeat)` pair of the ladder, one report per target, in
/// ladder, then repeat, then target order. Repeat `r` uses the seed
/// `derive_seed(spec.seed, r)` for its data and reservoirs.
pub fn approximation_experiment(spec: &ExperimentSpec) -> Result<Vec<TrainReport>> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = (0..spec.ladder.len())
        .flat_map(|i| (0..spec.repeats).map(move |r| (i, r)))
        .collect();
    let results: Vec<Result<Vec<TrainReport>>> = jobs
        .par_iter()
        .map(|&(i, r)| run_point(spec, i, r))
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Median test and train NRMSE over the repeats of one ladder point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub target: String,
    pub size: usize,
    pub features: usize,
    pub repeats: usize,
    pub median_train_nrmse: f64,
    pub median_test_nrmse: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// One summary per `(target, size)` in first-appearance order.
pub fn summarize(reports: &[TrainReport]) -> Vec<LevelSummary> {
    let mut keys: Vec<(String, usize)> = Vec::new();
    for r in reports {
        let k = (r.target.clone(), r.capacity.size);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(target, size)| {
            let group: Vec<&TrainReport> = reports
                .iter()
                .filter(|r| r.target == target && r.capacity.size == size)
                .collect();
            let test: Vec<f64> = group.iter().map(|r| r.test_nrmse).collect();
            let train: Vec<f64> = group.iter().map(|r| r.train_nrmse).collect();
            LevelSummary {
                features: group[0].capacity.features,
                repeats: group.len(),
                median_train_nrmse: median(&train),
                median_test_nrmse: median(&test),
                target,
                size,
            }
        })
        .collect()
}

/// True when the median test error never rises along the ladder.
pub fn is_non_increasing(summaries: &[LevelSummary], target: &str) -> bool {
    let medians: Vec<f64> = summaries
        .iter()
        .filter(|s| s.target == target)
        .map(|s| s.median_test_nrmse)
        .collect();
    medians.windows(2).all(|w| w[1] <= w[0])
}
