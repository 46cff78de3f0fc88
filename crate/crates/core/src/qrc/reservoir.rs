use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::channel::{apply_encoding, channel_matrix, Hamiltonian, HamiltonianSpec};
use super::pauli::check_qubits;
use super::state::{expected_trace_component, ReservoirVector};
use crate::error::{Error, Result};
use crate::rng;
use crate::signals::Orbit;

/// Tolerance on the trace component of states fed to a step.
pub const STATE_TRACE_TOL: f64 = 1e-10;

/// A qubit register reservoir `r_{t+1} = S_{u_t} U r_t` read out through its
/// single-`Z` components: `y = Σ w_l z^l + c`. The constant `c` extends the
/// strictly linear readout and defaults to zero.
#[derive(Debug, Clone)]
pub struct QrcSystem {
    n_qubits: usize,
    hamiltonian: HamiltonianSpec,
    weights: Vec<f64>,
    constant: f64,
    channel: DMatrix<f64>,
}

/// True nodes and outputs after the washout. Position `k` holds the state
/// reached after encoding input `k`.
#[derive(Debug, Clone)]
pub struct QrcRun {
    pub nodes: Orbit,
    pub outputs: Orbit,
}

impl QrcRun {
    /// `t,z1,...,zN,y`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let n = self.nodes.dim();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("z{i}")));
        header.push("y".into());
        w.write_record(&header)
            .map_err(|e| Error::Parse(e.to_string()))?;
        for ((t, z), y) in self
            .nodes
            .times()
            .zip(self.nodes.rows())
            .zip(self.outputs.rows())
        {
            let mut rec = vec![t.to_string()];
            rec.extend(z.iter().map(|v| v.to_string()));
            rec.push(y[0].to_string());
            w.write_record(&rec)
                .map_err(|e| Error::Parse(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn check_unit_interval(u: &Orbit) -> Result<()> {
    if u.dim() != 1 {
        return Err(Error::Dimension(format!(
            "quantum reservoirs take scalar inputs, got dimension {}",
            u.dim()
        )));
    }
    if let Some((t, x)) = u
        .times()
        .zip(u.as_flat())
        .find(|(_, x)| !(0.0..=1.0).contains(*x))
    {
        return Err(Error::OutOfRange(format!(
            "input {x} at t={t} outside [0, 1]"
        )));
    }
    Ok(())
}

impl QrcSystem {
    pub fn new(n_qubits: usize, hamiltonian: HamiltonianSpec, weights: Vec<f64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if weights.len() != n_qubits {
            return Err(Error::Dimension(format!(
                "{} readout weights for {n_qubits} qubits",
                weights.len()
            )));
        }
        let channel = channel_matrix(&hamiltonian, n_qubits)?;
        Ok(Self {
            n_qubits,
            hamiltonian,
            weights,
            constant: 0.0,
            channel,
        })
    }

    /// Random Ising register with the default field `h = 1` and `τ = 1`, and
    /// unit weights.
    pub fn random(n_qubits: usize, seed: u64, index: u64) -> Result<Self> {
        let mut rng = rng::stream(seed, rng::label::HAMILTONIAN, index);
        let spec = HamiltonianSpec::random_ising(n_qubits, 1.0, 1.0, &mut rng);
        Self::new(n_qubits, spec, vec![1.0; n_qubits])
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "{} readout weights for {} qubits",
                weights.len(),
                self.n_qubits
            )));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn with_constant(mut self, constant: f64) -> Self {
        self.constant = constant;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec {
        &self.hamiltonian
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn channel(&self) -> &DMatrix<f64> {
        &self.channel
    }

    pub fn readout(&self, nodes: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(nodes)
            .fold(self.constant, |acc, (w, z)| acc + w * z)
    }

    /// `r' = S_u U r`.
    pub fn step(&self, r: &ReservoirVector, u: f64) -> Result<ReservoirVector> {
        if r.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "{}-qubit state fed to a {}-qubit register",
                r.n_qubits(),
                self.n_qubits
            )));
        }
        let expected = expected_trace_component(self.n_qubits);
        if (r.trace_component() - expected).abs() > STATE_TRACE_TOL {
            return Err(Error::Trace {
                got: r.trace_component(),
                expected,
            });
        }
        let evolved = &self.channel * r.as_dvector();
        let mut next = ReservoirVector::new(self.n_qubits, evolved.as_slice().to_vec())?;
        apply_encoding(&mut next, u)?;
        Ok(next)
    }

    /// Every state visited from `ρ₀ = I / 2^N`, one per input sample.
    pub fn trajectory(&self, u: &Orbit) -> Result<Vec<ReservoirVector>> {
        check_unit_interval(u)?;
        let mut r = ReservoirVector::maximally_mixed(self.n_qubits)?;
        u.as_flat()
            .iter()
            .map(|&x| {
                r = self.step(&r, x)?;
                Ok(r.clone())
            })
            .collect()
    }

    pub fn run(&self, u: &Orbit, washout: usize) -> Result<QrcRun> {
        if washout >= u.len() {
            return Err(Error::Length(format!(
                "washout {washout} leaves nothing of an orbit of length {}",
                u.len()
            )));
        }
        let states = self.trajectory(u)?;
        let mut nodes = Vec::with_capacity((u.len() - washout) * self.n_qubits);
        let mut outputs = Vec::with_capacity(u.len() - washout);
        for r in &states[washout..] {
            let z = r.true_nodes();
            outputs.push(self.readout(&z));
            nodes.extend(z);
        }
        Ok(QrcRun {
            nodes: Orbit::from_flat(nodes, self.n_qubits, 1.0)?,
            outputs: Orbit::scalar_tight(outputs)?,
        })
    }
}

pub fn qrc_step(r: &ReservoirVector, u: f64, sys: &QrcSystem) -> Result<ReservoirVector> {
    sys.step(r, u)
}

pub fn run_qrc(sys: &QrcSystem, u: &Orbit, washout: usize) -> Result<QrcRun> {
    sys.run(u, washout)
}

/// Serialized register: qubit count, Ising couplings (or a seed to draw
/// them), evolution time and readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QrcDoc {
    pub n_qubits: usize,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub couplings: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub fields: Option<Vec<f64>>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_tau() -> f64 {
    1.0
}

impl QrcDoc {
    pub fn build(&self) -> Result<QrcSystem> {
        check_qubits(self.n_qubits)?;
        let n = self.n_qubits;
        let mut rng = rng::stream(self.seed, rng::label::HAMILTONIAN, 0);
        let (couplings, fields) =
            match HamiltonianSpec::random_ising(n, 1.0, self.tau, &mut rng).model {
                Hamiltonian::Ising { couplings, fields } => (couplings, fields),
                Hamiltonian::Dense { .. } => unreachable!("random_ising draws an Ising model"),
            };
        let spec = HamiltonianSpec {
            model: Hamiltonian::Ising {
                couplings: self.couplings.clone().unwrap_or(couplings),
                fields: self.fields.clone().unwrap_or(fields),
            },
            tau: self.tau,
        };
        let weights = self.weights.clone().unwrap_or_else(|| vec![1.0; n]);
        Ok(QrcSystem::new(n, spec, weights)?.with_constant(self.constant))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
    }
}

/// How a pair of multiplexed registers combines its outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultiplexReadout {
    /// `y₁ + λ y₂`.
    Sum(f64),
    /// `y₁ · y₂`.
    Product,
}

/// Uncoupled registers driven by the same input.
#[derive(Debug, Clone)]
pub struct MultiplexedSystem {
    pub registers: Vec<QrcSystem>,
    pub readout: MultiplexReadout,
}

/// Concatenated true nodes and the combined output.
#[derive(Debug, Clone)]
pub struct MultiplexedRun {
    pub nodes: Orbit,
    pub outputs: Orbit,
    pub register_outputs: Vec<Orbit>,
}

pub fn multiplex_sum(q1: QrcSystem, q2: QrcSystem, lambda: f64) -> MultiplexedSystem {
    MultiplexedSystem {
        registers: vec![q1, q2],
        readout: MultiplexReadout::Sum(lambda),
    }
}

pub fn multiplex_product(q1: QrcSystem, q2: QrcSystem) -> MultiplexedSystem {
    MultiplexedSystem {
        registers: vec![q1, q2],
        readout: MultiplexReadout::Product,
    }
}

/// True nodes of every register side by side, `z¹ … z^{N₁+…}`.
pub fn multiplexed_nodes(registers: &[QrcSystem], u: &Orbit, washout: usize) -> Result<Orbit> {
    let runs = registers
        .iter()
        .map(|q| q.run(u, washout))
        .collect::<Result<Vec<_>>>()?;
    concat_nodes(&runs)
}

pub fn concat_nodes(runs: &[QrcRun]) -> Result<Orbit> {
    let len = runs[0].nodes.len();
    let dim: usize = runs.iter().map(|r| r.nodes.dim()).sum();
    let mut data = Vec::with_capacity(len * dim);
    for k in 0..len {
        for r in runs {
            data.extend_from_slice(r.nodes.row(k));
        }
    }
    Orbit::from_flat(data, dim, 1.0)
}

impl MultiplexedSystem {
    pub fn run(&self, u: &Orbit, washout: usize) -> Result<MultiplexedRun> {
        if self.registers.is_empty() {
            return Err(Error::Dimension("no registers to multiplex".into()));
        }
        let runs = self
            .registers
            .iter()
            .map(|q| q.run(u, washout))
            .collect::<Result<Vec<_>>>()?;
        let outputs: Vec<f64> = (0..runs[0].outputs.len())
            .map(|k| {
                let ys = runs.iter().map(|r| r.outputs.value(k));
                match self.readout {
                    MultiplexReadout::Product => ys.product(),
                    MultiplexReadout::Sum(lambda) => ys
                        .enumerate()
                        .map(|(i, y)| if i == 0 { y } else { lambda * y })
                        .sum(),
                }
            })
            .collect();
        Ok(MultiplexedRun {
            nodes: concat_nodes(&runs)?,
            outputs: Orbit::scalar_tight(outputs)?,
            register_outputs: runs.into_iter().map(|r| r.outputs).collect(),
        })
    }
}
