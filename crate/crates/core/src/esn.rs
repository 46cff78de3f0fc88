//! Echo state networks `x_{t+1} = σ(A x_t + B u_{t+1} + ξ)`, `y = p(x)`,
//! their echo-state checks and the direct-sum constructions that make their
//! functionals a polynomial algebra.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::Polynomial;
use crate::rng::Rng;
use crate::signals::Orbit;

/// Componentwise squashing nonlinearity with range `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Squash {
    #[default]
    Tanh,
    /// `clamp(x, -1, 1)`.
    ClippedLinear,
}

impl Squash {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Squash::Tanh => x.tanh(),
            Squash::ClippedLinear => x.clamp(-1.0, 1.0),
        }
    }

    /// Lipschitz constant.
    pub fn lipschitz(self) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsnSystem {
    coupling: DMatrix<f64>,
    input: DMatrix<f64>,
    bias: DVector<f64>,
    squash: Squash,
    readout: Polynomial,
}

/// Both contraction figures for a system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EspReport {
    /// `L·ρ(A)`.
    pub spectral_factor: f64,
    /// `L·‖A‖₂`, the guaranteed one-step contraction rate.
    pub operator_factor: f64,
}

impl EspReport {
    pub fn spectral_pass(&self) -> bool {
        self.spectral_factor < 1.0
    }

    pub fn contraction_pass(&self) -> bool {
        self.operator_factor < 1.0
    }

    /// `L·ρ(A) < 1 <= L·‖A‖₂`: the spectral criterion holds but a single step
    /// need not contract (non-normal `A`).
    pub fn spectral_only(&self) -> bool {
        self.spectral_pass() && !self.contraction_pass()
    }
}

/// States and outputs of a run after the washout.
#[derive(Debug, Clone)]
pub struct EsnRun {
    pub states: Orbit,
    pub outputs: Orbit,
}

impl EsnSystem {
    pub fn new(
        coupling: DMatrix<f64>,
        input: DMatrix<f64>,
        bias: DVector<f64>,
        squash: Squash,
        readout: Polynomial,
    ) -> Result<Self> {
        let n = coupling.nrows();
        if n == 0 || !coupling.is_square() {
            return Err(Error::Dimension(format!(
                "reservoir coupling must be square and non-empty, got {}x{}",
                coupling.nrows(),
                coupling.ncols()
            )));
        }
        if input.nrows() != n || input.ncols() == 0 {
            return Err(Error::Dimension(format!(
                "input weights are {}x{}, expected {n}xn with n >= 1",
                input.nrows(),
                input.ncols()
            )));
        }
        if bias.len() != n {
            return Err(Error::Dimension(format!(
                "bias has length {}, expected {n}",
                bias.len()
            )));
        }
        if readout.nvars() != n {
            return Err(Error::Dimension(format!(
                "readout has {} variables, expected {n}",
                readout.nvars()
            )));
        }
        if coupling
            .iter()
            .chain(input.iter())
            .chain(bias.iter())
            .any(|x| !x.is_finite())
        {
            return Err(Error::Invalid("non-finite reservoir parameter".into()));
        }
        Ok(Self {
            coupling,
            input,
            bias,
            squash,
            readout,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.coupling.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.input.ncols()
    }

    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.coupling
    }

    pub fn input_weights(&self) -> &DMatrix<f64> {
        &self.input
    }

    pub fn bias(&self) -> &DVector<f64> {
        &self.bias
    }

    pub fn squash(&self) -> Squash {
        self.squash
    }

    pub fn readout(&self) -> &Polynomial {
        &self.readout
    }

    pub fn lipschitz(&self) -> f64 {
        self.squash.lipschitz()
    }

    pub fn with_readout(mut self, readout: Polynomial) -> Result<Self> {
        if readout.nvars() != self.state_dim() {
            return Err(Error::Dimension(format!(
                "readout has {} variables, expected {}",
                readout.nvars(),
                self.state_dim()
            )));
        }
        self.readout = readout;
        Ok(self)
    }

    pub fn esp_report(&self) -> Result<EspReport> {
        let l = self.lipschitz();
        Ok(EspReport {
            spectral_factor: l * linalg::spectral_radius(&self.coupling)?,
            operator_factor: l * linalg::operator_norm(&self.coupling)?,
        })
    }

    /// `σ(A x + B u + ξ)`.
    pub fn step(&self, x: &[f64], u: &[f64]) -> Result<DVector<f64>> {
        let n = self.state_dim();
        if x.len() != n || u.len() != self.input_dim() {
            return Err(Error::Dimension(format!(
                "state of length {} and input of length {} for a {n}-node, {}-input system",
                x.len(),
                u.len(),
                self.input_dim()
            )));
        }
        let mut out = DVector::zeros(n);
        self.step_into(x, u, out.as_mut_slice());
        Ok(out)
    }

    fn step_into(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, xj) in x.iter().enumerate() {
                acc += self.coupling[(i, j)] * xj;
            }
            for (j, uj) in u.iter().enumerate() {
                acc += self.input[(i, j)] * uj;
            }
            *o = self.squash.apply(acc + self.bias[i]);
        }
    }

    /// Drives the reservoir from `x0` over every sample of `u`, then drops the
    /// first `washout` states. Output `k` is the readout of the state reached
    /// after consuming input `k`.
    pub fn run(&self, u: &Orbit, washout: usize, x0: &[f64]) -> Result<EsnRun> {
        let n = self.state_dim();
        if u.dim() != self.input_dim() {
            return Err(Error::Dimension(format!(
                "input orbit has dimension {}, system expects {}",
                u.dim(),
                self.input_dim()
            )));
        }
        if x0.len() != n {
            return Err(Error::Dimension(format!(
                "initial state length {}, expected {n}",
                x0.len()
            )));
        }
        if washout >= u.len() {
            return Err(Error::Length(format!(
                "washout {washout} leaves nothing of an orbit of length {}",
                u.len()
            )));
        }
        let kept = u.len() - washout;
        let mut states = Vec::with_capacity(kept * n);
        let mut outputs = Vec::with_capacity(kept);
        let mut x = x0.to_vec();
        let mut next = vec![0.0; n];
        for (k, uk) in u.rows().enumerate() {
            self.step_into(&x, uk, &mut next);
            std::mem::swap(&mut x, &mut next);
            if k >= washout {
                states.extend_from_slice(&x);
                outputs.push(self.readout.eval(&x));
            }
        }
        Ok(EsnRun {
            states: Orbit::from_flat(states, n, 1.0)?,
            outputs: Orbit::scalar_tight(outputs)?,
        })
    }

    /// Euclidean distance between two trajectories driven by the same input;
    /// entry 0 is the initial distance, entry `k` the distance after `k`
    /// steps.
    pub fn convergence_trace(&self, u: &Orbit, x0a: &[f64], x0b: &[f64]) -> Result<Vec<f64>> {
        let n = self.state_dim();
        if x0a.len() != n || x0b.len() != n {
            return Err(Error::Dimension(
                "initial states do not match the reservoir".into(),
            ));
        }
        if u.dim() != self.input_dim() {
            return Err(Error::Dimension(
                "input orbit does not match the system".into(),
            ));
        }
        let dist = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt()
        };
        let (mut a, mut b) = (x0a.to_vec(), x0b.to_vec());
        let (mut na, mut nb) = (vec![0.0; n], vec![0.0; n]);
        let mut out = Vec::with_capacity(u.len() + 1);
        out.push(dist(&a, &b));
        for uk in u.rows() {
            self.step_into(&a, uk, &mut na);
            self.step_into(&b, uk, &mut nb);
            std::mem::swap(&mut a, &mut na);
            std::mem::swap(&mut b, &mut nb);
            out.push(dist(&a, &b));
        }
        Ok(out)
    }

    /// `max(100, ⌈10 / -ln r⌉)` with `r = L·‖A‖₂`; 100 when `r >= 1`.
    pub fn default_washout(&self) -> Result<usize> {
        let r = self.esp_report()?.operator_factor;
        if r > 0.0 && r < 1.0 {
            Ok(100.max((10.0 / -r.ln()).ceil() as usize))
        } else {
            Ok(100)
        }
    }
}

pub fn spectral_radius(a: &DMatrix<f64>) -> Result<f64> {
    linalg::spectral_radius(a)
}

/// `L·ρ(A) < 1`, strictly.
pub fn check_esp_condition(sys: &EsnSystem) -> Result<bool> {
    Ok(sys.esp_report()?.spectral_pass())
}

pub fn esn_step(x: &[f64], u: &[f64], sys: &EsnSystem) -> Result<DVector<f64>> {
    sys.step(x, u)
}

/// Runs `sys`, warning when the echo state condition does not hold.
pub fn run_esn(sys: &EsnSystem, u: &Orbit, washout: usize, x0: &[f64]) -> Result<EsnRun> {
    if u.is_empty() {
        return Err(Error::Length("empty input orbit".into()));
    }
    if !check_esp_condition(sys)? {
        log::warn!("running an ESN with L·ρ(A) >= 1; outputs may depend on the initial state");
    }
    sys.run(u, washout, x0)
}

pub fn esp_convergence_test(
    sys: &EsnSystem,
    u: &Orbit,
    x0a: &[f64],
    x0b: &[f64],
) -> Result<Vec<f64>> {
    sys.convergence_trace(u, x0a, x0b)
}

fn direct_sum_parts(
    s1: &EsnSystem,
    s2: &EsnSystem,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DVector<f64>)> {
    if s1.input_dim() != s2.input_dim() {
        return Err(Error::Dimension(format!(
            "systems take inputs of dimension {} and {}",
            s1.input_dim(),
            s2.input_dim()
        )));
    }
    if s1.squash != s2.squash {
        return Err(Error::Invalid(format!(
            "systems use different squashing functions ({:?} vs {:?})",
            s1.squash, s2.squash
        )));
    }
    let a = linalg::block_diag(&s1.coupling, &s2.coupling);
    let mut b = DMatrix::zeros(s1.state_dim() + s2.state_dim(), s1.input_dim());
    b.view_mut((0, 0), s1.input.shape()).copy_from(&s1.input);
    b.view_mut((s1.state_dim(), 0), s2.input.shape())
        .copy_from(&s2.input);
    let xi = DVector::from_iterator(
        s1.state_dim() + s2.state_dim(),
        s1.bias.iter().chain(s2.bias.iter()).copied(),
    );
    Ok((a, b, xi))
}

fn lifted_readouts(s1: &EsnSystem, s2: &EsnSystem) -> Result<(Polynomial, Polynomial)> {
    let n = s1.state_dim() + s2.state_dim();
    Ok((
        s1.readout.embed(n, 0)?,
        s2.readout.embed(n, s1.state_dim())?,
    ))
}

/// Reservoir `A₁ ⊕ A₂` fed by the shared input, read out by `p + λ q`.
pub fn esn_sum(s1: &EsnSystem, s2: &EsnSystem, lambda: f64) -> Result<EsnSystem> {
    let (a, b, xi) = direct_sum_parts(s1, s2)?;
    let (p, q) = lifted_readouts(s1, s2)?;
    EsnSystem::new(a, b, xi, s1.squash, p.try_add(&q.scale(lambda))?)
}

/// Reservoir `A₁ ⊕ A₂` fed by the shared input, read out by `p · q`.
pub fn esn_product(s1: &EsnSystem, s2: &EsnSystem) -> Result<EsnSystem> {
    let (a, b, xi) = direct_sum_parts(s1, s2)?;
    let (p, q) = lifted_readouts(s1, s2)?;
    EsnSystem::new(a, b, xi, s1.squash, p.try_mul(&q)?)
}

/// How the random coupling matrix is rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CouplingScale {
    SpectralRadius(f64),
    OperatorNorm(f64),
}

/// Recipe for seeded random reservoirs: entries i.i.d. uniform on `[-1, 1]`,
/// `A` rescaled to the requested radius or norm, `B` and `ξ` scaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EsnBuilder {
    pub state_dim: usize,
    pub input_dim: usize,
    pub scale: CouplingScale,
    pub input_scale: f64,
    pub bias_scale: f64,
    pub squash: Squash,
}

impl Default for EsnBuilder {
    fn default() -> Self {
        Self {
            state_dim: 10,
            input_dim: 1,
            scale: CouplingScale::SpectralRadius(0.9),
            input_scale: 1.0,
            bias_scale: 0.0,
            squash: Squash::Tanh,
        }
    }
}

impl EsnBuilder {
    pub fn new(state_dim: usize) -> Self {
        Self {
            state_dim,
            ..Self::default()
        }
    }

    /// Draws a system whose readout is `x_1`.
    pub fn build(&self, rng: &mut Rng) -> Result<EsnSystem> {
        let (n, m) = (self.state_dim, self.input_dim);
        if n == 0 || m == 0 {
            return Err(Error::Dimension(
                "reservoir and input sizes must be positive".into(),
            ));
        }
        let mut a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
        let b = DMatrix::from_fn(n, m, |_, _| self.input_scale * rng.random_range(-1.0..=1.0));
        let xi = DVector::from_fn(n, |_, _| self.bias_scale * rng.random_range(-1.0..=1.0));
        let (target, current) = match self.scale {
            CouplingScale::SpectralRadius(r) => (r, linalg::spectral_radius(&a)?),
            CouplingScale::OperatorNorm(r) => (r, linalg::operator_norm(&a)?),
        };
        if current > 0.0 {
            a *= target / current;
        }
        EsnSystem::new(a, b, xi, self.squash, Polynomial::variable(n, 0)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EsnDoc {
    coupling: Vec<Vec<f64>>,
    input: Vec<Vec<f64>>,
    bias: Vec<f64>,
    #[serde(default)]
    squash: Squash,
    readout: Polynomial,
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Dimension(format!(
            "{what}: rows have different lengths"
        )));
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.iter().flatten().copied(),
    ))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl EsnSystem {
    /// JSON document with dense row-major matrices.
    pub fn to_json(&self) -> Result<String> {
        let doc = EsnDoc {
            coupling: matrix_to_rows(&self.coupling),
            input: matrix_to_rows(&self.input),
            bias: self.bias.iter().copied().collect(),
            squash: self.squash,
            readout: self.readout.clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: EsnDoc = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        EsnSystem::new(
            matrix_from_rows(&doc.coupling, "coupling")?,
            matrix_from_rows(&doc.input, "input")?,
            DVector::from_vec(doc.bias),
            doc.squash,
            doc.readout,
        )
    }
}
