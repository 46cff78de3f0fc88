use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signals::Orbit;

/// Absolute value past which a NARMA recurrence counts as diverged.
pub const NARMA_DIVERGENCE: f64 = 10.0;

/// Fading-memory target filters for the approximation bench. All of them are
/// causal and read samples before the start of the orbit as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetFilter {
    /// `c₁ s_t + c₂ s_t²` with `s_t = Σ_{k<memory} a^k u_{t-k}`, which is
    /// `Σ_k a^k u_{t-k} + Σ_{k,l} a^{k+l} u_{t-k} u_{t-l}` for unit
    /// coefficients.
    Volterra2 {
        decay: f64,
        #[serde(default = "one")]
        linear: f64,
        #[serde(default = "one")]
        quadratic: f64,
        #[serde(default = "thirty")]
        memory: usize,
    },
    /// Order-`m` NARMA driven by the input mapped affinely from
    /// `[-K, K]` (or `input_range`) onto `[0, 0.5]`. Output `k` is the value
    /// the recurrence produces after reading input `k`.
    Narma {
        order: usize,
        #[serde(default)]
        input_range: Option<(f64, f64)>,
    },
    /// `Π_j u_{t - lag_j}`.
    DelayProduct {
        lags: Vec<usize>,
    },
    Constant {
        value: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn thirty() -> usize {
    30
}

impl TargetFilter {
    pub fn validate(&self) -> Result<()> {
        match self {
            TargetFilter::Volterra2 { decay, memory, .. } => {
                if !(decay.abs() < 1.0) {
                    return Err(Error::OutOfRange(format!(
                        "volterra2 decay must lie in (-1, 1), got {decay}"
                    )));
                }
                if *memory == 0 {
                    return Err(Error::OutOfRange(
                        "volterra2 memory must be positive".into(),
                    ));
                }
            }
            TargetFilter::Narma { order, input_range } => {
                if *order == 0 {
                    return Err(Error::OutOfRange("narma order must be positive".into()));
                }
                if let Some((lo, hi)) = input_range {
                    if !(lo < hi) {
                        return Err(Error::OutOfRange(format!(
                            "empty narma input range [{lo}, {hi}]"
                        )));
                    }
                }
            }
            TargetFilter::DelayProduct { lags } => {
                if lags.is_empty() {
                    return Err(Error::Invalid(
                        "delay_product needs at least one lag".into(),
                    ));
                }
            }
            TargetFilter::Constant { .. } => {}
        }
        Ok(())
    }

    pub fn eval(&self, u: &Orbit) -> Result<Vec<f64>> {
        self.validate()?;
        if u.dim() != 1 {
            return Err(Error::Dimension(format!(
                "target filters take scalar orbits, got dimension {}",
                u.dim()
            )));
        }
        let x = u.as_flat();
        let past = |t: usize, lag: usize| if lag <= t { x[t - lag] } else { 0.0 };
        match self {
            TargetFilter::Volterra2 {
                decay,
                linear,
                quadratic,
                memory,
            } => {
                let weights: Vec<f64> = (0..*memory).map(|k| decay.powi(k as i32)).collect();
                Ok((0..x.len())
                    .map(|t| {
                        let s: f64 = weights
                            .iter()
                            .enumerate()
                            .map(|(k, w)| w * past(t, k))
                            .sum();
                        linear * s + quadratic * s * s
                    })
                    .collect())
            }
            TargetFilter::Narma { order, input_range } => {
                let (lo, hi) = input_range.unwrap_or((-u.bound(), u.bound()));
                narma(x, *order, lo, hi)
            }
            TargetFilter::DelayProduct { lags } => Ok((0..x.len())
                .map(|t| lags.iter().map(|&l| past(t, l)).product())
                .collect()),
            TargetFilter::Constant { value } => Ok(vec![*value; x.len()]),
        }
    }
}

/// `y_{t+1} = 0.3 y_t + 0.05 y_t Σ_{i<m} y_{t-i} + 1.5 v_{t-m+1} v_t + 0.1`.
fn narma(x: &[f64], m: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let v: Vec<f64> = x.iter().map(|&s| 0.5 * (s - lo) / (hi - lo)).collect();
    let mut y = vec![0.0; x.len() + 1];
    for t in 0..x.len() {
        let window: f64 = (0..m).filter(|&i| i <= t).map(|i| y[t - i]).sum();
        let v_old = if t + 1 >= m { v[t + 1 - m] } else { 0.0 };
        let next = 0.3 * y[t] + 0.05 * y[t] * window + 1.5 * v_old * v[t] + 0.1;
        if !(next.abs() <= NARMA_DIVERGENCE) {
            return Err(Error::Divergence {
                step: t,
                value: next,
            });
        }
        y[t + 1] = next;
    }
    y.remove(0);
    Ok(y)
}

pub fn target_eval(f: &TargetFilter, u: &Orbit) -> Result<Vec<f64>> {
    f.eval(u)
}
