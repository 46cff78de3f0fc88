use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esn::EsnBuilder;
use crate::qrc::QrcSystem;
use crate::rng::{self, label};
use crate::signals::Orbit;

/// Reservoir family searched by [`separation_probe`]. Every node of every
/// drawn instance counts as one functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeFamily {
    Esn {
        #[serde(flatten)]
        builder: EsnBuilder,
    },
    Qrc {
        #[serde(default = "two")]
        qubits: usize,
    },
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairGap {
    /// Largest `|R(u) - R(v)|` at `t = 0` over all functionals tried.
    pub gap: f64,
    /// Instance achieving it, `None` when every functional agrees.
    pub witness: Option<usize>,
}

fn final_nodes(family: &ProbeFamily, seed: u64, instance: usize, u: &Orbit) -> Result<Vec<f64>> {
    let mut rng = rng::stream(seed, label::PROBE, instance as u64);
    match family {
        ProbeFamily::Esn { builder } => {
            let sys = builder.build(&mut rng)?;
            let run = sys.run(u, 0, &vec![0.0; builder.state_dim])?;
            Ok(run.states.row(run.states.len() - 1).to_vec())
        }
        ProbeFamily::Qrc { qubits } => {
            let sys = QrcSystem::random(*qubits, seed, instance as u64)?;
            let run = sys.run(u, 0)?;
            Ok(run.nodes.row(run.nodes.len() - 1).to_vec())
        }
    }
}

/// Draws `instances` seeded reservoirs and reports, for each orbit pair, the
/// largest gap any of their functionals opens at `t = 0`. Pairs must have
/// equal lengths; a zero gap is a finding, not an error.
pub fn separation_probe(
    family: &ProbeFamily,
    pairs: &[(Orbit, Orbit)],
    instances: usize,
    seed: u64,
) -> Result<Vec<PairGap>> {
    if instances == 0 {
        return Err(Error::Invalid(
            "separation probe needs at least one instance".into(),
        ));
    }
    pairs
        .iter()
        .map(|(u, v)| {
            if u.len() != v.len() || u.dim() != v.dim() {
                return Err(Error::Dimension(
                    "probe pairs must share length and dimension".into(),
                ));
            }
            let mut best = PairGap {
                gap: 0.0,
                witness: None,
            };
            for i in 0..instances {
                let a = final_nodes(family, seed, i, u)?;
                let b = final_nodes(family, seed, i, v)?;
                let gap = a
                    .iter()
                    .zip(&b)
                    .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
                if gap > best.gap {
                    best = PairGap {
                        gap,
                        witness: Some(i),
                    };
                }
            }
            Ok(best)
        })
        .collect()
}
