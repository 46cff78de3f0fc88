use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::{check_qubits, single_z_index, PauliString};
use crate::error::{Error, Result};

/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Hermiticity tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Pauli-vector state `r^i = Tr[P_i ρ] / 2^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservoirVector {
    n_qubits: usize,
    components: Vec<f64>,
}

impl ReservoirVector {
    pub fn new(n_qubits: usize, components: Vec<f64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if components.len() != 1 << (2 * n_qubits) {
            return Err(Error::Dimension(format!(
                "{} components for {n_qubits} qubits, expected {}",
                components.len(),
                1usize << (2 * n_qubits)
            )));
        }
        Ok(Self {
            n_qubits,
            components,
        })
    }

    /// `ρ = I / 2^N`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let mut c = vec![0.0; 1 << (2 * n_qubits)];
        c[0] = expected_trace_component(n_qubits);
        Ok(Self {
            n_qubits,
            components: c,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub(crate) fn components_mut(&mut self) -> &mut [f64] {
        &mut self.components
    }

    pub fn as_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.components)
    }

    pub fn trace_component(&self) -> f64 {
        self.components[0]
    }

    /// `z^l = r^{I..Z..I}` for `l = 1..=N`.
    pub fn true_nodes(&self) -> Vec<f64> {
        (1..=self.n_qubits)
            .map(|l| self.components[single_z_index(l, self.n_qubits)])
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ReservoirVector = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        Self::new(raw.n_qubits, raw.components)
    }
}

pub fn expected_trace_component(n_qubits: usize) -> f64 {
    1.0 / (1u64 << n_qubits) as f64
}

fn qubits_of(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "density matrix side {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub fn hermiticity_residual(rho: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..rho.nrows() {
        for j in 0..rho.ncols() {
            worst = worst.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `r^i = Tr[P_i ρ] / 2^N` for a Hermitian, unit-trace `ρ`.
pub fn density_to_vector(rho: &DMatrix<Complex64>) -> Result<ReservoirVector> {
    if !rho.is_square() {
        return Err(Error::Dimension("density matrix must be square".into()));
    }
    let n = qubits_of(rho.nrows())?;
    check_qubits(n)?;
    let residual = hermiticity_residual(rho);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian(residual));
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(Error::Trace {
            got: trace.re,
            expected: 1.0,
        });
    }
    let norm = expected_trace_component(n);
    let components = (0..1 << (2 * n))
        .map(|i| PauliString::from_index(i, n).trace_with(rho).re * norm)
        .collect();
    ReservoirVector::new(n, components)
}

/// `ρ = Σ_i r^i P_i`.
pub fn vector_to_density(r: &ReservoirVector) -> DMatrix<Complex64> {
    let n = r.n_qubits;
    let dim = 1 << n;
    let mut rho = DMatrix::zeros(dim, dim);
    for (i, &ri) in r.components.iter().enumerate() {
        if ri == 0.0 {
            continue;
        }
        let p = PauliString::from_index(i, n);
        for b in 0..dim {
            rho[(b ^ p.flip, b)] += p.phase(b) * ri;
        }
    }
    rho
}

/// Physicality report for a Pauli-vector state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateDiagnostics {
    pub trace_component: f64,
    pub expected_trace: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_residual: f64,
}

impl StateDiagnostics {
    pub fn trace_ok(&self, tol: f64) -> bool {
        (self.trace_component - self.expected_trace).abs() <= tol
    }

    pub fn positive(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol
    }

    pub fn hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual <= tol
    }
}

pub fn validate_state(r: &ReservoirVector) -> Result<StateDiagnostics> {
    let rho = vector_to_density(r);
    let eig = rho.clone().symmetric_eigenvalues();
    Ok(StateDiagnostics {
        trace_component: r.trace_component(),
        expected_trace: expected_trace_component(r.n_qubits),
        min_eigenvalue: eig.iter().copied().fold(f64::INFINITY, f64::min),
        hermiticity_residual: hermiticity_residual(&rho),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn maximally_mixed_has_only_trace_component() {
        for n in 1..=3 {
            let dim = 1 << n;
            let rho = DMatrix::<Complex64>::identity(dim, dim) / c(dim as f64);
            let r = density_to_vector(&rho).unwrap();
            assert_eq!(r, ReservoirVector::maximally_mixed(n).unwrap());
            let d = validate_state(&r).unwrap();
            assert!((d.min_eigenvalue - 1.0 / dim as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn ground_state_of_one_qubit() {
        let rho = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let r = density_to_vector(&rho).unwrap();
        assert_eq!(r.components(), &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(r.true_nodes(), vec![0.5]);
    }

    #[test]
    fn bell_state_components() {
        // |Φ+⟩ = (|00⟩ + |11⟩)/√2 has ρ with 1/2 at the four corners.
        let mut rho = DMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            rho[(i, j)] = c(0.5);
        }
        let r = density_to_vector(&rho).unwrap();
        // Direct trace oracle: Tr[P ρ] = ⟨Φ+|P|Φ+⟩.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [c(s), c(0.0), c(0.0), c(s)];
        for i in 0..16 {
            let p = PauliString::from_index(i, 2).to_matrix(2);
            let mut expect = Complex64::new(0.0, 0.0);
            for a in 0..4 {
                for b in 0..4 {
                    expect += phi[a].conj() * p[(a, b)] * phi[b];
                }
            }
            assert!(
                (r.components()[i] - expect.re / 4.0).abs() < 1e-15,
                "index {i}"
            );
        }
        let nonzero: Vec<(usize, f64)> = r
            .components()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > 1e-15)
            .map(|(i, v)| (i, *v))
            .collect();
        assert_eq!(nonzero, vec![(0, 0.25), (5, 0.25), (10, -0.25), (15, 0.25)]);
    }

    #[test]
    fn rejects_bad_density_matrices() {
        let bad_trace = DMatrix::<Complex64>::identity(2, 2);
        assert!(matches!(
            density_to_vector(&bad_trace),
            Err(Error::Trace { .. })
        ));
        let mut non_herm = DMatrix::<Complex64>::identity(2, 2) * c(0.5);
        non_herm[(0, 1)] = c(0.3);
        assert!(matches!(
            density_to_vector(&non_herm),
            Err(Error::NotHermitian(_))
        ));
        assert!(density_to_vector(&DMatrix::<Complex64>::identity(3, 3)).is_err());
    }

    #[test]
    fn trace_violation_is_reported() {
        let mut comps = vec![0.0; 16];
        comps[0] = 0.3;
        let r = ReservoirVector::new(2, comps).unwrap();
        let d = validate_state(&r).unwrap();
        assert!(!d.trace_ok(1e-12));
        assert_eq!(d.expected_trace, 0.25);
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert!(ReservoirVector::new(2, vec![0.25; 5]).is_err());
        assert!(ReservoirVector::new(0, vec![1.0]).is_err());
    }
}
