//! Input encoding and unitary evolution as real matrices on Pauli vectors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::pauli::{check_qubits, PauliString};
use super::state::{hermiticity_residual, ReservoirVector, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Hamiltonian model of a register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Hamiltonian {
    /// `H = Σ_{i<j} J_ij X_i X_j + Σ_l h_l Z_l`; `couplings[i][j]` is read
    /// for `i < j` only.
    Ising {
        couplings: Vec<Vec<f64>>,
        fields: Vec<f64>,
    },
    /// Explicit `2^N × 2^N` matrix as real and imaginary row-major parts.
    Dense {
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    #[serde(flatten)]
    pub model: Hamiltonian,
    pub tau: f64,
}

impl HamiltonianSpec {
    /// `H = 0`.
    pub fn trivial(n: usize) -> Self {
        HamiltonianSpec {
            model: Hamiltonian::Ising {
                couplings: vec![vec![0.0; n]; n],
                fields: vec![0.0; n],
            },
            tau: 1.0,
        }
    }

    /// Fully connected transverse-field Ising model, `J_ij ~ U[-1, 1]/√N`,
    /// with the given uniform field and evolution time.
    pub fn random_ising(n: usize, field: f64, tau: f64, rng: &mut Rng) -> Self {
        let scale = 1.0 / (n as f64).sqrt();
        let mut couplings = vec![vec![0.0; n]; n];
        for (i, row) in couplings.iter_mut().enumerate() {
            for c in &mut row[i + 1..] {
                *c = scale * rng.random_range(-1.0..=1.0);
            }
        }
        HamiltonianSpec {
            model: Hamiltonian::Ising {
                couplings,
                fields: vec![field; n],
            },
            tau,
        }
    }

    /// The `2^N × 2^N` matrix, checked for Hermiticity.
    pub fn matrix(&self, n: usize) -> Result<DMatrix<Complex64>> {
        check_qubits(n)?;
        let dim = 1 << n;
        let h = match &self.model {
            Hamiltonian::Ising { couplings, fields } => {
                if fields.len() != n
                    || couplings.len() != n
                    || couplings.iter().any(|r| r.len() != n)
                {
                    return Err(Error::Dimension(format!(
                        "Ising couplings must be {n}x{n} and fields of length {n}"
                    )));
                }
                let mut h = DMatrix::zeros(dim, dim);
                let bit = |q: usize| 1usize << (n - 1 - q);
                for b in 0..dim {
                    let z = |q: usize| if b & bit(q) == 0 { 1.0 } else { -1.0 };
                    let diag: f64 = fields.iter().enumerate().map(|(q, hq)| hq * z(q)).sum();
                    h[(b, b)] += Complex64::new(diag, 0.0);
                    for i in 0..n {
                        for j in i + 1..n {
                            h[(b ^ bit(i) ^ bit(j), b)] += Complex64::new(couplings[i][j], 0.0);
                        }
                    }
                }
                h
            }
            Hamiltonian::Dense { re, im } => {
                let ok = |m: &Vec<Vec<f64>>| m.len() == dim && m.iter().all(|r| r.len() == dim);
                if !ok(re) || !ok(im) {
                    return Err(Error::Dimension(format!(
                        "dense Hamiltonian parts must be {dim}x{dim}"
                    )));
                }
                DMatrix::from_fn(dim, dim, |i, j| Complex64::new(re[i][j], im[i][j]))
            }
        };
        let residual = hermiticity_residual(&h);
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian(residual));
        }
        Ok(h)
    }

    /// `e^{-iHτ}` from the Hermitian eigendecomposition.
    pub fn propagator(&self, n: usize) -> Result<DMatrix<Complex64>> {
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::OutOfRange(format!(
                "evolution time must be non-negative, got {}",
                self.tau
            )));
        }
        let h = self.matrix(n)?;
        let eig = h.symmetric_eigen();
        let phases = DVector::from_iterator(
            eig.eigenvalues.len(),
            eig.eigenvalues
                .iter()
                .map(|&l| Complex64::from_polar(1.0, -l * self.tau)),
        );
        let q = eig.eigenvectors;
        let mut scaled = q.clone();
        for (mut col, ph) in scaled.column_iter_mut().zip(phases.iter()) {
            col *= *ph;
        }
        Ok(&scaled * q.adjoint())
    }
}

/// `U_{ji} = Tr[P_j V P_i V†] / 2^N` with `V = e^{-iHτ}`, so that `U r` is the
/// Pauli vector of `V ρ V†`.
pub fn channel_matrix(spec: &HamiltonianSpec, n: usize) -> Result<DMatrix<f64>> {
    let v = spec.propagator(n)?;
    let v_dag = v.adjoint();
    let dim = 1 << n;
    let size = 1 << (2 * n);
    let norm = 1.0 / dim as f64;
    let strings: Vec<PauliString> = (0..size).map(|i| PauliString::from_index(i, n)).collect();
    let mut u = DMatrix::zeros(size, size);
    let mut vp = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, pi) in strings.iter().enumerate() {
        // (V P_i)_{a c} = V_{a, c⊕flip} phase(c)
        for c in 0..dim {
            let ph = pi.phase(c);
            for a in 0..dim {
                vp[(a, c)] = v[(a, c ^ pi.flip)] * ph;
            }
        }
        let m = &vp * &v_dag;
        for (j, pj) in strings.iter().enumerate() {
            u[(j, i)] = pj.trace_with(&m).re * norm;
        }
    }
    Ok(u)
}

fn check_input(u: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::OutOfRange(format!("input {u} outside [0, 1]")));
    }
    Ok(())
}

/// `S_u`: replaces qubit 1 by `(I + (1 - 2u) Z)/2` and keeps `Tr_1 ρ`.
///
/// On Pauli vectors this reads `r'^{(I, rest)} = r^{(I, rest)}`,
/// `r'^{(Z, rest)} = (1 - 2u) r^{(I, rest)}` and zero for `X`, `Y` on qubit 1.
pub fn encoding_matrix(u: f64, n: usize) -> Result<DMatrix<f64>> {
    check_qubits(n)?;
    check_input(u)?;
    let size = 1 << (2 * n);
    let block = size / 4;
    let mut s = DMatrix::zeros(size, size);
    for rest in 0..block {
        s[(rest, rest)] = 1.0;
        s[(3 * block + rest, rest)] = 1.0 - 2.0 * u;
    }
    Ok(s)
}

/// `S_u r` without forming the matrix.
pub fn apply_encoding(r: &mut ReservoirVector, u: f64) -> Result<()> {
    check_input(u)?;
    let c = r.components_mut();
    let block = c.len() / 4;
    let z = 1.0 - 2.0 * u;
    for rest in 0..block {
        let id = c[rest];
        c[block + rest] = 0.0;
        c[2 * block + rest] = 0.0;
        c[3 * block + rest] = z * id;
    }
    Ok(())
}
