//! Independent oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit Pauli by digit: 0 = I, 1 = X, 2 = Y, 3 = Z.
pub fn pauli(d: usize) -> CMat {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match d {
        0 => CMat::from_row_slice(2, 2, &[one, z, z, one]),
        1 => CMat::from_row_slice(2, 2, &[z, one, one, z]),
        2 => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        3 => CMat::from_row_slice(2, 2, &[one, z, z, -one]),
        _ => unreachable!(),
    }
}

/// `P_{d_1} ⊗ … ⊗ P_{d_N}` with qubit 1 leftmost.
pub fn pauli_string(digits: &[usize]) -> CMat {
    digits
        .iter()
        .fold(CMat::identity(1, 1), |acc, &d| acc.kronecker(&pauli(d)))
}

/// Base-4 digits of a Pauli index, qubit 1 most significant.
pub fn digits(mut index: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for q in (0..n).rev() {
        d[q] = index % 4;
        index /= 4;
    }
    d
}

/// The operator `P` acting on `qubit` alone.
pub fn single(n: usize, qubit: usize, d: usize) -> CMat {
    let mut ds = vec![0; n];
    ds[qubit] = d;
    pauli_string(&ds)
}

/// `Σ_{i<j} J_ij X_i X_j + Σ_l h_l Z_l` assembled from Kronecker products.
pub fn ising(couplings: &[Vec<f64>], fields: &[f64]) -> CMat {
    let n = fields.len();
    let dim = 1 << n;
    let mut h = CMat::zeros(dim, dim);
    for i in 0..n {
        for j in i + 1..n {
            h += single(n, i, 1) * single(n, j, 1) * c(couplings[i][j], 0.0);
        }
        h += single(n, i, 3) * c(fields[i], 0.0);
    }
    h
}

/// `e^{A}` by scaling and squaring a truncated Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let norm: f64 = a.iter().map(|x| x.norm()).sum();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let b = a / c(2f64.powi(s), 0.0);
    let dim = a.nrows();
    let mut term = CMat::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &b / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `Tr₁ ρ`, tracing out the most significant qubit.
pub fn trace_first(rho: &CMat) -> CMat {
    let half = rho.nrows() / 2;
    CMat::from_fn(half, half, |i, j| rho[(i, j)] + rho[(i + half, j + half)])
}

/// Reset qubit 1 to `(1-u)|0><0| + u|1><1|` and keep the rest.
pub fn encode(rho: &CMat, u: f64) -> CMat {
    let sigma = CMat::from_row_slice(
        2,
        2,
        &[c(1.0 - u, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(u, 0.0)],
    );
    sigma.kronecker(&trace_first(rho))
}

/// `r_i = Re Tr[P_i ρ] / 2^N`.
pub fn pauli_vector(rho: &CMat, n: usize) -> Vec<f64> {
    let scale = (1usize << n) as f64;
    (0..1usize << (2 * n))
        .map(|i| (pauli_string(&digits(i, n)) * rho).trace().re / scale)
        .collect()
}

/// Density states after each input, starting from `I / 2^N`, for
/// `ρ ↦ encode(V ρ V†, u)` with `V = e^{-iHτ}`.
pub fn density_trajectory(h: &CMat, tau: f64, n: usize, inputs: &[f64]) -> Vec<CMat> {
    let dim = 1 << n;
    let v = expm(&(h * c(0.0, -tau)));
    let vd = v.adjoint();
    let mut rho = CMat::identity(dim, dim) / c(dim as f64, 0.0);
    inputs
        .iter()
        .map(|&u| {
            rho = encode(&(&v * &rho * &vd), u);
            rho.clone()
        })
        .collect()
}

/// Coefficients `c_0..c_n` of `det(λI - A) = Σ c_k λ^{n-k}` with `c_0 = 1`,
/// by the Faddeev–LeVerrier recursion.
pub fn char_poly(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + DMatrix::identity(n, n) * coeffs[k - 1];
        let ck = -(a * &m).trace() / k as f64;
        coeffs.push(ck);
    }
    coeffs
}

/// All roots of a monic polynomial by Durand–Kerner iteration.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let bound = 1.0 + coeffs[1..].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let seed = c(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    let eval = |z: Complex64| coeffs.iter().fold(c(0.0, 0.0), |acc, &ck| acc * z + ck);
    for _ in 0..5000 {
        let mut delta = 0.0_f64;
        for i in 0..n {
            let denom = (0..n)
                .filter(|&j| j != i)
                .fold(c(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

pub fn spectral_radius_oracle(a: &DMatrix<f64>) -> f64 {
    poly_roots(&char_poly(a))
        .iter()
        .fold(0.0_f64, |m, z| m.max(z.norm()))
}
