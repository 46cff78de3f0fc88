use crate::error::{Error, Result};

/// Largest feature vector `polynomial_features` will build.
pub const MAX_FEATURES: u128 = 1_000_000;

/// `C(n + d, d)`, the number of monomials of total degree `<= d` in `n`
/// variables.
pub fn feature_count(n: usize, degree: usize) -> u128 {
    let (n, d) = (n as u128, degree as u128);
    (1..=d).fold(1u128, |acc, k| acc * (n + k) / k)
}

fn check(n: usize, degree: usize) -> Result<()> {
    let count = feature_count(n, degree);
    if count > MAX_FEATURES {
        return Err(Error::Overflow {
            count,
            limit: MAX_FEATURES,
        });
    }
    Ok(())
}

/// All monomials of total degree `<= degree`, graded, then lexicographic in
/// the variable indices: `(1, a, b, a², ab, b²)` for two variables.
pub fn polynomial_features(x: &[f64], degree: usize) -> Result<Vec<f64>> {
    check(x.len(), degree)?;
    let mut out = Vec::with_capacity(feature_count(x.len(), degree) as usize);
    out.push(1.0);
    // Each monomial of the previous degree with the index of its last variable.
    let mut prev: Vec<(f64, usize)> = vec![(1.0, 0)];
    for _ in 0..degree {
        let mut next = Vec::new();
        for &(m, last) in &prev {
            for (i, xi) in x.iter().enumerate().skip(last) {
                next.push((m * xi, i));
            }
        }
        out.extend(next.iter().map(|p| p.0));
        prev = next;
    }
    Ok(out)
}

/// Exponent vectors in the order used by [`polynomial_features`].
pub fn monomial_exponents(n: usize, degree: usize) -> Result<Vec<Vec<u32>>> {
    check(n, degree)?;
    let mut out = vec![vec![0u32; n]];
    let mut prev: Vec<(Vec<u32>, usize)> = vec![(vec![0; n], 0)];
    for _ in 0..degree {
        let mut next = Vec::new();
        for (e, last) in &prev {
            for i in *last..n {
                let mut e2 = e.clone();
                e2[i] += 1;
                next.push((e2, i));
            }
        }
        out.extend(next.iter().map(|p| p.0.clone()));
        prev = next;
    }
    Ok(out)
}
