use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot size below which an unregularized Cholesky factor is
/// treated as singular.
const PIVOT_FLOOR: f64 = 1e-7;

/// Solution of `min ‖Φ w - y‖² + λ ‖w‖²` for one or more right-hand sides.
#[derive(Debug, Clone)]
pub struct RidgeFit {
    /// One column of weights per target column.
    pub weights: DMatrix<f64>,
    pub used_pseudo_inverse: bool,
}

/// Normal equations `(ΦᵀΦ + λI) W = Φᵀ Y` by Cholesky; falls back to the SVD
/// pseudo-inverse of `Φ` when the system is singular.
pub fn ridge_train_multi(
    features: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    lambda: f64,
) -> Result<RidgeFit> {
    let (m, f) = features.shape();
    if m == 0 || f == 0 {
        return Err(Error::Dimension(
            "ridge regression needs at least one row and column".into(),
        ));
    }
    if targets.nrows() != m {
        return Err(Error::Dimension(format!(
            "{} targets for {m} feature rows",
            targets.nrows()
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "regularization must be >= 0, got {lambda}"
        )));
    }
    let phi_t = features.transpose();
    let mut gram = &phi_t * features;
    for i in 0..f {
        gram[(i, i)] += lambda;
    }
    let rhs = &phi_t * targets;
    if let Some(chol) = gram.clone().cholesky() {
        let l = chol.l_dirty();
        let diag = l.diagonal();
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &d| {
            (lo.min(d), hi.max(d))
        });
        if lambda > 0.0 || lo > PIVOT_FLOOR * hi {
            return Ok(RidgeFit {
                weights: chol.solve(&rhs),
                used_pseudo_inverse: false,
            });
        }
    }
    if lambda > 0.0 {
        return Err(Error::Numerical(
            "regularized normal equations are not positive definite".into(),
        ));
    }
    log::warn!("singular normal equations at zero regularization; using the pseudo-inverse");
    let svd = features.clone().svd(true, true);
    let weights = svd
        .solve(
            targets,
            f64::EPSILON * m.max(f) as f64 * svd.singular_values.max(),
        )
        .map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(RidgeFit {
        weights,
        used_pseudo_inverse: true,
    })
}

pub fn ridge_train(
    features: &DMatrix<f64>,
    targets: &DVector<f64>,
    lambda: f64,
) -> Result<DVector<f64>> {
    let y = DMatrix::from_column_slice(targets.len(), 1, targets.as_slice());
    let fit = ridge_train_multi(features, &y, lambda)?;
    Ok(fit.weights.column(0).into_owned())
}

/// `RMSE / std(target)`. A target with no spread is normalized by
/// `max(1, |mean|)` instead.
pub fn nrmse(predicted: &[f64], target: &[f64]) -> f64 {
    let m = target.len() as f64;
    let mse = predicted
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / m;
    let mean = target.iter().sum::<f64>() / m;
    let var = target.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / m;
    let scale = if var.sqrt() > 1e-12 * mean.abs().max(1.0) {
        var.sqrt()
    } else {
        mean.abs().max(1.0)
    };
    mse.sqrt() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng as _;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = rng::stream(seed, 0, 0);
        DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn square_system_is_interpolated() {
        let phi = random_matrix(6, 6, 1);
        let y = DVector::from_fn(6, |i, _| i as f64 - 2.0);
        let w = ridge_train(&phi, &y, 0.0).unwrap();
        assert!((&phi * &w - &y).amax() < 1e-10);
    }

    #[test]
    fn huge_regularization_shrinks_weights() {
        let phi = random_matrix(30, 5, 2);
        let y = DVector::from_fn(30, |i, _| (i as f64).sin());
        let w0 = ridge_train(&phi, &y, 0.0).unwrap();
        let wbig = ridge_train(&phi, &y, 1e9).unwrap();
        assert!(wbig.norm() <= 1e-6 * w0.norm());
    }

    #[test]
    fn matches_explicit_inverse() {
        let phi = random_matrix(50, 10, 3);
        let y = DVector::from_fn(50, |i, _| (0.3 * i as f64).cos());
        let w = ridge_train(&phi, &y, 0.1).unwrap();
        let g = phi.transpose() * &phi + DMatrix::identity(10, 10) * 0.1;
        let oracle = g.try_inverse().unwrap() * phi.transpose() * &y;
        assert!((w - oracle).amax() < 1e-9);
    }

    #[test]
    fn rank_deficient_falls_back_to_pseudo_inverse() {
        let mut phi = random_matrix(20, 4, 4);
        let c0 = phi.column(0).into_owned();
        phi.set_column(3, &c0);
        let y = DMatrix::from_fn(20, 1, |i, _| i as f64);
        let fit = ridge_train_multi(&phi, &y, 0.0).unwrap();
        assert!(fit.used_pseudo_inverse);
        // Minimum-norm solution splits the weight evenly over the copies.
        assert!((fit.weights[(0, 0)] - fit.weights[(3, 0)]).abs() < 1e-8);
    }

    #[test]
    fn optimality_gradient_vanishes() {
        let phi = random_matrix(40, 8, 5);
        let y = DVector::from_fn(40, |i, _| (i % 7) as f64);
        let lambda = 0.05;
        let w = ridge_train(&phi, &y, lambda).unwrap();
        let grad = 2.0 * (phi.transpose() * (&phi * &w - &y) + lambda * &w);
        assert!(grad.norm() <= 1e-8 * (1.0 + w.norm()));
    }

    #[test]
    fn shape_errors() {
        let phi = random_matrix(5, 2, 6);
        assert!(ridge_train(&phi, &DVector::zeros(4), 0.1).is_err());
        assert!(ridge_train(&phi, &DVector::zeros(5), -1.0).is_err());
        assert!(ridge_train(&DMatrix::zeros(0, 2), &DVector::zeros(0), 0.1).is_err());
    }

    #[test]
    fn nrmse_of_constant_target_is_absolute() {
        assert_eq!(nrmse(&[2.0, 2.0], &[2.0, 2.0]), 0.0);
        assert!((nrmse(&[0.5, 0.5], &[0.5 + 1e-9, 0.5 + 1e-9]) - 1e-9).abs() < 1e-15);
        assert!((nrmse(&[0.0, 0.0], &[1.0, -1.0]) - 1.0).abs() < 1e-15);
    }
}
