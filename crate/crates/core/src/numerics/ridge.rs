use ndarray::{Array2, ArrayView2};

use super::{NumericsError, Result};

/// Pivots below this fraction of the original diagonal entry are treated
/// as a singular system.
const PIVOT_RATIO: f64 = 1e-12;

/// Ridge regression `W = (XᵀX + αI)⁻¹XᵀY` through a Cholesky factorization.
///
/// `x` is `N × P`, `y` is `N × Q`, the result is `P × Q`.
pub fn ridge_solve(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, alpha: f64) -> Result<Array2<f64>> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(NumericsError::InvalidArgument(format!(
            "alpha must be finite and non-negative, got {alpha}"
        )));
    }
    if x.nrows() != y.nrows() {
        return Err(NumericsError::DimensionMismatch(format!(
            "x has {} rows but y has {}",
            x.nrows(),
            y.nrows()
        )));
    }
    let p = x.ncols();
    let q = y.ncols();

    let mut a = x.t().dot(&x);
    for i in 0..p {
        a[[i, i]] += alpha;
    }
    let b = x.t().dot(&y);

    // a = L·Lᵀ, L stored in the lower triangle of `l`
    let mut l = Array2::<f64>::zeros((p, p));
    for j in 0..p {
        let mut d = a[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if !(d > PIVOT_RATIO * a[[j, j]]) || d <= 0.0 {
            return Err(NumericsError::Singular);
        }
        let ljj = d.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..p {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / ljj;
        }
    }

    let mut w = Array2::<f64>::zeros((p, q));
    for col in 0..q {
        // forward: L z = b
        let mut z = vec![0.0; p];
        for i in 0..p {
            let mut s = b[[i, col]];
            for k in 0..i {
                s -= l[[i, k]] * z[k];
            }
            z[i] = s / l[[i, i]];
        }
        // backward: Lᵀ w = z
        for i in (0..p).rev() {
            let mut s = z[i];
            for k in (i + 1)..p {
                s -= l[[k, i]] * w[[k, col]];
            }
            w[[i, col]] = s / l[[i, i]];
        }
    }
    Ok(w)
}
