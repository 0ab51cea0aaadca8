use ndarray::{Array1, Array2, ArrayView2, Axis};

use super::{NumericsError, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOLERANCE: f64 = 1e-10;
/// Eigenvalues at or below this fraction of the data scale count as zero.
const DEGENERATE_RATIO: f64 = 1e-12;

/// Eigenvalues sorted descending with matching orthonormal eigenvector
/// columns.
#[derive(Clone, Debug)]
pub struct SymEigResult {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
}

/// Flips `column` so that its largest-magnitude component (first one on
/// ties) is positive.
fn canonicalize_sign(column: &mut [f64]) {
    let mut best = 0;
    for (i, x) in column.iter().enumerate() {
        if x.abs() > column[best].abs() {
            best = i;
        }
    }
    if column.get(best).is_some_and(|x| *x < 0.0) {
        column.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized as `(A + Aᵀ)/2` first. Sweeps stop once the
/// off-diagonal Frobenius norm drops below `1e-10·‖A‖_F`.
pub fn sym_eig(a: ArrayView2<'_, f64>) -> Result<SymEigResult> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(NumericsError::NotSquare { rows, cols });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(NumericsError::InvalidArgument("matrix has non-finite entries".into()));
    }
    let n = rows;
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = 0.5 * (a[[i, j]] + a[[j, i]]);
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let scale = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off_norm = |m: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&m) <= OFF_DIAGONAL_TOLERANCE * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                if t == 0.0 {
                    continue;
                }
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let kp = m[k * n + p];
                    let kq = m[k * n + q];
                    m[k * n + p] = c * kp - s * kq;
                    m[k * n + q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let pk = m[p * n + k];
                    let qk = m[q * n + k];
                    m[p * n + k] = c * pk - s * qk;
                    m[q * n + k] = s * pk + c * qk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let kp = v[k * n + p];
                    let kq = v[k * n + q];
                    v[k * n + p] = c * kp - s * kq;
                    v[k * n + q] = s * kp + c * kq;
                }
            }
        }
    }
    if !converged && off_norm(&m) > OFF_DIAGONAL_TOLERANCE * scale {
        return Err(NumericsError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]).then(i.cmp(&j)));

    let mut eigenvalues = Array1::zeros(n);
    let mut eigenvectors = Array2::zeros((n, n));
    let mut column = vec![0.0; n];
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues[dst] = m[src * n + src];
        for k in 0..n {
            column[k] = v[k * n + src];
        }
        canonicalize_sign(&mut column);
        for k in 0..n {
            eigenvectors[[k, dst]] = column[k];
        }
    }
    Ok(SymEigResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Top principal axes of a point cloud.
#[derive(Clone, Debug)]
pub struct Pca {
    /// `D × k`, orthonormal columns, sign-canonicalized.
    pub components: Array2<f64>,
    /// Variance captured by each component (eigenvalues of the covariance).
    pub variances: Array1<f64>,
    /// Column mean that was subtracted (zeros when not centering).
    pub mean: Array1<f64>,
}

impl Pca {
    /// Coordinates of `row` in the component basis.
    pub fn project(&self, row: &[f64]) -> Vec<f64> {
        self.components
            .axis_iter(Axis(1))
            .map(|c| {
                c.iter()
                    .zip(row)
                    .zip(self.mean.iter())
                    .map(|((ci, x), mu)| ci * (x - mu))
                    .sum()
            })
            .collect()
    }
}

/// PCA over mean-centered rows: top-`k` eigenvectors of `(1/N)·XᶜᵀXᶜ`.
pub fn pca(rows: ArrayView2<'_, f64>, k: usize) -> Result<Pca> {
    principal_axes(rows, k, true)
}

/// PCA with optional centering; `center = false` uses `(1/N)·XᵀX`.
pub fn principal_axes(rows: ArrayView2<'_, f64>, k: usize, center: bool) -> Result<Pca> {
    let (n, d) = rows.dim();
    if n < 2 {
        return Err(NumericsError::InvalidArgument(format!(
            "pca needs at least 2 rows, got {n}"
        )));
    }
    if k == 0 || k > n.min(d) {
        return Err(NumericsError::InvalidArgument(format!(
            "k = {k} is outside 1..={}",
            n.min(d)
        )));
    }
    let mean = if center {
        rows.mean_axis(Axis(0)).expect("n >= 2")
    } else {
        Array1::zeros(d)
    };
    let centered = &rows - &mean;
    let cov = centered.t().dot(&centered) / n as f64;
    let eig = sym_eig(cov.view())?;

    let reference = rows.iter().map(|x| x * x).sum::<f64>() / n as f64;
    let threshold = DEGENERATE_RATIO * reference.max(eig.eigenvalues[0]);
    if let Some(i) = (0..k).find(|&i| eig.eigenvalues[i] <= threshold) {
        return Err(NumericsError::Degenerate(format!(
            "principal component {} has zero variance",
            i + 1
        )));
    }
    Ok(Pca {
        components: eig.eigenvectors.slice(ndarray::s![.., ..k]).to_owned(),
        variances: eig.eigenvalues.slice(ndarray::s![..k]).to_owned(),
        mean,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    use super::*;

    #[test]
    fn identity_spectrum() {
        let r = sym_eig(Array2::<f64>::eye(3).view()).unwrap();
        assert_eq!(r.eigenvalues.to_vec(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_is_sorted() {
        let r = sym_eig(array![[1.0, 0.0], [0.0, 3.0]].view()).unwrap();
        assert_eq!(r.eigenvalues.to_vec(), vec![3.0, 1.0]);
        assert_eq!(r.eigenvectors, array![[0.0, 1.0], [1.0, 0.0]]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1 with vectors (1,1)/√2, (1,-1)/√2
        let r = sym_eig(array![[2.0, 1.0], [1.0, 2.0]].view()).unwrap();
        assert_abs_diff_eq!(r.eigenvalues[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.eigenvalues[1], 1.0, epsilon = 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(r.eigenvectors[[0, 0]].abs(), h, epsilon = 1e-12);
        assert_abs_diff_eq!(r.eigenvectors[[1, 0]].abs(), h, epsilon = 1e-12);
    }

    #[test]
    fn rejects_non_square() {
        let err = sym_eig(Array2::<f64>::zeros((2, 3)).view()).unwrap_err();
        assert_eq!(err, NumericsError::NotSquare { rows: 2, cols: 3 });
    }

    #[test]
    fn zero_matrix_is_trivially_diagonal() {
        let r = sym_eig(Array2::<f64>::zeros((3, 3)).view()).unwrap();
        assert!(r.eigenvalues.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn pca_on_x_axis() {
        let rows = array![[1.0, 0.0], [2.0, 0.0], [-3.0, 0.0]];
        let p = pca(rows.view(), 1).unwrap();
        assert_abs_diff_eq!(p.components[[0, 0]], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.components[[1, 0]], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pca_four_corner_points() {
        // covariance diag(1, 0.01) → first axis is x
        let rows = array![[1.0, 0.1], [1.0, -0.1], [-1.0, 0.1], [-1.0, -0.1]];
        let p = pca(rows.view(), 2).unwrap();
        assert_abs_diff_eq!(p.components[[0, 0]], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.components[[1, 0]], 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.variances[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.variances[1], 0.01, epsilon = 1e-12);
    }

    #[test]
    fn pca_errors() {
        let same = array![[0.1, 0.2], [0.1, 0.2], [0.1, 0.2]];
        assert!(matches!(pca(same.view(), 1), Err(NumericsError::Degenerate(_))));
        let collinear = array![[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]];
        assert!(matches!(pca(collinear.view(), 2), Err(NumericsError::Degenerate(_))));
        assert!(pca(collinear.view(), 1).is_ok());
        assert!(matches!(
            pca(collinear.view(), 3),
            Err(NumericsError::InvalidArgument(_))
        ));
        assert!(matches!(
            pca(collinear.view(), 0),
            Err(NumericsError::InvalidArgument(_))
        ));
        let single = array![[1.0, 2.0]];
        assert!(matches!(pca(single.view(), 1), Err(NumericsError::InvalidArgument(_))));
    }

    #[test]
    fn projection_variances_equal_eigenvalues() {
        let rows = array![
            [0.3, 1.2, -0.5],
            [1.1, -0.4, 0.2],
            [-0.7, 0.5, 0.9],
            [0.2, -1.3, 0.4],
            [0.9, 0.8, -1.1]
        ];
        let p = pca(rows.view(), 3).unwrap();
        for j in 0..3 {
            let var: f64 = rows
                .outer_iter()
                .map(|r| p.project(r.as_slice().unwrap())[j].powi(2))
                .sum::<f64>()
                / 5.0;
            assert_abs_diff_eq!(var, p.variances[j], epsilon = 1e-8);
        }
    }
}
