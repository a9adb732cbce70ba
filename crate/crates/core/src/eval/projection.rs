//! Two-dimensional PCA of a handful of selected rows, for plotting.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::embeddings::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedPoint {
    pub token: String,
    pub x: f64,
    pub y: f64,
}

// Components whose variance falls below this fraction of the leading one are
// numerical noise and project to zero.
const RELATIVE_EIGEN_FLOOR: f64 = 1e-12;

/// Projects the rows of `tokens` onto their top two principal components.
///
/// Rows are mean-centered; components come from the eigendecomposition of the
/// `k x k` Gram matrix of the centered rows, which shares its nonzero spectrum
/// with the covariance matrix. Each component is oriented so that its
/// largest-magnitude entry is positive.
pub fn project_2d<T: Real>(m: &EmbeddingMatrix<T>, tokens: &[&str]) -> Result<Vec<ProjectedPoint>> {
    let missing: Vec<String> = tokens
        .iter()
        .filter(|t| m.vocab().get(t).is_none())
        .map(|t| t.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingTokens(missing));
    }
    if tokens.len() < 3 {
        return Err(Error::Config(format!(
            "projection needs at least 3 tokens, got {}",
            tokens.len()
        )));
    }

    let k = tokens.len();
    let d = m.dim();
    let mut x = DMatrix::<f64>::from_fn(k, d, |r, c| m.get(tokens[r]).unwrap()[c].to_f64());
    let mean = x.row_mean();
    for mut row in x.row_iter_mut() {
        row -= &mean;
    }

    let gram = &x * x.transpose();
    let eigen = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));
    let leading = eigen.eigenvalues[order[0]].max(0.0);

    let mut coords = [vec![0.0; k], vec![0.0; k]];
    for (axis, &idx) in order.iter().take(2).enumerate() {
        let lambda = eigen.eigenvalues[idx];
        if leading <= 0.0 || lambda <= leading * RELATIVE_EIGEN_FLOOR {
            continue;
        }
        let mut direction = x.transpose() * eigen.eigenvectors.column(idx);
        let norm = direction.norm();
        if norm == 0.0 {
            continue;
        }
        direction /= norm;
        let pivot = direction.iamax();
        if direction[pivot] < 0.0 {
            direction = -direction;
        }
        let projected = &x * direction;
        coords[axis] = projected.iter().copied().collect();
    }

    Ok(tokens
        .iter()
        .enumerate()
        .map(|(i, t)| ProjectedPoint {
            token: t.to_string(),
            x: coords[0][i],
            y: coords[1][i],
        })
        .collect())
}
