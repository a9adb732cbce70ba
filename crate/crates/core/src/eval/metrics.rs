use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

/// Vectors with a smaller Euclidean norm have no defined direction.
pub const ZERO_NORM: f64 = 1e-12;

pub fn cosine<T: Real>(u: &[T], v: &[T]) -> Result<T> {
    if u.len() != v.len() {
        return Err(Error::Shape(format!("vectors of length {} and {}", u.len(), v.len())));
    }
    let nu = dot(u, u).sqrt();
    let nv = dot(v, v).sqrt();
    let eps = T::from_f64(ZERO_NORM);
    if nu < eps || nv < eps {
        return Err(Error::ZeroNorm);
    }
    Ok((dot(u, v) / (nu * nv)).max(-T::one()).min(T::one()))
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub(crate) fn fractional_ranks<T: Real>(values: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![T::zero(); values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end
        let mean = T::from_usize(start + 1 + end) / T::from_f64(2.0);
        for &i in &order[start..end] {
            ranks[i] = mean;
        }
        start = end;
    }
    ranks
}

fn pearson<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    let n = T::from_usize(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy = sxy + da * db;
        sxx = sxx + da * da;
        syy = syy + db * db;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::UndefinedCorrelation("constant input".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).max(-T::one()).min(T::one()))
}

/// Spearman's rank correlation: Pearson correlation of tie-averaged ranks.
pub fn spearman<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("{} vs {} values", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than 2 observations".into()));
    }
    pearson(&fractional_ranks(x), &fractional_ranks(y))
}
