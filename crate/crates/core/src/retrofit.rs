//! Retrofitting solver.
//!
//! Each vertex `i` with neighbors `N(i)` is repeatedly replaced by
//!
//! ```text
//! q_i = (sum_{j in N(i)} beta_ij q_j + alpha_i qhat_i) / (sum_{j in N(i)} beta_ij + alpha_i)
//! ```
//!
//! Sweeps are in place (Gauss-Seidel) and visit vertices in ascending ordinal
//! order, so later vertices in a sweep already see the updated values of
//! earlier ones. Results at a finite iteration count depend on this order.
//! Vertices without neighbors are never touched.
//!
//! [`solve_exact`] computes the fixed point of the update directly with a
//! dense LU factorization and serves as the reference for small instances.

use nalgebra::DMatrix;

use crate::embeddings::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::lexicon::RestrictedGraph;
use crate::scalar::{squared_distance, Real};

/// Largest vocabulary accepted by [`solve_exact`].
pub const EXACT_SOLVE_LIMIT: usize = 2_000;

/// Rule for the neighbor weight `beta_ij`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeWeight<T> {
    /// `beta_ij = 1 / degree(i)`, evaluated for the vertex being updated.
    InverseDegree,
    /// `beta_ij = c` for every adjacent pair.
    Constant(T),
}

/// Anchor weight `alpha` (shared by all connected vertices) and neighbor weight rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightScheme<T> {
    pub alpha: T,
    pub beta: EdgeWeight<T>,
}

impl<T: Real> Default for WeightScheme<T> {
    fn default() -> Self {
        WeightScheme {
            alpha: T::one(),
            beta: EdgeWeight::InverseDegree,
        }
    }
}

impl<T: Real> WeightScheme<T> {
    pub fn inverse_degree() -> Self {
        Self::default()
    }

    pub fn constant(beta: T) -> Self {
        WeightScheme {
            alpha: T::one(),
            beta: EdgeWeight::Constant(beta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero() && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if let EdgeWeight::Constant(c) = self.beta {
            if !(c > T::zero() && c.is_finite()) {
                return Err(Error::Config(format!("beta must be positive, got {c}")));
            }
        }
        Ok(())
    }

    /// `beta_ij` for a vertex `i` of the given degree; neither rule depends on `j`.
    #[inline]
    pub fn beta(&self, degree: usize) -> T {
        match self.beta {
            EdgeWeight::InverseDegree => T::one() / T::from_usize(degree),
            EdgeWeight::Constant(c) => c,
        }
    }

    /// True when `beta_ij = beta_ji` on every graph.
    pub fn is_symmetric(&self) -> bool {
        matches!(self.beta, EdgeWeight::Constant(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RetrofitConfig<T> {
    pub iterations: usize,
    pub scheme: WeightScheme<T>,
    /// Stop early once a sweep's [`max_adjacent_change`] falls below this.
    pub tolerance: Option<T>,
}

impl<T: Real> Default for RetrofitConfig<T> {
    fn default() -> Self {
        RetrofitConfig {
            iterations: 10,
            scheme: WeightScheme::default(),
            tolerance: None,
        }
    }
}

impl<T: Real> RetrofitConfig<T> {
    pub fn with_iterations(iterations: usize) -> Self {
        RetrofitConfig {
            iterations,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if let Some(tol) = self.tolerance {
            if !(tol >= T::zero() && tol.is_finite()) {
                return Err(Error::Config(format!("tolerance must be non-negative, got {tol}")));
            }
        }
        self.scheme.validate()
    }
}

#[derive(Clone, Debug)]
pub struct Retrofitted<T> {
    pub vectors: EmbeddingMatrix<T>,
    /// [`max_adjacent_change`] of each completed sweep.
    pub changes: Vec<T>,
}

fn check_graph<T: Real>(matrix: &EmbeddingMatrix<T>, graph: &RestrictedGraph) -> Result<()> {
    if graph.vertex_count() != matrix.len() {
        return Err(Error::Shape(format!(
            "graph has {} vertices, matrix has {} rows",
            graph.vertex_count(),
            matrix.len()
        )));
    }
    Ok(())
}

fn check_pair<T: Real>(a: &EmbeddingMatrix<T>, b: &EmbeddingMatrix<T>) -> Result<()> {
    if a.len() != b.len() || a.dim() != b.dim() {
        return Err(Error::Shape(format!(
            "{}x{} vs {}x{}",
            a.len(),
            a.dim(),
            b.len(),
            b.dim()
        )));
    }
    Ok(())
}

pub fn retrofit<T: Real>(
    q_hat: &EmbeddingMatrix<T>,
    graph: &RestrictedGraph,
    config: &RetrofitConfig<T>,
) -> Result<Retrofitted<T>> {
    config.validate()?;
    check_graph(q_hat, graph)?;
    q_hat.check_finite()?;

    let mut q = q_hat.clone();
    let mut changes = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        let change = sweep(&mut q, q_hat, graph, &config.scheme)?;
        changes.push(change);
        if config.tolerance.is_some_and(|tol| change < tol) {
            break;
        }
    }
    Ok(Retrofitted { vectors: q, changes })
}

/// One in-place pass over all connected vertices; returns the largest displacement.
pub(crate) fn sweep<T: Real>(
    q: &mut EmbeddingMatrix<T>,
    q_hat: &EmbeddingMatrix<T>,
    graph: &RestrictedGraph,
    scheme: &WeightScheme<T>,
) -> Result<T> {
    let dim = q.dim();
    let alpha = scheme.alpha;
    let mut acc = vec![T::zero(); dim];
    let mut max_sq = T::zero();

    for i in 0..graph.vertex_count() {
        let neighbors = graph.neighbors(i);
        if neighbors.is_empty() {
            continue;
        }
        let beta = scheme.beta(neighbors.len());

        acc.iter_mut().for_each(|v| *v = T::zero());
        let data = q.as_slice();
        for &j in neighbors {
            let row = &data[j * dim..(j + 1) * dim];
            for (a, &v) in acc.iter_mut().zip(row) {
                *a = *a + v;
            }
        }

        let denom = beta * T::from_usize(neighbors.len()) + alpha;
        let anchor = q_hat.row(i);
        let row = q.row_mut(i);
        let mut moved = T::zero();
        let mut finite = true;
        for ((r, &a), &h) in row.iter_mut().zip(&acc).zip(anchor) {
            let next = (beta * a + alpha * h) / denom;
            let diff = next - *r;
            moved = moved + diff * diff;
            finite &= next.is_finite();
            *r = next;
        }
        if !finite {
            return Err(Error::NonFinite {
                token: q.vocab().token(i).to_owned(),
            });
        }
        if moved > max_sq {
            max_sq = moved;
        }
    }
    Ok(max_sq.sqrt())
}

/// Solves the fixed-point equations of the update directly.
///
/// For every connected vertex, `(alpha + sum_j beta_ij) q_i - sum_j beta_ij q_j = alpha qhat_i`.
/// The system matrix is shared by all dimensions and strictly diagonally
/// dominant, so it is factored once and solved against `d` right-hand sides.
/// Rows of isolated vertices are copied unchanged.
pub fn solve_exact<T: Real>(
    q_hat: &EmbeddingMatrix<T>,
    graph: &RestrictedGraph,
    scheme: &WeightScheme<T>,
) -> Result<EmbeddingMatrix<T>> {
    scheme.validate()?;
    check_graph(q_hat, graph)?;
    if q_hat.len() > EXACT_SOLVE_LIMIT {
        return Err(Error::TooLarge {
            size: q_hat.len(),
            limit: EXACT_SOLVE_LIMIT,
        });
    }

    let connected: Vec<usize> = (0..graph.vertex_count()).filter(|&i| graph.degree(i) > 0).collect();
    let mut out = q_hat.clone();
    if connected.is_empty() {
        return Ok(out);
    }
    let mut local = vec![usize::MAX; graph.vertex_count()];
    for (k, &i) in connected.iter().enumerate() {
        local[i] = k;
    }

    let m = connected.len();
    let dim = q_hat.dim();
    let alpha = scheme.alpha.to_f64();
    let mut system = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DMatrix::<f64>::zeros(m, dim);
    for (k, &i) in connected.iter().enumerate() {
        let neighbors = graph.neighbors(i);
        let beta = scheme.beta(neighbors.len()).to_f64();
        system[(k, k)] = alpha + beta * neighbors.len() as f64;
        for &j in neighbors {
            system[(k, local[j])] -= beta;
        }
        for (c, &v) in q_hat.row(i).iter().enumerate() {
            rhs[(k, c)] = alpha * v.to_f64();
        }
    }

    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Config("singular retrofitting system".into()))?;
    for (k, &i) in connected.iter().enumerate() {
        let row = out.row_mut(i);
        for (c, v) in row.iter_mut().enumerate() {
            *v = T::from_f64(solution[(k, c)]);
        }
    }
    out.check_finite()?;
    Ok(out)
}

/// `sum_i alpha ||q_i - qhat_i||^2 + sum_i sum_{j in N(i)} beta_ij ||q_i - q_j||^2`.
///
/// The inner sum runs over directed pairs, so each undirected edge contributes
/// once from each endpoint with that endpoint's weight. The anchor term uses
/// `alpha` for every vertex.
pub fn objective<T: Real>(
    q: &EmbeddingMatrix<T>,
    q_hat: &EmbeddingMatrix<T>,
    graph: &RestrictedGraph,
    scheme: &WeightScheme<T>,
) -> Result<T> {
    check_pair(q, q_hat)?;
    check_graph(q, graph)?;
    let mut total = T::zero();
    for i in 0..q.len() {
        total = total + scheme.alpha * squared_distance(q.row(i), q_hat.row(i));
        let neighbors = graph.neighbors(i);
        if neighbors.is_empty() {
            continue;
        }
        let beta = scheme.beta(neighbors.len());
        for &j in neighbors {
            total = total + beta * squared_distance(q.row(i), q.row(j));
        }
    }
    Ok(total)
}

/// Largest Euclidean displacement of any vertex that has at least one edge.
pub fn max_adjacent_change<T: Real>(
    prev: &EmbeddingMatrix<T>,
    next: &EmbeddingMatrix<T>,
    graph: &RestrictedGraph,
) -> Result<T> {
    check_pair(prev, next)?;
    check_graph(prev, graph)?;
    let max_sq = (0..prev.len())
        .filter(|&i| graph.degree(i) > 0)
        .map(|i| squared_distance(prev.row(i), next.row(i)))
        .fold(T::zero(), T::max);
    Ok(max_sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matrix(rows: Vec<Vec<f64>>) -> EmbeddingMatrix<f64> {
        EmbeddingMatrix::from_rows(
            rows.into_iter()
                .enumerate()
                .map(|(i, r)| (format!("w{i}"), r))
                .collect(),
        )
        .unwrap()
    }

    fn two_vertex() -> (EmbeddingMatrix<f64>, RestrictedGraph) {
        (
            matrix(vec![vec![0.0], vec![2.0]]),
            RestrictedGraph::from_edges(2, [(0, 1)]).unwrap(),
        )
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, d: usize, p: f64) -> (EmbeddingMatrix<f64>, RestrictedGraph) {
        let rows = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        (matrix(rows), RestrictedGraph::from_edges(n, edges).unwrap())
    }

    fn linf(a: &EmbeddingMatrix<f64>, b: &EmbeddingMatrix<f64>) -> f64 {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Edge terms counted once per undirected edge. With symmetric weights the
    /// update is the exact coordinate minimizer of this functional.
    fn edge_once_objective(
        q: &EmbeddingMatrix<f64>,
        q_hat: &EmbeddingMatrix<f64>,
        g: &RestrictedGraph,
        beta: f64,
    ) -> f64 {
        let anchor: f64 = (0..q.len()).map(|i| squared_distance(q.row(i), q_hat.row(i))).sum();
        let edges: f64 = g
            .edges()
            .map(|(i, j)| beta * squared_distance(q.row(i), q.row(j)))
            .sum();
        anchor + edges
    }

    #[test]
    fn empty_graph_is_identity() {
        let q_hat = matrix(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let out = retrofit(&q_hat, &RestrictedGraph::empty(2), &RetrofitConfig::default()).unwrap();
        assert_eq!(out.vectors, q_hat);
        assert!(out.changes.iter().all(|&c| c == 0.0));
        assert_eq!(
            solve_exact(&q_hat, &RestrictedGraph::empty(2), &WeightScheme::default()).unwrap(),
            q_hat
        );
    }

    #[test]
    fn two_vertex_fixed_point() {
        let (q_hat, g) = two_vertex();
        let exact = solve_exact(&q_hat, &g, &WeightScheme::default()).unwrap();
        assert!((exact.row(0)[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((exact.row(1)[0] - 4.0 / 3.0).abs() < 1e-12);

        let iterated = retrofit(&q_hat, &g, &RetrofitConfig::with_iterations(60)).unwrap();
        assert!(linf(&iterated.vectors, &exact) < 1e-12);
    }

    #[test]
    fn two_vertex_objective() {
        let (q_hat, g) = two_vertex();
        let q = matrix(vec![vec![2.0 / 3.0], vec![4.0 / 3.0]]);
        let psi = objective(&q, &q_hat, &g, &WeightScheme::default()).unwrap();
        assert!((psi - 16.0 / 9.0).abs() < 1e-12);
        assert_eq!(
            objective(&q_hat, &q_hat, &RestrictedGraph::empty(2), &WeightScheme::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn objective_edge_term_is_linear_in_beta() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (q_hat, g) = random_instance(&mut rng, 8, 3, 0.4);
        let q = retrofit(&q_hat, &g, &RetrofitConfig::with_iterations(2))
            .unwrap()
            .vectors;
        let anchor = objective(&q, &q_hat, &RestrictedGraph::empty(8), &WeightScheme::constant(1.0)).unwrap();
        let single = objective(&q, &q_hat, &g, &WeightScheme::constant(0.7)).unwrap() - anchor;
        let double = objective(&q, &q_hat, &g, &WeightScheme::constant(1.4)).unwrap() - anchor;
        assert!((double - 2.0 * single).abs() < 1e-12 * double.abs().max(1.0));
    }

    #[test]
    fn max_adjacent_change_examples() {
        let g = RestrictedGraph::from_edges(3, [(0, 1)]).unwrap();
        let prev = matrix(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![5.0, 5.0]]);
        assert_eq!(max_adjacent_change(&prev, &prev, &g).unwrap(), 0.0);

        let moved = matrix(vec![vec![0.3, 0.4], vec![1.0, 1.0], vec![5.0, 5.0]]);
        assert!((max_adjacent_change(&prev, &moved, &g).unwrap() - 0.5).abs() < 1e-15);

        let isolated_moved = matrix(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![-50.0, 9.0]]);
        assert_eq!(max_adjacent_change(&prev, &isolated_moved, &g).unwrap(), 0.0);
    }

    #[test]
    fn reported_changes_match_recomputed_displacement() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (q_hat, g) = random_instance(&mut rng, 20, 4, 0.2);
        let mut prev = q_hat.clone();
        for k in 1..=4 {
            let next = retrofit(&q_hat, &g, &RetrofitConfig::with_iterations(k)).unwrap();
            let expected = max_adjacent_change(&prev, &next.vectors, &g).unwrap();
            assert_eq!(next.changes[k - 1], expected);
            prev = next.vectors;
        }
    }

    #[test]
    fn tolerance_stops_early() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (q_hat, g) = random_instance(&mut rng, 30, 3, 0.2);
        let config = RetrofitConfig {
            iterations: 500,
            tolerance: Some(1e-6),
            ..RetrofitConfig::default()
        };
        let out = retrofit(&q_hat, &g, &config).unwrap();
        assert!(out.changes.len() < 500);
        assert!(*out.changes.last().unwrap() < 1e-6);
        assert!(out.changes[..out.changes.len() - 1].iter().all(|&c| c >= 1e-6));
    }

    #[test]
    fn rejects_bad_configuration_and_shapes() {
        let (q_hat, g) = two_vertex();
        assert!(matches!(
            retrofit(&q_hat, &g, &RetrofitConfig::with_iterations(0)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            retrofit(
                &q_hat,
                &g,
                &RetrofitConfig {
                    scheme: WeightScheme::constant(-1.0),
                    ..Default::default()
                }
            ),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            retrofit(&q_hat, &RestrictedGraph::empty(3), &RetrofitConfig::default()),
            Err(Error::Shape(_))
        ));
        let other = matrix(vec![vec![0.0, 1.0], vec![2.0, 3.0]]);
        assert!(matches!(
            objective(&other, &q_hat, &g, &WeightScheme::default()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn overflow_is_reported_with_token() {
        let q_hat = matrix(vec![vec![f64::MAX], vec![f64::MAX]]);
        let g = RestrictedGraph::from_edges(2, [(0, 1)]).unwrap();
        let config = RetrofitConfig {
            scheme: WeightScheme::constant(4.0),
            ..Default::default()
        };
        match retrofit(&q_hat, &g, &config) {
            Err(Error::NonFinite { token }) => assert_eq!(token, "w0"),
            other => panic!("expected non-finite error, got {other:?}"),
        }
    }

    #[test]
    fn exact_solver_size_guard() {
        let q_hat = matrix(vec![vec![0.0]; EXACT_SOLVE_LIMIT + 1]);
        let g = RestrictedGraph::empty(EXACT_SOLVE_LIMIT + 1);
        assert!(matches!(
            solve_exact(&q_hat, &g, &WeightScheme::default()),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn random_instances_reach_exact_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let n = rng.gen_range(2..=50);
            let d = rng.gen_range(1..=10);
            let (q_hat, g) = random_instance(&mut rng, n, d, 0.15);
            for scheme in [WeightScheme::inverse_degree(), WeightScheme::constant(0.5)] {
                let config = RetrofitConfig {
                    iterations: 200,
                    scheme,
                    tolerance: None,
                };
                let iterated = retrofit(&q_hat, &g, &config).unwrap().vectors;
                let exact = solve_exact(&q_hat, &g, &scheme).unwrap();
                assert!(linf(&iterated, &exact) < 1e-6);
            }
        }
    }

    #[test]
    fn gap_to_fixed_point_shrinks_after_first_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let (q_hat, g) = random_instance(&mut rng, 25, 3, 0.2);
            let exact = solve_exact(&q_hat, &g, &WeightScheme::default()).unwrap();
            let mut q = q_hat.clone();
            sweep(&mut q, &q_hat, &g, &WeightScheme::default()).unwrap();
            let mut gap = linf(&q, &exact);
            for _ in 0..15 {
                sweep(&mut q, &q_hat, &g, &WeightScheme::default()).unwrap();
                let next = linf(&q, &exact);
                assert!(next <= gap + 1e-15, "gap grew from {gap} to {next}");
                gap = next;
            }
        }
    }

    /// Reference: minimize a quadratic by recovering its Hessian and linear term
    /// from function values, then solving the normal equations by elimination.
    fn minimize_quadratic(n: usize, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let unit = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        let f0 = f(&vec![0.0; n]);
        let mut hess = vec![vec![0.0; n]; n];
        let mut lin = vec![0.0; n];
        for i in 0..n {
            let plus = f(&unit(i));
            let minus = f(&unit(i).iter().map(|v| -v).collect::<Vec<_>>());
            hess[i][i] = plus + minus - 2.0 * f0;
            lin[i] = (plus - minus) / 2.0;
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut v = unit(i);
                v[j] = 1.0;
                let h = f(&v) - f0 - lin[i] - lin[j] - 0.5 * (hess[i][i] + hess[j][j]);
                hess[i][j] = h;
                hess[j][i] = h;
            }
        }
        // hess * x = -lin
        let mut a: Vec<Vec<f64>> = hess
            .iter()
            .zip(&lin)
            .map(|(row, &b)| {
                let mut r = row.clone();
                r.push(-b);
                r
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .unwrap();
            a.swap(col, pivot);
            for r in 0..n {
                if r != col {
                    let factor = a[r][col] / a[col][col];
                    let pivot_row = a[col].clone();
                    for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= factor * p;
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n] / a[i][i]).collect()
    }

    #[test]
    fn exact_solution_minimizes_edge_once_functional_for_symmetric_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..5 {
            let (q_hat, g) = random_instance(&mut rng, 10, 1, 0.3);
            let beta = 0.8;
            let exact = solve_exact(&q_hat, &g, &WeightScheme::constant(beta)).unwrap();
            let minimizer = minimize_quadratic(10, |x| {
                let q = matrix(x.iter().map(|&v| vec![v]).collect());
                edge_once_objective(&q, &q_hat, &g, beta)
            });
            for (i, m) in minimizer.iter().enumerate() {
                assert!((exact.row(i)[0] - m).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn fixed_point_differs_from_minimizer_of_double_counted_objective() {
        // Gradient of the directed-pair objective doubles the edge weight, so
        // on the two-vertex instance its minimizer is (4/5, 6/5), not (2/3, 4/3).
        let (q_hat, g) = two_vertex();
        let scheme = WeightScheme::constant(1.0);
        let minimizer = minimize_quadratic(2, |x| {
            objective(&matrix(vec![vec![x[0]], vec![x[1]]]), &q_hat, &g, &scheme).unwrap()
        });
        assert!((minimizer[0] - 0.8).abs() < 1e-12 && (minimizer[1] - 1.2).abs() < 1e-12);
        let exact = solve_exact(&q_hat, &g, &scheme).unwrap();
        assert!((exact.row(0)[0] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn each_vertex_update_descends_edge_once_functional() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let (q_hat, g) = random_instance(&mut rng, 15, 3, 0.25);
            let beta = rng.gen_range(0.1..2.0);
            let mut q = q_hat.clone();
            for _ in 0..5 {
                for i in 0..15 {
                    if g.degree(i) == 0 {
                        continue;
                    }
                    let before = edge_once_objective(&q, &q_hat, &g, beta);
                    // Single-vertex update through a one-vertex view of the sweep.
                    let mut acc = [0.0; 3];
                    for &j in g.neighbors(i) {
                        for (a, v) in acc.iter_mut().zip(q.row(j)) {
                            *a += v;
                        }
                    }
                    let denom = beta * g.degree(i) as f64 + 1.0;
                    let anchor = q_hat.row(i).to_vec();
                    for (k, v) in q.row_mut(i).iter_mut().enumerate() {
                        *v = (beta * acc[k] + anchor[k]) / denom;
                    }
                    let after = edge_once_objective(&q, &q_hat, &g, beta);
                    assert!(after <= before + 1e-12);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn isolated_rows_untouched_and_deterministic(seed in any::<u64>(), n in 2usize..30, d in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (q_hat, g) = random_instance(&mut rng, n, d, 0.1);
            let a = retrofit(&q_hat, &g, &RetrofitConfig::default()).unwrap();
            let b = retrofit(&q_hat, &g, &RetrofitConfig::default()).unwrap();
            for (x, y) in a.vectors.as_slice().iter().zip(b.vectors.as_slice()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
            for i in (0..n).filter(|&i| g.degree(i) == 0) {
                for (x, y) in a.vectors.row(i).iter().zip(q_hat.row(i)) {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }

        #[test]
        fn columns_are_independent(seed in any::<u64>(), n in 2usize..20, d in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (q_hat, g) = random_instance(&mut rng, n, d, 0.2);
            let config = RetrofitConfig { scheme: WeightScheme::constant(0.6), ..Default::default() };
            let full = retrofit(&q_hat, &g, &config).unwrap().vectors;
            for c in 0..d {
                let column = matrix((0..n).map(|i| vec![q_hat.row(i)[c]]).collect());
                let single = retrofit(&column, &g, &config).unwrap().vectors;
                for i in 0..n {
                    prop_assert_eq!(single.row(i)[0].to_bits(), full.row(i)[c].to_bits());
                }
            }
        }
    }

    #[test]
    fn works_in_single_precision() {
        let q_hat = EmbeddingMatrix::<f32>::from_rows(vec![("a", vec![0.0f32]), ("b", vec![2.0])]).unwrap();
        let g = RestrictedGraph::from_edges(2, [(0, 1)]).unwrap();
        let out = retrofit(&q_hat, &g, &RetrofitConfig::with_iterations(40)).unwrap();
        assert!((out.vectors.row(0)[0] - 2.0 / 3.0).abs() < 1e-6);
        let exact = solve_exact(&q_hat, &g, &WeightScheme::default()).unwrap();
        assert!((exact.row(1)[0] - 4.0 / 3.0).abs() < 1e-6);
    }
}
