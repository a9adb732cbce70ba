//! Lexicon prior for use inside an external training loop.
//!
//! The log-prior (without its normalization constant) is
//! `-gamma * sum_i sum_{j in N(i)} beta_ij ||q_i - q_j||^2`, with each
//! undirected edge visited from both endpoints. Two ways of applying it during
//! training are provided: a gradient ascent step on the log-prior restricted
//! to recently seen words ([`lazy_step`]), and a single retrofitting sweep
//! against a fixed anchor ([`periodic_step`]). Calling them every `k` tokens
//! is left to the trainer.

use std::collections::BTreeSet;

use crate::embeddings::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::lexicon::RestrictedGraph;
use crate::retrofit::{self, WeightScheme};
use crate::scalar::{squared_distance, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PriorConfig<T> {
    pub gamma: T,
    pub scheme: WeightScheme<T>,
    /// Update period in training tokens. Carried for the trainer; the step
    /// functions here do not count tokens.
    pub period: usize,
    pub learning_rate: T,
}

impl<T: Real> Default for PriorConfig<T> {
    fn default() -> Self {
        PriorConfig {
            gamma: T::one(),
            scheme: WeightScheme::default(),
            period: 1,
            learning_rate: T::from_f64(0.01),
        }
    }
}

impl<T: Real> PriorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= T::zero() && self.gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        if self.period == 0 {
            return Err(Error::Config("update period must be at least 1".into()));
        }
        if !(self.learning_rate > T::zero() && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        self.scheme.validate()
    }
}

fn check_shape<T: Real>(q: &EmbeddingMatrix<T>, graph: &RestrictedGraph) -> Result<()> {
    if graph.vertex_count() != q.len() {
        return Err(Error::Shape(format!(
            "graph has {} vertices, matrix has {} rows",
            graph.vertex_count(),
            q.len()
        )));
    }
    Ok(())
}

pub fn log_prior<T: Real>(q: &EmbeddingMatrix<T>, graph: &RestrictedGraph, config: &PriorConfig<T>) -> Result<T> {
    config.validate()?;
    check_shape(q, graph)?;
    let mut total = T::zero();
    for i in 0..q.len() {
        let neighbors = graph.neighbors(i);
        if neighbors.is_empty() {
            continue;
        }
        let beta = config.scheme.beta(neighbors.len());
        for &j in neighbors {
            total = total + beta * squared_distance(q.row(i), q.row(j));
        }
    }
    Ok(-(config.gamma * total))
}

/// Row `i` is `-gamma * sum_{j in N(i)} 2 (beta_ij + beta_ji) (q_i - q_j)`.
pub fn log_prior_gradient<T: Real>(
    q: &EmbeddingMatrix<T>,
    graph: &RestrictedGraph,
    config: &PriorConfig<T>,
) -> Result<EmbeddingMatrix<T>> {
    config.validate()?;
    check_shape(q, graph)?;
    let dim = q.dim();
    let two = T::from_f64(2.0);
    let mut grad = vec![T::zero(); q.len() * dim];
    for i in 0..q.len() {
        let neighbors = graph.neighbors(i);
        if neighbors.is_empty() {
            continue;
        }
        let beta_i = config.scheme.beta(neighbors.len());
        let out = &mut grad[i * dim..(i + 1) * dim];
        for &j in neighbors {
            let weight = -config.gamma * two * (beta_i + config.scheme.beta(graph.degree(j)));
            for ((g, &a), &b) in out.iter_mut().zip(q.row(i)).zip(q.row(j)) {
                *g = *g + weight * (a - b);
            }
        }
    }
    let grad = EmbeddingMatrix::from_parts_unchecked(q.vocab().clone(), dim, grad);
    grad.check_finite()?;
    Ok(grad)
}

/// Gradient ascent step on the log-prior for the `touched` rows only.
///
/// The gradient is evaluated once at the incoming `q`, so the result does not
/// depend on the order of `touched`.
pub fn lazy_step<T: Real>(
    q: &EmbeddingMatrix<T>,
    graph: &RestrictedGraph,
    config: &PriorConfig<T>,
    touched: &BTreeSet<usize>,
) -> Result<EmbeddingMatrix<T>> {
    check_shape(q, graph)?;
    if let Some(&ordinal) = touched.iter().next_back().filter(|&&o| o >= q.len()) {
        return Err(Error::OrdinalOutOfRange { ordinal, size: q.len() });
    }
    let mut out = q.clone();
    if touched.is_empty() {
        config.validate()?;
        return Ok(out);
    }
    let grad = log_prior_gradient(q, graph, config)?;
    for &i in touched {
        for (v, &g) in out.row_mut(i).iter_mut().zip(grad.row(i)) {
            *v = *v + config.learning_rate * g;
        }
    }
    out.check_finite()?;
    Ok(out)
}

/// One retrofitting sweep of `q` anchored at `q_hat`.
pub fn periodic_step<T: Real>(
    q: &EmbeddingMatrix<T>,
    q_hat: &EmbeddingMatrix<T>,
    graph: &RestrictedGraph,
    scheme: &WeightScheme<T>,
) -> Result<EmbeddingMatrix<T>> {
    scheme.validate()?;
    check_shape(q, graph)?;
    if q.len() != q_hat.len() || q.dim() != q_hat.dim() {
        return Err(Error::Shape(format!(
            "{}x{} vs {}x{}",
            q.len(),
            q.dim(),
            q_hat.len(),
            q_hat.dim()
        )));
    }
    let mut out = q.clone();
    retrofit::sweep(&mut out, q_hat, graph, scheme)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrofit::{retrofit, solve_exact, RetrofitConfig};
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

    fn unit_beta() -> PriorConfig<f64> {
        PriorConfig {
            scheme: WeightScheme::constant(1.0),
            ..Default::default()
        }
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, d: usize) -> (EmbeddingMatrix<f64>, RestrictedGraph) {
        let rows = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(0.3))
            .collect();
        (matrix(rows), RestrictedGraph::from_edges(n, edges).unwrap())
    }

    fn central_difference(
        q: &EmbeddingMatrix<f64>,
        g: &RestrictedGraph,
        c: &PriorConfig<f64>,
        i: usize,
        k: usize,
    ) -> f64 {
        let h = 1e-5;
        let shifted = |delta: f64| {
            let mut rows: Vec<Vec<f64>> = (0..q.len()).map(|r| q.row(r).to_vec()).collect();
            rows[i][k] += delta;
            log_prior(&matrix(rows), g, c).unwrap()
        };
        (shifted(h) - shifted(-h)) / (2.0 * h)
    }

    #[test]
    fn log_prior_examples() {
        let g = RestrictedGraph::from_edges(2, [(0, 1)]).unwrap();
        let same = matrix(vec![vec![0.5, 1.0], vec![0.5, 1.0]]);
        assert_eq!(log_prior(&same, &g, &PriorConfig::default()).unwrap(), 0.0);

        let q = matrix(vec![vec![0.0], vec![1.0]]);
        let no_prior = PriorConfig {
            gamma: 0.0,
            ..PriorConfig::default()
        };
        assert_eq!(log_prior(&q, &g, &no_prior).unwrap(), 0.0);
        assert_eq!(log_prior(&q, &g, &unit_beta()).unwrap(), -2.0);
    }

    #[test]
    fn gradient_of_two_vertex_instance() {
        let g = RestrictedGraph::from_edges(2, [(0, 1)]).unwrap();
        let q = matrix(vec![vec![0.0], vec![1.0]]);
        let grad = log_prior_gradient(&q, &g, &unit_beta()).unwrap();
        // -1 * 2 * (1 + 1) * (0 - 1) = 4 and its mirror.
        assert_eq!(grad.row(0), &[4.0]);
        assert_eq!(grad.row(1), &[-4.0]);
        for i in 0..2 {
            assert!((central_difference(&q, &g, &unit_beta(), i, 0) - grad.row(i)[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn gradient_zero_for_identical_rows_and_isolated_vertices() {
        let g = RestrictedGraph::from_edges(3, [(0, 1)]).unwrap();
        let q = matrix(vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![7.0, 7.0]]);
        let grad = log_prior_gradient(&q, &g, &PriorConfig::default()).unwrap();
        assert!(grad.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_matches_finite_differences_with_asymmetric_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (q, g) = random_instance(&mut rng, 8, 3);
            let config = PriorConfig {
                gamma: rng.gen_range(0.1..2.0),
                ..PriorConfig::default()
            };
            let grad = log_prior_gradient(&q, &g, &config).unwrap();
            for i in 0..8 {
                for k in 0..3 {
                    let fd = central_difference(&q, &g, &config, i, k);
                    let an = grad.row(i)[k];
                    assert!((fd - an).abs() <= 1e-5 * an.abs().max(1.0), "{fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn lazy_step_examples() {
        let g = RestrictedGraph::from_edges(2, [(0, 1)]).unwrap();
        let q = matrix(vec![vec![0.0], vec![1.0]]);
        assert_eq!(lazy_step(&q, &g, &unit_beta(), &BTreeSet::new()).unwrap(), q);

        let same = matrix(vec![vec![3.0], vec![3.0]]);
        let all: BTreeSet<usize> = [0, 1].into();
        assert_eq!(lazy_step(&same, &g, &unit_beta(), &all).unwrap(), same);

        let stepped = lazy_step(&q, &g, &unit_beta(), &all).unwrap();
        assert!((stepped.row(0)[0] - stepped.row(1)[0]).abs() < 1.0);

        let only_first = lazy_step(&q, &g, &unit_beta(), &[0].into()).unwrap();
        assert_eq!(only_first.row(1), q.row(1));
        assert!(only_first.row(0)[0] > 0.0);

        assert!(matches!(
            lazy_step(&q, &g, &unit_beta(), &[2].into()),
            Err(Error::OrdinalOutOfRange { ordinal: 2, size: 2 })
        ));
    }

    #[test]
    fn lazy_step_ascends_log_prior() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let (q, g) = random_instance(&mut rng, 12, 4);
            let config = PriorConfig {
                learning_rate: 1e-3,
                ..PriorConfig::default()
            };
            let all: BTreeSet<usize> = (0..12).collect();
            let before = log_prior(&q, &g, &config).unwrap();
            let after = log_prior(&lazy_step(&q, &g, &config, &all).unwrap(), &g, &config).unwrap();
            assert!(after >= before);
            assert!(after <= 0.0);
        }
    }

    #[test]
    fn lazy_step_vanishes_with_learning_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (q, g) = random_instance(&mut rng, 6, 2);
        let all: BTreeSet<usize> = (0..6).collect();
        let mut previous = f64::INFINITY;
        for rate in [1e-2, 1e-4, 1e-6, 1e-8] {
            let config = PriorConfig {
                learning_rate: rate,
                ..PriorConfig::default()
            };
            let moved = lazy_step(&q, &g, &config, &all).unwrap();
            let gap = q
                .as_slice()
                .iter()
                .zip(moved.as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(gap < previous);
            previous = gap;
        }
        assert!(previous < 1e-6);
    }

    #[test]
    fn periodic_step_is_one_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (q_hat, g) = random_instance(&mut rng, 15, 3);
        let scheme = WeightScheme::default();
        let once = periodic_step(&q_hat, &q_hat, &g, &scheme).unwrap();
        let reference = retrofit(&q_hat, &g, &RetrofitConfig::with_iterations(1))
            .unwrap()
            .vectors;
        assert_eq!(once, reference);
        for (a, b) in once.as_slice().iter().zip(reference.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }

        let exact = solve_exact(&q_hat, &g, &scheme).unwrap();
        let mut q = q_hat.clone();
        for _ in 0..200 {
            q = periodic_step(&q, &q_hat, &g, &scheme).unwrap();
        }
        let gap = q
            .as_slice()
            .iter()
            .zip(exact.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-9);

        let unchanged = periodic_step(&q_hat, &q_hat, &RestrictedGraph::empty(15), &scheme).unwrap();
        assert_eq!(unchanged, q_hat);
    }

    #[test]
    fn rejects_invalid_configuration() {
        let q = matrix(vec![vec![0.0], vec![1.0]]);
        let g = RestrictedGraph::empty(2);
        for bad in [
            PriorConfig {
                gamma: -1.0,
                ..PriorConfig::default()
            },
            PriorConfig {
                period: 0,
                ..PriorConfig::default()
            },
            PriorConfig {
                learning_rate: 0.0,
                ..PriorConfig::default()
            },
        ] {
            assert!(matches!(log_prior(&q, &g, &bad), Err(Error::Config(_))));
        }
        assert!(matches!(
            log_prior(&q, &RestrictedGraph::empty(3), &PriorConfig::default()),
            Err(Error::Shape(_))
        ));
    }
}
