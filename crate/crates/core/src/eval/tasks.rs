use crate::embeddings::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::eval::datasets::{AnalogyDataset, ChoiceDataset, SimilarityDataset};
use crate::eval::metrics::{cosine, spearman, ZERO_NORM};
use crate::scalar::{dot, Real};

/// Metric plus item bookkeeping for one benchmark run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalScore {
    pub metric: f64,
    pub used: usize,
    pub skipped: usize,
}

/// Query vector used for `a : b :: c : ?`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AnalogyDirection {
    /// `q = q_a - q_b + q_c`
    #[default]
    AMinusB,
    /// `q = q_b - q_a + q_c`, the usual 3CosAdd orientation.
    BMinusA,
}

/// Spearman correlation between model cosines and human scores.
///
/// Pairs with an unknown token are skipped, as are pairs containing a
/// zero-norm vector, whose cosine is undefined.
pub fn eval_similarity<T: Real>(m: &EmbeddingMatrix<T>, ds: &SimilarityDataset, fold_case: bool) -> Result<EvalScore> {
    let vocab = m.vocab();
    let mut model = Vec::new();
    let mut human = Vec::new();
    let mut skipped = 0;
    for item in ds.items() {
        let pair = vocab
            .lookup(&item.first, fold_case)
            .zip(vocab.lookup(&item.second, fold_case));
        match pair.map(|(i, j)| cosine(m.row(i), m.row(j))) {
            Some(Ok(sim)) => {
                model.push(sim.to_f64());
                human.push(item.score);
            }
            Some(Err(Error::ZeroNorm)) | None => skipped += 1,
            Some(Err(e)) => return Err(e),
        }
    }
    let used = model.len();
    if used < 2 {
        return Err(Error::InsufficientItems { used, skipped });
    }
    Ok(EvalScore {
        metric: spearman(&model, &human)?,
        used,
        skipped,
    })
}

fn row_norms<T: Real>(m: &EmbeddingMatrix<T>) -> Vec<T> {
    (0..m.len()).map(|i| dot(m.row(i), m.row(i)).sqrt()).collect()
}

/// Vector-offset analogy accuracy.
///
/// The prediction is the vocabulary entry, other than `a`, `b` and `c`, with
/// the highest cosine to the query; ties go to the lowest ordinal. Zero-norm
/// rows are never predicted. Items with an unknown token, or whose query
/// vector is zero, are skipped.
pub fn eval_analogy<T: Real>(
    m: &EmbeddingMatrix<T>,
    ds: &AnalogyDataset,
    fold_case: bool,
    direction: AnalogyDirection,
) -> Result<EvalScore> {
    let vocab = m.vocab();
    let norms = row_norms(m);
    let eps = T::from_f64(ZERO_NORM);
    let mut query = vec![T::zero(); m.dim()];
    let (mut used, mut skipped, mut correct) = (0, 0, 0);

    for item in ds.items() {
        let ords: Option<Vec<usize>> = [&item.a, &item.b, &item.c, &item.d]
            .iter()
            .map(|t| vocab.lookup(t, fold_case))
            .collect();
        let Some(ords) = ords else {
            skipped += 1;
            continue;
        };
        let (a, b, c, d) = (ords[0], ords[1], ords[2], ords[3]);
        let (plus, minus) = match direction {
            AnalogyDirection::AMinusB => (a, b),
            AnalogyDirection::BMinusA => (b, a),
        };
        for (k, q) in query.iter_mut().enumerate() {
            *q = m.row(plus)[k] - m.row(minus)[k] + m.row(c)[k];
        }
        let query_norm = dot(&query, &query).sqrt();
        if query_norm < eps {
            skipped += 1;
            continue;
        }

        let mut best: Option<(usize, T)> = None;
        for (i, &norm) in norms.iter().enumerate() {
            if i == a || i == b || i == c || norm < eps {
                continue;
            }
            let score = dot(m.row(i), &query) / (norm * query_norm);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        used += 1;
        if best.is_some_and(|(i, _)| i == d) {
            correct += 1;
        }
    }

    if used == 0 {
        return Err(Error::InsufficientItems { used, skipped });
    }
    Ok(EvalScore {
        metric: correct as f64 / used as f64,
        used,
        skipped,
    })
}

/// Multiple-choice synonym accuracy.
///
/// Unknown or zero-norm candidates score negative infinity; ties go to the
/// lowest candidate index, so an item whose candidates are all unknown
/// predicts index 0. Items with an unknown or zero-norm target are skipped.
pub fn eval_choice<T: Real>(m: &EmbeddingMatrix<T>, ds: &ChoiceDataset, fold_case: bool) -> Result<EvalScore> {
    let vocab = m.vocab();
    let eps = T::from_f64(ZERO_NORM);
    let (mut used, mut skipped, mut correct) = (0, 0, 0);
    for item in ds.items() {
        let target = match vocab.lookup(&item.target, fold_case) {
            Some(t) if dot(m.row(t), m.row(t)).sqrt() >= eps => m.row(t),
            _ => {
                skipped += 1;
                continue;
            }
        };
        let mut best = (0, T::neg_infinity());
        for (idx, candidate) in item.candidates.iter().enumerate() {
            let score = vocab
                .lookup(candidate, fold_case)
                .and_then(|c| cosine(target, m.row(c)).ok())
                .unwrap_or(T::neg_infinity());
            if score > best.1 {
                best = (idx, score);
            }
        }
        used += 1;
        if best.0 == item.gold {
            correct += 1;
        }
    }
    if used == 0 {
        return Err(Error::InsufficientItems { used, skipped });
    }
    Ok(EvalScore {
        metric: correct as f64 / used as f64,
        used,
        skipped,
    })
}
