//! Benchmark file formats.
//!
//! * similarity: `w1 w2 score` per line
//! * analogy: `a b c d` per line
//! * choice: `target | cand1 cand2 ... | gold_index` per line, gold index 0-based
//!
//! Blank lines are ignored everywhere.

use std::io::BufRead;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityItem {
    pub first: String,
    pub second: String,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityDataset {
    items: Vec<SimilarityItem>,
}

impl SimilarityDataset {
    pub fn new(items: Vec<SimilarityItem>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = items.iter().find(|i| !i.score.is_finite()) {
            return Err(Error::Config(format!(
                "non-finite score for pair ({}, {})",
                bad.first, bad.second
            )));
        }
        Ok(SimilarityDataset { items })
    }

    pub fn items(&self) -> &[SimilarityItem] {
        &self.items
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalogyItem {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalogyDataset {
    items: Vec<AnalogyItem>,
}

impl AnalogyDataset {
    pub fn new(items: Vec<AnalogyItem>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyInput);
        }
        if items
            .iter()
            .any(|i| [&i.a, &i.b, &i.c, &i.d].iter().any(|t| t.is_empty()))
        {
            return Err(Error::Config("analogy tokens must be non-empty".into()));
        }
        Ok(AnalogyDataset { items })
    }

    pub fn items(&self) -> &[AnalogyItem] {
        &self.items
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceItem {
    pub target: String,
    pub candidates: Vec<String>,
    pub gold: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceDataset {
    items: Vec<ChoiceItem>,
}

impl ChoiceDataset {
    pub fn new(items: Vec<ChoiceItem>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyInput);
        }
        for item in &items {
            if item.candidates.len() < 2 {
                return Err(Error::Config(format!(
                    "item `{}` has fewer than 2 candidates",
                    item.target
                )));
            }
            if item.gold >= item.candidates.len() {
                return Err(Error::Config(format!(
                    "item `{}`: gold index {} out of range",
                    item.target, item.gold
                )));
            }
        }
        Ok(ChoiceDataset { items })
    }

    pub fn items(&self) -> &[ChoiceItem] {
        &self.items
    }
}

/// Calls `f` with the 1-based line number and content of every non-blank line.
fn for_each_line<R: BufRead>(mut reader: R, mut f: impl FnMut(usize, &str) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            return Ok(());
        }
        line_no += 1;
        let line = std::str::from_utf8(&buf).map_err(|_| Error::Parse {
            line: line_no,
            message: "invalid UTF-8".into(),
        })?;
        if !line.trim().is_empty() {
            f(line_no, line)?;
        }
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_similarity<R: BufRead>(reader: R) -> Result<SimilarityDataset> {
    let mut items = Vec::new();
    for_each_line(reader, |line_no, line| {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [first, second, score] = fields[..] else {
            return Err(parse_error(
                line_no,
                format!("expected `w1 w2 score`, found {} fields", fields.len()),
            ));
        };
        let score: f64 = score
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| parse_error(line_no, format!("invalid score `{score}`")))?;
        items.push(SimilarityItem {
            first: first.to_owned(),
            second: second.to_owned(),
            score,
        });
        Ok(())
    })?;
    SimilarityDataset::new(items)
}

pub fn parse_analogy<R: BufRead>(reader: R) -> Result<AnalogyDataset> {
    let mut items = Vec::new();
    for_each_line(reader, |line_no, line| {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [a, b, c, d] = fields[..] else {
            return Err(parse_error(
                line_no,
                format!("expected `a b c d`, found {} fields", fields.len()),
            ));
        };
        items.push(AnalogyItem {
            a: a.to_owned(),
            b: b.to_owned(),
            c: c.to_owned(),
            d: d.to_owned(),
        });
        Ok(())
    })?;
    AnalogyDataset::new(items)
}

pub fn parse_choice<R: BufRead>(reader: R) -> Result<ChoiceDataset> {
    let mut items = Vec::new();
    for_each_line(reader, |line_no, line| {
        let parts: Vec<&str> = line.split('|').collect();
        let [target, candidates, gold] = parts[..] else {
            return Err(parse_error(line_no, "expected `target | candidates | gold`"));
        };
        let target: Vec<&str> = target.split_whitespace().collect();
        let [target] = target[..] else {
            return Err(parse_error(line_no, "expected exactly one target token"));
        };
        let candidates: Vec<String> = candidates.split_whitespace().map(str::to_owned).collect();
        if candidates.len() < 2 {
            return Err(parse_error(line_no, "expected at least 2 candidates"));
        }
        let gold: usize = gold
            .trim()
            .parse()
            .map_err(|_| parse_error(line_no, format!("invalid gold index `{}`", gold.trim())))?;
        if gold >= candidates.len() {
            return Err(parse_error(line_no, format!("gold index {gold} out of range")));
        }
        items.push(ChoiceItem {
            target: target.to_owned(),
            candidates,
            gold,
        });
        Ok(())
    })?;
    ChoiceDataset::new(items)
}
