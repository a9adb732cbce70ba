//! Lexicon graphs: parsing edge lists, intersecting with a vocabulary, and
//! combining lexicons.
//!
//! The edge-list format has one head token per line followed by zero or more
//! neighbor tokens, all whitespace separated. Every head–neighbor pair becomes
//! an undirected, untyped edge.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use crate::embeddings::Vocabulary;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphStats {
    pub words: usize,
    pub edges: usize,
}

/// Undirected graph over token strings.
///
/// Symmetric, loop-free and deduplicated by construction. Heads listed without
/// neighbors are kept as isolated vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LexiconGraph {
    adjacency: BTreeMap<String, BTreeSet<String>>,
}

impl LexiconGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges<'a, I>(edges: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut graph = Self::new();
        for (a, b) in edges {
            graph.add_edge(a, b);
        }
        graph
    }

    pub fn add_vertex(&mut self, token: &str) {
        if !self.adjacency.contains_key(token) {
            self.adjacency.insert(token.to_owned(), BTreeSet::new());
        }
    }

    /// Inserts the undirected edge `a–b`. Self-edges only register the vertex.
    pub fn add_edge(&mut self, a: &str, b: &str) {
        self.add_vertex(a);
        if a == b {
            return;
        }
        self.add_vertex(b);
        self.adjacency.get_mut(a).unwrap().insert(b.to_owned());
        self.adjacency.get_mut(b).unwrap().insert(a.to_owned());
    }

    pub fn neighbors(&self, token: &str) -> impl Iterator<Item = &str> {
        self.adjacency
            .get(token)
            .into_iter()
            .flat_map(|set| set.iter().map(String::as_str))
    }

    pub fn degree(&self, token: &str) -> usize {
        self.adjacency.get(token).map_or(0, BTreeSet::len)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> {
        self.adjacency.keys().map(String::as_str)
    }

    /// Each undirected edge once, as `(smaller, larger)` in byte order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.adjacency.iter().flat_map(|(a, set)| {
            set.iter()
                .filter(move |b| a.as_str() < b.as_str())
                .map(move |b| (a.as_str(), b.as_str()))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            words: self.adjacency.len(),
            edges: self.edge_count(),
        }
    }

    pub fn union(&self, other: &LexiconGraph) -> LexiconGraph {
        let mut out = self.clone();
        for (token, neighbors) in &other.adjacency {
            out.adjacency
                .entry(token.clone())
                .or_default()
                .extend(neighbors.iter().cloned());
        }
        out
    }
}

pub fn parse_lexicon<R: BufRead>(mut reader: R) -> Result<LexiconGraph> {
    let mut graph = LexiconGraph::new();
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = std::str::from_utf8(&buf).map_err(|_| Error::Parse {
            line: line_no,
            message: "invalid UTF-8".into(),
        })?;
        let mut fields = line.split_whitespace();
        let Some(head) = fields.next() else {
            continue;
        };
        graph.add_vertex(head);
        for neighbor in fields {
            graph.add_edge(head, neighbor);
        }
    }
    Ok(graph)
}

/// Lexicon graph re-indexed by vocabulary ordinal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedGraph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl RestrictedGraph {
    /// Graph with `vertex_count` vertices and no edges.
    pub fn empty(vertex_count: usize) -> Self {
        RestrictedGraph {
            adjacency: vec![Vec::new(); vertex_count],
            edge_count: 0,
        }
    }

    /// Builds a graph from undirected ordinal pairs; loops and repeats are dropped.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (a, b) in edges {
            for ordinal in [a, b] {
                if ordinal >= vertex_count {
                    return Err(Error::OrdinalOutOfRange {
                        ordinal,
                        size: vertex_count,
                    });
                }
            }
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        Ok(Self::from_adjacency(adjacency))
    }

    fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Self {
        let mut total = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            total += list.len();
        }
        RestrictedGraph {
            adjacency,
            edge_count: total / 2,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, ordinal: usize) -> &[usize] {
        &self.adjacency[ordinal]
    }

    pub fn degree(&self, ordinal: usize) -> usize {
        self.adjacency[ordinal].len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| i < j).map(move |&j| (i, j)))
    }

    /// Vertex count here is the number of vertices with at least one edge.
    pub fn stats(&self) -> GraphStats {
        GraphStats {
            words: self.adjacency.iter().filter(|l| !l.is_empty()).count(),
            edges: self.edge_count,
        }
    }
}

/// Keeps only edges whose endpoints both resolve to vocabulary entries.
pub fn restrict_to_vocab(graph: &LexiconGraph, vocab: &Vocabulary, fold_case: bool) -> RestrictedGraph {
    let mut adjacency = vec![Vec::new(); vocab.len()];
    for (head, neighbors) in &graph.adjacency {
        let Some(i) = vocab.lookup(head, fold_case) else {
            continue;
        };
        for neighbor in neighbors {
            if let Some(j) = vocab.lookup(neighbor, fold_case) {
                if i != j {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
    }
    RestrictedGraph::from_adjacency(adjacency)
}
