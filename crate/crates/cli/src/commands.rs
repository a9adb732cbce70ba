use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use retrofit_core::eval::{
    eval_analogy, eval_choice, eval_similarity, parse_analogy, parse_choice, parse_similarity, project_2d,
    AnalogyDirection, EvalScore,
};
use retrofit_core::{
    parse_lexicon, read_embeddings, restrict_to_vocab, retrofit, solve_exact, write_embeddings, Config,
    DuplicatePolicy, EdgeWeight, Embeddings, Error, LexiconGraph, Vocabulary, Weights,
};

use crate::args::{BetaArg, Direction, EvalArgs, LexiconStatsArgs, ProjectArgs, RetrofitArgs, Task};
use crate::manifest::RunManifest;

/// A failed command, split by exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or flags (exit 1).
    Input(String),
    /// Broken internal invariant (exit 2).
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Internal(_) => 2,
        }
    }

    fn io(path: &Path, err: io::Error) -> Self {
        Failure::Input(format!("{}: {err}", path.display()))
    }

    /// Classifies a library error raised while handling `path`.
    fn core(path: &Path, err: Error) -> Self {
        let message = format!("{}: {err}", path.display());
        match err {
            Error::Shape(_) | Error::OrdinalOutOfRange { .. } => Failure::Internal(message),
            _ => Failure::Input(message),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "error: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

type CmdResult<T = ()> = Result<T, Failure>;

fn open(path: &Path) -> CmdResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Failure::io(path, e))
}

fn create(path: &Path) -> CmdResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::io(path, e))
}

fn policy(keep_first: bool) -> DuplicatePolicy {
    if keep_first {
        DuplicatePolicy::KeepFirst
    } else {
        DuplicatePolicy::Strict
    }
}

fn load_vectors(path: &Path, keep_first: bool) -> CmdResult<Embeddings> {
    let loaded = read_embeddings(open(path)?, policy(keep_first)).map_err(|e| Failure::core(path, e))?;
    if loaded.duplicates_skipped > 0 {
        eprintln!(
            "{}: skipped {} duplicate rows",
            path.display(),
            loaded.duplicates_skipped
        );
    }
    Ok(loaded.matrix)
}

fn load_lexicons(paths: &[PathBuf]) -> CmdResult<LexiconGraph> {
    let mut graph = LexiconGraph::new();
    for path in paths {
        let next = parse_lexicon(open(path)?).map_err(|e| Failure::core(path, e))?;
        graph = graph.union(&next);
    }
    Ok(graph)
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn run_retrofit(args: &RetrofitArgs) -> CmdResult {
    let started = Instant::now();
    let input = load_vectors(&args.input, args.keep_first)?;
    let q_hat = if args.normalize { input.normalize_rows() } else { input };
    let lexicon = load_lexicons(&args.lexicons)?;
    let graph = restrict_to_vocab(&lexicon, q_hat.vocab(), args.fold_case);

    let beta = match args.beta {
        BetaArg::InverseDegree => EdgeWeight::InverseDegree,
        BetaArg::Constant(c) => EdgeWeight::Constant(c),
    };
    let config = Config {
        iterations: args.iterations,
        scheme: Weights {
            alpha: args.alpha,
            beta,
        },
        tolerance: args.tolerance,
    };
    config.validate().map_err(|e| Failure::Input(e.to_string()))?;

    let (vectors, changes) = if args.exact {
        let q = solve_exact(&q_hat, &graph, &config.scheme).map_err(|e| Failure::core(&args.input, e))?;
        (q, Vec::new())
    } else {
        let out = retrofit(&q_hat, &graph, &config).map_err(|e| Failure::core(&args.input, e))?;
        (out.vectors, out.changes)
    };
    if args.verbose {
        for (k, change) in changes.iter().enumerate() {
            eprintln!("sweep={} max_adjacent_change={change:e}", k + 1);
        }
    }

    let mut sink = create(&args.output)?;
    write_embeddings(&vectors, &mut sink).map_err(|e| Failure::core(&args.output, e))?;
    drop(sink);

    let stats = graph.stats();
    let mut manifest = RunManifest::new("retrofit");
    manifest.flag("input", args.input.display());
    manifest.flag("lexicon", join(args.lexicons.iter().map(|p| p.display())));
    manifest.flag("output", args.output.display());
    manifest.flag("iterations", args.iterations);
    manifest.flag("normalize", args.normalize);
    manifest.flag("fold_case", args.fold_case);
    manifest.flag("beta", args.beta);
    manifest.flag("alpha", args.alpha);
    manifest.flag(
        "tolerance",
        args.tolerance.map_or("none".to_string(), |t| t.to_string()),
    );
    manifest.flag("keep_first", args.keep_first);
    manifest.flag("exact", args.exact);
    for path in std::iter::once(&args.input).chain(&args.lexicons) {
        manifest.digest(path).map_err(|e| Failure::io(path, e))?;
    }
    manifest.set("vocab_size", vectors.len());
    manifest.set("dim", vectors.dim());
    manifest.set("graph_words", stats.words);
    manifest.set("graph_edges", stats.edges);
    manifest.set("iterations", changes.len());
    manifest.set("changes", join(&changes));
    manifest.set("wall_clock_seconds", format!("{:.6}", started.elapsed().as_secs_f64()));

    let manifest_path = args.manifest.clone().unwrap_or_else(|| {
        let mut name = args.output.clone().into_os_string();
        name.push(".manifest");
        PathBuf::from(name)
    });
    manifest
        .write_to(create(&manifest_path)?)
        .map_err(|e| Failure::io(&manifest_path, e))?;

    println!(
        "words={} edges={} iterations={} final_change={}",
        stats.words,
        stats.edges,
        changes.len(),
        changes.last().map_or("none".to_string(), |c| format!("{c:e}"))
    );
    Ok(())
}

pub fn run_eval(args: &EvalArgs) -> CmdResult {
    let m = load_vectors(&args.vectors, args.keep_first)?;
    let dataset = open(&args.dataset)?;
    let ds_err = |e| Failure::core(&args.dataset, e);
    let result = match args.task {
        Task::Sim => eval_similarity(&m, &parse_similarity(dataset).map_err(ds_err)?, args.fold_case),
        Task::Analogy => {
            let direction = match args.direction {
                Direction::AMinusB => AnalogyDirection::AMinusB,
                Direction::BMinusA => AnalogyDirection::BMinusA,
            };
            eval_analogy(&m, &parse_analogy(dataset).map_err(ds_err)?, args.fold_case, direction)
        }
        Task::Choice => eval_choice(&m, &parse_choice(dataset).map_err(ds_err)?, args.fold_case),
    };
    match result {
        Ok(EvalScore { metric, used, skipped }) => {
            println!("metric={metric:.4} used={used} skipped={skipped}");
            Ok(())
        }
        Err(e) => Err(Failure::core(&args.dataset, e)),
    }
}

/// Reads the first field of every line, skipping an embedding `count dim` header.
fn read_word_list(path: &Path) -> CmdResult<Vocabulary> {
    let mut seen = HashSet::new();
    let mut words = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| Failure::Input(format!("{}: line {}: {e}", path.display(), i + 1)))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let is_header = i == 0 && fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok());
        if is_header {
            continue;
        }
        if let Some(word) = fields.first() {
            if seen.insert(word.to_string()) {
                words.push(word.to_string());
            }
        }
    }
    Vocabulary::new(words).map_err(|e| Failure::core(path, e))
}

pub fn run_lexicon_stats(args: &LexiconStatsArgs) -> CmdResult {
    let graph = load_lexicons(&args.lexicons)?;
    let stats = graph.stats();
    println!("words={} edges={}", stats.words, stats.edges);
    if let Some(path) = &args.vocab {
        let vocab = read_word_list(path)?;
        let restricted = restrict_to_vocab(&graph, &vocab, args.fold_case).stats();
        println!("restricted words={} edges={}", restricted.words, restricted.edges);
    }
    Ok(())
}

pub fn run_project(args: &ProjectArgs) -> CmdResult {
    let m = load_vectors(&args.vectors, args.keep_first)?;
    let text = std::fs::read_to_string(&args.tokens).map_err(|e| Failure::io(&args.tokens, e))?;
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let points = project_2d(&m, &tokens).map_err(|e| match e {
        Error::MissingTokens(missing) => Failure::Input(format!(
            "{}: tokens not in {}: {}",
            args.tokens.display(),
            args.vectors.display(),
            missing.join(" ")
        )),
        e => Failure::core(&args.tokens, e),
    })?;
    let mut sink = create(&args.output)?;
    for p in &points {
        writeln!(sink, "{}\t{}\t{}", p.token, p.x, p.y).map_err(|e| Failure::io(&args.output, e))?;
    }
    sink.flush().map_err(|e| Failure::io(&args.output, e))
}
