use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "retrofit",
    version,
    about = "Retrofit word vectors to semantic lexicons and evaluate them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Retrofit vectors to one or more lexicons and write the result.
    Retrofit(RetrofitArgs),
    /// Score vectors on a similarity, analogy or synonym-choice dataset.
    Eval(EvalArgs),
    /// Print lexicon graph sizes, optionally after restriction to a vocabulary.
    LexiconStats(LexiconStatsArgs),
    /// Write 2-D PCA coordinates of selected words.
    Project(ProjectArgs),
}

/// `inverse-degree` or a positive constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaArg {
    InverseDegree,
    Constant(f64),
}

impl std::fmt::Display for BetaArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BetaArg::InverseDegree => f.write_str("inverse-degree"),
            BetaArg::Constant(c) => write!(f, "{c}"),
        }
    }
}

fn parse_beta(s: &str) -> Result<BetaArg, String> {
    if s == "inverse-degree" {
        return Ok(BetaArg::InverseDegree);
    }
    match s.parse::<f64>() {
        Ok(c) if c > 0.0 && c.is_finite() => Ok(BetaArg::Constant(c)),
        _ => Err(format!("expected `inverse-degree` or a positive number, got `{s}`")),
    }
}

#[derive(Debug, clap::Args)]
pub struct RetrofitArgs {
    /// Input vectors in text format.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Lexicon edge list; repeat to combine several lexicons.
    #[arg(short, long = "lexicon", required = true)]
    pub lexicons: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Number of sweeps over the vocabulary.
    #[arg(short = 'n', long, default_value_t = 10)]
    pub iterations: usize,
    /// Scale input rows to unit length before retrofitting.
    #[arg(long)]
    pub normalize: bool,
    /// Match lexicon words to the vocabulary case-insensitively.
    #[arg(long)]
    pub fold_case: bool,
    /// Neighbor weight: `inverse-degree` or a constant.
    #[arg(long, default_value = "inverse-degree", value_parser = parse_beta)]
    pub beta: BetaArg,
    /// Anchor weight toward the input vector.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Stop once the largest per-sweep displacement drops below this.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Keep the first row of a repeated token instead of failing.
    #[arg(long)]
    pub keep_first: bool,
    /// Solve for the fixed point directly (small vocabularies only).
    #[arg(long)]
    pub exact: bool,
    /// Run manifest path [default: <output>.manifest].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Report each sweep's largest displacement on stderr.
    #[arg(short, long)]
    pub verbose: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Sim,
    Analogy,
    Choice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// q = a - b + c
    AMinusB,
    /// q = b - a + c
    BMinusA,
}

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    #[arg(short, long)]
    pub vectors: PathBuf,
    #[arg(short, long, value_enum)]
    pub task: Task,
    #[arg(short, long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub fold_case: bool,
    /// Analogy query orientation.
    #[arg(long, value_enum, default_value_t = Direction::AMinusB)]
    pub direction: Direction,
    #[arg(long)]
    pub keep_first: bool,
}

#[derive(Debug, clap::Args)]
pub struct LexiconStatsArgs {
    #[arg(short, long = "lexicon", required = true)]
    pub lexicons: Vec<PathBuf>,
    /// Word list or embedding file; the first field of each line is the word.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long)]
    pub fold_case: bool,
}

#[derive(Debug, clap::Args)]
pub struct ProjectArgs {
    #[arg(short, long)]
    pub vectors: PathBuf,
    /// Whitespace-separated words to project.
    #[arg(short, long)]
    pub tokens: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub keep_first: bool,
}
