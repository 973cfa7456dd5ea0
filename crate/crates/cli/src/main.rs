//! `textdist` — inter-textual distances, corpus matrices, clustering, and
//! fake-text generation from the command line.
//!
//! Exit codes are a stable contract: 0 on success, 2 for I/O and format
//! problems, 3 for measure-domain violations (empty texts, unequal lengths
//! for `d2`, bad discount factors), 4 when a size cap is exceeded.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use textdist_core::{
    agglomerate, assignment_distance, cut, directed_distance, onegram_distance,
    pairwise_matrix_sweep, position_match, serialize_dendrogram, symmetric_distance, Discount,
    DistanceMatrix, Encoding, Error, Linkage, MarkovModel, PositionMatchTable, Seed, Text,
    TreeFormat,
};

#[derive(Parser)]
#[command(
    name = "textdist",
    version,
    about = "Global, discounting-based distances between texts",
    after_help = "Exit codes: 0 success, 2 I/O or format error, 3 measure-domain error, 4 cap exceeded."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the distance between two text files
    Pair(PairArgs),
    /// Compute the pairwise d4 matrix of a corpus and write it as CSV
    Matrix(MatrixArgs),
    /// Cluster a distance-matrix CSV into a dendrogram
    Cluster(ClusterArgs),
    /// Print the token stream of one file, one token per line
    Tokenize(TokenizeArgs),
    /// Generate fake texts from a Markov model trained on a corpus
    Generate(GenerateArgs),
    /// Inspect the position match of a pair of texts
    Match(MatchArgs),
}

/// Options shared by every command that reads text files.
#[derive(Args)]
struct InputArgs {
    /// Per-text token cap; longer inputs are an error
    #[arg(long, default_value_t = textdist_core::DEFAULT_TOKEN_CAP)]
    max_tokens: usize,
    /// Fall back to Latin-1 when a file is not valid UTF-8
    #[arg(long)]
    latin1: bool,
    /// Strict mode: treat only ASCII letters as letters
    #[arg(long)]
    ascii: bool,
}

impl InputArgs {
    fn options(&self) -> textdist_core::TokenizeOptions {
        textdist_core::TokenizeOptions {
            ascii_only: self.ascii,
            max_tokens: self.max_tokens,
        }
    }

    fn encoding(&self) -> Encoding {
        if self.latin1 {
            Encoding::Utf8OrLatin1
        } else {
            Encoding::Utf8
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    D4,
    D3,
    D2,
    Onegram,
}

#[derive(Clone, Copy, ValueEnum)]
enum LinkageArg {
    Average,
    Ward,
}

impl From<LinkageArg> for Linkage {
    fn from(value: LinkageArg) -> Linkage {
        match value {
            LinkageArg::Average => Linkage::Average,
            LinkageArg::Ward => Linkage::Ward,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Newick,
    Json,
}

impl From<FormatArg> for TreeFormat {
    fn from(value: FormatArg) -> TreeFormat {
        match value {
            FormatArg::Newick => TreeFormat::Newick,
            FormatArg::Json => TreeFormat::Json,
        }
    }
}

#[derive(Args)]
struct PairArgs {
    /// First text file
    a: PathBuf,
    /// Second text file
    b: PathBuf,
    /// Discount factor in [0, 1); required for d2/d3/d4
    #[arg(long)]
    lambda: Option<f64>,
    /// Distance measure to print
    #[arg(long, value_enum, default_value_t = MeasureArg::D4)]
    measure: MeasureArg,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct MatrixArgs {
    /// Text files and/or directories of .txt files (at least two texts)
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Discount factor in [0, 1)
    #[arg(long)]
    lambda: Option<f64>,
    /// Comma-separated discount factors; emits one CSV per value
    #[arg(long, value_delimiter = ',', conflicts_with = "lambda")]
    sweep: Option<Vec<f64>>,
    /// Output CSV path (with --sweep, a per-lambda suffix is inserted)
    #[arg(long)]
    out: PathBuf,
    /// Parallel pair workers (default: one per core)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct ClusterArgs {
    /// Distance-matrix CSV, as written by `textdist matrix`
    matrix: PathBuf,
    /// Cluster merge criterion
    #[arg(long, value_enum, default_value_t = LinkageArg::Average)]
    linkage: LinkageArg,
    /// Dendrogram file format
    #[arg(long, value_enum, default_value_t = FormatArg::Newick)]
    format: FormatArg,
    /// Output dendrogram path
    #[arg(long)]
    out: PathBuf,
    /// Also print a flat partition into this many clusters
    #[arg(long)]
    cut: Option<usize>,
}

#[derive(Args)]
struct TokenizeArgs {
    /// Text file to tokenize
    file: PathBuf,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct GenerateArgs {
    /// Directory of .txt training files
    #[arg(long)]
    corpus: PathBuf,
    /// Tokens per generated text (at least 3)
    #[arg(long)]
    length: usize,
    /// Base seed; file k uses seed + k
    #[arg(long)]
    seed: u64,
    /// Number of texts to generate
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Output directory for gen-<seed>-<k>.txt files
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct MatchArgs {
    /// First text file (table rows)
    a: PathBuf,
    /// Second text file (table columns)
    b: PathBuf,
    /// Discount factor in [0, 1)
    #[arg(long)]
    lambda: f64,
    /// Emit the full scaled position-match table as CSV instead of the
    /// single value at the first index pair
    #[arg(long)]
    dump_table: bool,
    /// Write the table here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
}

enum CliError {
    Core(Error),
    /// A core error tied to one input file.
    File {
        path: PathBuf,
        source: Error,
    },
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::File { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) | CliError::File { source: e, .. } => match e {
                Error::Io(_)
                | Error::Encoding(_)
                | Error::Internal(_)
                | Error::MatrixFormat { .. }
                | Error::DuplicateLabel { .. }
                | Error::TooFewTexts { .. }
                | Error::DendrogramFormat(_) => 2,
                Error::EmptyText { .. }
                | Error::InvalidDiscount { .. }
                | Error::UnequalLengths { .. }
                | Error::IndexOutOfRange { .. }
                | Error::NotSquare { .. }
                | Error::InvalidCost { .. }
                | Error::InvalidCut { .. }
                | Error::CorpusTooShort { .. }
                | Error::GenerationTooShort { .. } => 3,
                Error::TokenCapExceeded { .. }
                | Error::TableTooLarge { .. }
                | Error::ExhaustiveSearchTooLarge { .. } => 4,
            },
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("textdist: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Pair(args) => run_pair(args),
        Command::Matrix(args) => run_matrix(args),
        Command::Cluster(args) => run_cluster(args),
        Command::Tokenize(args) => run_tokenize(args),
        Command::Generate(args) => run_generate(args),
        Command::Match(args) => run_match(args),
    }
}

fn read_input(path: &Path, input: &InputArgs) -> Result<Text, CliError> {
    textdist_core::read_text_file(path, input.encoding(), &input.options()).map_err(|source| {
        CliError::File {
            path: path.to_owned(),
            source,
        }
    })
}

fn discount(lambda: f64) -> Result<Discount, CliError> {
    Ok(Discount::new(lambda)?)
}

fn run_pair(args: PairArgs) -> Result<(), CliError> {
    let a = read_input(&args.a, &args.input)?;
    let b = read_input(&args.b, &args.input)?;
    let value = match args.measure {
        MeasureArg::Onegram => onegram_distance(&a, &b)?,
        other => {
            let lambda = args
                .lambda
                .ok_or_else(|| CliError::Usage("--lambda is required for d2/d3/d4".to_owned()))?;
            let d = discount(lambda)?;
            match other {
                MeasureArg::D4 => symmetric_distance(&a, &b, d)?.value,
                MeasureArg::D3 => directed_distance(&a, &b, d)?.value,
                MeasureArg::D2 => assignment_distance(&a, &b, d)?.value,
                MeasureArg::Onegram => unreachable!("handled above"),
            }
        }
    };
    println!("{value:.6}");
    Ok(())
}

/// Expands files and directories into a sorted list of .txt inputs.
fn collect_input_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for path in inputs {
        if path.is_dir() {
            let mut in_dir = Vec::new();
            let entries = fs::read_dir(path).map_err(|e| CliError::File {
                path: path.clone(),
                source: e.into(),
            })?;
            for entry in entries {
                let entry = entry.map_err(|e| CliError::File {
                    path: path.clone(),
                    source: e.into(),
                })?;
                let p = entry.path();
                if p.is_file() && p.extension().is_some_and(|ext| ext == "txt") {
                    in_dir.push(p);
                }
            }
            // Directory iteration order is OS-dependent; sort for
            // reproducible corpora.
            in_dir.sort();
            files.extend(in_dir);
        } else {
            files.push(path.clone());
        }
    }
    Ok(files)
}

/// Reads a whole corpus, printing a diagnostic for every bad file before
/// failing with the first error.
fn read_corpus(
    paths: &[PathBuf],
    input: &InputArgs,
    require_non_empty: bool,
) -> Result<Vec<Text>, CliError> {
    let mut texts = Vec::with_capacity(paths.len());
    let mut failures: Vec<CliError> = Vec::new();
    for path in paths {
        match read_input(path, input) {
            Ok(t) if require_non_empty && t.is_empty() => {
                let e = CliError::Core(Error::EmptyText {
                    id: t.id().to_owned(),
                });
                eprintln!("textdist: {e}");
                failures.push(e);
            }
            Ok(t) => texts.push(t),
            Err(e) => {
                eprintln!("textdist: {e}");
                failures.push(e);
            }
        }
    }
    match failures.into_iter().next() {
        Some(first) => Err(first),
        None => Ok(texts),
    }
}

/// Lambda rendering used in sweep file names: minimal decimals.
fn format_lambda(l: f64) -> String {
    let mut s = format!("{l:.6}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

fn sweep_path(out: &Path, lambda: f64) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = out
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    out.with_file_name(format!("{stem}-{}{ext}", format_lambda(lambda)))
}

fn run_matrix(args: MatrixArgs) -> Result<(), CliError> {
    let lambdas: Vec<f64> = match (&args.lambda, &args.sweep) {
        (Some(l), None) => vec![*l],
        (None, Some(list)) if !list.is_empty() => list.clone(),
        _ => {
            return Err(CliError::Usage(
                "exactly one of --lambda or --sweep is required".to_owned(),
            ))
        }
    };
    let discounts = lambdas
        .iter()
        .map(|&l| discount(l))
        .collect::<Result<Vec<_>, _>>()?;

    let files = collect_input_files(&args.inputs)?;
    let corpus = read_corpus(&files, &args.input, true)?;
    let jobs = args.jobs.unwrap_or(0) as usize;
    let n = corpus.len();
    if n >= 2 {
        eprintln!(
            "textdist: {} texts, {} pairs, {} discount factor(s)",
            n,
            n * (n - 1) / 2,
            discounts.len()
        );
    }
    let matrices = pairwise_matrix_sweep(&corpus, &discounts, jobs)?;
    for (matrix, &lambda) in matrices.iter().zip(&lambdas) {
        for i in 0..n {
            for j in i + 1..n {
                eprintln!(
                    "textdist: d4({}, {}) = {:.6} [lambda={}]",
                    matrix.labels()[i],
                    matrix.labels()[j],
                    matrix.get(i, j),
                    format_lambda(lambda)
                );
            }
        }
    }
    if args.sweep.is_some() {
        for (matrix, &lambda) in matrices.iter().zip(&lambdas) {
            let path = sweep_path(&args.out, lambda);
            write_matrix(matrix, &path)?;
            eprintln!("textdist: wrote {}", path.display());
        }
    } else {
        write_matrix(&matrices[0], &args.out)?;
        eprintln!("textdist: wrote {}", args.out.display());
    }
    Ok(())
}

fn write_matrix(matrix: &DistanceMatrix, path: &Path) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| CliError::File {
        path: path.to_owned(),
        source: e.into(),
    })?;
    matrix
        .write_csv(std::io::BufWriter::new(file))
        .map_err(|e| CliError::File {
            path: path.to_owned(),
            source: e,
        })
}

fn run_cluster(args: ClusterArgs) -> Result<(), CliError> {
    let raw = fs::read_to_string(&args.matrix).map_err(|e| CliError::File {
        path: args.matrix.clone(),
        source: e.into(),
    })?;
    let matrix = DistanceMatrix::from_csv_str(&raw)?;
    let tree = agglomerate(&matrix, args.linkage.into())?;
    let serialized = serialize_dendrogram(&tree, args.format.into());
    fs::write(&args.out, serialized.as_bytes()).map_err(|e| CliError::File {
        path: args.out.clone(),
        source: e.into(),
    })?;
    eprintln!("textdist: wrote {}", args.out.display());
    if let Some(k) = args.cut {
        let clusters = cut(&tree, k)?;
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        for (idx, members) in clusters.iter().enumerate() {
            writeln!(
                out,
                "cluster {} ({}): {}",
                idx + 1,
                members.len(),
                members.join(", ")
            )
            .map_err(|e| CliError::Core(e.into()))?;
        }
    }
    Ok(())
}

fn run_tokenize(args: TokenizeArgs) -> Result<(), CliError> {
    let text = read_input(&args.file, &args.input)?;
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    for token in text.tokens() {
        writeln!(out, "{token}").map_err(|e| CliError::Core(e.into()))?;
    }
    out.flush().map_err(|e| CliError::Core(e.into()))?;
    Ok(())
}

fn run_generate(args: GenerateArgs) -> Result<(), CliError> {
    let files = collect_input_files(std::slice::from_ref(&args.corpus))?;
    let corpus = read_corpus(&files, &args.input, false)?;
    let model = MarkovModel::from_corpus(&corpus)?;
    for k in 0..args.count {
        let seed = Seed(args.seed.wrapping_add(k));
        let generated = model.generate(args.length, seed)?;
        let words: Vec<&str> = generated.text.tokens().iter().map(|t| t.as_str()).collect();
        let path = args.out.join(format!("gen-{}-{k}.txt", args.seed));
        fs::write(&path, format!("{}\n", words.join(" "))).map_err(|e| CliError::File {
            path: path.clone(),
            source: e.into(),
        })?;
        if generated.restarts.is_empty() {
            eprintln!("textdist: wrote {}", path.display());
        } else {
            eprintln!(
                "textdist: wrote {} (restarted at {:?})",
                path.display(),
                generated.restarts
            );
        }
    }
    Ok(())
}

fn run_match(args: MatchArgs) -> Result<(), CliError> {
    let a = read_input(&args.a, &args.input)?;
    let b = read_input(&args.b, &args.input)?;
    let d = discount(args.lambda)?;
    if !args.dump_table {
        let value = position_match(&a, &b, 0, 0, d)?;
        println!("{value:.6}");
        return Ok(());
    }
    let table = PositionMatchTable::compute(&a, &b, d)?;
    // Tokens are pure letters, so no CSV quoting is ever needed here.
    let mut csv = String::new();
    let header: Vec<&str> = b.tokens().iter().map(|t| t.as_str()).collect();
    csv.push(',');
    csv.push_str(&header.join(","));
    csv.push('\n');
    for i in 0..table.rows() {
        csv.push_str(a.tokens()[i].as_str());
        for j in 0..table.cols() {
            csv.push_str(&format!(",{:.6}", table.get(i, j)));
        }
        csv.push('\n');
    }
    match &args.out {
        Some(path) => fs::write(path, csv.as_bytes()).map_err(|e| CliError::File {
            path: path.clone(),
            source: e.into(),
        })?,
        None => print!("{csv}"),
    }
    Ok(())
}
