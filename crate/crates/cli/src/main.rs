use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use splz::archive::{self, ArchiveReader, StoreMode};
use splz::graph::{normalize, parse_co, parse_gr, Graph, RawGraph, VertexId};
use splz::partition::{plan_regions, LenToDic};
use splz::query::{self, BenchOptions, QueryContext};
use splz::sssp::{self, apsp_sweep};
use splz::stats;
use splz::Error;

/// Build and query compressed all-pairs shortest-path tree archives.
#[derive(Debug, Parser)]
#[command(name = "splz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute every shortest-path tree and write a compressed archive.
    Preprocess(PreprocessArgs),
    /// Print the tree of one source.
    Query(QueryArgs),
    /// Recompute trees with Dijkstra and compare against the archive.
    Verify(VerifyArgs),
    /// Time queries against copy and Dijkstra baselines.
    Bench(BenchArgs),
    /// Similarity and compression-ratio tables.
    #[command(subcommand)]
    Stats(StatsCommand),
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// DIMACS arc file.
    #[arg(long)]
    gr: PathBuf,
    /// DIMACS coordinate file.
    #[arg(long)]
    co: PathBuf,
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    out: PathBuf,
    /// Region count factor: regions = round(c * sqrt(|V|)).
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Dictionary chain step, or `inf` for one-step compression.
    #[arg(long, default_value = "inf")]
    len_to_dic: LenToDic,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to SPLZ_THREADS or every core.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Store {
    Mem,
    File,
}

impl From<Store> for StoreMode {
    fn from(s: Store) -> Self {
        match s {
            Store::Mem => StoreMode::InMemory,
            Store::File => StoreMode::FileBacked,
        }
    }
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[arg(long)]
    archive: PathBuf,
    /// 0-based source vertex.
    #[arg(long)]
    source: u64,
    /// Print predecessor ids of the original vertices (-1 for none).
    #[arg(long, requires = "gr")]
    global: bool,
    /// Arc file of the archived graph; needed by --global.
    #[arg(long)]
    gr: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mem")]
    store: Store,
    /// Write raw bytes (local) or little-endian u32 ids (global, 0xFFFFFFFF for none).
    #[arg(long)]
    raw: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sample {
    All,
    Count(usize),
}

fn parse_sample(s: &str) -> Result<Sample, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Sample::All);
    }
    s.parse()
        .map(Sample::Count)
        .map_err(|_| format!("expected a count or `all`, got `{s}`"))
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    archive: PathBuf,
    #[command(flatten)]
    graph: GraphArgs,
    /// Number of random sources to check, or `all`.
    #[arg(long, default_value = "100", value_parser = parse_sample)]
    sample: Sample,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "mem")]
    store: Store,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    archive: PathBuf,
    /// Arc file; enables the Dijkstra baseline.
    #[arg(long)]
    gr: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    queries: usize,
    #[arg(long, default_value_t = 100)]
    warmup: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "mem")]
    store: Store,
    /// CSV output path; the table is printed either way.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum StatsCommand {
    /// Tree similarity and pairwise compression ratio against path length.
    Similarity(SimilarityArgs),
    /// Archive size breakdown across region factors and chain steps.
    Ratio(RatioArgs),
}

#[derive(Debug, Args)]
struct SimilarityArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 2000)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bucket width for the printed curve.
    #[arg(long, default_value_t = 5)]
    bucket: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RatioArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    c: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "inf")]
    len_to_dic: Vec<LenToDic>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes, one exit code each.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Verify(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Verify(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Verify(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::InvalidArgument(_) => Failure::Usage(m),
            Error::Parse { .. }
            | Error::MissingCoordinates
            | Error::Format(_)
            | Error::Corrupt(_)
            | Error::PlanMismatch(_)
            | Error::VertexOutOfRange { .. }
            | Error::Io(_)
            | Error::LengthMismatch { .. } => Failure::Input(m),
            _ => Failure::Internal(m),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::from(Error::Io(e))
    }
}

type CmdResult = Result<(), Failure>;

fn threads(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("SPLZ_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("SPLZ_THREADS must be an integer, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: splz::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load_raw(gr: &Path, co: Option<&Path>) -> Result<RawGraph, Failure> {
    let mut raw = with_path(gr, parse_gr(open(gr)?))?;
    if let Some(co) = co {
        raw.coords = Some(with_path(co, parse_co(open(co)?, raw.vertex_count))?);
    }
    Ok(raw)
}

fn load_graph(gr: &Path, co: Option<&Path>) -> Result<Graph, Failure> {
    let t = Instant::now();
    let g = normalize(&load_raw(gr, co)?);
    info!(
        "loaded {} vertices ({} virtual), {} arcs in {:.2?}",
        g.vertex_count(),
        g.virtual_count(),
        g.edge_count(),
        t.elapsed()
    );
    Ok(g)
}

fn open_archive(path: &Path, store: Store) -> Result<ArchiveReader, Failure> {
    with_path(path, ArchiveReader::open(path, store.into()))
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn preprocess(args: PreprocessArgs) -> CmdResult {
    if !(args.c.is_finite() && args.c > 0.0) {
        return Err(Failure::Usage(format!("--c must be positive, got {}", args.c)));
    }
    let threads = threads(args.threads)?;
    let start = Instant::now();
    let g = load_graph(&args.graph.gr, Some(&args.graph.co))?;
    let plan = plan_regions(&g, args.c, args.len_to_dic, args.seed, threads)?;
    info!("{} regions planned in {:.2?}", plan.region_count, start.elapsed());
    let report = archive::build_archive(&g, &plan, threads, create(&args.out)?)?;
    let wall = start.elapsed();
    let extra = [
        ("c", args.c.to_string()),
        ("threads", sssp::effective_threads(threads).to_string()),
    ];
    let mut meta = create(&meta_path(&args.out))?;
    archive::write_meta(&mut meta, &report, &extra)?;
    meta.flush()?;

    let s = &report.sizes;
    let pct = |b: u64| 100.0 * b as f64 / s.total() as f64;
    let mut out = io::stdout().lock();
    writeln!(out, "wrote {}", args.out.display())?;
    writeln!(
        out,
        "vertices {} ({} original), regions {}, len_to_dic {}",
        report.header.vertex_count, report.header.original_vertex_count, report.header.region_count, report.header.len_to_dic
    )?;
    for (name, b) in [
        ("header", s.header_bytes),
        ("region table", s.region_table_bytes),
        ("dictionaries", s.dictionary_bytes),
        ("index", s.index_bytes),
        ("streams", s.stream_bytes),
    ] {
        writeln!(out, "  {name:<13} {b:>14} bytes {:>6.2}%", pct(b))?;
    }
    writeln!(out, "  {:<13} {:>14} bytes", "total", s.total())?;
    writeln!(out, "raw {} bytes, compression ratio {:.2}", s.raw_bytes(), s.ratio())?;
    writeln!(out, "wall time {:.3} s", wall.as_secs_f64())?;
    Ok(())
}

fn query_cmd(args: QueryArgs) -> CmdResult {
    let reader = open_archive(&args.archive, args.store)?;
    let v = reader.check_vertex(args.source)?;
    let mut out = BufWriter::new(io::stdout().lock());
    if args.global {
        let gr = args.gr.as_deref().expect("clap enforces --gr");
        let g = load_graph(gr, None)?;
        let pred = query::query_global(&reader, &g, v)?;
        for p in pred {
            if args.raw {
                out.write_all(&p.unwrap_or(u32::MAX).to_le_bytes())?;
            } else {
                match p {
                    Some(p) => writeln!(out, "{p}")?,
                    None => writeln!(out, "-1")?,
                }
            }
        }
    } else {
        let mut ctx = QueryContext::new(reader.vertex_count());
        let spt = query::query_into(&reader, v, &mut ctx)?;
        if args.raw {
            out.write_all(spt)?;
        } else {
            for &b in spt {
                writeln!(out, "{b}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn verify(args: VerifyArgs) -> CmdResult {
    let reader = open_archive(&args.archive, args.store)?;
    let g = load_graph(&args.graph.gr, Some(&args.graph.co))?;
    if let Err(e) = query::check_graph(&reader, &g) {
        return Err(Failure::Verify(format!("FAIL: {e}")));
    }
    let sources: Vec<VertexId> = match args.sample {
        Sample::All => (0..g.vertex_count() as VertexId).collect(),
        Sample::Count(k) => query::random_sources(&reader, k, args.seed),
    };
    let t = Instant::now();
    let mut ctx = QueryContext::new(reader.vertex_count());
    let mut checked = 0usize;
    let outcome = apsp_sweep(&g, &sources, threads(args.threads)?, |oracle| {
        let s = oracle.source;
        let got = query::query_into(&reader, s, &mut ctx)
            .map_err(|e| format!("source {s}: record cannot be decoded: {e}"))?;
        if let Some(v) = got.iter().zip(&oracle.last_move).position(|(a, b)| a != b) {
            return Err(format!(
                "source {s}: vertex {v} has last move {} in the archive, {} by Dijkstra",
                got[v], oracle.last_move[v]
            ));
        }
        checked += 1;
        if checked.is_multiple_of(10_000) {
            info!("verified {checked}/{} sources", sources.len());
        }
        Ok(())
    });
    match outcome {
        Ok(()) => {
            println!("PASS: {checked} sources match Dijkstra ({:.2?})", t.elapsed());
            Ok(())
        }
        Err(m) => Err(Failure::Verify(format!("FAIL: {m}"))),
    }
}

fn bench_cmd(args: BenchArgs) -> CmdResult {
    let reader = open_archive(&args.archive, args.store)?;
    let g = match &args.gr {
        Some(gr) => Some(load_graph(gr, None)?),
        None => None,
    };
    let options = BenchOptions {
        queries: args.queries,
        warmup: args.warmup,
        seed: args.seed,
        loop_copy: true,
    };
    let report = query::bench(&reader, g.as_ref(), &options)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{:<12} {:>8} {:>12} {:>12} {:>12} {:>9}", "name", "queries", "mean_us", "median_us", "p99_us", "x_bulk")?;
    for r in &report.rows {
        writeln!(
            out,
            "{:<12} {:>8} {:>12.3} {:>12.3} {:>12.3} {:>9.2}",
            r.name,
            r.queries,
            r.mean_us,
            r.median_us,
            r.p99_us,
            report.ratio_to_bulk_copy(&r.name).unwrap_or(f64::NAN)
        )?;
    }
    if let Some(path) = &args.out {
        report.write_csv(create(path)?)?;
    }
    Ok(())
}

fn similarity_cmd(args: SimilarityArgs) -> CmdResult {
    let g = load_graph(&args.graph.gr, Some(&args.graph.co))?;
    let samples = stats::similarity_samples(&g, args.pairs, args.seed)?;
    let len: Vec<f64> = samples.iter().map(|s| s.path_len as f64).collect();
    let sim: Vec<f64> = samples.iter().map(|s| s.similarity).collect();
    let rho = stats::spearman(&len, &sim);
    let mut out = io::stdout().lock();
    writeln!(out, "{:>10} {:>8} {:>12} {:>12}", "path_len", "pairs", "similarity", "ratio")?;
    for p in stats::similarity_curve(&samples, args.bucket) {
        writeln!(
            out,
            "{:>10} {:>8} {:>12.4} {:>12.2}",
            p.path_len, p.pairs, p.mean_similarity, p.mean_compression_ratio
        )?;
    }
    writeln!(out, "spearman(path_len, similarity) = {rho:.4}")?;
    if let Some(path) = &args.out {
        let meta = [
            ("graph", args.graph.gr.display().to_string()),
            ("pairs", args.pairs.to_string()),
            ("seed", args.seed.to_string()),
            ("sampling", "uniform ordered pairs of original vertices, v reachable from u".to_string()),
            ("spearman", format!("{rho:.6}")),
        ];
        stats::write_similarity_csv(create(path)?, &samples, &meta)?;
    }
    Ok(())
}

fn ratio_cmd(args: RatioArgs) -> CmdResult {
    if let Some(c) = args.c.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Err(Failure::Usage(format!("--c values must be positive, got {c}")));
    }
    let g = load_graph(&args.graph.gr, Some(&args.graph.co))?;
    let rows = stats::ratio_sweep(&g, &args.c, &args.len_to_dic, args.seed, threads(args.threads)?)?;
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{:>6} {:>10} {:>8} {:>14} {:>10} {:>10}",
        "c", "len_to_dic", "regions", "archive_bytes", "ratio", "dict_share"
    )?;
    for r in &rows {
        writeln!(
            out,
            "{:>6} {:>10} {:>8} {:>14} {:>10.2} {:>10.4}",
            r.c,
            r.len_to_dic.to_string(),
            r.region_count,
            r.archive_bytes(),
            r.ratio(),
            r.sizes.dictionary_proportion()
        )?;
    }
    if let Some(path) = &args.out {
        let meta = [
            ("graph", args.graph.gr.display().to_string()),
            ("seed", args.seed.to_string()),
        ];
        stats::write_ratio_csv(create(path)?, &rows, &meta)?;
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Preprocess(a) => preprocess(a),
        Command::Query(a) => query_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Stats(StatsCommand::Similarity(a)) => similarity_cmd(a),
        Command::Stats(StatsCommand::Ratio(a)) => ratio_cmd(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            // a closed stdout pipe is not an error worth reporting
            if let Failure::Input(m) = &f {
                if m.contains("Broken pipe") {
                    return ExitCode::SUCCESS;
                }
            }
            if matches!(f, Failure::Verify(_)) {
                println!("{}", f.message());
            } else {
                eprintln!("splz: {}", f.message());
            }
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_parsing() {
        assert_eq!(parse_sample("all"), Ok(Sample::All));
        assert_eq!(parse_sample("ALL"), Ok(Sample::All));
        assert_eq!(parse_sample("12"), Ok(Sample::Count(12)));
        assert!(parse_sample("-1").is_err());
    }

    #[test]
    fn meta_sits_next_to_archive() {
        assert_eq!(meta_path(Path::new("out/a.splz")), PathBuf::from("out/a.splz.meta"));
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(Failure::from(Error::InvalidArgument("x".into())).code(), 1);
        assert_eq!(Failure::from(Error::Format("x".into())).code(), 2);
        assert_eq!(Failure::from(Error::Range { field: "f", value: 1 }).code(), 4);
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from(["splz", "preprocess", "--gr", "a", "--co", "b", "--out", "c", "--len-to-dic", "inf"]).unwrap();
        let Command::Preprocess(a) = cli.command else { panic!() };
        assert!(a.len_to_dic.is_infinite());
        assert_eq!(a.c, 1.0);
        assert!(Cli::try_parse_from(["splz", "preprocess", "--gr", "a", "--co", "b", "--out", "c", "--len-to-dic", "0"]).is_err());
    }
}
