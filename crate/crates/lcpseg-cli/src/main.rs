//! Pipeline driver: build or load the semantic network, profile a text's
//! lexical cohesion, segment it at profile valleys, and score the result
//! against gold boundaries. Every step leaves a plot-ready or
//! machine-readable artifact in the output directory.

use std::collections::HashSet;
use std::env;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Parser;
use sha2::{Digest, Sha256};

use lcpseg_core::eval::{parse_gold, parse_paragraph_gaps, render_report};
use lcpseg_core::lcp::{write_series_json, write_series_tsv};
use lcpseg_core::lexnet::parse_dictionary;
use lcpseg_core::significance::parse_frequencies;
use lcpseg_core::{
    build_network, compute_lcp, find_valleys, load_network, match_score,
    paragraph_independence_report, save_network, tokenize, vmp_series, ActivationParams,
    CohesionParams, GoldBoundaries, Segmentation, SemanticNetwork, SignificanceTable,
    SumWeighting, TokenSequence, WindowShape, WindowSpec,
};

/// Prominence threshold used when none is given: this fraction of the
/// series range.
const DEFAULT_PROMINENCE_FACTOR: f64 = 0.1;

#[derive(Parser, Debug)]
#[command(
    name = "lcpseg",
    version,
    about = "Segment text at the valleys of its lexical cohesion profile"
)]
struct Args {
    /// Dictionary file, one `headword<TAB>definition` line per entry.
    #[arg(long, value_name = "FILE")]
    dict: PathBuf,

    /// Corpus frequency file, `word count` lines.
    #[arg(long, value_name = "FILE")]
    freq: PathBuf,

    /// Text to segment; blank lines separate paragraphs.
    #[arg(long, value_name = "FILE")]
    text: PathBuf,

    /// Gold boundaries: a `judges N` header, then `gap votes` lines.
    #[arg(long, value_name = "FILE")]
    gold: Option<PathBuf>,

    /// Paragraph gap list, one 1-based gap per line; needs --gold.
    #[arg(long, value_name = "FILE")]
    paragraphs: Option<PathBuf>,

    /// Window shape: rect, triangle, or hanning.
    #[arg(long, default_value = "hanning", value_name = "SHAPE")]
    window: String,

    /// Window half-width in tokens.
    #[arg(long, default_value_t = 25, value_name = "N")]
    delta: usize,

    /// Spreading-activation update steps.
    #[arg(long, default_value_t = 10, value_name = "N")]
    steps: u32,

    /// Damping factor on propagated activity, in (0, 1).
    #[arg(long, default_value_t = 0.8, value_name = "X")]
    damping: f64,

    /// Absolute valley prominence threshold; default is 10% of the
    /// series range.
    #[arg(long, value_name = "X")]
    min_prominence: Option<f64>,

    /// Minimum token distance between reported boundaries; default is the
    /// window half-width.
    #[arg(long, value_name = "N")]
    min_separation: Option<usize>,

    /// Matching tolerance in tokens when scoring against gold.
    #[arg(long, default_value_t = 10, value_name = "N")]
    tolerance: usize,

    /// Votes a gold gap needs to count as a boundary; default is a simple
    /// majority of the judges.
    #[arg(long, value_name = "N")]
    vote_threshold: Option<u32>,

    /// Sweep the half-width over A:B:STEP instead of one run; needs --gold.
    #[arg(long, value_name = "A:B:STEP")]
    sweep_delta: Option<String>,

    /// Also emit the vocabulary management profile and its segmentation.
    #[arg(long)]
    vmp: bool,

    /// Output directory for all artifacts.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// Worker threads for profile computation; default is all cores.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

fn main() {
    if let Err(error) = run(Args::parse()) {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}

fn run(args: Args) -> Result<()> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("--threads: building the worker pool")?;
    }
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory {}", args.out.display()))?;

    let shape: WindowShape = args
        .window
        .parse()
        .with_context(|| format!("--window {}", args.window))?;
    let activation = ActivationParams::new(args.steps, args.damping)
        .context("--steps/--damping: invalid activation parameters")?;
    let cohesion = CohesionParams {
        activation,
        sum_weighting: SumWeighting::Shaped,
    };

    let network = obtain_network(&args.dict, &args.out)?;
    let table = load_table(&args.freq)?;
    let tokens = load_text(&args.text)?;
    let gold = args.gold.as_deref().map(load_gold).transpose()?;
    let paragraph_gaps = args.paragraphs.as_deref().map(load_paragraphs).transpose()?;

    if let Some(spec) = args.sweep_delta.as_deref() {
        let gold = gold
            .as_ref()
            .context("--sweep-delta needs --gold to score each width")?;
        run_sweep(&args, spec, shape, &cohesion, &network, &table, &tokens, gold)
    } else {
        run_single(&args, shape, &cohesion, &network, &table, &tokens, gold.as_ref(), paragraph_gaps.as_deref())
    }
}

#[allow(clippy::too_many_arguments)]
fn run_single(
    args: &Args,
    shape: WindowShape,
    cohesion: &CohesionParams,
    network: &SemanticNetwork,
    table: &SignificanceTable,
    tokens: &TokenSequence,
    gold: Option<&GoldBoundaries>,
    paragraph_gaps: Option<&[usize]>,
) -> Result<()> {
    let window = WindowSpec::new(shape, args.delta)
        .with_context(|| format!("--delta {}", args.delta))?;
    let series = compute_lcp(tokens, network, table, &window, cohesion)
        .with_context(|| format!("profiling {}", args.text.display()))?;

    let mut tsv = create(&args.out.join("lcp.tsv"))?;
    write_series_tsv(&mut tsv, tokens, &series).context("writing lcp.tsv")?;
    tsv.flush().context("writing lcp.tsv")?;
    let mut json = create(&args.out.join("lcp.json"))?;
    write_series_json(&mut json, &series).context("writing lcp.json")?;
    json.flush().context("writing lcp.json")?;

    let min_prominence = resolve_prominence(args.min_prominence, series.values());
    let min_separation = args.min_separation.unwrap_or(args.delta);
    let segmentation = find_valleys(series.values(), min_prominence, min_separation)
        .context("--min-prominence/--min-separation: segmenting the profile")?;
    write_segments(
        &args.out.join("segments.json"),
        &segmentation,
        serde_json::json!({
            "window": shape.to_string(),
            "delta": args.delta,
            "steps": args.steps,
            "damping": args.damping,
            "min_prominence": min_prominence,
            "min_separation": min_separation,
        }),
    )?;

    if let Some(gold) = gold {
        let threshold = args
            .vote_threshold
            .unwrap_or_else(|| gold.majority_threshold());
        let score = match_score(&segmentation, gold, args.tolerance, threshold)
            .context("--tolerance/--vote-threshold: scoring against gold")?;
        let payload = serde_json::json!({
            "tolerance": args.tolerance,
            "vote_threshold": threshold,
            "score": score,
        });
        let mut file = create(&args.out.join("eval.json"))?;
        serde_json::to_writer_pretty(&mut file, &payload).context("writing eval.json")?;
        file.flush().context("writing eval.json")?;
    }

    if let Some(gaps) = paragraph_gaps {
        let gold = gold.context("--paragraphs needs --gold to build the report")?;
        let rows = paragraph_independence_report(&segmentation, gold, gaps);
        fs::write(args.out.join("report.txt"), render_report(&rows))
            .context("writing report.txt")?;
    }

    if args.vmp {
        run_vmp(args, tokens, &segmentation)?;
    }

    println!(
        "{} boundaries -> {}",
        segmentation.len(),
        args.out.display()
    );
    Ok(())
}

/// Emits the vocabulary management profile next to the cohesion profile:
/// counts of first occurrences per trailing interval, with boundaries at
/// the peaks (valleys of the negated series).
fn run_vmp(args: &Args, tokens: &TokenSequence, lcp_segmentation: &Segmentation) -> Result<()> {
    let series = vmp_series(tokens, args.delta)
        .with_context(|| format!("--vmp: profiling {}", args.text.display()))?;

    let mut tsv = create(&args.out.join("vmp.tsv"))?;
    for (index, (token, value)) in tokens.tokens().iter().zip(&series).enumerate() {
        writeln!(tsv, "{}\t{token}\t{value:.0}", index + 1).context("writing vmp.tsv")?;
    }
    tsv.flush().context("writing vmp.tsv")?;

    let negated: Vec<f64> = series.iter().map(|v| -v).collect();
    let min_prominence = resolve_prominence(args.min_prominence, &negated);
    let min_separation = args.min_separation.unwrap_or(args.delta);
    let segmentation = find_valleys(&negated, min_prominence, min_separation)
        .context("--vmp: segmenting the profile")?;
    write_segments(
        &args.out.join("vmp_segments.json"),
        &segmentation,
        serde_json::json!({
            "interval": args.delta,
            "min_prominence": min_prominence,
            "min_separation": min_separation,
            "lcp_boundaries": lcp_segmentation.len(),
        }),
    )?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    args: &Args,
    spec: &str,
    shape: WindowShape,
    cohesion: &CohesionParams,
    network: &SemanticNetwork,
    table: &SignificanceTable,
    tokens: &TokenSequence,
    gold: &GoldBoundaries,
) -> Result<()> {
    let (start, end, step) = parse_sweep(spec)?;
    let threshold = args
        .vote_threshold
        .unwrap_or_else(|| gold.majority_threshold());

    let summary_path = args.out.join("sweep_summary.tsv");
    let mut summary = create(&summary_path)?;
    writeln!(summary, "delta\tboundaries\tprecision\trecall\tf1")
        .context("writing sweep_summary.tsv")?;

    let mut delta = start;
    while delta <= end {
        let window =
            WindowSpec::new(shape, delta).with_context(|| format!("--sweep-delta at {delta}"))?;
        let series = compute_lcp(tokens, network, table, &window, cohesion)
            .with_context(|| format!("profiling at delta {delta}"))?;

        let mut tsv = create(&args.out.join(format!("lcp_delta_{delta}.tsv")))?;
        write_series_tsv(&mut tsv, tokens, &series)
            .with_context(|| format!("writing lcp_delta_{delta}.tsv"))?;
        tsv.flush()
            .with_context(|| format!("writing lcp_delta_{delta}.tsv"))?;

        let min_prominence = resolve_prominence(args.min_prominence, series.values());
        let min_separation = args.min_separation.unwrap_or(delta);
        let segmentation = find_valleys(series.values(), min_prominence, min_separation)
            .with_context(|| format!("segmenting at delta {delta}"))?;
        let score = match_score(&segmentation, gold, args.tolerance, threshold)
            .with_context(|| format!("scoring at delta {delta}"))?;
        writeln!(
            summary,
            "{delta}\t{}\t{:.6}\t{:.6}\t{:.6}",
            segmentation.len(),
            score.precision,
            score.recall,
            score.f1
        )
        .context("writing sweep_summary.tsv")?;

        delta += step;
    }
    summary.flush().context("writing sweep_summary.tsv")?;
    println!("sweep summary -> {}", summary_path.display());
    Ok(())
}

/// Loads the semantic network, building it from the dictionary only when no
/// cached build exists for the dictionary's content hash. The network is
/// always re-saved as `network.lexnet` in the output directory; save and
/// load round-trip bit for bit, so a cache hit and a cold build write
/// identical artifacts.
fn obtain_network(dict: &Path, out: &Path) -> Result<SemanticNetwork> {
    let bytes = fs::read(dict).with_context(|| format!("reading {}", dict.display()))?;
    let hash = hex::encode(&Sha256::digest(&bytes)[..8]);

    let cache_dir = env::var_os("LCPSEG_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| out.to_path_buf());
    fs::create_dir_all(&cache_dir)
        .with_context(|| format!("creating cache directory {}", cache_dir.display()))?;
    let cache_path = cache_dir.join(format!("network-{hash}.lexnet"));

    let network = if cache_path.exists() {
        let reader = BufReader::new(
            File::open(&cache_path)
                .with_context(|| format!("opening cached network {}", cache_path.display()))?,
        );
        load_network(reader)
            .with_context(|| format!("loading cached network {}", cache_path.display()))?
    } else {
        let entries = parse_dictionary(BufReader::new(&bytes[..]))
            .with_context(|| format!("parsing dictionary {}", dict.display()))?;
        let built = build_network(&entries, &HashSet::new())
            .with_context(|| format!("building the network from {}", dict.display()))?;
        let mut writer = create(&cache_path)?;
        save_network(&built.network, &mut writer)
            .with_context(|| format!("caching the network at {}", cache_path.display()))?;
        writer
            .flush()
            .with_context(|| format!("caching the network at {}", cache_path.display()))?;
        built.network
    };

    let artifact = out.join("network.lexnet");
    let mut writer = create(&artifact)?;
    save_network(&network, &mut writer).context("writing network.lexnet")?;
    writer.flush().context("writing network.lexnet")?;
    Ok(network)
}

fn load_table(path: &Path) -> Result<SignificanceTable> {
    let reader =
        BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    let counts =
        parse_frequencies(reader).with_context(|| format!("parsing {}", path.display()))?;
    SignificanceTable::build(counts)
        .with_context(|| format!("building the frequency table from {}", path.display()))
}

fn load_text(path: &Path) -> Result<TokenSequence> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let tokens = tokenize(&raw);
    if tokens.len() == 0 {
        bail!("{} contains no tokens", path.display());
    }
    Ok(tokens)
}

fn load_gold(path: &Path) -> Result<GoldBoundaries> {
    let reader =
        BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    parse_gold(reader).with_context(|| format!("parsing {}", path.display()))
}

fn load_paragraphs(path: &Path) -> Result<Vec<usize>> {
    let reader =
        BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    parse_paragraph_gaps(reader).with_context(|| format!("parsing {}", path.display()))
}

fn resolve_prominence(flag: Option<f64>, values: &[f64]) -> f64 {
    flag.unwrap_or_else(|| {
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        DEFAULT_PROMINENCE_FACTOR * (max - min)
    })
}

fn parse_sweep(spec: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        bail!("--sweep-delta {spec}: expected A:B:STEP");
    };
    let parse = |part: &str, name: &str| -> Result<usize> {
        part.parse()
            .with_context(|| format!("--sweep-delta {spec}: {name} is not a number"))
    };
    let (start, end, step) = (parse(start, "A")?, parse(end, "B")?, parse(step, "STEP")?);
    if start == 0 || step == 0 || start > end {
        bail!("--sweep-delta {spec}: need 1 <= A <= B and STEP >= 1");
    }
    Ok((start, end, step))
}

fn write_segments(
    path: &Path,
    segmentation: &Segmentation,
    params: serde_json::Value,
) -> Result<()> {
    let payload = serde_json::json!({
        "params": params,
        "boundaries": segmentation.boundaries(),
    });
    let mut file = create(path)?;
    serde_json::to_writer_pretty(&mut file, &payload)
        .with_context(|| format!("writing {}", path.display()))?;
    file.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| {
        format!("creating {}", path.display())
    })?))
}
