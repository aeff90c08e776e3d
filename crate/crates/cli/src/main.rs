//! `mdlearn`: score linguistic restrictions by description-length savings,
//! correlate the scores with acceptability judgments, simulate
//! identification of a generating distribution, and emit plot-ready data.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mdlearn::constructions::{Smoothing, SymbolInventory};
use mdlearn::identification::{run_identification, IdentificationConfig, IdentificationError};
use mdlearn::ingest::{self, fmt_sig, IngestError};
use mdlearn::learnability::{evaluate_construction, ExposureModel, LearnabilityResult};
use mdlearn::stats::{correlate, relative_grammaticality, ExclusionReason, StatsError};

#[derive(Parser)]
#[command(
    name = "mdlearn",
    version,
    about = "Description-length learnability analysis and identification simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score each construction: grammar bits vs. per-occurrence corpus
    /// savings, extrapolated to years of exposure
    Learnability(LearnabilityArgs),
    /// Correlate a learnability report with mean acceptability judgments
    Correlate(CorrelateArgs),
    /// Run seeded identification simulations over a hypothesis family
    Identify(IdentifyArgs),
    /// Emit plot-ready CSV (optionally SVG) from a report
    PlotData(PlotDataArgs),
}

#[derive(Args)]
struct LearnabilityArgs {
    /// construction specs (JSON)
    #[arg(long)]
    constructions: PathBuf,
    /// output report CSV
    #[arg(long)]
    out: PathBuf,
    /// total symbol inventory pricing new grammar rules at log2(S) bits each
    #[arg(long, default_value_t = 100_000)]
    symbols: u64,
    /// total word count of the corpus behind the construction counts
    #[arg(long = "corpus-words", default_value_t = 385_000_000)]
    corpus_words: u64,
    /// assumed words heard per year; a coarse configuration default, not an
    /// empirical estimate — adjust to your population
    #[arg(long, default_value_t = 10_000_000)]
    exposure: u64,
}

#[derive(Args)]
struct CorrelateArgs {
    /// learnability report CSV (from the learnability subcommand)
    #[arg(long)]
    report: PathBuf,
    /// judgments CSV: construction_id,mean_grammatical,mean_ungrammatical,n
    #[arg(long)]
    judgments: PathBuf,
    /// output correlations CSV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IdentifyArgs {
    /// hypothesis family (JSON)
    family: PathBuf,
    /// confidence parameter in (0,1)
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// samples drawn per run
    #[arg(long, default_value_t = 2000)]
    samples: u64,
    /// run seeds 0..N (one trace file per seed)
    #[arg(long, conflicts_with = "seed")]
    seeds: Option<u64>,
    /// single run seed
    #[arg(long)]
    seed: Option<u64>,
    /// output directory for trace_<seed>.csv files
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlotDataArgs {
    /// learnability report CSV
    #[arg(long)]
    report: PathBuf,
    /// judgments CSV; enables the two judgment scatter outputs
    #[arg(long)]
    judgments: Option<PathBuf>,
    /// output directory
    #[arg(long)]
    out: PathBuf,
    /// also write an SVG next to each CSV
    #[arg(long)]
    svg: bool,
}

/// Input problems (bad files, bad values) exit 2; environment problems
/// (unwritable outputs, internal failures) exit 1.
enum Failure {
    Input(String),
    Internal(String),
}

fn read_fail(e: IngestError) -> Failure {
    Failure::Input(e.to_string())
}

fn write_fail(e: IngestError) -> Failure {
    Failure::Internal(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Learnability(args) => cmd_learnability(&args),
        Command::Correlate(args) => cmd_correlate(&args),
        Command::Identify(args) => cmd_identify(&args),
        Command::PlotData(args) => cmd_plot_data(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn cmd_learnability(args: &LearnabilityArgs) -> Result<(), Failure> {
    let inventory =
        SymbolInventory::new(args.symbols).map_err(|e| Failure::Input(e.to_string()))?;
    let exposure = ExposureModel::new(args.corpus_words, args.exposure)
        .map_err(|e| Failure::Input(e.to_string()))?;
    let specs = ingest::load_constructions(&args.constructions).map_err(read_fail)?;
    if specs.is_empty() {
        return Err(Failure::Input(format!(
            "{}: no constructions to score",
            args.constructions.display()
        )));
    }
    let mut results = Vec::with_capacity(specs.len());
    for spec in &specs {
        let result = evaluate_construction(spec, inventory, exposure, Smoothing::Reject)
            .map_err(|e| Failure::Input(format!("construction {:?}: {e}", spec.id)))?;
        results.push(result);
    }
    ingest::write_report(&args.out, &results).map_err(write_fail)?;
    eprintln!(
        "scored {} constructions -> {}",
        results.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_correlate(args: &CorrelateArgs) -> Result<(), Failure> {
    let results = ingest::read_report(&args.report).map_err(read_fail)?;
    let judgments = ingest::load_judgments(&args.judgments).map_err(read_fail)?;
    let outcome = correlate(&results, &judgments).map_err(|e| match e {
        StatsError::InsufficientData { .. } => Failure::Input(e.to_string()),
        other => Failure::Input(other.to_string()),
    })?;
    for exclusion in &outcome.excluded {
        let why = match exclusion.reason {
            ExclusionReason::NoJudgment => "no judgment row",
            ExclusionReason::NoResult => "not in the report",
            ExclusionReason::NonFiniteScore => "unlearnable (non-finite score)",
        };
        eprintln!("excluded {}: {why}", exclusion.construction_id);
    }
    ingest::write_correlations(
        &args.out,
        &[outcome.learnability.clone(), outcome.entrenchment.clone()],
    )
    .map_err(write_fail)?;
    eprintln!(
        "correlated {} constructions -> {}",
        outcome.learnability.n_points,
        args.out.display()
    );
    Ok(())
}

fn cmd_identify(args: &IdentifyArgs) -> Result<(), Failure> {
    let family = ingest::load_family(&args.family).map_err(read_fail)?;
    let seeds: Vec<u64> = match (args.seeds, args.seed) {
        (Some(n), _) => (0..n).collect(),
        (None, Some(s)) => vec![s],
        (None, None) => vec![0],
    };
    if seeds.is_empty() {
        return Err(Failure::Input("--seeds must be at least 1".into()));
    }
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Internal(format!("{}: {e}", args.out.display())))?;

    let mut converged_steps: Vec<u64> = Vec::new();
    let mut exhausted = 0usize;
    for &seed in &seeds {
        let config = IdentificationConfig::new(args.delta, args.samples, seed)
            .map_err(|e| Failure::Input(e.to_string()))?;
        match run_identification(&family, &config) {
            Ok(trace) => {
                let path = args.out.join(format!("trace_{seed}.csv"));
                ingest::write_trace(&path, &trace).map_err(write_fail)?;
                if trace.final_guess == Some(family.true_index) {
                    if let Some(step) = trace.convergence_step {
                        converged_steps.push(step);
                    }
                }
            }
            Err(IdentificationError::FamilyExhausted { at_step }) => {
                // the empirical band excluded every hypothesis: one of the
                // ≤ δ-probability failures, reported but not fatal
                exhausted += 1;
                eprintln!("seed {seed}: every hypothesis eliminated at step {at_step}");
            }
            Err(e) => return Err(Failure::Input(e.to_string())),
        }
    }

    let runs = seeds.len();
    let converged = converged_steps.len();
    let fraction = converged as f64 / runs as f64;
    converged_steps.sort_unstable();
    let median = match converged {
        0 => "n/a".to_string(),
        n if n % 2 == 1 => converged_steps[n / 2].to_string(),
        n => {
            let mid = (converged_steps[n / 2 - 1] + converged_steps[n / 2]) as f64 / 2.0;
            fmt_sig(mid, 6)
        }
    };
    println!(
        "runs: {runs}, converged to index {}: {converged} ({}), median convergence step: {median}, exhausted: {exhausted}",
        family.true_index,
        fmt_sig(fraction, 6),
    );
    Ok(())
}

fn cmd_plot_data(args: &PlotDataArgs) -> Result<(), Failure> {
    let results = ingest::read_report(&args.report).map_err(read_fail)?;
    if results.is_empty() {
        return Err(Failure::Input(format!(
            "{}: report has no rows",
            args.report.display()
        )));
    }
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Internal(format!("{}: {e}", args.out.display())))?;

    // bar data: years ascending, unlearnable rows last
    let mut rows: Vec<(&str, f64)> = results
        .iter()
        .map(|r| (r.construction_id.as_str(), r.n_years.as_f64()))
        .collect();
    rows.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(b.0)));
    let mut csv = String::from("construction_id,N_years\n");
    for (id, years) in &rows {
        csv.push_str(&format!("{id},{}\n", fmt_sig(*years, 6)));
    }
    write_out(&args.out.join("years_by_construction.csv"), &csv)?;
    if args.svg {
        write_out(
            &args.out.join("years_by_construction.svg"),
            &bars_svg(&rows, "estimated years to learn"),
        )?;
    }

    if let Some(judgments_path) = &args.judgments {
        let judgments = ingest::load_judgments(judgments_path).map_err(read_fail)?;
        type ScoreOf = fn(&LearnabilityResult) -> f64;
        let axes: [(&str, ScoreOf); 2] = [
            ("learnability", |r| r.learnability),
            ("entrenchment", |r| r.entrenchment),
        ];
        for (x_name, x_of) in axes {
            let mut points: Vec<(&str, f64, f64)> = Vec::new();
            for result in &results {
                let x = x_of(result);
                let Some(judgment) = judgments
                    .iter()
                    .find(|j| j.construction_id == result.construction_id)
                else {
                    eprintln!("skipping {}: no judgment row", result.construction_id);
                    continue;
                };
                if !x.is_finite() {
                    eprintln!(
                        "skipping {}: non-finite {x_name}",
                        result.construction_id
                    );
                    continue;
                }
                points.push((
                    result.construction_id.as_str(),
                    x,
                    relative_grammaticality(judgment),
                ));
            }
            points.sort_by(|a, b| a.0.cmp(b.0));
            let mut csv = format!("construction_id,{x_name},relative_grammaticality\n");
            for (id, x, y) in &points {
                csv.push_str(&format!("{id},{},{}\n", fmt_sig(*x, 6), fmt_sig(*y, 6)));
            }
            let base = format!("judgments_vs_{x_name}");
            write_out(&args.out.join(format!("{base}.csv")), &csv)?;
            if args.svg {
                let xy: Vec<(f64, f64)> = points.iter().map(|&(_, x, y)| (x, y)).collect();
                write_out(
                    &args.out.join(format!("{base}.svg")),
                    &scatter_svg(&xy, x_name, "relative grammaticality"),
                )?;
            }
        }
    }
    Ok(())
}

fn write_out(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content)
        .map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn svg_open() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">\n\
         <rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>\n"
    )
}

fn axis_lines() -> String {
    let x0 = MARGIN;
    let y0 = SVG_H - MARGIN;
    let x1 = SVG_W - MARGIN;
    let y1 = MARGIN;
    format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    )
}

/// Range with 5% padding; degenerate spans widen by ±1 so scaling is
/// always well-defined.
fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

/// One `<circle>` per point, plus axes and labels.
fn scatter_svg(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let (x_lo, x_hi) = padded_range(points.iter().map(|p| p.0));
    let (y_lo, y_hi) = padded_range(points.iter().map(|p| p.1));
    let plot_w = SVG_W - 2.0 * MARGIN;
    let plot_h = SVG_H - 2.0 * MARGIN;
    let mut svg = svg_open();
    svg.push_str(&axis_lines());
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{x_label}</text>\n",
        SVG_W / 2.0,
        SVG_H - MARGIN / 3.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\" \
         transform=\"rotate(-90 {} {})\">{y_label}</text>\n",
        MARGIN / 3.0,
        SVG_H / 2.0,
        MARGIN / 3.0,
        SVG_H / 2.0
    ));
    for &(x, y) in points {
        let cx = MARGIN + (x - x_lo) / (x_hi - x_lo) * plot_w;
        let cy = SVG_H - MARGIN - (y - y_lo) / (y_hi - y_lo) * plot_h;
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"steelblue\"/>\n",
            fmt_sig(cx, 6),
            fmt_sig(cy, 6)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// One `<rect>` per row; unlearnable rows draw at full height in a
/// distinct fill.
fn bars_svg(rows: &[(&str, f64)], y_label: &str) -> String {
    let plot_w = SVG_W - 2.0 * MARGIN;
    let plot_h = SVG_H - 2.0 * MARGIN;
    let max_finite = rows
        .iter()
        .map(|r| r.1)
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let slot = plot_w / rows.len() as f64;
    let bar_w = slot * 0.8;
    let mut svg = svg_open();
    svg.push_str(&axis_lines());
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\" \
         transform=\"rotate(-90 {} {})\">{y_label}</text>\n",
        MARGIN / 3.0,
        SVG_H / 2.0,
        MARGIN / 3.0,
        SVG_H / 2.0
    ));
    for (i, (id, years)) in rows.iter().enumerate() {
        let height = if years.is_finite() {
            (years / max_finite) * plot_h
        } else {
            plot_h
        };
        let fill = if years.is_finite() { "steelblue" } else { "firebrick" };
        let x = MARGIN + i as f64 * slot + (slot - bar_w) / 2.0;
        let y = SVG_H - MARGIN - height;
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\">\
             <title>{id}</title></rect>\n",
            fmt_sig(x, 6),
            fmt_sig(y, 6),
            fmt_sig(bar_w, 6),
            fmt_sig(height, 6)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
