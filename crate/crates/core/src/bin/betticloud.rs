//! `betticloud` command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Data errors print one
//! line `error: <Kind>: <detail>` on stderr.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use betticloud::betti::{self, Estimate, EstimateOptions, Ranked, Verdict};
use betticloud::evt::{EstimatorId, EstimatorValue};
use betticloud::pointset::{self, Format, PointSet};
use betticloud::radii::{self, DEFAULT_MAX_POINTS, DEFAULT_SEED};
use betticloud::synth::{self, Disc, Rect};
use betticloud::takens;
use betticloud::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "betticloud",
    version,
    about = "Comparative Betti-number scores for point sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate tail indices of a point set's half pairwise distances.
    Estimate {
        file: PathBuf,
        #[command(flatten)]
        opts: EstimateArgs,
    },
    /// Majority-vote comparison of two point sets.
    Compare {
        file_a: PathBuf,
        file_b: PathBuf,
        #[command(flatten)]
        opts: EstimateArgs,
    },
    /// Order point sets by median tail index, largest first.
    Rank {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        opts: EstimateArgs,
    },
    /// Generate a synthetic point set.
    Synth(SynthArgs),
    /// Export the sorted half pairwise distances as `rank,radius` csv.
    Radii {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
        max_points: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Delay-embed a scalar series into a point set.
    Embed {
        series: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        delay: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct EstimateArgs {
    /// Fixed tail size (default: floor(sqrt(m)) clamped to [5, m/4]).
    #[arg(long, conflicts_with = "k_sweep")]
    k: Option<usize>,
    /// Report per-estimator medians over ten log-spaced tail sizes.
    #[arg(long)]
    k_sweep: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    max_points: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutFormat::Table)]
    format: OutFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl EstimateArgs {
    fn options(&self) -> EstimateOptions {
        EstimateOptions {
            k: self.k,
            max_points: Some(self.max_points),
            seed: self.seed,
            sweep: self.k_sweep,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Circle,
    Torus,
    Holes,
    Pareto,
}

#[derive(Args)]
struct SynthArgs {
    shape: Shape,
    #[arg(short, default_value_t = synth::DEFAULT_N)]
    n: usize,
    #[arg(long, default_value_t = synth::DEFAULT_SIGMA)]
    sigma: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Circle radius.
    #[arg(long, default_value_t = synth::DEFAULT_CIRCLE_RADIUS)]
    radius: f64,
    /// Torus major radius.
    #[arg(long, default_value_t = synth::DEFAULT_TORUS_MAJOR)]
    major: f64,
    /// Torus minor radius.
    #[arg(long, default_value_t = synth::DEFAULT_TORUS_MINOR)]
    minor: f64,
    /// Rectangle width for `holes`.
    #[arg(long, default_value_t = 4.0)]
    width: f64,
    /// Rectangle height for `holes`.
    #[arg(long, default_value_t = 4.0)]
    height: f64,
    /// Hole disc `cx,cy,radius`; repeatable. Defaults to four discs.
    #[arg(long = "disc", value_parser = parse_disc)]
    discs: Vec<Disc>,
    /// Sample the rectangle without holes.
    #[arg(long, conflicts_with = "discs")]
    no_holes: bool,
    /// Pareto tail index.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(short, long)]
    output: PathBuf,
}

fn parse_disc(s: &str) -> Result<Disc, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("bad disc `{s}`: {e}"))?;
    match parts.as_slice() {
        &[cx, cy, r] => Ok(Disc::new(cx, cy, r)),
        _ => Err(format!("disc `{s}` must be cx,cy,radius")),
    }
}

enum Failure {
    Data(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load_points(path: &Path) -> CliResult<PointSet> {
    let bytes = read(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(pointset::parse_pointset(&bytes, Format::from_path(path))?.with_label(label))
}

/// Loads a set for estimation; a file without points is too small to estimate.
fn load_for_estimate(path: &Path) -> CliResult<PointSet> {
    match load_points(path) {
        Err(Failure::Data(Error::EmptyInput)) => Err(Error::TooFewPoints { n: 0 }.into()),
        other => other,
    }
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e))
        }
    }
}

fn output_format(path: &Path) -> Format {
    match Format::from_path(path) {
        Format::Xyz => Format::Xyz,
        _ => Format::Csv,
    }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EstimatorsJson<'a> {
    hill: &'a EstimatorValue,
    pickands: &'a EstimatorValue,
    moment: &'a EstimatorValue,
    qq: &'a EstimatorValue,
    peng: &'a EstimatorValue,
    moment_ratio: &'a EstimatorValue,
}

#[derive(Serialize)]
struct EstimateJson<'a> {
    n_points: usize,
    n_radii: usize,
    dropped_zeros: usize,
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_grid: Option<&'a [usize]>,
    estimators: EstimatorsJson<'a>,
    median_gamma: MaybeValue,
}

struct MaybeValue(Option<f64>);

impl Serialize for MaybeValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Some(v) => s.serialize_f64(v),
            None => s.serialize_str("degenerate"),
        }
    }
}

fn estimate_json(e: &Estimate) -> EstimateJson<'_> {
    let r = &e.report;
    EstimateJson {
        n_points: e.n_points,
        n_radii: e.n_radii,
        dropped_zeros: e.dropped_zeros,
        k: r.k,
        k_grid: r.k_grid.as_deref(),
        estimators: EstimatorsJson {
            hill: r.get(EstimatorId::Hill),
            pickands: r.get(EstimatorId::Pickands),
            moment: r.get(EstimatorId::Moment),
            qq: r.get(EstimatorId::Qq),
            peng: r.get(EstimatorId::Peng),
            moment_ratio: r.get(EstimatorId::MomentRatio),
        },
        median_gamma: MaybeValue(r.median_gamma),
    }
}

fn fmt_table(v: Option<f64>) -> String {
    v.map_or_else(|| "degenerate".to_string(), |x| format!("{x:.5}"))
}

fn fmt_csv(v: Option<f64>) -> String {
    v.map_or_else(|| "degenerate".to_string(), |x| format!("{x:?}"))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

const ESTIMATE_COLUMNS: &str =
    "n_points,n_radii,dropped_zeros,k,hill,pickands,moment,qq,peng,moment_ratio,median_gamma";

fn estimate_row(e: &Estimate, fmt: fn(Option<f64>) -> String, sep: &str) -> String {
    let mut cells = vec![
        e.n_points.to_string(),
        e.n_radii.to_string(),
        e.dropped_zeros.to_string(),
        e.report.k.to_string(),
    ];
    cells.extend(e.report.values.iter().map(|v| fmt(v.value())));
    cells.push(fmt(e.report.median_gamma));
    cells.join(sep)
}

fn render_estimate(label: &str, e: &Estimate, format: OutFormat) -> String {
    match format {
        OutFormat::Json => to_json(&estimate_json(e)),
        OutFormat::Csv => format!(
            "label,{ESTIMATE_COLUMNS}\n{label},{}\n",
            estimate_row(e, fmt_csv, ",")
        ),
        OutFormat::Table => format!(
            "label\t{}\n{label}\t{}\n",
            ESTIMATE_COLUMNS.replace(',', "\t"),
            estimate_row(e, fmt_table, "\t")
        ),
    }
}

#[derive(Serialize)]
struct CompareJson<'a> {
    outcome: &'static str,
    tally: Tally,
    votes: std::collections::BTreeMap<&'static str, &'static str>,
    a: EstimateJson<'a>,
    b: EstimateJson<'a>,
}

#[derive(Serialize)]
struct Tally {
    #[serde(rename = "A_larger")]
    a_larger: usize,
    #[serde(rename = "B_larger")]
    b_larger: usize,
    abstain: usize,
}

fn render_compare(v: &Verdict, format: OutFormat) -> String {
    match format {
        OutFormat::Json => to_json(&CompareJson {
            outcome: v.outcome.as_str(),
            tally: Tally {
                a_larger: v.a_larger,
                b_larger: v.b_larger,
                abstain: v.abstain,
            },
            votes: EstimatorId::ALL
                .iter()
                .map(|&id| (id.name(), v.vote(id).as_str()))
                .collect(),
            a: estimate_json(&v.a),
            b: estimate_json(&v.b),
        }),
        OutFormat::Csv | OutFormat::Table => {
            let (sep, fmt): (&str, fn(Option<f64>) -> String) = match format {
                OutFormat::Csv => (",", fmt_csv),
                _ => ("\t", fmt_table),
            };
            let mut out = String::new();
            writeln!(out, "{}", v.outcome.as_str()).unwrap();
            writeln!(out, "estimator{sep}A{sep}B{sep}vote").unwrap();
            for id in EstimatorId::ALL {
                writeln!(
                    out,
                    "{id}{sep}{}{sep}{}{sep}{}",
                    fmt(v.a.report.get(id).value()),
                    fmt(v.b.report.get(id).value()),
                    v.vote(id).as_str()
                )
                .unwrap();
            }
            writeln!(
                out,
                "median_gamma{sep}{}{sep}{}{sep}",
                fmt(v.a.report.median_gamma),
                fmt(v.b.report.median_gamma)
            )
            .unwrap();
            writeln!(
                out,
                "tally{sep}A_larger={}{sep}B_larger={}{sep}abstain={}",
                v.a_larger, v.b_larger, v.abstain
            )
            .unwrap();
            out
        }
    }
}

#[derive(Serialize)]
struct RankJson<'a> {
    rank: usize,
    file: String,
    tie_wins: usize,
    #[serde(flatten)]
    estimate: EstimateJson<'a>,
}

fn render_rank(files: &[PathBuf], ranked: &[Ranked], format: OutFormat) -> String {
    let name = |r: &Ranked| files[r.input_index].display().to_string();
    match format {
        OutFormat::Json => to_json(
            &ranked
                .iter()
                .enumerate()
                .map(|(i, r)| RankJson {
                    rank: i + 1,
                    file: name(r),
                    tie_wins: r.tie_wins,
                    estimate: estimate_json(&r.estimate),
                })
                .collect::<Vec<_>>(),
        ),
        OutFormat::Csv | OutFormat::Table => {
            let (sep, fmt): (&str, fn(Option<f64>) -> String) = match format {
                OutFormat::Csv => (",", fmt_csv),
                _ => ("\t", fmt_table),
            };
            let mut out = format!("rank{sep}file{sep}median_gamma{sep}tie_wins\n");
            for (i, r) in ranked.iter().enumerate() {
                writeln!(
                    out,
                    "{}{sep}{}{sep}{}{sep}{}",
                    i + 1,
                    name(r),
                    fmt(r.estimate.report.median_gamma),
                    r.tie_wins
                )
                .unwrap();
            }
            out
        }
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Estimate { file, opts } => {
            let ps = load_for_estimate(&file)?;
            let est = betti::estimate(&ps, &opts.options())?;
            let label = ps.label().unwrap_or("");
            emit(
                opts.output.as_deref(),
                &render_estimate(label, &est, opts.format),
            )
        }
        Command::Compare {
            file_a,
            file_b,
            opts,
        } => {
            let a = load_for_estimate(&file_a)?;
            let b = load_for_estimate(&file_b)?;
            let v = betti::compare(&a, &b, &opts.options())?;
            emit(opts.output.as_deref(), &render_compare(&v, opts.format))
        }
        Command::Rank { files, opts } => {
            let sets = files
                .iter()
                .map(|f| load_for_estimate(f))
                .collect::<CliResult<Vec<_>>>()?;
            let ranked = betti::rank(&sets, &opts.options())?;
            emit(
                opts.output.as_deref(),
                &render_rank(&files, &ranked, opts.format),
            )
        }
        Command::Synth(args) => {
            let ps = match args.shape {
                Shape::Circle => synth::gen_circle(args.n, args.radius, args.sigma, args.seed)?,
                Shape::Torus => {
                    synth::gen_torus(args.n, args.major, args.minor, args.sigma, args.seed)?
                }
                Shape::Holes => {
                    let rect = Rect::new(args.width, args.height);
                    let discs = if args.no_holes {
                        Vec::new()
                    } else if args.discs.is_empty() {
                        synth::default_holes().1
                    } else {
                        args.discs.clone()
                    };
                    synth::gen_holes(args.n, rect, &discs, args.seed)?
                }
                Shape::Pareto => synth::gen_pareto(args.n, args.gamma, args.seed)?,
            };
            let text = pointset::write_pointset(&ps, output_format(&args.output))?;
            emit(Some(&args.output), &text)
        }
        Command::Radii {
            file,
            max_points,
            seed,
            output,
        } => {
            let ps = load_points(&file)?;
            let rs = radii::extract_radii(&ps, Some(max_points), Some(seed))?;
            emit(Some(&output), &radii::export_radii(&rs))
        }
        Command::Embed {
            series,
            dim,
            delay,
            output,
        } => {
            let s = takens::parse_series(&read(&series)?)?;
            let ps = takens::embed(&s, dim, delay)?;
            let text = pointset::write_pointset(&ps, output_format(&output))?;
            emit(Some(&output), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(e)) => {
            eprintln!("error: {}: {e}", e.kind());
            ExitCode::from(2)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: Io: {}: {e}", path.display());
            ExitCode::from(2)
        }
    }
}
