use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gsv_core::aggregate::{build_swarm, explain_dataset, export_csv, Dataset, Engine};
use gsv_core::explanation::explanations_to_json;
use gsv_core::game::{glove_game, glove_partition, Rational};
use gsv_core::validation::{self, ValidationConfig};
use gsv_core::{
    import_xgboost_dump, parse_native, parse_partition, render_swarm_svg, Comparator,
    FeaturePartition, SwarmOptions, TreeEnsemble, XgboostImport,
};

/// Grouped Shapley value explanations for tree ensembles.
#[derive(Debug, Parser)]
#[command(name = "gsv", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Explain one row of a dataset.
    Explain {
        #[command(flatten)]
        input: ExplainInput,
        /// Zero-based row index in the data file.
        #[arg(long, default_value_t = 0)]
        row: usize,
    },
    /// Explain every row; writes a JSON array in row order.
    ExplainAll {
        #[command(flatten)]
        input: ExplainInput,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Compare the fast algorithm against the exact oracle on random models.
    Validate(ValidateArgs),
    /// Explain every row and draw a swarm plot (SVG) plus its data (CSV).
    Swarm {
        #[command(flatten)]
        input: ExplainInput,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Seed for the vertical jitter.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// CSV output path. Defaults to the SVG path with a .csv extension.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        title: Option<String>,
    },
    /// Print model metrics (trees, leaves, depth) and the partition summary.
    Inspect {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        groups: Option<PathBuf>,
        #[arg(long)]
        rest_group: Option<String>,
    },
    /// Classic vs grouped vs naive values on the glove game.
    GloveDemo {
        #[arg(long, default_value_t = 2)]
        left_gloves: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelFormat {
    Native,
    Xgboost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Fast,
    Oracle,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Fast => Engine::Fast,
            EngineArg::Oracle => Engine::Oracle,
        }
    }
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelFormat::Native)]
    format: ModelFormat,
    /// Additive offset. XGBoost dumps do not carry one (default 0.0); for
    /// native models this overrides the file's value.
    #[arg(long)]
    base_value: Option<f64>,
    /// Feature count for XGBoost dumps when it cannot be inferred.
    #[arg(long)]
    feature_count: Option<usize>,
}

#[derive(Debug, Args)]
struct ExplainInput {
    #[command(flatten)]
    model: ModelArgs,
    /// CSV with a header row naming the model's features.
    #[arg(long)]
    data: PathBuf,
    /// Partition file. Without it every feature is its own group.
    #[arg(long)]
    groups: Option<PathBuf>,
    /// Collect features the partition file leaves out into this group.
    #[arg(long)]
    rest_group: Option<String>,
    #[arg(long, value_enum, default_value_t = EngineArg::Fast)]
    engine: EngineArg,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    max_trees: usize,
    #[arg(long, default_value_t = 6)]
    max_depth: usize,
    #[arg(long, default_value_t = 10)]
    max_features: usize,
    #[arg(long, default_value_t = 5)]
    max_groups: usize,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Also write the report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub enum Outcome {
    Success,
    Failed,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Explain { input, row } => explain(&input, row),
        Command::ExplainAll { input, threads } => explain_all(&input, threads),
        Command::Validate(args) => validate(&args),
        Command::Swarm {
            input,
            threads,
            seed,
            csv,
            title,
        } => swarm(&input, threads, seed, csv, title),
        Command::Inspect {
            model,
            groups,
            rest_group,
        } => inspect(&model, groups.as_deref(), rest_group.as_deref()),
        Command::GloveDemo { left_gloves } => glove_demo(left_gloves),
    }
}

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {what} file {}", path.display()))
}

/// Column names of a CSV header, without the row id column.
fn csv_feature_header(text: &str) -> Result<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().context("cannot read data header")?;
    Ok(header
        .iter()
        .filter(|n| *n != gsv_core::aggregate::ROW_ID_COLUMN)
        .map(str::to_string)
        .collect())
}

fn load_model(args: &ModelArgs, data_header: Option<Vec<String>>) -> Result<TreeEnsemble> {
    let text = read(&args.model, "model")?;
    let model = match args.format {
        ModelFormat::Native => {
            let model = parse_native(&text)
                .with_context(|| format!("invalid model {}", args.model.display()))?;
            match args.base_value {
                Some(base) => TreeEnsemble::new(
                    model.trees().to_vec(),
                    base,
                    model.feature_count(),
                    model.has_feature_names().then(|| model.feature_names()),
                    model.comparator(),
                )?,
                None => model,
            }
        }
        ModelFormat::Xgboost => {
            let feature_count = args.feature_count.or(data_header.as_ref().map(Vec::len));
            let options = XgboostImport {
                base_value: args.base_value.unwrap_or(0.0),
                feature_count,
                feature_names: data_header.filter(|names| Some(names.len()) == feature_count),
            };
            import_xgboost_dump(&text, &options)
                .with_context(|| format!("invalid XGBoost dump {}", args.model.display()))?
        }
    };
    Ok(model)
}

struct Loaded {
    model: TreeEnsemble,
    data: Dataset,
    partition: FeaturePartition,
}

fn load_partition(
    model: &TreeEnsemble,
    groups: Option<&Path>,
    rest_group: Option<&str>,
) -> Result<FeaturePartition> {
    let names = model.feature_names();
    match groups {
        Some(path) => {
            let text = read(path, "partition")?;
            parse_partition(&text, model.feature_count(), Some(&names), rest_group)
                .with_context(|| format!("invalid partition file {}", path.display()))
        }
        None => Ok(FeaturePartition::singleton(&names)),
    }
}

fn load(input: &ExplainInput) -> Result<Loaded> {
    let data_text = read(&input.data, "data")?;
    let header = match input.model.format {
        ModelFormat::Xgboost => Some(csv_feature_header(&data_text)?),
        ModelFormat::Native => None,
    };
    let model = load_model(&input.model, header)?;
    let partition = load_partition(&model, input.groups.as_deref(), input.rest_group.as_deref())?;
    let data = Dataset::from_csv(&data_text, &model.feature_names())
        .with_context(|| format!("invalid data file {}", input.data.display()))?;
    Ok(Loaded {
        model,
        data,
        partition,
    })
}

/// Writes via a sibling temporary file so a failed run leaves no partial
/// output behind.
fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".partial");
            let tmp = PathBuf::from(tmp);
            fs::write(&tmp, contents).with_context(|| format!("cannot write {}", tmp.display()))?;
            fs::rename(&tmp, path).with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn with_newline(mut text: String) -> String {
    text.push('\n');
    text
}

fn explain(input: &ExplainInput, row: usize) -> Result<Outcome> {
    let Loaded {
        model,
        data,
        partition,
    } = load(input)?;
    let x = data
        .row(row)
        .with_context(|| format!("row {row} out of range: data has {} rows", data.len()))?;
    let explanation = Engine::from(input.engine).explain(&model, x, &partition)?;
    write_output(input.out.as_deref(), &with_newline(explanation.to_json()))?;
    Ok(Outcome::Success)
}

fn explain_all(input: &ExplainInput, threads: usize) -> Result<Outcome> {
    let Loaded {
        model,
        data,
        partition,
    } = load(input)?;
    let explanations = explain_dataset(&model, &data, &partition, input.engine.into(), threads)?;
    write_output(
        input.out.as_deref(),
        &with_newline(explanations_to_json(&explanations)),
    )?;
    Ok(Outcome::Success)
}

fn swarm(
    input: &ExplainInput,
    threads: usize,
    seed: u64,
    csv: Option<PathBuf>,
    title: Option<String>,
) -> Result<Outcome> {
    let Some(svg_path) = input.out.as_deref() else {
        bail!("swarm needs --out for the SVG file");
    };
    let csv_path = csv.unwrap_or_else(|| svg_path.with_extension("csv"));
    let Loaded {
        model,
        data,
        partition,
    } = load(input)?;
    if data.is_empty() {
        bail!("data file {} has no rows", input.data.display());
    }
    let (explanations, points) =
        build_swarm(&model, &data, &partition, input.engine.into(), threads)?;
    let options = SwarmOptions {
        seed,
        title,
        ..SwarmOptions::default()
    };
    let svg = render_swarm_svg(&points, &partition, &options)?;
    let table = export_csv(&explanations, &points)?;
    write_output(Some(svg_path), &svg)?;
    write_output(Some(&csv_path), &table)?;
    eprintln!(
        "wrote {} points in {} swarms to {} and {}",
        points.len(),
        partition.group_count(),
        svg_path.display(),
        csv_path.display()
    );
    Ok(Outcome::Success)
}

fn validate(args: &ValidateArgs) -> Result<Outcome> {
    if args.tolerance.is_nan() || args.tolerance < 0.0 {
        bail!("tolerance must be non-negative");
    }
    let config = ValidationConfig {
        samples: args.samples,
        seed: args.seed,
        max_trees: args.max_trees,
        max_depth: args.max_depth,
        max_features: args.max_features,
        max_groups: args.max_groups,
        tolerance: args.tolerance,
    };
    if config.samples == 0 {
        eprintln!("warning: 0 samples requested; nothing was checked");
    }
    let report = validation::run(&config)?;
    println!(
        "samples: {}  seed: {}  trees <= {}  depth <= {}  features <= {}  groups <= {}",
        config.samples,
        config.seed,
        config.max_trees,
        config.max_depth,
        config.max_features,
        config.max_groups
    );
    println!(
        "max relative deviation (grouped): {:.3e}",
        report.max_deviation
    );
    println!(
        "max relative deviation (classic): {:.3e}",
        report.max_classic_deviation
    );
    println!(
        "max efficiency residual:          {:.3e}",
        report.max_efficiency_residual
    );
    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&serde_json::json!({
            "config": config,
            "report": report,
        }))?;
        write_output(Some(path), &with_newline(json))?;
    }
    if report.passed() {
        println!("PASS (tolerance {:e})", config.tolerance);
        Ok(Outcome::Success)
    } else {
        let shown: Vec<String> = report
            .failures
            .iter()
            .take(10)
            .map(usize::to_string)
            .collect();
        println!(
            "FAIL: {} of {} samples exceed tolerance {:e}; first at sample index {} (replay with --seed {})",
            report.failures.len(),
            config.samples,
            config.tolerance,
            report.failures[0],
            config.seed
        );
        println!("failing sample indices: {}", shown.join(", "));
        Ok(Outcome::Failed)
    }
}

fn inspect(args: &ModelArgs, groups: Option<&Path>, rest_group: Option<&str>) -> Result<Outcome> {
    let model = load_model(args, None)?;
    let metrics = model.metrics();
    let mut out = String::new();
    out.push_str(&format!("trees:       {}\n", metrics.tree_count));
    out.push_str(&format!("max leaves:  {}\n", metrics.max_leaves));
    out.push_str(&format!("max depth:   {}\n", metrics.max_depth));
    out.push_str(&format!("features:    {}\n", model.feature_count()));
    out.push_str(&format!("base value:  {}\n", model.base_value()));
    let comparator = match model.comparator() {
        Comparator::LessEqual => "le (x <= threshold goes left)",
        Comparator::LessThan => "lt (x < threshold goes left)",
    };
    out.push_str(&format!("comparator:  {comparator}\n"));
    if groups.is_some() {
        let partition = load_partition(&model, groups, rest_group)?;
        out.push_str(&format!("groups:      {}\n", partition.group_count()));
        for g in partition.groups() {
            out.push_str(&format!("  {:<24} {} features\n", g.name, g.features.len()));
        }
    }
    write_output(None, &out)?;
    Ok(Outcome::Success)
}

fn ratio(r: Rational) -> String {
    format!(
        "{:>5} {:.6}",
        r.to_string(),
        *r.numer() as f64 / *r.denom() as f64
    )
}

fn glove_demo(left_gloves: usize) -> Result<Outcome> {
    if left_gloves == 0 {
        bail!("--left-gloves must be at least 1");
    }
    let game = glove_game(left_gloves)?;
    let partition = glove_partition(left_gloves)?;
    let mut out = String::new();
    out.push_str(&format!(
        "glove game: {left_gloves} left-glove holders, 1 right-glove holder; a coalition is worth 1 iff it holds a pair\n\n"
    ));
    out.push_str("classic Shapley values\n");
    for p in 0..game.player_count() {
        let label = if p < left_gloves {
            format!("left {}", p + 1)
        } else {
            "right".to_string()
        };
        out.push_str(&format!(
            "  {:<10} {}\n",
            label,
            ratio(game.classic_shapley(p)?)
        ));
    }
    out.push_str("\ngroups {left gloves}, {right glove}\n");
    out.push_str(&format!(
        "  {:<10} {:>14}   {:>14}\n",
        "group", "grouped", "naive sum"
    ));
    let grouped = game.grouped_shapley_all(&partition)?;
    for (g, value) in grouped.iter().enumerate() {
        let naive = game.naive_group_sum(&partition, g)?;
        out.push_str(&format!(
            "  {:<10} {}   {}\n",
            partition.groups()[g].name,
            ratio(*value),
            ratio(naive)
        ));
    }
    let gap = grouped[0] - game.naive_group_sum(&partition, 0)?;
    out.push_str(&format!(
        "\n=> summing classic values undervalues the left-glove group by {}\n",
        ratio(gap).trim_start()
    ));
    write_output(None, &out)?;
    Ok(Outcome::Success)
}
