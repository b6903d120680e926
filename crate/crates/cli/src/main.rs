use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use circint::circular::PathLossLaw;
use circint::deployment::{map_deployment, profile_csv, Deployment};
use circint::experiments::{
    collaboration_curves, decomposition_curves, run_collaboration, run_ks_sweep, run_papr,
    run_single_circle_decomposition, ExperimentConfig, ResultTable,
};
use circint::gamma::{canonicalize, parse_term_set, sum_pdf_adaptive, sum_pdf_precise, SumOptions, DEFAULT_MERGE_TOL};

#[derive(Parser)]
#[command(name = "circint", version, about = "Circular interference model experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mapping accuracy: KS distance between mapped model and PPP deployments.
    KsSweep(RunArgs),
    /// Peak-to-average ratio of mapped power profiles.
    Papr(RunArgs),
    /// SIR and rate under the three collaboration schemes.
    Collab(RunArgs),
    /// Single-circle interference split into per-scale contributions.
    Decompose(RunArgs),
    /// Map one deployment file onto a circular model.
    Map(MapArgs),
    /// Density and CDF of a sum of Gamma variables.
    Pdf(PdfArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output stem; `.csv` and `.json` are appended.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Use the original study's snapshot and sample counts.
    #[arg(long)]
    paper_scale: bool,
}

#[derive(Args)]
struct MapArgs {
    /// Deployment text file (JSON header line, then `rho psi p_tx k theta` rows).
    deployment: PathBuf,
    #[arg(long, default_value_t = 1)]
    circles: usize,
    #[arg(long, default_value_t = 20)]
    nodes: u32,
    /// TOML experiment configuration supplying the path-loss law.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output stem; writes `<stem>.toml` and `<stem>.profile.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PdfArgs {
    /// Term-set file (`shape scale` per line, or a JSON array).
    terms: PathBuf,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Upper end of the grid; defaults to ten times the mean.
    #[arg(long)]
    x_max: Option<f64>,
    /// Evaluate in extended precision regardless of conditioning.
    #[arg(long)]
    precise: bool,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(args: &RunArgs, command: &str) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_toml(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if args.config.is_none() {
        config.id = command.into();
    }
    if args.paper_scale {
        config = config.paper_scale();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n) = args.snapshots {
        config.snapshots = n;
    }
    if let Some(n) = args.samples {
        config.samples = n;
    }
    if let Some(out) = &args.out {
        config.output = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn output_stem(config: &ExperimentConfig) -> PathBuf {
    config.output.clone().unwrap_or_else(|| PathBuf::from(&config.id))
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_table(table: &ResultTable, stem: &Path) -> Result<()> {
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let (csv, json) = table.write(stem)?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

fn write_curves(curves: &[(String, String)], stem: &Path) -> Result<()> {
    for (name, csv) in curves {
        let path = with_suffix(stem, &format!(".{name}.csv"));
        fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("wrote {} curve files", curves.len());
    Ok(())
}

fn run(args: &RunArgs, command: &str) -> Result<()> {
    let config = load_config(args, command)?;
    let stem = output_stem(&config);
    log::info!("running {command} with seed {}", config.seed);
    let table = match command {
        "ks-sweep" => run_ks_sweep(&config)?,
        "papr" => run_papr(&config)?,
        "collab" => run_collaboration(&config)?,
        "decompose" => run_single_circle_decomposition(&config)?,
        _ => unreachable!(),
    };
    write_table(&table, &stem)?;
    match command {
        "collab" => write_curves(&collaboration_curves(&config)?, &stem),
        "decompose" => write_curves(&decomposition_curves(&config, 400)?, &stem),
        _ => Ok(()),
    }
}

fn map(args: &MapArgs) -> Result<()> {
    let text =
        fs::read_to_string(&args.deployment).with_context(|| format!("reading {}", args.deployment.display()))?;
    let dep = Deployment::from_text(&text)?;
    let law: PathLossLaw = match &args.config {
        Some(path) => ExperimentConfig::from_toml(&fs::read_to_string(path)?)?.path_loss,
        None => PathLossLaw::default(),
    };
    let mapping = map_deployment(&dep, &law, args.circles, args.nodes)?;
    let scenario = mapping.scenario.to_toml()?;
    match &args.out {
        Some(stem) => {
            fs::write(with_suffix(stem, ".toml"), scenario)?;
            fs::write(with_suffix(stem, ".profile.csv"), profile_csv(&mapping.scenario))?;
            println!(
                "mapped {} stations onto {} circles ({} dropped)",
                dep.len(),
                mapping.scenario.circles.len(),
                mapping.dropped
            );
        }
        None => print!("{scenario}"),
    }
    Ok(())
}

fn pdf(args: &PdfArgs) -> Result<()> {
    let text = fs::read_to_string(&args.terms).with_context(|| format!("reading {}", args.terms.display()))?;
    let terms = parse_term_set(&text)?;
    if terms.is_empty() {
        bail!("term set is empty");
    }
    if args.points < 2 {
        bail!("need at least two grid points");
    }
    let mean: f64 = terms.iter().map(|t| t.mean()).sum();
    let x_max = args.x_max.unwrap_or(10.0 * mean);
    if !(x_max > 0.0 && x_max.is_finite()) {
        bail!("x-max must be positive and finite");
    }
    let grid = (0..args.points).map(|i| x_max * i as f64 / (args.points - 1) as f64);

    let rows: Vec<(f64, f64, f64)> = match (args.precise, sum_pdf_adaptive(&terms)) {
        (false, Ok((mix, _))) => grid.map(|y| (y, mix.pdf(y), mix.cdf(y))).collect(),
        _ => {
            let mix = sum_pdf_precise(&canonicalize(&terms, DEFAULT_MERGE_TOL)?, &SumOptions::default())?;
            grid.map(|y| (y, mix.pdf(y), mix.cdf(y))).collect()
        }
    };
    let mut csv = format!("# terms={}\ny,pdf,cdf\n", terms.len());
    for (y, f, c) in rows {
        csv.push_str(&format!("{y:?},{f:?},{c:?}\n"));
    }
    match &args.out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::init();
    match Cli::parse().command {
        Command::KsSweep(a) => run(&a, "ks-sweep"),
        Command::Papr(a) => run(&a, "papr"),
        Command::Collab(a) => run(&a, "collab"),
        Command::Decompose(a) => run(&a, "decompose"),
        Command::Map(a) => map(&a),
        Command::Pdf(a) => pdf(&a),
    }
}
