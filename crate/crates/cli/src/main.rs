use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dyadfit::io::{self, FitConfig, StudyConfig, ThetaFile};
use dyadfit::model::{build_dyad_design, Adjacency, FeatureTable, ParamVector};
use dyadfit::simulation::sample_network;
use dyadfit::{Error, ErrorKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Parser)]
#[command(name = "dyadfit", version, about = "Fit, sample and study directed dyad-independent network models")]
struct Cli {
    /// Worker threads for replication studies (default: all cores).
    #[arg(long, global = true, env = "DYADFIT_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct FitArgs {
    /// Edge list CSV with header `source,target`.
    #[arg(long)]
    edges: PathBuf,
    /// Node features CSV with header `node_id,<columns...>`.
    #[arg(long)]
    features: PathBuf,
    /// JSON fit configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Restrict the fit to the nodes listed in this `node_id` CSV.
    #[arg(long)]
    nodes: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    out: PathBuf,
    /// Coefficient table path (default: the report path with `.coefficients.csv`).
    #[arg(long)]
    coefficients: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit one model and write a report plus a coefficient table.
    Fit(FitArgs),
    /// Like `fit`, with the whole regularisation path in the report.
    Path(FitArgs),
    /// Draw a network from given coefficients and features.
    Sample {
        /// JSON file `{"theta": [...]}`.
        #[arg(long)]
        theta: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Edge list CSV to write.
        #[arg(long)]
        out: PathBuf,
        /// Fit configuration supplying the column grouping.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        nodes: Option<PathBuf>,
    },
    /// Run a seeded replication study and write metric tables.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// JSON report path; `.table1.csv` and `.table2.csv` are written next to it.
        #[arg(long)]
        out: PathBuf,
        /// Use the full published sweep: 1000 replications at n = 50, 100, 200, 400.
        #[arg(long)]
        paper_scale: bool,
    },
    /// Check the likelihood against exhaustive enumeration on tiny graphs.
    OracleCheck {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn load_fit_config(path: Option<&Path>) -> Result<FitConfig, Error> {
    match path {
        Some(p) => io::read_json(p),
        None => Ok(FitConfig::default()),
    }
}

fn load_network(
    features: &Path,
    edges: Option<&Path>,
    config: &FitConfig,
    nodes: Option<&Path>,
) -> Result<(FeatureTable<f64>, Option<Adjacency>), Error> {
    let table = io::load_features(features, config.groups.as_deref())?;
    let x = edges.map(|e| io::load_edge_list(e, table.node_ids())).transpose()?;
    let Some(nodes) = nodes else {
        return Ok((table, x));
    };
    let keep = io::allowlist_indices(table.node_ids(), &io::load_node_list(nodes)?)?;
    let x = x.map(|x| io::induced_subgraph(&x, &keep));
    Ok((table.select_nodes(&keep)?, x))
}

fn fit(args: &FitArgs, with_path: bool) -> Result<(), Error> {
    let config = load_fit_config(args.config.as_deref())?;
    let (features, x) = load_network(&args.features, Some(&args.edges), &config, args.nodes.as_deref())?;
    let x = x.expect("edges were requested");
    let report = io::run_fit(&features, &x, &config, with_path)?;
    io::write_json(&args.out, &report)?;
    let table = args
        .coefficients
        .clone()
        .unwrap_or_else(|| sibling(&args.out, ".coefficients.csv"));
    io::save_with(&table, |w| io::write_coefficients_csv(w, &report))?;
    println!(
        "{:?} fit: {} of {} coefficients active, loglik {}, nbic {}",
        report.method,
        report.active_set.len(),
        report.model.p,
        report.loglik,
        report.nbic
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Fit(args) => fit(&args, false),
        Command::Path(args) => fit(&args, true),
        Command::Sample {
            theta,
            features,
            seed,
            out,
            config,
            nodes,
        } => {
            let config = load_fit_config(config.as_deref())?;
            let (table, _) = load_network(&features, None, &config, nodes.as_deref())?;
            let theta: ThetaFile = io::read_json(&theta)?;
            let theta = ParamVector::from_vec(theta.theta)?;
            if theta.m() != table.m() {
                return Err(Error::Dimension(format!(
                    "theta has {} coefficients but the features define {} groups",
                    theta.len(),
                    table.m()
                )));
            }
            let design = build_dyad_design(&table)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y = sample_network(&theta, &design, &mut rng)?;
            let x = y.to_adjacency(table.n())?;
            io::save_edge_list(&out, &x, table.node_ids())?;
            println!("sampled {} directed edges on {} nodes", x.edge_count(), table.n());
            Ok(())
        }
        Command::Simulate {
            config,
            out,
            paper_scale,
        } => {
            let mut config: StudyConfig = io::read_json(&config)?;
            if paper_scale {
                config = config.paper_scale();
            }
            let report = io::run_study(&config)?;
            io::write_json(&out, &report)?;
            io::save_with(&sibling(&out, ".table1.csv"), |w| io::write_table1_csv(w, &report))?;
            io::save_with(&sibling(&out, ".table2.csv"), |w| io::write_table2_csv(w, &report))?;
            for s in &report.studies {
                println!(
                    "n = {}: {} replications, {} failed",
                    s.n, s.replications, s.failed
                );
            }
            Ok(())
        }
        Command::OracleCheck { n, trials, seed } => {
            let report = dyadfit::oracle::oracle_check(n, trials, seed)?;
            print!("{}", io::to_json_string(&report)?);
            if report.passed {
                Ok(())
            } else {
                Err(Error::NumericDomain(format!(
                    "oracle deviations exceed {}",
                    dyadfit::oracle::OracleReport::TOLERANCE
                )))
            }
        }
    }
}

fn fail(kind: &str, code: u8, message: &str) -> ExitCode {
    let message = message.split_whitespace().collect::<Vec<_>>().join(" ");
    eprintln!("error: kind={kind} code={code} message={message:?}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or_default();
            return fail("usage", 1, first.trim_start_matches("error: "));
        }
    };
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(usize::from(k)).build_global() {
            return fail("usage", 1, &e.to_string());
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.kind() {
            ErrorKind::Input => fail("input", 2, &e.to_string()),
            ErrorKind::Numeric => fail("numeric", 3, &e.to_string()),
        },
    }
}
