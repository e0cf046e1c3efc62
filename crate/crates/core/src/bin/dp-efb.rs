use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dpefb::audit::empirical_dp_check;
use dpefb::game_tree::{enumerate_environments, parse_environments, parse_tree, validate_tree, NodeKind};
use dpefb::harness::{generate_random_tree, run_experiment, write_outputs, ExperimentConfig, LossLaw, TreeShape};
use dpefb::oracle::{best_fixed_dp, enumerate_reduced_strategies};
use dpefb::rng::stream;
use dpefb::{Error, Game, DEFAULT_ENUMERATION_CAP};

const EXIT_INVALID: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(
    name = "dp-efb",
    version,
    about = "Locally private bandit learning in extensive-form games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a tree file
    Validate { file: PathBuf },
    /// Print per-node n, m, beta as CSV
    Profile { file: PathBuf },
    /// Print a random tree file
    GenTree {
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        branch: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        infoset_prob: f64,
        /// uniform | binary | a constant in [0,1]
        #[arg(long, default_value = "uniform")]
        loss: String,
    },
    /// Best fixed reduced strategy against an environment file
    BestFixed {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        envs: PathBuf,
    },
    /// Run the protocol loop from a config file
    Simulate(SimulateArgs),
    /// Audit local differential privacy of the report mechanism
    AuditDp(AuditArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<u32>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    allow_large_epsilon: bool,
    #[arg(long)]
    record_policy_every: Option<u64>,
    /// Any config key, as key=value (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 64)]
    bins: usize,
    /// Index into the enumerated reduced strategies
    #[arg(long, conflicts_with = "all")]
    sigma: Option<usize>,
    /// Index into the enumerated environments
    #[arg(long, conflicts_with = "all")]
    mu: Option<usize>,
    #[arg(long, conflicts_with = "all")]
    mu_prime: Option<usize>,
    /// Audit every strategy and every unordered environment pair
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parse { .. } | Error::LossOutOfRange { .. } | Error::NoRoot | Error::InvalidTree(_) => {
                    EXIT_INVALID
                }
                _ => EXIT_RUNTIME,
            };
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    Ok(fs::read_to_string(path)?)
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Validate { file } => {
            let tree = parse_tree(&read(&file)?)?;
            match validate_tree(&tree) {
                Ok(()) => {
                    println!("ok: {} nodes, {} actions", tree.len(), tree.actions().len());
                    Ok(ExitCode::SUCCESS)
                }
                Err(violations) => {
                    for v in violations {
                        println!("{v}");
                    }
                    Ok(ExitCode::from(EXIT_INVALID))
                }
            }
        }
        Command::Profile { file } => {
            let game = Game::parse(&read(&file)?)?;
            println!("id,kind,n,m,beta");
            for (i, node) in game.tree.nodes().iter().enumerate() {
                if matches!(node.kind, NodeKind::Leaf { .. }) {
                    continue;
                }
                let v = dpefb::NodeId(i as u32);
                println!(
                    "{v},{},{},{},{}",
                    node.kind.tag(),
                    game.profiles.n(v),
                    game.profiles.m(v),
                    game.profiles.beta(v)
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::GenTree {
            depth,
            branch,
            seed,
            infoset_prob,
            loss,
        } => {
            if depth < 1 || branch < 2 || !(0.0..=1.0).contains(&infoset_prob) {
                return Err(Error::InvalidArgument(
                    "need depth >= 1, branch >= 2, infoset-prob in [0,1]".into(),
                ));
            }
            let loss = match loss.as_str() {
                "uniform" => LossLaw::Uniform,
                "binary" => LossLaw::Binary,
                x => match x.parse::<f64>() {
                    Ok(c) if (0.0..=1.0).contains(&c) => LossLaw::Constant(c),
                    _ => return Err(Error::InvalidArgument(format!("bad loss law `{x}`"))),
                },
            };
            let shape = TreeShape {
                depth,
                max_branch: branch,
                infoset_prob,
                loss,
            };
            print!("{}", generate_random_tree(&shape, &mut stream(seed, 0)));
            Ok(ExitCode::SUCCESS)
        }
        Command::BestFixed { tree, envs } => {
            let game = Game::parse(&read(&tree)?)?;
            let envs = parse_environments(&game.tree, &read(&envs)?)?;
            let best = best_fixed_dp(&game.tree, &envs)?;
            println!("sigma_star={}", best.sigma_star);
            println!("total_loss={}", best.total_loss);
            println!("trials={}", envs.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(args) => simulate(args),
        Command::AuditDp(args) => audit(args),
    }
}

fn simulate(args: SimulateArgs) -> Result<ExitCode, Error> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects key=value, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(x) = args.horizon {
        cfg.horizon = x;
    }
    if let Some(x) = args.epsilon {
        cfg.epsilon = x;
    }
    if let Some(x) = args.seed {
        cfg.seed = x;
    }
    if let Some(x) = args.replications {
        cfg.replications = x;
    }
    if let Some(x) = args.out_dir {
        cfg.out_dir = Some(x);
    }
    if args.allow_large_epsilon {
        cfg.allow_large_epsilon = true;
    }
    if let Some(x) = args.record_policy_every {
        cfg.record_policy_every = x;
    }
    if cfg.allow_large_epsilon && cfg.epsilon >= 1.0 {
        eprintln!(
            "warning: epsilon = {} is outside (0, 1); privacy guarantee is weaker than intended",
            cfg.epsilon
        );
    }
    let exp = cfg.resolve()?;
    let result = run_experiment(&exp)?;
    match &cfg.out_dir {
        Some(dir) => {
            write_outputs(&exp.game.tree, &result, dir)?;
            eprintln!("wrote {}", dir.display());
        }
        None => print!("{}", dpefb::harness::output::summary_text(&result.summary)),
    }
    Ok(ExitCode::SUCCESS)
}

fn audit(args: AuditArgs) -> Result<ExitCode, Error> {
    let game = Game::parse(&read(&args.tree)?)?;
    let tree = &game.tree;
    let strategies =
        enumerate_reduced_strategies(tree, &game.profiles, tree.root(), DEFAULT_ENUMERATION_CAP)?.strategies;
    let envs = enumerate_environments(tree, DEFAULT_ENUMERATION_CAP)?;

    let triples: Vec<(usize, usize, usize)> = if args.all {
        let mut out = Vec::new();
        for s in 0..strategies.len() {
            for m in 0..envs.len() {
                for m2 in m + 1..envs.len() {
                    out.push((s, m, m2));
                }
            }
        }
        out
    } else {
        vec![(
            args.sigma.unwrap_or(0),
            args.mu.unwrap_or(0),
            args.mu_prime.unwrap_or(0),
        )]
    };

    let mut rng = stream(args.seed, 0);
    let mut all_pass = true;
    println!("sigma,mu,mu_prime,analytic_sup_log_ratio,empirical_max_log_ratio,bins_used,verdict");
    for (s, m, m2) in triples {
        let (Some(sigma), Some(mu), Some(mu2)) = (strategies.get(s), envs.get(m), envs.get(m2)) else {
            return Err(Error::InvalidArgument(format!(
                "index out of range: {} strategies, {} environments",
                strategies.len(),
                envs.len()
            )));
        };
        let r = empirical_dp_check(tree, sigma, mu, mu2, args.epsilon, args.samples, args.bins, &mut rng)?;
        all_pass &= r.pass;
        println!(
            "{s},{m},{m2},{},{},{},{}",
            r.analytic_sup_log_ratio,
            r.empirical_max_log_ratio,
            r.bins_used,
            if r.pass { "pass" } else { "fail" }
        );
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INVALID)
    })
}
