use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use qmetro::io::{read_json, to_json_string, ModelFile, PovmFile};
use qmetro::model::PreparedModel;
use qmetro::quasipure::{two_qubit_example, two_qubit_lmcc_povm};
use qmetro::report::{analysis_report, construct_report, verify_report, RunConfig};
use qmetro::{Error, Result};

const EXIT_INFEASIBLE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "qmetro", version, about = "Saturability of the multiparameter quantum Cramer-Rao bound")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Support cutoff relative to the largest eigenvalue.
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Hollowization tolerance relative to the family scale.
    #[arg(long, global = true)]
    tol_sat: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (or directory for `example`); stdout when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Suppress diagnostics on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Run configuration, or a report whose embedded configuration is reused.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Model, hollowization and geometry pipeline without construction.
    Analyze { model: PathBuf },
    /// Search for a saturating rank-one POVM.
    Construct {
        model: PathBuf,
        #[arg(long)]
        max_restarts: Option<usize>,
        #[arg(long)]
        pool_size: Option<usize>,
        #[arg(long)]
        chain_restarts: Option<usize>,
        /// Emit the outcome-wise saturating vectors when no POVM is found.
        #[arg(long)]
        allow_incomplete: bool,
    },
    /// Certificate and Fisher comparison for a given measurement.
    Verify { model: PathBuf, povm: PathBuf },
    /// Write a model file and its hand-built measurement.
    Example {
        name: String,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
        theta: f64,
    },
}

struct Context {
    quiet: bool,
    output: Option<PathBuf>,
}

impl Context {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn read_config(path: &Path) -> Result<RunConfig> {
    let v: Value = read_json(path)?;
    let v = match v {
        Value::Object(mut map) if map.contains_key("config") => map.remove("config").unwrap_or_default(),
        v => v,
    };
    Ok(serde_json::from_value(v)?)
}

/// Defaults, then the model file's tolerances, then `--config`, then flags.
fn run_config(g: &GlobalArgs, file: &ModelFile) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(t) = file.tolerances {
        cfg.tolerances = t;
    }
    if let Some(path) = &g.config {
        cfg = read_config(path)?;
    }
    if let Some(x) = g.tol_rank {
        cfg.tolerances.rank = x;
    }
    if let Some(x) = g.tol_sat {
        cfg.tolerances.sat = x;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn prepare(path: &Path, g: &GlobalArgs) -> Result<(PreparedModel, RunConfig)> {
    let file: ModelFile = read_json(path)?;
    let cfg = run_config(g, &file)?;
    let loaded = file.load(&cfg.tolerances)?;
    Ok((PreparedModel::new(loaded.model, &cfg.tolerances)?, cfg))
}

fn read_povm(path: &Path) -> Result<qmetro::model::RankOnePovm> {
    let v: Value = read_json(path)?;
    let v = match v {
        Value::Object(mut map) if map.contains_key("povm") => match map.remove("povm") {
            Some(Value::Null) | None => return Err(Error::Schema("report carries no POVM".into())),
            Some(p) => p,
        },
        v => v,
    };
    serde_json::from_value::<PovmFile>(v)?.to_povm()
}

fn run(cli: Cli) -> Result<u8> {
    let ctx = Context {
        quiet: cli.global.quiet,
        output: cli.global.output.clone(),
    };
    match cli.command {
        Command::Analyze { model } => {
            let (prepared, cfg) = prepare(&model, &cli.global)?;
            let report = analysis_report(&prepared, &cfg)?;
            for n in &report.notes {
                ctx.note(n);
            }
            ctx.emit(&to_json_string(&report)?)?;
            Ok(0)
        }
        Command::Construct {
            model,
            max_restarts,
            pool_size,
            chain_restarts,
            allow_incomplete,
        } => {
            let (prepared, mut cfg) = prepare(&model, &cli.global)?;
            if let Some(m) = max_restarts {
                cfg.max_restarts = m;
            }
            if pool_size.is_some() {
                cfg.pool_size = pool_size;
            }
            if let Some(c) = chain_restarts {
                cfg.chain_restarts = c;
            }
            cfg.allow_incomplete |= allow_incomplete;
            let (report, _) = construct_report(&prepared, &cfg)?;
            ctx.emit(&to_json_string(&report)?)?;
            if report.feasible {
                ctx.note(format!("feasible: {:?}", report.method.expect("feasible results carry a method")));
                Ok(0)
            } else {
                ctx.note(format!("infeasible: {:?}", report.reason));
                Ok(if cfg.allow_incomplete { 0 } else { EXIT_INFEASIBLE })
            }
        }
        Command::Verify { model, povm } => {
            let (prepared, cfg) = prepare(&model, &cli.global)?;
            let povm = read_povm(&povm)?;
            let report = verify_report(&prepared, &povm, &cfg)?;
            ctx.note(format!(
                "{:?}: max residual {:.3e}, Fisher gap {:.3e}",
                report.verdict, report.certificate.max_residual, report.fisher.max_gap
            ));
            ctx.emit(&to_json_string(&report)?)?;
            Ok(0)
        }
        Command::Example { name, q, theta } => {
            if name != "two-qubit" {
                return Err(Error::Schema(format!("unknown example '{name}' (known: two-qubit)")));
            }
            let dir = ctx.output.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)?;
            let model = ModelFile::from_quasipure(&two_qubit_example(q, theta), None);
            let povm = PovmFile::from_povm(&two_qubit_lmcc_povm(theta));
            let model_path = dir.join("two-qubit.model.json");
            let povm_path = dir.join("two-qubit.povm.json");
            std::fs::write(&model_path, to_json_string(&model)?)?;
            std::fs::write(&povm_path, to_json_string(&povm)?)?;
            ctx.note(format!("wrote {} and {}", model_path.display(), povm_path.display()));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("QMETRO_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
